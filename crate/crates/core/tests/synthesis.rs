use std::collections::HashSet;

use squeeze_core::bench;
use squeeze_core::sqz::render_squeezer;
use squeeze_core::synth::{enumerate, synthesize, Mode, PipelineConfig, PoolSpec, SynthError};

#[test]
fn enumeration_is_deterministic_and_duplicate_free() {
    for name in ["strnchr", "strncmp", "is_sorted"] {
        let b = bench::config(name).unwrap();
        let p = b.program();
        let pool = b.pool(&p);
        let first: Vec<_> = enumerate(&p, &pool, &b.gen(), 2).collect();
        let again: Vec<_> = enumerate(&p, &pool, &b.gen(), 2).collect();
        assert_eq!(first, again);
        assert!(first.iter().enumerate().all(|(k, c)| c.ordinal == k));
        let texts: HashSet<String> = first.iter().map(|c| render_squeezer(&c.squeezer, &p)).collect();
        assert_eq!(texts.len(), first.len(), "{name}");
    }
}

#[test]
fn strnchr_synthesizes_the_published_squeezer() {
    let b = bench::config("strnchr").unwrap();
    let p = b.program();
    let cfg = PipelineConfig {
        bank: b.bank(),
        sim: b.sim,
        len_bound: 4,
        solver: None,
        ..PipelineConfig::default()
    };
    let r = synthesize(&p, &b.pool(&p), &b.gen(), 2, &cfg).unwrap();
    assert_eq!(r.survivors.len(), 1);
    assert_eq!(r.survivors[0].squeezer, bench::published_squeezer(&p, "strnchr"));
    assert_eq!(r.report.phase3.passed, 1);
    assert_eq!(r.report.candidates, 81);
}

#[test]
fn report_does_not_depend_on_workers() {
    let b = bench::config("max_ind").unwrap();
    let p = b.program();
    let mut gen = b.gen();
    gen.mode = Mode::All;
    let run = |jobs| {
        let cfg = PipelineConfig {
            bank: b.bank(),
            sim: b.sim,
            last_phase: 1,
            jobs,
            ..PipelineConfig::default()
        };
        let mut r = synthesize(&p, &b.pool(&p), &gen, 2, &cfg).unwrap().report;
        r.phase1.seconds = 0.0;
        r
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn empty_pool_is_exhausted() {
    let p = bench::program("strnchr");
    let pool = PoolSpec::default().build(&p).unwrap();
    let r = synthesize(&p, &pool, &Default::default(), 2, &PipelineConfig::default());
    assert!(matches!(r, Err(SynthError::Exhausted(rep)) if rep.candidates == 0));
}

#[test]
fn pool_entries_are_checked() {
    let p = bench::program("strnchr");
    let bad = PoolSpec {
        atoms: vec!["s[0] == c && s[0] == 0".into()],
        ..PoolSpec::default()
    };
    assert!(bad.build(&p).is_err());
    let unknown = PoolSpec {
        positions: vec!["t".into()],
        ..PoolSpec::default()
    };
    assert!(unknown.build(&p).is_err());
}
