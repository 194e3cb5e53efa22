//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use squeeze_cli::{cmd_bench, cmd_check, cmd_emit_vc, cmd_synth, Loaded, PoolFile, Settings, SynthReport};
use squeeze_core::bank::SimBounds;
use squeeze_core::basecase::{check_trace, for_each_initial};
use squeeze_core::bench::{self, BenchConfig};
use squeeze_core::ir::{Loc, Program, State};
use squeeze_core::sqz::{apply, parse_squeezer, render_squeezer, Squeezer};
use squeeze_core::synth::{enumerate, GenConfig, Mode};
use squeeze_core::vcgen::{all_queries, Backend, BackendVerdict, Domain, SmtBackend, SmtConfig};

struct Line {
    pass: bool,
    detail: String,
}

fn line(pass: bool, detail: impl Into<String>) -> Line {
    Line {
        pass,
        detail: detail.into(),
    }
}

fn solver() -> Option<SmtConfig> {
    let c = SmtConfig::default();
    SmtBackend::available(&c).then_some(c)
}

fn settings() -> Settings {
    Settings {
        solver: solver().map(|c| c.command),
        ..Settings::default()
    }
}

fn loaded(name: &str) -> Loaded {
    let b = bench::config(name).unwrap();
    Loaded {
        program: b.program(),
        bench: Some(b),
    }
}

fn bench_pool(b: &BenchConfig) -> PoolFile {
    PoolFile {
        pool: b.pool_spec(),
        depth_bound: b.depth_bound,
        max_assigns: GenConfig::default().max_assigns,
    }
}

fn with_sim(s: &Settings, sim: SimBounds) -> Settings {
    Settings {
        n_max: Some(sim.n_max),
        m_max: Some(sim.m_max),
        ..s.clone()
    }
}

// sum_bidi on a = [7,2,9,1,4] and the squeezed trace on a' = [2,9,1,4].
fn golden_trace() -> Line {
    let p = bench::program("sum_bidi");
    let q = bench::published_squeezer(&p, "sum_bidi");
    let expected = [(0, 0, 0), (1, 7, 4), (2, 9, 5), (3, 18, 14), (4, 19, 16), (5, 23, 23)];
    let expected_sq = [(0, 0, 0), (1, 2, 4), (2, 11, 5), (3, 12, 14), (4, 16, 16)];
    let a = vec![7, 2, 9, 1, 4];
    let a_sq = vec![2, 9, 1, 4];

    // Independent oracle for the loop body.
    let oracle = |a: &[i64]| {
        let n = a.len();
        let (mut i, mut l, mut r) = (0usize, 0i64, 0i64);
        let mut out = vec![(0i64, 0i64, 0i64)];
        while i < n {
            l += a[i];
            r += a[n - i - 1];
            i += 1;
            out.push((i as i64, l, r));
        }
        out
    };
    if oracle(&a) != expected || oracle(&a_sq) != expected_sq {
        return line(false, "oracle disagrees with the expected trace");
    }

    let ilr = |st: &State| (st.scalars[0], st.scalars[1], st.scalars[2]);
    let mut st = p.state(Loc::Loop, &[("a", a.clone())], &[("i", 0), ("l", 0), ("r", 0)]);
    let mut trace = vec![st.clone()];
    for _ in 0..5 {
        st = p.step(&st).unwrap();
        trace.push(st.clone());
    }
    let got: Vec<_> = trace.iter().map(ilr).collect();
    if got != expected {
        return line(false, format!("trace {got:?}"));
    }
    let mut sq_trace = vec![p.state(Loc::Loop, &[("a", a_sq.clone())], &[("i", 0), ("l", 0), ("r", 0)])];
    for _ in 0..4 {
        let next = p.step(sq_trace.last().unwrap()).unwrap();
        sq_trace.push(next);
    }
    if sq_trace.iter().map(ilr).collect::<Vec<_>>() != expected_sq {
        return line(false, "squeezed trace differs");
    }
    // The image of σk is σ'(k-1), and σ0 also maps to σ'0.
    for (k, s) in trace.iter().enumerate() {
        let img = apply(&q, &p, s).unwrap();
        let want = &sq_trace[k.saturating_sub(1)];
        if img.arrays[0] != a_sq || ilr(&img) != ilr(want) {
            return line(false, format!("image of state {k} is {}", p.show_state(&img)));
        }
    }
    line(true, "6 states and 6 images bit-exact")
}

fn published_verify(s: &Settings) -> Line {
    let mut cases = vec![("strnchr", 0), ("strncmp", 0), ("strncmp", 1), ("strncmp", 2)];
    cases.extend([("max_ind", 0), ("is_sorted", 0), ("long_pref", 0), ("sum_bidi", 0)]);
    let mut fails = vec![];
    let mut slowest = 0.0f64;
    for (name, k) in cases {
        let l = loaded(name);
        let settings = if name == "is_sorted" {
            Settings {
                m_max: Some(3),
                ..s.clone()
            }
        } else {
            s.clone()
        };
        let q = parse_squeezer(bench::published_texts(name)[k], &l.program, l.base_bound(&settings)).unwrap();
        let t = Instant::now();
        let r = cmd_check(&l, &q, &settings).unwrap();
        let secs = t.elapsed().as_secs_f64();
        slowest = slowest.max(secs);
        if !r.ok || r.phases.len() != 3 || secs > 300.0 {
            fails.push(format!("{name}#{k} ({:?})", r.failure().map(|f| &f.detail)));
        }
    }
    let backend = if s.solver.is_some() { "smt" } else { "bounded surrogate" };
    line(
        fails.is_empty(),
        format!("8 squeezers, phase 3 via {backend}, slowest {slowest:.1}s; failures: {fails:?}"),
    )
}

/// Same action on every state: the survivors differ only in how the
/// condition is written, possibly negated with the branches swapped.
fn same_action(p: &Program, qs: &[Squeezer], values: &[i64]) -> bool {
    let i = p.var_id("i").unwrap().0;
    let mut ok = true;
    for_each_initial(p, 8, values, 0, &mut |st| {
        for at in 0..=st.arrays[0].len() as i64 {
            let mut s = st.clone();
            s.scalars[i] = at;
            if s.rank() <= qs[0].base_bound {
                continue;
            }
            let first = apply(&qs[0], p, &s).ok();
            if qs[1..].iter().any(|q| apply(q, p, &s).ok() != first) {
                ok = false;
                return Ok(false);
            }
        }
        Ok(true)
    })
    .unwrap();
    ok
}

fn synthesis(s: &Settings) -> (Line, Vec<SynthReport>) {
    let t = Instant::now();
    let reports = cmd_bench(&[], s).unwrap();
    let bench_secs = t.elapsed().as_secs_f64();
    let mut problems = vec![];
    for r in &reports {
        if !r.ok {
            problems.push(format!("{}: no verified survivor or base case {}", r.program, r.base_case.verdict));
        }
        let published = r.published_candidates.unwrap();
        match &r.note {
            Some(_) => {}
            None if r.candidates * 2 < published || r.candidates > 2 * published => {
                problems.push(format!("{}: {} candidates vs {published}", r.program, r.candidates));
            }
            None => {}
        }
    }

    let l = loaded("strncmp");
    let t = Instant::now();
    let all = Settings { mode: Mode::All, ..s.clone() };
    let r = cmd_synth(&l, &bench_pool(l.bench.as_ref().unwrap()), &all).unwrap();
    let all_secs = t.elapsed().as_secs_f64();
    let qs: Vec<Squeezer> = r
        .survivors
        .iter()
        .map(|sv| parse_squeezer(&sv.squeezer, &l.program, l.base_bound(s)).unwrap())
        .collect();
    if qs.len() < 3 {
        problems.push(format!("strncmp mode all: {} survivors", qs.len()));
    } else if !same_action(&l.program, &qs, l.bench.as_ref().unwrap().elem_pool) {
        problems.push("strncmp survivors act differently".into());
    }
    let capped: Vec<_> = reports.iter().filter_map(|r| r.note.as_ref().map(|n| format!("{}: {n}", r.program))).collect();
    let detail = format!(
        "7 benchmarks in {bench_secs:.0}s, strncmp all: {} survivors in {all_secs:.0}s; {capped:?}; problems: {problems:?}",
        qs.len()
    );
    (line(problems.is_empty(), detail), reports)
}

fn bound_sensitivity(s: &Settings) -> Line {
    let mut details = vec![];
    let mut pass = true;
    for name in ["max_ind", "min_ind"] {
        let l = loaded(name);
        let b = l.bench.clone().unwrap();
        let published = render_squeezer(&bench::published_squeezer(&l.program, name), &l.program);
        let mut sets = vec![];
        for len in [5, 6] {
            let settings = Settings {
                phase: 2,
                len_bound: len,
                mode: Mode::All,
                ..with_sim(s, b.sim)
            };
            let r = cmd_synth(&l, &bench_pool(&b), &settings).unwrap();
            sets.push(r.survivors.into_iter().map(|sv| sv.squeezer).collect::<BTreeSet<_>>());
        }
        let strict = sets[1].is_subset(&sets[0]) && sets[1].len() < sets[0].len();
        let kept = sets.iter().all(|set| set.contains(&published));
        pass &= strict && kept;
        details.push(format!("{name}: {} at 5, {} at 6, published kept {kept}", sets[0].len(), sets[1].len()));
    }
    line(pass, details.join("; "))
}

/// Initial states with all arrays of length at most 4 whose trace
/// violates φ.
fn violations(p: &Program, values: &[i64]) -> usize {
    let mut bad = 0;
    for_each_initial(p, 4 * p.arrays.len(), values, 4, &mut |st| {
        if st.arrays.iter().all(|a| a.len() <= 4) && !matches!(check_trace(p, st, 16), Ok(None)) {
            bad += 1;
        }
        Ok(true)
    })
    .unwrap();
    bad
}

fn soundness(s: &Settings, reports: &[SynthReport]) -> Line {
    let mut problems = vec![];
    let mut checked = 0;
    for r in reports.iter().filter(|r| r.ok) {
        let b = bench::config(&r.program).unwrap();
        checked += 1;
        let n = violations(&b.program(), b.elem_pool);
        if n > 0 {
            problems.push(format!("{}: {n} violations", r.program));
        }
    }
    let mut caught = 0;
    for name in bench::NAMES {
        let b = bench::config(name).unwrap();
        let l = Loaded {
            program: b.mutant(),
            bench: Some(b.clone()),
        };
        if violations(&l.program, b.elem_pool) == 0 {
            problems.push(format!("{name} mutant does not violate the property"));
        }
        let r = cmd_synth(&l, &bench_pool(&b), &with_sim(s, b.sim)).unwrap();
        if r.ok {
            problems.push(format!("{name} mutant verified"));
        } else {
            caught += 1;
        }
    }
    line(
        problems.is_empty(),
        format!("{checked} verified benchmarks clean, {caught}/7 mutants rejected; problems: {problems:?}"),
    )
}

fn backend_agreement() -> Line {
    let Some(cfg) = solver() else {
        return line(false, "no SMT solver available");
    };
    let mut smt = Backend::smt(cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut agree, mut counter, mut problems) = (0, 0, vec![]);
    for k in 0..200 {
        let name = bench::NAMES[rng.gen_range(0..bench::NAMES.len())];
        let b = bench::config(name).unwrap();
        let p = b.program();
        let base = p.base_bound.unwrap();
        let q = if rng.gen_bool(0.25) {
            bench::published_squeezer(&p, name)
        } else {
            let total = enumerate(&p, &b.pool(&p), &b.gen(), base).count();
            enumerate(&p, &b.pool(&p), &b.gen(), base)
                .nth(rng.gen_range(0..total))
                .unwrap()
                .squeezer
        };
        let queries = all_queries(&p, &q, b.sim);
        let query = &queries[rng.gen_range(0..queries.len())];
        let values = b.elem_pool[..3].to_vec();
        let domain = Domain::new(4, values);
        let mut ex = Backend::Exhaustive(domain.clone());
        let a = ex.check_limited(query, &domain.limits()).unwrap();
        let c = smt.check_limited(query, &domain.limits()).unwrap();
        for v in [&a, &c] {
            if let BackendVerdict::CounterModel(m) = v {
                counter += 1;
                if !query.refuted_by(m) {
                    problems.push(format!("#{k} {}: model does not replay", query.name));
                }
            }
        }
        match (&a, &c) {
            (BackendVerdict::Valid, BackendVerdict::Valid)
            | (BackendVerdict::CounterModel(_), BackendVerdict::CounterModel(_)) => agree += 1,
            _ => problems.push(format!("#{k} {name} {}: {a:?} vs {c:?}", query.name)),
        }
    }
    line(
        problems.is_empty(),
        format!("{agree}/200 agree, {counter} counter models replayed; problems: {problems:?}"),
    )
}

fn quantifier_free(s: &Settings) -> Line {
    let l = loaded("sum_bidi");
    let q = bench::published_squeezer(&l.program, "sum_bidi");
    let dir = tempfile::tempdir().unwrap();
    let files = cmd_emit_vc(&l, &q, s, dir.path()).unwrap();
    let binders: Vec<_> = files
        .iter()
        .filter(|f| {
            let text = std::fs::read_to_string(f).unwrap();
            text.contains("(forall") || text.contains("(exists")
        })
        .map(|f| f.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    line(
        !files.is_empty() && binders.is_empty(),
        format!("{} files, with binders: {binders:?}", files.len()),
    )
}

/// Criterion numbers given on the command line select a subset.
fn main() -> ExitCode {
    let only: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let s = settings();
    let mut lines = vec![];
    let mut run = |id: u8, name: &str, f: &mut dyn FnMut() -> Line| {
        if !only.is_empty() && !only.contains(&id) {
            return;
        }
        let t = Instant::now();
        let l = f();
        let status = if l.pass { "PASS" } else { "FAIL" };
        println!("criterion {id} {name}: {status} ({:.1}s) {}", t.elapsed().as_secs_f64(), l.detail);
        lines.push(l.pass);
    };
    run(1, "golden trace", &mut golden_trace);
    run(2, "published squeezers verify", &mut || published_verify(&s));
    let mut reports = None;
    run(3, "synthesis end to end", &mut || {
        let (l, r) = synthesis(&s);
        reports = Some(r);
        l
    });
    run(4, "bound sensitivity", &mut || bound_sensitivity(&s));
    run(5, "soundness cross-check", &mut || {
        let reports = reports.take().unwrap_or_else(|| cmd_bench(&[], &s).unwrap());
        soundness(&s, &reports)
    });
    run(6, "backend agreement", &mut backend_agreement);
    run(7, "quantifier-free sum_bidi", &mut || quantifier_free(&s));
    if lines.iter().all(|&p| p) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
