use proptest::prelude::*;

use squeeze_core::bank::{generate_bank, phase1_check, Reason, Verdict};
use squeeze_core::bench;
use squeeze_core::sqz::{apply, parse_squeezer};
use squeeze_core::synth::enumerate;
use squeeze_core::vcgen::{all_queries, check_bounded, emit_smtlib, replay, Backend, BackendVerdict, Domain};

fn exhaustive(len: usize, values: &[i64]) -> Backend {
    Backend::Exhaustive(Domain::new(len, values.to_vec()))
}

#[test]
fn published_squeezers_pass_the_bank() {
    for name in bench::NAMES {
        let b = bench::config(name).unwrap();
        let p = b.program();
        let bank = generate_bank(&p, &b.bank());
        assert!(!bank.is_empty());
        for text in bench::published_texts(name) {
            let q = parse_squeezer(text, &p, p.base_bound.unwrap()).unwrap();
            let v = phase1_check(&p, &q, &bank, b.sim);
            assert!(v.is_pass(), "{name}: {v:?}");
        }
    }
}

#[test]
fn published_squeezers_pass_small_exhaustive_domains() {
    for name in ["strnchr", "max_ind", "sum_bidi", "long_pref"] {
        let b = bench::config(name).unwrap();
        let p = b.program();
        let q = bench::published_squeezer(&p, name);
        let v = check_bounded(&p, &q, b.sim, &mut exhaustive(3, &b.elem_pool[..3]), 3).unwrap();
        assert!(v.is_pass(), "{name}: {v:?}");
    }
}

#[test]
fn swapped_branches_fail_with_a_concrete_witness() {
    let b = bench::config("strnchr").unwrap();
    let p = b.program();
    let q = parse_squeezer("if (s[0] == c || s[0] == 0) remove(s,0) else remove(s,1)", &p, 2).unwrap();
    let v = check_bounded(&p, &q, b.sim, &mut exhaustive(3, b.elem_pool), 3).unwrap();
    let Verdict::Fail { reason, witness, .. } = v else {
        panic!("swapped squeezer passed");
    };
    let w = witness.expect("witness");
    assert!(w.rank() > 2);
    match reason {
        Reason::FaultPreservation => assert!(p.is_bad(&w).unwrap() && !p.is_bad(&apply(&q, &p, &w).unwrap()).unwrap()),
        Reason::Simulation | Reason::InitialAnchor => {}
        r => panic!("unexpected reason {r:?}"),
    }
}

#[test]
fn emission_is_deterministic() {
    let p = bench::program("max_ind");
    let q = bench::published_squeezer(&p, "max_ind");
    let a: Vec<String> = all_queries(&p, &q, Default::default()).iter().map(emit_smtlib).collect();
    let b: Vec<String> = all_queries(&p, &q, Default::default()).iter().map(emit_smtlib).collect();
    assert_eq!(a, b);
    assert!(a.iter().any(|t| t.contains("(forall")));
}

#[test]
fn sum_bidi_emission_has_no_binders() {
    let p = bench::program("sum_bidi");
    let q = bench::published_squeezer(&p, "sum_bidi");
    for query in all_queries(&p, &q, Default::default()) {
        let text = emit_smtlib(&query);
        assert!(!text.contains("(forall") && !text.contains("(exists"), "{}", query.name);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exhaustive_counter_models_refute_their_query(k in 0usize..81, pick in any::<prop::sample::Index>()) {
        let b = bench::config("strnchr").unwrap();
        let p = b.program();
        let q = enumerate(&p, &b.pool(&p), &b.gen(), 2).nth(k).unwrap().squeezer;
        let queries = all_queries(&p, &q, b.sim);
        let query = pick.get(&queries);
        if let BackendVerdict::CounterModel(m) = exhaustive(3, b.elem_pool).check(query, None).unwrap() {
            prop_assert!(query.refuted_by(&m));
            if matches!(query.meta.family, squeeze_core::logic::Family::FaultPreservation) {
                prop_assert!(replay(&p, &q, b.sim, query, &m).is_ok());
            }
        }
    }
}
