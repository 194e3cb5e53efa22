use proptest::prelude::*;

use squeeze_core::basecase::{check_base, check_trace, for_each_initial, BaseConfig, BaseVerdict};
use squeeze_core::bench;
use squeeze_core::ir::Loc;
use squeeze_core::vcgen::{Backend, Domain};

fn small(values: &[i64]) -> Backend {
    Backend::Exhaustive(Domain::new(4, values[..3].to_vec()))
}

#[test]
fn benchmarks_are_safe_up_to_their_base_bound() {
    for name in bench::NAMES {
        let b = bench::config(name).unwrap();
        let p = b.program();
        let v = check_base(&p, &BaseConfig::new(p.base_bound.unwrap()), &mut small(b.elem_pool)).unwrap();
        assert_eq!(v, BaseVerdict::Safe, "{name}");
    }
}

#[test]
fn mutants_fail_the_base_case() {
    for name in bench::NAMES {
        let b = bench::config(name).unwrap();
        let p = b.mutant();
        match check_base(&p, &BaseConfig::new(p.base_bound.unwrap()), &mut small(b.elem_pool)).unwrap() {
            BaseVerdict::Unsafe { initial, .. } => {
                assert!(p.is_initial(&initial));
                assert!(check_trace(&p, &initial, 16).unwrap().is_some());
            }
            v => panic!("{name} mutant: {v:?}"),
        }
    }
}

#[test]
fn out_of_bounds_reads_are_faults() {
    let b = bench::config("sum_bidi").unwrap();
    let p = b.mutant();
    let st = p.state(Loc::Loop, &[("a", vec![1, 2])], &[]);
    assert_eq!(check_trace(&p, &st, 8).unwrap(), Some(st));
}

#[test]
fn unroll_defaults_past_the_bound() {
    assert_eq!(BaseConfig::new(3).unroll(), 5);
    let c = BaseConfig {
        base_bound: 3,
        unroll: Some(1),
    };
    assert_eq!(c.unroll(), 4);
}

proptest! {
    #[test]
    fn initial_states_are_counted_by_rank(bound in 0usize..4, k in 1usize..4) {
        let p = bench::program("max_ind");
        let values: Vec<i64> = (0..k as i64).collect();
        let mut seen = 0usize;
        for_each_initial(&p, bound, &values, 0, &mut |st| {
            assert!(p.is_initial(st) && st.rank() <= bound);
            seen += 1;
            Ok(true)
        })
        .unwrap();
        let want: usize = (0..=bound).map(|len| k.pow(len as u32)).sum();
        prop_assert_eq!(seen, want);
    }
}
