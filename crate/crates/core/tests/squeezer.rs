use proptest::prelude::*;

use squeeze_core::bank::{check_state, SimBounds};
use squeeze_core::bench;
use squeeze_core::ir::{Loc, Program, State};
use squeeze_core::sqz::{apply, parse_squeezer, render_squeezer, Squeezer};

fn published(name: &str) -> (Program, Squeezer, SimBounds) {
    let b = bench::config(name).unwrap();
    let p = b.program();
    let q = bench::published_squeezer(&p, name);
    (p, q, b.sim)
}

/// A reachable state: `steps` transitions from the initial state over `arrays`.
fn reachable(p: &Program, arrays: Vec<Vec<i64>>, extra: &[(&str, i64)], steps: usize) -> State {
    let named: Vec<(&str, Vec<i64>)> = p.arrays.iter().map(|a| a.name.as_str()).zip(arrays).collect();
    let st = p.state(Loc::Loop, &named, extra);
    p.step_n(&st, steps).unwrap()
}

fn ints(lo: usize, hi: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(prop::sample::select(vec![-4i64, -2, 9, 100, 200]), lo..hi)
}

fn chars(len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(prop::sample::select(vec![97i64, 98, 0]), len)
}

#[test]
fn published_texts_round_trip() {
    for name in bench::NAMES {
        let p = bench::program(name);
        for text in bench::published_texts(name) {
            let q = parse_squeezer(text, &p, p.base_bound.unwrap()).unwrap();
            let again = parse_squeezer(&render_squeezer(&q, &p), &p, q.base_bound).unwrap();
            assert_eq!(again, q, "{name}: {text}");
        }
    }
}

#[test]
fn sum_bidi_squeezer_drops_first_element() {
    let (p, q, _) = published("sum_bidi");
    let st = p.state(Loc::Loop, &[("a", vec![7, 2, 9, 1, 4])], &[("i", 3), ("l", 18), ("r", 14)]);
    let sq = apply(&q, &p, &st).unwrap();
    assert_eq!(sq, p.state(Loc::Loop, &[("a", vec![2, 9, 1, 4])], &[("i", 2), ("l", 11), ("r", 5)]));
}

proptest! {
    #[test]
    fn rank_drops_by_group_size(a in ints(3, 9), steps in 0usize..9) {
        for name in ["max_ind", "min_ind", "sum_bidi", "long_pref"] {
            let (p, q, _) = published(name);
            let st = reachable(&p, vec![a.clone()], &[], steps);
            if st.rank() <= q.base_bound {
                continue;
            }
            let sq = apply(&q, &p, &st).unwrap();
            prop_assert_eq!(sq.rank() + 1, st.rank());
            prop_assert!(p.well_shaped(&sq));
        }
    }

    #[test]
    fn published_conditions_hold_on_reachable_states(a in ints(0, 7), steps in 0usize..8) {
        for name in ["max_ind", "min_ind", "sum_bidi", "is_sorted", "long_pref"] {
            let (p, q, sim) = published(name);
            let st = reachable(&p, vec![a.clone()], &[], steps);
            if st.rank() > q.base_bound {
                prop_assert!(check_state(&p, &q, &st, sim).is_ok(), "{} at {}", name, p.show_state(&st));
            }
        }
    }

    #[test]
    fn string_squeezers_hold_on_reachable_states(
        (s1, s2) in (0usize..6).prop_flat_map(|n| (chars(n), chars(n))),
        c in prop::sample::select(vec![97i64, 98, 0]),
        steps in 0usize..7,
    ) {
        let (p, q, sim) = published("strnchr");
        let st = reachable(&p, vec![s1.clone()], &[("c", c)], steps);
        if st.rank() > q.base_bound {
            prop_assert!(check_state(&p, &q, &st, sim).is_ok(), "strnchr at {}", p.show_state(&st));
        }
        let p = bench::program("strncmp");
        for text in bench::published_texts("strncmp") {
            let q = parse_squeezer(text, &p, p.base_bound.unwrap()).unwrap();
            let st = reachable(&p, vec![s1.clone(), s2.clone()], &[], steps);
            if st.rank() > q.base_bound {
                prop_assert!(check_state(&p, &q, &st, sim).is_ok(), "{} at {}", text, p.show_state(&st));
            }
        }
    }

    #[test]
    fn initial_states_stay_initial(a in ints(3, 9)) {
        for name in ["max_ind", "sum_bidi", "is_sorted", "long_pref"] {
            let (p, q, _) = published(name);
            let st = reachable(&p, vec![a.clone()], &[], 0);
            prop_assert!(p.is_initial(&apply(&q, &p, &st).unwrap()));
        }
    }
}
