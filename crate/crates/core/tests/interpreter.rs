use proptest::prelude::*;

use squeeze_core::bench;
use squeeze_core::ir::{Loc, Program, State};

fn run(p: &Program, st: &State) -> State {
    let mut cur = st.clone();
    for _ in 0..64 {
        if cur.loc == Loc::Done {
            return cur;
        }
        cur = p.step(&cur).unwrap();
    }
    panic!("no termination from {}", p.show_state(st));
}

fn scalar(p: &Program, st: &State, name: &str) -> i64 {
    st.scalars[p.var_id(name).unwrap().0]
}

fn chars() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(prop::sample::select(vec![0i64, 97, 98]), 0..7)
}

proptest! {
    #[test]
    fn sum_bidi_sums_both_ways(a in prop::collection::vec(-50i64..50, 0..9)) {
        let p = bench::program("sum_bidi");
        let end = run(&p, &p.state(Loc::Loop, &[("a", a.clone())], &[]));
        let total: i64 = a.iter().sum();
        prop_assert_eq!(scalar(&p, &end, "l"), total);
        prop_assert_eq!(scalar(&p, &end, "r"), total);
        prop_assert_eq!(scalar(&p, &end, "i"), a.len() as i64);
        prop_assert!(!p.is_bad(&end).unwrap());
    }

    #[test]
    fn max_ind_finds_first_maximum(s in prop::collection::vec(-9i64..9, 1..9)) {
        let p = bench::program("max_ind");
        let end = run(&p, &p.state(Loc::Loop, &[("s", s.clone())], &[]));
        let mut best = 0;
        for j in 1..s.len() {
            if s[j] > s[best] {
                best = j;
            }
        }
        prop_assert_eq!(scalar(&p, &end, "m"), best as i64);
    }

    #[test]
    fn strncmp_matches_c(s1 in chars(), s2 in chars()) {
        let n = s1.len().min(s2.len());
        let (s1, s2) = (s1[..n].to_vec(), s2[..n].to_vec());
        let mut want = 0;
        for j in 0..n {
            if s1[j] != s2[j] {
                want = 1;
                break;
            }
            if s1[j] == 0 {
                break;
            }
        }
        let p = bench::program("strncmp");
        let end = run(&p, &p.state(Loc::Loop, &[("s1", s1), ("s2", s2)], &[]));
        prop_assert_eq!(scalar(&p, &end, "ret"), want);
    }

    #[test]
    fn strnchr_finds_char_or_terminator(s in chars(), c in prop::sample::select(vec![97i64, 98])) {
        let want = s.iter().position(|&x| x == c || x == 0).unwrap_or(s.len());
        let p = bench::program("strnchr");
        let end = run(&p, &p.state(Loc::Loop, &[("s", s)], &[("c", c)]));
        prop_assert_eq!(scalar(&p, &end, "ret"), want as i64);
        prop_assert!(!p.is_bad(&end).unwrap());
    }

    #[test]
    fn long_pref_measures_monotone_prefix(s in prop::collection::vec(-3i64..3, 0..8)) {
        let up = (1..s.len()).take_while(|&j| s[j - 1] <= s[j]).count();
        let down = (1..s.len()).take_while(|&j| s[j - 1] > s[j]).count();
        let want = if s.is_empty() { 0 } else { 1 + up.max(down) };
        let p = bench::program("long_pref");
        let end = run(&p, &p.state(Loc::Loop, &[("s", s)], &[]));
        prop_assert_eq!(scalar(&p, &end, "ret"), want as i64);
    }

    #[test]
    fn is_sorted_agrees_with_windows(s in prop::collection::vec(-3i64..3, 0..8)) {
        let want = s.windows(2).all(|w| w[0] <= w[1]) as i64;
        let p = bench::program("is_sorted");
        let end = run(&p, &p.state(Loc::Loop, &[("s", s)], &[]));
        prop_assert_eq!(scalar(&p, &end, "ret"), want);
    }

    #[test]
    fn steps_keep_arrays_and_rank(a in prop::collection::vec(-5i64..5, 0..7), k in 0usize..10) {
        let p = bench::program("sum_bidi");
        let st = p.state(Loc::Loop, &[("a", a.clone())], &[]);
        let later = p.step_n(&st, k).unwrap();
        prop_assert_eq!(&later.arrays[0], &a);
        prop_assert_eq!(later.rank(), st.rank());
    }
}

#[test]
fn bad_states_stutter() {
    let b = bench::config("strnchr").unwrap();
    let p = b.mutant();
    let st = p.state(Loc::Loop, &[("s", vec![0])], &[("c", 97)]);
    let end = run(&p, &st);
    assert!(p.is_bad(&end).unwrap());
    assert_eq!(p.step(&end).unwrap(), end);
}

#[test]
fn done_is_absorbing() {
    let p = bench::program("max_ind");
    let end = run(&p, &p.state(Loc::Loop, &[("s", vec![3, 1, 4])], &[]));
    assert_eq!(p.step_n(&end, 5).unwrap(), end);
}
