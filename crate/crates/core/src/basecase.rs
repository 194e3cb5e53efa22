//! The base case: safety of the system restricted to initial states of
//! rank at most `B`, checked by unrolling the loop.

use serde::{Deserialize, Serialize};

use crate::encode::Builder;
use crate::ir::{CmpOp, Loc, Program, State};
use crate::logic::{Family, QueryMeta, Term};
use crate::vcgen::{root_state, Backend, BackendError, BackendVerdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseConfig {
    pub base_bound: usize,
    /// Steps to unroll; `None` means `B + 2`.
    pub unroll: Option<usize>,
}

impl BaseConfig {
    pub fn new(base_bound: usize) -> Self {
        BaseConfig {
            base_bound,
            unroll: None,
        }
    }

    pub fn unroll(&self) -> usize {
        self.unroll.unwrap_or(self.base_bound + 2).max(self.base_bound + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaseVerdict {
    Safe,
    /// An initial state whose trace reaches a bad state.
    Unsafe { initial: State, bad: State },
    Unknown(String),
}

impl BaseVerdict {
    pub fn is_safe(&self) -> bool {
        matches!(self, BaseVerdict::Safe)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BaseError {
    #[error("Done not reached within {steps} steps from {state}")]
    NotTerminated { state: String, steps: usize },
    #[error(transparent)]
    Backend(#[from] BackendError),
}

/// Runs `st` for `unroll` steps. Returns the first bad state, if any. A
/// state whose evaluation goes out of bounds counts as bad.
pub fn check_trace(p: &Program, st: &State, unroll: usize) -> Result<Option<State>, BaseError> {
    let mut cur = st.clone();
    for _ in 0..=unroll {
        if p.is_bad(&cur).unwrap_or(true) {
            return Ok(Some(cur));
        }
        if cur.loc == Loc::Done {
            return Ok(None);
        }
        cur = match p.step(&cur) {
            Ok(next) => next,
            Err(_) => return Ok(Some(cur)),
        };
    }
    Err(BaseError::NotTerminated {
        state: p.show_state(st),
        steps: unroll,
    })
}

/// Checks every trace from an initial state of rank at most `B`.
pub fn check_base(p: &Program, cfg: &BaseConfig, backend: &mut Backend) -> Result<BaseVerdict, BaseError> {
    let unroll = cfg.unroll();
    match backend {
        Backend::Exhaustive(domain) => {
            let mut found = None;
            for_each_initial(p, cfg.base_bound, &domain.values, domain.index_max, &mut |st| {
                if let Some(bad) = check_trace(p, st, unroll)? {
                    found = Some(BaseVerdict::Unsafe {
                        initial: st.clone(),
                        bad,
                    });
                    return Ok(false);
                }
                Ok(true)
            })?;
            Ok(found.unwrap_or(BaseVerdict::Safe))
        }
        Backend::Smt(_) => {
            let query = base_query(p, cfg.base_bound, unroll);
            match backend.check(&query, Some(cfg.base_bound))? {
                BackendVerdict::Valid => Ok(BaseVerdict::Safe),
                BackendVerdict::CounterModel(m) => {
                    let Some(st) = root_state(p, &m, "s") else {
                        return Ok(BaseVerdict::Unknown("counter model without a root state".into()));
                    };
                    match check_trace(p, &st, unroll)? {
                        Some(bad) => Ok(BaseVerdict::Unsafe { initial: st, bad }),
                        None => Ok(BaseVerdict::Unknown(format!(
                            "counter model {} is safe concretely",
                            p.show_state(&st)
                        ))),
                    }
                }
                BackendVerdict::Unknown(why) => Ok(BaseVerdict::Unknown(why)),
            }
        }
    }
}

/// `Init(σ₀) ∧ rank(σ₀) ≤ B ⇒ ⋀ₖ φ(σₖ) ∧ done(σ_unroll)`.
pub fn base_query(p: &Program, base_bound: usize, unroll: usize) -> crate::logic::Query {
    let mut b = Builder::new(p);
    let (root, facts) = b.root("s", true);
    let init = b.initial(&root);
    let small = Term::cmp(CmpOp::Le, b.rank(&root), Term::Int(base_bound as i64));
    let mut goals = vec![b.good(&root)];
    let mut cur = root;
    for _ in 0..unroll {
        cur = b.step_good(&cur);
        goals.push(b.good(&cur));
    }
    goals.push(cur.done.clone());
    b.finish(
        "base".into(),
        Term::and([facts, init, small]),
        Term::and(goals),
        QueryMeta {
            family: Family::BaseSafety,
            branch: None,
            origin: None,
        },
    )
}

/// Calls `f` on every initial state of rank at most `max_rank` over the
/// given element values. Uninitialized index parameters range over
/// `0..=index_max`. Stops when `f` returns false.
pub fn for_each_initial(
    p: &Program,
    max_rank: usize,
    values: &[i64],
    index_max: i64,
    f: &mut dyn FnMut(&State) -> Result<bool, BaseError>,
) -> Result<(), BaseError> {
    let groups = p.num_groups();
    let sizes: Vec<usize> = (0..groups).map(|g| p.group_arrays(g).len()).collect();
    let elems: Vec<Vec<i64>> = p
        .arrays
        .iter()
        .map(|a| crate::vcgen::elem_values_for(values, a.sort))
        .collect();
    let params: Vec<Vec<i64>> = p
        .scalars
        .iter()
        .zip(&p.init)
        .map(|(s, init)| match (init, s.class) {
            (Some(c), _) => vec![*c],
            (None, crate::ir::VarClass::Index) => (0..=index_max).collect(),
            (None, crate::ir::VarClass::Data(sort)) => crate::vcgen::elem_values_for(values, sort),
        })
        .collect();

    let mut lens = vec![0usize; groups];
    loop {
        let rank: usize = lens.iter().zip(&sizes).map(|(l, s)| l * s).sum();
        if rank <= max_rank {
            let arr_lens: Vec<usize> = p.arrays.iter().map(|a| lens[a.group]).collect();
            let mut radices: Vec<usize> = Vec::new();
            for (i, &l) in arr_lens.iter().enumerate() {
                radices.extend(std::iter::repeat(elems[i].len()).take(l));
            }
            radices.extend(params.iter().map(Vec::len));
            if radices.iter().all(|&r| r > 0) {
                let mut digits = vec![0usize; radices.len()];
                loop {
                    let mut d = 0;
                    let mut arrays = Vec::with_capacity(arr_lens.len());
                    for (i, &l) in arr_lens.iter().enumerate() {
                        arrays.push(digits[d..d + l].iter().map(|&k| elems[i][k]).collect());
                        d += l;
                    }
                    let scalars = params.iter().zip(&digits[d..]).map(|(vals, &k)| vals[k]).collect();
                    let st = State {
                        loc: Loc::Loop,
                        arrays,
                        scalars,
                    };
                    if p.is_initial(&st) && !f(&st)? {
                        return Ok(());
                    }
                    if !advance(&mut digits, &radices) {
                        break;
                    }
                }
            }
        }
        if !advance(&mut lens, &vec![max_rank + 1; groups]) {
            return Ok(());
        }
    }
}

fn advance(digits: &mut [usize], radices: &[usize]) -> bool {
    for (d, &r) in digits.iter_mut().zip(radices) {
        *d += 1;
        if *d < r {
            return true;
        }
        *d = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench;

    #[test]
    fn enumerates_initial_states_by_rank() {
        let p = bench::program("sum_bidi");
        let mut n = 0;
        for_each_initial(&p, 2, &[1, 2, 3], 3, &mut |st| {
            assert!(st.rank() <= 2);
            n += 1;
            Ok(true)
        })
        .unwrap();
        assert_eq!(n, 1 + 3 + 9);
    }
}
