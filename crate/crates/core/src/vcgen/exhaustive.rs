//! Exhaustive enumeration of all assignments over a finite domain.

use std::collections::BTreeMap;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use super::smt::elem_values;
use super::{BackendError, BackendVerdict, Limits};
use crate::logic::{Model, Query, Role, Sort, Value};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Domain {
    pub max_len: usize,
    /// Values for array elements and data variables. Char-sorted
    /// positions use the subset inside `[0, 255]`.
    pub values: Vec<i64>,
    /// Index variables range over `0..=index_max`.
    pub index_max: i64,
    /// Give up with `Unknown` above this many assignments.
    pub max_assignments: u64,
}

impl Domain {
    pub fn new(max_len: usize, values: Vec<i64>) -> Self {
        Domain {
            max_len,
            values,
            index_max: max_len as i64 + 1,
            max_assignments: 50_000_000,
        }
    }

    /// The matching limits for a solver run over the same space.
    pub fn limits(&self) -> Limits {
        Limits {
            len_bound: Some(self.max_len),
            values: Some(self.values.clone()),
            index_max: Some(self.index_max),
        }
    }
}

/// One free variable: either an array of some group, or a scalar with its
/// candidate values.
enum Slot {
    Array { group: usize, values: Vec<i64> },
    Scalar(Vec<Value>),
}

/// Searches for an assignment refuting `q`, with array lengths at most
/// `min(domain.max_len, len_bound)`.
pub fn check(q: &Query, domain: &Domain, len_bound: Option<usize>) -> Result<BackendVerdict, BackendError> {
    let max_len = len_bound.map_or(domain.max_len, |l| l.min(domain.max_len));
    let compiled = q.compile().map_err(|e| BackendError::Solver(e.to_string()))?;
    let by_name: BTreeMap<&str, usize> = compiled.free_names().iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let mut slots = vec![];
    let mut groups: Vec<usize> = vec![];
    for v in &q.free {
        let slot = match (&v.role, v.sort) {
            (Role::Array { group, .. }, _) => {
                if !groups.contains(group) {
                    groups.push(*group);
                }
                Slot::Array {
                    group: *group,
                    values: elem_values(&domain.values, &v.role),
                }
            }
            (_, Sort::Bool) => Slot::Scalar(vec![Value::Bool(false), Value::Bool(true)]),
            (Role::Index, _) => Slot::Scalar((0..=domain.index_max).map(Value::Int).collect()),
            (role, _) => Slot::Scalar(elem_values(&domain.values, role).into_iter().map(Value::Int).collect()),
        };
        slots.push((by_name[v.name.as_str()], slot));
    }

    // Count the space before enumerating it.
    let mut total: f64 = 0.0;
    let n_groups = groups.len();
    let mut lens = vec![0usize; n_groups];
    loop {
        let mut size = 1.0f64;
        for (_, s) in &slots {
            size *= match s {
                Slot::Array { group, values } => {
                    let l = lens[groups.iter().position(|g| g == group).unwrap()];
                    (values.len() as f64).powi(l as i32)
                }
                Slot::Scalar(vals) => vals.len() as f64,
            };
        }
        total += size;
        if !next_lens(&mut lens, max_len) {
            break;
        }
    }
    if total > domain.max_assignments as f64 {
        return Ok(BackendVerdict::Unknown(format!("domain too large ({total:.0} assignments)")));
    }

    let mut lens = vec![0usize; n_groups];
    let mut free = vec![Value::Int(0); slots.len()];
    loop {
        // Digits: every array element, then every scalar.
        let mut radices = Vec::new();
        for (_, s) in &slots {
            match s {
                Slot::Array { group, values } => {
                    let l = lens[groups.iter().position(|g| g == group).unwrap()];
                    radices.extend(std::iter::repeat(values.len()).take(l));
                }
                Slot::Scalar(vals) => radices.push(vals.len()),
            }
        }
        let mut digits = vec![0usize; radices.len()];
        loop {
            let mut d = 0;
            for (idx, s) in &slots {
                match s {
                    Slot::Array { group, values } => {
                        let l = lens[groups.iter().position(|g| g == group).unwrap()];
                        let items: Vec<i64> = digits[d..d + l].iter().map(|&k| values[k]).collect();
                        d += l;
                        free[*idx] = Value::Seq(Rc::new(items));
                    }
                    Slot::Scalar(vals) => {
                        free[*idx] = vals[digits[d]].clone();
                        d += 1;
                    }
                }
            }
            let (h, g) = compiled.eval(&free);
            if h && !g {
                let model: Model = compiled.free_names().iter().cloned().zip(free.iter().cloned()).collect();
                return Ok(BackendVerdict::CounterModel(model));
            }
            if !odometer(&mut digits, &radices) {
                break;
            }
        }
        if !next_lens(&mut lens, max_len) {
            break;
        }
    }
    Ok(BackendVerdict::Valid)
}

fn next_lens(lens: &mut [usize], max: usize) -> bool {
    odometer(lens, &vec![max + 1; lens.len()])
}

/// Advances a mixed-radix counter; false after the last value.
fn odometer(digits: &mut [usize], radices: &[usize]) -> bool {
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

    #[test]
    fn odometer_covers_product() {
        let radices = [2, 3, 1];
        let mut d = vec![0; 3];
        let mut n = 1;
        while odometer(&mut d, &radices) {
            n += 1;
        }
        assert_eq!(n, 6);
        assert_eq!(d, vec![0, 0, 0]);
    }
}
