//! The embedded benchmark suite: programs, published squeezers, predicate
//! pools and per-benchmark configuration.

use crate::bank::{BankConfig, SimBounds};
use crate::ir::{parse_program, Program};
use crate::sqz::{parse_squeezer, Squeezer};
use crate::synth::{GenConfig, PoolSpec, PredicatePool};

pub const NAMES: [&str; 7] = ["strnchr", "strncmp", "max_ind", "min_ind", "sum_bidi", "is_sorted", "long_pref"];

pub fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "sum_bidi" => include_str!("sum_bidi.prog"),
        "strnchr" => include_str!("strnchr.prog"),
        "strncmp" => include_str!("strncmp.prog"),
        "max_ind" => include_str!("max_ind.prog"),
        "min_ind" => include_str!("min_ind.prog"),
        "is_sorted" => include_str!("is_sorted.prog"),
        "long_pref" => include_str!("long_pref.prog"),
        _ => return None,
    })
}

/// Parses an embedded benchmark program.
///
/// # Panics
/// If `name` is not one of [`NAMES`].
pub fn program(name: &str) -> Program {
    let src = source(name).unwrap_or_else(|| panic!("unknown benchmark `{name}`"));
    parse_program(src).unwrap_or_else(|e| panic!("embedded benchmark `{name}`: {e}"))
}

/// Squeezers reported for each benchmark (several for strncmp).
pub fn published_texts(name: &str) -> &'static [&'static str] {
    match name {
        "sum_bidi" => &["if (i > 0) remove(a,0); l = l - a[0]; r = r - a[n-i] else remove(a,0)"],
        "strnchr" => &["if (s[0] == c || s[0] == 0) remove(s,1) else remove(s,0)"],
        "strncmp" => &[
            "if (s1[0] == s2[0] && s1[0] != 0) remove(s1,0); remove(s2,0) else remove(s1,1); remove(s2,1)",
            "if (s1[0] == s2[0] && s2[0] != 0) remove(s1,0); remove(s2,0) else remove(s1,1); remove(s2,1)",
            "if ((s1[0] != s2[0]) || (s1[0] == 0 && s2[0] == 0)) remove(s1,1); remove(s2,1) else remove(s1,0); remove(s2,0)",
        ],
        "max_ind" => &["if (s[n-2] <= s[n-1]) remove(s,n-2) else remove(s,n-1)"],
        "min_ind" => &["if (s[n-2] >= s[n-1]) remove(s,n-2) else remove(s,n-1)"],
        "is_sorted" => &["if (s[n-3] <= s[n-2] <= s[n-1]) remove(s,n-1) else remove(s,n-4)"],
        "long_pref" => &["if ((s[0] <= s[1] <= s[2]) || (s[0] > s[1] > s[2])) remove(s,0) else remove(s,n-1)"],
        _ => &[],
    }
}

/// The first published squeezer of `name`, with the program's base bound.
pub fn published_squeezer(p: &Program, name: &str) -> Squeezer {
    let text = published_texts(name)[0];
    parse_squeezer(text, p, p.base_bound.unwrap_or(0)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Synthesis settings of one benchmark.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchConfig {
    pub name: &'static str,
    pub sim: SimBounds,
    pub depth_bound: usize,
    pub atoms: &'static [&'static str],
    pub index_consts: &'static [i64],
    pub allow_strict: bool,
    pub positions: &'static [&'static str],
    pub assign_elems: &'static [&'static str],
    /// Element pool of the bank and of the exhaustive backend.
    pub elem_pool: &'static [i64],
    /// A bug to seed: the first occurrence of `.0` in the program text is
    /// replaced by `.1`.
    pub mutation: (&'static str, &'static str),
    /// Size of the published candidate space.
    pub published_candidates: usize,
}

const CHARS: &[i64] = &[97, 98, 0];
const INTS: &[i64] = &[-4, -2, 9, 100, 200];

pub fn config(name: &str) -> Option<BenchConfig> {
    let sim = SimBounds::default();
    Some(match name {
        "strnchr" => BenchConfig {
            name: "strnchr",
            sim,
            depth_bound: 2,
            atoms: &["s[0] == c", "s[0] == 0", "s[1] == 0"],
            index_consts: &[0, 1, 2],
            allow_strict: false,
            positions: &["0", "1", "2"],
            assign_elems: &[],
            elem_pool: CHARS,
            mutation: ("return i;", "return i + 1;"),
            published_candidates: 80,
        },
        "strncmp" => BenchConfig {
            name: "strncmp",
            sim,
            depth_bound: 3,
            atoms: &["s1[0] == s2[0]", "s1[0] != 0", "s2[0] != 0", "s1[0] != s2[0]", "s1[0] == 0"],
            index_consts: &[0, 1],
            allow_strict: false,
            positions: &["0", "1"],
            assign_elems: &[],
            elem_pool: CHARS,
            mutation: ("return 1;", "return 0;"),
            published_candidates: 980,
        },
        "max_ind" => BenchConfig {
            name: "max_ind",
            sim,
            depth_bound: 3,
            atoms: &["s[n-2] <= s[n-1]", "s[2] <= s[n-1]", "s[0] <= s[1]", "s[1] <= s[2]", "s[0] <= s[n-1]"],
            index_consts: &[0, 1, 2, 3],
            allow_strict: false,
            positions: &["0", "1", "2", "n-3", "n-2", "n-1"],
            assign_elems: &[],
            elem_pool: INTS,
            mutation: ("if (s[i] > s[m]) {", "if (s[i] > s[m] && i + 1 < n) {"),
            published_candidates: 8000,
        },
        "min_ind" => BenchConfig {
            name: "min_ind",
            sim,
            depth_bound: 3,
            atoms: &["s[n-2] >= s[n-1]", "s[2] >= s[n-1]", "s[0] >= s[1]", "s[1] >= s[2]", "s[0] >= s[n-1]"],
            index_consts: &[0, 1, 2, 3],
            allow_strict: false,
            positions: &["0", "1", "2", "n-3", "n-2", "n-1"],
            assign_elems: &[],
            elem_pool: INTS,
            mutation: ("m := i;", "m := 0;"),
            published_candidates: 8000,
        },
        "sum_bidi" => BenchConfig {
            name: "sum_bidi",
            sim,
            depth_bound: 1,
            atoms: &["i > 0", "i == 0", "i >= 2", "a[0] <= a[n-1]", "a[0] == a[1]"],
            index_consts: &[0, 1],
            allow_strict: true,
            positions: &["0", "n-1"],
            assign_elems: &["0", "n-1", "n-i"],
            elem_pool: INTS,
            mutation: ("r += a[n - i - 1];", "r += a[n - i];"),
            published_candidates: 6_328_125,
        },
        "is_sorted" => BenchConfig {
            name: "is_sorted",
            sim: SimBounds { m_max: 3, ..sim },
            depth_bound: 2,
            atoms: &["s[0] <= s[1]", "s[1] <= s[2]", "s[n-4] <= s[n-3]", "s[n-3] <= s[n-2]", "s[n-2] <= s[n-1]"],
            index_consts: &[0, 1, 2, 3, 4],
            allow_strict: false,
            positions: &["0", "1", "n-4", "n-3", "n-2", "n-1"],
            assign_elems: &[],
            elem_pool: INTS,
            mutation: ("if (s[i] < s[i - 1]) {", "if (s[i] < s[i - 1] && i > 2) {"),
            published_candidates: 900,
        },
        "long_pref" => BenchConfig {
            name: "long_pref",
            sim,
            depth_bound: 3,
            atoms: &["s[0] <= s[1]", "s[1] <= s[2]", "s[0] > s[1]", "s[1] > s[2]", "s[n-2] <= s[n-1]"],
            index_consts: &[0, 1, 2, 3],
            allow_strict: true,
            positions: &["0", "1", "2", "n-2", "n-1"],
            assign_elems: &[],
            elem_pool: INTS,
            mutation: ("s[i] < s[i - 1]", "s[i] <= s[i - 1]"),
            published_candidates: 6480,
        },
        _ => return None,
    })
}

impl BenchConfig {
    pub fn program(&self) -> Program {
        program(self.name)
    }

    /// The program with the seeded bug.
    pub fn mutant(&self) -> Program {
        let src = source(self.name).expect("known benchmark");
        assert!(src.contains(self.mutation.0), "{}: mutation site not found", self.name);
        let src = src.replacen(self.mutation.0, self.mutation.1, 1);
        parse_program(&src).unwrap_or_else(|e| panic!("{} mutant: {e}", self.name))
    }

    pub fn pool_spec(&self) -> PoolSpec {
        let owned = |v: &[&str]| v.iter().map(|t| t.to_string()).collect();
        PoolSpec {
            atoms: owned(self.atoms),
            index_consts: self.index_consts.to_vec(),
            allow_strict: self.allow_strict,
            positions: owned(self.positions),
            assign_elems: owned(self.assign_elems),
        }
    }

    pub fn pool(&self, p: &Program) -> PredicatePool {
        self.pool_spec().build(p).unwrap_or_else(|e| panic!("{}: {e}", self.name))
    }

    pub fn gen(&self) -> GenConfig {
        GenConfig {
            depth_bound: self.depth_bound,
            ..GenConfig::default()
        }
    }

    pub fn bank(&self) -> BankConfig {
        BankConfig {
            elem_pool: self.elem_pool.to_vec(),
            ..BankConfig::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sqz::well_formed;

    #[test]
    fn all_benchmarks_parse_with_their_squeezers() {
        for name in NAMES {
            let p = program(name);
            assert_eq!(p.name, name);
            for text in published_texts(name) {
                let q = parse_squeezer(text, &p, p.base_bound.unwrap()).unwrap();
                well_formed(&q, &p).unwrap_or_else(|e| panic!("{name}: {e}"));
            }
        }
    }
}
