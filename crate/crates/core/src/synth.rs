//! Enumerative synthesis of squeezers and the generate-and-test pipeline.
//!
//! Candidates come from a user-supplied pool: condition atoms, removal
//! positions and element indices for scalar updates. Conditions are the
//! atoms closed under `&&` and `||` up to a depth bound. Each candidate is
//! tested on the state bank first, then verified on bounded arrays, then
//! without a bound.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bank::{generate_bank, phase1_check, BankConfig, Reason, SimBounds};
use crate::ir::{ElemSort, Program, VarClass};
use crate::sqz::{
    parse_cond, parse_index, render_squeezer, well_formed, AssignS, Atom, Branch, CondS, IndexExprS, Operand, Squeezer,
};
use crate::vcgen::{check_with_stats, Backend, BackendError, Domain, SmtConfig};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicatePool {
    pub atoms: Vec<Atom>,
    /// Small constants admitted in indices.
    pub index_consts: Vec<i64>,
    pub allow_strict: bool,
    /// Removal positions.
    pub positions: Vec<IndexExprS>,
    /// Element indices for `v = v ± arr[idx]` updates; empty disables
    /// updates.
    pub assign_elems: Vec<IndexExprS>,
}

impl PredicatePool {
    pub fn is_empty(&self) -> bool {
        self.usable_atoms().next().is_none() || self.positions.is_empty()
    }

    fn admits(&self, e: IndexExprS) -> bool {
        match e {
            IndexExprS::Const(c) | IndexExprS::LenMinus(crate::sqz::Offset::Const(c)) => self.index_consts.contains(&c),
            _ => true,
        }
    }

    fn usable_atoms(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.iter().filter(|a| {
            (self.allow_strict || !a.op.is_strict())
                && [a.lhs, a.rhs].iter().all(|o| match o {
                    Operand::Elem(_, i) => self.admits(*i),
                    _ => true,
                })
        })
    }
}

/// A pool in squeezer syntax, as written in pool files.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PoolSpec {
    pub atoms: Vec<String>,
    pub index_consts: Vec<i64>,
    pub allow_strict: bool,
    pub positions: Vec<String>,
    pub assign_elems: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("pool entry `{text}`: {msg}")]
pub struct PoolError {
    pub text: String,
    pub msg: String,
}

impl PoolSpec {
    /// Parses the entries against `p`. Positions and element indices refer
    /// to the array group of the first atom that reads an element.
    pub fn build(&self, p: &Program) -> Result<PredicatePool, PoolError> {
        let err = |text: &str, msg: String| PoolError {
            text: text.to_string(),
            msg,
        };
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for t in &self.atoms {
            match parse_cond(t, p) {
                Ok(CondS::Atom(a)) => atoms.push(a),
                Ok(_) => return Err(err(t, "not an atom".into())),
                Err(e) => return Err(err(t, e.to_string())),
            }
        }
        let group = atoms
            .iter()
            .flat_map(|a| [a.lhs, a.rhs])
            .find_map(|o| match o {
                Operand::Elem(arr, _) => Some(p.array(arr).group),
                _ => None,
            })
            .unwrap_or(0);
        let index = |t: &String| parse_index(t, p, group).map_err(|e| err(t, e.to_string()));
        Ok(PredicatePool {
            atoms,
            index_consts: self.index_consts.clone(),
            allow_strict: self.allow_strict,
            positions: self.positions.iter().map(index).collect::<Result<_, _>>()?,
            assign_elems: self.assign_elems.iter().map(index).collect::<Result<_, _>>()?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    First,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    /// Maximal condition depth; an atom has depth 1.
    pub depth_bound: usize,
    /// Maximal number of scalar updates per branch.
    pub max_assigns: usize,
    pub mode: Mode,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            depth_bound: 3,
            max_assigns: 2,
            mode: Mode::First,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub ordinal: usize,
    pub squeezer: Squeezer,
}

fn size(c: &CondS) -> usize {
    match c {
        CondS::Atom(_) => 1,
        CondS::And(a, b) | CondS::Or(a, b) => size(a) + size(b),
    }
}

/// The pool atoms closed under `&&` and `||` up to `depth_bound`, ordered
/// by number of atoms. Each new level combines two conditions of the
/// previous level, the earlier one on the left, at least one of them at the
/// previous depth. Combinations sharing an atom are skipped: absorption
/// and idempotence make them equivalent to smaller conditions.
pub fn conditions(pool: &PredicatePool, depth_bound: usize) -> Vec<CondS> {
    let mut all: Vec<CondS> = pool.usable_atoms().map(|a| CondS::Atom(*a)).collect();
    for d in 2..=depth_bound {
        let prev = all.clone();
        for (i, x) in prev.iter().enumerate() {
            let xs = x.atoms();
            for y in &prev[i + 1..] {
                if x.depth().max(y.depth()) != d - 1 || y.atoms().iter().any(|a| xs.contains(a)) {
                    continue;
                }
                all.push(CondS::And(Box::new(x.clone()), Box::new(y.clone())));
                all.push(CondS::Or(Box::new(x.clone()), Box::new(y.clone())));
            }
        }
    }
    all.sort_by_key(size);
    all
}

/// Removal positions combined with every update list.
pub fn branches(p: &Program, pool: &PredicatePool, group: usize, max_assigns: usize) -> Vec<Branch> {
    let arrays: Vec<_> = p
        .group_arrays(group)
        .into_iter()
        .filter(|a| p.array(*a).sort == ElemSort::Int)
        .collect();
    let targets: Vec<_> = (0..p.scalars.len())
        .map(crate::ir::VarId)
        .filter(|v| p.scalar(*v).class == VarClass::Data(ElemSort::Int) && p.ret != Some(*v))
        .collect();
    let elems: Vec<IndexExprS> = pool.assign_elems.iter().copied().filter(|e| pool.admits(*e)).collect();
    let mut lists: Vec<Vec<AssignS>> = vec![vec![]];
    if !elems.is_empty() && !arrays.is_empty() {
        for &t in &targets {
            let mut options = vec![None];
            for &array in &arrays {
                for subtract in [false, true] {
                    for &index in &elems {
                        options.push(Some(AssignS {
                            target: t,
                            source: t,
                            subtract,
                            array,
                            index,
                        }));
                    }
                }
            }
            lists = lists
                .into_iter()
                .flat_map(|l| {
                    options.iter().filter_map(move |o| {
                        let mut l = l.clone();
                        if let Some(a) = o {
                            if l.len() == max_assigns {
                                return None;
                            }
                            l.push(*a);
                        }
                        Some(l)
                    })
                })
                .collect();
        }
    }
    let mut out = Vec::new();
    for &pos in pool.positions.iter().filter(|e| pool.admits(**e)) {
        for l in &lists {
            out.push(Branch {
                pos,
                assigns: l.clone(),
            });
        }
    }
    out
}

/// The candidate stream: conditions by size, then the then-branch, then
/// the else-branch. Ill-formed squeezers are skipped.
pub struct Candidates<'a> {
    p: &'a Program,
    group: usize,
    base_bound: usize,
    conds: Vec<CondS>,
    branches: Vec<Branch>,
    next: (usize, usize, usize),
    ordinal: usize,
}

impl Iterator for Candidates<'_> {
    type Item = Candidate;

    fn next(&mut self) -> Option<Candidate> {
        let nb = self.branches.len();
        loop {
            let (c, t, e) = self.next;
            if c >= self.conds.len() || nb == 0 {
                return None;
            }
            self.next = if e + 1 < nb {
                (c, t, e + 1)
            } else if t + 1 < nb {
                (c, t + 1, 0)
            } else {
                (c + 1, 0, 0)
            };
            let q = Squeezer {
                group: self.group,
                cond: self.conds[c].clone(),
                then_branch: self.branches[t].clone(),
                else_branch: self.branches[e].clone(),
                base_bound: self.base_bound,
            };
            if well_formed(&q, self.p).is_ok() {
                let ordinal = self.ordinal;
                self.ordinal += 1;
                return Some(Candidate { ordinal, squeezer: q });
            }
        }
    }
}

/// The squeezed group: the one whose arrays the pool atoms mention, else
/// group 0.
fn pool_group(p: &Program, pool: &PredicatePool) -> usize {
    pool.atoms
        .iter()
        .flat_map(|a| [a.lhs, a.rhs])
        .find_map(|o| match o {
            crate::sqz::Operand::Elem(arr, _) => Some(p.array(arr).group),
            _ => None,
        })
        .unwrap_or(0)
}

pub fn enumerate<'a>(p: &'a Program, pool: &PredicatePool, gen: &GenConfig, base_bound: usize) -> Candidates<'a> {
    let group = pool_group(p, pool);
    let conds = if pool.positions.is_empty() { vec![] } else { conditions(pool, gen.depth_bound.max(1)) };
    Candidates {
        p,
        group,
        base_bound,
        conds,
        branches: branches(p, pool, group, gen.max_assigns),
        next: (0, 0, 0),
        ordinal: 0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub bank: BankConfig,
    pub sim: SimBounds,
    /// Array length bound of phase 2.
    pub len_bound: usize,
    /// Last phase to run, 1 to 3.
    pub last_phase: u8,
    /// External solver; without one, phases 2 and 3 enumerate arrays up to
    /// `len_bound` over the bank's element pool.
    pub solver: Option<SmtConfig>,
    pub jobs: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            bank: BankConfig::default(),
            sim: SimBounds::default(),
            len_bound: 6,
            last_phase: 3,
            solver: Some(SmtConfig::default()),
            jobs: 0,
        }
    }
}

impl PipelineConfig {
    /// The backend for phases 2 and 3.
    pub fn backend(&self) -> Backend {
        match &self.solver {
            Some(c) => Backend::smt(c.clone()),
            None => Backend::Exhaustive(Domain::new(self.len_bound, self.bank.elem_pool.clone())),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseStats {
    pub tested: usize,
    pub passed: usize,
    pub seconds: f64,
}

/// What happened to a candidate that got past phase 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub ordinal: usize,
    pub squeezer: String,
    /// Last phase passed.
    pub passed: u8,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CandidateReport {
    pub candidates: usize,
    pub bank_size: usize,
    pub phase1: PhaseStats,
    pub phase2: PhaseStats,
    pub phase3: PhaseStats,
    /// Phase-1 rejections by condition.
    pub rejected: Vec<(Reason, usize)>,
    pub outcomes: Vec<Outcome>,
}

#[derive(Debug, Clone)]
pub struct SynthesisResult {
    pub survivors: Vec<Candidate>,
    pub report: CandidateReport,
}

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("no candidate passed all phases ({} candidates)", .0.candidates)]
    Exhausted(Box<CandidateReport>),
    #[error(transparent)]
    Backend(#[from] BackendError),
}

const CHUNK: usize = 512;

/// Streams candidates through the three phases. Phase 1 runs on a worker
/// pool in chunks; results are consumed in ordinal order, so the outcome
/// does not depend on the number of workers.
pub fn synthesize(
    p: &Program,
    pool: &PredicatePool,
    gen: &GenConfig,
    base_bound: usize,
    cfg: &PipelineConfig,
) -> Result<SynthesisResult, SynthError> {
    let mut report = CandidateReport::default();
    let t = Instant::now();
    let bank = generate_bank(p, &cfg.bank);
    report.bank_size = bank.len();
    report.phase1.seconds += t.elapsed().as_secs_f64();

    let pool_threads = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| BackendError::Solver(e.to_string()))?;
    let mut backend = cfg.backend();
    let mut survivors = Vec::new();
    let mut stream = enumerate(p, pool, gen, base_bound);
    let mut done = false;
    while !done {
        let chunk: Vec<Candidate> = stream.by_ref().take(CHUNK).collect();
        if chunk.is_empty() {
            break;
        }
        report.candidates += chunk.len();
        let t = Instant::now();
        let verdicts: Vec<_> = pool_threads.install(|| {
            chunk
                .par_iter()
                .map(|c| phase1_check(p, &c.squeezer, &bank, cfg.sim).reason())
                .collect()
        });
        report.phase1.seconds += t.elapsed().as_secs_f64();
        for (c, reason) in chunk.into_iter().zip(verdicts) {
            if done {
                // Counted but not tested.
                continue;
            }
            report.phase1.tested += 1;
            if let Some(r) = reason {
                match report.rejected.iter_mut().find(|(x, _)| *x == r) {
                    Some(e) => e.1 += 1,
                    None => report.rejected.push((r, 1)),
                }
                continue;
            }
            report.phase1.passed += 1;
            let outcome = later_phases(p, &c, cfg, &mut backend, &mut report)?;
            let full = outcome.passed >= cfg.last_phase;
            report.outcomes.push(outcome);
            if full {
                survivors.push(c);
                done = gen.mode == Mode::First;
            }
        }
    }
    // Count the rest of the space without testing it.
    report.candidates += stream.count();
    if survivors.is_empty() {
        return Err(SynthError::Exhausted(Box::new(report)));
    }
    Ok(SynthesisResult { survivors, report })
}

fn later_phases(
    p: &Program,
    c: &Candidate,
    cfg: &PipelineConfig,
    backend: &mut Backend,
    report: &mut CandidateReport,
) -> Result<Outcome, BackendError> {
    let mut outcome = Outcome {
        ordinal: c.ordinal,
        squeezer: render_squeezer(&c.squeezer, p),
        passed: 1,
        failure: None,
    };
    for (phase, bound) in [(2u8, Some(cfg.len_bound)), (3, None)] {
        if cfg.last_phase < phase {
            break;
        }
        let stats = if phase == 2 { &mut report.phase2 } else { &mut report.phase3 };
        stats.tested += 1;
        // Without a solver, the bounded verdict of phase 2 stands in for
        // phase 3.
        if phase == 3 && cfg.solver.is_none() {
            stats.passed += 1;
            outcome.passed = phase;
            break;
        }
        let t = Instant::now();
        let (v, _) = check_with_stats(p, &c.squeezer, cfg.sim, backend, bound)?;
        stats.seconds += t.elapsed().as_secs_f64();
        if let crate::bank::Verdict::Fail { reason, detail, .. } = v {
            outcome.failure = Some(format!("phase {phase}: {reason}: {detail}"));
            return Ok(outcome);
        }
        stats.passed += 1;
        outcome.passed = phase;
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench;

    fn atom(text: &str, p: &Program) -> Atom {
        match parse_cond(text, p).unwrap() {
            CondS::Atom(a) => a,
            _ => panic!("not an atom"),
        }
    }

    #[test]
    fn closure_sizes() {
        let p = bench::program("max_ind");
        let pool = PredicatePool {
            atoms: vec![atom("s[0] <= s[1]", &p), atom("s[1] <= s[2]", &p)],
            index_consts: vec![0, 1, 2],
            allow_strict: false,
            positions: vec![IndexExprS::Const(0)],
            assign_elems: vec![],
        };
        assert_eq!(conditions(&pool, 1).len(), 2);
        assert_eq!(conditions(&pool, 2).len(), 4);
        assert_eq!(conditions(&pool, 3).len(), 4);
        let mut pool = pool;
        pool.atoms.push(atom("s[0] <= s[2]", &p));
        assert_eq!(conditions(&pool, 2).len(), 9);
        // a op (b op c) for each atom a and each split of the other two.
        assert_eq!(conditions(&pool, 3).len(), 9 + 3 * 2 * 2);
        let c = conditions(&pool, 3);
        assert!(c.windows(2).all(|w| size(&w[0]) <= size(&w[1])));
    }
}
