//! Proof obligations for the squeezer conditions and their discharge on
//! bounded (phase 2) and unbounded (phase 3) domains.
//!
//! Every query quantifies over a state `σ` from the reachability
//! over-approximation, described by an [`Origin`]: an initial state, the
//! successor of one, or the two-step image of a good loop state. All
//! states also satisfy the declared assumptions.
//!
//! Simulation is checked through a ladder of cheaper queries. A branch
//! lemma shows that the squeezer condition is stable along the first `N`
//! steps, so both sides of the simulation use the same squeezer branch.
//! Each branch is then split by the program's own transition case. Only
//! when a split query fails is the undecomposed one dispatched.

pub mod exhaustive;
pub mod qinst;
pub mod smt;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use exhaustive::Domain;
pub use smt::{elem_values_for, emit_smtlib, emit_smtlib_with, Encoding, SmtBackend, SmtConfig};

use crate::bank::{find_schedule, Reason, SimBounds, Verdict};
use crate::encode::{Builder, Sym};
use crate::ir::{CmpOp, Loc, Program, State};
use crate::logic::{Family, Model, Origin, ProgBranch, Query, QueryMeta, Term};
use crate::sqz::{apply, Squeezer};

/// Domain restrictions shared by both backends.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub len_bound: Option<usize>,
    pub values: Option<Vec<i64>>,
    pub index_max: Option<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BackendVerdict {
    Valid,
    CounterModel(Model),
    Unknown(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BackendError {
    #[error("solver unavailable: {0}")]
    Unavailable(String),
    #[error("solver error: {0}")]
    Solver(String),
}

pub enum Backend {
    Exhaustive(Domain),
    Smt(SmtBackend),
}

impl fmt::Debug for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Exhaustive(d) => f.debug_tuple("Exhaustive").field(d).finish(),
            Backend::Smt(s) => f.debug_tuple("Smt").field(&s.config).finish(),
        }
    }
}

impl Backend {
    pub fn smt(config: SmtConfig) -> Backend {
        Backend::Smt(SmtBackend::new(config))
    }

    /// Checks `q` with root lengths at most `len_bound`.
    pub fn check(&mut self, q: &Query, len_bound: Option<usize>) -> Result<BackendVerdict, BackendError> {
        match self {
            Backend::Exhaustive(d) => exhaustive::check(q, d, len_bound),
            Backend::Smt(s) => s.check(
                q,
                &Limits {
                    len_bound,
                    ..Limits::default()
                },
            ),
        }
    }

    /// Checks `q` under explicit limits. The exhaustive backend combines
    /// them with its own domain.
    pub fn check_limited(&mut self, q: &Query, limits: &Limits) -> Result<BackendVerdict, BackendError> {
        match self {
            Backend::Exhaustive(d) => {
                let mut d = d.clone();
                if let Some(v) = &limits.values {
                    d.values = v.clone();
                }
                if let Some(m) = limits.index_max {
                    d.index_max = m;
                }
                exhaustive::check(q, &d, limits.len_bound)
            }
            Backend::Smt(s) => s.check(q, limits),
        }
    }
}

fn origin_tag(o: Origin) -> &'static str {
    match o {
        Origin::Init => "init",
        Origin::InitStep => "init1",
        Origin::TwoStep => "step2",
        Origin::BadStep => "bad1",
    }
}

fn branch_tag(b: bool) -> &'static str {
    if b {
        "then"
    } else {
        "else"
    }
}

fn prog_tag(b: ProgBranch) -> &'static str {
    match b {
        ProgBranch::Stutter => "stutter",
        ProgBranch::Iterate => "iterate",
        ProgBranch::Exit => "exit",
    }
}

/// The state under check for `origin`, with its membership constraint.
fn origin_state(b: &mut Builder, origin: Origin) -> (Sym, Term) {
    match origin {
        Origin::Init => {
            let (root, facts) = b.root("s", true);
            let init = b.initial(&root);
            (root, Term::and([facts, init]))
        }
        Origin::InitStep => {
            let (root, facts) = b.root("s", true);
            let init = b.initial(&root);
            let st = b.step(&root);
            let a = b.assumptions(&st);
            (st, Term::and([facts, init, a]))
        }
        Origin::TwoStep => {
            let (root, facts) = b.root("r", false);
            let a0 = b.assumptions(&root);
            let good0 = b.good(&root);
            let mid = b.step_good(&root);
            let good1 = b.good(&mid);
            let st = b.step_good(&mid);
            let a = b.assumptions(&st);
            (st, Term::and([facts, a0, good0, good1, a]))
        }
        Origin::BadStep => {
            let (root, facts) = b.root("r", false);
            let a0 = b.assumptions(&root);
            let good0 = b.good(&root);
            let st = b.step_good(&root);
            let good1 = b.good(&st);
            let a = b.assumptions(&st);
            (st, Term::and([facts, a0, good0, Term::not(good1), a]))
        }
    }
}

/// Builds one query over the state of `origin`. `f` returns extra
/// hypotheses and the goal.
fn build(
    p: &Program,
    name: String,
    meta: QueryMeta,
    origin: Origin,
    f: impl FnOnce(&mut Builder, &Sym) -> (Term, Term),
) -> Query {
    let mut b = Builder::new(p);
    let (st, filter) = origin_state(&mut b, origin);
    let (extra, goal) = f(&mut b, &st);
    b.finish(name, Term::and([filter, extra]), goal, meta)
}

/// Hypothesis that `st` is not a base state and takes squeezer branch `br`.
fn on_branch(b: &mut Builder, q: &Squeezer, st: &Sym, br: bool) -> Term {
    let base = b.is_base(q, st);
    let c = b.cond(&q.cond, st);
    Term::and([Term::not(base), if br { c } else { Term::not(c) }])
}

fn meta(family: Family, branch: Option<bool>, origin: Origin) -> QueryMeta {
    QueryMeta {
        family,
        branch,
        origin: Some(origin),
    }
}

/// `Init(σ) ∧ ±cond(σ) ⇒ Init(apply(σ))`, one query per squeezer branch.
pub fn vc_initial_anchor(p: &Program, q: &Squeezer) -> Vec<Query> {
    [true, false]
        .into_iter()
        .map(|br| {
            build(
                p,
                format!("anchor_{}", branch_tag(br)),
                meta(Family::InitialAnchor, Some(br), Origin::Init),
                Origin::Init,
                |b, st| {
                    let hyp = on_branch(b, q, st, br);
                    let sq = b.apply_branch(q, st, br);
                    (hyp, b.initial(&sq))
                },
            )
        })
        .collect()
}

/// `¬φ(σ) ∧ ±cond(σ) ⇒ ¬φ(apply(σ))`, per squeezer branch and origin.
pub fn vc_fault_preservation(p: &Program, q: &Squeezer) -> Vec<Query> {
    let mut out = Vec::new();
    for br in [true, false] {
        for origin in Origin::ALL {
            out.push(build(
                p,
                format!("fault_{}_{}", branch_tag(br), origin_tag(origin)),
                meta(Family::FaultPreservation, Some(br), origin),
                origin,
                |b, st| {
                    let mut hyp = on_branch(b, q, st, br);
                    let good = b.good(st);
                    hyp = Term::and([hyp, Term::not(good)]);
                    let sq = b.apply_branch(q, st, br);
                    let g2 = b.good(&sq);
                    (hyp, Term::not(g2))
                },
            ));
        }
    }
    out
}

/// `⋁ apply(stepⁿ(σ)) = stepᵐ(apply(σ))` for a non-base `σ` on squeezer
/// branch `br`. With `split`, the left side applies the same branch
/// instead of the full squeezer.
fn sim_goal(b: &mut Builder, q: &Squeezer, st: &Sym, br: bool, sim: SimBounds, split: bool) -> Term {
    let lhs: Vec<Sym> = b.steps(st, sim.n_max).into_iter().skip(1).collect();
    let sq = b.apply_branch(q, st, br);
    let rhs = b.steps(&sq, sim.m_max);
    let mut options = Vec::new();
    for l in &lhs {
        let img = if split { b.apply_branch(q, l, br) } else { b.apply(q, l) };
        for r in &rhs {
            options.push(img.equals(r));
        }
    }
    Term::or(options)
}

/// The undecomposed simulation queries, per squeezer branch and origin,
/// plus the base-state query when `M = 0`.
pub fn vc_simulation(p: &Program, q: &Squeezer, sim: SimBounds) -> Vec<Query> {
    let mut out = Vec::new();
    for br in [true, false] {
        for origin in Origin::ALL {
            out.push(sim_full(p, q, sim, br, origin, false));
        }
    }
    out.extend(vc_base_simulation(p, q, sim));
    out
}

fn sim_full(p: &Program, q: &Squeezer, sim: SimBounds, br: bool, origin: Origin, split: bool) -> Query {
    let tag = if split { "sim_split" } else { "sim" };
    build(
        p,
        format!("{tag}_{}_{}", branch_tag(br), origin_tag(origin)),
        meta(Family::Simulation, Some(br), origin),
        origin,
        |b, st| {
            let hyp = on_branch(b, q, st, br);
            (hyp, sim_goal(b, q, st, br, sim, split))
        },
    )
}

/// Base states are fixed by the squeezer, so a schedule with `n = m`
/// always exists when `M ≥ 1`. For `M = 0` the states must stutter.
pub fn vc_base_simulation(p: &Program, q: &Squeezer, sim: SimBounds) -> Vec<Query> {
    if sim.m_max > 0 {
        return Vec::new();
    }
    Origin::ALL
        .into_iter()
        .map(|origin| {
            build(
                p,
                format!("sim_base_{}", origin_tag(origin)),
                meta(Family::Simulation, None, origin),
                origin,
                |b, st| {
                    let base = b.is_base(q, st);
                    let next: Vec<Sym> = b.steps(st, sim.n_max).into_iter().skip(1).collect();
                    (base, Term::or(next.iter().map(|n| n.equals(st))))
                },
            )
        })
        .collect()
}

/// `±cond(σ) ⇒ ±cond(stepⁿ(σ))` for `n = 1..N`.
pub fn vc_branch_lemmas(p: &Program, q: &Squeezer, sim: SimBounds) -> Vec<Query> {
    let mut out = Vec::new();
    for br in [true, false] {
        for origin in Origin::ALL {
            out.push(build(
                p,
                format!("lemma_{}_{}", branch_tag(br), origin_tag(origin)),
                meta(Family::BranchLemma, Some(br), origin),
                origin,
                |b, st| {
                    let hyp = on_branch(b, q, st, br);
                    let next: Vec<Sym> = b.steps(st, sim.n_max).into_iter().skip(1).collect();
                    let goal = Term::and(next.iter().map(|n| {
                        let c = b.cond(&q.cond, n);
                        if br {
                            c
                        } else {
                            Term::not(c)
                        }
                    }));
                    (hyp, goal)
                },
            ));
        }
    }
    out
}

/// The cheap check for one squeezer branch and program case: the squeezed
/// state takes the same case, and simulation holds under that assumption.
pub fn vc_cheap(p: &Program, q: &Squeezer, sim: SimBounds, br: bool, origin: Origin, case: ProgBranch) -> [Query; 2] {
    let tag = format!("{}_{}_{}", branch_tag(br), origin_tag(origin), prog_tag(case));
    let same = build(
        p,
        format!("same_{tag}"),
        meta(Family::SameBranch(case), Some(br), origin),
        origin,
        |b, st| {
            let mut hyp = on_branch(b, q, st, br);
            let here = b.prog_branch(st, case);
            hyp = Term::and([hyp, here]);
            let sq = b.apply_branch(q, st, br);
            (hyp, b.prog_branch(&sq, case))
        },
    );
    let under = build(
        p,
        format!("simcase_{tag}"),
        meta(Family::SimUnder(case), Some(br), origin),
        origin,
        |b, st| {
            let mut hyp = on_branch(b, q, st, br);
            let here = b.prog_branch(st, case);
            let sq = b.apply_branch(q, st, br);
            let there = b.prog_branch(&sq, case);
            hyp = Term::and([hyp, here, there]);
            (hyp, sim_goal(b, q, st, br, sim, true))
        },
    );
    [same, under]
}

/// In-bounds squeezer reads for every filtered state, and strict rank
/// decrease on non-base states.
pub fn vc_rank_and_bounds(p: &Program, q: &Squeezer) -> Vec<Query> {
    let mut out = Vec::new();
    for origin in Origin::ALL {
        out.push(build(
            p,
            format!("bounds_{}", origin_tag(origin)),
            meta(Family::Bounds, None, origin),
            origin,
            |b, st| (Term::Bool(true), b.bounds(q, st)),
        ));
    }
    for origin in Origin::ALL {
        out.push(build(
            p,
            format!("rank_{}", origin_tag(origin)),
            meta(Family::RankDecrease, None, origin),
            origin,
            |b, st| {
                let base = b.is_base(q, st);
                let inb = b.bounds(q, st);
                let sq = b.apply(q, st);
                let goal = Term::cmp(CmpOp::Lt, b.rank(&sq), b.rank(st));
                (Term::and([Term::not(base), inb]), goal)
            },
        ));
    }
    out
}

/// Every query the checker may dispatch, in dispatch order. Used for
/// emission; the checker itself builds the ladder lazily.
pub fn all_queries(p: &Program, q: &Squeezer, sim: SimBounds) -> Vec<Query> {
    let mut out = vc_rank_and_bounds(p, q);
    out.extend(vc_initial_anchor(p, q));
    out.extend(vc_fault_preservation(p, q));
    out.extend(vc_branch_lemmas(p, q, sim));
    for br in [true, false] {
        for origin in Origin::ALL {
            for case in ProgBranch::ALL {
                out.extend(vc_cheap(p, q, sim, br, origin, case));
            }
        }
    }
    out.extend(vc_simulation(p, q, sim));
    out
}

fn family_reason(f: Family) -> Reason {
    match f {
        Family::InitialAnchor => Reason::InitialAnchor,
        Family::FaultPreservation | Family::BaseSafety | Family::BaseTermination => Reason::FaultPreservation,
        Family::Simulation | Family::BranchLemma | Family::SameBranch(_) | Family::SimUnder(_) => Reason::Simulation,
        Family::Bounds => Reason::WellFormedness,
        Family::RankDecrease => Reason::RankDecrease,
    }
}

/// Rebuilds the concrete root state named `prefix` from a model.
pub fn root_state(p: &Program, model: &Model, prefix: &str) -> Option<State> {
    let arrays = p
        .arrays
        .iter()
        .map(|a| model.get(&format!("{prefix}_{}", a.name)).map(|v| v.as_seq().to_vec()))
        .collect::<Option<Vec<_>>>()?;
    let scalars = p
        .scalars
        .iter()
        .zip(&p.init)
        .map(|(s, init)| match model.get(&format!("{prefix}_{}", s.name)) {
            Some(v) => Some(v.as_int()),
            None => *init,
        })
        .collect::<Option<Vec<_>>>()?;
    Some(State {
        loc: Loc::Loop,
        arrays,
        scalars,
    })
}

/// The state under check in a counter model of `query`.
pub fn model_state(p: &Program, query: &Query, model: &Model) -> Option<State> {
    let origin = query.meta.origin?;
    let prefix = match origin {
        Origin::Init | Origin::InitStep => "s",
        Origin::TwoStep | Origin::BadStep => "r",
    };
    let root = root_state(p, model, prefix)?;
    match origin {
        Origin::Init => Some(root),
        Origin::InitStep | Origin::BadStep => p.step(&root).ok(),
        Origin::TwoStep => p.step_n(&root, 2).ok(),
    }
}

/// Confirms a counter model concretely: the violation it claims is
/// reproduced by the interpreter and the squeezer semantics alone.
pub fn replay(p: &Program, q: &Squeezer, sim: SimBounds, query: &Query, model: &Model) -> Result<State, String> {
    let st = model_state(p, query, model).ok_or("model does not describe a state")?;
    let show = p.show_state(&st);
    let sq = apply(q, p, &st);
    let confirmed = match query.meta.family {
        Family::Bounds => sq.is_err(),
        Family::RankDecrease => matches!(&sq, Ok(s) if st.rank() > q.base_bound && s.rank() >= st.rank()),
        Family::InitialAnchor => p.is_initial(&st) && matches!(&sq, Ok(s) if !p.is_initial(s)),
        Family::FaultPreservation => p.is_bad(&st) == Ok(true) && matches!(&sq, Ok(s) if p.is_bad(s) == Ok(false)),
        Family::Simulation => find_schedule(p, q, &st, sim) == Ok(None),
        _ => return Err(format!("family {:?} has no concrete violation", query.meta.family)),
    };
    if confirmed {
        Ok(st)
    } else {
        Err(format!("model state {show} does not violate the condition concretely"))
    }
}

/// Counts of dispatched queries, for reports.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VcStats {
    pub queries: usize,
    pub lemmas_held: usize,
    pub cheap_held: usize,
    pub fallbacks: usize,
}

struct Runner<'a> {
    p: &'a Program,
    q: &'a Squeezer,
    sim: SimBounds,
    backend: &'a mut Backend,
    len_bound: Option<usize>,
    stats: VcStats,
}

enum Outcome {
    Valid,
    Failed(Verdict),
}

impl Runner<'_> {
    fn dispatch(&mut self, query: &Query) -> Result<BackendVerdict, BackendError> {
        self.stats.queries += 1;
        log::debug!("dispatch {}", query.name);
        self.backend.check(query, self.len_bound)
    }

    /// Dispatches a query whose failure rejects the squeezer.
    fn require(&mut self, query: &Query) -> Result<Outcome, BackendError> {
        let reason = family_reason(query.meta.family);
        Ok(match self.dispatch(query)? {
            BackendVerdict::Valid => Outcome::Valid,
            BackendVerdict::CounterModel(m) => {
                let (witness, note) = match replay(self.p, self.q, self.sim, query, &m) {
                    Ok(st) => (Some(st), "replayed".to_string()),
                    Err(e) => (model_state(self.p, query, &m), format!("not replayed: {e}")),
                };
                Outcome::Failed(Verdict::fail(reason, witness, format!("{}: counter model ({note})", query.name)))
            }
            BackendVerdict::Unknown(why) => Outcome::Failed(Verdict::fail(reason, None, format!("{}: unknown ({why})", query.name))),
        })
    }

    fn holds(&mut self, query: &Query) -> Result<bool, BackendError> {
        Ok(self.dispatch(query)? == BackendVerdict::Valid)
    }

    fn run(&mut self) -> Result<Verdict, BackendError> {
        let (p, q, sim) = (self.p, self.q, self.sim);
        let mut first = vc_rank_and_bounds(p, q);
        first.extend(vc_initial_anchor(p, q));
        first.extend(vc_fault_preservation(p, q));
        first.extend(vc_base_simulation(p, q, sim));
        for query in &first {
            if let Outcome::Failed(v) = self.require(query)? {
                return Ok(v);
            }
        }
        for br in [true, false] {
            for origin in Origin::ALL {
                if let Outcome::Failed(v) = self.simulation(br, origin)? {
                    return Ok(v);
                }
            }
        }
        Ok(Verdict::Pass { schedule: Vec::new() })
    }

    fn simulation(&mut self, br: bool, origin: Origin) -> Result<Outcome, BackendError> {
        let (p, q, sim) = (self.p, self.q, self.sim);
        let lemma = vc_branch_lemmas(p, q, sim)
            .into_iter()
            .find(|l| l.meta.branch == Some(br) && l.meta.origin == Some(origin))
            .expect("lemma for every branch and origin");
        if self.holds(&lemma)? {
            self.stats.lemmas_held += 1;
            let mut cheap = true;
            for case in ProgBranch::ALL {
                let [same, under] = vc_cheap(p, q, sim, br, origin, case);
                if !self.holds(&same)? || !self.holds(&under)? {
                    cheap = false;
                    break;
                }
            }
            if cheap {
                self.stats.cheap_held += 1;
                return Ok(Outcome::Valid);
            }
            self.stats.fallbacks += 1;
            // The lemma makes the split query equivalent to the full one,
            // but a counter model is replayed against the full semantics
            // either way.
            return self.require(&sim_full(p, q, sim, br, origin, true));
        }
        self.stats.fallbacks += 1;
        self.require(&sim_full(p, q, sim, br, origin, false))
    }
}

/// Runs all condition queries and reports the first failure.
pub fn check_with_stats(
    p: &Program,
    q: &Squeezer,
    sim: SimBounds,
    backend: &mut Backend,
    len_bound: Option<usize>,
) -> Result<(Verdict, VcStats), BackendError> {
    let mut r = Runner {
        p,
        q,
        sim,
        backend,
        len_bound,
        stats: VcStats::default(),
    };
    let v = r.run()?;
    Ok((v, r.stats))
}

/// Phase 2: all conditions over states with array lengths at most
/// `len_bound`.
pub fn check_bounded(
    p: &Program,
    q: &Squeezer,
    sim: SimBounds,
    backend: &mut Backend,
    len_bound: usize,
) -> Result<Verdict, BackendError> {
    check_with_stats(p, q, sim, backend, Some(len_bound)).map(|(v, _)| v)
}

/// Phase 3: all conditions with unconstrained lengths.
pub fn check_unbounded(p: &Program, q: &Squeezer, sim: SimBounds, backend: &mut SmtBackend) -> Result<Verdict, BackendError> {
    let config = backend.config.clone();
    let mut b = Backend::Smt(std::mem::replace(backend, SmtBackend::new(config)));
    let r = check_with_stats(p, q, sim, &mut b, None).map(|(v, _)| v);
    if let Backend::Smt(s) = b {
        *backend = s;
    }
    r
}
