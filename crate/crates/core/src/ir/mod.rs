//! Program IR for single-loop array programs and its transition-system
//! semantics.
//!
//! A [`Program`] describes one loop over read-only arrays. Its states are
//! [`State`] values; one transition ([`Program::step`]) executes one full
//! iteration of the loop body, or the exit path when the guard fails. The
//! transition relation is made recidivist here: states that violate the
//! specification, and terminated states, step to themselves.

mod parse;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parse::parse_program;

/// Element domain of an array or data variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElemSort {
    Int,
    /// Bytes in `[0, 255]`; 0 terminates strings.
    Char,
}

impl fmt::Display for ElemSort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ElemSort::Int => "int",
            ElemSort::Char => "char",
        })
    }
}

/// Index variables range over naturals and are adjusted when an element is
/// removed from an array; data variables hold element-sorted values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarClass {
    Index,
    Data(ElemSort),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArrayId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scalar {
    pub name: String,
    pub class: VarClass,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayDecl {
    pub name: String,
    pub sort: ElemSort,
    /// Arrays sharing a group always have equal length.
    pub group: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(i64),
    Var(VarId),
    /// Variable bound by an enclosing quantifier, by binding depth.
    Bound(usize),
    Len(ArrayId),
    Read(ArrayId, Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CmpOp {
    Eq,
    Ne,
    Le,
    Ge,
    Lt,
    Gt,
}

impl CmpOp {
    pub fn eval(self, a: i64, b: i64) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Le => a <= b,
            CmpOp::Ge => a >= b,
            CmpOp::Lt => a < b,
            CmpOp::Gt => a > b,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Le => "<=",
            CmpOp::Ge => ">=",
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
        }
    }

    pub fn from_symbol(s: &str) -> Option<CmpOp> {
        Some(match s {
            "==" => CmpOp::Eq,
            "!=" => CmpOp::Ne,
            "<=" => CmpOp::Le,
            ">=" => CmpOp::Ge,
            "<" => CmpOp::Lt,
            ">" => CmpOp::Gt,
            _ => return None,
        })
    }

    pub fn negate(self) -> CmpOp {
        match self {
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Ge => CmpOp::Lt,
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Gt => CmpOp::Le,
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, CmpOp::Lt | CmpOp::Gt)
    }
}

/// State predicates: boolean structure over comparisons plus bounded
/// universal quantification.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Pred {
    Bool(bool),
    /// `loc = Done`.
    Done,
    Cmp(CmpOp, Expr, Expr),
    Not(Box<Pred>),
    And(Vec<Pred>),
    Or(Vec<Pred>),
    Implies(Box<Pred>, Box<Pred>),
    /// `forall j in [lo, hi) : body`; `body` refers to `j` as `Expr::Bound(depth)`.
    Forall {
        lo: Expr,
        hi: Expr,
        body: Box<Pred>,
    },
}

impl Expr {
    pub fn collect_vars(&self, out: &mut BTreeSet<VarId>) {
        match self {
            Expr::Const(_) | Expr::Bound(_) | Expr::Len(_) => {}
            Expr::Var(v) => {
                out.insert(*v);
            }
            Expr::Read(_, e) | Expr::Neg(e) => e.collect_vars(out),
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}

impl Pred {
    pub fn collect_vars(&self, out: &mut BTreeSet<VarId>) {
        match self {
            Pred::Bool(_) | Pred::Done => {}
            Pred::Cmp(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Pred::Not(p) => p.collect_vars(out),
            Pred::And(ps) | Pred::Or(ps) => ps.iter().for_each(|p| p.collect_vars(out)),
            Pred::Implies(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Pred::Forall { lo, hi, body } => {
                lo.collect_vars(out);
                hi.collect_vars(out);
                body.collect_vars(out);
            }
        }
    }

    pub fn has_quantifier(&self) -> bool {
        match self {
            Pred::Bool(_) | Pred::Done | Pred::Cmp(..) => false,
            Pred::Not(p) => p.has_quantifier(),
            Pred::And(ps) | Pred::Or(ps) => ps.iter().any(Pred::has_quantifier),
            Pred::Implies(a, b) => a.has_quantifier() || b.has_quantifier(),
            Pred::Forall { .. } => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Assign(VarId, Expr),
    If(Pred, Vec<Stmt>, Vec<Stmt>),
    /// Terminates the loop; the value, if any, is stored in the `ret` variable.
    Return(Option<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Loc {
    Loop,
    Done,
}

/// A concrete program state. Arrays and scalars are stored in declaration
/// order of the owning [`Program`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct State {
    pub loc: Loc,
    pub arrays: Vec<Vec<i64>>,
    pub scalars: Vec<i64>,
}

impl State {
    /// Sum of the lengths of all arrays.
    pub fn rank(&self) -> usize {
        self.arrays.iter().map(Vec::len).sum()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("out-of-bounds access {array}[{index}] (length {len})")]
    OutOfBounds {
        array: String,
        index: i64,
        len: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub name: String,
    pub arrays: Vec<ArrayDecl>,
    pub scalars: Vec<Scalar>,
    /// Initial value per scalar; `None` marks an unconstrained parameter.
    pub init: Vec<Option<i64>>,
    pub guard: Pred,
    pub body: Vec<Stmt>,
    /// Statements run on the exit transition, when the guard fails.
    pub exit: Vec<Stmt>,
    /// The safety property φ.
    pub spec: Pred,
    /// Range assumptions A.
    pub assumptions: Vec<Pred>,
    pub ret: Option<VarId>,
    /// Default base bound declared by the program text, if any.
    pub base_bound: Option<usize>,
    /// Literals occurring in the program.
    pub constants: BTreeSet<i64>,
    /// Scalars that survive termination: those mentioned by the
    /// specification. The others are dead once the loop is left and are
    /// reset to 0 on the transition to `Done`.
    pub observed: Vec<bool>,
}

enum Flow {
    Next,
    Returned,
}

impl Program {
    pub fn array_id(&self, name: &str) -> Option<ArrayId> {
        self.arrays.iter().position(|a| a.name == name).map(ArrayId)
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.scalars.iter().position(|v| v.name == name).map(VarId)
    }

    pub fn array(&self, id: ArrayId) -> &ArrayDecl {
        &self.arrays[id.0]
    }

    pub fn scalar(&self, id: VarId) -> &Scalar {
        &self.scalars[id.0]
    }

    pub fn num_groups(&self) -> usize {
        self.arrays.iter().map(|a| a.group + 1).max().unwrap_or(0)
    }

    /// Arrays belonging to `group`, in declaration order.
    pub fn group_arrays(&self, group: usize) -> Vec<ArrayId> {
        (0..self.arrays.len())
            .filter(|&i| self.arrays[i].group == group)
            .map(ArrayId)
            .collect()
    }

    pub fn index_vars(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.scalars.len())
            .filter(|&i| self.scalars[i].class == VarClass::Index)
            .map(VarId)
    }

    /// Builds a state from named components; scalars not mentioned take
    /// their initial value (or 0 for parameters).
    pub fn state(&self, loc: Loc, arrays: &[(&str, Vec<i64>)], scalars: &[(&str, i64)]) -> State {
        let mut st = State {
            loc,
            arrays: vec![Vec::new(); self.arrays.len()],
            scalars: self.init.iter().map(|v| v.unwrap_or(0)).collect(),
        };
        for (name, vals) in arrays {
            let id = self
                .array_id(name)
                .unwrap_or_else(|| panic!("no array `{name}` in {}", self.name));
            st.arrays[id.0] = vals.clone();
        }
        for (name, v) in scalars {
            let id = self
                .var_id(name)
                .unwrap_or_else(|| panic!("no scalar `{name}` in {}", self.name));
            st.scalars[id.0] = *v;
        }
        st
    }

    pub fn show_state(&self, st: &State) -> String {
        let mut parts = vec![format!("{:?}", st.loc)];
        for (decl, vals) in self.arrays.iter().zip(&st.arrays) {
            let items: Vec<String> = vals.iter().map(i64::to_string).collect();
            parts.push(format!("{}=[{}]", decl.name, items.join(",")));
        }
        for (decl, v) in self.scalars.iter().zip(&st.scalars) {
            parts.push(format!("{}={}", decl.name, v));
        }
        format!("<{}>", parts.join(" "))
    }

    pub fn eval(&self, st: &State, e: &Expr) -> Result<i64, EvalError> {
        self.eval_in(st, e, &mut Vec::new())
    }

    fn eval_in(&self, st: &State, e: &Expr, env: &mut Vec<i64>) -> Result<i64, EvalError> {
        Ok(match e {
            Expr::Const(c) => *c,
            Expr::Var(v) => st.scalars[v.0],
            Expr::Bound(d) => env[*d],
            Expr::Len(a) => st.arrays[a.0].len() as i64,
            Expr::Read(a, idx) => {
                let i = self.eval_in(st, idx, env)?;
                let arr = &st.arrays[a.0];
                if i < 0 || i as usize >= arr.len() {
                    return Err(EvalError::OutOfBounds {
                        array: self.arrays[a.0].name.clone(),
                        index: i,
                        len: arr.len(),
                    });
                }
                arr[i as usize]
            }
            Expr::Add(a, b) => self.eval_in(st, a, env)?.wrapping_add(self.eval_in(st, b, env)?),
            Expr::Sub(a, b) => self.eval_in(st, a, env)?.wrapping_sub(self.eval_in(st, b, env)?),
            Expr::Neg(a) => self.eval_in(st, a, env)?.wrapping_neg(),
        })
    }

    /// Evaluates `p` over `st`. Connectives short-circuit left to right, so
    /// a conjunct may guard the reads of the conjuncts after it.
    pub fn holds(&self, st: &State, p: &Pred) -> Result<bool, EvalError> {
        self.holds_in(st, p, &mut Vec::new())
    }

    fn holds_in(&self, st: &State, p: &Pred, env: &mut Vec<i64>) -> Result<bool, EvalError> {
        Ok(match p {
            Pred::Bool(b) => *b,
            Pred::Done => st.loc == Loc::Done,
            Pred::Cmp(op, a, b) => op.eval(self.eval_in(st, a, env)?, self.eval_in(st, b, env)?),
            Pred::Not(q) => !self.holds_in(st, q, env)?,
            Pred::And(qs) => {
                for q in qs {
                    if !self.holds_in(st, q, env)? {
                        return Ok(false);
                    }
                }
                true
            }
            Pred::Or(qs) => {
                for q in qs {
                    if self.holds_in(st, q, env)? {
                        return Ok(true);
                    }
                }
                false
            }
            Pred::Implies(a, b) => !self.holds_in(st, a, env)? || self.holds_in(st, b, env)?,
            Pred::Forall { lo, hi, body } => {
                let lo = self.eval_in(st, lo, env)?;
                let hi = self.eval_in(st, hi, env)?;
                let mut ok = true;
                for j in lo..hi {
                    env.push(j);
                    let r = self.holds_in(st, body, env);
                    env.pop();
                    if !r? {
                        ok = false;
                        break;
                    }
                }
                ok
            }
        })
    }

    pub fn assumptions_hold(&self, st: &State) -> Result<bool, EvalError> {
        for a in &self.assumptions {
            if !self.holds(st, a)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Lockstep groups have equal lengths.
    pub fn well_shaped(&self, st: &State) -> bool {
        st.arrays.len() == self.arrays.len()
            && st.scalars.len() == self.scalars.len()
            && self.arrays.iter().enumerate().all(|(i, a)| {
                self.arrays[..i]
                    .iter()
                    .zip(&st.arrays)
                    .all(|(b, vals)| b.group != a.group || vals.len() == st.arrays[i].len())
            })
    }

    /// Membership in Init: at the loop head, every initialized scalar holds
    /// its initial value and the assumptions hold. Array contents are free.
    pub fn is_initial(&self, st: &State) -> bool {
        st.loc == Loc::Loop
            && self.well_shaped(st)
            && self
                .init
                .iter()
                .zip(&st.scalars)
                .all(|(init, v)| init.map_or(true, |c| c == *v))
            && self.assumptions_hold(st).unwrap_or(false)
    }

    pub fn is_bad(&self, st: &State) -> Result<bool, EvalError> {
        Ok(!self.holds(st, &self.spec)?)
    }

    /// One transition of the recidivist system. Leaving the loop resets the
    /// scalars the specification does not observe.
    pub fn step(&self, st: &State) -> Result<State, EvalError> {
        if st.loc == Loc::Done || self.is_bad(st)? {
            return Ok(st.clone());
        }
        let mut next = st.clone();
        if self.holds(st, &self.guard)? {
            self.exec(&self.body, &mut next)?;
        } else {
            self.exec(&self.exit, &mut next)?;
            next.loc = Loc::Done;
        }
        if next.loc == Loc::Done {
            for (v, live) in next.scalars.iter_mut().zip(&self.observed) {
                if !live {
                    *v = 0;
                }
            }
        }
        Ok(next)
    }

    pub fn step_n(&self, st: &State, n: usize) -> Result<State, EvalError> {
        let mut cur = st.clone();
        for _ in 0..n {
            let next = self.step(&cur)?;
            if next == cur {
                break;
            }
            cur = next;
        }
        Ok(cur)
    }

    fn exec(&self, stmts: &[Stmt], st: &mut State) -> Result<Flow, EvalError> {
        for s in stmts {
            match s {
                Stmt::Assign(v, e) => {
                    st.scalars[v.0] = self.eval(st, e)?;
                }
                Stmt::If(c, t, e) => {
                    let branch = if self.holds(st, c)? { t } else { e };
                    if let Flow::Returned = self.exec(branch, st)? {
                        return Ok(Flow::Returned);
                    }
                }
                Stmt::Return(val) => {
                    if let (Some(e), Some(r)) = (val, self.ret) {
                        st.scalars[r.0] = self.eval(st, e)?;
                    }
                    st.loc = Loc::Done;
                    return Ok(Flow::Returned);
                }
            }
        }
        Ok(Flow::Next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench;

    fn sum_bidi() -> Program {
        bench::program("sum_bidi")
    }

    fn bidi(p: &Program, a: &[i64], i: i64, l: i64, r: i64) -> State {
        p.state(Loc::Loop, &[("a", a.to_vec())], &[("i", i), ("l", l), ("r", r)])
    }

    const A: [i64; 5] = [7, 2, 9, 1, 4];

    #[test]
    fn eval_reads_and_lengths() {
        let p = sum_bidi();
        let st = bidi(&p, &A, 2, 0, 0);
        let a = p.array_id("a").unwrap();
        let i = p.var_id("i").unwrap();
        // a[len(a) - i - 1]
        let e = Expr::Read(
            a,
            Box::new(Expr::Sub(
                Box::new(Expr::Sub(Box::new(Expr::Len(a)), Box::new(Expr::Var(i)))),
                Box::new(Expr::Const(1)),
            )),
        );
        assert_eq!(p.eval(&st, &e), Ok(9));
        assert_eq!(p.eval(&st, &Expr::Len(a)), Ok(5));
        let oob = p.eval(&st, &Expr::Read(a, Box::new(Expr::Const(5))));
        assert!(matches!(oob, Err(EvalError::OutOfBounds { index: 5, len: 5, .. })));
    }

    #[test]
    fn spec_evaluation() {
        let p = sum_bidi();
        assert!(p.holds(&bidi(&p, &[7, 2], 1, 7, 2), &p.spec).unwrap());
        assert!(!p.holds(&bidi(&p, &[5, 3], 2, 5, 3), &p.spec).unwrap());
        assert!(p.holds(&bidi(&p, &A, 5, 23, 23), &p.spec).unwrap());
    }

    #[test]
    fn initial_states() {
        let p = sum_bidi();
        assert!(p.is_initial(&bidi(&p, &A, 0, 0, 0)));
        assert!(!p.is_initial(&bidi(&p, &A, 1, 7, 4)));
        assert!(p.is_initial(&bidi(&p, &[], 0, 0, 0)));
    }

    #[test]
    fn step_iterates_exits_and_self_loops() {
        let p = sum_bidi();
        assert_eq!(p.step(&bidi(&p, &A, 2, 9, 5)).unwrap(), bidi(&p, &A, 3, 18, 14));

        let empty = bidi(&p, &[], 0, 0, 0);
        let done = p.step(&empty).unwrap();
        assert_eq!(done.loc, Loc::Done);
        assert_eq!(p.step(&done).unwrap(), done);

        let bad = bidi(&p, &[5, 3], 2, 5, 3);
        assert_eq!(p.step(&bad).unwrap(), bad);
    }

    #[test]
    fn step_n_and_rank() {
        let p = sum_bidi();
        let s0 = bidi(&p, &A, 0, 0, 0);
        assert_eq!(p.step_n(&s0, 5).unwrap(), bidi(&p, &A, 5, 23, 23));
        assert_eq!(p.step_n(&s0, 0).unwrap(), s0);
        let done = p.step_n(&s0, 6).unwrap();
        assert_eq!(done.loc, Loc::Done);
        assert_eq!(p.step_n(&done, 7).unwrap(), done);

        assert_eq!(s0.rank(), 5);
        assert_eq!(bidi(&p, &[2, 9, 1, 4], 0, 0, 0).rank(), 4);
        let cmp = bench::program("strncmp");
        let two = cmp.state(Loc::Loop, &[("s1", vec![1]), ("s2", vec![1])], &[]);
        assert_eq!(two.rank(), 2);
    }
}
