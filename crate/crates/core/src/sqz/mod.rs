//! Squeezers: single-`if` functions that remove one element from every
//! array of a lockstep group and patch up scalars.

mod syntax;

use std::collections::HashMap;
use std::fmt;

use crate::ir::{ArrayId, CmpOp, EvalError, Expr, Pred, Program, State, VarClass, VarId};

pub use syntax::{parse_cond, parse_index, parse_squeezer, render_cond, render_squeezer};

/// Operand of `n - _`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Offset {
    Const(i64),
    Var(VarId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IndexExprS {
    Const(i64),
    Var(VarId),
    /// `len - offset`, where `len` is the length of the array being indexed
    /// (or of the squeezed group, for removal positions).
    LenMinus(Offset),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operand {
    Elem(ArrayId, IndexExprS),
    Var(VarId),
    Const(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub lhs: Operand,
    pub op: CmpOp,
    pub rhs: Operand,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CondS {
    Atom(Atom),
    And(Box<CondS>, Box<CondS>),
    Or(Box<CondS>, Box<CondS>),
}

impl CondS {
    pub fn depth(&self) -> usize {
        match self {
            CondS::Atom(_) => 1,
            CondS::And(a, b) | CondS::Or(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        match self {
            CondS::Atom(a) => vec![a],
            CondS::And(a, b) | CondS::Or(a, b) => {
                let mut v = a.atoms();
                v.extend(b.atoms());
                v
            }
        }
    }
}

/// `target = source ± arr[idx]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AssignS {
    pub target: VarId,
    pub source: VarId,
    pub subtract: bool,
    pub array: ArrayId,
    pub index: IndexExprS,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Branch {
    pub pos: IndexExprS,
    pub assigns: Vec<AssignS>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Squeezer {
    pub group: usize,
    pub cond: CondS,
    pub then_branch: Branch,
    pub else_branch: Branch,
    /// B: states of rank at most B are left unchanged.
    pub base_bound: usize,
}

impl Squeezer {
    pub fn branch(&self, then: bool) -> &Branch {
        if then {
            &self.then_branch
        } else {
            &self.else_branch
        }
    }
}

/// Error raised while evaluating a squeezer.
pub type SqzError = EvalError;

fn group_len(p: &Program, st: &State, group: usize) -> usize {
    p.arrays
        .iter()
        .position(|a| a.group == group)
        .map_or(0, |i| st.arrays[i].len())
}

pub fn eval_index(st: &State, e: IndexExprS, len: usize) -> i64 {
    match e {
        IndexExprS::Const(c) => c,
        IndexExprS::Var(v) => st.scalars[v.0],
        IndexExprS::LenMinus(Offset::Const(c)) => len as i64 - c,
        IndexExprS::LenMinus(Offset::Var(v)) => len as i64 - st.scalars[v.0],
    }
}

pub fn read_elem(p: &Program, st: &State, a: ArrayId, idx: IndexExprS) -> Result<i64, SqzError> {
    let arr = &st.arrays[a.0];
    let i = eval_index(st, idx, arr.len());
    if i < 0 || i as usize >= arr.len() {
        return Err(EvalError::OutOfBounds {
            array: p.arrays[a.0].name.clone(),
            index: i,
            len: arr.len(),
        });
    }
    Ok(arr[i as usize])
}

fn operand(p: &Program, st: &State, o: Operand) -> Result<i64, SqzError> {
    match o {
        Operand::Elem(a, i) => read_elem(p, st, a, i),
        Operand::Var(v) => Ok(st.scalars[v.0]),
        Operand::Const(c) => Ok(c),
    }
}

/// Evaluates a condition without short-circuiting, so every read must be in
/// bounds.
pub fn eval_cond(p: &Program, st: &State, c: &CondS) -> Result<bool, SqzError> {
    Ok(match c {
        CondS::Atom(a) => a.op.eval(operand(p, st, a.lhs)?, operand(p, st, a.rhs)?),
        CondS::And(x, y) => {
            let (x, y) = (eval_cond(p, st, x)?, eval_cond(p, st, y)?);
            x && y
        }
        CondS::Or(x, y) => {
            let (x, y) = (eval_cond(p, st, x)?, eval_cond(p, st, y)?);
            x || y
        }
    })
}

/// Deletes position `pos` from every array of `group` and decrements the
/// index variables above `pos`.
pub fn remove_at(p: &Program, st: &State, group: usize, pos: i64) -> Result<State, SqzError> {
    let len = group_len(p, st, group);
    if pos < 0 || pos as usize >= len {
        let name = p
            .arrays
            .iter()
            .find(|a| a.group == group)
            .map_or_else(|| format!("group {group}"), |a| a.name.clone());
        return Err(EvalError::OutOfBounds {
            array: name,
            index: pos,
            len,
        });
    }
    let mut out = st.clone();
    for (decl, arr) in p.arrays.iter().zip(out.arrays.iter_mut()) {
        if decl.group == group {
            arr.remove(pos as usize);
        }
    }
    for v in p.index_vars() {
        if out.scalars[v.0] > pos {
            out.scalars[v.0] -= 1;
        }
    }
    Ok(out)
}

/// Applies the squeezer. All branch expressions are evaluated over the
/// pre-state; the assignments are written after the removal.
pub fn apply(q: &Squeezer, p: &Program, st: &State) -> Result<State, SqzError> {
    if st.rank() <= q.base_bound {
        return Ok(st.clone());
    }
    let br = q.branch(eval_cond(p, st, &q.cond)?);
    let pos = eval_index(st, br.pos, group_len(p, st, q.group));
    let mut writes = Vec::with_capacity(br.assigns.len());
    for a in &br.assigns {
        let e = read_elem(p, st, a.array, a.index)?;
        let s = st.scalars[a.source.0];
        writes.push((a.target, if a.subtract { s.wrapping_sub(e) } else { s.wrapping_add(e) }));
    }
    let mut out = remove_at(p, st, q.group, pos)?;
    for (v, val) in writes {
        out.scalars[v.0] = val;
    }
    Ok(out)
}

/// Statically known bounds on an index variable, relative to constants and
/// to the length of the squeezed group.
#[derive(Debug, Clone, Copy, Default)]
struct VarBounds {
    lo: i64,
    /// `v <= c`
    hi_const: Option<i64>,
    /// `v <= len + k`
    hi_len: Option<i64>,
}

impl VarBounds {
    fn meet(&mut self, other: VarBounds) {
        self.lo = self.lo.max(other.lo);
        self.hi_const = min_opt(self.hi_const, other.hi_const);
        self.hi_len = min_opt(self.hi_len, other.hi_len);
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// `expr` as `len(group) + k` or as a constant.
enum Lin {
    Const(i64),
    LenPlus(i64),
}

fn linear(p: &Program, e: &Expr, group: usize) -> Option<Lin> {
    match e {
        Expr::Const(c) => Some(Lin::Const(*c)),
        Expr::Len(a) if p.array(*a).group == group => Some(Lin::LenPlus(0)),
        Expr::Add(x, y) => match (linear(p, x, group)?, linear(p, y, group)?) {
            (Lin::Const(a), Lin::Const(b)) => Some(Lin::Const(a + b)),
            (Lin::LenPlus(a), Lin::Const(b)) | (Lin::Const(b), Lin::LenPlus(a)) => Some(Lin::LenPlus(a + b)),
            _ => None,
        },
        Expr::Sub(x, y) => match (linear(p, x, group)?, linear(p, y, group)?) {
            (Lin::Const(a), Lin::Const(b)) => Some(Lin::Const(a - b)),
            (Lin::LenPlus(a), Lin::Const(b)) => Some(Lin::LenPlus(a - b)),
            _ => None,
        },
        _ => None,
    }
}

struct Facts {
    vars: HashMap<VarId, VarBounds>,
}

impl Facts {
    fn bounds(&self, v: VarId) -> VarBounds {
        self.vars.get(&v).copied().unwrap_or_default()
    }

    /// Records `v op rhs` where rhs is linear in the group length.
    fn add(&mut self, v: VarId, op: CmpOp, rhs: Lin) {
        let mut b = VarBounds::default();
        match (op, rhs) {
            (CmpOp::Eq, Lin::Const(c)) => {
                b.lo = c;
                b.hi_const = Some(c);
            }
            (CmpOp::Eq, Lin::LenPlus(k)) => b.hi_len = Some(k),
            (CmpOp::Le, Lin::Const(c)) => b.hi_const = Some(c),
            (CmpOp::Lt, Lin::Const(c)) => b.hi_const = Some(c - 1),
            (CmpOp::Le, Lin::LenPlus(k)) => b.hi_len = Some(k),
            (CmpOp::Lt, Lin::LenPlus(k)) => b.hi_len = Some(k - 1),
            (CmpOp::Ge, Lin::Const(c)) => b.lo = c,
            (CmpOp::Gt, Lin::Const(c)) => b.lo = c + 1,
            // index variables are non-negative
            (CmpOp::Ne, Lin::Const(0)) => b.lo = 1,
            _ => return,
        }
        self.vars.entry(v).or_default().meet(b);
    }

    fn add_pred(&mut self, p: &Program, pred: &Pred, group: usize) {
        match pred {
            Pred::And(ps) => ps.iter().for_each(|q| self.add_pred(p, q, group)),
            Pred::Cmp(op, Expr::Var(v), rhs) => {
                if let Some(l) = linear(p, rhs, group) {
                    self.add(*v, *op, l);
                }
            }
            Pred::Cmp(op, lhs, Expr::Var(v)) => {
                if let Some(l) = linear(p, lhs, group) {
                    self.add(*v, flip(*op), l);
                }
            }
            _ => {}
        }
    }

    fn add_atom(&mut self, a: &Atom, negate: bool) {
        let op = if negate { a.op.negate() } else { a.op };
        match (a.lhs, a.rhs) {
            (Operand::Var(v), Operand::Const(c)) => self.add(v, op, Lin::Const(c)),
            (Operand::Const(c), Operand::Var(v)) => self.add(v, flip(op), Lin::Const(c)),
            _ => {}
        }
    }
}

fn flip(op: CmpOp) -> CmpOp {
    match op {
        CmpOp::Le => CmpOp::Ge,
        CmpOp::Ge => CmpOp::Le,
        CmpOp::Lt => CmpOp::Gt,
        CmpOp::Gt => CmpOp::Lt,
        o => o,
    }
}

/// Atoms that hold whenever `c` (or its negation) holds.
fn implied_atoms(c: &CondS, negate: bool, out: &mut Vec<(Atom, bool)>) {
    match (c, negate) {
        (CondS::Atom(a), n) => out.push((*a, n)),
        (CondS::And(x, y), false) | (CondS::Or(x, y), true) => {
            implied_atoms(x, negate, out);
            implied_atoms(y, negate, out);
        }
        _ => {}
    }
}

/// Why a squeezer is not well formed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IllFormed(pub String);

impl fmt::Display for IllFormed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Checks that every index expression is in bounds on every non-base state
/// satisfying the program's assumptions. Constant indices are judged
/// against the minimal non-base length `floor(B/g) + 1`; variable indices
/// need bounds derived from the top-level assumptions and, within a branch,
/// from the atoms the branch condition implies.
pub fn well_formed(q: &Squeezer, p: &Program) -> Result<(), IllFormed> {
    let members = p.group_arrays(q.group);
    if members.is_empty() {
        return Err(IllFormed(format!("group {} has no arrays", q.group)));
    }
    let m = (q.base_bound / members.len()) as i64 + 1;
    let mut base = Facts { vars: HashMap::new() };
    for a in &p.assumptions {
        base.add_pred(p, a, q.group);
    }
    let check = |facts: &Facts, idx: IndexExprS, what: &str| -> Result<(), IllFormed> {
        let ok = match idx {
            IndexExprS::Const(c) => (0..m).contains(&c),
            IndexExprS::LenMinus(Offset::Const(c)) => (1..=m).contains(&c),
            IndexExprS::Var(v) => {
                let b = facts.bounds(v);
                b.lo >= 0 && (b.hi_len.is_some_and(|k| k <= -1) || b.hi_const.is_some_and(|c| c < m))
            }
            IndexExprS::LenMinus(Offset::Var(v)) => {
                let b = facts.bounds(v);
                b.lo >= 1 && b.hi_len.is_some_and(|k| k <= 0)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(IllFormed(format!("{what} index {} may be out of bounds", show_index(p, idx))))
        }
    };
    for atom in q.cond.atoms() {
        for o in [atom.lhs, atom.rhs] {
            match o {
                Operand::Elem(a, i) => {
                    if p.array(a).group != q.group {
                        return Err(IllFormed(format!("`{}` is not in the squeezed group", p.array(a).name)));
                    }
                    check(&base, i, "condition")?;
                }
                Operand::Var(v) if atom_is_index(p, atom) != (p.scalar(v).class == VarClass::Index) => {
                    return Err(IllFormed(format!("`{}` mixes index and data operands", p.scalar(v).name)));
                }
                _ => {}
            }
        }
    }
    for then in [true, false] {
        let br = q.branch(then);
        let mut implied = Vec::new();
        implied_atoms(&q.cond, !then, &mut implied);
        let mut facts = Facts { vars: base.vars.clone() };
        for (a, neg) in &implied {
            facts.add_atom(a, *neg);
        }
        check(&facts, br.pos, "removal")?;
        for a in &br.assigns {
            if p.array(a.array).group != q.group {
                return Err(IllFormed(format!("`{}` is not in the squeezed group", p.array(a.array).name)));
            }
            check(&facts, a.index, "assignment")?;
        }
    }
    Ok(())
}

fn atom_is_index(p: &Program, a: &Atom) -> bool {
    matches!(a.lhs, Operand::Var(v) if p.scalar(v).class == VarClass::Index)
        || (matches!(a.lhs, Operand::Const(_)) && matches!(a.rhs, Operand::Var(v) if p.scalar(v).class == VarClass::Index))
}

pub(crate) fn show_index(p: &Program, e: IndexExprS) -> String {
    match e {
        IndexExprS::Const(c) => c.to_string(),
        IndexExprS::Var(v) => p.scalar(v).name.clone(),
        IndexExprS::LenMinus(Offset::Const(c)) => format!("n-{c}"),
        IndexExprS::LenMinus(Offset::Var(v)) => format!("n-{}", p.scalar(v).name),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench;
    use crate::ir::Loc;

    fn bidi(p: &Program, a: &[i64], i: i64, l: i64, r: i64) -> State {
        p.state(Loc::Loop, &[("a", a.to_vec())], &[("i", i), ("l", l), ("r", r)])
    }

    #[test]
    fn remove_adjusts_index_vars() {
        let p = bench::program("sum_bidi");
        let st = bidi(&p, &[7, 2, 9, 1, 4], 2, 9, 5);
        assert_eq!(remove_at(&p, &st, 0, 0).unwrap(), bidi(&p, &[2, 9, 1, 4], 1, 9, 5));
        let st0 = bidi(&p, &[7, 2, 9, 1, 4], 0, 0, 0);
        assert_eq!(remove_at(&p, &st0, 0, 0).unwrap().scalars[0], 0);
        assert!(remove_at(&p, &bidi(&p, &[], 0, 0, 0), 0, 0).is_err());
    }

    #[test]
    fn sum_bidi_apply() {
        let p = bench::program("sum_bidi");
        let mut q = bench::published_squeezer(&p, "sum_bidi");
        let st = bidi(&p, &[7, 2, 9, 1, 4], 2, 9, 5);
        assert_eq!(apply(&q, &p, &st).unwrap(), bidi(&p, &[2, 9, 1, 4], 1, 2, 4));
        let empty = bidi(&p, &[], 0, 0, 0);
        assert_eq!(apply(&q, &p, &empty).unwrap(), empty);
        q.base_bound = 0;
        let bad = bidi(&p, &[5, 3], 2, 5, 3);
        assert_eq!(apply(&q, &p, &bad).unwrap(), bidi(&p, &[3], 1, 0, -2));
    }

    #[test]
    fn well_formedness() {
        let p = bench::program("is_sorted");
        let mut q = bench::published_squeezer(&p, "is_sorted");
        q.base_bound = 4;
        assert!(well_formed(&q, &p).is_ok());
        q.base_bound = 2;
        assert!(well_formed(&q, &p).is_err());

        let bidi = bench::program("sum_bidi");
        let mut z = parse_squeezer("if (i > 0) remove(a,0) else remove(a,0)", &bidi, 0).unwrap();
        assert!(well_formed(&z, &bidi).is_ok());
        z = parse_squeezer("if (i > 0) remove(a,i) else remove(a,0)", &bidi, 0).unwrap();
        assert!(well_formed(&z, &bidi).is_err());
        z = parse_squeezer("if (i == 0) remove(a,0) else remove(a,n-i)", &bidi, 0).unwrap();
        assert!(well_formed(&z, &bidi).is_ok());
        z = parse_squeezer("if (i > 0) remove(a,0) else remove(a,n-i)", &bidi, 0).unwrap();
        assert!(well_formed(&z, &bidi).is_err());
    }
}
