//! Proof obligations: a small term language over integers, booleans and
//! integer sequences, queries built from it, and a reference evaluator.
//!
//! Sequence access is total: `Nth` outside `[0, len)` yields 0 and `Remove`
//! with an out-of-range position is the identity. Both SMT encodings
//! reproduce these conventions so that every backend agrees with
//! [`Query::eval`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::ir::{CmpOp, ElemSort};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sort {
    Int,
    Bool,
    Seq,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Int(i64),
    Bool(bool),
    /// A free variable, a definition, or a quantified variable.
    Var(String),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Neg(Box<Term>),
    Cmp(CmpOp, Box<Term>, Box<Term>),
    /// Equality at any sort.
    Eq(Box<Term>, Box<Term>),
    Not(Box<Term>),
    And(Vec<Term>),
    Or(Vec<Term>),
    Implies(Box<Term>, Box<Term>),
    Ite(Box<Term>, Box<Term>, Box<Term>),
    Len(Box<Term>),
    Nth(Box<Term>, Box<Term>),
    Remove(Box<Term>, Box<Term>),
    /// `forall var in [lo, hi) : body`.
    Forall {
        var: String,
        lo: Box<Term>,
        hi: Box<Term>,
        body: Box<Term>,
    },
}

/// Smart constructors that fold constants and flatten connectives.
impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn add(a: Term, b: Term) -> Term {
        match (&a, &b) {
            (Term::Int(x), Term::Int(y)) => Term::Int(x.wrapping_add(*y)),
            (_, Term::Int(0)) => a,
            (Term::Int(0), _) => b,
            _ => Term::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Term, b: Term) -> Term {
        match (&a, &b) {
            (Term::Int(x), Term::Int(y)) => Term::Int(x.wrapping_sub(*y)),
            (_, Term::Int(0)) => a,
            _ => Term::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn neg(a: Term) -> Term {
        match a {
            Term::Int(x) => Term::Int(x.wrapping_neg()),
            a => Term::Neg(Box::new(a)),
        }
    }

    pub fn cmp(op: CmpOp, a: Term, b: Term) -> Term {
        match (&a, &b) {
            (Term::Int(x), Term::Int(y)) => Term::Bool(op.eval(*x, *y)),
            _ => Term::Cmp(op, Box::new(a), Box::new(b)),
        }
    }

    pub fn eq(a: Term, b: Term) -> Term {
        if a == b {
            return Term::Bool(true);
        }
        match (&a, &b) {
            (Term::Int(x), Term::Int(y)) => Term::Bool(x == y),
            (Term::Bool(x), Term::Bool(y)) => Term::Bool(x == y),
            (Term::Bool(true), _) => b,
            (_, Term::Bool(true)) => a,
            (Term::Bool(false), _) => Term::not(b),
            (_, Term::Bool(false)) => Term::not(a),
            _ => Term::Eq(Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Term) -> Term {
        match a {
            Term::Bool(b) => Term::Bool(!b),
            Term::Not(x) => *x,
            a => Term::Not(Box::new(a)),
        }
    }

    pub fn and(items: impl IntoIterator<Item = Term>) -> Term {
        let mut out = Vec::new();
        for t in items {
            match t {
                Term::Bool(true) => {}
                Term::Bool(false) => return Term::Bool(false),
                Term::And(xs) => out.extend(xs),
                t => out.push(t),
            }
        }
        match out.len() {
            0 => Term::Bool(true),
            1 => out.pop().unwrap(),
            _ => Term::And(out),
        }
    }

    pub fn or(items: impl IntoIterator<Item = Term>) -> Term {
        let mut out = Vec::new();
        for t in items {
            match t {
                Term::Bool(false) => {}
                Term::Bool(true) => return Term::Bool(true),
                Term::Or(xs) => out.extend(xs),
                t => out.push(t),
            }
        }
        match out.len() {
            0 => Term::Bool(false),
            1 => out.pop().unwrap(),
            _ => Term::Or(out),
        }
    }

    pub fn implies(a: Term, b: Term) -> Term {
        match (&a, &b) {
            (Term::Bool(true), _) => b,
            (Term::Bool(false), _) | (_, Term::Bool(true)) => Term::Bool(true),
            (_, Term::Bool(false)) => Term::not(a),
            _ => Term::Implies(Box::new(a), Box::new(b)),
        }
    }

    pub fn ite(c: Term, t: Term, e: Term) -> Term {
        match c {
            Term::Bool(true) => t,
            Term::Bool(false) => e,
            _ if t == e => t,
            c => Term::Ite(Box::new(c), Box::new(t), Box::new(e)),
        }
    }

    pub fn len(s: Term) -> Term {
        Term::Len(Box::new(s))
    }

    pub fn nth(s: Term, i: Term) -> Term {
        Term::Nth(Box::new(s), Box::new(i))
    }

    pub fn remove(s: Term, p: Term) -> Term {
        Term::Remove(Box::new(s), Box::new(p))
    }

    pub fn forall(var: impl Into<String>, lo: Term, hi: Term, body: Term) -> Term {
        match body {
            Term::Bool(true) => Term::Bool(true),
            body => Term::Forall {
                var: var.into(),
                lo: Box::new(lo),
                hi: Box::new(hi),
                body: Box::new(body),
            },
        }
    }

    pub fn has_quantifier(&self) -> bool {
        let mut found = false;
        self.visit(&mut |t| found |= matches!(t, Term::Forall { .. }));
        found
    }

    /// Rebuilds the term bottom-up through the smart constructors. Where
    /// `f` returns a replacement, the subterm is not descended into.
    pub fn rewrite(&self, f: &mut impl FnMut(&Term) -> Option<Term>) -> Term {
        if let Some(t) = f(self) {
            return t;
        }
        let mut r = |t: &Term| t.rewrite(f);
        match self {
            Term::Int(_) | Term::Bool(_) | Term::Var(_) => self.clone(),
            Term::Add(a, b) => Term::add(r(a), r(b)),
            Term::Sub(a, b) => Term::sub(r(a), r(b)),
            Term::Neg(a) => Term::neg(r(a)),
            Term::Cmp(op, a, b) => Term::cmp(*op, r(a), r(b)),
            Term::Eq(a, b) => Term::eq(r(a), r(b)),
            Term::Not(a) => Term::not(r(a)),
            Term::And(xs) => Term::and(xs.iter().map(&mut r).collect::<Vec<_>>()),
            Term::Or(xs) => Term::or(xs.iter().map(&mut r).collect::<Vec<_>>()),
            Term::Implies(a, b) => Term::implies(r(a), r(b)),
            Term::Ite(c, t, e) => Term::ite(r(c), r(t), r(e)),
            Term::Len(a) => Term::len(r(a)),
            Term::Nth(a, b) => Term::nth(r(a), r(b)),
            Term::Remove(a, b) => Term::remove(r(a), r(b)),
            Term::Forall { var, lo, hi, body } => Term::forall(var.clone(), r(lo), r(hi), r(body)),
        }
    }

    /// Replaces the variable `name` by `with`. Bound names are unique
    /// per query, so no capture can occur.
    pub fn subst(&self, name: &str, with: &Term) -> Term {
        self.rewrite(&mut |t| match t {
            Term::Var(n) if n == name => Some(with.clone()),
            _ => None,
        })
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        match self {
            Term::Int(_) | Term::Bool(_) | Term::Var(_) => {}
            Term::Neg(a) | Term::Not(a) | Term::Len(a) => a.visit(f),
            Term::Add(a, b)
            | Term::Sub(a, b)
            | Term::Cmp(_, a, b)
            | Term::Eq(a, b)
            | Term::Implies(a, b)
            | Term::Nth(a, b)
            | Term::Remove(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Term::And(xs) | Term::Or(xs) => xs.iter().for_each(|x| x.visit(f)),
            Term::Ite(c, t, e) => {
                c.visit(f);
                t.visit(f);
                e.visit(f);
            }
            Term::Forall { lo, hi, body, .. } => {
                lo.visit(f);
                hi.visit(f);
                body.visit(f);
            }
        }
    }
}

/// How a free variable corresponds to a state component; drives the
/// enumeration domains of the exhaustive backend and model extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    /// An array of the given lockstep group.
    Array { group: usize, elem: ElemSort },
    Index,
    Data(ElemSort),
    Flag,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeVar {
    pub name: String,
    pub sort: Sort,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Def {
    pub name: String,
    pub sort: Sort,
    pub term: Term,
}

/// Which condition a query belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    InitialAnchor,
    FaultPreservation,
    Simulation,
    /// The squeezer condition is invariant along the first `N` steps.
    BranchLemma,
    /// The program takes the same branch in `σ` and in the squeezed state.
    SameBranch(ProgBranch),
    /// Simulation restricted to one program branch.
    SimUnder(ProgBranch),
    Bounds,
    RankDecrease,
    BaseSafety,
    BaseTermination,
}

/// Which of the three transition cases applies to a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProgBranch {
    /// Done or bad: the state loops on itself.
    Stutter,
    Iterate,
    Exit,
}

impl ProgBranch {
    pub const ALL: [ProgBranch; 3] = [ProgBranch::Stutter, ProgBranch::Iterate, ProgBranch::Exit];
}

/// Which part of the reachability over-approximation the state comes from.
/// The two-step image of a good loop state is split on the middle state:
/// [`Origin::TwoStep`] steps from a good middle state, and
/// [`Origin::BadStep`] is a bad middle state, which stutters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Origin {
    Init,
    InitStep,
    TwoStep,
    BadStep,
}

impl Origin {
    pub const ALL: [Origin; 4] = [Origin::Init, Origin::InitStep, Origin::TwoStep, Origin::BadStep];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryMeta {
    pub family: Family,
    /// Squeezer branch assumed by the query, if split.
    pub branch: Option<bool>,
    pub origin: Option<Origin>,
}

/// A validity check: for all values of `free`, `hyp` implies `goal`.
/// Definitions are in dependency order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub name: String,
    pub free: Vec<FreeVar>,
    pub defs: Vec<Def>,
    pub hyp: Term,
    pub goal: Term,
    pub meta: QueryMeta,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Seq(Rc<Vec<i64>>),
}

impl Value {
    pub fn as_int(&self) -> i64 {
        match self {
            Value::Int(v) => *v,
            Value::Bool(b) => *b as i64,
            Value::Seq(_) => panic!("sequence used as integer"),
        }
    }

    pub fn as_bool(&self) -> bool {
        match self {
            Value::Bool(b) => *b,
            v => panic!("{v} used as boolean"),
        }
    }

    pub fn as_seq(&self) -> &[i64] {
        match self {
            Value::Seq(s) => s,
            v => panic!("{v} used as sequence"),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Seq(s) => {
                let items: Vec<String> = s.iter().map(i64::to_string).collect();
                write!(f, "[{}]", items.join(","))
            }
        }
    }
}

/// An assignment to the free variables of a query.
pub type Model = BTreeMap<String, Value>;

#[derive(Debug, Clone)]
enum Node {
    Int(i64),
    Bool(bool),
    Free(usize),
    Def(usize),
    Bound(usize),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Neg(Box<Node>),
    Cmp(CmpOp, Box<Node>, Box<Node>),
    Eq(Box<Node>, Box<Node>),
    Not(Box<Node>),
    And(Vec<Node>),
    Or(Vec<Node>),
    Implies(Box<Node>, Box<Node>),
    Ite(Box<Node>, Box<Node>, Box<Node>),
    Len(Box<Node>),
    Nth(Box<Node>, Box<Node>),
    Remove(Box<Node>, Box<Node>),
    Forall(Box<Node>, Box<Node>, Box<Node>),
}

/// A query with names resolved, ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Compiled {
    free: Vec<String>,
    defs: Vec<Node>,
    hyp: Node,
    goal: Node,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnboundName(pub String);

impl fmt::Display for UnboundName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unbound name `{}`", self.0)
    }
}

struct Resolver<'a> {
    free: HashMap<&'a str, usize>,
    defs: HashMap<&'a str, usize>,
    bound: Vec<&'a str>,
}

impl<'a> Resolver<'a> {
    fn node(&mut self, t: &'a Term) -> Result<Node, UnboundName> {
        let b = |r: &mut Self, x: &'a Term| r.node(x).map(Box::new);
        Ok(match t {
            Term::Int(v) => Node::Int(*v),
            Term::Bool(v) => Node::Bool(*v),
            Term::Var(name) => {
                if let Some(d) = self.bound.iter().rposition(|b| b == name) {
                    Node::Bound(d)
                } else if let Some(&i) = self.defs.get(name.as_str()) {
                    Node::Def(i)
                } else if let Some(&i) = self.free.get(name.as_str()) {
                    Node::Free(i)
                } else {
                    return Err(UnboundName(name.clone()));
                }
            }
            Term::Add(x, y) => Node::Add(b(self, x)?, b(self, y)?),
            Term::Sub(x, y) => Node::Sub(b(self, x)?, b(self, y)?),
            Term::Neg(x) => Node::Neg(b(self, x)?),
            Term::Cmp(op, x, y) => Node::Cmp(*op, b(self, x)?, b(self, y)?),
            Term::Eq(x, y) => Node::Eq(b(self, x)?, b(self, y)?),
            Term::Not(x) => Node::Not(b(self, x)?),
            Term::And(xs) => Node::And(xs.iter().map(|x| self.node(x)).collect::<Result<_, _>>()?),
            Term::Or(xs) => Node::Or(xs.iter().map(|x| self.node(x)).collect::<Result<_, _>>()?),
            Term::Implies(x, y) => Node::Implies(b(self, x)?, b(self, y)?),
            Term::Ite(c, x, y) => Node::Ite(b(self, c)?, b(self, x)?, b(self, y)?),
            Term::Len(x) => Node::Len(b(self, x)?),
            Term::Nth(x, y) => Node::Nth(b(self, x)?, b(self, y)?),
            Term::Remove(x, y) => Node::Remove(b(self, x)?, b(self, y)?),
            Term::Forall { var, lo, hi, body } => {
                let lo = b(self, lo)?;
                let hi = b(self, hi)?;
                self.bound.push(var);
                let body = self.node(body);
                self.bound.pop();
                Node::Forall(lo, hi, Box::new(body?))
            }
        })
    }
}

impl Query {
    pub fn compile(&self) -> Result<Compiled, UnboundName> {
        let mut r = Resolver {
            free: self.free.iter().enumerate().map(|(i, v)| (v.name.as_str(), i)).collect(),
            defs: HashMap::new(),
            bound: Vec::new(),
        };
        let mut defs = Vec::with_capacity(self.defs.len());
        for (i, d) in self.defs.iter().enumerate() {
            defs.push(r.node(&d.term)?);
            r.defs.insert(d.name.as_str(), i);
        }
        Ok(Compiled {
            free: self.free.iter().map(|v| v.name.clone()).collect(),
            defs,
            hyp: r.node(&self.hyp)?,
            goal: r.node(&self.goal)?,
        })
    }

    pub fn has_quantifier(&self) -> bool {
        self.hyp.has_quantifier() || self.goal.has_quantifier() || self.defs.iter().any(|d| d.term.has_quantifier())
    }

    /// `(hyp, goal)` under `model`.
    ///
    /// # Panics
    /// If the query has unbound names or `model` misses a free variable.
    pub fn eval(&self, model: &Model) -> (bool, bool) {
        let c = self.compile().expect("well-scoped query");
        let vals: Vec<Value> = c
            .free
            .iter()
            .map(|n| model.get(n).cloned().unwrap_or_else(|| panic!("no value for `{n}`")))
            .collect();
        c.eval(&vals)
    }

    /// Whether `model` refutes the query.
    pub fn refuted_by(&self, model: &Model) -> bool {
        let (h, g) = self.eval(model);
        h && !g
    }
}

struct Env<'a> {
    c: &'a Compiled,
    free: &'a [Value],
    memo: Vec<Option<Value>>,
    bound: Vec<i64>,
}

impl Env<'_> {
    fn int(&mut self, n: &Node) -> i64 {
        self.eval(n).as_int()
    }

    fn bool(&mut self, n: &Node) -> bool {
        match n {
            Node::Bool(b) => *b,
            Node::Not(x) => !self.bool(x),
            Node::And(xs) => xs.iter().all(|x| self.bool(x)),
            Node::Or(xs) => xs.iter().any(|x| self.bool(x)),
            Node::Implies(x, y) => !self.bool(x) || self.bool(y),
            Node::Cmp(op, x, y) => {
                let (a, b) = (self.int(x), self.int(y));
                op.eval(a, b)
            }
            _ => self.eval(n).as_bool(),
        }
    }

    fn eval(&mut self, n: &Node) -> Value {
        match n {
            Node::Int(v) => Value::Int(*v),
            Node::Bool(_) | Node::Not(_) | Node::And(_) | Node::Or(_) | Node::Implies(..) | Node::Cmp(..) => {
                Value::Bool(self.bool(n))
            }
            Node::Free(i) => self.free[*i].clone(),
            Node::Def(i) => {
                if let Some(v) = &self.memo[*i] {
                    return v.clone();
                }
                let c = self.c;
                let v = self.eval(&c.defs[*i]);
                self.memo[*i] = Some(v.clone());
                v
            }
            Node::Bound(d) => Value::Int(self.bound[*d]),
            Node::Add(x, y) => Value::Int(self.int(x).wrapping_add(self.int(y))),
            Node::Sub(x, y) => Value::Int(self.int(x).wrapping_sub(self.int(y))),
            Node::Neg(x) => Value::Int(self.int(x).wrapping_neg()),
            Node::Eq(x, y) => {
                let (a, b) = (self.eval(x), self.eval(y));
                Value::Bool(a == b)
            }
            Node::Ite(c, x, y) => {
                if self.bool(c) {
                    self.eval(x)
                } else {
                    self.eval(y)
                }
            }
            Node::Len(x) => Value::Int(self.eval(x).as_seq().len() as i64),
            Node::Nth(x, y) => {
                let s = self.eval(x);
                let i = self.int(y);
                let s = s.as_seq();
                Value::Int(if i >= 0 && (i as usize) < s.len() { s[i as usize] } else { 0 })
            }
            Node::Remove(x, y) => {
                let s = self.eval(x);
                let p = self.int(y);
                let v = s.as_seq();
                if p >= 0 && (p as usize) < v.len() {
                    let mut out = v.to_vec();
                    out.remove(p as usize);
                    Value::Seq(Rc::new(out))
                } else {
                    s
                }
            }
            Node::Forall(lo, hi, body) => {
                let (lo, hi) = (self.int(lo), self.int(hi));
                let mut ok = true;
                for j in lo..hi {
                    self.bound.push(j);
                    let r = self.bool(body);
                    self.bound.pop();
                    if !r {
                        ok = false;
                        break;
                    }
                }
                Value::Bool(ok)
            }
        }
    }
}

impl Compiled {
    pub fn free_names(&self) -> &[String] {
        &self.free
    }

    /// `(hyp, goal)`; the goal is only evaluated when the hypothesis holds.
    pub fn eval(&self, free: &[Value]) -> (bool, bool) {
        let mut env = Env {
            c: self,
            free,
            memo: vec![None; self.defs.len()],
            bound: Vec::new(),
        };
        let h = env.bool(&self.hyp);
        if !h {
            return (false, true);
        }
        (true, env.bool(&self.goal))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[i64]) -> Value {
        Value::Seq(Rc::new(v.to_vec()))
    }

    fn query(hyp: Term, goal: Term, defs: Vec<Def>) -> Query {
        Query {
            name: "t".into(),
            free: vec![
                FreeVar {
                    name: "a".into(),
                    sort: Sort::Seq,
                    role: Role::Array {
                        group: 0,
                        elem: ElemSort::Int,
                    },
                },
                FreeVar {
                    name: "p".into(),
                    sort: Sort::Int,
                    role: Role::Index,
                },
            ],
            defs,
            hyp,
            goal,
            meta: QueryMeta {
                family: Family::Bounds,
                branch: None,
                origin: None,
            },
        }
    }

    #[test]
    fn total_sequence_operations() {
        let a = Term::var("a");
        let p = Term::var("p");
        let defs = vec![Def {
            name: "b".into(),
            sort: Sort::Seq,
            term: Term::remove(a.clone(), p.clone()),
        }];
        let goal = Term::and([
            Term::eq(Term::nth(Term::var("b"), Term::Int(0)), Term::Int(2)),
            Term::eq(Term::len(Term::var("b")), Term::Int(2)),
        ]);
        let q = query(Term::Bool(true), goal, defs);
        let mut m = Model::new();
        m.insert("a".into(), seq(&[1, 2, 3]));
        m.insert("p".into(), Value::Int(0));
        assert_eq!(q.eval(&m), (true, true));
        m.insert("p".into(), Value::Int(3));
        // out of range removal is the identity
        assert_eq!(q.eval(&m), (true, false));
        let oob = query(Term::Bool(true), Term::eq(Term::nth(Term::var("a"), Term::Int(7)), Term::Int(0)), vec![]);
        assert_eq!(oob.eval(&m), (true, true));
    }

    #[test]
    fn quantifiers_and_smart_constructors() {
        let body = Term::cmp(CmpOp::Gt, Term::nth(Term::var("a"), Term::var("j")), Term::Int(0));
        let all_pos = Term::forall("j", Term::Int(0), Term::len(Term::var("a")), body);
        let q = query(Term::Bool(true), all_pos, vec![]);
        let mut m = Model::new();
        m.insert("a".into(), seq(&[1, 2]));
        m.insert("p".into(), Value::Int(0));
        assert!(q.eval(&m).1);
        m.insert("a".into(), seq(&[1, -2]));
        assert!(!q.eval(&m).1);
        assert!(q.has_quantifier());

        assert_eq!(Term::and([Term::Bool(true), Term::var("x")]), Term::var("x"));
        assert_eq!(Term::or([Term::var("x"), Term::Bool(true)]), Term::Bool(true));
        assert_eq!(Term::add(Term::Int(2), Term::Int(3)), Term::Int(5));
        assert_eq!(Term::not(Term::not(Term::var("x"))), Term::var("x"));
    }

    #[test]
    fn unbound_names_are_reported() {
        let q = query(Term::Bool(true), Term::var("zzz"), vec![]);
        assert_eq!(q.compile().unwrap_err(), UnboundName("zzz".into()));
    }
}
