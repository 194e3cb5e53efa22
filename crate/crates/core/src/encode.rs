//! Symbolic encoding of program states, transitions and squeezers as
//! [`Term`]s.
//!
//! Every intermediate scalar, flag and sequence is bound to a named
//! definition, so unrolling a few transitions keeps the query linear in
//! size.

use std::collections::HashMap;

use crate::ir::{ElemSort, Expr, Pred, Program, Stmt, VarClass, VarId};
use crate::logic::{Def, FreeVar, Query, QueryMeta, Role, Sort, Term};
use crate::sqz::{AssignS, CondS, IndexExprS, Offset, Operand, Squeezer};

/// A symbolic state. `done` is boolean, arrays are sequences.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sym {
    pub done: Term,
    pub arrays: Vec<Term>,
    pub scalars: Vec<Term>,
}

/// Accumulates free variables and definitions for one query.
pub struct Builder<'a> {
    pub p: &'a Program,
    free: Vec<FreeVar>,
    defs: Vec<Def>,
    counter: usize,
    /// Names of all root array variables.
    pub root_arrays: Vec<String>,
    goods: HashMap<Sym, Term>,
    conds: HashMap<(*const CondS, Sym), Term>,
}

impl<'a> Builder<'a> {
    pub fn new(p: &'a Program) -> Self {
        Builder {
            p,
            free: Vec::new(),
            defs: Vec::new(),
            counter: 0,
            root_arrays: Vec::new(),
            goods: HashMap::new(),
            conds: HashMap::new(),
        }
    }

    fn fresh(&mut self, hint: &str) -> String {
        self.counter += 1;
        format!("t{}_{}", self.counter, hint)
    }

    /// Binds `term` to a new definition unless it is already atomic.
    pub fn def(&mut self, hint: &str, sort: Sort, term: Term) -> Term {
        if matches!(term, Term::Var(_) | Term::Int(_) | Term::Bool(_)) {
            return term;
        }
        let name = self.fresh(hint);
        self.defs.push(Def {
            name: name.clone(),
            sort,
            term,
        });
        Term::Var(name)
    }

    pub fn declare(&mut self, name: String, sort: Sort, role: Role) -> Term {
        self.free.push(FreeVar {
            name: name.clone(),
            sort,
            role,
        });
        Term::Var(name)
    }

    /// A fresh root state at the loop head. With `initial`, initialized
    /// scalars take their initial values. Returns the state and its
    /// domain constraints (lockstep lengths, non-negative indices, char
    /// ranges).
    pub fn root(&mut self, prefix: &str, initial: bool) -> (Sym, Term) {
        let p = self.p;
        let mut facts = Vec::new();
        let arrays: Vec<Term> = p
            .arrays
            .iter()
            .map(|a| {
                let name = format!("{prefix}_{}", a.name);
                self.root_arrays.push(name.clone());
                self.declare(
                    name,
                    Sort::Seq,
                    Role::Array {
                        group: a.group,
                        elem: a.sort,
                    },
                )
            })
            .collect();
        for g in 0..p.num_groups() {
            let members = p.group_arrays(g);
            for w in members.windows(2) {
                facts.push(Term::eq(
                    Term::len(arrays[w[0].0].clone()),
                    Term::len(arrays[w[1].0].clone()),
                ));
            }
        }
        let mut scalars = Vec::new();
        for (s, init) in p.scalars.iter().zip(&p.init) {
            if let (true, Some(c)) = (initial, init) {
                scalars.push(Term::Int(*c));
                continue;
            }
            let name = format!("{prefix}_{}", s.name);
            let (role, fact) = match s.class {
                VarClass::Index => (Role::Index, Some((0, None))),
                VarClass::Data(ElemSort::Char) => (Role::Data(ElemSort::Char), Some((0, Some(255)))),
                VarClass::Data(ElemSort::Int) => (Role::Data(ElemSort::Int), None),
            };
            let v = self.declare(name, Sort::Int, role);
            if let Some((lo, hi)) = fact {
                facts.push(Term::cmp(crate::ir::CmpOp::Ge, v.clone(), Term::Int(lo)));
                if let Some(hi) = hi {
                    facts.push(Term::cmp(crate::ir::CmpOp::Le, v.clone(), Term::Int(hi)));
                }
            }
            scalars.push(v);
        }
        let st = Sym {
            done: Term::Bool(false),
            arrays,
            scalars,
        };
        (st, Term::and(facts))
    }

    pub fn expr(&mut self, st: &Sym, e: &Expr, bound: &[String]) -> Term {
        match e {
            Expr::Const(c) => Term::Int(*c),
            Expr::Var(v) => st.scalars[v.0].clone(),
            Expr::Bound(d) => Term::Var(bound[*d].clone()),
            Expr::Len(a) => Term::len(st.arrays[a.0].clone()),
            Expr::Read(a, i) => {
                let i = self.expr(st, i, bound);
                Term::nth(st.arrays[a.0].clone(), i)
            }
            Expr::Add(x, y) => {
                let x = self.expr(st, x, bound);
                Term::add(x, self.expr(st, y, bound))
            }
            Expr::Sub(x, y) => {
                let x = self.expr(st, x, bound);
                Term::sub(x, self.expr(st, y, bound))
            }
            Expr::Neg(x) => Term::neg(self.expr(st, x, bound)),
        }
    }

    pub fn pred(&mut self, st: &Sym, p: &Pred) -> Term {
        self.pred_in(st, p, &mut Vec::new())
    }

    fn pred_in(&mut self, st: &Sym, p: &Pred, bound: &mut Vec<String>) -> Term {
        match p {
            Pred::Bool(b) => Term::Bool(*b),
            Pred::Done => st.done.clone(),
            Pred::Cmp(op, a, b) => {
                let a = self.expr(st, a, bound);
                Term::cmp(*op, a, self.expr(st, b, bound))
            }
            Pred::Not(q) => Term::not(self.pred_in(st, q, bound)),
            Pred::And(qs) => {
                let items: Vec<Term> = qs.iter().map(|q| self.pred_in(st, q, bound)).collect();
                Term::and(items)
            }
            Pred::Or(qs) => {
                let items: Vec<Term> = qs.iter().map(|q| self.pred_in(st, q, bound)).collect();
                Term::or(items)
            }
            Pred::Implies(a, b) => {
                let a = self.pred_in(st, a, bound);
                Term::implies(a, self.pred_in(st, b, bound))
            }
            Pred::Forall { lo, hi, body } => {
                let lo = self.expr(st, lo, bound);
                let hi = self.expr(st, hi, bound);
                let var = self.fresh("j");
                bound.push(var.clone());
                let body = self.pred_in(st, body, bound);
                bound.pop();
                Term::forall(var, lo, hi, body)
            }
        }
    }

    pub fn assumptions(&mut self, st: &Sym) -> Term {
        let items: Vec<Term> = self.p.assumptions.iter().map(|a| self.pred(st, a)).collect();
        Term::and(items)
    }

    pub fn good(&mut self, st: &Sym) -> Term {
        if let Some(t) = self.goods.get(st) {
            return t.clone();
        }
        let spec = self.pred(st, &self.p.spec);
        let t = self.def("good", Sort::Bool, spec);
        self.goods.insert(st.clone(), t.clone());
        t
    }

    /// `Init`: at the loop head, initialized scalars at their initial
    /// values, assumptions hold.
    pub fn initial(&mut self, st: &Sym) -> Term {
        let mut items = vec![Term::not(st.done.clone())];
        for (v, init) in st.scalars.iter().zip(&self.p.init) {
            if let Some(c) = init {
                items.push(Term::eq(v.clone(), Term::Int(*c)));
            }
        }
        items.push(self.assumptions(st));
        Term::and(items)
    }

    /// Whether the state stutters (Done or bad).
    pub fn stays(&mut self, st: &Sym) -> Term {
        let good = self.good(st);
        let t = Term::or([st.done.clone(), Term::not(good)]);
        self.def("stay", Sort::Bool, t)
    }

    fn exec(&mut self, stmts: &[Stmt], st: &Sym, cur: &mut Vec<Term>, ret: &mut Term) {
        for s in stmts {
            match s {
                Stmt::Assign(v, e) => {
                    let now = Sym {
                        done: st.done.clone(),
                        arrays: st.arrays.clone(),
                        scalars: cur.clone(),
                    };
                    let val = self.expr(&now, e, &[]);
                    let t = Term::ite(ret.clone(), cur[v.0].clone(), val);
                    cur[v.0] = self.def(&self.p.scalars[v.0].name.clone(), Sort::Int, t);
                }
                Stmt::If(c, t, e) => {
                    let now = Sym {
                        done: st.done.clone(),
                        arrays: st.arrays.clone(),
                        scalars: cur.clone(),
                    };
                    let c = self.pred(&now, c);
                    let c = self.def("c", Sort::Bool, c);
                    let (mut tc, mut tr) = (cur.clone(), ret.clone());
                    self.exec(t, st, &mut tc, &mut tr);
                    let (mut ec, mut er) = (cur.clone(), ret.clone());
                    self.exec(e, st, &mut ec, &mut er);
                    for (i, (a, b)) in tc.into_iter().zip(ec).enumerate() {
                        let merged = Term::ite(c.clone(), a, b);
                        if merged != cur[i] {
                            let name = self.p.scalars[i].name.clone();
                            cur[i] = self.def(&name, Sort::Int, merged);
                        }
                    }
                    let r = Term::ite(c, tr, er);
                    *ret = self.def("ret", Sort::Bool, r);
                }
                Stmt::Return(val) => {
                    if let (Some(e), Some(r)) = (val, self.p.ret) {
                        let now = Sym {
                            done: st.done.clone(),
                            arrays: st.arrays.clone(),
                            scalars: cur.clone(),
                        };
                        let v = self.expr(&now, e, &[]);
                        let t = Term::ite(ret.clone(), cur[r.0].clone(), v);
                        cur[r.0] = self.def("retval", Sort::Int, t);
                    }
                    *ret = Term::Bool(true);
                }
            }
        }
    }

    /// One transition of the recidivist system.
    pub fn step(&mut self, st: &Sym) -> Sym {
        let stay = self.stays(st);
        self.step_from(st, stay)
    }

    /// One transition from a state already known to be good, so only
    /// Done stutters. Keeps the spec out of the transition formula.
    pub fn step_good(&mut self, st: &Sym) -> Sym {
        self.step_from(st, st.done.clone())
    }

    fn step_from(&mut self, st: &Sym, stay: Term) -> Sym {
        let guard = self.pred(st, &self.p.guard);
        let g = self.def("guard", Sort::Bool, guard);
        let mut body = st.scalars.clone();
        let mut returned = Term::Bool(false);
        self.exec(&self.p.body, st, &mut body, &mut returned);
        let mut exit = st.scalars.clone();
        let mut unused = Term::Bool(false);
        self.exec(&self.p.exit, st, &mut exit, &mut unused);
        let done_t = Term::ite(stay.clone(), st.done.clone(), Term::ite(g.clone(), returned.clone(), Term::Bool(true)));
        let done = self.def("done", Sort::Bool, done_t);
        let mut scalars = Vec::with_capacity(st.scalars.len());
        for i in 0..st.scalars.len() {
            let observed = self.p.observed[i];
            let clear = |t: Term| if observed { t } else { Term::Int(0) };
            let t = Term::ite(
                stay.clone(),
                st.scalars[i].clone(),
                Term::ite(
                    g.clone(),
                    Term::ite(returned.clone(), clear(body[i].clone()), body[i].clone()),
                    clear(exit[i].clone()),
                ),
            );
            let name = self.p.scalars[i].name.clone();
            scalars.push(self.def(&name, Sort::Int, t));
        }
        Sym {
            done,
            arrays: st.arrays.clone(),
            scalars,
        }
    }

    pub fn steps(&mut self, st: &Sym, n: usize) -> Vec<Sym> {
        let mut out = vec![st.clone()];
        for _ in 0..n {
            let next = self.step(out.last().unwrap());
            out.push(next);
        }
        out
    }

    pub fn rank(&self, st: &Sym) -> Term {
        st.arrays
            .iter()
            .fold(Term::Int(0), |acc, a| Term::add(acc, Term::len(a.clone())))
    }

    pub fn is_base(&self, q: &Squeezer, st: &Sym) -> Term {
        Term::cmp(crate::ir::CmpOp::Le, self.rank(st), Term::Int(q.base_bound as i64))
    }

    fn group_len(&self, q: &Squeezer, st: &Sym) -> Term {
        let first = self.p.group_arrays(q.group)[0];
        Term::len(st.arrays[first.0].clone())
    }

    fn index(&self, st: &Sym, e: IndexExprS, len: Term) -> Term {
        match e {
            IndexExprS::Const(c) => Term::Int(c),
            IndexExprS::Var(v) => st.scalars[v.0].clone(),
            IndexExprS::LenMinus(Offset::Const(c)) => Term::sub(len, Term::Int(c)),
            IndexExprS::LenMinus(Offset::Var(v)) => Term::sub(len, st.scalars[v.0].clone()),
        }
    }

    fn operand(&self, st: &Sym, o: Operand) -> Term {
        match o {
            Operand::Elem(a, i) => {
                let arr = st.arrays[a.0].clone();
                let idx = self.index(st, i, Term::len(arr.clone()));
                Term::nth(arr, idx)
            }
            Operand::Var(v) => st.scalars[v.0].clone(),
            Operand::Const(c) => Term::Int(c),
        }
    }

    pub fn cond(&mut self, c: &CondS, st: &Sym) -> Term {
        let key = (c as *const CondS, st.clone());
        if let Some(t) = self.conds.get(&key) {
            return t.clone();
        }
        let t = self.cond_term(c, st);
        let t = self.def("cond", Sort::Bool, t);
        self.conds.insert(key, t.clone());
        t
    }

    fn cond_term(&self, c: &CondS, st: &Sym) -> Term {
        match c {
            CondS::Atom(a) => Term::cmp(a.op, self.operand(st, a.lhs), self.operand(st, a.rhs)),
            CondS::And(x, y) => Term::and([self.cond_term(x, st), self.cond_term(y, st)]),
            CondS::Or(x, y) => Term::or([self.cond_term(x, st), self.cond_term(y, st)]),
        }
    }

    /// The squeezer's `then` (or `else`) branch applied unconditionally.
    pub fn apply_branch(&mut self, q: &Squeezer, st: &Sym, then: bool) -> Sym {
        let br = q.branch(then);
        let len = self.group_len(q, st);
        let pos = self.index(st, br.pos, len);
        let pos = self.def("pos", Sort::Int, pos);
        let writes: Vec<(VarId, Term)> = br
            .assigns
            .iter()
            .map(|a: &AssignS| {
                let arr = st.arrays[a.array.0].clone();
                let idx = self.index(st, a.index, Term::len(arr.clone()));
                let e = Term::nth(arr, idx);
                let s = st.scalars[a.source.0].clone();
                (a.target, if a.subtract { Term::sub(s, e) } else { Term::add(s, e) })
            })
            .collect();
        let mut out = st.clone();
        for (i, decl) in self.p.arrays.iter().enumerate() {
            if decl.group == q.group {
                let t = Term::remove(st.arrays[i].clone(), pos.clone());
                out.arrays[i] = self.def(&decl.name.clone(), Sort::Seq, t);
            }
        }
        for v in self.p.index_vars().collect::<Vec<_>>() {
            let cur = st.scalars[v.0].clone();
            let t = Term::ite(
                Term::cmp(crate::ir::CmpOp::Gt, cur.clone(), pos.clone()),
                Term::sub(cur.clone(), Term::Int(1)),
                cur,
            );
            let name = self.p.scalars[v.0].name.clone();
            out.scalars[v.0] = self.def(&name, Sort::Int, t);
        }
        for (v, t) in writes {
            let name = self.p.scalars[v.0].name.clone();
            out.scalars[v.0] = self.def(&name, Sort::Int, t);
        }
        out
    }

    /// The full squeezer: identity on base states, otherwise the branch
    /// selected by the condition.
    pub fn apply(&mut self, q: &Squeezer, st: &Sym) -> Sym {
        let base = self.is_base(q, st);
        let base = self.def("base", Sort::Bool, base);
        let c = self.cond(&q.cond, st);
        let t = self.apply_branch(q, st, true);
        let e = self.apply_branch(q, st, false);
        self.select(&base, st, &Sym::merge(&c, &t, &e))
    }

    /// `ite(flag, a, b)` per component, with definitions.
    fn select(&mut self, flag: &Term, a: &Sym, b: &Sym) -> Sym {
        let done = self.def("done", Sort::Bool, Term::ite(flag.clone(), a.done.clone(), b.done.clone()));
        let arrays = a
            .arrays
            .iter()
            .zip(&b.arrays)
            .map(|(x, y)| {
                let t = Term::ite(flag.clone(), x.clone(), y.clone());
                self.def("arr", Sort::Seq, t)
            })
            .collect();
        let scalars = a
            .scalars
            .iter()
            .zip(&b.scalars)
            .map(|(x, y)| {
                let t = Term::ite(flag.clone(), x.clone(), y.clone());
                self.def("v", Sort::Int, t)
            })
            .collect();
        Sym { done, arrays, scalars }
    }

    /// In-bounds conditions for every read the squeezer performs on `st`.
    pub fn bounds(&mut self, q: &Squeezer, st: &Sym) -> Term {
        let inb = |i: Term, len: Term| {
            Term::and([
                Term::cmp(crate::ir::CmpOp::Ge, i.clone(), Term::Int(0)),
                Term::cmp(crate::ir::CmpOp::Lt, i, len),
            ])
        };
        let mut reads = Vec::new();
        for a in q.cond.atoms() {
            for o in [a.lhs, a.rhs] {
                if let Operand::Elem(arr, i) = o {
                    let len = Term::len(st.arrays[arr.0].clone());
                    reads.push(inb(self.index(st, i, len.clone()), len));
                }
            }
        }
        let mut per_branch = Vec::new();
        for then in [true, false] {
            let br = q.branch(then);
            let glen = self.group_len(q, st);
            let mut items = vec![inb(self.index(st, br.pos, glen.clone()), glen)];
            for a in &br.assigns {
                let len = Term::len(st.arrays[a.array.0].clone());
                items.push(inb(self.index(st, a.index, len.clone()), len));
            }
            per_branch.push(Term::and(items));
        }
        let c = self.cond(&q.cond, st);
        let e = per_branch.pop().unwrap();
        let t = per_branch.pop().unwrap();
        reads.push(Term::ite(c, t, e));
        let base = self.is_base(q, st);
        Term::implies(Term::not(base), Term::and(reads))
    }

    pub fn prog_branch(&mut self, st: &Sym, b: crate::logic::ProgBranch) -> Term {
        use crate::logic::ProgBranch::*;
        let stay = self.stays(st);
        let guard = self.pred(st, &self.p.guard);
        match b {
            Stutter => stay,
            Iterate => Term::and([Term::not(stay), guard]),
            Exit => Term::and([Term::not(stay), Term::not(guard)]),
        }
    }

    pub fn finish(self, name: String, hyp: Term, goal: Term, meta: QueryMeta) -> Query {
        Query {
            name,
            free: self.free,
            defs: self.defs,
            hyp,
            goal,
            meta,
        }
    }
}

impl Sym {
    fn merge(c: &Term, t: &Sym, e: &Sym) -> Sym {
        let ite = |x: &Term, y: &Term| Term::ite(c.clone(), x.clone(), y.clone());
        Sym {
            done: ite(&t.done, &e.done),
            arrays: t.arrays.iter().zip(&e.arrays).map(|(x, y)| ite(x, y)).collect(),
            scalars: t.scalars.iter().zip(&e.scalars).map(|(x, y)| ite(x, y)).collect(),
        }
    }

    /// Component-wise equality.
    pub fn equals(&self, other: &Sym) -> Term {
        let mut items = vec![Term::eq(self.done.clone(), other.done.clone())];
        items.extend(self.arrays.iter().zip(&other.arrays).map(|(a, b)| Term::eq(a.clone(), b.clone())));
        items.extend(self.scalars.iter().zip(&other.scalars).map(|(a, b)| Term::eq(a.clone(), b.clone())));
        Term::and(items)
    }
}
