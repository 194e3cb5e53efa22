//! Quantifier elimination by bounded instantiation.
//!
//! Each closed `forall` is replaced by a fresh boolean flag `q` with two
//! side conditions: when `q` is false a fresh witness lies in the range and
//! violates the body, and when `q` is true the body holds at a finite set
//! of instance terms. The instances are the witnesses shifted by small
//! offsets plus the range endpoints, which covers the index shifts that
//! element removal introduces.
//!
//! The side conditions are weaker than `q ⇔ forall`, so a valid result
//! proves the original query valid. A counter model of the result must be
//! checked against the original query.

use crate::ir::CmpOp;
use crate::logic::{FreeVar, Query, Role, Sort, Term};

struct Record {
    flag: Term,
    witness: Term,
    var: String,
    lo: Term,
    hi: Term,
    body: Term,
    depth: usize,
}

struct Elim {
    records: Vec<Record>,
    free: Vec<FreeVar>,
    max_depth: usize,
}

impl Elim {
    /// Replaces every closed quantifier in `t` by its flag.
    fn abstract_term(&mut self, t: &Term, depth: usize) -> Term {
        if depth > self.max_depth {
            return t.clone();
        }
        t.rewrite(&mut |x| match x {
            Term::Forall { var, lo, hi, body } => {
                let n = self.records.len();
                let flag = format!("qe{n}_flag");
                let witness = format!("qe{n}_at");
                self.free.push(FreeVar {
                    name: flag.clone(),
                    sort: Sort::Bool,
                    role: Role::Flag,
                });
                self.free.push(FreeVar {
                    name: witness.clone(),
                    sort: Sort::Int,
                    role: Role::Flag,
                });
                self.records.push(Record {
                    flag: Term::Var(flag.clone()),
                    witness: Term::Var(witness),
                    var: var.clone(),
                    lo: (**lo).clone(),
                    hi: (**hi).clone(),
                    body: (**body).clone(),
                    depth,
                });
                Some(Term::Var(flag))
            }
            _ => None,
        })
    }
}

fn in_range(t: &Term, lo: &Term, hi: &Term) -> Term {
    Term::and([Term::cmp(CmpOp::Le, lo.clone(), t.clone()), Term::cmp(CmpOp::Lt, t.clone(), hi.clone())])
}

fn push_unique(v: &mut Vec<Term>, t: Term) {
    if !v.contains(&t) {
        v.push(t);
    }
}

/// How quantifiers are instantiated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instances {
    /// Shifts applied to witnesses.
    pub offsets: Vec<i64>,
    /// Deepest quantifier nesting that is eliminated.
    pub max_depth: usize,
    /// Instantiate each nested quantifier at the shifted witnesses of all
    /// its siblings at the same depth too. This relates instances of one
    /// inner quantifier taken at different outer indices; the result grows
    /// quadratically.
    pub cross: bool,
}

impl Default for Instances {
    fn default() -> Self {
        Instances {
            offsets: vec![-1, 0, 1],
            max_depth: 2,
            cross: false,
        }
    }
}

/// The quantifier-free weakening of `q`. Returns `q` unchanged when it has
/// no quantifier.
pub fn eliminate(q: &Query, inst: &Instances) -> Query {
    let (offsets, max_depth, cross) = (&inst.offsets[..], inst.max_depth, inst.cross);
    if !q.has_quantifier() {
        return q.clone();
    }
    let mut e = Elim {
        records: Vec::new(),
        free: Vec::new(),
        max_depth,
    };
    let mut defs = q.defs.clone();
    for d in &mut defs {
        d.term = e.abstract_term(&d.term, 0);
    }
    let hyp = e.abstract_term(&q.hyp, 0);
    let goal = e.abstract_term(&q.goal, 0);

    // Instances shared by all records: shifted witnesses and endpoints of
    // the top-level quantifiers.
    let mut shared = Vec::new();
    for r in &e.records {
        for &d in offsets {
            push_unique(&mut shared, Term::add(r.witness.clone(), Term::Int(d)));
        }
        push_unique(&mut shared, r.lo.clone());
        push_unique(&mut shared, Term::sub(r.hi.clone(), Term::Int(1)));
    }

    let mut axioms = Vec::new();
    let mut i = 0;
    // Witnesses of nested records at the depth being processed. Records are
    // created breadth first, so every record of a depth exists by the time
    // the first one is processed.
    let mut siblings: (usize, Vec<Term>) = (0, Vec::new());
    while i < e.records.len() {
        let (flag, witness, var, lo, hi, body, depth) = {
            let r = &e.records[i];
            (r.flag.clone(), r.witness.clone(), r.var.clone(), r.lo.clone(), r.hi.clone(), r.body.clone(), r.depth)
        };
        let violated = Term::not(e.abstract_term(&body.subst(&var, &witness), depth + 1));
        axioms.push(Term::implies(
            Term::not(flag.clone()),
            Term::and([in_range(&witness, &lo, &hi), violated]),
        ));
        let mut instances = shared.clone();
        if depth > 0 {
            if cross && siblings.0 != depth {
                siblings = (depth, e.records[i..].iter().filter(|r| r.depth == depth).map(|r| r.witness.clone()).collect());
            }
            for w in siblings.1.iter().chain([&witness]) {
                for &d in offsets {
                    push_unique(&mut instances, Term::add(w.clone(), Term::Int(d)));
                }
            }
            push_unique(&mut instances, lo.clone());
            push_unique(&mut instances, Term::sub(hi.clone(), Term::Int(1)));
        }
        let mut holds = Vec::new();
        for t in &instances {
            let inst = e.abstract_term(&body.subst(&var, t), depth + 1);
            holds.push(Term::implies(in_range(t, &lo, &hi), inst));
        }
        axioms.push(Term::implies(flag, Term::and(holds)));
        i += 1;
    }

    let mut free = q.free.clone();
    free.extend(e.free);
    axioms.insert(0, hyp);
    Query {
        name: q.name.clone(),
        free,
        defs,
        hyp: Term::and(axioms),
        goal,
        meta: q.meta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::ElemSort;
    use crate::logic::{Model, QueryMeta, Value, Family};
    use std::rc::Rc;

    fn meta() -> QueryMeta {
        QueryMeta {
            family: Family::FaultPreservation,
            branch: None,
            origin: None,
        }
    }

    #[test]
    fn shift_by_one_is_found() {
        // forall j in [0, len a) : a[j] != 0   implies   forall j in [0, len a - 1) : a[j+1] != 0
        let a = Term::var("a");
        let all = |name: &str, shift: i64, hi: Term| {
            Term::forall(
                name,
                Term::Int(0),
                hi,
                Term::cmp(CmpOp::Ne, Term::nth(a.clone(), Term::add(Term::var(name), Term::Int(shift))), Term::Int(0)),
            )
        };
        let q = Query {
            name: "t".into(),
            free: vec![FreeVar {
                name: "a".into(),
                sort: Sort::Seq,
                role: Role::Array {
                    group: 0,
                    elem: ElemSort::Int,
                },
            }],
            defs: vec![],
            hyp: all("j", 0, Term::len(a.clone())),
            goal: all("k", 1, Term::sub(Term::len(a.clone()), Term::Int(1))),
            meta: meta(),
        };
        let qf = eliminate(&q, &Instances::default());
        assert!(!qf.has_quantifier());
        // A model of the weakening that is not a model of the original.
        let mut m = Model::new();
        m.insert("a".into(), Value::Seq(Rc::new(vec![1, 0, 2])));
        assert!(!q.refuted_by(&m));
    }
}
