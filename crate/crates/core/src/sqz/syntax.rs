//! Concrete syntax of squeezers, in the style
//! `if (s[n-2] <= s[n-1]) remove(s,n-2) else remove(s,n-1)`.
//!
//! A branch lists one `remove(arr,pos)` per array of the squeezed group,
//! all at the same position, followed by assignments `v = w + arr[idx]` or
//! `v = w - arr[idx]`, separated by `;`. Inside indices `n` stands for the
//! length of the indexed array; `len(arr)` is accepted as well.

use crate::ir::{ArrayId, CmpOp, ElemSort, Program, VarClass, VarId};
use crate::lex::{Cursor, SyntaxError, Tok};

use super::{show_index, AssignS, Atom, Branch, CondS, IndexExprS, Offset, Operand, Squeezer};

pub fn parse_squeezer(src: &str, p: &Program, base_bound: usize) -> Result<Squeezer, SyntaxError> {
    let mut s = Parser {
        cur: Cursor::new(src)?,
        p,
    };
    s.cur.expect_keyword("if")?;
    s.cur.expect_sym("(")?;
    let cond = s.cond()?;
    s.cur.expect_sym(")")?;
    let pos = s.cur.pos();
    let (g1, then_branch) = s.branch()?;
    s.cur.expect_keyword("else")?;
    let (g2, else_branch) = s.branch()?;
    if !s.cur.at_eof() {
        return Err(s.cur.error(format!("unexpected {} after squeezer", s.cur.peek())));
    }
    if g1 != g2 {
        return Err(SyntaxError::new(pos, "both branches must squeeze the same arrays"));
    }
    Ok(Squeezer {
        group: g1,
        cond,
        then_branch,
        else_branch,
        base_bound,
    })
}

/// Parses a stand-alone condition, e.g. a pool atom.
pub fn parse_cond(src: &str, p: &Program) -> Result<CondS, SyntaxError> {
    let mut s = Parser {
        cur: Cursor::new(src)?,
        p,
    };
    let c = s.cond()?;
    if !s.cur.at_eof() {
        return Err(s.cur.error(format!("unexpected {} after condition", s.cur.peek())));
    }
    Ok(c)
}

/// Parses a stand-alone index expression such as `0`, `i` or `n-2`, with
/// `n` the length of the arrays of `group`.
pub fn parse_index(src: &str, p: &Program, group: usize) -> Result<IndexExprS, SyntaxError> {
    let mut s = Parser {
        cur: Cursor::new(src)?,
        p,
    };
    let arr = p.group_arrays(group).first().copied();
    let e = s.index(arr)?;
    if !s.cur.at_eof() {
        return Err(s.cur.error(format!("unexpected {} after index", s.cur.peek())));
    }
    Ok(e)
}

struct Parser<'a> {
    cur: Cursor,
    p: &'a Program,
}

impl Parser<'_> {
    fn cond(&mut self) -> Result<CondS, SyntaxError> {
        let mut lhs = self.conj()?;
        while self.cur.eat_sym("||") {
            lhs = CondS::Or(Box::new(lhs), Box::new(self.conj()?));
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<CondS, SyntaxError> {
        let mut lhs = self.primary()?;
        while self.cur.eat_sym("&&") {
            lhs = CondS::And(Box::new(lhs), Box::new(self.primary()?));
        }
        Ok(lhs)
    }

    fn primary(&mut self) -> Result<CondS, SyntaxError> {
        if self.cur.eat_sym("(") {
            let c = self.cond()?;
            self.cur.expect_sym(")")?;
            return Ok(c);
        }
        let pos = self.cur.pos();
        let mut left = self.operand()?;
        let mut out: Option<CondS> = None;
        loop {
            let op = match self.cur.peek() {
                Tok::Sym(s) => CmpOp::from_symbol(s),
                _ => None,
            };
            let Some(op) = op else { break };
            self.cur.next();
            let right = self.operand()?;
            let atom = self.check_atom(Atom { lhs: left, op, rhs: right }, pos)?;
            out = Some(match out {
                None => CondS::Atom(atom),
                Some(prev) => CondS::And(Box::new(prev), Box::new(CondS::Atom(atom))),
            });
            left = right;
        }
        out.ok_or_else(|| self.cur.error(format!("expected comparison operator, found {}", self.cur.peek())))
    }

    fn check_atom(&self, a: Atom, pos: crate::lex::Pos) -> Result<Atom, SyntaxError> {
        let sort = |o: Operand| -> Option<Option<ElemSort>> {
            // None: constant; Some(None): index; Some(Some(s)): element of sort s
            match o {
                Operand::Const(_) => None,
                Operand::Elem(arr, _) => Some(Some(self.p.array(arr).sort)),
                Operand::Var(v) => Some(match self.p.scalar(v).class {
                    VarClass::Index => None,
                    VarClass::Data(s) => Some(s),
                }),
            }
        };
        let ok = match (sort(a.lhs), sort(a.rhs)) {
            (Some(x), Some(y)) => x == y,
            (Some(Some(_)), None) => true,
            (Some(None), None) => true,
            (None, _) => false,
        };
        if ok {
            Ok(a)
        } else {
            Err(SyntaxError::new(pos, "ill-sorted comparison"))
        }
    }

    fn operand(&mut self) -> Result<Operand, SyntaxError> {
        let pos = self.cur.pos();
        match self.cur.peek().clone() {
            Tok::Int(_) | Tok::Sym("-") => Ok(Operand::Const(self.cur.expect_int()?)),
            Tok::Ident(name) => {
                self.cur.next();
                if let Some(v) = self.p.var_id(&name) {
                    return Ok(Operand::Var(v));
                }
                let a = self
                    .p
                    .array_id(&name)
                    .ok_or_else(|| SyntaxError::new(pos, format!("unknown identifier `{name}`")))?;
                self.cur.expect_sym("[")?;
                let idx = self.index(Some(a))?;
                self.cur.expect_sym("]")?;
                Ok(Operand::Elem(a, idx))
            }
            t => Err(SyntaxError::new(pos, format!("expected operand, found {t}"))),
        }
    }

    fn index_var(&mut self) -> Result<VarId, SyntaxError> {
        let pos = self.cur.pos();
        let name = self.cur.expect_ident()?;
        match self.p.var_id(&name) {
            Some(v) if self.p.scalar(v).class == VarClass::Index => Ok(v),
            Some(_) => Err(SyntaxError::new(pos, format!("`{name}` is not an index variable"))),
            None => Err(SyntaxError::new(pos, format!("unknown index variable `{name}`"))),
        }
    }

    /// `arr` is the array being indexed, used to validate `len(arr)`.
    fn index(&mut self, arr: Option<ArrayId>) -> Result<IndexExprS, SyntaxError> {
        let pos = self.cur.pos();
        let is_len = if self.cur.is_ident("n") && self.p.var_id("n").is_none() {
            self.cur.next();
            true
        } else if self.cur.is_ident("len") && matches!(self.cur.peek_at(1), Tok::Sym("(")) {
            self.cur.next();
            self.cur.next();
            let name = self.cur.expect_ident()?;
            let a = self
                .p
                .array_id(&name)
                .ok_or_else(|| SyntaxError::new(pos, format!("unknown array `{name}`")))?;
            if let Some(arr) = arr {
                if self.p.array(a).group != self.p.array(arr).group {
                    return Err(SyntaxError::new(pos, "length of an unrelated array"));
                }
            }
            self.cur.expect_sym(")")?;
            true
        } else {
            false
        };
        if is_len {
            self.cur.expect_sym("-")?;
            return Ok(IndexExprS::LenMinus(match self.cur.peek() {
                Tok::Int(_) => Offset::Const(self.cur.expect_int()?),
                _ => Offset::Var(self.index_var()?),
            }));
        }
        match self.cur.peek() {
            Tok::Int(_) => Ok(IndexExprS::Const(self.cur.expect_int()?)),
            _ => Ok(IndexExprS::Var(self.index_var()?)),
        }
    }

    fn branch(&mut self) -> Result<(usize, Branch), SyntaxError> {
        let start = self.cur.pos();
        let mut removed: Vec<ArrayId> = Vec::new();
        let mut pos: Option<IndexExprS> = None;
        let mut assigns = Vec::new();
        loop {
            if self.cur.eat_ident("remove") {
                let at = self.cur.pos();
                if !assigns.is_empty() {
                    return Err(SyntaxError::new(at, "`remove` must precede assignments"));
                }
                self.cur.expect_sym("(")?;
                let name = self.cur.expect_ident()?;
                let a = self
                    .p
                    .array_id(&name)
                    .ok_or_else(|| SyntaxError::new(at, format!("unknown array `{name}`")))?;
                self.cur.expect_sym(",")?;
                let idx = self.index(Some(a))?;
                self.cur.expect_sym(")")?;
                if pos.is_some_and(|p| p != idx) {
                    return Err(SyntaxError::new(at, "all removals of a branch use one position"));
                }
                if removed.contains(&a) {
                    return Err(SyntaxError::new(at, format!("`{name}` removed twice")));
                }
                pos = Some(idx);
                removed.push(a);
            } else if matches!(self.cur.peek(), Tok::Ident(_)) && !self.cur.is_ident("else") {
                assigns.push(self.assign()?);
            } else {
                return Err(self.cur.error(format!("expected `remove` or assignment, found {}", self.cur.peek())));
            }
            if !self.cur.eat_sym(";") || self.cur.is_ident("else") || self.cur.at_eof() {
                break;
            }
        }
        let Some(pos) = pos else {
            return Err(SyntaxError::new(start, "branch without `remove`"));
        };
        let group = self.p.array(removed[0]).group;
        let mut members = self.p.group_arrays(group);
        removed.sort();
        members.sort();
        if removed != members {
            return Err(SyntaxError::new(start, "a branch must remove from every array of the group"));
        }
        Ok((group, Branch { pos, assigns }))
    }

    fn int_var(&mut self) -> Result<VarId, SyntaxError> {
        let pos = self.cur.pos();
        let name = self.cur.expect_ident()?;
        match self.p.var_id(&name) {
            Some(v) if self.p.scalar(v).class == VarClass::Data(ElemSort::Int) => Ok(v),
            _ => Err(SyntaxError::new(pos, format!("`{name}` is not an int variable"))),
        }
    }

    fn assign(&mut self) -> Result<AssignS, SyntaxError> {
        let target = self.int_var()?;
        let (source, subtract) = if self.cur.eat_sym("+=") {
            (target, false)
        } else if self.cur.eat_sym("-=") {
            (target, true)
        } else {
            self.cur.expect_sym("=")?;
            let source = self.int_var()?;
            let subtract = if self.cur.eat_sym("-") {
                true
            } else {
                self.cur.expect_sym("+")?;
                false
            };
            (source, subtract)
        };
        let pos = self.cur.pos();
        let name = self.cur.expect_ident()?;
        let array = match self.p.array_id(&name) {
            Some(a) if self.p.array(a).sort == ElemSort::Int => a,
            _ => return Err(SyntaxError::new(pos, format!("`{name}` is not an int array"))),
        };
        self.cur.expect_sym("[")?;
        let index = self.index(Some(array))?;
        self.cur.expect_sym("]")?;
        Ok(AssignS {
            target,
            source,
            subtract,
            array,
            index,
        })
    }
}

fn render_operand(p: &Program, o: Operand) -> String {
    match o {
        Operand::Elem(a, i) => format!("{}[{}]", p.array(a).name, show_index(p, i)),
        Operand::Var(v) => p.scalar(v).name.clone(),
        Operand::Const(c) => c.to_string(),
    }
}

pub fn render_cond(c: &CondS, p: &Program) -> String {
    match c {
        CondS::Atom(a) => format!(
            "{} {} {}",
            render_operand(p, a.lhs),
            a.op.symbol(),
            render_operand(p, a.rhs)
        ),
        CondS::And(x, y) => {
            let l = match **x {
                CondS::Or(..) => format!("({})", render_cond(x, p)),
                _ => render_cond(x, p),
            };
            let r = match **y {
                CondS::Atom(_) => render_cond(y, p),
                _ => format!("({})", render_cond(y, p)),
            };
            format!("{l} && {r}")
        }
        CondS::Or(x, y) => {
            let r = match **y {
                CondS::Or(..) => format!("({})", render_cond(y, p)),
                _ => render_cond(y, p),
            };
            format!("{} || {r}", render_cond(x, p))
        }
    }
}

fn render_branch(q: &Squeezer, br: &Branch, p: &Program) -> String {
    let mut parts: Vec<String> = p
        .group_arrays(q.group)
        .into_iter()
        .map(|a| format!("remove({},{})", p.array(a).name, show_index(p, br.pos)))
        .collect();
    for a in &br.assigns {
        parts.push(format!(
            "{} = {} {} {}[{}]",
            p.scalar(a.target).name,
            p.scalar(a.source).name,
            if a.subtract { "-" } else { "+" },
            p.array(a.array).name,
            show_index(p, a.index)
        ));
    }
    parts.join("; ")
}

pub fn render_squeezer(q: &Squeezer, p: &Program) -> String {
    format!(
        "if ({}) {} else {}",
        render_cond(&q.cond, p),
        render_branch(q, &q.then_branch, p),
        render_branch(q, &q.else_branch, p)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench;

    #[test]
    fn parses_max_ind_row() {
        let p = bench::program("max_ind");
        let q = parse_squeezer("if (s[n-2] <= s[n-1]) remove(s,n-2) else remove(s,n-1)", &p, 2).unwrap();
        let s = p.array_id("s").unwrap();
        assert_eq!(
            q.cond,
            CondS::Atom(Atom {
                lhs: Operand::Elem(s, IndexExprS::LenMinus(Offset::Const(2))),
                op: CmpOp::Le,
                rhs: Operand::Elem(s, IndexExprS::LenMinus(Offset::Const(1))),
            })
        );
        assert_eq!(q.then_branch.pos, IndexExprS::LenMinus(Offset::Const(2)));
        assert_eq!(q.else_branch.pos, IndexExprS::LenMinus(Offset::Const(1)));
    }

    #[test]
    fn render_is_idempotent() {
        let p = bench::program("strnchr");
        let text = "if ( s[0] == c || s[0]==0 ) remove(s,1) else remove(s,0)";
        let q = parse_squeezer(text, &p, 2).unwrap();
        let once = render_squeezer(&q, &p);
        assert_eq!(once, "if (s[0] == c || s[0] == 0) remove(s,1) else remove(s,0)");
        let q2 = parse_squeezer(&once, &p, 2).unwrap();
        assert_eq!(q2, q);
        assert_eq!(render_squeezer(&q2, &p), once);
    }

    #[test]
    fn lockstep_and_assignments() {
        let p = bench::program("strncmp");
        let q = parse_squeezer(
            "if (s1[0] == s2[0] && s1[0] != 0) remove(s1,0); remove(s2,0) else remove(s1,1); remove(s2,1)",
            &p,
            2,
        )
        .unwrap();
        assert!(matches!(q.cond, CondS::And(..)));
        assert!(parse_squeezer("if (s1[0] == s2[0]) remove(s1,0) else remove(s1,1)", &p, 2).is_err());

        let b = bench::program("sum_bidi");
        let q = parse_squeezer(
            "if (i > 0) remove(a,0); l = l - a[0]; r -= a[n-i] else remove(a,0)",
            &b,
            2,
        )
        .unwrap();
        assert_eq!(q.then_branch.assigns.len(), 2);
        assert!(q.then_branch.assigns.iter().all(|a| a.subtract));
    }

    #[test]
    fn rejects_malformed() {
        let p = bench::program("strnchr");
        assert!(parse_squeezer("if (s[0]) remove(s,0)", &p, 2).is_err());
        assert!(parse_squeezer("if (s[0] == c) remove(s,0)", &p, 2).is_err());
        assert!(parse_squeezer("if (s[0] == i) remove(s,0) else remove(s,1)", &p, 2).is_err());
        assert!(parse_cond("s[0] <= s[1] <= s[2]", &p).is_ok());
    }
}
