//! Parser for the textual program format.
//!
//! ```text
//! program sum_bidi
//! base 2
//! array a : int
//! index i = 0
//! var l : int = 0
//! var r : int = 0
//! assume 0 <= i <= n
//! loop (i < n) {
//!     l += a[i];
//!     r += a[n - i - 1];
//!     i += 1;
//! }
//! assert i >= n -> l == r
//! ```
//!
//! `n` abbreviates `len(a)` when the program has a single array group. A
//! scalar named `ret` receives the value of `return e`. An optional
//! `exit { ... }` block runs when the guard fails.

use std::collections::{BTreeSet, HashMap};

use crate::lex::{Cursor, SyntaxError, Tok};

use super::{ArrayDecl, ArrayId, CmpOp, ElemSort, Expr, Pred, Program, Scalar, Stmt, VarClass, VarId};

const KEYWORDS: &[&str] = &[
    "program", "base", "array", "index", "var", "assume", "loop", "exit", "assert", "if", "else",
    "return", "len", "forall", "in", "true", "false", "done", "group", "int", "char",
];

pub fn parse_program(src: &str) -> Result<Program, SyntaxError> {
    let mut p = Parser {
        cur: Cursor::new(src)?,
        prog: Program {
            name: String::new(),
            arrays: Vec::new(),
            scalars: Vec::new(),
            init: Vec::new(),
            guard: Pred::Bool(false),
            body: Vec::new(),
            exit: Vec::new(),
            spec: Pred::Bool(true),
            assumptions: Vec::new(),
            ret: None,
            base_bound: None,
            constants: BTreeSet::new(),
            observed: Vec::new(),
        },
        groups: HashMap::new(),
        bound: Vec::new(),
    };
    p.program()?;
    let mut seen = BTreeSet::new();
    p.prog.spec.collect_vars(&mut seen);
    p.prog.observed = (0..p.prog.scalars.len())
        .map(|i| seen.contains(&VarId(i)) || p.prog.ret == Some(VarId(i)))
        .collect();
    Ok(p.prog)
}

struct Parser {
    cur: Cursor,
    prog: Program,
    groups: HashMap<String, usize>,
    bound: Vec<String>,
}

impl Parser {
    fn program(&mut self) -> Result<(), SyntaxError> {
        self.cur.expect_keyword("program")?;
        self.prog.name = self.cur.expect_ident()?;
        let mut seen_loop = false;
        let mut seen_assert = false;
        while !self.cur.at_eof() {
            let pos = self.cur.pos();
            let kw = self.cur.expect_ident()?;
            match kw.as_str() {
                "base" => {
                    let b = self.cur.expect_int()?;
                    if b < 0 {
                        return Err(SyntaxError::new(pos, "base bound must be non-negative"));
                    }
                    self.prog.base_bound = Some(b as usize);
                }
                "array" => self.array_decl()?,
                "index" => {
                    let name = self.fresh_name()?;
                    let init = if self.cur.eat_sym("=") {
                        Some(self.cur.expect_int()?)
                    } else {
                        None
                    };
                    self.declare(name, VarClass::Index, init);
                }
                "var" => {
                    let name = self.fresh_name()?;
                    self.cur.expect_sym(":")?;
                    let sort = self.sort()?;
                    let init = if self.cur.eat_sym("=") {
                        Some(self.cur.expect_int()?)
                    } else {
                        None
                    };
                    self.declare(name, VarClass::Data(sort), init);
                }
                "assume" => {
                    let a = self.pred()?;
                    self.prog.assumptions.push(a);
                }
                "loop" => {
                    if seen_loop {
                        return Err(SyntaxError::new(pos, "a program has exactly one loop"));
                    }
                    seen_loop = true;
                    self.cur.expect_sym("(")?;
                    self.prog.guard = self.pred()?;
                    self.cur.expect_sym(")")?;
                    self.prog.body = self.block()?;
                }
                "exit" => {
                    self.prog.exit = self.block()?;
                }
                "assert" => {
                    if seen_assert {
                        return Err(SyntaxError::new(pos, "duplicate `assert`"));
                    }
                    seen_assert = true;
                    self.prog.spec = self.pred()?;
                }
                other => {
                    return Err(SyntaxError::new(pos, format!("unexpected `{other}` at top level")));
                }
            }
            self.cur.eat_sym(";");
        }
        if !seen_loop {
            return Err(self.cur.error("missing `loop`"));
        }
        if !seen_assert {
            return Err(self.cur.error("missing `assert`"));
        }
        Ok(())
    }

    fn fresh_name(&mut self) -> Result<String, SyntaxError> {
        let pos = self.cur.pos();
        let name = self.cur.expect_ident()?;
        if KEYWORDS.contains(&name.as_str()) {
            return Err(SyntaxError::new(pos, format!("`{name}` is a keyword")));
        }
        if self.prog.var_id(&name).is_some() || self.prog.array_id(&name).is_some() {
            return Err(SyntaxError::new(pos, format!("`{name}` declared twice")));
        }
        Ok(name)
    }

    fn declare(&mut self, name: String, class: VarClass, init: Option<i64>) {
        if let Some(v) = init {
            self.prog.constants.insert(v);
        }
        if name == "ret" {
            self.prog.ret = Some(VarId(self.prog.scalars.len()));
        }
        self.prog.scalars.push(Scalar { name, class });
        self.prog.init.push(init);
    }

    fn sort(&mut self) -> Result<ElemSort, SyntaxError> {
        let pos = self.cur.pos();
        match self.cur.expect_ident()?.as_str() {
            "int" => Ok(ElemSort::Int),
            "char" => Ok(ElemSort::Char),
            s => Err(SyntaxError::new(pos, format!("unknown sort `{s}`"))),
        }
    }

    fn array_decl(&mut self) -> Result<(), SyntaxError> {
        if !self.prog.scalars.is_empty() {
            return Err(self.cur.error("arrays must be declared before scalars"));
        }
        let name = self.fresh_name()?;
        self.cur.expect_sym(":")?;
        let sort = self.sort()?;
        let label = if self.cur.eat_ident("group") {
            match self.cur.next() {
                Tok::Ident(s) => s,
                Tok::Int(v) => v.to_string(),
                t => return Err(self.cur.error(format!("expected group label, found {t}"))),
            }
        } else {
            format!("#{name}")
        };
        let next = self.groups.len();
        let group = *self.groups.entry(label).or_insert(next);
        self.prog.arrays.push(ArrayDecl { name, sort, group });
        Ok(())
    }

    fn block(&mut self) -> Result<Vec<Stmt>, SyntaxError> {
        self.cur.expect_sym("{")?;
        let mut out = Vec::new();
        while !self.cur.eat_sym("}") {
            if self.cur.at_eof() {
                return Err(self.cur.error("unterminated block"));
            }
            out.push(self.stmt()?);
            self.cur.eat_sym(";");
        }
        Ok(out)
    }

    fn stmt(&mut self) -> Result<Stmt, SyntaxError> {
        if self.cur.eat_ident("if") {
            self.cur.expect_sym("(")?;
            let c = self.pred()?;
            self.cur.expect_sym(")")?;
            let t = self.block()?;
            let e = if self.cur.eat_ident("else") {
                if self.cur.is_ident("if") {
                    vec![self.stmt()?]
                } else {
                    self.block()?
                }
            } else {
                Vec::new()
            };
            return Ok(Stmt::If(c, t, e));
        }
        if self.cur.eat_ident("return") {
            if self.cur.is_sym(";") || self.cur.is_sym("}") {
                return Ok(Stmt::Return(None));
            }
            if self.prog.ret.is_none() {
                return Err(self.cur.error("`return` with a value needs a scalar named `ret`"));
            }
            return Ok(Stmt::Return(Some(self.expr()?)));
        }
        let pos = self.cur.pos();
        let name = self.cur.expect_ident()?;
        let v = self
            .prog
            .var_id(&name)
            .ok_or_else(|| SyntaxError::new(pos, format!("unknown scalar `{name}`")))?;
        let lhs = Expr::Var(v);
        let stmt = if self.cur.eat_sym(":=") {
            Stmt::Assign(v, self.expr()?)
        } else if self.cur.eat_sym("+=") {
            Stmt::Assign(v, Expr::Add(Box::new(lhs), Box::new(self.expr()?)))
        } else if self.cur.eat_sym("-=") {
            Stmt::Assign(v, Expr::Sub(Box::new(lhs), Box::new(self.expr()?)))
        } else {
            return Err(self.cur.error(format!("expected `:=`, `+=` or `-=`, found {}", self.cur.peek())));
        };
        Ok(stmt)
    }

    fn pred(&mut self) -> Result<Pred, SyntaxError> {
        let lhs = self.disj()?;
        if self.cur.eat_sym("->") {
            let rhs = self.pred()?;
            return Ok(Pred::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Pred, SyntaxError> {
        let mut items = vec![self.conj()?];
        while self.cur.eat_sym("||") {
            items.push(self.conj()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Pred::Or(items) })
    }

    fn conj(&mut self) -> Result<Pred, SyntaxError> {
        let mut items = vec![self.unary()?];
        while self.cur.eat_sym("&&") {
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Pred::And(items) })
    }

    fn unary(&mut self) -> Result<Pred, SyntaxError> {
        if self.cur.eat_sym("!") {
            return Ok(Pred::Not(Box::new(self.unary()?)));
        }
        if self.cur.eat_ident("true") {
            return Ok(Pred::Bool(true));
        }
        if self.cur.eat_ident("false") {
            return Ok(Pred::Bool(false));
        }
        if self.cur.eat_ident("done") {
            return Ok(Pred::Done);
        }
        if self.cur.eat_ident("forall") {
            return self.forall();
        }
        if self.cur.is_sym("(") {
            // Either a parenthesized predicate or an arithmetic operand.
            let mark = self.cur.mark();
            self.cur.next();
            if let Ok(p) = self.pred() {
                if self.cur.eat_sym(")") && !self.at_arith_continuation() {
                    return Ok(p);
                }
            }
            self.cur.reset(mark);
        }
        self.comparison()
    }

    fn at_arith_continuation(&self) -> bool {
        match self.cur.peek() {
            Tok::Sym(s) => CmpOp::from_symbol(s).is_some() || *s == "+" || *s == "-",
            _ => false,
        }
    }

    fn forall(&mut self) -> Result<Pred, SyntaxError> {
        let pos = self.cur.pos();
        let var = self.cur.expect_ident()?;
        if KEYWORDS.contains(&var.as_str()) {
            return Err(SyntaxError::new(pos, format!("`{var}` is a keyword")));
        }
        self.cur.expect_keyword("in")?;
        self.cur.expect_sym("[")?;
        let lo = self.expr()?;
        self.cur.expect_sym(",")?;
        let hi = self.expr()?;
        self.cur.expect_sym(")")?;
        self.cur.expect_sym(":")?;
        self.bound.push(var);
        let body = self.pred();
        self.bound.pop();
        Ok(Pred::Forall {
            lo,
            hi,
            body: Box::new(body?),
        })
    }

    fn comparison(&mut self) -> Result<Pred, SyntaxError> {
        let first = self.expr()?;
        let mut operands = vec![first];
        let mut ops = Vec::new();
        while let Tok::Sym(s) = self.cur.peek() {
            let Some(op) = CmpOp::from_symbol(s) else { break };
            self.cur.next();
            ops.push(op);
            operands.push(self.expr()?);
        }
        if ops.is_empty() {
            return Err(self.cur.error(format!("expected comparison, found {}", self.cur.peek())));
        }
        let mut atoms: Vec<Pred> = ops
            .iter()
            .enumerate()
            .map(|(k, op)| Pred::Cmp(*op, operands[k].clone(), operands[k + 1].clone()))
            .collect();
        Ok(if atoms.len() == 1 { atoms.pop().unwrap() } else { Pred::And(atoms) })
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.term()?;
        loop {
            if self.cur.eat_sym("+") {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.cur.eat_sym("-") {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, SyntaxError> {
        let pos = self.cur.pos();
        match self.cur.next() {
            Tok::Sym("-") => Ok(Expr::Neg(Box::new(self.term()?))),
            Tok::Sym("(") => {
                let e = self.expr()?;
                self.cur.expect_sym(")")?;
                Ok(e)
            }
            Tok::Int(v) => {
                self.prog.constants.insert(v);
                Ok(Expr::Const(v))
            }
            Tok::Ident(name) if name == "len" => {
                self.cur.expect_sym("(")?;
                let a = self.array_ref()?;
                self.cur.expect_sym(")")?;
                Ok(Expr::Len(a))
            }
            Tok::Ident(name) => {
                if let Some(d) = self.bound.iter().rposition(|b| *b == name) {
                    return Ok(Expr::Bound(d));
                }
                if let Some(v) = self.prog.var_id(&name) {
                    return Ok(Expr::Var(v));
                }
                if let Some(a) = self.prog.array_id(&name) {
                    self.cur.expect_sym("[")?;
                    let ipos = self.cur.pos();
                    let idx = self.expr()?;
                    if !self.is_index_expr(&idx) {
                        return Err(SyntaxError::new(ipos, "array index must be an index expression"));
                    }
                    self.cur.expect_sym("]")?;
                    return Ok(Expr::Read(a, Box::new(idx)));
                }
                if name == "n" {
                    if self.groups.len() == 1 {
                        return Ok(Expr::Len(ArrayId(0)));
                    }
                    return Err(SyntaxError::new(pos, "`n` is ambiguous with several array groups"));
                }
                Err(SyntaxError::new(pos, format!("unknown identifier `{name}`")))
            }
            t => Err(SyntaxError::new(pos, format!("expected expression, found {t}"))),
        }
    }

    fn array_ref(&mut self) -> Result<ArrayId, SyntaxError> {
        let pos = self.cur.pos();
        let name = self.cur.expect_ident()?;
        self.prog
            .array_id(&name)
            .ok_or_else(|| SyntaxError::new(pos, format!("unknown array `{name}`")))
    }

    fn is_index_expr(&self, e: &Expr) -> bool {
        match e {
            Expr::Const(_) | Expr::Bound(_) | Expr::Len(_) => true,
            Expr::Var(v) => self.prog.scalars[v.0].class == VarClass::Index,
            Expr::Read(..) => false,
            Expr::Add(a, b) | Expr::Sub(a, b) => self.is_index_expr(a) && self.is_index_expr(b),
            Expr::Neg(a) => self.is_index_expr(a),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = "
        program tiny
        array a : int
        index i = 0
        var s : int = 0
        assume (i) <= n
        loop (i < n) { if (a[i] > 0) { s += a[i] } else { return } ; i += 1 }
        assert done -> forall j in [0, i) : (a[j] + 1) > 0
    ";

    #[test]
    fn parses_structure() {
        let p = parse_program(TINY).unwrap();
        assert_eq!(p.name, "tiny");
        assert_eq!(p.arrays.len(), 1);
        assert_eq!(p.scalars.len(), 2);
        assert_eq!(p.init, vec![Some(0), Some(0)]);
        assert_eq!(p.body.len(), 2);
        assert!(p.spec.has_quantifier());
        assert!(p.constants.contains(&1));
        assert_eq!(p.ret, None);
    }

    #[test]
    fn chained_comparison_desugars() {
        let p = parse_program("program c array a : int index i assume 0 <= i <= n loop (false) {} assert true")
            .unwrap();
        assert!(matches!(&p.assumptions[0], Pred::And(v) if v.len() == 2));
    }

    #[test]
    fn groups_and_n() {
        let src = "program g array x : char group 1 array y : char group 1 index i = 0
                   loop (i < len(x)) { i += 1 } assert true";
        let p = parse_program(src).unwrap();
        assert_eq!(p.arrays[0].group, p.arrays[1].group);
        let bad = "program g array x : int array y : int loop (n > 0) {} assert true";
        assert!(parse_program(bad).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_program("program p array a : int var d : int loop (true) { x := 1 } assert true").is_err());
        assert!(parse_program("program p array a : int var d : int loop (a[d] > 0) {} assert true").is_err());
        assert!(parse_program("program p loop (true) {}").is_err());
        let err = parse_program("program p\nloop (true) { return 1 } assert true").unwrap_err();
        assert_eq!(err.pos.line, 2);
    }
}
