//! SMT-LIB2 emission and an external solver process.
//!
//! Two encodings are available. Sequence mode uses the theory of
//! sequences directly and is quantifier free whenever the query is.
//! Array mode represents a sequence as an integer array that is zero
//! outside `[0, len)` together with its length; `remove` becomes a lambda.
//! Solvers handle both quantifiers and removal far better over arrays, so
//! the backend solves in array mode unless told otherwise. For emitted
//! files, [`Encoding::Auto`] keeps sequence mode for quantifier-free
//! queries.

use std::collections::HashSet;
use std::hash::{Hash, Hasher};
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::rc::Rc;
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{qinst, BackendError, BackendVerdict, Limits};
use crate::ir::CmpOp;
use crate::logic::{Model, Query, Role, Sort, Term, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Encoding {
    #[default]
    Auto,
    Seq,
    Array,
}

impl Encoding {
    fn resolve(self, q: &Query) -> Encoding {
        match self {
            Encoding::Auto if q.has_quantifier() => Encoding::Array,
            Encoding::Auto => Encoding::Seq,
            e => e,
        }
    }
}

/// Longest counterexample sequence read back from the solver.
const MAX_MODEL_LEN: i64 = 256;

struct Emitter {
    array: bool,
    /// Names of sequence-sorted variables and definitions.
    seqs: HashSet<String>,
}

impl Emitter {
    fn int(v: i64) -> String {
        if v < 0 {
            format!("(- {})", v.unsigned_abs())
        } else {
            v.to_string()
        }
    }

    fn nary(op: &str, items: &[Term], unit: &str, e: &Emitter) -> String {
        match items.len() {
            0 => unit.to_string(),
            1 => e.term(&items[0]),
            _ => {
                let parts: Vec<String> = items.iter().map(|t| e.term(t)).collect();
                format!("({op} {})", parts.join(" "))
            }
        }
    }

    /// A non-sequence term.
    fn term(&self, t: &Term) -> String {
        match t {
            Term::Int(v) => Self::int(*v),
            Term::Bool(b) => b.to_string(),
            Term::Var(n) => n.clone(),
            Term::Add(a, b) => format!("(+ {} {})", self.term(a), self.term(b)),
            Term::Sub(a, b) => format!("(- {} {})", self.term(a), self.term(b)),
            Term::Neg(a) => format!("(- {})", self.term(a)),
            Term::Cmp(op, a, b) => {
                let (a, b) = (self.term(a), self.term(b));
                match op {
                    CmpOp::Eq => format!("(= {a} {b})"),
                    CmpOp::Ne => format!("(not (= {a} {b}))"),
                    CmpOp::Le => format!("(<= {a} {b})"),
                    CmpOp::Ge => format!("(>= {a} {b})"),
                    CmpOp::Lt => format!("(< {a} {b})"),
                    CmpOp::Gt => format!("(> {a} {b})"),
                }
            }
            Term::Eq(a, b) => {
                if self.array && (self.is_seq(a) || self.is_seq(b)) {
                    let (aa, al) = self.seq(a);
                    let (ba, bl) = self.seq(b);
                    format!("(and (= {al} {bl}) (= {aa} {ba}))")
                } else if self.is_seq(a) || self.is_seq(b) {
                    format!("(= {} {})", self.seq(a).0, self.seq(b).0)
                } else {
                    format!("(= {} {})", self.term(a), self.term(b))
                }
            }
            Term::Not(a) => format!("(not {})", self.term(a)),
            Term::And(xs) => Self::nary("and", xs, "true", self),
            Term::Or(xs) => Self::nary("or", xs, "false", self),
            Term::Implies(a, b) => format!("(=> {} {})", self.term(a), self.term(b)),
            Term::Ite(c, a, b) => format!("(ite {} {} {})", self.term(c), self.term(a), self.term(b)),
            Term::Len(s) => self.seq(s).1,
            Term::Nth(s, i) => {
                let (arr, _) = self.seq(s);
                if self.array {
                    format!("(select {arr} {})", self.term(i))
                } else {
                    format!("(sq.nth {arr} {})", self.term(i))
                }
            }
            Term::Remove(..) => panic!("sequence term in integer position"),
            Term::Forall { var, lo, hi, body } => format!(
                "(forall (({var} Int)) (=> (and (<= {} {var}) (< {var} {})) {}))",
                self.term(lo),
                self.term(hi),
                self.term(body)
            ),
        }
    }

    fn is_seq(&self, t: &Term) -> bool {
        match t {
            Term::Remove(..) => true,
            Term::Ite(_, a, _) => self.is_seq(a),
            Term::Var(n) => self.seqs.contains(n),
            _ => false,
        }
    }

    /// `(contents, length)` of a sequence term.
    fn seq(&self, t: &Term) -> (String, String) {
        match t {
            Term::Var(n) => {
                if self.array {
                    (n.clone(), format!("{n}.len"))
                } else {
                    (n.clone(), format!("(seq.len {n})"))
                }
            }
            Term::Ite(c, a, b) => {
                let c = self.term(c);
                let (aa, al) = self.seq(a);
                let (ba, bl) = self.seq(b);
                if self.array {
                    (format!("(ite {c} {aa} {ba})"), format!("(ite {c} {al} {bl})"))
                } else {
                    let s = format!("(ite {c} {aa} {ba})");
                    let l = format!("(seq.len {s})");
                    (s, l)
                }
            }
            Term::Remove(s, p) => {
                let (a, l) = self.seq(s);
                let p = self.term(p);
                if self.array {
                    let inb = format!("(and (<= 0 {p}) (< {p} {l}))");
                    (
                        format!("(ite {inb} (lambda ((sq.k Int)) (ite (< sq.k {p}) (select {a} sq.k) (select {a} (+ sq.k 1)))) {a})"),
                        format!("(ite {inb} (- {l} 1) {l})"),
                    )
                } else {
                    let s = format!("(sq.rm {a} {p})");
                    let l = format!("(seq.len {s})");
                    (s, l)
                }
            }
            other => panic!("not a sequence term: {other:?}"),
        }
    }
}

const SEQ_PRELUDE: &str = "\
(define-fun sq.nth ((s (Seq Int)) (i Int)) Int (ite (and (<= 0 i) (< i (seq.len s))) (seq.nth s i) 0))
(define-fun sq.rm ((s (Seq Int)) (p Int)) (Seq Int) (ite (and (<= 0 p) (< p (seq.len s))) (seq.++ (seq.extract s 0 p) (seq.extract s (+ p 1) (- (seq.len s) (+ p 1)))) s))
";

fn sort_name(s: Sort) -> &'static str {
    match s {
        Sort::Int => "Int",
        Sort::Bool => "Bool",
        Sort::Seq => "(Seq Int)",
    }
}

/// Emits `q` as a satisfiability problem for the negated implication,
/// with the default encoding and no domain limits.
pub fn emit_smtlib(q: &Query) -> String {
    emit_smtlib_with(q, Encoding::Auto, &Limits::default())
}

/// Emits `q` under `limits`: root sequence lengths at most `len_bound`,
/// and, when given, elements and data variables drawn from `values` and
/// index variables at most `index_max`.
pub fn emit_smtlib_with(q: &Query, encoding: Encoding, limits: &Limits) -> String {
    let array = encoding.resolve(q) == Encoding::Array;
    let seqs = q
        .free
        .iter()
        .map(|v| (&v.name, v.sort))
        .chain(q.defs.iter().map(|d| (&d.name, d.sort)))
        .filter(|(_, s)| *s == Sort::Seq)
        .map(|(n, _)| n.clone())
        .collect();
    let e = Emitter { array, seqs };
    let mut out = String::new();
    let _ = writeln!(out, "; {}", q.name);
    out.push_str("(set-logic ALL)\n");
    if !array {
        out.push_str(SEQ_PRELUDE);
    }
    let mut limits_t = Vec::new();
    for v in &q.free {
        match (v.sort, array) {
            (Sort::Seq, true) => {
                let n = &v.name;
                let _ = writeln!(out, "(declare-const {n}.raw (Array Int Int))");
                let _ = writeln!(out, "(declare-const {n}.len Int)");
                let _ = writeln!(
                    out,
                    "(define-fun {n} () (Array Int Int) (lambda ((sq.k Int)) (ite (and (<= 0 sq.k) (< sq.k {n}.len)) (select {n}.raw sq.k) 0)))"
                );
                limits_t.push(format!("(>= {n}.len 0)"));
            }
            (s, _) => {
                let _ = writeln!(out, "(declare-const {} {})", v.name, sort_name(s));
            }
        }
        let var = Term::Var(v.name.clone());
        if v.sort == Sort::Seq {
            let (arr, len) = e.seq(&var);
            if let Some(l) = limits.len_bound {
                limits_t.push(format!("(<= {len} {l})"));
                if let Some(vals) = &limits.values {
                    let vals = elem_values(vals, &v.role);
                    for k in 0..l {
                        let elem = if array {
                            format!("(select {arr} {k})")
                        } else {
                            format!("(sq.nth {arr} {k})")
                        };
                        limits_t.push(format!("(=> (< {k} {len}) {})", member(&elem, &vals)));
                    }
                }
            }
        } else if v.sort == Sort::Int {
            match v.role {
                Role::Index => {
                    if let Some(m) = limits.index_max {
                        limits_t.push(format!("(<= {} {})", v.name, m));
                    }
                }
                Role::Data(_) => {
                    if let Some(vals) = &limits.values {
                        limits_t.push(member(&v.name, &elem_values(vals, &v.role)));
                    }
                }
                _ => {}
            }
        }
    }
    let mut defs = String::new();
    for d in &q.defs {
        match (d.sort, array) {
            (Sort::Seq, true) => {
                let (arr, len) = e.seq(&d.term);
                let _ = writeln!(defs, "(define-fun {} () (Array Int Int) {arr})", d.name);
                let _ = writeln!(defs, "(define-fun {}.len () Int {len})", d.name);
            }
            (Sort::Seq, false) => {
                let _ = writeln!(defs, "(define-fun {} () (Seq Int) {})", d.name, e.seq(&d.term).0);
            }
            (s, _) => {
                let _ = writeln!(defs, "(define-fun {} () {} {})", d.name, sort_name(s), e.term(&d.term));
            }
        }
    }
    out.push_str(&defs);
    let hyp = e.term(&q.hyp);
    let goal = e.term(&q.goal);
    for l in &limits_t {
        let _ = writeln!(out, "(assert {l})");
    }
    let _ = writeln!(out, "(assert {hyp})");
    let _ = writeln!(out, "(assert (not {goal}))");
    out.push_str("(check-sat)\n");
    out
}

/// The element domain for a variable: char roles keep only `[0, 255]`.
pub(crate) fn elem_values(vals: &[i64], role: &Role) -> Vec<i64> {
    match role {
        Role::Data(sort) | Role::Array { elem: sort, .. } => elem_values_for(vals, *sort),
        _ => elem_values_for(vals, crate::ir::ElemSort::Int),
    }
}

/// The values of `vals` admissible for `sort`, sorted and deduplicated.
/// Never empty.
pub fn elem_values_for(vals: &[i64], sort: crate::ir::ElemSort) -> Vec<i64> {
    let is_char = sort == crate::ir::ElemSort::Char;
    let mut out: Vec<i64> = vals.iter().copied().filter(|v| !is_char || (0..=255).contains(v)).collect();
    out.sort_unstable();
    out.dedup();
    if out.is_empty() {
        out.push(0);
    }
    out
}

fn member(x: &str, vals: &[i64]) -> String {
    let parts: Vec<String> = vals.iter().map(|v| format!("(= {x} {})", Emitter::int(*v))).collect();
    if parts.len() == 1 {
        parts.into_iter().next().unwrap()
    } else {
        format!("(or {})", parts.join(" "))
    }
}

/// A minimal s-expression, enough for `get-value` responses.
#[derive(Debug, Clone, PartialEq)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

fn parse_sexp(text: &str) -> Option<Sexp> {
    let mut toks = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '(' | ')' => {
                if !cur.is_empty() {
                    toks.push(std::mem::take(&mut cur));
                }
                toks.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    toks.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        toks.push(cur);
    }
    let mut pos = 0;
    let s = sexp_at(&toks, &mut pos)?;
    (pos == toks.len()).then_some(s)
}

fn sexp_at(toks: &[String], pos: &mut usize) -> Option<Sexp> {
    let t = toks.get(*pos)?;
    *pos += 1;
    match t.as_str() {
        "(" => {
            let mut items = Vec::new();
            while toks.get(*pos)? != ")" {
                items.push(sexp_at(toks, pos)?);
            }
            *pos += 1;
            Some(Sexp::List(items))
        }
        ")" => None,
        a => Some(Sexp::Atom(a.to_string())),
    }
}

fn sexp_value(s: &Sexp) -> Option<Value> {
    match s {
        Sexp::Atom(a) if a == "true" => Some(Value::Bool(true)),
        Sexp::Atom(a) if a == "false" => Some(Value::Bool(false)),
        Sexp::Atom(a) => a.parse().ok().map(Value::Int),
        Sexp::List(items) => match items.as_slice() {
            [Sexp::Atom(m), x] if m == "-" => match sexp_value(x)? {
                Value::Int(v) => Some(Value::Int(-v)),
                _ => None,
            },
            _ => None,
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmtConfig {
    /// Solver program followed by its arguments; it must read SMT-LIB2
    /// from standard input.
    pub command: Vec<String>,
    pub timeout_ms: u64,
    pub encoding: Encoding,
}

impl Default for SmtConfig {
    fn default() -> Self {
        SmtConfig {
            command: vec!["z3".into(), "-in".into()],
            timeout_ms: 60_000,
            encoding: Encoding::Auto,
        }
    }
}

impl SmtConfig {
    /// Parses a whitespace-separated command line such as `z3 -in`.
    pub fn with_command(mut self, cmd: &str) -> Self {
        self.command = cmd.split_whitespace().map(String::from).collect();
        self
    }
}

const END_MARK: &str = "sq.end";

struct Process {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
}

impl Process {
    fn spawn(cmd: &[String]) -> Result<Process, BackendError> {
        let (prog, args) = cmd.split_first().ok_or_else(|| BackendError::Unavailable("empty solver command".into()))?;
        let mut child = Command::new(prog)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| BackendError::Unavailable(format!("{prog}: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(Process {
            child,
            stdin,
            lines: rx,
        })
    }

    /// Sends `text` and collects output lines up to the end marker.
    fn exchange(&mut self, text: &str, wait: Duration) -> Result<Vec<String>, Exchange> {
        let msg = format!("{text}\n(echo \"{END_MARK}\")\n");
        if self.stdin.write_all(msg.as_bytes()).and_then(|_| self.stdin.flush()).is_err() {
            return Err(Exchange::Died);
        }
        let mut out = Vec::new();
        loop {
            match self.lines.recv_timeout(wait) {
                Ok(l) if l.trim() == END_MARK => return Ok(out),
                Ok(l) => out.push(l),
                Err(RecvTimeoutError::Timeout) => return Err(Exchange::Timeout),
                Err(RecvTimeoutError::Disconnected) => return Err(Exchange::Died),
            }
        }
    }
}

impl Drop for Process {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

enum Solved {
    Unsat,
    Sat(Option<Model>),
    Unknown(String),
}

enum Exchange {
    Timeout,
    Died,
}

/// A persistent solver process. Each query runs after a `(reset)`.
pub struct SmtBackend {
    pub config: SmtConfig,
    proc: Option<Process>,
    /// Hashes of problems already found unsat.
    unsat: HashSet<u64>,
}

impl SmtBackend {
    pub fn new(config: SmtConfig) -> Self {
        SmtBackend {
            config,
            proc: None,
            unsat: HashSet::new(),
        }
    }

    /// Whether the configured solver can be started.
    pub fn available(config: &SmtConfig) -> bool {
        let Ok(mut p) = Process::spawn(&config.command) else {
            return false;
        };
        matches!(p.exchange("(check-sat)", Duration::from_secs(10)), Ok(l) if l.iter().any(|x| x.trim() == "sat"))
    }

    fn process(&mut self) -> Result<&mut Process, BackendError> {
        if self.proc.is_none() {
            self.proc = Some(Process::spawn(&self.config.command)?);
        }
        Ok(self.proc.as_mut().unwrap())
    }

    /// Checks `q`. Quantified queries under [`Encoding::Auto`] are first
    /// tried in their quantifier-free weakening; the native encoding is
    /// the fallback when that is inconclusive.
    pub fn check(&mut self, q: &Query, limits: &Limits) -> Result<BackendVerdict, BackendError> {
        if self.config.encoding == Encoding::Auto && q.has_quantifier() {
            // Validity without limits implies validity with them, and the
            // unlimited query is often easier.
            let mut attempts = vec![Limits::default()];
            if *limits != Limits::default() {
                attempts.push(limits.clone());
            }
            for lim in &attempts {
                if let Some(v) = self.instantiated(q, lim, lim == limits)? {
                    return Ok(v);
                }
            }
        }
        // Array terms solve far faster than sequences for these queries, so
        // the backend always prefers them; `Auto` only affects emitted files.
        let encoding = match self.config.encoding {
            Encoding::Auto => Encoding::Array,
            e => e,
        };
        Ok(match self.solve(q, encoding, limits)? {
            Solved::Unsat => BackendVerdict::Valid,
            Solved::Sat(Some(m)) if q.refuted_by(&m) => BackendVerdict::CounterModel(m),
            Solved::Sat(Some(_)) => BackendVerdict::Unknown("solver model does not refute the query".into()),
            Solved::Sat(None) => BackendVerdict::Unknown("counterexample too large to read back".into()),
            Solved::Unknown(why) => BackendVerdict::Unknown(why),
        })
    }

    /// Solves quantifier-free weakenings of `q`: cheap instantiation first,
    /// then cross instantiation when it differs, which needs nested
    /// quantifiers. A counter model is only reported when it refutes `q`
    /// and `limits` are the caller's.
    fn instantiated(&mut self, q: &Query, limits: &Limits, final_limits: bool) -> Result<Option<BackendVerdict>, BackendError> {
        let cheap = qinst::eliminate(q, &qinst::Instances::default());
        let mut last = cheap.clone();
        for cross in [false, true] {
            let qf = if cross {
                let c = qinst::eliminate(
                    q,
                    &qinst::Instances {
                        cross: true,
                        ..qinst::Instances::default()
                    },
                );
                if c == last {
                    break;
                }
                c
            } else {
                cheap.clone()
            };
            if qf.has_quantifier() {
                last = qf;
                continue;
            }
            match self.solve(&qf, Encoding::Array, limits)? {
                Solved::Unsat => return Ok(Some(BackendVerdict::Valid)),
                Solved::Sat(Some(mut m)) if final_limits && q.refuted_by(&m) => {
                    m.retain(|k, _| q.free.iter().any(|v| &v.name == k));
                    return Ok(Some(BackendVerdict::CounterModel(m)));
                }
                _ => log::debug!("{}: instantiation inconclusive", q.name),
            }
            last = qf;
        }
        Ok(None)
    }

    fn solve(&mut self, q: &Query, encoding: Encoding, limits: &Limits) -> Result<Solved, BackendError> {
        let text = emit_smtlib_with(q, encoding, limits);
        let key = {
            let mut h = std::collections::hash_map::DefaultHasher::new();
            text.hash(&mut h);
            h.finish()
        };
        if self.unsat.contains(&key) {
            return Ok(Solved::Unsat);
        }
        let timeout = self.config.timeout_ms;
        let wait = Duration::from_millis(timeout + 5_000);
        let script = format!("(reset)\n(set-option :produce-models true)\n(set-option :timeout {timeout})\n{text}");
        let proc = self.process()?;
        let started = std::time::Instant::now();
        let answer = proc.exchange(&script, wait);
        log::debug!("{} ({encoding:?}): {:?}", q.name, started.elapsed());
        let lines = match answer {
            Ok(l) => l,
            Err(Exchange::Timeout) => {
                self.proc = None;
                return Ok(Solved::Unknown("solver timeout".into()));
            }
            Err(Exchange::Died) => {
                self.proc = None;
                return Err(BackendError::Solver("solver process exited".into()));
            }
        };
        if let Some(err) = lines.iter().find(|l| l.starts_with("(error")) {
            return Err(BackendError::Solver(err.clone()));
        }
        match lines.last().map(|s| s.trim()) {
            Some("unsat") => {
                self.unsat.insert(key);
                Ok(Solved::Unsat)
            }
            Some("sat") => Ok(Solved::Sat(self.read_model(q, encoding == Encoding::Array, wait)?)),
            Some("unknown") => Ok(Solved::Unknown("solver returned unknown".into())),
            other => Err(BackendError::Solver(format!("unexpected solver output {other:?}"))),
        }
    }

    fn get_values(&mut self, exprs: &[String], wait: Duration) -> Result<Vec<Value>, BackendError> {
        if exprs.is_empty() {
            return Ok(Vec::new());
        }
        let cmd = format!("(get-value ({}))", exprs.join(" "));
        let proc = self.process()?;
        let lines = match proc.exchange(&cmd, wait) {
            Ok(l) => l,
            Err(_) => {
                self.proc = None;
                return Err(BackendError::Solver("no response to get-value".into()));
            }
        };
        let text = lines.join(" ");
        let bad = || BackendError::Solver(format!("cannot parse model: {text}"));
        let Some(Sexp::List(pairs)) = parse_sexp(&text) else {
            return Err(bad());
        };
        pairs
            .iter()
            .map(|p| match p {
                Sexp::List(kv) if kv.len() == 2 => sexp_value(&kv[1]).ok_or_else(bad),
                _ => Err(bad()),
            })
            .collect()
    }

    fn read_model(&mut self, q: &Query, array: bool, wait: Duration) -> Result<Option<Model>, BackendError> {
        let heads: Vec<String> = q
            .free
            .iter()
            .map(|v| match (v.sort, array) {
                (Sort::Seq, true) => format!("{}.len", v.name),
                (Sort::Seq, false) => format!("(seq.len {})", v.name),
                _ => v.name.clone(),
            })
            .collect();
        let vals = self.get_values(&heads, wait)?;
        let mut model = Model::new();
        for (v, val) in q.free.iter().zip(vals) {
            if v.sort != Sort::Seq {
                model.insert(v.name.clone(), val);
                continue;
            }
            let len = val.as_int();
            if !(0..=MAX_MODEL_LEN).contains(&len) {
                return Ok(None);
            }
            let elems: Vec<String> = (0..len)
                .map(|k| {
                    if array {
                        format!("(select {} {k})", v.name)
                    } else {
                        format!("(seq.nth {} {k})", v.name)
                    }
                })
                .collect();
            let items = self.get_values(&elems, wait)?;
            model.insert(v.name.clone(), Value::Seq(Rc::new(items.iter().map(Value::as_int).collect())));
        }
        Ok(Some(model))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_get_value_response() {
        let s = parse_sexp("((x 3) ((seq.len s) (- 12)) (b true))").unwrap();
        let Sexp::List(items) = s else { panic!() };
        let vals: Vec<Value> = items
            .iter()
            .map(|p| match p {
                Sexp::List(kv) => sexp_value(&kv[1]).unwrap(),
                _ => panic!(),
            })
            .collect();
        assert_eq!(vals, vec![Value::Int(3), Value::Int(-12), Value::Bool(true)]);
    }

    #[test]
    fn negative_literals() {
        assert_eq!(Emitter::int(-7), "(- 7)");
        assert_eq!(Emitter::int(7), "7");
    }
}
