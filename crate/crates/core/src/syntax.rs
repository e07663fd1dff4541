//! S-expression surface syntax: reader, elaboration into terms, and the
//! canonical printer used by reports and certificate files.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::term::{binder_var_sort, fresh_name, name, Annotation, Binder, Context, Name, Sort, Term, TermKind, VarSort};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }
    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a, _) => Some(a),
            _ => None,
        }
    }
    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(l, _) => Some(l),
            _ => None,
        }
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a, _) => f.write_str(a),
            Sexp::List(items, _) => {
                f.write_str("(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str(")")
            }
        }
    }
}

pub fn err_at(pos: Pos, message: impl Into<String>) -> ParseError {
    ParseError { line: pos.line, col: pos.col, message: message.into() }
}

/// Read every top-level s-expression of `src`. `;` starts a line comment.
pub fn read_all(src: &str) -> Result<Vec<Sexp>, ParseError> {
    let mut stack: Vec<(Vec<Sexp>, Pos)> = Vec::new();
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 0;
    let mut chars = src.chars().peekable();
    let mut atom = String::new();
    let mut atom_pos = Pos::default();

    fn flush(atom: &mut String, pos: Pos, stack: &mut [(Vec<Sexp>, Pos)], out: &mut Vec<Sexp>) {
        if atom.is_empty() {
            return;
        }
        let a = Sexp::Atom(std::mem::take(atom), pos);
        match stack.last_mut() {
            Some((items, _)) => items.push(a),
            None => out.push(a),
        }
    }

    while let Some(c) = chars.next() {
        col += 1;
        let here = Pos { line, col };
        match c {
            ';' => {
                flush(&mut atom, atom_pos, &mut stack, &mut out);
                while let Some(&n) = chars.peek() {
                    if n == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '(' => {
                flush(&mut atom, atom_pos, &mut stack, &mut out);
                stack.push((Vec::new(), here));
            }
            ')' => {
                flush(&mut atom, atom_pos, &mut stack, &mut out);
                let (items, p) = stack.pop().ok_or_else(|| err_at(here, "unbalanced `)`"))?;
                let l = Sexp::List(items, p);
                match stack.last_mut() {
                    Some((items, _)) => items.push(l),
                    None => out.push(l),
                }
            }
            c if c.is_whitespace() => {
                flush(&mut atom, atom_pos, &mut stack, &mut out);
                if c == '\n' {
                    line += 1;
                    col = 0;
                }
            }
            c => {
                if atom.is_empty() {
                    atom_pos = here;
                }
                atom.push(c);
            }
        }
    }
    flush(&mut atom, atom_pos, &mut stack, &mut out);
    if let Some((_, p)) = stack.last() {
        return Err(err_at(*p, "unclosed `(`"));
    }
    Ok(out)
}

pub fn read_one(src: &str) -> Result<Sexp, ParseError> {
    let mut all = read_all(src)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        0 => Err(err_at(Pos { line: 1, col: 1 }, "empty input")),
        _ => Err(err_at(all[1].pos(), "expected a single expression")),
    }
}

const RESERVED: &[&str] = &[
    "nat", "star", "box", "triangle", "S", "+", "eq", "lam", "pi", "->", "app", "rec", "eqi",
];

pub fn is_reserved(s: &str) -> bool {
    RESERVED.contains(&s)
}

pub fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && !s.chars().next().unwrap().is_ascii_digit()
        && !is_reserved(s)
        && !s.chars().any(|c| c.is_whitespace() || matches!(c, '(' | ')' | ';' | '#'))
}

pub fn parse_annotation(s: &Sexp) -> Result<Annotation, ParseError> {
    match s.atom() {
        Some("u") => Ok(Annotation::U),
        Some("r") => Ok(Annotation::R),
        _ => Err(err_at(s.pos(), format!("expected annotation `u` or `r`, found `{s}`"))),
    }
}

/// Name resolution environment for elaboration.
pub struct Elaborator<'a> {
    pub ctx: &'a Context,
    /// Transparent definitions, inlined at each use.
    pub defs: &'a HashMap<Name, Term>,
    /// Annotation used when a binder omits one.
    pub default_annot: Annotation,
}

impl<'a> Elaborator<'a> {
    pub fn new(ctx: &'a Context, defs: &'a HashMap<Name, Term>) -> Self {
        Elaborator { ctx, defs, default_annot: Annotation::U }
    }

    pub fn term(&self, s: &Sexp) -> Result<Term, ParseError> {
        self.go(s, &mut Vec::new())
    }

    fn go(&self, s: &Sexp, scope: &mut Vec<(String, VarSort)>) -> Result<Term, ParseError> {
        match s {
            Sexp::Atom(a, pos) => self.atom(a, *pos, scope),
            Sexp::List(items, pos) => {
                let head = items.first().ok_or_else(|| err_at(*pos, "empty application"))?;
                let args = &items[1..];
                let arity = |n: usize| -> Result<(), ParseError> {
                    if args.len() == n {
                        Ok(())
                    } else {
                        Err(err_at(*pos, format!("`{head}` expects {n} arguments, found {}", args.len())))
                    }
                };
                match head.atom() {
                    Some(kw @ ("lam" | "pi")) => {
                        let (x, annot, dom, body) = match args.len() {
                            3 => (&args[0], self.default_annot, &args[1], &args[2]),
                            4 => (&args[0], parse_annotation(&args[1])?, &args[2], &args[3]),
                            n => return Err(err_at(*pos, format!("`{kw}` expects 3 or 4 arguments, found {n}"))),
                        };
                        let xname = x
                            .atom()
                            .filter(|a| is_identifier(a) || *a == "_")
                            .ok_or_else(|| err_at(x.pos(), format!("expected binder name, found `{x}`")))?;
                        let domain = self.go(dom, scope)?;
                        let var_sort = binder_var_sort(&domain);
                        scope.push((xname.to_string(), var_sort));
                        let body = self.go(body, scope);
                        scope.pop();
                        let b = Binder { name: name(xname), annot, var_sort, domain, body: body? };
                        Ok(if kw == "lam" { Term::lam(b) } else { Term::prod(b) })
                    }
                    Some("->") => {
                        if args.len() < 2 {
                            return Err(err_at(*pos, "`->` expects at least 2 arguments"));
                        }
                        let mut tys = args
                            .iter()
                            .map(|a| self.go(a, scope))
                            .collect::<Result<Vec<_>, _>>()?;
                        let mut acc = tys.pop().unwrap();
                        while let Some(d) = tys.pop() {
                            acc = Term::prod(Binder {
                                name: name("_"),
                                annot: self.default_annot,
                                var_sort: binder_var_sort(&d),
                                domain: d,
                                body: acc.shift(1, 0),
                            });
                        }
                        Ok(acc)
                    }
                    Some("app") => {
                        if args.is_empty() {
                            return Err(err_at(*pos, "`app` expects a function"));
                        }
                        self.apply(&args[0], &args[1..], scope)
                    }
                    Some("rec") => {
                        arity(4)?;
                        let v = args.iter().map(|a| self.go(a, scope)).collect::<Result<Vec<_>, _>>()?;
                        let [s, m, z, st]: [Term; 4] = v.try_into().unwrap();
                        Ok(Term::rec(s, m, z, st))
                    }
                    Some("eqi") => {
                        arity(1)?;
                        Ok(Term::eq_intro(self.go(&args[0], scope)?))
                    }
                    Some("+") if args.len() >= 2 => {
                        let mut it = args.iter();
                        let mut acc = self.go(it.next().unwrap(), scope)?;
                        for a in it {
                            acc = Term::add(acc, self.go(a, scope)?);
                        }
                        Ok(acc)
                    }
                    _ => self.apply(head, args, scope),
                }
            }
        }
    }

    fn apply(&self, f: &Sexp, args: &[Sexp], scope: &mut Vec<(String, VarSort)>) -> Result<Term, ParseError> {
        let mut t = self.go(f, scope)?;
        for a in args {
            t = Term::app(t, self.go(a, scope)?);
        }
        Ok(t)
    }

    fn atom(&self, a: &str, pos: Pos, scope: &[(String, VarSort)]) -> Result<Term, ParseError> {
        if a.chars().all(|c| c.is_ascii_digit()) {
            let n: u64 = a.parse().map_err(|_| err_at(pos, "numeral too large"))?;
            if n > 100_000 {
                return Err(err_at(pos, "numeral too large"));
            }
            return Ok(Term::numeral(n));
        }
        Ok(match a {
            "nat" => Term::nat(),
            "star" => Term::star(),
            "box" => Term::boxed(),
            "triangle" => Term::sort(Sort::Triangle),
            "S" => Term::succ_const(),
            "+" => Term::plus_const(),
            "eq" => Term::eq_sym(),
            _ => {
                if let Some(i) = scope.iter().rev().position(|(n, _)| n == a) {
                    let (_, s) = &scope[scope.len() - 1 - i];
                    return Ok(Term::bound(i as u32, *s));
                }
                if let Some(body) = self.defs.get(a) {
                    return Ok(body.clone());
                }
                match self.ctx.var_sort(a) {
                    Some(s) => Term::var(a, s),
                    None => return Err(err_at(pos, format!("unknown identifier `{a}`"))),
                }
            }
        })
    }
}

/// Parse a closed term text in a context with no definitions.
pub fn parse_term(ctx: &Context, src: &str) -> Result<Term, ParseError> {
    let defs = HashMap::new();
    Elaborator::new(ctx, &defs).term(&read_one(src)?)
}

struct Printer {
    out: String,
    scope: Vec<Name>,
    avoid: BTreeSet<Name>,
}

impl Printer {
    fn term(&mut self, t: &Term) {
        use TermKind::*;
        if let Some(n) = t.as_numeral() {
            if n > 0 {
                self.out.push_str(&n.to_string());
                return;
            }
        }
        match t.kind() {
            Var(n, _) => self.out.push_str(n),
            Bound(i, _) => {
                let idx = self.scope.len() as i64 - 1 - *i as i64;
                if idx >= 0 {
                    let n = self.scope[idx as usize].clone();
                    self.out.push_str(&n);
                } else {
                    self.out.push_str(&format!("#{i}"));
                }
            }
            Sort(s) => self.out.push_str(match s {
                crate::term::Sort::Star => "star",
                crate::term::Sort::Box => "box",
                crate::term::Sort::Triangle => "triangle",
            }),
            Nat => self.out.push_str("nat"),
            EqSym => self.out.push_str("eq"),
            Zero => self.out.push('0'),
            Succ => self.out.push('S'),
            Plus => self.out.push('+'),
            EqIntro(p) => {
                self.out.push_str("(eqi ");
                self.term(p);
                self.out.push(')');
            }
            App(..) => {
                if let Some(u) = t.as_succ() {
                    self.out.push_str("(S ");
                    self.term(u);
                    self.out.push(')');
                } else if let Some((a, b)) = t.as_add() {
                    self.out.push_str("(+ ");
                    self.term(a);
                    self.out.push(' ');
                    self.term(b);
                    self.out.push(')');
                } else if let Some((ty, a, b)) = t.as_eq() {
                    self.out.push_str("(eq ");
                    self.term(ty);
                    self.out.push(' ');
                    self.term(a);
                    self.out.push(' ');
                    self.term(b);
                    self.out.push(')');
                } else {
                    let (h, args) = t.spine();
                    self.out.push_str("(app ");
                    self.term(h);
                    for a in args {
                        self.out.push(' ');
                        self.term(a);
                    }
                    self.out.push(')');
                }
            }
            Lam(b) | Prod(b) => {
                let is_lam = matches!(t.kind(), Lam(_));
                if !is_lam && b.annot == Annotation::U && !b.body.has_bound(0) {
                    self.out.push_str("(->");
                    let depth = self.scope.len();
                    let mut cur = t.clone();
                    loop {
                        let next = match cur.kind() {
                            Prod(b) if b.annot == Annotation::U && !b.body.has_bound(0) => {
                                self.out.push(' ');
                                self.term(&b.domain);
                                self.scope.push(name("_"));
                                b.body.clone()
                            }
                            _ => break,
                        };
                        cur = next;
                    }
                    self.out.push(' ');
                    self.term(&cur);
                    self.scope.truncate(depth);
                    self.out.push(')');
                    return;
                }
                let scope = &self.scope;
                let avoid = &self.avoid;
                let x = fresh_name(&b.name, |c| {
                    is_reserved(c) || c == "u" || c == "r" || avoid.contains(c) || scope.iter().any(|s| &**s == c)
                });
                self.out.push_str(if is_lam { "(lam " } else { "(pi " });
                self.out.push_str(&x);
                self.out.push(' ');
                self.out.push_str(&b.annot.to_string());
                self.out.push(' ');
                self.term(&b.domain);
                self.out.push(' ');
                self.scope.push(x);
                self.term(&b.body);
                self.scope.pop();
                self.out.push(')');
            }
            Rec(s, m, z, st) => {
                self.out.push_str("(rec");
                for c in [s, m, z, st] {
                    self.out.push(' ');
                    self.term(c);
                }
                self.out.push(')');
            }
        }
    }
}

/// Canonical s-expression text of a term. Binder names avoid every free
/// variable of the term and every enclosing binder name.
pub fn print_term(t: &Term) -> String {
    print_term_avoiding(t, &BTreeSet::new())
}

/// As `print_term`, additionally keeping binder names clear of `avoid`
/// (typically the names bound in the surrounding context).
pub fn print_term_avoiding(t: &Term, avoid: &BTreeSet<Name>) -> String {
    let mut all = t.free_vars();
    all.extend(avoid.iter().cloned());
    let mut p = Printer { out: String::new(), scope: Vec::new(), avoid: all };
    p.term(t);
    p.out
}

pub fn print_in_context(ctx: &Context, t: &Term) -> String {
    let avoid: BTreeSet<Name> = ctx.bindings().iter().map(|b| b.name.clone()).collect();
    print_term_avoiding(t, &avoid)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}
