//! Canonical text form of certificates.
//!
//! ```text
//! ccnat-cert v1
//! (context 5f0e3c2a91b7d4e8)
//! (goal <term> <term>)
//! (scopes 1)
//! (scope 0 x#3 u star <term>)
//! (steps 2)
//! (step 0 beta <term> <term> (paths (0 1)))
//! ...
//! ```
//!
//! Terms are written without reference to a context: `(v x star)` is a free
//! variable, `(b 0 star)` a bound index, `(n 3)` the numeral `S (S (S 0))`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use thiserror::Error;

use super::{AlienBinding, Certificate, Scope, Step, StepKind, FORMAT_HEADER};
use crate::arith::witness::{ArithWitness, Combination, EntailmentWitness};
use crate::arith::Atom;
use crate::term::{Annotation, Binder, Context, Name, Sort, Term, TermKind, VarSort};

/// Largest numeral accepted in `(n k)`.
const MAX_NUMERAL: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("certificate line {line}: {message}")]
pub struct CertParseError {
    pub line: usize,
    pub message: String,
}

/// FNV-1a over the canonical text of each binding.
pub fn context_fingerprint(ctx: &Context) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in ctx.bindings() {
        let mut line = String::new();
        write!(line, "{} {} ", b.name, b.annot).unwrap();
        term(&mut line, &b.ty);
        line.push('\n');
        for byte in line.bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

fn sort_tag(s: VarSort) -> &'static str {
    match s {
        VarSort::Star => "star",
        VarSort::Box => "box",
    }
}

fn term(out: &mut String, t: &Term) {
    if let Some(n) = t.as_numeral().filter(|n| *n > 0) {
        write!(out, "(n {n})").unwrap();
        return;
    }
    match t.kind() {
        TermKind::Var(x, s) => write!(out, "(v {x} {})", sort_tag(*s)).unwrap(),
        TermKind::Bound(i, s) => write!(out, "(b {i} {})", sort_tag(*s)).unwrap(),
        TermKind::Sort(Sort::Star) => out.push_str("star"),
        TermKind::Sort(Sort::Box) => out.push_str("box"),
        TermKind::Sort(Sort::Triangle) => out.push_str("tri"),
        TermKind::Nat => out.push_str("nat"),
        TermKind::EqSym => out.push_str("eq"),
        TermKind::Zero => out.push('0'),
        TermKind::Succ => out.push('S'),
        TermKind::Plus => out.push('+'),
        TermKind::EqIntro(p) => {
            out.push_str("(eqi ");
            term(out, p);
            out.push(')');
        }
        TermKind::App(f, a) => {
            out.push_str("(@ ");
            term(out, f);
            out.push(' ');
            term(out, a);
            out.push(')');
        }
        TermKind::Lam(b) | TermKind::Prod(b) => {
            let kw = if matches!(t.kind(), TermKind::Lam(_)) { "lam" } else { "pi" };
            write!(out, "({kw} {} {} {} ", b.annot, sort_tag(b.var_sort), b.name).unwrap();
            term(out, &b.domain);
            out.push(' ');
            term(out, &b.body);
            out.push(')');
        }
        TermKind::Rec(s, m, z, st) => {
            out.push_str("(rec");
            for c in [s, m, z, st] {
                out.push(' ');
                term(out, c);
            }
            out.push(')');
        }
    }
}

fn atom(out: &mut String, a: &Atom) {
    match a {
        Atom::Var(n) => write!(out, "(var {n})"),
        Atom::Alien(k) => write!(out, "(alien {k})"),
        Atom::Slack(k) => write!(out, "(slack {k})"),
    }
    .unwrap()
}

fn combination(out: &mut String, c: &Combination) {
    out.push_str("(comb (mult");
    for (i, m) in &c.multipliers {
        write!(out, " ({i} {m})").unwrap();
    }
    out.push_str(") (coef");
    for (a, k) in &c.coeffs {
        out.push_str(" (");
        atom(out, a);
        write!(out, " {k})").unwrap();
    }
    write!(out, ") {})", c.constant).unwrap();
}

fn witness(out: &mut String, w: &ArithWitness) {
    match w {
        ArithWitness::IntCombination(c) => {
            out.push_str("(int ");
            combination(out, c);
            out.push(')');
        }
        ArithWitness::CaseEnumeration { bound, var, cases } => {
            out.push_str("(cases ");
            combination(out, bound);
            out.push(' ');
            atom(out, var);
            for c in cases {
                out.push(' ');
                witness(out, c);
            }
            out.push(')');
        }
    }
}

fn ids(out: &mut String, xs: &[usize]) {
    for x in xs {
        write!(out, " {x}").unwrap();
    }
}

fn step(out: &mut String, s: &Step) {
    write!(out, "(step {} ", s.scope).unwrap();
    match &s.kind {
        StepKind::BetaIota { from, to, paths } => {
            out.push_str("beta ");
            term(out, from);
            out.push(' ');
            term(out, to);
            out.push_str(" (paths");
            for p in paths {
                out.push_str(" (");
                let digits: Vec<String> = p.iter().map(|d| d.to_string()).collect();
                out.push_str(&digits.join(" "));
                out.push(')');
            }
            out.push(')');
        }
        StepKind::Hyp { index, lhs, rhs, beta_steps } => {
            write!(out, "hyp {index} ").unwrap();
            term(out, lhs);
            out.push(' ');
            term(out, rhs);
            write!(out, " {beta_steps}").unwrap();
        }
        StepKind::Sym(i) => write!(out, "sym {i}").unwrap(),
        StepKind::Trans(i, j) => write!(out, "trans {i} {j}").unwrap(),
        StepKind::Congr(i, j) => write!(out, "congr {i} {j}").unwrap(),
        StepKind::RecCongr(xs) => {
            out.push_str("rec");
            ids(out, xs);
        }
        StepKind::EqCongr(i) => write!(out, "eqi {i}").unwrap(),
        StepKind::Binder { prod, domain, body } => {
            write!(out, "binder {} {domain} {body}", if *prod { "pi" } else { "lam" }).unwrap()
        }
        StepKind::Arith { premises, aliens, lhs, rhs, witness: w } => {
            out.push_str("arith (premises");
            ids(out, premises);
            out.push_str(") (aliens");
            for a in aliens {
                write!(out, " ({} ", a.var).unwrap();
                term(out, &a.term);
                match a.link {
                    Some(l) => write!(out, " {l})").unwrap(),
                    None => out.push_str(" -)"),
                }
            }
            out.push_str(") ");
            term(out, lhs);
            out.push(' ');
            term(out, rhs);
            out.push(' ');
            witness(out, &w.below);
            out.push(' ');
            witness(out, &w.above);
        }
        StepKind::Collapse { absurd, lhs, rhs } => {
            write!(out, "collapse {absurd} ").unwrap();
            term(out, lhs);
            out.push(' ');
            term(out, rhs);
        }
    }
    out.push(')');
}

pub fn print(c: &Certificate) -> String {
    let mut out = String::new();
    writeln!(out, "{FORMAT_HEADER}").unwrap();
    writeln!(out, "(context {:016x})", c.context).unwrap();
    out.push_str("(goal ");
    term(&mut out, &c.lhs);
    out.push(' ');
    term(&mut out, &c.rhs);
    out.push_str(")\n");
    writeln!(out, "(scopes {})", c.scopes.len()).unwrap();
    for s in &c.scopes {
        write!(out, "(scope {} {} {} {} ", s.parent, s.var, s.annot, sort_tag(s.var_sort)).unwrap();
        term(&mut out, &s.domain);
        out.push_str(")\n");
    }
    writeln!(out, "(steps {})", c.steps.len()).unwrap();
    for s in &c.steps {
        step(&mut out, s);
        out.push('\n');
    }
    out
}

/// Minimal s-expression tree; the certificate reader does not share the
/// surface-syntax reader.
#[derive(Debug)]
enum Sx {
    Atom(String),
    List(Vec<Sx>),
}

fn read_line(src: &str) -> Result<Sx, String> {
    let mut stack: Vec<Vec<Sx>> = vec![Vec::new()];
    let mut tok = String::new();
    let flush = |tok: &mut String, stack: &mut Vec<Vec<Sx>>| {
        if !tok.is_empty() {
            stack.last_mut().unwrap().push(Sx::Atom(std::mem::take(tok)));
        }
    };
    for ch in src.chars() {
        match ch {
            '(' => {
                flush(&mut tok, &mut stack);
                stack.push(Vec::new());
            }
            ')' => {
                flush(&mut tok, &mut stack);
                if stack.len() < 2 {
                    return Err("unbalanced `)`".into());
                }
                let l = stack.pop().unwrap();
                stack.last_mut().unwrap().push(Sx::List(l));
            }
            c if c.is_whitespace() => flush(&mut tok, &mut stack),
            c => tok.push(c),
        }
    }
    flush(&mut tok, &mut stack);
    if stack.len() != 1 {
        return Err("unbalanced `(`".into());
    }
    let mut top = stack.pop().unwrap();
    if top.len() != 1 {
        return Err(format!("expected one expression, found {}", top.len()));
    }
    Ok(top.pop().unwrap())
}

type R<T> = Result<T, String>;

fn list(s: &Sx) -> R<&[Sx]> {
    match s {
        Sx::List(l) => Ok(l),
        Sx::Atom(a) => Err(format!("expected a list, found `{a}`")),
    }
}

fn word(s: &Sx) -> R<&str> {
    match s {
        Sx::Atom(a) => Ok(a),
        Sx::List(_) => Err("expected an atom, found a list".into()),
    }
}

fn num<T: std::str::FromStr>(s: &Sx) -> R<T> {
    let w = word(s)?;
    w.parse().map_err(|_| format!("bad number `{w}`"))
}

fn tagged<'a>(s: &'a Sx, tag: &str, arity: usize) -> R<&'a [Sx]> {
    let l = list(s)?;
    if l.first().and_then(|h| word(h).ok()) != Some(tag) || l.len() != arity + 1 {
        return Err(format!("expected `({tag} …)` with {arity} fields"));
    }
    Ok(&l[1..])
}

fn name(s: &Sx) -> R<Name> {
    let w = word(s)?;
    if w.is_empty() {
        return Err("empty name".into());
    }
    Ok(crate::term::name(w))
}

fn var_sort(s: &Sx) -> R<VarSort> {
    match word(s)? {
        "star" => Ok(VarSort::Star),
        "box" => Ok(VarSort::Box),
        w => Err(format!("bad variable sort `{w}`")),
    }
}

fn annotation(s: &Sx) -> R<Annotation> {
    match word(s)? {
        "u" => Ok(Annotation::U),
        "r" => Ok(Annotation::R),
        w => Err(format!("bad annotation `{w}`")),
    }
}

fn read_term(s: &Sx) -> R<Term> {
    let l = match s {
        Sx::Atom(a) => {
            return Ok(match a.as_str() {
                "star" => Term::star(),
                "box" => Term::boxed(),
                "tri" => Term::sort(Sort::Triangle),
                "nat" => Term::nat(),
                "eq" => Term::eq_sym(),
                "0" => Term::zero(),
                "S" => Term::succ_const(),
                "+" => Term::plus_const(),
                _ => return Err(format!("unknown term constant `{a}`")),
            })
        }
        Sx::List(l) => l,
    };
    let head = l.first().map(word).transpose()?.ok_or("empty term")?;
    let args = &l[1..];
    let arity = |n: usize| if args.len() == n { Ok(()) } else { Err(format!("`{head}` takes {n} fields")) };
    match head {
        "v" => {
            arity(2)?;
            Ok(Term::var(name(&args[0])?, var_sort(&args[1])?))
        }
        "b" => {
            arity(2)?;
            Ok(Term::bound(num(&args[0])?, var_sort(&args[1])?))
        }
        "n" => {
            arity(1)?;
            let k: u64 = num(&args[0])?;
            if k == 0 || k > MAX_NUMERAL {
                return Err(format!("numeral {k} out of range"));
            }
            Ok(Term::numeral(k))
        }
        "eqi" => {
            arity(1)?;
            Ok(Term::eq_intro(read_term(&args[0])?))
        }
        "@" => {
            arity(2)?;
            Ok(Term::app(read_term(&args[0])?, read_term(&args[1])?))
        }
        "lam" | "pi" => {
            arity(5)?;
            let b = Binder {
                annot: annotation(&args[0])?,
                var_sort: var_sort(&args[1])?,
                name: name(&args[2])?,
                domain: read_term(&args[3])?,
                body: read_term(&args[4])?,
            };
            Ok(if head == "lam" { Term::lam(b) } else { Term::prod(b) })
        }
        "rec" => {
            arity(4)?;
            let v = args.iter().map(read_term).collect::<R<Vec<_>>>()?;
            Ok(Term::rec(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()))
        }
        _ => Err(format!("unknown term form `{head}`")),
    }
}

fn read_atom(s: &Sx) -> R<Atom> {
    let l = list(s)?;
    if l.len() != 2 {
        return Err("bad atom".into());
    }
    match word(&l[0])? {
        "var" => Ok(Atom::Var(name(&l[1])?)),
        "alien" => Ok(Atom::Alien(num(&l[1])?)),
        "slack" => Ok(Atom::Slack(num(&l[1])?)),
        w => Err(format!("bad atom kind `{w}`")),
    }
}

fn bigint(s: &Sx) -> R<BigInt> {
    num(s)
}

fn read_combination(s: &Sx) -> R<Combination> {
    let f = tagged(s, "comb", 3)?;
    let mult = list(&f[0])?;
    let coef = list(&f[1])?;
    if word(&mult[0])? != "mult" || word(&coef[0])? != "coef" {
        return Err("expected `(mult …)` and `(coef …)`".into());
    }
    let mut multipliers = BTreeMap::new();
    for m in &mult[1..] {
        let p = list(m)?;
        if p.len() != 2 || multipliers.insert(num(&p[0])?, bigint(&p[1])?).is_some() {
            return Err("bad multiplier".into());
        }
    }
    let mut coeffs = BTreeMap::new();
    for c in &coef[1..] {
        let p = list(c)?;
        if p.len() != 2 || coeffs.insert(read_atom(&p[0])?, bigint(&p[1])?).is_some() {
            return Err("bad coefficient".into());
        }
    }
    Ok(Combination { multipliers, coeffs, constant: bigint(&f[2])? })
}

fn read_witness(s: &Sx) -> R<ArithWitness> {
    let l = list(s)?;
    match l.first().map(word).transpose()? {
        Some("int") if l.len() == 2 => Ok(ArithWitness::IntCombination(read_combination(&l[1])?)),
        Some("cases") if l.len() >= 3 => Ok(ArithWitness::CaseEnumeration {
            bound: read_combination(&l[1])?,
            var: read_atom(&l[2])?,
            cases: l[3..].iter().map(read_witness).collect::<R<_>>()?,
        }),
        _ => Err("bad witness".into()),
    }
}

fn id_list(s: &Sx, tag: &str) -> R<Vec<usize>> {
    let l = list(s)?;
    if l.first().map(word).transpose()? != Some(tag) {
        return Err(format!("expected `({tag} …)`"));
    }
    l[1..].iter().map(num).collect()
}

fn read_step(s: &Sx) -> R<Step> {
    let l = list(s)?;
    if l.len() < 3 || word(&l[0])? != "step" {
        return Err("expected `(step scope kind …)`".into());
    }
    let scope = num(&l[1])?;
    let kind = word(&l[2])?;
    let a = &l[3..];
    let arity = |n: usize| if a.len() == n { Ok(()) } else { Err(format!("`{kind}` takes {n} fields")) };
    let kind = match kind {
        "beta" => {
            arity(3)?;
            let p = list(&a[2])?;
            if p.first().map(word).transpose()? != Some("paths") {
                return Err("expected `(paths …)`".into());
            }
            let paths = p[1..].iter().map(|q| list(q)?.iter().map(num).collect::<R<Vec<u8>>>()).collect::<R<_>>()?;
            StepKind::BetaIota { from: read_term(&a[0])?, to: read_term(&a[1])?, paths }
        }
        "hyp" => {
            arity(4)?;
            StepKind::Hyp { index: num(&a[0])?, lhs: read_term(&a[1])?, rhs: read_term(&a[2])?, beta_steps: num(&a[3])? }
        }
        "sym" => {
            arity(1)?;
            StepKind::Sym(num(&a[0])?)
        }
        "trans" => {
            arity(2)?;
            StepKind::Trans(num(&a[0])?, num(&a[1])?)
        }
        "congr" => {
            arity(2)?;
            StepKind::Congr(num(&a[0])?, num(&a[1])?)
        }
        "rec" => {
            arity(4)?;
            StepKind::RecCongr([num(&a[0])?, num(&a[1])?, num(&a[2])?, num(&a[3])?])
        }
        "eqi" => {
            arity(1)?;
            StepKind::EqCongr(num(&a[0])?)
        }
        "binder" => {
            arity(3)?;
            let prod = match word(&a[0])? {
                "pi" => true,
                "lam" => false,
                w => return Err(format!("bad binder kind `{w}`")),
            };
            StepKind::Binder { prod, domain: num(&a[1])?, body: num(&a[2])? }
        }
        "arith" => {
            arity(6)?;
            let premises = id_list(&a[0], "premises")?;
            let al = list(&a[1])?;
            if al.first().map(word).transpose()? != Some("aliens") {
                return Err("expected `(aliens …)`".into());
            }
            let mut aliens = Vec::new();
            for e in &al[1..] {
                let e = list(e)?;
                if e.len() != 3 {
                    return Err("bad alien entry".into());
                }
                let link = match word(&e[2]) {
                    Ok("-") => None,
                    _ => Some(num(&e[2])?),
                };
                aliens.push(AlienBinding { var: num(&e[0])?, term: read_term(&e[1])?, link });
            }
            StepKind::Arith {
                premises,
                aliens,
                lhs: read_term(&a[2])?,
                rhs: read_term(&a[3])?,
                witness: EntailmentWitness { below: read_witness(&a[4])?, above: read_witness(&a[5])? },
            }
        }
        "collapse" => {
            arity(3)?;
            StepKind::Collapse { absurd: num(&a[0])?, lhs: read_term(&a[1])?, rhs: read_term(&a[2])? }
        }
        k => return Err(format!("unknown step kind `{k}`")),
    };
    Ok(Step { scope, kind })
}

/// Parse the canonical text form. Parsing checks shape only; [`super::check`]
/// decides validity.
pub fn parse(src: &str) -> Result<Certificate, CertParseError> {
    let mut lines = src.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next = |what: &str| {
        lines.next().ok_or_else(|| CertParseError { line: 0, message: format!("missing {what}") })
    };
    let err = |line: usize| move |message: String| CertParseError { line, message };
    let (n, l) = next("header")?;
    if l != FORMAT_HEADER {
        return Err(err(n)(format!("expected `{FORMAT_HEADER}`")));
    }
    let (n, l) = next("context line")?;
    let context = read_line(l)
        .and_then(|s| {
            let f = tagged(&s, "context", 1)?;
            let w = word(&f[0])?;
            if w.len() != 16 {
                return Err("fingerprint must have 16 hex digits".into());
            }
            u64::from_str_radix(w, 16).map_err(|e| e.to_string())
        })
        .map_err(err(n))?;
    let (n, l) = next("goal line")?;
    let (lhs, rhs) = read_line(l)
        .and_then(|s| {
            let f = tagged(&s, "goal", 2)?;
            Ok((read_term(&f[0])?, read_term(&f[1])?))
        })
        .map_err(err(n))?;
    let count = |tag: &'static str| {
        move |s: Sx| -> R<usize> {
            let f = tagged(&s, tag, 1)?;
            num(&f[0])
        }
    };
    let (n, l) = next("scope count")?;
    let k = read_line(l).and_then(count("scopes")).map_err(err(n))?;
    let mut scopes = Vec::new();
    for _ in 0..k {
        let (n, l) = next("scope")?;
        let s = read_line(l)
            .and_then(|s| {
                let f = tagged(&s, "scope", 5)?;
                Ok(Scope {
                    parent: num(&f[0])?,
                    var: name(&f[1])?,
                    annot: annotation(&f[2])?,
                    var_sort: var_sort(&f[3])?,
                    domain: read_term(&f[4])?,
                })
            })
            .map_err(err(n))?;
        scopes.push(s);
    }
    let (n, l) = next("step count")?;
    let k = read_line(l).and_then(count("steps")).map_err(err(n))?;
    let mut steps = Vec::new();
    for _ in 0..k {
        let (n, l) = next("step")?;
        steps.push(read_line(l).and_then(|s| read_step(&s)).map_err(err(n))?);
    }
    if let Some((n, l)) = lines.next() {
        if !l.trim().is_empty() {
            return Err(err(n)("trailing content".into()));
        }
    }
    Ok(Certificate { context, lhs, rhs, scopes, steps })
}
