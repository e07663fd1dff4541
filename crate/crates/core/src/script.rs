//! Batch scripts: declarations, definitions and commands run in order
//! against a growing context.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::cert::{self, Certificate};
use crate::congruence::{Consistency, ConvError, Conversion};
use crate::reduce::{normalize, Status};
use crate::syntax::{err_at, is_identifier, parse_annotation, print_in_context, read_all, read_one, Elaborator, ParseError, Pos, Sexp};
use crate::term::{Annotation, Context, Name, Term};
use crate::typecheck::{Checker, TypeError};

pub const DEFAULT_FUEL: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Check(Term, Term),
    Infer(Term),
    Convert(Term, Term),
    Normalize(Term),
    Consistent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Decl { name: Name, annot: Annotation, ty: Term },
    /// Becomes a context binding; the body is checked and then forgotten.
    DefOpaque { name: Name, annot: Annotation, ty: Term, body: Term },
    /// Already inlined into every later item.
    DefTransparent { name: Name, body: Term },
    Command { command: Command, pos: Pos },
}

#[derive(Clone, Debug, Default)]
pub struct Script {
    pub items: Vec<Item>,
    /// Bindings introduced by the script, in order (unchecked).
    pub context: Context,
    pub definitions: HashMap<Name, Term>,
}

fn fresh_identifier(s: &Sexp, ctx: &Context, defs: &HashMap<Name, Term>) -> Result<Name, ParseError> {
    let x = s
        .atom()
        .filter(|a| is_identifier(a))
        .ok_or_else(|| err_at(s.pos(), format!("expected a name, found `{s}`")))?;
    if ctx.contains(x) || defs.contains_key(x) {
        return Err(err_at(s.pos(), format!("`{x}` is already defined")));
    }
    Ok(x.into())
}

pub fn parse(src: &str) -> Result<Script, ParseError> {
    let mut script = Script::default();
    for form in read_all(src)? {
        let pos = form.pos();
        let items = form.list().ok_or_else(|| err_at(pos, format!("expected a script item, found `{form}`")))?;
        let head = items.first().and_then(Sexp::atom).ok_or_else(|| err_at(pos, "expected a script keyword"))?;
        let args = &items[1..];
        let arity = |ok: &[usize]| {
            if ok.contains(&args.len()) {
                Ok(())
            } else {
                Err(err_at(pos, format!("`{head}` does not take {} arguments", args.len())))
            }
        };
        let item = {
            let el = Elaborator::new(&script.context, &script.definitions);
            match head {
                "decl" => {
                    arity(&[2, 3])?;
                    let name = fresh_identifier(&args[0], &script.context, &script.definitions)?;
                    let annot = if args.len() == 3 { parse_annotation(&args[1])? } else { Annotation::U };
                    Item::Decl { name, annot, ty: el.term(args.last().unwrap())? }
                }
                "def-opaque" => {
                    arity(&[3, 4])?;
                    let name = fresh_identifier(&args[0], &script.context, &script.definitions)?;
                    let annot = if args.len() == 4 { parse_annotation(&args[1])? } else { Annotation::R };
                    let n = args.len();
                    Item::DefOpaque { name, annot, ty: el.term(&args[n - 2])?, body: el.term(&args[n - 1])? }
                }
                "def-transparent" => {
                    arity(&[2])?;
                    let name = fresh_identifier(&args[0], &script.context, &script.definitions)?;
                    Item::DefTransparent { name, body: el.term(&args[1])? }
                }
                "check" => {
                    arity(&[2])?;
                    Item::Command { command: Command::Check(el.term(&args[0])?, el.term(&args[1])?), pos }
                }
                "convert" => {
                    arity(&[2])?;
                    Item::Command { command: Command::Convert(el.term(&args[0])?, el.term(&args[1])?), pos }
                }
                "infer" => {
                    arity(&[1])?;
                    Item::Command { command: Command::Infer(el.term(&args[0])?), pos }
                }
                "normalize" => {
                    arity(&[1])?;
                    Item::Command { command: Command::Normalize(el.term(&args[0])?), pos }
                }
                "consistent" => {
                    arity(&[0])?;
                    Item::Command { command: Command::Consistent, pos }
                }
                other => return Err(err_at(pos, format!("unknown script keyword `{other}`"))),
            }
        };
        match &item {
            Item::Decl { name, annot, ty } | Item::DefOpaque { name, annot, ty, .. } => {
                script.context.push(name.clone(), *annot, ty.clone()).expect("name checked fresh");
            }
            Item::DefTransparent { name, body } => {
                script.definitions.insert(name.clone(), body.clone());
            }
            Item::Command { .. } => {}
        }
        script.items.push(item);
    }
    Ok(script)
}

/// Parse a goal `t ~ u` against a script's context and definitions.
pub fn parse_goal(script: &Script, src: &str) -> Result<(Term, Term), ParseError> {
    let forms = read_all(src)?;
    match forms.as_slice() {
        [t, tilde, u] if tilde.atom() == Some("~") => {
            let el = Elaborator::new(&script.context, &script.definitions);
            Ok((el.term(t)?, el.term(u)?))
        }
        _ => Err(err_at(forms.first().map(Sexp::pos).unwrap_or(Pos { line: 1, col: 1 }), "expected `t ~ u`")),
    }
}

/// Parse a single term against a script's context and definitions.
pub fn parse_term_in(script: &Script, src: &str) -> Result<Term, ParseError> {
    Elaborator::new(&script.context, &script.definitions).term(&read_one(src)?)
}

/// The context as a script of declarations that parses back to it.
pub fn context_script(ctx: &Context) -> String {
    let mut out = String::new();
    for (i, b) in ctx.bindings().iter().enumerate() {
        let ty = print_in_context(&ctx.prefix(i), &b.ty);
        writeln!(out, "(decl {} {} {ty})", b.name, b.annot).unwrap();
    }
    out
}

#[derive(Clone, Debug)]
pub struct Options {
    pub fuel: u64,
    pub strict_iota_elim: bool,
    /// Print the merges of the saturation after `convert` and `consistent`.
    pub explain: bool,
    /// Produce certificates for accepted conversions and check obligations.
    pub emit_certificates: bool,
    /// Replay this certificate against every `convert` with its goal.
    pub verify: Option<Certificate>,
}

impl Default for Options {
    fn default() -> Self {
        Options { fuel: DEFAULT_FUEL, strict_iota_elim: false, explain: false, emit_certificates: false, verify: None }
    }
}

/// Process exit status, ordered by severity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exit {
    Success = 0,
    Rejected = 1,
    Limit = 2,
}

#[derive(Clone, Debug)]
pub struct EmittedCertificate {
    /// File stem, unique within a run.
    pub stem: String,
    pub context: Context,
    pub lhs: Term,
    pub rhs: Term,
    pub certificate: Certificate,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub lines: Vec<String>,
    pub exit: Exit,
    pub certificates: Vec<EmittedCertificate>,
}

impl Outcome {
    pub fn report(&self) -> String {
        self.lines.iter().map(|l| format!("{l}\n")).collect()
    }
}

struct Runner<'o> {
    opts: &'o Options,
    checker: Checker,
    ctx: Context,
    out: Outcome,
    verified: bool,
}

fn type_error_line(prefix: &str, ctx: &Context, e: &TypeError) -> String {
    let mut line = format!("{prefix} fail {e}");
    if let Some(exp) = &e.expected {
        write!(line, "; expected {}", print_in_context(ctx, exp)).unwrap();
    }
    if let Some(found) = &e.found {
        write!(line, "; found {}", print_in_context(ctx, found)).unwrap();
    }
    line
}

fn severity(e: &TypeError) -> Exit {
    if e.kind.is_resource() {
        Exit::Limit
    } else {
        Exit::Rejected
    }
}

impl Runner<'_> {
    fn emit(&mut self, line: String) {
        self.out.lines.push(line);
    }

    fn fail(&mut self, exit: Exit) {
        self.out.exit = self.out.exit.max(exit);
    }

    fn conv_failure(&mut self, prefix: &str, e: ConvError) {
        self.emit(format!("{prefix} unknown {e}"));
        self.fail(Exit::Limit);
    }

    fn explain(&mut self) {
        if !self.opts.explain {
            return;
        }
        if let Ok(trace) = self.checker.conv.trace(&self.ctx) {
            for (origin, a, b) in trace {
                let line = format!("MERGE {origin} {} {}", print_in_context(&self.ctx, &a), print_in_context(&self.ctx, &b));
                self.emit(line);
            }
        }
    }

    fn take_obligations(&mut self, index: usize) {
        for (j, ob) in std::mem::take(&mut self.checker.obligations).into_iter().enumerate() {
            let certificate = cert::emit(&ob.ctx, &ob.proof);
            self.out.certificates.push(EmittedCertificate {
                stem: format!("{index:03}-check-{j}"),
                context: ob.ctx,
                lhs: ob.lhs,
                rhs: ob.rhs,
                certificate,
            });
        }
    }

    /// Returns false when the script cannot continue.
    fn item(&mut self, item: &Item, index: usize) -> bool {
        match item {
            Item::Decl { name, annot, ty } => self.bind(name, *annot, ty, None),
            Item::DefOpaque { name, annot, ty, body } => self.bind(name, *annot, ty, Some(body)),
            Item::DefTransparent { name, body } => match self.checker.infer(&self.ctx, body) {
                Ok(_) => true,
                Err(e) => {
                    let line = type_error_line(&format!("DEF {name}"), &self.ctx, &e);
                    self.emit(line);
                    self.fail(severity(&e));
                    false
                }
            },
            Item::Command { command, .. } => {
                self.command(command, index);
                true
            }
        }
    }

    fn bind(&mut self, name: &Name, annot: Annotation, ty: &Term, body: Option<&Term>) -> bool {
        let r = self.checker.check_binding(&self.ctx, name, ty).and_then(|_| match body {
            Some(b) => self.checker.check(&self.ctx, b, ty),
            None => Ok(()),
        });
        self.checker.obligations.clear();
        match r {
            Ok(()) => {
                self.ctx.push(name.clone(), annot, ty.clone()).expect("checked fresh");
                true
            }
            Err(e) => {
                let prefix = if body.is_some() { "DEF" } else { "DECL" };
                let line = type_error_line(&format!("{prefix} {name}"), &self.ctx, &e);
                self.emit(line);
                self.fail(severity(&e));
                false
            }
        }
    }

    fn command(&mut self, command: &Command, index: usize) {
        match command {
            Command::Check(t, ty) => {
                let r = self.checker.check(&self.ctx, t, ty);
                match r {
                    Ok(()) => {
                        self.emit("CHECK ok".into());
                        if self.opts.emit_certificates {
                            self.take_obligations(index);
                        }
                    }
                    Err(e) => {
                        let line = type_error_line("CHECK", &self.ctx, &e);
                        self.emit(line);
                        self.fail(severity(&e));
                    }
                }
                self.checker.obligations.clear();
            }
            Command::Infer(t) => match self.checker.infer(&self.ctx, t) {
                Ok(ty) => {
                    let line = format!("INFER {}", print_in_context(&self.ctx, &ty));
                    self.emit(line);
                }
                Err(e) => {
                    let line = type_error_line("INFER", &self.ctx, &e);
                    self.emit(line);
                    self.fail(severity(&e));
                }
            },
            Command::Normalize(t) => {
                let r = normalize(t, self.opts.fuel);
                match r.status {
                    Status::NormalForm => {
                        let line = format!("NORMALIZE {}", print_in_context(&self.ctx, &r.term));
                        self.emit(line);
                    }
                    Status::FuelExhausted => {
                        self.emit(format!("NORMALIZE unknown no normal form within {} steps", r.steps));
                        self.fail(Exit::Limit);
                    }
                }
            }
            Command::Convert(t, u) => {
                let want = self.opts.emit_certificates;
                match self.checker.conv.judge(&self.ctx, t, u, want) {
                    Ok(j) if j.convertible => {
                        self.emit("CONVERT yes".into());
                        if let Some(proof) = j.proof {
                            let certificate = cert::emit(&self.ctx, &proof);
                            self.out.certificates.push(EmittedCertificate {
                                stem: format!("{index:03}-convert"),
                                context: self.ctx.clone(),
                                lhs: t.clone(),
                                rhs: u.clone(),
                                certificate,
                            });
                        }
                    }
                    Ok(j) if !j.diagnostics.is_empty() => {
                        self.emit(format!("CONVERT unknown {}", j.diagnostics.join("; ")));
                        self.fail(Exit::Limit);
                    }
                    Ok(_) => {
                        self.emit("CONVERT no".into());
                        self.fail(Exit::Rejected);
                    }
                    Err(e) => self.conv_failure("CONVERT", e),
                }
                self.explain();
                self.replay(t, u);
            }
            Command::Consistent => {
                match self.checker.conv.consistency(&self.ctx) {
                    Ok(Consistency::Consistent) => self.emit("CONSISTENT yes".into()),
                    Ok(Consistency::Inconsistent) => self.emit("CONSISTENT no".into()),
                    Ok(Consistency::Undetermined) => {
                        self.emit("CONSISTENT unknown".into());
                        self.fail(Exit::Limit);
                    }
                    Err(e) => self.conv_failure("CONSISTENT", e),
                }
                self.explain();
            }
        }
    }

    fn replay(&mut self, t: &Term, u: &Term) {
        let Some(c) = &self.opts.verify else { return };
        if (&c.lhs, &c.rhs) != (t, u) {
            return;
        }
        self.verified = true;
        match cert::check(&self.ctx, c, t, u) {
            Ok(()) => self.emit("CERT ok".into()),
            Err(e) => {
                self.emit(format!("CERT fail {e}"));
                self.fail(Exit::Rejected);
            }
        }
    }
}

pub fn run(script: &Script, opts: &Options) -> Outcome {
    let mut checker = Checker::new(Conversion::new(opts.fuel));
    checker.strict_iota_elim = opts.strict_iota_elim;
    checker.record = opts.emit_certificates;
    let mut r = Runner {
        opts,
        checker,
        ctx: Context::new(),
        out: Outcome { lines: Vec::new(), exit: Exit::Success, certificates: Vec::new() },
        verified: false,
    };
    for (i, item) in script.items.iter().enumerate() {
        if !r.item(item, i + 1) {
            r.emit(format!("ABORT {} items not run", script.items.len() - i - 1));
            break;
        }
    }
    if opts.verify.is_some() && !r.verified {
        r.emit("CERT fail no convert command has the certificate's goal".into());
        r.fail(Exit::Rejected);
    }
    r.out
}

/// Replay `certificate` for the goal `goal` (`t ~ u`) in the context
/// declared by `context_src`.
pub fn verify_certificate(context_src: &str, goal: &str, certificate: &str) -> Result<Result<(), cert::VerifyError>, String> {
    let script = parse(context_src).map_err(|e| format!("context: {e}"))?;
    let (t, u) = parse_goal(&script, goal).map_err(|e| format!("goal: {e}"))?;
    let c = cert::parse(certificate).map_err(|e| format!("certificate: {e}"))?;
    Ok(cert::check(&script.context, &c, &t, &u))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const GAMMA_EX: &str = "\
(decl x u nat)
(decl y u nat)
(decl t u nat)
(decl f u (-> nat nat))
(decl p1 r (eq nat t 2))
(decl p2 r (eq nat (app f (+ x 3)) (+ x 2)))
(decl p3 r (eq nat (+ (app f (+ y t)) 2) y))
(decl p4 r (eq nat (+ y 1) (+ x 2)))
";

    fn run_src(src: &str, opts: &Options) -> Outcome {
        run(&parse(src).unwrap(), opts)
    }

    #[test]
    fn worked_example() {
        let src = format!("{GAMMA_EX}(convert (+ y t) (+ x 3))\n(convert (app f (+ y t)) (app f (+ x 3)))\n(consistent)\n");
        let out = run_src(&src, &Options::default());
        assert_eq!(out.report(), "CONVERT yes\nCONVERT yes\nCONSISTENT no\n");
        assert_eq!(out.exit, Exit::Success);
    }

    #[test]
    fn exit_codes() {
        let out = run_src("(convert 0 (S 0))", &Options::default());
        assert_eq!((out.report().as_str(), out.exit), ("CONVERT no\n", Exit::Rejected));
        let out = run_src("(check 0 nat)", &Options::default());
        assert_eq!((out.report().as_str(), out.exit), ("CHECK ok\n", Exit::Success));
        let omega = "(normalize (app (lam x u nat (app x x)) (lam x u nat (app x x))))";
        let out = run_src(omega, &Options { fuel: 50, ..Options::default() });
        assert_eq!(out.exit, Exit::Limit);
    }

    /// Typing the zero case against `nat` instead of `Q 0` lets the
    /// recursor turn any `A : ⋆` into a proof of `A`.
    #[test]
    fn strict_zero_case_proves_anything() {
        let src = "(check (lam x u star (rec 0 (lam n u nat x) 0 (lam n u nat (lam p u x p)))) (pi x u star x))";
        let out = run_src(src, &Options::default());
        assert!(out.report().starts_with("CHECK fail"), "{}", out.report());
        let out = run_src(src, &Options { strict_iota_elim: true, ..Options::default() });
        assert_eq!((out.report().as_str(), out.exit), ("CHECK ok\n", Exit::Success));
    }

    #[test]
    fn declaration_failure_aborts() {
        let out = run_src("(decl a u 0)\n(check 0 nat)", &Options::default());
        assert_eq!(out.exit, Exit::Rejected);
        assert!(out.lines[0].starts_with("DECL a fail sort-error"), "{:?}", out.lines);
        assert_eq!(out.lines[1], "ABORT 1 items not run");
    }

    #[test]
    fn parse_errors() {
        assert!(parse("(decl x u nat)\n(decl x u nat)").is_err());
        let e = parse("(decl x u nat)\n(check y nat)").unwrap_err();
        assert_eq!((e.line, e.col), (2, 8));
        assert!(parse("(frobnicate)").is_err());
        assert!(parse("(decl x# u nat)").is_err());
    }

    #[test]
    fn definitions() {
        let src = "\
(decl a u nat)
(def-transparent double (lam n u nat (+ n n)))
(normalize (double (S a)))
(def-opaque two (eq nat 2 2) (eqi (lam P u (-> nat star) (lam h u (P 2) h))))
(infer two)
";
        let out = run_src(src, &Options::default());
        assert_eq!(out.report(), "NORMALIZE (+ (S a) (S a))\nINFER (eq nat 2 2)\n");
        let script = parse(src).unwrap();
        assert_eq!(script.context.lookup("two").unwrap().0, Annotation::R);
    }

    #[test]
    fn annotation_guard() {
        let src = "\
(decl a u nat)
(decl P u (-> nat star))
(def-opaque use (pi h r (eq nat a 0) (P a)) (lam h r (eq nat a 0) (pf h)))
";
        // `pf` is unbound: definitions are elaborated before they are checked.
        assert!(parse(src).is_err());
        let base = "\
(decl a u nat)
(decl P u (-> nat star))
(decl k u (P 0))
(decl e u (eq nat a 0))
(def-transparent use (lam h r (eq nat a 0) k))
(decl use2 u (pi h r (eq nat a 0) (P 0)))
";
        let out = run_src(&format!("{base}(infer (use e))"), &Options::default());
        assert!(out.lines[0].starts_with("INFER fail annotation-violation"), "{:?}", out.lines);
        let out = run_src(&format!("{base}(decl q r (eq nat a 0))\n(infer (use e))\n(infer (use2 e))"), &Options::default());
        assert_eq!(out.report(), "INFER (app P 0)\nINFER (app P 0)\n");
    }

    #[test]
    fn certificates_replay() {
        let src = format!("{GAMMA_EX}(convert (app f (+ y t)) (app f (+ x 3)))\n");
        let out = run_src(&src, &Options { emit_certificates: true, ..Options::default() });
        assert_eq!(out.certificates.len(), 1);
        let c = &out.certificates[0];
        let text = cert::print(&c.certificate);
        let ctx_src = context_script(&c.context);
        let goal = format!("{} ~ {}", print_in_context(&c.context, &c.lhs), print_in_context(&c.context, &c.rhs));
        assert_eq!(verify_certificate(&ctx_src, &goal, &text), Ok(Ok(())));

        let verify = Some(c.certificate.clone());
        let again = run_src(&src, &Options { verify, ..Options::default() });
        assert_eq!(again.report(), "CONVERT yes\nCERT ok\n");
    }

    #[test]
    fn explain_lists_merges() {
        let src = format!("{GAMMA_EX}(consistent)\n");
        let out = run_src(&src, &Options { explain: true, ..Options::default() });
        assert!(out.lines.iter().any(|l| l.starts_with("MERGE hyp")), "{:?}", out.lines);
        assert!(out.lines.iter().any(|l| l.starts_with("MERGE arith")));
    }
}
