//! Type inference and checking.
//!
//! Inference is syntax directed. Conversion is consulted where a type is
//! compared against an expected one: application arguments, the recursor's
//! motive and branches, `Eq` proofs, and explicit checks.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::congruence::{ConvError, Conversion, Proof};
use crate::reduce::{beta_reduce_to_equality, normalize, Status};
use crate::term::{binder_var_sort, Annotation, Binder, Binding, Context, Sort, Term, TermKind, VarSort};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    UnboundVariable,
    NotAFunction,
    DomainMismatch,
    AnnotationViolation,
    SortError,
    MotiveMismatch,
    DuplicateBinding,
    FuelExhausted,
    /// The congruence universe outgrew its budget.
    ResourceLimit,
}

impl ErrorKind {
    /// Whether the error reflects a resource limit rather than a rejection.
    pub fn is_resource(self) -> bool {
        matches!(self, ErrorKind::FuelExhausted | ErrorKind::ResourceLimit)
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::UnboundVariable => "unbound-variable",
            ErrorKind::NotAFunction => "not-a-function",
            ErrorKind::DomainMismatch => "domain-mismatch",
            ErrorKind::AnnotationViolation => "annotation-violation",
            ErrorKind::SortError => "sort-error",
            ErrorKind::MotiveMismatch => "motive-mismatch",
            ErrorKind::DuplicateBinding => "duplicate-binding",
            ErrorKind::FuelExhausted => "fuel-exhausted",
            ErrorKind::ResourceLimit => "resource-limit",
        })
    }
}

#[derive(Debug, Clone, Error)]
#[error("{kind} at /{}: {message}", path.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("/"))]
pub struct TypeError {
    pub kind: ErrorKind,
    /// Child indices from the checked term down to the offending subterm.
    pub path: Vec<u8>,
    pub message: String,
    pub expected: Option<Term>,
    pub found: Option<Term>,
}

/// A conversion the checker relied on, with its derivation.
#[derive(Clone, Debug)]
pub struct Obligation {
    pub ctx: Context,
    pub lhs: Term,
    pub rhs: Term,
    pub proof: Arc<Proof>,
}

pub struct Checker {
    pub conv: Conversion,
    /// Type `f0` against `nat`, as the typing figure literally states,
    /// instead of against `Q 0`.
    pub strict_iota_elim: bool,
    /// Keep a derivation for every non-syntactic conversion used.
    pub record: bool,
    pub obligations: Vec<Obligation>,
    /// Arithmetic queries that were abandoned at a resource limit.
    pub diagnostics: Vec<String>,
}

fn err(kind: ErrorKind, path: &[u8], message: impl Into<String>) -> TypeError {
    TypeError { kind, path: path.to_vec(), message: message.into(), expected: None, found: None }
}

fn mismatch(kind: ErrorKind, path: &[u8], message: &str, expected: &Term, found: &Term) -> TypeError {
    TypeError {
        kind,
        path: path.to_vec(),
        message: message.to_string(),
        expected: Some(expected.clone()),
        found: Some(found.clone()),
    }
}

/// `∀(T :^u ⋆). T → T → ⋆`
pub fn eq_symbol_type() -> Term {
    let t = Term::var("T", VarSort::Box);
    Term::pi("T", Annotation::U, Term::star(), &Term::arrow(t.clone(), Term::arrow(t, Term::star())))
}

/// Type of a constant, or `None` for terms that are not constants.
pub fn constant_type(t: &Term) -> Option<Term> {
    let nat_fn = |n: usize| (0..n).fold(Term::nat(), |acc, _| Term::arrow(Term::nat(), acc));
    Some(match t.kind() {
        TermKind::Sort(Sort::Star) => Term::boxed(),
        TermKind::Sort(Sort::Box) => Term::sort(Sort::Triangle),
        TermKind::Nat => Term::star(),
        TermKind::Zero => Term::nat(),
        TermKind::Succ => nat_fn(1),
        TermKind::Plus => nat_fn(2),
        TermKind::EqSym => eq_symbol_type(),
        _ => return None,
    })
}

impl Default for Checker {
    fn default() -> Self {
        Checker::new(Conversion::default())
    }
}

impl Checker {
    pub fn new(conv: Conversion) -> Checker {
        Checker { conv, strict_iota_elim: false, record: false, obligations: Vec::new(), diagnostics: Vec::new() }
    }

    fn conv_error(e: ConvError, path: &[u8]) -> TypeError {
        match e {
            ConvError::Fuel(_) => err(ErrorKind::FuelExhausted, path, e.to_string()),
            ConvError::Universe(_) => err(ErrorKind::ResourceLimit, path, e.to_string()),
            ConvError::NotClosed => err(ErrorKind::SortError, path, e.to_string()),
        }
    }

    /// `a ≃_Γ b`, recording the derivation when asked to.
    pub fn convertible(&mut self, ctx: &Context, a: &Term, b: &Term, path: &[u8]) -> Result<bool, TypeError> {
        if a == b {
            return Ok(true);
        }
        let j = self.conv.judge(ctx, a, b, self.record).map_err(|e| Self::conv_error(e, path))?;
        self.diagnostics.extend(j.diagnostics);
        if let Some(proof) = j.proof {
            self.obligations.push(Obligation { ctx: ctx.clone(), lhs: a.clone(), rhs: b.clone(), proof });
        }
        Ok(j.convertible)
    }

    fn nf(&self, t: &Term, path: &[u8]) -> Result<Term, TypeError> {
        let r = normalize(t, self.conv.fuel);
        match r.status {
            Status::NormalForm => Ok(r.term),
            Status::FuelExhausted => Err(err(ErrorKind::FuelExhausted, path, format!("no normal form within {} steps", r.steps))),
        }
    }

    pub fn infer(&mut self, ctx: &Context, t: &Term) -> Result<Term, TypeError> {
        self.infer_at(ctx, t, &mut Vec::new())
    }

    /// `Γ ⊢ t : ty`, where `ty` must itself have a sort.
    pub fn check(&mut self, ctx: &Context, t: &Term, ty: &Term) -> Result<(), TypeError> {
        self.sort_of(ctx, ty, &mut Vec::new())?;
        let found = self.infer(ctx, t)?;
        if !self.convertible(ctx, &found, ty, &[])? {
            return Err(mismatch(ErrorKind::DomainMismatch, &[], "type does not match", ty, &found));
        }
        Ok(())
    }

    /// Well-formedness of a sequence of bindings.
    pub fn check_context(&mut self, bindings: &[Binding]) -> Result<Context, TypeError> {
        let mut ctx = Context::new();
        for b in bindings {
            self.check_binding(&ctx, &b.name, &b.ty)?;
            ctx.push(b.name.clone(), b.annot, b.ty.clone())
                .map_err(|e| err(ErrorKind::DuplicateBinding, &[], e.to_string()))?;
        }
        Ok(ctx)
    }

    /// A binding `x : ty` may extend `ctx` when `ty` has sort `⋆` or `□`.
    pub fn check_binding(&mut self, ctx: &Context, x: &str, ty: &Term) -> Result<(), TypeError> {
        if ctx.contains(x) {
            return Err(err(ErrorKind::DuplicateBinding, &[], format!("`{x}` is already bound")));
        }
        match self.sort_of(ctx, ty, &mut Vec::new())? {
            Sort::Star | Sort::Box => Ok(()),
            Sort::Triangle => Err(err(ErrorKind::SortError, &[], format!("type of `{x}` is not a type or a kind"))),
        }
    }

    fn sort_of(&mut self, ctx: &Context, t: &Term, path: &mut Vec<u8>) -> Result<Sort, TypeError> {
        let ty = self.infer_at(ctx, t, path)?;
        match self.nf(&ty, path)?.kind() {
            TermKind::Sort(s) => Ok(*s),
            _ => Err(mismatch(ErrorKind::SortError, path, "expected a type", &Term::star(), &ty)),
        }
    }

    fn child<R>(
        &mut self,
        path: &mut Vec<u8>,
        i: u8,
        f: impl FnOnce(&mut Self, &mut Vec<u8>) -> Result<R, TypeError>,
    ) -> Result<R, TypeError> {
        path.push(i);
        let r = f(self, path);
        path.pop();
        r
    }

    /// Check the binder's domain and return the context extended with a
    /// fresh variable and the body opened at it.
    fn open(&mut self, ctx: &Context, b: &Binder, path: &mut Vec<u8>) -> Result<(Context, Term, Term), TypeError> {
        let s = self.child(path, 0, |me, p| me.sort_of(ctx, &b.domain, p))?;
        let expected = match s {
            Sort::Star => VarSort::Star,
            Sort::Box => VarSort::Box,
            Sort::Triangle => return Err(err(ErrorKind::SortError, path, "binder domain is neither a type nor a kind")),
        };
        if b.var_sort != expected || binder_var_sort(&b.domain) != expected {
            return Err(err(ErrorKind::SortError, path, "binder variable has the wrong sort"));
        }
        let x = ctx.fresh(&b.name, &Default::default());
        let var = Term::var(x.clone(), expected);
        let ext = ctx.extended(x, b.annot, b.domain.clone()).expect("fresh name");
        Ok((ext, b.body.instantiate(&var), var))
    }

    fn infer_at(&mut self, ctx: &Context, t: &Term, path: &mut Vec<u8>) -> Result<Term, TypeError> {
        if let Some(ty) = constant_type(t) {
            return Ok(ty);
        }
        match t.kind() {
            TermKind::Var(x, s) => {
                let (_, ty) = ctx
                    .lookup(x)
                    .map_err(|_| err(ErrorKind::UnboundVariable, path, format!("unknown variable `{x}`")))?;
                if ctx.var_sort(x) != Some(*s) {
                    return Err(err(ErrorKind::SortError, path, format!("variable `{x}` used at the wrong sort")));
                }
                Ok(ty.clone())
            }
            TermKind::Bound(..) => Err(err(ErrorKind::SortError, path, "loose bound variable")),
            TermKind::Sort(_) => Err(err(ErrorKind::SortError, path, "△ has no type")),
            TermKind::App(f, a) => {
                let tf = self.child(path, 0, |me, p| me.infer_at(ctx, f, p))?;
                let tf = self.nf(&tf, path)?;
                let TermKind::Prod(b) = tf.kind() else {
                    return Err(TypeError { found: Some(tf.clone()), ..err(ErrorKind::NotAFunction, path, "applied term is not a function") });
                };
                let ta = self.child(path, 1, |me, p| me.infer_at(ctx, a, p))?;
                path.push(1);
                let ok = self.convertible(ctx, &ta, &b.domain, path);
                path.pop();
                if !ok? {
                    path.push(1);
                    let e = mismatch(ErrorKind::DomainMismatch, path, "argument type does not match", &b.domain, &ta);
                    path.pop();
                    return Err(e);
                }
                if b.annot == Annotation::R {
                    if let Some(ex) = beta_reduce_to_equality(&b.domain, self.conv.fuel) {
                        if !self.convertible(ctx, &ex.lhs, &ex.rhs, path)? {
                            return Err(mismatch(
                                ErrorKind::AnnotationViolation,
                                path,
                                "r-annotated argument needs its equation to hold by conversion",
                                &ex.lhs,
                                &ex.rhs,
                            ));
                        }
                    }
                }
                Ok(b.body.instantiate(a))
            }
            TermKind::Lam(b) => {
                let (ext, body, var) = self.open(ctx, b, path)?;
                let u = self.child(path, 1, |me, p| me.infer_at(&ext, &body, p))?;
                self.child(path, 1, |me, p| me.sort_of(&ext, &u, p))?;
                let TermKind::Var(x, _) = var.kind() else { unreachable!() };
                Ok(Term::prod(Binder { body: u.abstract_var(x), ..b.clone() }))
            }
            TermKind::Prod(b) => {
                let (ext, body, _) = self.open(ctx, b, path)?;
                let s = self.child(path, 1, |me, p| me.sort_of(&ext, &body, p))?;
                Ok(Term::sort(s))
            }
            TermKind::EqIntro(p) => {
                let tp = self.child(path, 0, |me, q| me.infer_at(ctx, p, q))?;
                let tp = self.nf(&tp, path)?;
                let Some((ty, t1, t2)) = leibniz_parts(&tp) else {
                    return Err(mismatch(
                        ErrorKind::DomainMismatch,
                        path,
                        "expected a proof of ∀(P : T → ⋆). P t1 → P t2",
                        &leibniz(&Term::var("T", VarSort::Box), &Term::var("t1", VarSort::Star), &Term::var("t2", VarSort::Star)),
                        &tp,
                    ));
                };
                let template = leibniz(&ty, &t1, &t2);
                if !self.convertible(ctx, &tp, &template, path)? {
                    return Err(mismatch(ErrorKind::DomainMismatch, path, "not a Leibniz equality proof", &template, &tp));
                }
                for side in [&t1, &t2] {
                    let ts = self.infer_at(ctx, side, path)?;
                    if !self.convertible(ctx, &ts, &ty, path)? {
                        return Err(mismatch(ErrorKind::DomainMismatch, path, "equated terms have different types", &ty, &ts));
                    }
                }
                Ok(Term::apps(Term::eq_sym(), [ty, t1, t2]))
            }
            TermKind::Rec(s, q, f0, fs) => {
                let ts = self.child(path, 0, |me, p| me.infer_at(ctx, s, p))?;
                if !self.convertible(ctx, &ts, &Term::nat(), path)? {
                    path.push(0);
                    let e = mismatch(ErrorKind::DomainMismatch, path, "recursor scrutinee is not a natural number", &Term::nat(), &ts);
                    path.pop();
                    return Err(e);
                }
                let motive = Term::arrow(Term::nat(), Term::star());
                let expectations = [
                    (1u8, q, motive),
                    (2, f0, if self.strict_iota_elim { Term::nat() } else { Term::app(q.clone(), Term::zero()) }),
                    (3, fs, succ_branch_type(q)),
                ];
                for (i, part, expected) in expectations {
                    path.push(i);
                    let r = self.infer_at(ctx, part, path).and_then(|found| {
                        if self.convertible(ctx, &found, &expected, path)? {
                            Ok(())
                        } else {
                            Err(mismatch(ErrorKind::MotiveMismatch, path, "recursor component has the wrong type", &expected, &found))
                        }
                    });
                    path.pop();
                    r?;
                }
                Ok(Term::app(q.clone(), s.clone()))
            }
            _ => unreachable!("constants are handled above"),
        }
    }
}

/// `∀(n :^u nat). Q n → Q (S n)`
pub fn succ_branch_type(q: &Term) -> Term {
    let n = Term::var("n", VarSort::Star);
    let body = Term::arrow(Term::app(q.clone(), n.clone()), Term::app(q.clone(), Term::succ(n)));
    Term::pi("n", Annotation::U, Term::nat(), &body)
}

/// `∀(P :^u T → ⋆). P t1 → P t2`
pub fn leibniz(ty: &Term, t1: &Term, t2: &Term) -> Term {
    let p = Term::var("P", VarSort::Box);
    let body = Term::arrow(Term::app(p.clone(), t1.clone()), Term::app(p, t2.clone()));
    Term::pi("P", Annotation::U, Term::arrow(ty.clone(), Term::star()), &body)
}

/// Read `T`, `t1`, `t2` off a type shaped like [`leibniz`], ignoring
/// annotations; conversion against the template checks the rest.
fn leibniz_parts(t: &Term) -> Option<(Term, Term, Term)> {
    let TermKind::Prod(outer) = t.kind() else { return None };
    let TermKind::Prod(pred) = outer.domain.kind() else { return None };
    if pred.body != Term::star() {
        return None;
    }
    let ty = pred.domain.clone();
    let TermKind::Prod(imp) = outer.body.kind() else { return None };
    let (p1, t1) = imp.domain.as_app()?;
    let (p2, t2) = imp.body.as_app()?;
    if !matches!(p1.kind(), TermKind::Bound(0, _)) || !matches!(p2.kind(), TermKind::Bound(1, _)) {
        return None;
    }
    // t1 sits under P, t2 under P and the premise.
    if t1.has_bound(0) || t2.has_bound(0) || t2.has_bound(1) {
        return None;
    }
    let t1 = t1.shift(-1, 0);
    let t2 = t2.shift(-2, 0);
    (ty.is_locally_closed() && t1.is_locally_closed() && t2.is_locally_closed()).then_some((ty, t1, t2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term, print_term};

    fn ctx(decls: &[(&str, Annotation, &str)]) -> Context {
        let mut g = Context::new();
        for (x, a, ty) in decls {
            let t = parse_term(&g, ty).unwrap();
            g.push(*x, *a, t).unwrap();
        }
        g
    }

    fn infer(g: &Context, src: &str) -> Result<Term, TypeError> {
        Checker::default().infer(g, &parse_term(g, src).unwrap())
    }

    #[test]
    fn axioms() {
        let g = Context::new();
        let show = |s: &str| print_term(&infer(&g, s).unwrap());
        assert_eq!(show("star"), "box");
        assert_eq!(show("box"), "triangle");
        assert_eq!(show("0"), "nat");
        assert_eq!(show("nat"), "star");
        assert_eq!(infer(&g, "eq").unwrap(), eq_symbol_type());
        assert_eq!(infer(&g, "triangle").unwrap_err().kind, ErrorKind::SortError);
    }

    #[test]
    fn recursor_on_numerals() {
        let g = Context::new();
        let t = infer(&g, "(rec (S 0) (lam n u nat nat) 0 (lam n u nat (lam p u nat (S p))))").unwrap();
        assert!(Checker::default().convertible(&g, &t, &Term::nat(), &[]).unwrap());
        let mut strict = Checker::default();
        strict.strict_iota_elim = true;
        let g = ctx(&[("P", Annotation::U, "(-> nat star)"), ("g", Annotation::U, "(pi n u nat (-> (P n) (P (S n))))")]);
        let bad_motive = parse_term(&g, "(rec 0 P 0 g)").unwrap();
        assert!(strict.infer(&g, &bad_motive).is_ok());
        assert_eq!(Checker::default().infer(&g, &bad_motive).unwrap_err().kind, ErrorKind::MotiveMismatch);
    }

    #[test]
    fn commutativity_in_types() {
        let g = ctx(&[
            ("a", Annotation::U, "nat"),
            ("b", Annotation::U, "nat"),
            ("P", Annotation::U, "(-> nat star)"),
            ("q", Annotation::U, "(P (+ a b))"),
        ]);
        let mut c = Checker::default();
        c.check(&g, &parse_term(&g, "q").unwrap(), &parse_term(&g, "(P (+ b a))").unwrap()).unwrap();
        let e = c.check(&g, &parse_term(&g, "q").unwrap(), &parse_term(&g, "(P a)").unwrap()).unwrap_err();
        assert_eq!(e.kind, ErrorKind::DomainMismatch);
        let e = c.check(&g, &Term::zero(), &Term::star()).unwrap_err();
        assert_eq!(e.kind, ErrorKind::DomainMismatch);
    }

    #[test]
    fn restricted_application() {
        let g = ctx(&[
            ("a", Annotation::U, "nat"),
            ("use", Annotation::U, "(pi h r (eq nat a 0) nat)"),
            ("pf", Annotation::U, "(eq nat a 0)"),
        ]);
        let e = infer(&g, "(use pf)").unwrap_err();
        assert_eq!(e.kind, ErrorKind::AnnotationViolation);
        let mut g2 = g.clone();
        g2.push("h0", Annotation::R, parse_term(&g, "(eq nat a 0)").unwrap()).unwrap();
        assert!(infer(&g2, "(use pf)").is_ok());
    }

    #[test]
    fn leibniz_intro() {
        let g = ctx(&[("p", Annotation::U, "(pi P u (-> nat star) (-> (P 1) (P 1)))")]);
        let t = infer(&g, "(eqi p)").unwrap();
        assert_eq!(print_term(&t), "(eq nat 1 1)");
        let g = ctx(&[("p", Annotation::U, "(pi P u (-> nat star) (-> (P 1) (P 2)))")]);
        assert_eq!(print_term(&infer(&g, "(eqi p)").unwrap()), "(eq nat 1 2)");
        assert_eq!(infer(&g, "(eqi 0)").unwrap_err().kind, ErrorKind::DomainMismatch);
    }

    #[test]
    fn contexts() {
        let mut c = Checker::default();
        let nat = Binding { name: "x".into(), annot: Annotation::U, ty: Term::nat() };
        assert!(c.check_context(&[nat.clone()]).is_ok());
        assert_eq!(c.check_context(&[nat.clone(), nat.clone()]).unwrap_err().kind, ErrorKind::DuplicateBinding);
        let zero = Binding { name: "x".into(), annot: Annotation::U, ty: Term::zero() };
        assert_eq!(c.check_context(&[zero]).unwrap_err().kind, ErrorKind::SortError);
    }

    #[test]
    fn error_paths_point_into_the_term() {
        let g = ctx(&[("f", Annotation::U, "(-> nat nat)")]);
        let e = infer(&g, "(lam x u nat (f star))").unwrap_err();
        assert_eq!(e.kind, ErrorKind::DomainMismatch);
        assert_eq!(e.path, vec![1, 1]);
    }
}
