//! Pseudo-terms, annotations, contexts and syntactic classes.
//!
//! Terms are locally nameless: bound variables are de Bruijn indices and free
//! variables carry names. Binder names are display hints only, so
//! α-equivalent terms are structurally equal. Every node caches its hash,
//! size, class and the range of loose bound indices.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Star,
    Box,
    Triangle,
}

/// Binder annotation, ordered `U < R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Annotation {
    U,
    R,
}

impl fmt::Display for Annotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Annotation::U => "u",
            Annotation::R => "r",
        })
    }
}

/// The sort a variable ranges over: `Star` for object variables (whose type
/// is a type), `Box` for type variables (whose type is a kind).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarSort {
    Star,
    Box,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Class {
    O,
    P,
    K,
    E,
    Triangle,
    Bottom,
}

impl Class {
    pub fn succ(self) -> Class {
        match self {
            Class::O => Class::P,
            Class::P => Class::K,
            Class::K => Class::E,
            Class::E => Class::Triangle,
            Class::Triangle | Class::Bottom => Class::Bottom,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Binder {
    /// Display hint, ignored by equality and hashing.
    pub name: Name,
    pub annot: Annotation,
    pub var_sort: VarSort,
    pub domain: Term,
    pub body: Term,
}

impl PartialEq for Binder {
    fn eq(&self, other: &Self) -> bool {
        self.annot == other.annot
            && self.var_sort == other.var_sort
            && self.domain == other.domain
            && self.body == other.body
    }
}
impl Eq for Binder {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TermKind {
    Var(Name, VarSort),
    Bound(u32, VarSort),
    Sort(Sort),
    Nat,
    EqSym,
    Zero,
    Succ,
    Plus,
    EqIntro(Term),
    App(Term, Term),
    Lam(Binder),
    Prod(Binder),
    /// `Rec^W(scrutinee, motive){zero, succ}`
    Rec(Term, Term, Term, Term),
}

struct Node {
    kind: TermKind,
    hash: u64,
    size: u32,
    /// One more than the largest loose bound index; zero when locally closed.
    loose: u32,
    class: Class,
}

#[derive(Clone)]
pub struct Term(Arc<Node>);

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.hash == other.0.hash
                && self.0.size == other.0.size
                && self.0.kind == other.0.kind)
    }
}
impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

fn var_sort_class(s: VarSort) -> Class {
    match s {
        VarSort::Star => Class::O,
        VarSort::Box => Class::P,
    }
}

fn binder_ok(b: &Binder) -> bool {
    matches!(
        (b.var_sort, b.domain.class()),
        (VarSort::Star, Class::P) | (VarSort::Box, Class::K)
    )
}

fn compute_class(kind: &TermKind) -> Class {
    use TermKind::*;
    match kind {
        Var(_, s) | Bound(_, s) => var_sort_class(*s),
        Zero | Succ | Plus => Class::O,
        Nat | EqSym => Class::P,
        Sort(crate::term::Sort::Star) => Class::K,
        Sort(crate::term::Sort::Box) => Class::E,
        Sort(crate::term::Sort::Triangle) => Class::Triangle,
        App(f, a) => match (f.class(), a.class()) {
            (c @ (Class::O | Class::P | Class::K), Class::O | Class::P) => c,
            _ => Class::Bottom,
        },
        Lam(b) if binder_ok(b) => match b.body.class() {
            c @ (Class::O | Class::P | Class::K) => c,
            _ => Class::Bottom,
        },
        Prod(b) if binder_ok(b) => match b.body.class() {
            c @ (Class::P | Class::K | Class::E) => c,
            _ => Class::Bottom,
        },
        Lam(_) | Prod(_) => Class::Bottom,
        Rec(s, _, z, st) => {
            if s.class() == Class::O && z.class() == Class::O && st.class() == Class::O {
                Class::O
            } else {
                Class::Bottom
            }
        }
        // Proofs of equalities live with the objects.
        EqIntro(p) => {
            if p.class() == Class::O {
                Class::O
            } else {
                Class::Bottom
            }
        }
    }
}

impl Term {
    fn mk(kind: TermKind) -> Term {
        use TermKind::*;
        let mut h = DefaultHasher::new();
        let (size, loose) = match &kind {
            Var(n, s) => {
                0u8.hash(&mut h);
                n.hash(&mut h);
                s.hash(&mut h);
                (1, 0)
            }
            Bound(i, s) => {
                1u8.hash(&mut h);
                i.hash(&mut h);
                s.hash(&mut h);
                (1, i + 1)
            }
            Sort(s) => {
                2u8.hash(&mut h);
                s.hash(&mut h);
                (1, 0)
            }
            Nat => {
                3u8.hash(&mut h);
                (1, 0)
            }
            EqSym => {
                4u8.hash(&mut h);
                (1, 0)
            }
            Zero => {
                5u8.hash(&mut h);
                (1, 0)
            }
            Succ => {
                6u8.hash(&mut h);
                (1, 0)
            }
            Plus => {
                7u8.hash(&mut h);
                (1, 0)
            }
            EqIntro(p) => {
                8u8.hash(&mut h);
                h.write_u64(p.0.hash);
                (1 + p.size(), p.0.loose)
            }
            App(f, a) => {
                9u8.hash(&mut h);
                h.write_u64(f.0.hash);
                h.write_u64(a.0.hash);
                (1 + f.size() + a.size(), f.0.loose.max(a.0.loose))
            }
            Lam(b) | Prod(b) => {
                (if matches!(kind, Lam(_)) { 10u8 } else { 11u8 }).hash(&mut h);
                b.annot.hash(&mut h);
                b.var_sort.hash(&mut h);
                h.write_u64(b.domain.0.hash);
                h.write_u64(b.body.0.hash);
                (
                    1 + b.domain.size() + b.body.size(),
                    b.domain.0.loose.max(b.body.0.loose.saturating_sub(1)),
                )
            }
            Rec(s, m, z, st) => {
                12u8.hash(&mut h);
                for t in [s, m, z, st] {
                    h.write_u64(t.0.hash);
                }
                (
                    1 + s.size() + m.size() + z.size() + st.size(),
                    s.0.loose.max(m.0.loose).max(z.0.loose).max(st.0.loose),
                )
            }
        };
        let class = compute_class(&kind);
        Term(Arc::new(Node {
            kind,
            hash: h.finish(),
            size: size.min(u32::MAX as usize as u32),
            loose,
            class,
        }))
    }

    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }
    pub fn size(&self) -> u32 {
        self.0.size
    }
    pub fn structural_hash(&self) -> u64 {
        self.0.hash
    }
    /// Syntactic class of the term.
    pub fn class(&self) -> Class {
        self.0.class
    }
    pub fn is_locally_closed(&self) -> bool {
        self.0.loose == 0
    }
    pub fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn var(n: impl Into<Name>, s: VarSort) -> Term {
        Term::mk(TermKind::Var(n.into(), s))
    }
    pub fn bound(i: u32, s: VarSort) -> Term {
        Term::mk(TermKind::Bound(i, s))
    }
    pub fn sort(s: Sort) -> Term {
        Term::mk(TermKind::Sort(s))
    }
    pub fn star() -> Term {
        Term::sort(Sort::Star)
    }
    pub fn boxed() -> Term {
        Term::sort(Sort::Box)
    }
    pub fn nat() -> Term {
        Term::mk(TermKind::Nat)
    }
    pub fn eq_sym() -> Term {
        Term::mk(TermKind::EqSym)
    }
    pub fn zero() -> Term {
        Term::mk(TermKind::Zero)
    }
    pub fn succ_const() -> Term {
        Term::mk(TermKind::Succ)
    }
    pub fn plus_const() -> Term {
        Term::mk(TermKind::Plus)
    }
    pub fn eq_intro(p: Term) -> Term {
        Term::mk(TermKind::EqIntro(p))
    }
    pub fn app(f: Term, a: Term) -> Term {
        Term::mk(TermKind::App(f, a))
    }
    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }
    pub fn lam(b: Binder) -> Term {
        Term::mk(TermKind::Lam(b))
    }
    pub fn prod(b: Binder) -> Term {
        Term::mk(TermKind::Prod(b))
    }
    pub fn rec(scrutinee: Term, motive: Term, zero: Term, succ: Term) -> Term {
        Term::mk(TermKind::Rec(scrutinee, motive, zero, succ))
    }

    /// `S t`
    pub fn succ(t: Term) -> Term {
        Term::app(Term::succ_const(), t)
    }
    /// `t +̇ u`
    pub fn add(t: Term, u: Term) -> Term {
        Term::app(Term::app(Term::plus_const(), t), u)
    }
    /// `t ≐_ty u`
    pub fn eq(ty: Term, t: Term, u: Term) -> Term {
        Term::apps(Term::eq_sym(), [ty, t, u])
    }
    pub fn numeral(n: u64) -> Term {
        (0..n).fold(Term::zero(), |t, _| Term::succ(t))
    }

    /// Non-dependent product `dom → cod`, annotated `u`.
    pub fn arrow(dom: Term, cod: Term) -> Term {
        let var_sort = binder_var_sort(&dom);
        Term::prod(Binder {
            name: name("_"),
            annot: Annotation::U,
            var_sort,
            domain: dom,
            body: cod.shift(1, 0),
        })
    }

    /// Dependent product with `body` given over a free variable `x` that is
    /// abstracted into the binder.
    pub fn pi(x: &str, annot: Annotation, dom: Term, body: &Term) -> Term {
        let var_sort = binder_var_sort(&dom);
        Term::prod(Binder {
            name: name(x),
            annot,
            var_sort,
            domain: dom,
            body: body.abstract_var(x),
        })
    }

    pub fn lambda(x: &str, annot: Annotation, dom: Term, body: &Term) -> Term {
        let var_sort = binder_var_sort(&dom);
        Term::lam(Binder {
            name: name(x),
            annot,
            var_sort,
            domain: dom,
            body: body.abstract_var(x),
        })
    }

    pub fn as_app(&self) -> Option<(&Term, &Term)> {
        match self.kind() {
            TermKind::App(f, a) => Some((f, a)),
            _ => None,
        }
    }

    /// Head and arguments of an application spine.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut t = self;
        while let TermKind::App(f, a) = t.kind() {
            args.push(a);
            t = f;
        }
        args.reverse();
        (t, args)
    }

    /// `Some(t)` when the term is `S t`.
    pub fn as_succ(&self) -> Option<&Term> {
        match self.kind() {
            TermKind::App(f, a) if matches!(f.kind(), TermKind::Succ) => Some(a),
            _ => None,
        }
    }

    /// `Some((t, u))` when the term is `t +̇ u`.
    pub fn as_add(&self) -> Option<(&Term, &Term)> {
        match self.kind() {
            TermKind::App(f, u) => match f.kind() {
                TermKind::App(p, t) if matches!(p.kind(), TermKind::Plus) => Some((t, u)),
                _ => None,
            },
            _ => None,
        }
    }

    /// `Some((ty, t, u))` when the term is `t ≐_ty u`.
    pub fn as_eq(&self) -> Option<(&Term, &Term, &Term)> {
        let (h, args) = self.spine();
        if matches!(h.kind(), TermKind::EqSym) && args.len() == 3 {
            Some((args[0], args[1], args[2]))
        } else {
            None
        }
    }

    /// Value of a closed numeral `S(…S(0))`.
    pub fn as_numeral(&self) -> Option<u64> {
        let mut n = 0u64;
        let mut t = self;
        loop {
            match t.kind() {
                TermKind::Zero => return Some(n),
                _ => {
                    t = t.as_succ()?;
                    n += 1;
                }
            }
        }
    }

    pub fn children(&self) -> Vec<&Term> {
        use TermKind::*;
        match self.kind() {
            EqIntro(p) => vec![p],
            App(f, a) => vec![f, a],
            Lam(b) | Prod(b) => vec![&b.domain, &b.body],
            Rec(s, m, z, st) => vec![s, m, z, st],
            _ => vec![],
        }
    }

    /// Subterm at a child-index path.
    pub fn at_path(&self, path: &[u8]) -> Option<&Term> {
        let mut t = self;
        for &i in path {
            t = *t.children().get(i as usize)?;
        }
        Some(t)
    }

    /// Rebuild the node with new children (same arity as `children()`).
    pub fn with_children(&self, ch: Vec<Term>) -> Term {
        use TermKind::*;
        let mut it = ch.into_iter();
        let mut next = || it.next().expect("arity");
        match self.kind() {
            EqIntro(_) => Term::eq_intro(next()),
            App(_, _) => {
                let f = next();
                Term::app(f, next())
            }
            Lam(b) => {
                let domain = next();
                Term::lam(Binder { domain, body: next(), ..b.clone() })
            }
            Prod(b) => {
                let domain = next();
                Term::prod(Binder { domain, body: next(), ..b.clone() })
            }
            Rec(..) => {
                let (s, m, z) = (next(), next(), next());
                Term::rec(s, m, z, next())
            }
            _ => self.clone(),
        }
    }

    /// Number of binders crossed when descending into child `i`.
    pub fn binders_at_child(&self, i: usize) -> u32 {
        match self.kind() {
            TermKind::Lam(_) | TermKind::Prod(_) if i == 1 => 1,
            _ => 0,
        }
    }

    /// Add `d` to every bound index `>= cutoff`.
    pub fn shift(&self, d: i64, cutoff: u32) -> Term {
        if self.0.loose <= cutoff || d == 0 {
            return self.clone();
        }
        match self.kind() {
            TermKind::Bound(i, s) => Term::bound((*i as i64 + d) as u32, *s),
            _ => self.map_children(cutoff, &mut |c, depth| c.shift(d, depth)),
        }
    }

    fn map_children(&self, depth: u32, f: &mut dyn FnMut(&Term, u32) -> Term) -> Term {
        let ch: Vec<Term> = self
            .children()
            .into_iter()
            .enumerate()
            .map(|(i, c)| f(c, depth + self.binders_at_child(i)))
            .collect();
        self.with_children(ch)
    }

    /// Replace bound index `depth` by `arg` (itself valid at depth 0),
    /// lowering the indices above it.
    pub fn subst_bound(&self, depth: u32, arg: &Term) -> Term {
        if self.0.loose <= depth {
            return self.clone();
        }
        match self.kind() {
            TermKind::Bound(i, s) => {
                if *i == depth {
                    arg.shift(depth as i64, 0)
                } else {
                    Term::bound(i - 1, *s)
                }
            }
            _ => self.map_children(depth, &mut |c, d| c.subst_bound(d, arg)),
        }
    }

    /// Body instantiation: `body[0 := arg]`.
    pub fn instantiate(&self, arg: &Term) -> Term {
        self.subst_bound(0, arg)
    }

    /// Turn free variable `x` into bound index 0 (shifting others up).
    pub fn abstract_var(&self, x: &str) -> Term {
        self.abstract_at(x, 0)
    }

    fn abstract_at(&self, x: &str, depth: u32) -> Term {
        match self.kind() {
            TermKind::Var(n, s) if &**n == x => Term::bound(depth, *s),
            TermKind::Bound(i, s) if *i >= depth => Term::bound(i + 1, *s),
            TermKind::Var(..) | TermKind::Bound(..) => self.clone(),
            _ if !self.mentions_free(x) && self.0.loose <= depth => self.clone(),
            _ => self.map_children(depth, &mut |c, d| c.abstract_at(x, d)),
        }
    }

    fn mentions_free(&self, x: &str) -> bool {
        match self.kind() {
            TermKind::Var(n, _) => &**n == x,
            _ => self.children().into_iter().any(|c| c.mentions_free(x)),
        }
    }

    /// Capture-free substitution of the free variable `x` by `u`.
    pub fn subst_free(&self, x: &str, u: &Term) -> Term {
        self.subst_free_at(x, u, 0)
    }

    fn subst_free_at(&self, x: &str, u: &Term, depth: u32) -> Term {
        match self.kind() {
            TermKind::Var(n, _) if &**n == x => u.shift(depth as i64, 0),
            TermKind::Var(..) | TermKind::Bound(..) => self.clone(),
            _ if !self.mentions_free(x) => self.clone(),
            _ => self.map_children(depth, &mut |c, d| c.subst_free_at(x, u, d)),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Name>) {
        match self.kind() {
            TermKind::Var(n, _) => {
                out.insert(n.clone());
            }
            _ => {
                for c in self.children() {
                    c.collect_free(out);
                }
            }
        }
    }

    /// Whether bound index 0 occurs (i.e. the body of a binder depends on it).
    pub fn has_bound(&self, idx: u32) -> bool {
        if self.0.loose <= idx {
            return false;
        }
        match self.kind() {
            TermKind::Bound(i, _) => *i == idx,
            _ => self
                .children()
                .into_iter()
                .enumerate()
                .any(|(k, c)| c.has_bound(idx + self.binders_at_child(k))),
        }
    }

    /// Locally closed subterms (children under binders are skipped), in
    /// post-order without duplicates.
    pub fn closed_subterms(&self) -> Vec<Term> {
        let mut out = Vec::new();
        let mut seen = std::collections::HashSet::new();
        self.collect_closed(&mut out, &mut seen);
        out
    }

    fn collect_closed(&self, out: &mut Vec<Term>, seen: &mut std::collections::HashSet<Term>) {
        if !self.is_locally_closed() || seen.contains(self) {
            return;
        }
        for (i, c) in self.children().into_iter().enumerate() {
            if self.binders_at_child(i) == 0 {
                c.collect_closed(out, seen);
            }
        }
        seen.insert(self.clone());
        out.push(self.clone());
    }
}

/// Sort tag of a variable bound by a binder with this domain: object
/// variables range over types (class P), type variables over kinds.
pub fn binder_var_sort(domain: &Term) -> VarSort {
    match domain.class() {
        Class::K => VarSort::Box,
        _ => VarSort::Star,
    }
}

pub fn classify(t: &Term) -> Class {
    t.class()
}

/// Fresh variant of `base` (`base'`, `base''`, …) rejected by `taken`.
pub fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> Name {
    let base = if base.is_empty() || base == "_" { "x" } else { base };
    let mut cand = base.to_string();
    while taken(&cand) {
        cand.push('\'');
    }
    name(&cand)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binding {
    pub name: Name,
    pub annot: Annotation,
    pub ty: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContextError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(Name),
    #[error("variable `{0}` is already bound")]
    Duplicate(Name),
}

/// Ordered typing environment with distinct names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Context {
    bindings: Vec<Binding>,
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bindings(&self) -> &[Binding] {
        &self.bindings
    }
    pub fn len(&self) -> usize {
        self.bindings.len()
    }
    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn contains(&self, x: &str) -> bool {
        self.bindings.iter().any(|b| &*b.name == x)
    }

    pub fn push(&mut self, x: impl Into<Name>, annot: Annotation, ty: Term) -> Result<(), ContextError> {
        let x = x.into();
        if self.contains(&x) {
            return Err(ContextError::Duplicate(x));
        }
        self.bindings.push(Binding { name: x, annot, ty });
        Ok(())
    }

    pub fn extended(&self, x: impl Into<Name>, annot: Annotation, ty: Term) -> Result<Context, ContextError> {
        let mut c = self.clone();
        c.push(x, annot, ty)?;
        Ok(c)
    }

    pub fn lookup(&self, x: &str) -> Result<(Annotation, &Term), ContextError> {
        self.bindings
            .iter()
            .rev()
            .find(|b| &*b.name == x)
            .map(|b| (b.annot, &b.ty))
            .ok_or_else(|| ContextError::UnknownVariable(name(x)))
    }

    pub fn index_of(&self, x: &str) -> Option<usize> {
        self.bindings.iter().position(|b| &*b.name == x)
    }

    /// Prefix of the first `n` bindings.
    pub fn prefix(&self, n: usize) -> Context {
        Context { bindings: self.bindings[..n.min(self.len())].to_vec() }
    }

    /// Fresh name for a binder hint, avoiding the context and `avoid`.
    pub fn fresh(&self, base: &str, avoid: &BTreeSet<Name>) -> Name {
        fresh_name(base, |c| self.contains(c) || avoid.contains(c))
    }

    /// Structural fingerprint (names, annotations, types).
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        for b in &self.bindings {
            b.name.hash(&mut h);
            b.annot.hash(&mut h);
            b.ty.hash(&mut h);
        }
        h.finish()
    }

    /// Sort tag of a context variable, from its declared type.
    pub fn var_sort(&self, x: &str) -> Option<VarSort> {
        self.lookup(x).ok().map(|(_, ty)| binder_var_sort(ty))
    }
}

pub fn ctx_lookup<'a>(ctx: &'a Context, x: &str) -> Result<(Annotation, &'a Term), ContextError> {
    ctx.lookup(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Term {
        Term::var("x", VarSort::Star)
    }
    fn y() -> Term {
        Term::var("y", VarSort::Star)
    }

    #[test]
    fn free_vars_examples() {
        let l = Term::lambda("x", Annotation::U, Term::nat(), &x());
        assert!(l.free_vars().is_empty());
        let t = Term::add(x(), Term::succ(y()));
        assert_eq!(t.free_vars().into_iter().map(|n| n.to_string()).collect::<Vec<_>>(), ["x", "y"]);
        let z = Term::var("z", VarSort::Star);
        let p = Term::pi("x", Annotation::U, Term::nat(), &Term::eq(Term::nat(), x(), z));
        assert_eq!(p.free_vars().len(), 1);
    }

    #[test]
    fn substitution_examples() {
        let t = Term::add(x(), y()).subst_free("x", &Term::zero());
        assert_eq!(t, Term::add(Term::zero(), y()));
        let l = Term::lambda("x", Annotation::U, Term::nat(), &x());
        assert_eq!(l.subst_free("x", &Term::zero()), l);
        // capture avoidance: the binder's own variable stays bound
        let l = Term::lambda("y", Annotation::U, Term::nat(), &x());
        let r = l.subst_free("x", &y());
        match r.kind() {
            TermKind::Lam(b) => assert_eq!(b.body, y()),
            _ => panic!(),
        }
    }

    #[test]
    fn alpha_equivalence_is_equality() {
        let a = Term::lambda("x", Annotation::U, Term::nat(), &x());
        let b = Term::lambda("y", Annotation::U, Term::nat(), &y());
        assert_eq!(a, b);
        assert_eq!(a.structural_hash(), b.structural_hash());
    }

    #[test]
    fn classes_of_constants() {
        assert_eq!(classify(&Term::zero()), Class::O);
        assert_eq!(classify(&Term::nat()), Class::P);
        assert_eq!(classify(&Term::star()), Class::K);
        assert_eq!(classify(&Term::boxed()), Class::E);
        assert_eq!(classify(&Term::sort(Sort::Triangle)), Class::Triangle);
        assert_eq!(classify(&Term::app(Term::star(), Term::star())), Class::Bottom);
        assert_eq!(Class::O.succ().succ().succ().succ().succ(), Class::Bottom);
    }

    #[test]
    fn lookup() {
        let mut g = Context::new();
        g.push("x", Annotation::U, Term::nat()).unwrap();
        assert_eq!(g.lookup("x").unwrap(), (Annotation::U, &Term::nat()));
        assert!(g.push("x", Annotation::U, Term::nat()).is_err());
        assert!(Context::new().lookup("x").is_err());
        let mut h = Context::new();
        let e = Term::eq(Term::nat(), Term::zero(), Term::zero());
        h.push("x", Annotation::R, e.clone()).unwrap();
        assert_eq!(h.lookup("x").unwrap(), (Annotation::R, &e));
    }

    #[test]
    fn annotation_order() {
        assert!(Annotation::U < Annotation::R);
    }
}
