//! Linear polynomials over ℕ and algebraic caps of terms.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

use crate::term::{Name, Term, TermKind, VarSort};

/// Arithmetic variable: an object variable of the calculus, an abstracted
/// alien, or a slack variable introduced by the entailment encoding.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Var(Name),
    Alien(u32),
    Slack(u32),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Var(n) => f.write_str(n),
            Atom::Alien(k) => write!(f, "#{k}"),
            Atom::Slack(k) => write!(f, "${k}"),
        }
    }
}

/// `constant + Σ coeff·atom`, with no zero coefficients stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinPoly {
    pub coeffs: BTreeMap<Atom, u64>,
    pub constant: u64,
}

impl LinPoly {
    pub fn constant(c: u64) -> Self {
        LinPoly { coeffs: BTreeMap::new(), constant: c }
    }

    pub fn atom(a: Atom) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(a, 1);
        LinPoly { coeffs, constant: 0 }
    }

    pub fn add(&self, other: &LinPoly) -> LinPoly {
        let mut r = self.clone();
        r.constant += other.constant;
        for (a, c) in &other.coeffs {
            *r.coeffs.entry(a.clone()).or_insert(0) += c;
        }
        r
    }

    pub fn add_constant(&self, c: u64) -> LinPoly {
        let mut r = self.clone();
        r.constant += c;
        r
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.coeffs.keys()
    }

    pub fn eval(&self, value: &dyn Fn(&Atom) -> BigInt) -> BigInt {
        let mut v = BigInt::from(self.constant);
        for (a, c) in &self.coeffs {
            v += value(a) * BigInt::from(*c);
        }
        v
    }
}

impl fmt::Display for LinPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(a, c)| if *c == 1 { a.to_string() } else { format!("{c}*{a}") })
            .collect();
        if self.constant != 0 || parts.is_empty() {
            parts.push(self.constant.to_string());
        }
        f.write_str(&parts.join(" + "))
    }
}

/// An equation between linear polynomials, kept in canonical form: common
/// terms cancelled from both sides and the smaller side on the left.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinEq {
    pub lhs: LinPoly,
    pub rhs: LinPoly,
}

impl LinEq {
    pub fn new(lhs: LinPoly, rhs: LinPoly) -> LinEq {
        let (mut l, mut r) = (lhs, rhs);
        let m = l.constant.min(r.constant);
        l.constant -= m;
        r.constant -= m;
        let shared: Vec<Atom> = l.coeffs.keys().filter(|a| r.coeffs.contains_key(*a)).cloned().collect();
        for a in shared {
            let (cl, cr) = (l.coeffs[&a], r.coeffs[&a]);
            let m = cl.min(cr);
            for (p, c) in [(&mut l, cl), (&mut r, cr)] {
                if c == m {
                    p.coeffs.remove(&a);
                } else {
                    p.coeffs.insert(a.clone(), c - m);
                }
            }
        }
        if r < l {
            std::mem::swap(&mut l, &mut r);
        }
        LinEq { lhs: l, rhs: r }
    }

    pub fn is_trivial(&self) -> bool {
        self.lhs == self.rhs
    }

    /// Integer form `Σ c·x = k` of `lhs − rhs = 0`.
    pub fn integer_form(&self) -> (BTreeMap<Atom, BigInt>, BigInt) {
        let mut coeffs: BTreeMap<Atom, BigInt> = BTreeMap::new();
        for (a, c) in &self.lhs.coeffs {
            *coeffs.entry(a.clone()).or_default() += BigInt::from(*c);
        }
        for (a, c) in &self.rhs.coeffs {
            *coeffs.entry(a.clone()).or_default() -= BigInt::from(*c);
        }
        coeffs.retain(|_, c| c != &BigInt::from(0));
        (coeffs, BigInt::from(self.rhs.constant) - BigInt::from(self.lhs.constant))
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.lhs.atoms().chain(self.rhs.atoms())
    }

    pub fn holds(&self, value: &dyn Fn(&Atom) -> BigInt) -> bool {
        self.lhs.eval(value) == self.rhs.eval(value)
    }
}

impl fmt::Display for LinEq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

/// Membership in the algebraic terms: object variables, `0`, `S u`, `u +̇ v`.
pub fn is_algebraic(t: &Term) -> bool {
    matches!(t.kind(), TermKind::Var(_, VarSort::Star) | TermKind::Zero)
        || t.as_succ().is_some()
        || t.as_add().is_some()
}

/// Algebraic cap of `t`: `0`, `S` and `+̇` are read arithmetically, object
/// variables are kept, and every other subterm is handed to `alien`.
pub fn cap(t: &Term, alien: &mut dyn FnMut(&Term) -> Atom) -> LinPoly {
    let mut succs = 0u64;
    let mut cur = t;
    while let Some(u) = cur.as_succ() {
        succs += 1;
        cur = u;
    }
    let base = match cur.kind() {
        TermKind::Zero => LinPoly::default(),
        TermKind::Var(n, VarSort::Star) => LinPoly::atom(Atom::Var(n.clone())),
        _ => match cur.as_add() {
            Some((u, v)) => {
                let cu = cap(u, alien);
                cu.add(&cap(v, alien))
            }
            None => LinPoly::atom(alien(cur)),
        },
    };
    base.add_constant(succs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;
    use crate::term::{Annotation, Context};

    fn ctx() -> Context {
        let mut g = Context::new();
        for x in ["x", "y"] {
            g.push(x, Annotation::U, Term::nat()).unwrap();
        }
        g.push("f", Annotation::U, Term::arrow(Term::nat(), Term::nat())).unwrap();
        g
    }

    #[test]
    fn algebraic_terms() {
        let g = ctx();
        assert!(is_algebraic(&parse_term(&g, "(+ x (app f y))").unwrap()));
        assert!(!is_algebraic(&parse_term(&g, "(app f y)").unwrap()));
        assert!(is_algebraic(&parse_term(&g, "0").unwrap()));
    }

    #[test]
    fn caps() {
        let g = ctx();
        let mut table = |_: &Term| Atom::Alien(7);
        assert_eq!(cap(&Term::numeral(2), &mut table), LinPoly::constant(2));
        let t = parse_term(&g, "(+ x (S (app f y)))").unwrap();
        let c = cap(&t, &mut table);
        let want = LinPoly::atom(Atom::Var("x".into())).add(&LinPoly::atom(Atom::Alien(7))).add_constant(1);
        assert_eq!(c, want);
        assert_eq!(cap(&parse_term(&g, "(app f y)").unwrap(), &mut table), LinPoly::atom(Atom::Alien(7)));
    }

    #[test]
    fn equations_are_canonical() {
        let x = || LinPoly::atom(Atom::Var("x".into()));
        let y = || LinPoly::atom(Atom::Var("y".into()));
        let a = LinEq::new(x().add(&y()).add_constant(2), x().add_constant(5));
        let b = LinEq::new(LinPoly::constant(3), y());
        assert_eq!(a, b);
        assert!(LinEq::new(x(), x()).is_trivial());
        assert_eq!(LinEq::new(x(), y()), LinEq::new(y(), x()));
    }
}
