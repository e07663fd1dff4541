//! Random well-typed terms rich in β- and ι-redexes.

use ccnat_core::term::{Annotation, Context, Term, VarSort};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn nat_var(x: &str) -> Term {
    Term::var(x, VarSort::Star)
}

/// `x y : nat` and `f : nat → nat`.
fn base_context() -> Context {
    let mut ctx = Context::new();
    for x in ["x", "y"] {
        ctx.push(x, Annotation::U, Term::nat()).unwrap();
    }
    ctx.push("f", Annotation::U, Term::arrow(Term::nat(), Term::nat())).unwrap();
    ctx
}

/// Context of the corpus: `x y : nat`, `f : nat → nat` and
/// `h :^r x ≐ S y`.
pub fn typed_context() -> Context {
    let mut ctx = base_context();
    ctx.push("h", Annotation::R, Term::eq(Term::nat(), nat_var("x"), Term::succ(nat_var("y")))).unwrap();
    ctx
}

/// Random well-typed terms of type `nat` in [`typed_context`], rich in
/// β- and ι-redexes.
pub struct Corpus {
    rng: ChaCha8Rng,
    fresh: usize,
}

impl Corpus {
    pub fn new(seed: u64) -> Corpus {
        Corpus { rng: ChaCha8Rng::seed_from_u64(seed), fresh: 0 }
    }

    fn name(&mut self) -> String {
        self.fresh += 1;
        format!("v{}", self.fresh)
    }

    /// A term of type `nat`; `scope` lists bound `nat` variables in reach.
    pub fn nat(&mut self, depth: u32, scope: &[String]) -> Term {
        if depth == 0 || self.rng.gen_bool(0.2) {
            let k = self.rng.gen_range(0..4 + scope.len());
            return match k {
                0 => Term::zero(),
                1 => Term::numeral(self.rng.gen_range(1..4)),
                2 => nat_var("x"),
                3 => nat_var("y"),
                k => nat_var(&scope[k - 4]),
            };
        }
        match self.rng.gen_range(0..7) {
            0 => Term::succ(self.nat(depth - 1, scope)),
            1 => Term::add(self.nat(depth - 1, scope), self.nat(depth - 1, scope)),
            2 | 3 => {
                let g = self.fun(depth - 1, scope);
                Term::app(g, self.nat(depth - 1, scope))
            }
            4 => {
                let motive = Term::lambda("n", Annotation::U, Term::nat(), &Term::nat());
                let (n, p) = (self.name(), self.name());
                let mut inner = scope.to_vec();
                inner.push(n.clone());
                inner.push(p.clone());
                let body = self.nat(depth - 1, &inner);
                let step = Term::lambda(&n, Annotation::U, Term::nat(), &Term::lambda(&p, Annotation::U, Term::nat(), &body));
                Term::rec(self.nat(depth - 1, scope), motive, self.nat(depth - 1, scope), step)
            }
            5 => {
                // (λ(T : ⋆). λ(a : T). a) nat t
                let t = Term::var("T", VarSort::Box);
                let id = Term::lambda(
                    "T",
                    Annotation::U,
                    Term::star(),
                    &Term::lambda("a", Annotation::U, t.clone(), &Term::var("a", VarSort::Star)),
                );
                Term::apps(id, [Term::nat(), self.nat(depth - 1, scope)])
            }
            _ => {
                // A restricted argument whose equation holds through `h`.
                let q = self.name();
                let dom = Term::eq(Term::nat(), nat_var("x"), Term::succ(nat_var("y")));
                let body = self.nat(depth - 1, scope);
                let lam = Term::lambda(&q, Annotation::R, dom, &body);
                Term::app(lam, nat_var("h"))
            }
        }
    }

    /// A term of type `nat → nat`.
    pub fn fun(&mut self, depth: u32, scope: &[String]) -> Term {
        match self.rng.gen_range(0..4) {
            0 => nat_var("f"),
            1 => Term::succ_const(),
            2 => Term::app(Term::plus_const(), self.nat(depth, scope)),
            _ => {
                let v = self.name();
                let mut inner = scope.to_vec();
                inner.push(v.clone());
                let body = self.nat(depth, &inner);
                Term::lambda(&v, Annotation::U, Term::nat(), &body)
            }
        }
    }
}
