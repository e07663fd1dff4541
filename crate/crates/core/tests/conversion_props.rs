mod common;

use ccnat_core::arith::Limits;
use ccnat_core::congruence::{weak_convertible, Consistency, Conversion};
use ccnat_core::term::{Annotation, Context, Term};
use common::{f, fo_context, fo_equation, fo_term, nat_var};
use proptest::prelude::*;

fn conv(ctx: &Context, t: &Term, u: &Term) -> bool {
    Conversion::default().convertible(ctx, t, u).unwrap()
}

fn hyps() -> impl Strategy<Value = Vec<(Term, Term)>> {
    prop::collection::vec(fo_equation(), 0..=3)
}

/// Queries built partly from the hypotheses so that both answers occur.
fn query(hyps: &[(Term, Term)]) -> impl Strategy<Value = Term> {
    let pieces: Vec<Term> = hyps.iter().flat_map(|(l, r)| [l.clone(), r.clone()]).collect();
    if pieces.is_empty() {
        return fo_term().boxed();
    }
    prop_oneof![fo_term(), prop::sample::select(pieces.clone()), prop::sample::select(pieces).prop_map(f)].boxed()
}

fn problem(n: usize) -> impl Strategy<Value = (Vec<(Term, Term)>, Vec<Term>)> {
    hyps().prop_flat_map(move |h| {
        let qs = prop::collection::vec(query(&h), n);
        (Just(h), qs)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn equivalence_laws((h, q) in problem(3)) {
        let ctx = fo_context(&h);
        let (a, b, c) = (&q[0], &q[1], &q[2]);
        prop_assert!(conv(&ctx, a, a));
        let ab = conv(&ctx, a, b);
        prop_assert_eq!(ab, conv(&ctx, b, a));
        if ab && conv(&ctx, b, c) {
            prop_assert!(conv(&ctx, a, c));
        }
    }

    #[test]
    fn congruence_laws((h, q) in problem(3)) {
        let ctx = fo_context(&h);
        let (a, b, c) = (&q[0], &q[1], &q[2]);
        if conv(&ctx, a, b) {
            prop_assert!(conv(&ctx, &f(a.clone()), &f(b.clone())));
            prop_assert!(conv(&ctx, &Term::succ(a.clone()), &Term::succ(b.clone())));
            prop_assert!(conv(&ctx, &Term::add(a.clone(), c.clone()), &Term::add(b.clone(), c.clone())));
            let eq_a = Term::eq(Term::nat(), a.clone(), c.clone());
            let eq_b = Term::eq(Term::nat(), b.clone(), c.clone());
            prop_assert!(conv(&ctx, &eq_a, &eq_b));
        }
    }

    #[test]
    fn zero_is_not_a_successor((h, q) in problem(1)) {
        let ctx = fo_context(&h);
        let mut c = Conversion::default();
        if c.consistency(&ctx).unwrap() == Consistency::Consistent {
            prop_assert!(!c.convertible(&ctx, &Term::zero(), &Term::succ(q[0].clone())).unwrap());
        } else {
            prop_assert!(c.convertible(&ctx, &Term::zero(), &Term::succ(q[0].clone())).unwrap());
        }
    }

    #[test]
    fn weak_conversion_is_included((h, q) in problem(2)) {
        let ctx = fo_context(&h);
        let weak = weak_convertible(&ctx, &q[0], &q[1], 10_000, Limits::default()).unwrap();
        if weak {
            prop_assert!(conv(&ctx, &q[0], &q[1]));
        }
    }

    #[test]
    fn more_hypotheses_convert_more((h, q) in problem(2), extra in fo_equation()) {
        let ctx = fo_context(&h);
        if conv(&ctx, &q[0], &q[1]) {
            let mut more = h.clone();
            more.push(extra);
            prop_assert!(conv(&fo_context(&more), &q[0], &q[1]));
        }
    }

    /// Answers do not depend on what was asked before in the same state.
    #[test]
    fn saturation_is_order_independent((h, q) in problem(4)) {
        let ctx = fo_context(&h);
        let fresh: Vec<bool> = (0..3).map(|i| conv(&ctx, &q[i], &q[i + 1])).collect();
        let mut shared = Conversion::default();
        let mut rev: Vec<bool> = (0..3).rev().map(|i| shared.convertible(&ctx, &q[i], &q[i + 1]).unwrap()).collect();
        rev.reverse();
        prop_assert_eq!(&fresh, &rev);
        let again: Vec<bool> = (0..3).map(|i| shared.convertible(&ctx, &q[i], &q[i + 1]).unwrap()).collect();
        prop_assert_eq!(fresh, again);
    }

    /// Substituting `w` for a variable `z` of `Γ1, z : nat, Γ2` keeps
    /// conversions, and so does inlining an `r` hypothesis whose equation
    /// already holds in the prefix.
    #[test]
    fn stable_under_substitution(
        h1 in prop::collection::vec(fo_equation(), 0..=2),
        h2 in prop::collection::vec(fo_equation(), 0..=2),
        (a, b) in (fo_term(), fo_term()),
        w in fo_term(),
    ) {
        let no_z = |t: &Term| !t.free_vars().contains("z");
        let h1: Vec<_> = h1.into_iter().filter(|(l, r)| no_z(l) && no_z(r)).collect();
        let w = w.subst_free("z", &nat_var("x"));
        // Γ1 binds x y f and h1; then z; then Γ2.
        let mut ctx = Context::new();
        for x in ["x", "y"] {
            ctx.push(x, Annotation::U, Term::nat()).unwrap();
        }
        ctx.push("f", Annotation::U, Term::arrow(Term::nat(), Term::nat())).unwrap();
        for (i, (l, r)) in h1.iter().enumerate() {
            ctx.push(format!("g{i}"), Annotation::R, Term::eq(Term::nat(), l.clone(), r.clone())).unwrap();
        }
        let gamma1 = ctx.clone();
        ctx.push("z", Annotation::U, Term::nat()).unwrap();
        let mut delta = gamma1.clone();
        for (i, (l, r)) in h2.iter().enumerate() {
            let ty = Term::eq(Term::nat(), l.clone(), r.clone());
            ctx.push(format!("k{i}"), Annotation::R, ty.clone()).unwrap();
            delta.push(format!("k{i}"), Annotation::R, ty.subst_free("z", &w)).unwrap();
        }
        if conv(&ctx, &a, &b) {
            prop_assert!(conv(&delta, &a.subst_free("z", &w), &b.subst_free("z", &w)));
        }

        // Inlining an r-binding p : a ≐ b with a ≃_Γ1 b.
        if conv(&gamma1, &a.subst_free("z", &w), &b.subst_free("z", &w)) {
            let (pa, pb) = (a.subst_free("z", &w), b.subst_free("z", &w));
            let mut with_p = gamma1.clone();
            with_p.push("p", Annotation::R, Term::eq(Term::nat(), pa, pb)).unwrap();
            for (c, d) in &h1 {
                prop_assert_eq!(conv(&with_p, c, d), conv(&gamma1, c, d));
            }
            prop_assert_eq!(conv(&with_p, &w, &Term::zero()), conv(&gamma1, &w, &Term::zero()));
        }
    }
}
