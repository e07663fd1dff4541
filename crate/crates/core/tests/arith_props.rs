use std::collections::BTreeMap;

use ccnat_core::arith::{
    self, check_entailment, check_refutation, ArithWitness, Atom, Entailment, EntailmentWitness, LinEq, LinPoly, Limits,
    Search,
};
use num_bigint::BigInt;
use proptest::prelude::*;

const VARS: [&str; 4] = ["w", "x", "y", "z"];

fn var(v: &str) -> LinPoly {
    LinPoly::atom(Atom::Var(v.into()))
}

fn poly(coeffs: &[u64], constant: u64) -> LinPoly {
    let mut p = LinPoly::constant(constant);
    for (c, v) in coeffs.iter().zip(VARS) {
        for _ in 0..*c {
            p = p.add(&var(v));
        }
    }
    p
}

fn entailed(e: &[LinEq], g: &LinEq) -> Option<EntailmentWitness> {
    match arith::entails(e, g, Limits::default()).unwrap() {
        Entailment::Entailed(w) => Some(w),
        Entailment::Countermodel(_) => None,
    }
}

fn consistent(e: &[LinEq]) -> bool {
    matches!(arith::solve(e, Limits::default()).unwrap(), Search::Sat(_))
}

#[test]
fn worked_examples() {
    let eq = LinEq::new;
    assert!(entailed(&[], &eq(var("x"), var("x"))).is_some());
    let contradiction = [
        eq(var("z"), var("x").add_constant(2)),
        eq(var("z").add_constant(2), var("y")),
        eq(var("y").add_constant(1), var("x").add_constant(2)),
    ];
    assert!(entailed(&contradiction, &eq(LinPoly::constant(0), LinPoly::constant(1))).is_some());
    assert!(!consistent(&contradiction));
    assert!(entailed(&[eq(var("x").add(&var("y")), LinPoly::constant(0))], &eq(var("x"), LinPoly::constant(0))).is_some());
    let nonconvex = [
        eq(var("x").add(&var("y")), LinPoly::constant(1)),
        eq(var("z"), LinPoly::constant(0)),
        eq(var("w"), LinPoly::constant(1)),
    ];
    assert!(entailed(&nonconvex, &eq(var("x"), var("z"))).is_none());
    assert!(entailed(&nonconvex, &eq(var("x"), var("w"))).is_none());
    assert!(consistent(&[]));
    assert!(consistent(&[eq(var("x").add(&var("x")), var("y").add(&var("y")))]));
}

fn arb_eq() -> impl Strategy<Value = LinEq> {
    let side = (prop::collection::vec(0u64..=3, 4), 0u64..=3).prop_map(|(c, k)| poly(&c, k));
    (side.clone(), side).prop_map(|(l, r)| LinEq::new(l, r))
}

/// Locations of multiplier maps: child path, with `None` for a split's bound.
fn slots(w: &ArithWitness, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, usize)>) {
    match w {
        ArithWitness::IntCombination(c) => out.extend(c.multipliers.keys().map(|k| (path.clone(), *k))),
        ArithWitness::CaseEnumeration { bound, cases, .. } => {
            out.extend(bound.multipliers.keys().map(|k| (path.clone(), *k)));
            for (i, c) in cases.iter().enumerate() {
                path.push(i);
                slots(c, path, out);
                path.pop();
            }
        }
    }
}

fn multipliers_at<'a>(w: &'a mut ArithWitness, path: &[usize]) -> &'a mut BTreeMap<usize, BigInt> {
    match (w, path.split_first()) {
        (ArithWitness::IntCombination(c), None) => &mut c.multipliers,
        (ArithWitness::CaseEnumeration { bound, .. }, None) => &mut bound.multipliers,
        (ArithWitness::CaseEnumeration { cases, .. }, Some((i, rest))) => multipliers_at(&mut cases[*i], rest),
        _ => unreachable!(),
    }
}

/// Every single-multiplier ±1 perturbation of `w`.
fn perturbations(w: &EntailmentWitness) -> Vec<EntailmentWitness> {
    let mut out = Vec::new();
    for side in 0..2 {
        let part = if side == 0 { &w.below } else { &w.above };
        let mut locs = Vec::new();
        slots(part, &mut Vec::new(), &mut locs);
        for (path, k) in locs {
            for delta in [-1i64, 1] {
                let mut copy = w.clone();
                let target = if side == 0 { &mut copy.below } else { &mut copy.above };
                let m = multipliers_at(target, &path);
                *m.get_mut(&k).unwrap() += delta;
                if m[&k] == BigInt::from(0) {
                    m.remove(&k);
                }
                out.push(copy);
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn witnesses_replay_and_resist_perturbation(e in prop::collection::vec(arb_eq(), 0..=3), g in arb_eq()) {
        if let Some(w) = entailed(&e, &g) {
            prop_assert!(check_entailment(&e, &g, &w));
            for p in perturbations(&w) {
                prop_assert!(!check_entailment(&e, &g, &p));
            }
        }
    }

    #[test]
    fn entailment_is_monotone(e in prop::collection::vec(arb_eq(), 0..=2), extra in arb_eq(), g in arb_eq()) {
        if entailed(&e, &g).is_some() {
            let mut bigger = e.clone();
            bigger.push(extra);
            prop_assert!(entailed(&bigger, &g).is_some());
        }
    }

    #[test]
    fn inconsistency_entails_everything(e in prop::collection::vec(arb_eq(), 1..=3), g in arb_eq()) {
        if let Search::Refuted(w) = arith::solve(&e, Limits::default()).unwrap() {
            prop_assert!(check_refutation(&e, &w));
            prop_assert!(entailed(&e, &g).is_some());
        }
    }

    #[test]
    fn cap_is_homomorphic(a in 0u64..50, b in 0u64..50) {
        use ccnat_core::term::Term;
        let t = Term::add(Term::numeral(a), Term::succ(Term::numeral(b)));
        let mut no_alien = |_: &Term| -> Atom { unreachable!() };
        prop_assert_eq!(arith::cap(&t, &mut no_alien), LinPoly::constant(a + b + 1));
    }
}
