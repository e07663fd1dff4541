use ccnat_core::arith::{self, check_entailment, check_refutation, Atom, Entailment, LinEq, LinPoly, Limits, Search};
use ccnat_oracles::arith as oracle;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VARS: [&str; 4] = ["w", "x", "y", "z"];

fn poly(coeffs: &[u64], constant: u64) -> LinPoly {
    let mut p = LinPoly::constant(constant);
    for (c, v) in coeffs.iter().zip(VARS) {
        for _ in 0..*c {
            p = p.add(&LinPoly::atom(Atom::Var(v.into())));
        }
    }
    p
}

fn random_eq(rng: &mut ChaCha8Rng, nvars: usize) -> LinEq {
    let mut side = || {
        let c: Vec<u64> = (0..nvars).map(|_| if rng.gen_bool(0.5) { 0 } else { rng.gen_range(0..=3) }).collect();
        poly(&c, rng.gen_range(0..=3))
    };
    LinEq::new(side(), side())
}

fn solver_consistent(eqs: &[LinEq]) -> bool {
    match arith::solve(eqs, Limits::default()).expect("solver gave up") {
        Search::Refuted(w) => {
            assert!(check_refutation(eqs, &w));
            false
        }
        Search::Sat(m) => {
            assert!(eqs.iter().all(|e| e.holds(&|a| m[a].clone())));
            true
        }
    }
}

fn solver_entails(eqs: &[LinEq], goal: &LinEq) -> bool {
    match arith::entails(eqs, goal, Limits::default()).expect("solver gave up") {
        Entailment::Entailed(w) => {
            assert!(check_entailment(eqs, goal, &w));
            true
        }
        Entailment::Countermodel(m) => {
            let val = |a: &Atom| m.get(a).cloned().unwrap_or_default();
            assert!(eqs.iter().all(|e| e.holds(&val)));
            assert!(!goal.holds(&val));
            false
        }
    }
}

#[test]
fn oracle_matches_box_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..400 {
        let eqs: Vec<LinEq> = (0..rng.gen_range(1..=2)).map(|_| random_eq(&mut rng, 3)).collect();
        let d = oracle::Dense::new(&eqs, &[]);
        let (minimal, hilbert) = oracle::irreducible(&d);
        let boxed = oracle::box_solutions(&d, 9);
        for m in &minimal {
            assert!(boxed.contains(m) || m.iter().any(|v| *v > 9), "{m:?} is not a solution");
        }
        // every boxed solution decomposes as a minimal solution plus basis elements
        for s in &boxed {
            assert!(decomposes(s, &minimal, &hilbert), "{s:?} of {eqs:?} not generated");
        }
    }
}

fn decomposes(s: &[i64], minimal: &[Vec<i64>], hilbert: &[Vec<i64>]) -> bool {
    fn rest(r: &[i64], hilbert: &[Vec<i64>]) -> bool {
        if r.iter().all(|v| *v == 0) {
            return true;
        }
        hilbert.iter().any(|h| {
            h.iter().zip(r).all(|(a, b)| a <= b) && rest(&r.iter().zip(h).map(|(a, b)| a - b).collect::<Vec<_>>(), hilbert)
        })
    }
    minimal.iter().any(|m| m.iter().zip(s).all(|(a, b)| a <= b) && rest(&s.iter().zip(m).map(|(a, b)| a - b).collect::<Vec<_>>(), hilbert))
}

#[test]
fn exhaustive_single_equations() {
    let goals = [
        LinEq::new(poly(&[0, 1], 0), poly(&[0, 0, 1], 0)),
        LinEq::new(poly(&[0, 1], 0), poly(&[], 0)),
        LinEq::new(poly(&[0, 0, 1], 0), poly(&[], 1)),
    ];
    let mut count = 0;
    for code in 0..4096u32 {
        let d: Vec<u64> = (0..6).map(|i| ((code >> (2 * i)) & 3) as u64).collect();
        let e = LinEq::new(poly(&[0, d[0], d[1]], d[2]), poly(&[0, d[3], d[4]], d[5]));
        let eqs = [e];
        assert_eq!(solver_consistent(&eqs), oracle::satisfiable(&eqs), "{eqs:?}");
        for g in &goals {
            assert_eq!(solver_entails(&eqs, g), oracle::entails(&eqs, g), "{eqs:?} ⊨ {g}");
            count += 1;
        }
    }
    assert_eq!(count, 3 * 4096);
}

#[test]
fn random_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..3000 {
        let eqs: Vec<LinEq> = (0..rng.gen_range(0..=3)).map(|_| random_eq(&mut rng, 4)).collect();
        let goal = random_eq(&mut rng, 4);
        assert_eq!(solver_consistent(&eqs), oracle::satisfiable(&eqs), "{eqs:?}");
        assert_eq!(solver_entails(&eqs, &goal), oracle::entails(&eqs, &goal), "{eqs:?} ⊨ {goal}");
    }
}

#[test]
fn grid_of_small_systems() {
    let t = ccnat_oracles::differential::arith_grid(24);
    assert_eq!(t.systems, 1 + 24 + 276 + 2024);
    assert_eq!((t.disagreements, t.bad_evidence), (0, 0), "{t:?}");
}
