//! Arithmetic witnesses and their replay.
//!
//! Replay is local integer arithmetic only: it never searches. A witness
//! refutes a system of equations over ℕ; an entailment `E ⊨ s = t` is
//! witnessed by refuting both `E, s + 1 + σ = t` and `E, t + 1 + σ = s`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::poly::{Atom, LinEq, LinPoly};

/// Upper limit on the number of cases a replayed enumeration may claim.
pub const MAX_REPLAY_CASES: u64 = 100_000;

/// An integer linear combination of the system's equations, together with
/// the claimed result `Σ coeffs·x = constant`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Combination {
    pub multipliers: BTreeMap<usize, BigInt>,
    pub coeffs: BTreeMap<Atom, BigInt>,
    pub constant: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArithWitness {
    /// The combination is an equation with no solution in ℕ: `0 = k ≠ 0`,
    /// coefficients sharing a divisor that does not divide `k`, or all
    /// coefficients of one sign with `k` of the other.
    IntCombination(Combination),
    /// `bound` is a combination with non-negative coefficients; it caps
    /// `var` by `⌊constant / coeff(var)⌋`. Case `i` refutes the system
    /// extended with `var = i`.
    CaseEnumeration {
        bound: Combination,
        var: Atom,
        cases: Vec<ArithWitness>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntailmentWitness {
    pub below: ArithWitness,
    pub above: ArithWitness,
}

pub const SLACK: Atom = Atom::Slack(0);

/// `goal.lhs + 1 + σ = goal.rhs` and the mirrored equation.
pub fn strict_goals(goal: &LinEq) -> (LinEq, LinEq) {
    let sl = LinPoly::atom(SLACK);
    (
        LinEq::new(goal.lhs.add(&sl).add_constant(1), goal.rhs.clone()),
        LinEq::new(goal.rhs.add(&sl).add_constant(1), goal.lhs.clone()),
    )
}

pub fn case_equation(var: &Atom, value: u64) -> LinEq {
    LinEq::new(LinPoly::atom(var.clone()), LinPoly::constant(value))
}

/// Evaluate the combination's multipliers over the system; `None` when an
/// index is out of range, a multiplier is zero, or it weights a trivial
/// equation.
pub fn combine(system: &[LinEq], multipliers: &BTreeMap<usize, BigInt>) -> Option<(BTreeMap<Atom, BigInt>, BigInt)> {
    let mut coeffs: BTreeMap<Atom, BigInt> = BTreeMap::new();
    let mut constant = BigInt::zero();
    for (&i, m) in multipliers {
        if m.is_zero() {
            return None;
        }
        let eq = system.get(i)?;
        if eq.is_trivial() {
            return None;
        }
        let (c, k) = eq.integer_form();
        for (a, v) in c {
            *coeffs.entry(a).or_default() += v * m;
        }
        constant += k * m;
    }
    coeffs.retain(|_, v| !v.is_zero());
    Some((coeffs, constant))
}

fn replays(system: &[LinEq], c: &Combination) -> bool {
    match combine(system, &c.multipliers) {
        Some((coeffs, constant)) => coeffs == c.coeffs && constant == c.constant,
        None => false,
    }
}

/// Whether `Σ coeffs·x = constant` visibly has no solution in ℕ.
pub fn is_contradiction(coeffs: &BTreeMap<Atom, BigInt>, constant: &BigInt) -> bool {
    if coeffs.is_empty() {
        return !constant.is_zero();
    }
    let g = coeffs.values().fold(BigInt::zero(), |g, c| g.gcd(c));
    if !(constant % &g).is_zero() {
        return true;
    }
    let all_nonneg = coeffs.values().all(|c| !c.is_negative());
    let all_nonpos = coeffs.values().all(|c| !c.is_positive());
    (all_nonneg && constant.is_negative()) || (all_nonpos && constant.is_positive())
}

/// Replay a refutation of `system`.
pub fn check_refutation(system: &[LinEq], w: &ArithWitness) -> bool {
    match w {
        ArithWitness::IntCombination(c) => replays(system, c) && is_contradiction(&c.coeffs, &c.constant),
        ArithWitness::CaseEnumeration { bound, var, cases } => {
            if !replays(system, bound) || bound.coeffs.values().any(|c| c.is_negative()) || bound.constant.is_negative() {
                return false;
            }
            let Some(cv) = bound.coeffs.get(var).filter(|c| c.is_positive()) else {
                return false;
            };
            let limit = &bound.constant / cv;
            if limit >= BigInt::from(MAX_REPLAY_CASES) || BigInt::from(cases.len()) != &limit + 1 {
                return false;
            }
            let mut extended = system.to_vec();
            extended.push(LinEq::new(LinPoly::default(), LinPoly::default()));
            let last = extended.len() - 1;
            cases.iter().enumerate().all(|(i, sub)| {
                extended[last] = case_equation(var, i as u64);
                check_refutation(&extended, sub)
            })
        }
    }
}

/// Replay an entailment witness for `premises ⊨ goal`.
pub fn check_entailment(premises: &[LinEq], goal: &LinEq, w: &EntailmentWitness) -> bool {
    if premises.iter().chain(std::iter::once(goal)).any(|e| e.atoms().any(|a| matches!(a, Atom::Slack(_)))) {
        return false;
    }
    let (below, above) = strict_goals(goal);
    let mut sys = premises.to_vec();
    sys.push(below);
    if !check_refutation(&sys, &w.below) {
        return false;
    }
    *sys.last_mut().unwrap() = above;
    check_refutation(&sys, &w.above)
}

impl ArithWitness {
    /// Equation indices with a nonzero multiplier anywhere in the tree.
    pub fn used_equations(&self, out: &mut std::collections::BTreeSet<usize>) {
        match self {
            ArithWitness::IntCombination(c) => out.extend(c.multipliers.keys()),
            ArithWitness::CaseEnumeration { bound, cases, .. } => {
                out.extend(bound.multipliers.keys());
                for c in cases {
                    c.used_equations(out);
                }
            }
        }
    }

    /// Renumber equation indices.
    pub fn remap(&self, f: &dyn Fn(usize) -> usize) -> ArithWitness {
        let comb = |c: &Combination| Combination {
            multipliers: c.multipliers.iter().map(|(i, m)| (f(*i), m.clone())).collect(),
            ..c.clone()
        };
        match self {
            ArithWitness::IntCombination(c) => ArithWitness::IntCombination(comb(c)),
            ArithWitness::CaseEnumeration { bound, var, cases } => ArithWitness::CaseEnumeration {
                bound: comb(bound),
                var: var.clone(),
                cases: cases.iter().map(|c| c.remap(f)).collect(),
            },
        }
    }
}

/// Restrict a witness over `premises ++ extra` to the premises in `keep`
/// (sorted, containing every premise the witness uses). Indices past the
/// premises shift down accordingly.
pub fn compact(w: &ArithWitness, premise_count: usize, keep: &[usize]) -> ArithWitness {
    let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(new, old)| (*old, new)).collect();
    let shift = premise_count - keep.len();
    w.remap(&|i| if i < premise_count { pos[&i] } else { i - shift })
}

/// Number of nodes in a witness tree.
pub fn witness_size(w: &ArithWitness) -> usize {
    match w {
        ArithWitness::IntCombination(_) => 1,
        ArithWitness::CaseEnumeration { cases, .. } => 1 + cases.iter().map(witness_size).sum::<usize>(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> LinPoly {
        LinPoly::atom(Atom::Var(n.into()))
    }

    fn comb(system: &[LinEq], m: &[(usize, i64)]) -> Combination {
        let multipliers: BTreeMap<usize, BigInt> = m.iter().map(|(i, k)| (*i, BigInt::from(*k))).collect();
        let (coeffs, constant) = combine(system, &multipliers).unwrap();
        Combination { multipliers, coeffs, constant }
    }

    #[test]
    fn contradiction_shapes() {
        let x = Atom::Var("x".into());
        let mut c = BTreeMap::new();
        assert!(is_contradiction(&c, &BigInt::from(1)));
        assert!(!is_contradiction(&c, &BigInt::from(0)));
        c.insert(x.clone(), BigInt::from(2));
        assert!(is_contradiction(&c, &BigInt::from(1)));
        assert!(is_contradiction(&c, &BigInt::from(-2)));
        assert!(!is_contradiction(&c, &BigInt::from(4)));
    }

    #[test]
    fn replay_detects_tampering() {
        // x + 1 = 0 has no ℕ solution
        let sys = vec![LinEq::new(v("x").add_constant(1), LinPoly::default())];
        let good = ArithWitness::IntCombination(comb(&sys, &[(0, 1)]));
        assert!(check_refutation(&sys, &good));
        let mut bad = comb(&sys, &[(0, 1)]);
        bad.multipliers.insert(0, BigInt::from(2));
        assert!(!check_refutation(&sys, &ArithWitness::IntCombination(bad)));
    }

    fn find_leaf(system: &[LinEq]) -> Combination {
        let n = system.len();
        let mut m = vec![-3i64; n];
        loop {
            let picks: Vec<(usize, i64)> = m.iter().enumerate().filter(|(_, k)| **k != 0).map(|(i, k)| (i, *k)).collect();
            if !picks.is_empty() {
                let c = comb(system, &picks);
                if is_contradiction(&c.coeffs, &c.constant) {
                    return c;
                }
            }
            let mut i = 0;
            while i < n && m[i] == 3 {
                m[i] = -3;
                i += 1;
            }
            assert!(i < n, "no leaf found");
            m[i] += 1;
        }
    }

    #[test]
    fn case_enumeration_replay() {
        let sys = vec![
            LinEq::new(v("x").add(&v("y")), LinPoly::constant(1)),
            LinEq::new(v("x"), v("y")),
        ];
        let mut bound = comb(&sys, &[(0, 1)]);
        if bound.constant.is_negative() {
            bound = comb(&sys, &[(0, -1)]);
        }
        let x = Atom::Var("x".into());
        let cases: Vec<ArithWitness> = (0..2u64)
            .map(|val| {
                let mut ext = sys.clone();
                ext.push(case_equation(&x, val));
                ArithWitness::IntCombination(find_leaf(&ext))
            })
            .collect();
        let w = ArithWitness::CaseEnumeration { bound: bound.clone(), var: x.clone(), cases: cases.clone() };
        assert!(check_refutation(&sys, &w));
        let short = ArithWitness::CaseEnumeration { bound, var: x, cases: cases[..1].to_vec() };
        assert!(!check_refutation(&sys, &short));
    }
}
