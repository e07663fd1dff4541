//! Enumeration oracle for linear equations over ℕ.
//!
//! The solutions of `A·x = b` in ℕ are exactly `m + Σ cᵢ·hᵢ` where `m` ranges
//! over the componentwise-minimal solutions and `hᵢ` over the Hilbert basis of
//! `A·x = 0`. Both sets are the irreducible solutions of the homogenised system
//! `A·x − b·t = 0` with `t ≤ 1`, which the Contejean–Devie completion
//! enumerates: it explores vectors of ℕⁿ⁺¹ one unit step at a time, only along
//! directions `eⱼ` that move `A·x` back towards the origin.

use std::collections::{BTreeSet, HashSet};

use ccnat_core::arith::{Atom, LinEq};
use num_traits::ToPrimitive;

const STEP_LIMIT: usize = 5_000_000;

/// `Σ a·x = b` over a fixed variable order.
#[derive(Clone, Debug)]
pub struct Dense {
    pub vars: Vec<Atom>,
    pub rows: Vec<(Vec<i64>, i64)>,
}

impl Dense {
    pub fn new(eqs: &[LinEq], extra: &[&LinEq]) -> Dense {
        let vars: Vec<Atom> = eqs
            .iter()
            .chain(extra.iter().copied())
            .flat_map(|e| e.atoms().cloned())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let rows = eqs.iter().map(|e| Dense::row(&vars, e)).collect();
        Dense { vars, rows }
    }

    pub fn row(vars: &[Atom], e: &LinEq) -> (Vec<i64>, i64) {
        let (c, k) = e.integer_form();
        let a = vars.iter().map(|v| c.get(v).map_or(0, |x| x.to_i64().unwrap())).collect();
        (a, k.to_i64().unwrap())
    }
}

/// Irreducible solutions of the homogenised system, split into minimal
/// solutions (`t = 1`) and Hilbert basis elements (`t = 0`).
pub fn irreducible(d: &Dense) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let n = d.vars.len();
    let cols = n + 1;
    let image = |x: &[i64]| -> Vec<i64> {
        d.rows.iter().map(|(a, b)| a.iter().zip(x).map(|(p, q)| p * q).sum::<i64>() - b * x[n]).collect()
    };
    let col: Vec<Vec<i64>> = (0..cols)
        .map(|j| {
            let mut e = vec![0; cols];
            e[j] = 1;
            image(&e)
        })
        .collect();
    let mut found: Vec<Vec<i64>> = Vec::new();
    let mut frontier: HashSet<Vec<i64>> = (0..cols)
        .map(|j| {
            let mut e = vec![0; cols];
            e[j] = 1;
            e
        })
        .collect();
    let mut steps = 0usize;
    while !frontier.is_empty() {
        let mut next = HashSet::new();
        let mut fresh = Vec::new();
        for x in &frontier {
            if image(x).iter().all(|v| *v == 0) {
                fresh.push(x.clone());
            }
        }
        found.extend(fresh.iter().cloned());
        for x in frontier {
            if fresh.contains(&x) {
                continue;
            }
            let ax = image(&x);
            for j in 0..cols {
                steps += 1;
                assert!(steps < STEP_LIMIT, "enumeration did not terminate in budget");
                let dot: i64 = ax.iter().zip(&col[j]).map(|(p, q)| p * q).sum();
                if dot >= 0 || (j == n && x[n] >= 1) {
                    continue;
                }
                let mut y = x.clone();
                y[j] += 1;
                if found.iter().any(|s| s.iter().zip(&y).all(|(p, q)| p <= q)) {
                    continue;
                }
                next.insert(y);
            }
        }
        frontier = next;
    }
    let (minimal, hilbert): (Vec<_>, Vec<_>) = found.into_iter().partition(|x| x[n] == 1);
    let strip = |v: Vec<Vec<i64>>| v.into_iter().map(|mut x| { x.pop(); x }).collect();
    (strip(minimal), strip(hilbert))
}

pub fn satisfiable(eqs: &[LinEq]) -> bool {
    !irreducible(&Dense::new(eqs, &[])).0.is_empty()
}

/// Whether every ℕ-solution of `eqs` satisfies `goal`.
pub fn entails(eqs: &[LinEq], goal: &LinEq) -> bool {
    let d = Dense::new(eqs, &[goal]);
    let (minimal, hilbert) = irreducible(&d);
    let (g, k) = Dense::row(&d.vars, goal);
    let dot = |x: &[i64]| g.iter().zip(x).map(|(p, q)| p * q).sum::<i64>();
    minimal.is_empty() || minimal.iter().all(|m| dot(m) == k) && hilbert.iter().all(|h| dot(h) == 0)
}

/// Plain enumeration of the box `[0, bound]ⁿ`, used to cross-check
/// [`irreducible`] on instances small enough to enumerate directly.
pub fn box_solutions(d: &Dense, bound: i64) -> Vec<Vec<i64>> {
    let n = d.vars.len();
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    loop {
        if d.rows.iter().all(|(a, b)| a.iter().zip(&x).map(|(p, q)| p * q).sum::<i64>() == *b) {
            out.push(x.clone());
        }
        let mut i = 0;
        while i < n && x[i] == bound {
            x[i] = 0;
            i += 1;
        }
        if i == n {
            return out;
        }
        x[i] += 1;
    }
}
