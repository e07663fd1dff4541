//! Decision procedure for systems of linear equations over ℕ.
//!
//! Each search node runs three tests in turn: integer solvability (column
//! Hermite reduction), rational solvability with `x ≥ 0` (phase-one simplex),
//! and boundedness of each free variable (phase-two simplex). A bounded
//! variable is enumerated; when no free variable is bounded the recession rays
//! together with an integer solution give an explicit model.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::poly::{Atom, LinEq};
use super::witness::{
    case_equation, check_entailment, combine, is_contradiction, strict_goals, ArithWitness, Combination,
    EntailmentWitness, MAX_REPLAY_CASES, SLACK,
};

pub type Model = BTreeMap<Atom, BigInt>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_nodes: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_nodes: 1_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("arithmetic search exceeded {0} nodes")]
    Budget(u64),
    #[error("case split on {var} needs {cases} cases")]
    TooManyCases { var: Atom, cases: BigInt },
    #[error("internal arithmetic error: {0}")]
    Internal(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Search {
    Refuted(ArithWitness),
    Sat(Model),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Entailment {
    Entailed(EntailmentWitness),
    /// A model of the premises in which the two sides differ.
    Countermodel(Model),
}

/// Search for a solution of `system` in ℕ, or a refutation.
pub fn solve(system: &[LinEq], limits: Limits) -> Result<Search, ArithError> {
    let mut nodes = 0u64;
    let mut sys = system.to_vec();
    search(&mut sys, &mut BTreeSet::new(), limits, &mut nodes)
}

/// Decide `premises ⊨ goal` over ℕ.
pub fn entails(premises: &[LinEq], goal: &LinEq, limits: Limits) -> Result<Entailment, ArithError> {
    let (below, above) = strict_goals(goal);
    let mut nodes = 0u64;
    let mut sys = premises.to_vec();
    let mut witnesses = Vec::with_capacity(2);
    for strict in [below, above] {
        sys.push(strict);
        match search(&mut sys, &mut BTreeSet::new(), limits, &mut nodes)? {
            Search::Refuted(w) => witnesses.push(w),
            Search::Sat(mut m) => {
                m.remove(&SLACK);
                return Ok(Entailment::Countermodel(m));
            }
        }
        sys.pop();
    }
    let above = witnesses.pop().unwrap();
    let below = witnesses.pop().unwrap();
    let w = EntailmentWitness { below, above };
    debug_assert!(check_entailment(premises, goal, &w));
    Ok(Entailment::Entailed(w))
}

fn search(sys: &mut Vec<LinEq>, fixed: &mut BTreeSet<Atom>, limits: Limits, nodes: &mut u64) -> Result<Search, ArithError> {
    *nodes += 1;
    if *nodes > limits.max_nodes {
        return Err(ArithError::Budget(limits.max_nodes));
    }
    let vars: Vec<Atom> = sys.iter().flat_map(|e| e.atoms().cloned()).collect::<BTreeSet<_>>().into_iter().collect();
    let (a, b) = matrix(sys, &vars);

    let x0 = match hermite(&a, &b, vars.len()) {
        Ok(x0) => x0,
        Err(y) => return leaf(sys, &y).map(Search::Refuted),
    };
    let mut tab = match Tableau::phase_one(&a, &b) {
        Ok(t) => t,
        Err(y) => return leaf(sys, &y).map(Search::Refuted),
    };

    let mut best: Option<(BigInt, usize, Combination)> = None;
    let mut ray_sum = vec![BigRational::zero(); vars.len()];
    for (j, var) in vars.iter().enumerate() {
        if fixed.contains(var) {
            continue;
        }
        match tab.maximize(j) {
            Max::Unbounded(ray) => {
                for (s, d) in ray_sum.iter_mut().zip(ray) {
                    *s += d;
                }
            }
            Max::Bounded(y) => {
                let bound = combination(sys, &y)?;
                let cj = bound.coeffs.get(var).cloned().unwrap_or_default();
                if !cj.is_positive() || bound.coeffs.values().any(|c| c.is_negative()) {
                    return Err(ArithError::Internal(format!("bad bound combination for {var}")));
                }
                let limit = &bound.constant / &cj;
                if best.as_ref().map_or(true, |(l, _, _)| &limit < l) {
                    best = Some((limit, j, bound));
                }
            }
        }
    }

    let Some((limit, j, bound)) = best else {
        return model(sys, &vars, &x0, &ray_sum).map(Search::Sat);
    };
    if limit >= BigInt::from(MAX_REPLAY_CASES) {
        return Err(ArithError::TooManyCases { var: vars[j].clone(), cases: limit + 1 });
    }
    let var = vars[j].clone();
    let count: u64 = limit.try_into().unwrap_or(0);
    fixed.insert(var.clone());
    let mut cases = Vec::with_capacity(count as usize + 1);
    for i in 0..=count {
        sys.push(case_equation(&var, i));
        let r = search(sys, fixed, limits, nodes);
        sys.pop();
        match r {
            Ok(Search::Refuted(w)) => cases.push(w),
            other => {
                fixed.remove(&var);
                return other;
            }
        }
    }
    fixed.remove(&var);
    Ok(Search::Refuted(ArithWitness::CaseEnumeration { bound, var, cases }))
}

fn matrix(sys: &[LinEq], vars: &[Atom]) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
    let index: BTreeMap<&Atom, usize> = vars.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mut a = Vec::with_capacity(sys.len());
    let mut b = Vec::with_capacity(sys.len());
    for e in sys {
        let (c, k) = e.integer_form();
        let mut row = vec![BigInt::zero(); vars.len()];
        for (atom, v) in c {
            row[index[&atom]] = v;
        }
        a.push(row);
        b.push(k);
    }
    (a, b)
}

/// Clear denominators of rational multipliers and state the combination.
fn combination(sys: &[LinEq], y: &[BigRational]) -> Result<Combination, ArithError> {
    let d = y.iter().fold(BigInt::one(), |d, q| d.lcm(q.denom()));
    let multipliers: BTreeMap<usize, BigInt> = y
        .iter()
        .enumerate()
        .filter(|(i, q)| !q.is_zero() && !sys[*i].is_trivial())
        .map(|(i, q)| (i, q.numer() * (&d / q.denom())))
        .collect();
    let (coeffs, constant) =
        combine(sys, &multipliers).ok_or_else(|| ArithError::Internal("empty combination".into()))?;
    Ok(Combination { multipliers, coeffs, constant })
}

fn leaf(sys: &[LinEq], y: &[BigRational]) -> Result<ArithWitness, ArithError> {
    let c = combination(sys, y)?;
    if !is_contradiction(&c.coeffs, &c.constant) {
        return Err(ArithError::Internal(format!("combination {:?} is not contradictory", c.constant)));
    }
    Ok(ArithWitness::IntCombination(c))
}

fn model(sys: &[LinEq], vars: &[Atom], x0: &[BigInt], rays: &[BigRational]) -> Result<Model, ArithError> {
    let d = rays.iter().fold(BigInt::one(), |d, q| d.lcm(q.denom()));
    let dir: Vec<BigInt> = rays.iter().map(|q| q.numer() * (&d / q.denom())).collect();
    let mut t = BigInt::zero();
    for (x, dv) in x0.iter().zip(&dir) {
        if x.is_negative() {
            if !dv.is_positive() {
                return Err(ArithError::Internal("no recession direction for negative component".into()));
            }
            t = t.max(Integer::div_ceil(&-x, dv));
        }
    }
    let m: Model = vars.iter().cloned().zip(x0.iter().zip(&dir).map(|(x, dv)| x + &t * dv)).collect();
    if sys.iter().all(|e| e.holds(&|a| m[a].clone())) {
        Ok(m)
    } else {
        Err(ArithError::Internal("constructed model fails".into()))
    }
}

/// Integer solution of `a·x = b`, or rational multipliers `y` with `yᵀa`
/// integral and `yᵀb` not.
fn hermite(a: &[Vec<BigInt>], b: &[BigInt], n: usize) -> Result<Vec<BigInt>, Vec<BigRational>> {
    let m = a.len();
    let mut h: Vec<Vec<BigInt>> = a.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..n).map(|i| (0..n).map(|j| BigInt::from((i == j) as u8)).collect()).collect();
    let col_op = |h: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, dst: usize, src: usize, q: &BigInt| {
        for row in h.iter_mut().chain(u.iter_mut()) {
            let s = &row[src] * q;
            row[dst] -= s;
        }
    };
    let swap = |h: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, c1: usize, c2: usize| {
        for row in h.iter_mut().chain(u.iter_mut()) {
            row.swap(c1, c2);
        }
    };
    let mut pivots: Vec<usize> = Vec::new();
    let mut z: Vec<BigInt> = Vec::new();
    for i in 0..m {
        let k = pivots.len();
        loop {
            let Some(c) = (k..n).filter(|&c| !h[i][c].is_zero()).min_by_key(|&c| h[i][c].abs()) else {
                break;
            };
            swap(&mut h, &mut u, k, c);
            let mut done = true;
            for c2 in k + 1..n {
                if !h[i][c2].is_zero() {
                    let q = h[i][c2].div_floor(&h[i][k]);
                    col_op(&mut h, &mut u, c2, k, &q);
                    done &= h[i][c2].is_zero();
                }
            }
            if done {
                break;
            }
        }
        let residual: BigInt = &b[i] - (0..k).map(|l| &h[i][l] * &z[l]).sum::<BigInt>();
        let pivot = k < n && !h[i][k].is_zero();
        if pivot {
            if h[i][k].is_negative() {
                for row in h.iter_mut().chain(u.iter_mut()) {
                    row[k] = -&row[k];
                }
            }
            let (q, r) = residual.div_rem(&h[i][k]);
            if r.is_zero() {
                pivots.push(i);
                z.push(q);
                continue;
            }
        } else if residual.is_zero() {
            continue;
        }
        // Infeasible: solve yᵀH = e_k (pivot) or 0 (non-pivot) on rows pivots ∪ {i}.
        let mut y = vec![BigRational::zero(); m];
        y[i] = if pivot { BigRational::new(BigInt::one(), h[i][k].clone()) } else { BigRational::one() };
        for l in (0..k).rev() {
            let p = pivots[l];
            let s: BigRational = (0..m)
                .filter(|&r| r != p && !y[r].is_zero())
                .map(|r| &y[r] * BigRational::from_integer(h[r][l].clone()))
                .sum();
            y[p] = -s / BigRational::from_integer(h[p][l].clone());
        }
        if !pivot {
            // yᵀb = residual ≠ 0; halve to make it fractional.
            let scale = BigRational::new(BigInt::one(), residual * 2);
            for v in y.iter_mut() {
                *v = &*v * &scale;
            }
        }
        return Err(y);
    }
    let x0 = (0..n).map(|r| (0..z.len()).map(|l| &u[r][l] * &z[l]).sum()).collect();
    Ok(x0)
}

enum Max {
    /// Multipliers `y` with `yᵀA ≥ e_j`, `yᵀb = max x_j`.
    Bounded(Vec<BigRational>),
    /// A ray `d ≥ 0`, `A·d = 0`, `d_j > 0`.
    Unbounded(Vec<BigRational>),
}

/// Dense simplex tableau over `A'x + a = b'` where `A'`, `b'` are the rows
/// of the system with signs flipped so that `b' ≥ 0`, and `a` are artificial
/// columns. The artificial block of the tableau is `B⁻¹`.
struct Tableau {
    rows: Vec<Vec<BigRational>>,
    basis: Vec<usize>,
    sign: Vec<bool>,
    n: usize,
    m: usize,
}

impl Tableau {
    fn rhs(&self) -> usize {
        self.n + self.m
    }

    fn phase_one(a: &[Vec<BigInt>], b: &[BigInt]) -> Result<Tableau, Vec<BigRational>> {
        let m = a.len();
        let n = a.first().map_or(0, |r| r.len());
        let sign: Vec<bool> = b.iter().map(|x| x.is_negative()).collect();
        let rows = (0..m)
            .map(|i| {
                let s = |x: &BigInt| BigRational::from_integer(if sign[i] { -x } else { x.clone() });
                let mut row: Vec<BigRational> = a[i].iter().map(s).collect();
                row.extend((0..m).map(|k| BigRational::from_integer(BigInt::from((k == i) as u8))));
                row.push(s(&b[i]));
                row
            })
            .collect();
        let mut t = Tableau { rows, basis: (n..n + m).collect(), sign, n, m };
        let cost = |k: usize| if k >= n { BigRational::one() } else { BigRational::zero() };
        t.minimize(&cost);
        let infeasibility: BigRational =
            (0..m).filter(|&p| t.basis[p] >= n).map(|p| t.rows[p][t.rhs()].clone()).sum();
        if infeasibility.is_positive() {
            let mut y = vec![BigRational::zero(); m];
            for p in (0..m).filter(|&p| t.basis[p] >= n) {
                for (i, yi) in y.iter_mut().enumerate() {
                    *yi += &t.rows[p][n + i];
                }
            }
            return Err(t.unflip(y));
        }
        // Drive remaining artificials out; rows with no structural entry are redundant.
        for p in 0..m {
            if t.basis[p] >= n {
                if let Some(k) = (0..n).find(|&k| !t.rows[p][k].is_zero()) {
                    t.pivot(p, k);
                }
            }
        }
        Ok(t)
    }

    fn unflip(&self, mut y: Vec<BigRational>) -> Vec<BigRational> {
        for (yi, s) in y.iter_mut().zip(&self.sign) {
            if *s {
                *yi = -&*yi;
            }
        }
        y
    }

    fn pivot(&mut self, p: usize, k: usize) {
        let inv = self.rows[p][k].recip();
        for v in self.rows[p].iter_mut() {
            *v = &*v * &inv;
        }
        let prow = self.rows[p].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != p && !row[k].is_zero() {
                let f = row[k].clone();
                for (v, pv) in row.iter_mut().zip(&prow) {
                    if !pv.is_zero() {
                        *v -= &f * pv;
                    }
                }
            }
        }
        self.basis[p] = k;
    }

    /// Bland's rule minimisation over the structural columns. Returns the unbounded entering column, if any.
    fn minimize(&mut self, cost: &dyn Fn(usize) -> BigRational) -> Option<usize> {
        loop {
            let reduced = |k: usize| -> BigRational {
                let mut r = cost(k);
                for (p, row) in self.rows.iter().enumerate() {
                    if !row[k].is_zero() {
                        r -= cost(self.basis[p]) * &row[k];
                    }
                }
                r
            };
            let Some(e) = (0..self.n).find(|&k| !self.basis.contains(&k) && reduced(k).is_negative()) else {
                return None;
            };
            let rhs = self.rhs();
            let leave = (0..self.m)
                .filter(|&p| self.rows[p][e].is_positive())
                .map(|p| (&self.rows[p][rhs] / &self.rows[p][e], self.basis[p], p))
                .min_by(|x, y| x.0.cmp(&y.0).then(x.1.cmp(&y.1)));
            match leave {
                Some((_, _, p)) => self.pivot(p, e),
                None => return Some(e),
            }
        }
    }

    fn maximize(&mut self, j: usize) -> Max {
        let cost = |k: usize| if k == j { -BigRational::one() } else { BigRational::zero() };
        match self.minimize(&cost) {
            Some(e) => {
                let mut d = vec![BigRational::zero(); self.n];
                d[e] = BigRational::one();
                for (p, row) in self.rows.iter().enumerate() {
                    if self.basis[p] < self.n {
                        d[self.basis[p]] = -&row[e];
                    }
                }
                Max::Unbounded(d)
            }
            None => {
                let mut y = vec![BigRational::zero(); self.m];
                if let Some(p) = self.basis.iter().position(|&b| b == j) {
                    for (i, yi) in y.iter_mut().enumerate() {
                        *yi = self.rows[p][self.n + i].clone();
                    }
                }
                Max::Bounded(self.unflip(y))
            }
        }
    }
}
