//! Seeded random comparisons between the kernel and the reference
//! procedures, shared by the test suites.

use ccnat_core::arith::{self, check_entailment, check_refutation, Atom, Entailment, LinEq, LinPoly, Limits, Search};
use ccnat_core::cert;
use ccnat_core::congruence::Conversion;
use ccnat_core::term::Term;
use crate::conversion::{context, fixpoint, semantic, Fo};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_fo(rng: &mut ChaCha8Rng, budget: usize) -> Fo {
    if budget <= 1 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..5) {
            0 => Fo::Zero,
            1 => Fo::Succ(Box::new(Fo::Zero)),
            k => Fo::Var(k - 2),
        };
    }
    match rng.gen_range(0..3) {
        0 => Fo::Succ(Box::new(random_fo(rng, budget - 1))),
        1 => Fo::F(Box::new(random_fo(rng, budget - 1))),
        _ if budget >= 3 => {
            let left = rng.gen_range(1..budget - 1);
            Fo::Add(Box::new(random_fo(rng, left)), Box::new(random_fo(rng, budget - 1 - left)))
        }
        _ => Fo::F(Box::new(random_fo(rng, budget - 1))),
    }
}

fn subterms(t: &Fo, out: &mut Vec<Fo>) {
    out.push(t.clone());
    match t {
        Fo::Succ(a) | Fo::F(a) => subterms(a, out),
        Fo::Add(a, b) => {
            subterms(a, out);
            subterms(b, out);
        }
        _ => {}
    }
}

/// Queries mix fresh terms with pieces of the hypotheses so that a fair
/// share of them is actually convertible.
fn query_side(rng: &mut ChaCha8Rng, pool: &[Fo]) -> Fo {
    if !pool.is_empty() && rng.gen_bool(0.5) {
        let s = pool[rng.gen_range(0..pool.len())].clone();
        if s.size() < 12 && rng.gen_bool(0.4) {
            return Fo::F(Box::new(s));
        }
        return s;
    }
    let budget = rng.gen_range(1..=12);
    random_fo(rng, budget)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tally {
    pub instances: usize,
    pub accepted: usize,
    pub unsound: usize,
    pub incomplete: usize,
    pub fixpoint_disagreements: usize,
}

pub fn conversion(seed: u64, instances: usize) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally { instances, accepted: 0, unsound: 0, incomplete: 0, fixpoint_disagreements: 0 };
    for _ in 0..instances {
        let nh = rng.gen_range(0..=3);
        let side = |rng: &mut ChaCha8Rng| {
            let budget = rng.gen_range(1..=5);
            random_fo(rng, budget)
        };
        let hyps: Vec<(Fo, Fo)> = (0..nh).map(|_| (side(&mut rng), side(&mut rng))).collect();
        let mut pool = Vec::new();
        for (l, r) in &hyps {
            subterms(l, &mut pool);
            subterms(r, &mut pool);
        }
        let t = query_side(&mut rng, &pool);
        let u = query_side(&mut rng, &pool);
        let ctx = context(&hyps);
        let kernel = Conversion::default().convertible(&ctx, &t.to_term(), &u.to_term()).expect("within limits");
        let truth = semantic(&hyps, &t, &u);
        let least = fixpoint(&hyps, &t, &u);
        tally.accepted += kernel as usize;
        if kernel && !truth {
            tally.unsound += 1;
            eprintln!("unsound: {hyps:?} |- {t:?} ~ {u:?}");
        }
        if !kernel && truth {
            tally.incomplete += 1;
        }
        if kernel != least {
            tally.fixpoint_disagreements += 1;
            eprintln!("fixpoint disagrees (kernel {kernel}): {hyps:?} |- {t:?} ~ {u:?}");
        }
    }
    tally
}

const ARITH_VARS: [&str; 4] = ["w", "x", "y", "z"];

fn arith_poly(coeffs: &[u64], constant: u64) -> LinPoly {
    let mut p = LinPoly::constant(constant);
    for (c, v) in coeffs.iter().zip(ARITH_VARS) {
        for _ in 0..*c {
            p = p.add(&LinPoly::atom(Atom::Var(v.into())));
        }
    }
    p
}

/// Random equation over four variables with coefficients and constants
/// in `0..=3`.
pub fn random_equation(rng: &mut ChaCha8Rng) -> LinEq {
    let mut side = || {
        let c: Vec<u64> = (0..4).map(|_| if rng.gen_bool(0.5) { 0 } else { rng.gen_range(0..=3) }).collect();
        arith_poly(&c, rng.gen_range(0..=3))
    };
    LinEq::new(side(), side())
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ArithTally {
    pub systems: usize,
    pub queries: usize,
    pub disagreements: usize,
    /// Kernel answers whose witness or countermodel failed its own check.
    pub bad_evidence: usize,
}

/// Every system of at most three distinct equations drawn from a fixed
/// family of `family` equations, each queried for consistency and for a
/// fixed list of goals.
pub fn arith_grid(family: usize) -> ArithTally {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let mut eqs: Vec<LinEq> = Vec::new();
    while eqs.len() < family {
        let e = random_equation(&mut rng);
        if !e.is_trivial() && !eqs.contains(&e) {
            eqs.push(e);
        }
    }
    let goals = [
        LinEq::new(arith_poly(&[0, 1], 0), arith_poly(&[0, 0, 1], 0)),
        LinEq::new(arith_poly(&[1], 0), arith_poly(&[], 0)),
        LinEq::new(arith_poly(&[0, 0, 0, 1], 0), arith_poly(&[], 1)),
        LinEq::new(arith_poly(&[1, 1], 0), arith_poly(&[0, 0, 1, 1], 0)),
        LinEq::new(arith_poly(&[], 0), arith_poly(&[], 1)),
    ];
    let mut systems: Vec<Vec<LinEq>> = vec![vec![]];
    for i in 0..family {
        systems.push(vec![eqs[i].clone()]);
        for j in i + 1..family {
            systems.push(vec![eqs[i].clone(), eqs[j].clone()]);
            for k in j + 1..family {
                systems.push(vec![eqs[i].clone(), eqs[j].clone(), eqs[k].clone()]);
            }
        }
    }
    let mut tally = ArithTally { systems: systems.len(), ..ArithTally::default() };
    for sys in &systems {
        let (consistent, ok) = match arith::solve(sys, Limits::default()) {
            Ok(Search::Sat(m)) => (true, sys.iter().all(|e| e.holds(&|a| m[a].clone()))),
            Ok(Search::Refuted(w)) => (false, check_refutation(sys, &w)),
            Err(_) => (!crate::arith::satisfiable(sys), false),
        };
        tally.queries += 1;
        tally.bad_evidence += !ok as usize;
        tally.disagreements += (consistent != crate::arith::satisfiable(sys)) as usize;
        for g in &goals {
            let (entailed, ok) = match arith::entails(sys, g, Limits::default()) {
                Ok(Entailment::Entailed(w)) => (true, check_entailment(sys, g, &w)),
                Ok(Entailment::Countermodel(m)) => {
                    let val = |a: &Atom| m.get(a).cloned().unwrap_or_default();
                    (false, sys.iter().all(|e| e.holds(&val)) && !g.holds(&val))
                }
                Err(_) => (!crate::arith::entails(sys, g), false),
            };
            tally.queries += 1;
            tally.bad_evidence += !ok as usize;
            tally.disagreements += (entailed != crate::arith::entails(sys, g)) as usize;
        }
    }
    tally
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CertTally {
    pub accepted: usize,
    pub verified: usize,
    pub mutants: usize,
    pub mutants_rejected: usize,
    pub retargeted: usize,
    pub retargeted_rejected: usize,
}

/// Certificate text of a term, read off a printed goal line.
fn cert_term_text(t: &Term) -> String {
    let c = cert::Certificate { context: 0, lhs: t.clone(), rhs: t.clone(), scopes: vec![], steps: vec![] };
    let text = cert::print(&c);
    let line = text.lines().find(|l| l.starts_with("(goal ")).unwrap();
    let inner = &line["(goal ".len()..line.len() - 1];
    inner[..(inner.len() - 1) / 2].to_string()
}

/// Emit certificates for the accepted conversions among `problems` random
/// instances, replay them, then replay `mutants` single-field mutants and,
/// for every certificate, a copy retargeted at a non-convertible goal.
pub fn certificates(seed: u64, problems: usize, mutants: usize) -> CertTally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = CertTally::default();
    let mut corpus = Vec::new();
    for _ in 0..problems {
        let nh = rng.gen_range(0..=3);
        let side = |rng: &mut ChaCha8Rng| {
            let budget = rng.gen_range(1..=5);
            random_fo(rng, budget)
        };
        let hyps: Vec<(Fo, Fo)> = (0..nh).map(|_| (side(&mut rng), side(&mut rng))).collect();
        let mut pool = Vec::new();
        for (l, r) in &hyps {
            subterms(l, &mut pool);
            subterms(r, &mut pool);
        }
        let (t, u) = (query_side(&mut rng, &pool).to_term(), query_side(&mut rng, &pool).to_term());
        let ctx = context(&hyps);
        let mut conv = Conversion::default();
        let j = conv.judge(&ctx, &t, &u, true).expect("within limits");
        let Some(proof) = j.proof else { continue };
        tally.accepted += 1;
        let c = cert::emit(&ctx, &proof);
        let text = cert::print(&c);
        let replayed = cert::parse(&text).map(|p| cert::verify(&ctx, &p, &t, &u)).unwrap_or(false);
        tally.verified += replayed as usize;
        if !replayed {
            eprintln!("certificate does not replay: {hyps:?} |- {t} ~ {u}: {:?}\n{text}", cert::parse(&text).map(|p| cert::check(&ctx, &p, &t, &u)));
        }

        // Retarget at some u' with t ≄ u'.
        let mut candidates: Vec<Term> = (0..20).map(|_| query_side(&mut rng, &pool).to_term()).collect();
        candidates.extend((0..8).map(|k| Term::succ(Term::add(u.clone(), Term::numeral(k)))));
        let wrong = candidates.into_iter().find(|w| !conv.convertible(&ctx, &t, w).unwrap());
        if let Some(w) = wrong {
            let forged = text.replace(&cert_term_text(&u), &cert_term_text(&w));
            tally.retargeted += 1;
            let ok = cert::parse(&forged).map(|p| cert::verify(&ctx, &p, &t, &w)).unwrap_or(false);
            tally.retargeted_rejected += !ok as usize;
        }
        corpus.push((ctx, t, u, text));
    }
    if corpus.is_empty() {
        return tally;
    }
    for _ in 0..mutants {
        let (ctx, t, u, text) = &corpus[rng.gen_range(0..corpus.len())];
        let m = crate::tamper::mutate(text, &mut rng);
        tally.mutants += 1;
        let ok = cert::parse(&m).map(|p| cert::verify(ctx, &p, t, u)).unwrap_or(false);
        tally.mutants_rejected += !ok as usize;
    }
    tally
}
