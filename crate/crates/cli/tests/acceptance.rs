//! End-to-end acceptance checks, one test per criterion.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use ccnat_core::congruence::Conversion;
use ccnat_core::reduce::{contract_at, iota_step, normalize, normalize_stepwise, Status, Strategy};
use ccnat_core::term::{Annotation, Term, VarSort};
use ccnat_core::typecheck::Checker;
use ccnat_oracles::conversion::{context, Fo};
use ccnat_oracles::corpus::{typed_context, Corpus};
use ccnat_oracles::differential;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn ccnat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccnat")).args(args).output().expect("binary runs")
}

fn run_golden(stem: &str) -> (String, Option<i32>) {
    let out = ccnat(&["run", golden(&format!("{stem}.ccn")).to_str().unwrap()]);
    (String::from_utf8(out.stdout).unwrap(), out.status.code())
}

fn expected(stem: &str) -> String {
    std::fs::read_to_string(golden(&format!("{stem}.expected"))).unwrap()
}

#[test]
fn worked_example_contradiction() {
    let start = Instant::now();
    let (stdout, code) = run_golden("worked_example");
    let elapsed = start.elapsed();
    assert_eq!(stdout, expected("worked_example"));
    assert_eq!(code, Some(0));
    assert!(elapsed < Duration::from_secs(1), "{elapsed:?}");
}

#[test]
fn axiom_types_match_goldens() {
    let (stdout, code) = run_golden("axioms");
    assert_eq!(stdout.as_bytes(), expected("axioms").as_bytes());
    assert_eq!(code, Some(0));
}

fn motive() -> Term {
    Term::lambda("n", Annotation::U, Term::nat(), &Term::nat())
}

fn step_fn(body: impl Fn(Term, Term) -> Term) -> Term {
    let n = Term::var("n", VarSort::Star);
    let p = Term::var("p", VarSort::Star);
    let inner = Term::lambda("p", Annotation::U, Term::nat(), &body(n, p));
    Term::lambda("n", Annotation::U, Term::nat(), &inner)
}

#[test]
fn recursor_goldens_and_addition() {
    let (stdout, code) = run_golden("iota");
    assert_eq!(stdout, expected("iota"));
    assert_eq!(code, Some(1), "the last command is a rejected conversion");

    let x = Term::var("x", VarSort::Star);
    let fs = step_fn(|n, p| Term::add(n, p));
    for k in 0..=5u64 {
        // rec 0 Q f0 fS ▷ f0
        let at_zero = Term::rec(Term::zero(), motive(), x.clone(), fs.clone());
        assert_eq!(iota_step(&at_zero), Some(x.clone()));
        // rec (S k) Q f0 fS ▷ fS k (rec k Q f0 fS)
        let at_succ = Term::rec(Term::numeral(k + 1), motive(), x.clone(), fs.clone());
        let rest = Term::rec(Term::numeral(k), motive(), x.clone(), fs.clone());
        assert_eq!(iota_step(&at_succ), Some(Term::apps(fs.clone(), [Term::numeral(k), rest])));
    }

    let succ = step_fn(|_, p| Term::succ(p));
    for m in 0..=5u64 {
        for n in 0..=5u64 {
            let sum = Term::rec(Term::numeral(m), motive(), Term::numeral(n), succ.clone());
            let r = normalize(&sum, 10_000);
            assert_eq!(r.status, Status::NormalForm);
            assert_eq!(r.term, Term::numeral(m + n), "{m} + {n}");
        }
    }
}

#[test]
fn arithmetic_matches_oracle_on_grid() {
    let start = Instant::now();
    let t = differential::arith_grid(30);
    eprintln!("{t:?} in {:?}", start.elapsed());
    assert!(t.systems > 4000, "{t:?}");
    assert_eq!(t.disagreements, 0, "{t:?}");
    assert_eq!(t.bad_evidence, 0, "{t:?}");
    assert!(start.elapsed() < Duration::from_secs(300));
}

#[test]
fn conversion_matches_oracle() {
    let t = differential::conversion(0xC0_FFEE, 3000);
    eprintln!("{t:?}");
    assert_eq!(t.unsound, 0, "{t:?}");
    assert!(t.incomplete * 100 < t.instances, "{t:?}");
    assert_eq!(t.fixpoint_disagreements, 0, "{t:?}");
}

fn random_problem(rng: &mut ChaCha8Rng) -> (Vec<(Fo, Fo)>, Fo, Fo) {
    let side = |rng: &mut ChaCha8Rng| {
        let budget = rng.gen_range(1..=6);
        differential::random_fo(rng, budget)
    };
    let nh = rng.gen_range(0..=3);
    let hyps = (0..nh).map(|_| (side(rng), side(rng))).collect();
    let t = side(rng);
    let u = if rng.gen_bool(0.3) { t.clone() } else { side(rng) };
    (hyps, t, u)
}

/// Replace `x` by `by` throughout.
fn subst_x(t: &Fo, by: &Fo) -> Fo {
    match t {
        Fo::Var(0) => by.clone(),
        Fo::Var(_) | Fo::Zero => t.clone(),
        Fo::Succ(a) => Fo::Succ(Box::new(subst_x(a, by))),
        Fo::F(a) => Fo::F(Box::new(subst_x(a, by))),
        Fo::Add(a, b) => Fo::Add(Box::new(subst_x(a, by)), Box::new(subst_x(b, by))),
    }
}

fn positions(t: &Term) -> Vec<Vec<u8>> {
    fn go(t: &Term, path: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        out.push(path.clone());
        for (i, c) in t.children().into_iter().enumerate() {
            path.push(i as u8);
            go(c, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

#[test]
fn conversion_and_typing_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9E0);
    let conv = |hyps: &[(Fo, Fo)], t: &Fo, u: &Fo| {
        Conversion::default().convertible(&context(hyps), &t.to_term(), &u.to_term()).unwrap()
    };
    let f = |t: &Fo| Fo::F(Box::new(t.clone()));
    let s = |t: &Fo| Fo::Succ(Box::new(t.clone()));
    for _ in 0..500 {
        let (hyps, t, u) = random_problem(&mut rng);
        let v = differential::random_fo(&mut rng, 4);
        assert!(conv(&hyps, &t, &t), "reflexivity");
        let tu = conv(&hyps, &t, &u);
        assert_eq!(tu, conv(&hyps, &u, &t), "symmetry");
        if tu && conv(&hyps, &u, &v) {
            assert!(conv(&hyps, &t, &v), "transitivity");
        }
        if tu {
            assert!(conv(&hyps, &f(&t), &f(&u)) && conv(&hyps, &s(&t), &s(&u)), "congruence");
            let g = differential::random_fo(&mut rng, 3);
            let inst: Vec<(Fo, Fo)> = hyps.iter().map(|(l, r)| (subst_x(l, &g), subst_x(r, &g))).collect();
            assert!(conv(&inst, &subst_x(&t, &g), &subst_x(&u, &g)), "substitution");
        }
        assert!(!conv(&[], &Fo::Zero, &s(&t)), "zero is not a successor");
    }

    let ctx = typed_context();
    let mut checker = Checker::default();
    for seed in 0..1000 {
        let t = Corpus::new(seed).nat(4, &[]);
        checker.check(&ctx, &t, &Term::nat()).unwrap();
        for p in positions(&t) {
            if let Some(r) = contract_at(&t, &p) {
                assert!(checker.check(&ctx, &r, &Term::nat()).is_ok(), "subject reduction: {t} -> {r}");
            }
        }
        let lo = normalize_stepwise(&t, 100_000, Strategy::LeftmostOutermost);
        let ri = normalize_stepwise(&t, 100_000, Strategy::RightmostInnermost);
        assert_eq!(lo.status, Status::NormalForm);
        assert_eq!(lo.term, ri.term, "strategy independence: {t}");
    }
}

#[test]
fn certificates_replay_and_resist_tampering() {
    let t = differential::certificates(0x7A3, 1500, 1000);
    eprintln!("{t:?}");
    assert!(t.accepted > 100, "{t:?}");
    assert_eq!(t.verified, t.accepted, "{t:?}");
    assert!(t.mutants_rejected * 100 >= t.mutants * 99, "{t:?}");
    assert_eq!(t.retargeted_rejected, t.retargeted, "{t:?}");

    let dir = tempfile::tempdir().unwrap();
    let out = ccnat(&["run", golden("worked_example.ccn").to_str().unwrap(), "--emit-cert", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut certs: Vec<PathBuf> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "cert"))
        .collect();
    certs.sort();
    assert_eq!(certs.len(), 2, "{certs:?}");
    for c in &certs {
        let ctx = c.with_extension("ctx");
        let goal = std::fs::read_to_string(c.with_extension("goal")).unwrap();
        let out = ccnat(&["verify-cert", c.to_str().unwrap(), "--context", ctx.to_str().unwrap(), "--goal", goal.trim()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(String::from_utf8(out.stdout).unwrap(), "CERT ok\n");
    }
}

#[test]
fn falsity_candidates_are_rejected() {
    let src = std::fs::read_to_string(golden("falsity.txt")).unwrap();
    let candidates: Vec<&str> = src.lines().filter(|l| !l.trim().is_empty()).collect();
    assert_eq!(candidates.len(), 50);
    let dir = tempfile::tempdir().unwrap();
    for (i, t) in candidates.iter().enumerate() {
        let file = dir.path().join(format!("{i}.ccn"));
        std::fs::write(&file, format!("(check {t} (pi x u star x))\n")).unwrap();
        let out = ccnat(&["run", file.to_str().unwrap()]);
        let stdout = String::from_utf8(out.stdout).unwrap();
        assert_eq!(out.status.code(), Some(1), "candidate {i}: {t}\n{stdout}");
        assert!(stdout.starts_with("CHECK fail"), "candidate {i}: {stdout}");
    }
}

#[test]
fn reports_are_deterministic() {
    let a = ccnat(&["run", "--explain", golden("worked_example.ccn").to_str().unwrap()]);
    let b = ccnat(&["run", "--explain", golden("worked_example.ccn").to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8(a.stdout).unwrap().contains("MERGE"));
}
