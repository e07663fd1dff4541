use super::*;
use crate::congruence::Conversion;
use crate::syntax::parse_term;
use crate::term::Context;

fn gamma_ex() -> Context {
    let mut g = Context::new();
    let mut decl = |x: &str, a: Annotation, ty: &str| {
        let t = parse_term(&g, ty).unwrap();
        g.push(x, a, t).unwrap();
    };
    for x in ["x", "y", "t"] {
        decl(x, Annotation::U, "nat");
    }
    decl("f", Annotation::U, "(-> nat nat)");
    decl("p1", Annotation::R, "(eq nat t 2)");
    decl("p2", Annotation::R, "(eq nat (f (+ x 3)) (+ x 2))");
    decl("p3", Annotation::R, "(eq nat (+ (f (+ y t)) 2) y)");
    decl("p4", Annotation::R, "(eq nat (+ y 1) (+ x 2))");
    g
}

fn certify(g: &Context, a: &str, b: &str) -> (Term, Term, Certificate) {
    let (a, b) = (parse_term(g, a).unwrap(), parse_term(g, b).unwrap());
    let j = Conversion::default().judge(g, &a, &b, true).unwrap();
    let cert = emit(g, &j.proof.expect("convertible"));
    (a, b, cert)
}

fn kinds(c: &Certificate) -> Vec<&'static str> {
    c.steps
        .iter()
        .map(|s| match s.kind {
            StepKind::BetaIota { .. } => "beta",
            StepKind::Hyp { .. } => "hyp",
            StepKind::Sym(_) => "sym",
            StepKind::Trans(..) => "trans",
            StepKind::Congr(..) => "congr",
            StepKind::RecCongr(_) => "rec",
            StepKind::EqCongr(_) => "eqi",
            StepKind::Binder { .. } => "binder",
            StepKind::Arith { .. } => "arith",
            StepKind::Collapse { .. } => "collapse",
        })
        .collect()
}

#[test]
fn worked_example_round_trips() {
    let g = gamma_ex();
    let (a, b, cert) = certify(&g, "(+ y t)", "(+ x 3)");
    check(&g, &cert, &a, &b).unwrap();
    let k = kinds(&cert);
    assert_eq!(k.iter().filter(|s| **s == "hyp").count(), 2, "{k:?}");
    assert_eq!(k.iter().filter(|s| **s == "arith").count(), 1, "{k:?}");
    let text = print(&cert);
    assert!(text.starts_with("ccnat-cert v1\n"));
    let back = parse(&text).unwrap();
    assert_eq!(back, cert);
    assert_eq!(print(&back), text);
}

#[test]
fn collapse_certificate() {
    let g = gamma_ex();
    let (a, b, cert) = certify(&g, "0", "1");
    check(&g, &cert, &a, &b).unwrap();
    let k = kinds(&cert);
    assert_eq!(k.last(), Some(&"collapse"));
    assert_eq!(k.iter().filter(|s| **s == "hyp").count(), 4, "{k:?}");
    assert!(k.contains(&"congr") && k.contains(&"arith"));
}

#[test]
fn reflexivity_is_one_step() {
    let g = gamma_ex();
    let (a, b, cert) = certify(&g, "(f x)", "(f x)");
    assert_eq!(kinds(&cert), ["beta"]);
    assert!(verify(&g, &cert, &a, &b));
}

#[test]
fn binder_certificate_opens_a_scope() {
    let mut g = Context::new();
    g.push("a", Annotation::U, Term::nat()).unwrap();
    let p = parse_term(&g, "(-> nat star)").unwrap();
    g.push("P", Annotation::U, p).unwrap();
    let (a, b, cert) = certify(&g, "(pi h r (eq nat a 0) (P a))", "(pi h r (eq nat a 0) (P 0))");
    check(&g, &cert, &a, &b).unwrap();
    assert_eq!(cert.scopes.len(), 1);
    let text = print(&cert);
    assert_eq!(parse(&text).unwrap(), cert);
}

#[test]
fn tampering_is_detected() {
    let g = gamma_ex();
    let (a, b, cert) = certify(&g, "(f (+ y t))", "(f (+ x 3))");
    assert!(verify(&g, &cert, &a, &b));
    // Wrong goal.
    assert!(!verify(&g, &cert, &a, &a));
    // Different context.
    assert!(!verify(&gamma_ex().prefix(7), &cert, &a, &b));
    // Perturbed multiplier.
    let mut bad = cert.clone();
    for s in &mut bad.steps {
        if let StepKind::Arith { witness, .. } = &mut s.kind {
            if let crate::arith::ArithWitness::IntCombination(c) = &mut witness.below {
                if let Some(m) = c.multipliers.values_mut().next() {
                    *m += 1;
                }
            }
        }
    }
    assert!(!verify(&g, &bad, &a, &b));
    // Forward reference.
    let mut bad = cert.clone();
    let n = bad.steps.len();
    bad.steps.swap(0, n - 1);
    assert!(!verify(&g, &bad, &a, &b));
}
