mod common;

use ccnat_core::reduce::{contract_at, normalize, normalize_stepwise, Status, Strategy};
use ccnat_core::term::Term;
use ccnat_core::typecheck::Checker;
use common::{positions, typed_context, Corpus};
use proptest::prelude::*;

const FUEL: u64 = 100_000;

fn corpus_term(seed: u64) -> Term {
    Corpus::new(seed).nat(4, &[])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// Every one-step reduct of a well-typed term keeps its type.
    #[test]
    fn subject_reduction(seed in any::<u64>()) {
        let ctx = typed_context();
        let t = corpus_term(seed);
        let mut checker = Checker::default();
        checker.check(&ctx, &t, &Term::nat()).unwrap();
        for p in positions(&t) {
            if let Some(r) = contract_at(&t, &p) {
                prop_assert!(checker.check(&ctx, &r, &Term::nat()).is_ok(), "{} -> {} at {:?}", t, r, p);
            }
        }
    }

    /// Outermost and innermost reduction reach the same normal form.
    #[test]
    fn strategy_independence(seed in any::<u64>()) {
        let t = corpus_term(seed);
        let lo = normalize_stepwise(&t, FUEL, Strategy::LeftmostOutermost);
        let ri = normalize_stepwise(&t, FUEL, Strategy::RightmostInnermost);
        let fast = normalize(&t, FUEL);
        prop_assert_eq!(lo.status, Status::NormalForm);
        prop_assert_eq!(ri.status, Status::NormalForm);
        prop_assert_eq!(&lo.term, &ri.term);
        prop_assert_eq!(&lo.term, &fast.term);
    }

    /// Local confluence on arbitrary pairs of redexes.
    #[test]
    fn reducts_join(seed in any::<u64>()) {
        let t = corpus_term(seed);
        let reducts: Vec<Term> = positions(&t).iter().filter_map(|p| contract_at(&t, p)).collect();
        let nf = normalize(&t, FUEL).term;
        for r in reducts {
            prop_assert_eq!(&normalize(&r, FUEL).term, &nf);
        }
    }
}

#[test]
fn corpus_has_redexes() {
    let mut with_redex = 0;
    let mut total_size = 0;
    for seed in 0..1000 {
        let t = corpus_term(seed);
        total_size += t.size();
        with_redex += positions(&t).iter().any(|p| contract_at(&t, p).is_some()) as usize;
    }
    assert!(with_redex > 600, "{with_redex}");
    assert!(total_size > 10_000, "{total_size}");
}
