use ccnat_oracles::differential;

#[test]
fn kernel_matches_reference_conversion() {
    let t = differential::conversion(0xC0_FFEE, 3000);
    eprintln!(
        "instances {} accepted {} unsound {} incomplete {} fixpoint-disagreements {}",
        t.instances, t.accepted, t.unsound, t.incomplete, t.fixpoint_disagreements
    );
    assert_eq!(t.unsound, 0);
    assert_eq!(t.fixpoint_disagreements, 0);
    assert!(t.incomplete * 100 < t.instances);
    assert!(t.accepted * 10 > t.instances, "too few positive instances to be informative");
}
