mod common;

#[test]
fn ring_laws() {
    common::ring_laws().assert_passed();
}

#[test]
fn substitution_laws() {
    common::substitution_laws().assert_passed();
}

#[test]
fn leibniz() {
    common::leibniz().assert_passed();
}

#[test]
fn division_round_trip() {
    common::division_round_trip().assert_passed();
}

#[test]
fn scalar_field_laws() {
    common::scalar_field_laws().assert_passed();
}

#[test]
fn determinant_agreement() {
    common::determinant_agreement().assert_passed();
}

#[test]
fn linear_solve() {
    common::linear_solve().assert_passed();
}

#[test]
fn parse_render_round_trip() {
    common::parse_render_round_trip().assert_passed();
}

#[test]
fn phat_psd_on_image() {
    common::phat_psd_on_image().assert_passed();
}

#[test]
fn eigen_trace_det() {
    common::eigen_trace_det().assert_passed();
}

#[test]
fn minor_sums_match_eigenvalues() {
    common::minor_sums_match_eigenvalues().assert_passed();
}

#[test]
fn dihedral_closure() {
    common::dihedral_closure().assert_passed();
}

#[test]
fn classify_orbit_invariance() {
    common::classify_orbit_invariance().assert_passed();
}

#[test]
fn phi_consistency() {
    common::phi_consistency().assert_passed();
}

#[test]
fn delta_soundness() {
    common::delta_soundness().assert_passed();
}

#[test]
fn rank_coherence() {
    common::rank_coherence().assert_passed();
}
