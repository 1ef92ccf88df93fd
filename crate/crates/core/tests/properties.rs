mod common;

#[test]
fn ring_axioms() {
    common::ring_axioms().unwrap();
}

#[test]
fn truncation_coherence() {
    common::truncation_coherence().unwrap();
}

#[test]
fn wk_dimension_string_dilaton() {
    common::wk_dimension_string_dilaton().unwrap();
}

#[test]
fn caj_homogeneity() {
    common::caj_homogeneity().unwrap();
}

#[test]
fn virasoro_brackets() {
    common::virasoro_brackets().unwrap();
}

#[test]
fn jet_homogeneity() {
    common::jet_homogeneity().unwrap();
}
