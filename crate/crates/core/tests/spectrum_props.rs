mod support;

#[test]
fn spectrum_algebra_matches_unit_oracle() {
    support::spectrum_laws(10_000).unwrap();
}

#[test]
fn trait_and_label_order_laws() {
    support::label_laws(10_000).unwrap();
}
