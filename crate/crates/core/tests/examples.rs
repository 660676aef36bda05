//! Every example under `examples/` runs and produces sensible output.

#[allow(dead_code)]
mod classify {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/classify.rs"));
}

#[allow(dead_code)]
mod fourier_multiplicity {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/fourier_multiplicity.rs"));
}

#[allow(dead_code)]
mod odd_witness {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/odd_witness.rs"));
}

#[allow(dead_code)]
mod even_witness {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/even_witness.rs"));
}

#[allow(dead_code)]
mod exponent_two {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/exponent_two.rs"));
}

#[allow(dead_code)]
mod psi_sweep {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/psi_sweep.rs"));
}

#[allow(dead_code)]
mod rounding_sets {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/rounding_sets.rs"));
}

#[allow(dead_code)]
mod corollary {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/corollary.rs"));
}

#[allow(dead_code)]
mod verify_properties {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/verify_properties.rs"));
}


use common_witness::rounding::Classification;

#[test]
fn classify_example() {
    let got = classify::run_example().unwrap();
    assert_eq!(
        got,
        vec![
            Classification::FullyCommonNotFullySidorenko,
            Classification::NotFullyCommon,
            Classification::FullySidorenko,
            Classification::FullyCommonNotFullySidorenko,
            Classification::NotApplicable,
            Classification::FullyCommonNotFullySidorenko,
        ]
    );
}

#[test]
fn fourier_example_agrees() {
    assert!(fourier_multiplicity::run_example().unwrap() < 1e-9);
}

#[test]
fn odd_witness_example() {
    assert!(odd_witness::run_example().unwrap() < 0.125);
}

#[test]
fn even_witness_example() {
    assert!(even_witness::run_example().unwrap() < 0.125);
}

#[test]
fn exponent_two_example() {
    for dev in exponent_two::run_example().unwrap() {
        assert!((dev + 1.0 / 64.0).abs() < 1e-12);
    }
}

#[test]
fn psi_sweep_example() {
    assert!(psi_sweep::run_example().unwrap() < 0.0);
}

#[test]
fn rounding_example() {
    assert!(rounding_sets::run_example().unwrap());
}

#[test]
fn corollary_example() {
    assert!(corollary::run_example().unwrap() > 0.0);
}

#[test]
fn verify_example() {
    assert!(verify_properties::run_example().unwrap());
}
