//! Shared fixtures for the criterion benchmarks.

use morrey_core::{Exponents, WarpedModel};

/// The models exercised by every benchmark group.
pub fn models(n: usize) -> Vec<WarpedModel> {
    vec![
        WarpedModel::euclidean(n).expect("valid dimension"),
        WarpedModel::hyperbolic(n, 1.0).expect("valid dimension"),
        WarpedModel::sphere(n, 1.0).expect("valid dimension"),
    ]
}

pub fn exponents() -> Exponents {
    Exponents::new(2, 4.0).expect("p > n")
}
