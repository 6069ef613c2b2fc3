//! Shared fixtures for the criterion benchmarks.

use toeplitz_core::{DomainModel, GridSpec};

/// Grid resolutions exercised by the assembly benchmarks, smallest first.
pub fn bench_grids() -> Vec<GridSpec> {
    vec![
        GridSpec::new(20, 32),
        GridSpec::new(40, 64),
        GridSpec::new(60, 128),
    ]
}

pub fn domains() -> Vec<DomainModel> {
    vec![DomainModel::disc(), DomainModel::ball(2).expect("ball2")]
}
