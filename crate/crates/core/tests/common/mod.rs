#![allow(dead_code)]

pub mod naive;

use greenroute_core::instgen::{generate, GenSpec};
use greenroute_core::Instance;

/// Generated instances for seeds `seed, seed + 1, ...`, skipping specs the
/// generator rejects.
pub fn instances(n: usize, first_seed: u64, count: usize, fleet: Option<usize>) -> Vec<(u64, Instance)> {
    (first_seed..)
        .filter_map(|seed| {
            let mut spec = GenSpec::new(n, seed);
            spec.fleet_size = fleet;
            generate(&spec).ok().map(|inst| (seed, inst))
        })
        .take(count)
        .collect()
}
