//! Shared instance builders for the criterion benches.

use sdist::lattice::{LatticeDomain, Support};
use sdist::measures::{DenseFunction, Distribution};
use sdist::rng::{sample_indices, seeded, uniform, uniform_simplex};

/// A random distribution supported on `k` random dimensions.
pub fn sparse_distribution(n: usize, m: usize, k: usize, seed: u64) -> Distribution {
    let domain = LatticeDomain::new(n, m).expect("bench domain fits");
    let mut rng = seeded(seed);
    let support = Support::new(sample_indices(&mut rng, n, k)).expect("indices unique");
    let inside = domain.restricted_indices(&support).expect("support valid");
    let weights = uniform_simplex(&mut rng, inside.len());
    let mut values = vec![0.0; domain.num_points()];
    for (&i, &w) in inside.iter().zip(&weights) {
        values[i] = w;
    }
    Distribution::new(DenseFunction::new(domain, values).expect("finite")).expect("valid")
}

/// A dense gradient-step-like function: a sparse distribution plus a
/// small dense perturbation, which is the shape the projections see
/// inside the solver loop.
pub fn perturbed_function(n: usize, m: usize, k: usize, seed: u64) -> DenseFunction {
    let base = sparse_distribution(n, m, k, seed);
    let mut rng = seeded(seed ^ 0xFFEE);
    let values: Vec<f64> = base
        .values()
        .iter()
        .map(|&v| v + 0.02 * (uniform(&mut rng) - 0.5))
        .collect();
    DenseFunction::new(base.domain(), values).expect("finite")
}
