//! Convergence and determinism properties of the thresholded descent
//! loop, certified against enumeration oracles where one exists.

use sdist::lattice::LatticeDomain;
use sdist::matrix::Matrix;
use sdist::measures::{DenseFunction, Distribution};
use sdist::objectives::{KlObjective, L2Objective, QuadraticSensing, VectorObjective};
use sdist::projection::{exact_sparse_project, simplex_project, vector_sparse_project};
use sdist::rng::{seeded, uniform_simplex};
use sdist::solvers::{dist_iht, vector_iht, ProjectionMode, SolverConfig};

fn random_distribution(seed: u64, domain: LatticeDomain) -> Distribution {
    let mut rng = seeded(seed);
    let weights = uniform_simplex(&mut rng, domain.num_points());
    Distribution::new(DenseFunction::new(domain, weights).unwrap()).unwrap()
}

#[test]
fn one_step_convergence_to_the_projection_of_any_target() {
    // ℓ2 objective, exact projection, μ = 1/β = 1/2: the gradient step
    // from any iterate lands exactly on the target, so from iteration 1
    // onward the iterate is the exact sparse projection of the target.
    for seed in [3u64, 17, 99] {
        let domain = LatticeDomain::new(4, 2).unwrap();
        let target = random_distribution(seed, domain);
        let obj = L2Objective::new(target.clone());
        let optimum = exact_sparse_project(target.as_function(), 2).unwrap();

        let mut cfg = SolverConfig::new(0.5, 6);
        cfg.projection = ProjectionMode::Exact;
        cfg.seed = seed + 1;
        // The trapped-escape heuristic would deliberately kick the
        // converged iterate; the fixed-point property needs it off.
        cfg.max_doublings = 0;
        let result = dist_iht(&obj, 2, &cfg).unwrap();
        for record in &result.trace.records()[1..] {
            assert!(
                (record.objective - optimum.distance_sq).abs() < 1e-9,
                "iter {} objective {} vs optimum {}",
                record.iter,
                record.objective,
                optimum.distance_sq
            );
        }
        assert!((result.best_objective - optimum.distance_sq).abs() < 1e-9);
    }
}

#[test]
fn kl_iht_improves_over_its_random_start() {
    let domain = LatticeDomain::new(5, 2).unwrap();
    let mut rng = seeded(41);
    let raw = uniform_simplex(&mut rng, domain.num_points());
    // Strictly positive target.
    let n = domain.num_points() as f64;
    let values: Vec<f64> = raw.iter().map(|&v| 0.9 * v + 0.1 / n).collect();
    let target = Distribution::new(DenseFunction::new(domain, values).unwrap()).unwrap();
    let obj = KlObjective::new(target).unwrap();

    let mut cfg = SolverConfig::new(0.05, 60);
    cfg.seed = 5;
    let result = dist_iht(&obj, 2, &cfg).unwrap();
    let start = result.trace.records()[0].objective;
    assert!(result.best_objective < start);
    assert!(result.best_objective.is_finite());
    assert!(result.best.dist().is_k_sparse(2));
}

/// Brute-force optimal distance to the k-sparse simplex set.
fn vector_projection_oracle_distance(v: &[f64], k: usize) -> f64 {
    let len = v.len();
    let mut combo: Vec<usize> = (0..k).collect();
    let mut best = f64::INFINITY;
    loop {
        let restricted: Vec<f64> = combo.iter().map(|&i| v[i]).collect();
        let fitted = simplex_project(&restricted).unwrap();
        let inside: f64 = fitted
            .iter()
            .zip(&restricted)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let outside: f64 = (0..len)
            .filter(|i| !combo.contains(i))
            .map(|i| v[i] * v[i])
            .sum();
        best = best.min(inside + outside);
        let mut i = k;
        let mut advanced = false;
        while i > 0 {
            i -= 1;
            if combo[i] != i + len - k {
                combo[i] += 1;
                for j in i + 1..k {
                    combo[j] = combo[j - 1] + 1;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            return best;
        }
    }
}

#[test]
fn geometric_decrease_diagnostic_on_a_strict_quadratic() {
    // Diagonal sensing with eigenvalue spread 1..1.9 gives a quadratic
    // with β/α = 1.9 ∈ (2 − 1/(1+φ), 2) for the measured φ = 0, so the
    // excess objective contracts by η = 1 − (1+φ)(2 − β/α) per iteration
    // whenever it sits above the additive floor c. This is a soft
    // diagnostic: the floor is loose, so the meaningful assertions are
    // the measured φ, the contraction-or-below-floor disjunction, and
    // actual convergence.
    let dim = 8;
    let k = 2;
    let diag: Vec<f64> = (0..dim)
        .map(|i| (1.0 + 0.9 * i as f64 / (dim - 1) as f64).sqrt())
        .collect();
    let mut data = vec![0.0; dim * dim];
    for (i, d) in diag.iter().enumerate() {
        data[i * dim + i] = *d;
    }
    let sensing = Matrix::new(dim, dim, data).unwrap();
    // A k-sparse simplex target makes the constrained and unconstrained
    // optima coincide with value 0.
    let mut target = vec![0.0; dim];
    target[1] = 0.7;
    target[4] = 0.3;
    let obj = QuadraticSensing::new(sensing, &target).unwrap();

    let alpha = 2.0 * diag.iter().map(|d| d * d).fold(f64::INFINITY, f64::min);
    let beta = 2.0 * diag.iter().map(|d| d * d).fold(0.0, f64::max);
    let ratio = beta / alpha;
    assert!((1.89999..1.90001).contains(&ratio));

    let mut cfg = SolverConfig::new(1.0 / beta, 80);
    cfg.seed = 9;
    cfg.max_doublings = 0;
    let result = vector_iht(&obj, k, &cfg).unwrap();

    // Measure the projection slack along the path: the vector projection
    // is exact, so φ = 0 up to rounding.
    let mut w: Vec<f64> = {
        let mut start = vec![0.0; dim];
        // Reproduce the solver's init to replay landings.
        let support = sdist::rng::sample_indices(&mut seeded(9), dim, k);
        for &i in &support {
            start[i] = 1.0 / k as f64;
        }
        start
    };
    let mut phi_max: f64 = 0.0;
    for _ in 0..20 {
        let grad = obj.gradient(&w).unwrap();
        let landing: Vec<f64> = w
            .iter()
            .zip(&grad)
            .map(|(x, g)| x - cfg.mu0 * g)
            .collect();
        let projected = vector_sparse_project(&landing, k).unwrap();
        let achieved: f64 = projected
            .iter()
            .zip(&landing)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let oracle = vector_projection_oracle_distance(&landing, k);
        if oracle > 1e-18 {
            phi_max = phi_max.max(achieved / oracle - 1.0);
        }
        w = projected;
    }
    assert!(phi_max.abs() < 1e-9, "measured projection slack {phi_max}");

    let phi = phi_max.max(0.0);
    assert!(ratio > 2.0 - 1.0 / (1.0 + phi) && ratio < 2.0);
    let eta = 1.0 - (1.0 + phi) * (2.0 - ratio) + 0.05;

    // Empirical Lipschitz bound over the visited iterates.
    let lipschitz = result
        .trace
        .records()
        .iter()
        .map(|r| r.objective.sqrt() * 2.0 * beta.sqrt())
        .fold(0.0, f64::max)
        .max(1e-6);
    let c = (phi / (2.0 * beta)
        + (1.0 + phi) * (beta - alpha) / (2.0 * alpha * alpha))
        * lipschitz
        * lipschitz
        / ((1.0 + phi) * (2.0 - ratio));

    // Optimal value is 0 at the sparse simplex target.
    let records = result.trace.records();
    for pair in records.windows(2) {
        let excess_now = pair[0].objective;
        let excess_next = pair[1].objective;
        assert!(
            excess_next <= eta * excess_now + 1e-12 || excess_now <= c + 1e-12,
            "no contraction: {excess_now} -> {excess_next}, floor {c}"
        );
    }
    assert!(
        result.best_objective <= c + 1e-9,
        "did not converge below the floor: {} vs {}",
        result.best_objective,
        c
    );
    assert!(result.best_objective < 1e-6, "stalled far from optimum");
}
