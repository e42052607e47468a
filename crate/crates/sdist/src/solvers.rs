//! Iterative solvers for `min F[p] s.t. p ∈ D_k` and their vector-mode
//! counterparts, plus the comparison baselines.
//!
//! The main loop is hard-thresholded projected gradient descent: take a
//! gradient step `q = p − μ·δF/δp`, then project back onto the sparse
//! set with either the greedy or the exhaustive projection. Because the
//! sparse set is nonconvex the objective may transiently rise, so every
//! solver reports the best iterate along the whole path.
//!
//! Step-size schedule: with `stall_patience` consecutive iterations that
//! fail to improve the best objective by more than `stall_tol`, the
//! solver declares itself trapped and doubles `μ` (at most
//! `max_doublings` times per episode); the first real improvement resets
//! `μ` to `mu0` and ends the episode.

use crate::error::{Error, Result};
use crate::lattice::Support;
use crate::matrix::Matrix;
use crate::measures::{DenseFunction, Distribution, SparseDistribution};
use crate::objectives::{Objective, VectorObjective};
use crate::projection::{
    exact_sparse_project, greedy_sparse_project, vector_sparse_project, TieBreak,
};
use crate::rng::{sample_indices, seeded, uniform_simplex};

/// Which sparse projection backs the thresholding step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProjectionMode {
    Greedy,
    Exact,
}

/// How the first iterate is produced.
#[derive(Debug, Clone)]
pub enum InitMode {
    /// A uniformly random size-`k` support carrying uniform mass.
    UniformOnRandomSupport,
    /// Run greedy support selection on the objective first.
    GreedySelection,
    /// Start from the given distribution (distribution mode only).
    GivenDistribution(Distribution),
    /// Start from the given simplex vector (vector mode only).
    GivenVector(Vec<f64>),
}

/// Run parameters shared by the distribution- and vector-mode solvers.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Initial step size `μ`.
    pub mu0: f64,
    /// Number of gradient/projection iterations.
    pub max_iters: usize,
    pub projection: ProjectionMode,
    pub tie: TieBreak,
    pub init: InitMode,
    pub seed: u64,
    /// An improvement of the best objective by more than this counts as
    /// progress.
    pub stall_tol: f64,
    /// Consecutive non-improving iterations before the step doubles.
    pub stall_patience: usize,
    /// Cap on doublings within one trapped episode.
    pub max_doublings: u32,
}

impl SolverConfig {
    pub fn new(mu0: f64, max_iters: usize) -> Self {
        Self {
            mu0,
            max_iters,
            projection: ProjectionMode::Greedy,
            tie: TieBreak::LowestIndex,
            init: InitMode::UniformOnRandomSupport,
            seed: 0,
            stall_tol: 1e-10,
            stall_patience: 3,
            max_doublings: 10,
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.mu0.is_finite() || self.mu0 <= 0.0 {
            return Err(Error::InvalidParameter("step size must be positive"));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("need at least one iteration"));
        }
        if !self.stall_tol.is_finite() || self.stall_tol <= 0.0 {
            return Err(Error::InvalidParameter("stall tolerance must be positive"));
        }
        if self.stall_patience == 0 {
            return Err(Error::InvalidParameter("stall patience must be positive"));
        }
        Ok(())
    }
}

/// One row of a solver run: `(iteration, objective, step, support,
/// projection distance²)`. Iteration 0 records the initial point.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub objective: f64,
    pub step: f64,
    pub support: Support,
    pub proj_distance_sq: f64,
}

/// The per-iteration record stream of one solver run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IterationTrace {
    records: Vec<IterationRecord>,
}

impl IterationTrace {
    pub fn records(&self) -> &[IterationRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn push(&mut self, record: IterationRecord) {
        self.records.push(record);
    }

    pub fn min_objective(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.objective)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Best-along-path outcome of a distribution-mode solve.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub best: SparseDistribution,
    pub best_objective: f64,
    pub trace: IterationTrace,
}

/// Best-along-path outcome of a vector-mode solve.
#[derive(Debug, Clone)]
pub struct VectorSolveResult {
    pub best: Vec<f64>,
    pub best_objective: f64,
    pub trace: IterationTrace,
}

/// Tracks the trapped/escaping step-size schedule.
struct StepSchedule {
    mu0: f64,
    mu: f64,
    stall_tol: f64,
    patience: usize,
    max_doublings: u32,
    streak: usize,
    doublings: u32,
}

impl StepSchedule {
    fn new(cfg: &SolverConfig) -> Self {
        Self {
            mu0: cfg.mu0,
            mu: cfg.mu0,
            stall_tol: cfg.stall_tol,
            patience: cfg.stall_patience,
            max_doublings: cfg.max_doublings,
            streak: 0,
            doublings: 0,
        }
    }

    fn current(&self) -> f64 {
        self.mu
    }

    /// Feed the improvement of the best objective this iteration.
    fn observe(&mut self, improvement: f64) {
        if improvement > self.stall_tol {
            self.mu = self.mu0;
            self.streak = 0;
            self.doublings = 0;
        } else {
            self.streak += 1;
            if self.streak >= self.patience && self.doublings < self.max_doublings {
                self.mu *= 2.0;
                self.doublings += 1;
                self.streak = 0;
            }
        }
    }
}

fn initial_distribution(
    obj: &dyn Objective,
    k: usize,
    cfg: &SolverConfig,
) -> Result<(Distribution, Support)> {
    let domain = obj.domain();
    match &cfg.init {
        InitMode::UniformOnRandomSupport => {
            let mut rng = seeded(cfg.seed);
            let support = Support::new(sample_indices(&mut rng, domain.dims(), k))?;
            Ok((Distribution::uniform_on(domain, &support)?, support))
        }
        InitMode::GreedySelection => {
            let selected = greedy_select(obj, k)?;
            let support = selected.best.support().clone();
            Ok((selected.best.into_dist(), support))
        }
        InitMode::GivenDistribution(p) => {
            if p.domain() != domain {
                return Err(Error::DomainMismatch);
            }
            let support = p.mass_support();
            if support.len() > k {
                return Err(Error::SparsityOutOfRange {
                    k: support.len(),
                    max: k,
                });
            }
            Ok((p.clone(), support))
        }
        InitMode::GivenVector(_) => Err(Error::InvalidParameter(
            "vector initialization is only valid in vector mode",
        )),
    }
}

/// Hard-thresholded projected gradient descent over `D_k`.
pub fn dist_iht(obj: &dyn Objective, k: usize, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    let domain = obj.domain();
    if k == 0 || k > domain.dims() {
        return Err(Error::SparsityOutOfRange {
            k,
            max: domain.dims(),
        });
    }

    let (mut current, mut support) = initial_distribution(obj, k, cfg)?;
    let mut trace = IterationTrace::default();
    let f0 = obj.value(current.as_function())?;
    trace.push(IterationRecord {
        iter: 0,
        objective: f0,
        step: cfg.mu0,
        support: support.clone(),
        proj_distance_sq: 0.0,
    });

    let mut best = (current.clone(), support.clone(), f0);
    let mut schedule = StepSchedule::new(cfg);
    for iter in 1..=cfg.max_iters {
        let mu = schedule.current();
        let eval_point = obj.prepare_iterate(&current, &support)?;
        let gradient = obj.derivative(eval_point.as_function())?;
        let stepped: Vec<f64> = current
            .values()
            .iter()
            .zip(gradient.values())
            .map(|(p, g)| p - mu * g)
            .collect();
        let landing = DenseFunction::new(domain, stepped)?;
        let projected = match cfg.projection {
            ProjectionMode::Greedy => greedy_sparse_project(&landing, k, &cfg.tie)?,
            ProjectionMode::Exact => exact_sparse_project(&landing, k)?,
        };
        support = projected.result.support().clone();
        current = projected.result.into_dist();
        let objective = obj.value(current.as_function())?;
        trace.push(IterationRecord {
            iter,
            objective,
            step: mu,
            support: support.clone(),
            proj_distance_sq: projected.distance_sq,
        });
        let improvement = best.2 - objective;
        if objective < best.2 {
            best = (current.clone(), support.clone(), objective);
        }
        schedule.observe(improvement);
    }

    Ok(SolveResult {
        best: SparseDistribution::new(best.0, best.1)?,
        best_objective: best.2,
        trace,
    })
}

/// Greedy support selection directly on the objective: `k` rounds, each
/// adding the dimension whose restricted minimizer attains the lowest
/// value (ties to the lowest index), then returning that minimizer.
/// Closed forms back the ℓ2 and KL objectives; anything else runs the
/// projected-gradient inner solver.
///
/// For the squared-distance objective this also subsumes the two-stage
/// heuristic of running unconstrained descent to convergence and then
/// projecting sparsely: the unconstrained optimum is the target itself,
/// so the post-hoc greedy projection is exactly this selection. No
/// separate two-stage code path exists for that reason.
pub fn greedy_select(obj: &dyn Objective, k: usize) -> Result<SolveResult> {
    let domain = obj.domain();
    if k == 0 || k > domain.dims() {
        return Err(Error::SparsityOutOfRange {
            k,
            max: domain.dims(),
        });
    }
    let mut support = Support::empty();
    let mut trace = IterationTrace::default();
    for round in 1..=k {
        let mut best: Option<(usize, f64)> = None;
        for dim in 0..domain.dims() {
            if support.contains(dim) {
                continue;
            }
            let value = obj.restricted_min_value(&support.with(dim)?)?;
            if best.is_none_or(|(_, b)| value < b) {
                best = Some((dim, value));
            }
        }
        let (winner, value) = best.expect("k <= dims leaves a candidate");
        support = support.with(winner)?;
        trace.push(IterationRecord {
            iter: round,
            objective: value,
            step: 0.0,
            support: support.clone(),
            proj_distance_sq: 0.0,
        });
    }
    let (minimizer, best_objective) = obj.restricted_min(&support)?;
    Ok(SolveResult {
        best: SparseDistribution::new(minimizer, support)?,
        best_objective,
        trace,
    })
}

fn initial_vector(obj: &dyn VectorObjective, k: usize, cfg: &SolverConfig) -> Result<Vec<f64>> {
    match &cfg.init {
        InitMode::UniformOnRandomSupport => {
            let mut rng = seeded(cfg.seed);
            let support = sample_indices(&mut rng, obj.dim(), k);
            let mut w = vec![0.0; obj.dim()];
            for &i in &support {
                w[i] = 1.0 / k as f64;
            }
            Ok(w)
        }
        InitMode::GivenVector(w) => {
            if w.len() != obj.dim() {
                return Err(Error::LengthMismatch {
                    got: w.len(),
                    expected: obj.dim(),
                });
            }
            let nonzero = w.iter().filter(|&&x| x != 0.0).count();
            if nonzero > k {
                return Err(Error::SparsityOutOfRange { k: nonzero, max: k });
            }
            Ok(w.clone())
        }
        _ => Err(Error::InvalidParameter(
            "vector mode supports uniform-on-random-support or a given vector",
        )),
    }
}

fn nonzero_support(w: &[f64]) -> Support {
    Support::new(
        w.iter()
            .enumerate()
            .filter(|&(_, &x)| x != 0.0)
            .map(|(i, _)| i)
            .collect(),
    )
    .expect("indices unique")
}

/// The same thresholded descent loop with the `k`-sparse simplex-vector
/// projection in place of the support search.
pub fn vector_iht(
    obj: &dyn VectorObjective,
    k: usize,
    cfg: &SolverConfig,
) -> Result<VectorSolveResult> {
    cfg.validate()?;
    if k == 0 || k > obj.dim() {
        return Err(Error::SparsityOutOfRange { k, max: obj.dim() });
    }

    let mut current = initial_vector(obj, k, cfg)?;
    let mut trace = IterationTrace::default();
    let f0 = obj.value(&current)?;
    trace.push(IterationRecord {
        iter: 0,
        objective: f0,
        step: cfg.mu0,
        support: nonzero_support(&current),
        proj_distance_sq: 0.0,
    });

    let mut best = (current.clone(), f0);
    let mut schedule = StepSchedule::new(cfg);
    for iter in 1..=cfg.max_iters {
        let mu = schedule.current();
        let gradient = obj.gradient(&current)?;
        let landing: Vec<f64> = current
            .iter()
            .zip(&gradient)
            .map(|(w, g)| w - mu * g)
            .collect();
        current = vector_sparse_project(&landing, k)?;
        let proj_distance_sq = current
            .iter()
            .zip(&landing)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let objective = obj.value(&current)?;
        trace.push(IterationRecord {
            iter,
            objective,
            step: mu,
            support: nonzero_support(&current),
            proj_distance_sq,
        });
        let improvement = best.1 - objective;
        if objective < best.1 {
            best = (current.clone(), objective);
        }
        schedule.observe(improvement);
    }

    Ok(VectorSolveResult {
        best: best.0,
        best_objective: best.1,
        trace,
    })
}

fn soft_threshold(x: f64, level: f64) -> f64 {
    if x > level {
        x - level
    } else if x < -level {
        x + level
    } else {
        0.0
    }
}

/// Iterations of the power method behind the Lasso step size.
pub const SPECTRAL_ESTIMATE_ITERS: usize = 50;

/// ℓ1-regularized least squares by proximal gradient (soft thresholding
/// at `γ·step`, step `1/(2·σ̂²)` from a power-method spectral estimate),
/// post-processed onto the `k`-sparse simplex.
///
/// The trace records the unconstrained training objective `‖Aw − Ap₀‖²`
/// along the proximal path; `best` is the projection of the final
/// iterate, which is the reported baseline output (not the path
/// minimum).
pub fn lasso_baseline(
    sensing: &Matrix,
    reference: &[f64],
    gamma: f64,
    k: usize,
    iters: usize,
) -> Result<VectorSolveResult> {
    if gamma < 0.0 {
        return Err(Error::InvalidParameter("gamma must be nonnegative"));
    }
    if k == 0 || k > sensing.cols() {
        return Err(Error::SparsityOutOfRange {
            k,
            max: sensing.cols(),
        });
    }
    let target = sensing.matvec(reference)?;
    let spectral_sq = sensing.spectral_norm_sq_estimate(SPECTRAL_ESTIMATE_ITERS);
    let step = 1.0 / (2.0 * spectral_sq.max(f64::MIN_POSITIVE));

    let mut w = vec![0.0; sensing.cols()];
    let mut trace = IterationTrace::default();
    for iter in 1..=iters {
        let mut residual = sensing.matvec(&w)?;
        for (r, t) in residual.iter_mut().zip(&target) {
            *r -= t;
        }
        let objective: f64 = residual.iter().map(|r| r * r).sum();
        trace.push(IterationRecord {
            iter: iter - 1,
            objective,
            step,
            support: nonzero_support(&w),
            proj_distance_sq: 0.0,
        });
        let gradient = sensing.t_matvec(&residual)?;
        for (wi, g) in w.iter_mut().zip(&gradient) {
            *wi = soft_threshold(*wi - step * 2.0 * g, gamma * step);
        }
    }

    let best = vector_sparse_project(&w, k)?;
    let projected_distance_sq = best
        .iter()
        .zip(&w)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let mut final_residual = sensing.matvec(&best)?;
    for (r, t) in final_residual.iter_mut().zip(&target) {
        *r -= t;
    }
    let best_objective: f64 = final_residual.iter().map(|r| r * r).sum();
    trace.push(IterationRecord {
        iter: iters,
        objective: best_objective,
        step,
        support: nonzero_support(&best),
        proj_distance_sq: projected_distance_sq,
    });
    Ok(VectorSolveResult {
        best,
        best_objective,
        trace,
    })
}

/// Draw `trials` random size-`k` supports with flat-Dirichlet mass on
/// each restricted domain and keep the best objective seen.
pub fn random_baseline(
    obj: &dyn Objective,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<SolveResult> {
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial"));
    }
    let domain = obj.domain();
    if k == 0 || k > domain.dims() {
        return Err(Error::SparsityOutOfRange {
            k,
            max: domain.dims(),
        });
    }
    let mut rng = seeded(seed);
    let mut trace = IterationTrace::default();
    let mut best: Option<(Distribution, Support, f64)> = None;
    for trial in 1..=trials {
        let support = Support::new(sample_indices(&mut rng, domain.dims(), k))?;
        let inside = domain.restricted_indices(&support)?;
        let weights = uniform_simplex(&mut rng, inside.len());
        let mut values = vec![0.0; domain.num_points()];
        for (&i, &w) in inside.iter().zip(&weights) {
            values[i] = w;
        }
        let candidate = Distribution::new(DenseFunction::new(domain, values)?)?;
        let objective = obj.value(candidate.as_function())?;
        trace.push(IterationRecord {
            iter: trial,
            objective,
            step: 0.0,
            support: support.clone(),
            proj_distance_sq: 0.0,
        });
        if best.as_ref().is_none_or(|(_, _, b)| objective < *b) {
            best = Some((candidate, support, objective));
        }
    }
    let (dist, support, best_objective) = best.expect("trials >= 1");
    Ok(SolveResult {
        best: SparseDistribution::new(dist, support)?,
        best_objective,
        trace,
    })
}

/// Vector-mode variant of [`random_baseline`]: random coordinate
/// subsets with flat-Dirichlet weights.
pub fn random_baseline_vector(
    obj: &dyn VectorObjective,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<VectorSolveResult> {
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial"));
    }
    if k == 0 || k > obj.dim() {
        return Err(Error::SparsityOutOfRange { k, max: obj.dim() });
    }
    let mut rng = seeded(seed);
    let mut trace = IterationTrace::default();
    let mut best: Option<(Vec<f64>, f64)> = None;
    for trial in 1..=trials {
        let support = sample_indices(&mut rng, obj.dim(), k);
        let weights = uniform_simplex(&mut rng, k);
        let mut w = vec![0.0; obj.dim()];
        for (&i, &x) in support.iter().zip(&weights) {
            w[i] = x;
        }
        let objective = obj.value(&w)?;
        trace.push(IterationRecord {
            iter: trial,
            objective,
            step: 0.0,
            support: Support::new(support)?,
            proj_distance_sq: 0.0,
        });
        if best.as_ref().is_none_or(|(_, b)| objective < *b) {
            best = Some((w, objective));
        }
    }
    let (w, best_objective) = best.expect("trials >= 1");
    Ok(VectorSolveResult {
        best: w,
        best_objective,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeDomain;
    use crate::objectives::{KlObjective, L2Objective, QuadraticSensing};

    fn domain(n: usize, m: usize) -> LatticeDomain {
        LatticeDomain::new(n, m).unwrap()
    }

    fn dist(d: LatticeDomain, values: Vec<f64>) -> Distribution {
        Distribution::new(DenseFunction::new(d, values).unwrap()).unwrap()
    }

    fn random_sparse_target(d: LatticeDomain, k: usize, seed: u64) -> Distribution {
        let mut rng = seeded(seed);
        let support = Support::new(sample_indices(&mut rng, d.dims(), k)).unwrap();
        let inside = d.restricted_indices(&support).unwrap();
        let weights = uniform_simplex(&mut rng, inside.len());
        let mut values = vec![0.0; d.num_points()];
        for (&i, &w) in inside.iter().zip(&weights) {
            values[i] = w;
        }
        dist(d, values)
    }

    #[test]
    fn one_step_convergence_on_sparse_target() {
        // With μ = 1/β = 0.5 the gradient step lands exactly on the
        // target, so a k-sparse target is recovered at iteration 1.
        let d = domain(4, 2);
        let target = random_sparse_target(d, 2, 99);
        let obj = L2Objective::new(target.clone());
        let mut cfg = SolverConfig::new(0.5, 5);
        cfg.projection = ProjectionMode::Exact;
        cfg.seed = 3;
        let result = dist_iht(&obj, 2, &cfg).unwrap();
        for record in &result.trace.records()[1..] {
            assert!(record.objective < 1e-18, "iter {} obj {}", record.iter, record.objective);
        }
        assert!(result.best_objective < 1e-18);
        assert!(result.best.dist().l2_distance_sq(&target).unwrap() < 1e-18);
    }

    #[test]
    fn best_objective_is_path_minimum() {
        let d = domain(4, 2);
        let target = random_sparse_target(d, 3, 5);
        let obj = L2Objective::new(target);
        let cfg = SolverConfig::new(0.05, 40);
        let result = dist_iht(&obj, 2, &cfg).unwrap();
        assert_eq!(result.best_objective, result.trace.min_objective());
        assert_eq!(result.trace.len(), 41);
    }

    #[test]
    fn iterates_stay_k_sparse() {
        let d = domain(5, 2);
        let target = random_sparse_target(d, 4, 8);
        let obj = L2Objective::new(target);
        let cfg = SolverConfig::new(0.1, 20);
        let result = dist_iht(&obj, 2, &cfg).unwrap();
        for record in result.trace.records() {
            assert!(record.support.len() <= 2);
        }
        assert!(result.best.dist().is_k_sparse(2));
    }

    #[test]
    fn determinism_bitwise() {
        let d = domain(5, 2);
        let target = random_sparse_target(d, 3, 21);
        let obj = KlObjective::new(
            Distribution::new(
                DenseFunction::new(
                    d,
                    target
                        .values()
                        .iter()
                        .map(|v| (v + 1e-6 / 32.0) / (1.0 + 1e-6))
                        .collect(),
                )
                .unwrap(),
            )
            .unwrap(),
        )
        .unwrap();
        let mut cfg = SolverConfig::new(0.02, 30);
        cfg.seed = 17;
        let a = dist_iht(&obj, 2, &cfg).unwrap();
        let b = dist_iht(&obj, 2, &cfg).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.best.dist().values(), b.best.dist().values());
    }

    #[test]
    fn step_doubles_when_trapped_and_caps() {
        // A constant objective can never improve, so the schedule doubles
        // every `stall_patience` iterations up to the cap.
        struct Flat {
            domain: LatticeDomain,
        }
        impl Objective for Flat {
            fn domain(&self) -> LatticeDomain {
                self.domain
            }
            fn value(&self, _p: &DenseFunction) -> crate::error::Result<f64> {
                Ok(1.0)
            }
            fn derivative(&self, p: &DenseFunction) -> crate::error::Result<DenseFunction> {
                Ok(DenseFunction::zeros(p.domain()))
            }
        }
        let d = domain(3, 2);
        let obj = Flat { domain: d };
        let mut cfg = SolverConfig::new(0.01, 16);
        cfg.stall_patience = 3;
        cfg.max_doublings = 2;
        let result = dist_iht(&obj, 1, &cfg).unwrap();
        let steps: Vec<f64> = result.trace.records()[1..].iter().map(|r| r.step).collect();
        // Iterations 1-3 at mu0, 4-6 doubled, 7+ capped at 4·mu0.
        assert_eq!(&steps[..3], &[0.01, 0.01, 0.01]);
        assert_eq!(&steps[3..6], &[0.02, 0.02, 0.02]);
        assert!(steps[6..].iter().all(|&s| s == 0.04));
    }

    #[test]
    fn step_resets_after_escape() {
        // A target whose best single-dimension support is {1}, solved from
        // an initial iterate stuck on {0}: small steps keep projecting back
        // onto {0}, the schedule doubles until the landing point's best
        // support flips, and the escape resets the step.
        let d = domain(2, 2);
        let target = dist(d, vec![0.1, 0.3, 0.6, 0.0]);
        let obj = L2Objective::new(target);
        let mut cfg = SolverConfig::new(0.05, 200);
        cfg.init = InitMode::GivenDistribution(dist(d, vec![0.5, 0.5, 0.0, 0.0]));
        let result = dist_iht(&obj, 1, &cfg).unwrap();
        let records = result.trace.records();
        assert!(records.iter().any(|r| r.step > cfg.mu0), "never doubled");
        assert_eq!(
            result.best.support().indices(),
            &[1],
            "never escaped the wrong support"
        );
        // Every iteration that improves the running best must be followed
        // by one running at the reset step; the escape itself happens at a
        // doubled step.
        let mut best = records[0].objective;
        let mut escaped_at_doubled_step = false;
        for window in records.windows(2) {
            let improved = window[0].objective < best - cfg.stall_tol;
            best = best.min(window[0].objective);
            if improved && window[0].iter > 0 {
                assert_eq!(window[1].step, cfg.mu0);
                if window[0].step > cfg.mu0 {
                    escaped_at_doubled_step = true;
                }
            }
        }
        assert!(escaped_at_doubled_step, "no doubled escape observed");
    }

    #[test]
    fn greedy_select_recovers_sparse_l2_target() {
        let d = domain(5, 2);
        let target = random_sparse_target(d, 2, 44);
        let expected = target.mass_support();
        let obj = L2Objective::new(target.clone());
        let result = greedy_select(&obj, 2).unwrap();
        assert_eq!(result.best.support(), &expected);
        assert!(result.best_objective < 1e-18);
        // Exact enumeration agrees.
        let oracle = exact_sparse_project(target.as_function(), 2).unwrap();
        assert!(oracle.distance_sq < 1e-18);
    }

    #[test]
    fn greedy_select_on_concentrated_kl_target() {
        // 99% of the target mass on a 2-dimension support: greedy picks it
        // and attains −log C.
        let d = domain(4, 2);
        let heavy = Support::new(vec![1, 3]).unwrap();
        let inside = d.restricted_indices(&heavy).unwrap();
        let mut values = vec![0.01 / 12.0; d.num_points()];
        for &i in &inside {
            values[i] = 0.99 / 4.0;
        }
        let target = dist(d, values);
        let obj = KlObjective::new(target).unwrap();
        let result = greedy_select(&obj, 2).unwrap();
        assert_eq!(result.best.support(), &heavy);
        let c = obj.target().restricted_mass(&heavy).unwrap();
        assert!((result.best_objective + c.ln()).abs() < 1e-12);
    }

    #[test]
    fn greedy_select_full_support_reaches_target() {
        let d = domain(3, 2);
        let target = random_sparse_target(d, 3, 50);
        let obj = L2Objective::new(target.clone());
        let result = greedy_select(&obj, 3).unwrap();
        assert!(result.best_objective < 1e-18);
        assert!(result.best.dist().l2_distance_sq(&target).unwrap() < 1e-18);
    }

    #[test]
    fn greedy_select_round_values_non_increasing() {
        let d = domain(5, 2);
        let target = random_sparse_target(d, 4, 61);
        let obj = L2Objective::new(target);
        let result = greedy_select(&obj, 4).unwrap();
        let objectives: Vec<f64> = result.trace.records().iter().map(|r| r.objective).collect();
        for pair in objectives.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12);
        }
        assert_eq!(result.best_objective, result.trace.min_objective());
    }

    #[test]
    fn vector_iht_identity_sensing_converges() {
        // With A = I and μ = 1/β = 0.5 the first step lands exactly on
        // p₀, so the iterate equals the sparse projection of p₀ forever.
        let p0 = vec![0.4, 0.05, 0.3, 0.05, 0.2];
        let obj = QuadraticSensing::new(Matrix::identity(5), &p0).unwrap();
        let mut cfg = SolverConfig::new(0.5, 10);
        cfg.seed = 7;
        // Disable step doubling: at the optimum nothing improves, and a
        // doubled step would deliberately kick the iterate away.
        cfg.max_doublings = 0;
        let result = vector_iht(&obj, 2, &cfg).unwrap();
        let expected = vector_sparse_project(&p0, 2).unwrap();
        for (a, b) in result.best.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        let first = result.trace.records()[1].objective;
        for record in &result.trace.records()[1..] {
            assert!((record.objective - first).abs() < 1e-12);
        }
    }

    #[test]
    fn vector_iht_fixed_point_stays() {
        let p0 = vec![0.6, 0.1, 0.3];
        let optimum = vector_sparse_project(&p0, 2).unwrap();
        let obj = QuadraticSensing::new(Matrix::identity(3), &p0).unwrap();
        let mut cfg = SolverConfig::new(0.5, 8);
        cfg.init = InitMode::GivenVector(optimum.clone());
        cfg.max_doublings = 0;
        let result = vector_iht(&obj, 2, &cfg).unwrap();
        let f0 = result.trace.records()[0].objective;
        for record in result.trace.records() {
            assert!((record.objective - f0).abs() < 1e-12);
        }
    }

    #[test]
    fn vector_iht_mmd_identity_kernel_optimum() {
        // With K = I the squared discrepancy reduces to ‖w − ν‖², so the
        // constrained optimum is the sparse projection of ν and μ = 1/β
        // lands on it in one step.
        use crate::objectives::MmdObjective;
        let nu = vec![0.1, 0.35, 0.05, 0.3, 0.2];
        let obj = MmdObjective::new(Matrix::identity(5), nu.clone()).unwrap();
        let mut cfg = SolverConfig::new(0.5, 12);
        cfg.seed = 31;
        cfg.max_doublings = 0;
        let result = vector_iht(&obj, 2, &cfg).unwrap();
        let expected = vector_sparse_project(&nu, 2).unwrap();
        for (a, b) in result.best.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn vector_iht_rejects_distribution_init() {
        let obj = QuadraticSensing::new(Matrix::identity(3), &[0.5, 0.5, 0.0]).unwrap();
        let mut cfg = SolverConfig::new(0.5, 3);
        cfg.init = InitMode::GreedySelection;
        assert!(matches!(
            vector_iht(&obj, 1, &cfg),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn lasso_identity_recovers_reference() {
        let p0 = vec![0.5, 0.2, 0.3, 0.0];
        let result = lasso_baseline(&Matrix::identity(4), &p0, 0.0, 2, 400).unwrap();
        let expected = vector_sparse_project(&p0, 2).unwrap();
        for (a, b) in result.best.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn lasso_huge_gamma_collapses_to_lowest_indices() {
        let p0 = vec![0.1, 0.2, 0.3, 0.4];
        let a = Matrix::identity(4);
        // γ beyond ‖2AᵀAp₀‖∞ kills every coordinate each iteration.
        let result = lasso_baseline(&a, &p0, 10.0, 2, 50).unwrap();
        assert_eq!(result.best, vec![0.5, 0.5, 0.0, 0.0]);
    }

    #[test]
    fn lasso_output_is_k_sparse_simplex() {
        let mut rng = seeded(13);
        let a = Matrix::standard_normal(6, 12, &mut rng);
        let p0 = uniform_simplex(&mut rng, 12);
        let result = lasso_baseline(&a, &p0, 0.01, 4, 100).unwrap();
        let nonzero = result.best.iter().filter(|&&x| x != 0.0).count();
        assert!(nonzero <= 4);
        assert!((result.best.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(result.best.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn random_baseline_properties() {
        let d = domain(4, 2);
        let target = random_sparse_target(d, 2, 71);
        let obj = L2Objective::new(target.clone());

        let single = random_baseline(&obj, 2, 1, 5).unwrap();
        assert_eq!(single.trace.len(), 1);
        assert_eq!(single.best_objective, single.trace.records()[0].objective);

        // Nested seed streams: more trials can only improve the best.
        let few = random_baseline(&obj, 2, 10, 5).unwrap();
        let many = random_baseline(&obj, 2, 30, 5).unwrap();
        assert!(many.best_objective <= few.best_objective);
        for (a, b) in few.trace.records().iter().zip(many.trace.records()) {
            assert_eq!(a.objective, b.objective);
        }

        // Never beats the enumeration oracle.
        let oracle = exact_sparse_project(target.as_function(), 2).unwrap();
        assert!(many.best_objective >= oracle.distance_sq - 1e-12);
    }

    #[test]
    fn config_validation() {
        let d = domain(3, 2);
        let target = random_sparse_target(d, 2, 81);
        let obj = L2Objective::new(target);
        assert!(matches!(
            dist_iht(&obj, 1, &SolverConfig::new(0.0, 5)),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            dist_iht(&obj, 1, &SolverConfig::new(0.1, 0)),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            dist_iht(&obj, 9, &SolverConfig::new(0.1, 5)),
            Err(Error::SparsityOutOfRange { .. })
        ));
        let mut cfg = SolverConfig::new(0.1, 5);
        cfg.init = InitMode::GivenVector(vec![1.0]);
        assert!(matches!(
            dist_iht(&obj, 1, &cfg),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn exact_mode_propagates_enumeration_guard() {
        let d = domain(20, 2);
        let mut values = vec![0.0; d.num_points()];
        values[0] = 1.0;
        let target = dist(d, values);
        let obj = L2Objective::new(target);
        let mut cfg = SolverConfig::new(0.1, 2);
        cfg.projection = ProjectionMode::Exact;
        assert!(matches!(
            dist_iht(&obj, 10, &cfg),
            Err(Error::InstanceTooLarge { .. })
        ));
    }

}
