//! Convex functionals over distributions and their variational
//! derivatives, plus the vectorized objectives used in the compressed
//! sensing and prototype selection pipelines.
//!
//! A functional `F : P → ℝ` is differentiated through its variational
//! derivative `δF/δp : X → ℝ`, the function whose pairing with a
//! perturbation `φ` gives the directional derivative of `F`. On a finite
//! lattice this is exactly the gradient of the vectorized objective
//! under the canonical point↔index bijection, which is what
//! [`check_derivative`] verifies by central finite differences.
//!
//! Both value and derivative are evaluated on the ambient function
//! space, not just on the simplex, since the finite-difference probes
//! step off the simplex.

use crate::error::{Error, Result};
use crate::lattice::{LatticeDomain, Support};
use crate::matrix::Matrix;
use crate::measures::{DenseFunction, Distribution};
use crate::projection::{project_restricted_general, simplex_project};

/// Optional convexity metadata: strong convexity `α`, smoothness `β`,
/// and a bound `L` on `‖δF/δp‖₂` over the sparse feasible set. These
/// feed diagnostics and step-size bounds only; no solver requires them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveConstants {
    pub alpha: f64,
    pub beta: f64,
    pub lipschitz: f64,
}

impl ObjectiveConstants {
    pub fn new(alpha: f64, beta: f64, lipschitz: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta >= alpha && lipschitz >= 0.0) {
            return Err(Error::InvalidParameter(
                "objective constants need 0 < alpha <= beta and L >= 0",
            ));
        }
        Ok(Self {
            alpha,
            beta,
            lipschitz,
        })
    }
}

/// A functional over distributions on a fixed lattice domain.
pub trait Objective {
    fn domain(&self) -> LatticeDomain;

    /// `F[p]`, evaluated on the ambient function space.
    fn value(&self, p: &DenseFunction) -> Result<f64>;

    /// The variational derivative `δF/δp` as a dense function.
    fn derivative(&self, p: &DenseFunction) -> Result<DenseFunction>;

    fn constants(&self) -> Option<ObjectiveConstants> {
        None
    }

    /// Exact or numerical minimizer of `F` over `P_S` with its value.
    /// The default runs the generic projected-gradient inner solver;
    /// objectives with closed forms override it.
    fn restricted_min(&self, support: &Support) -> Result<(Distribution, f64)> {
        restricted_min_numeric(
            self.domain(),
            &|p| self.value(p),
            &|p| self.derivative(p),
            support,
            INNER_SOLVER_ITERS,
            INNER_SOLVER_TOL,
        )
    }

    /// Just the minimum value over `P_S`; cheaper overrides exist for
    /// the closed-form objectives.
    fn restricted_min_value(&self, support: &Support) -> Result<f64> {
        Ok(self.restricted_min(support)?.1)
    }

    /// Hook applied to the iterate before each derivative evaluation
    /// inside iterative solvers. The default is the identity; the KL
    /// objective mixes in a whiff of uniform mass on the current
    /// restricted domain so the derivative stays finite on-support.
    fn prepare_iterate(&self, p: &Distribution, _support: &Support) -> Result<Distribution> {
        Ok(p.clone())
    }
}

/// Iteration budget of the generic restricted inner solver.
pub const INNER_SOLVER_ITERS: usize = 500;

/// Convergence tolerance of the generic restricted inner solver.
pub const INNER_SOLVER_TOL: f64 = 1e-10;

/// Generic restricted minimizer: projected gradient over the simplex on
/// the `X_S` coordinates with Armijo backtracking. Serves as the
/// fallback behind [`Objective::restricted_min`] and as an independent
/// numerical oracle for the closed forms.
pub fn restricted_min_numeric(
    domain: LatticeDomain,
    value: &dyn Fn(&DenseFunction) -> Result<f64>,
    derivative: &dyn Fn(&DenseFunction) -> Result<DenseFunction>,
    support: &Support,
    max_iters: usize,
    tol: f64,
) -> Result<(Distribution, f64)> {
    let inside = domain.restricted_indices(support)?;
    let embed = |w: &[f64]| -> Result<DenseFunction> {
        let mut values = vec![0.0; domain.num_points()];
        for (&i, &x) in inside.iter().zip(w) {
            values[i] = x;
        }
        DenseFunction::new(domain, values)
    };

    let mut w = vec![1.0 / inside.len() as f64; inside.len()];
    let mut f = value(&embed(&w)?)?;
    let mut step = 1.0;
    for _ in 0..max_iters {
        let grad_full = derivative(&embed(&w)?)?;
        let grad: Vec<f64> = inside.iter().map(|&i| grad_full.values()[i]).collect();
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = w
                .iter()
                .zip(&grad)
                .map(|(x, g)| x - step * g)
                .collect();
            let projected = simplex_project(&trial)?;
            let move_sq: f64 = projected
                .iter()
                .zip(&w)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let f_trial = value(&embed(&projected)?)?;
            if f_trial <= f - 1e-4 * move_sq / step {
                let converged = f - f_trial <= tol * (1.0 + f.abs()) && move_sq.sqrt() <= tol;
                w = projected;
                f = f_trial;
                step = (step * 2.0).min(1e6);
                accepted = true;
                if converged {
                    let dist = Distribution::new(embed(&w)?)?;
                    return Ok((dist, f));
                }
                break;
            }
            step *= 0.5;
            if step < 1e-18 {
                break;
            }
        }
        if !accepted {
            break;
        }
    }
    let dist = Distribution::new(embed(&w)?)?;
    Ok((dist, f))
}

/// `F[p] = ‖p − target‖²` with derivative `2(p − target)`.
///
/// Strongly convex and smooth with `α = β = 2`; the derivative norm over
/// pairs of distributions is at most `2√2`.
#[derive(Debug, Clone)]
pub struct L2Objective {
    target: Distribution,
    target_norm_sq: f64,
}

impl L2Objective {
    pub fn new(target: Distribution) -> Self {
        let target_norm_sq = target.l2_norm_sq();
        Self {
            target,
            target_norm_sq,
        }
    }

    pub fn target(&self) -> &Distribution {
        &self.target
    }
}

impl Objective for L2Objective {
    fn domain(&self) -> LatticeDomain {
        self.target.domain()
    }

    fn value(&self, p: &DenseFunction) -> Result<f64> {
        p.l2_distance_sq(self.target.as_function())
    }

    fn derivative(&self, p: &DenseFunction) -> Result<DenseFunction> {
        if p.domain() != self.domain() {
            return Err(Error::DomainMismatch);
        }
        let values = p
            .values()
            .iter()
            .zip(self.target.values())
            .map(|(a, b)| 2.0 * (a - b))
            .collect();
        DenseFunction::new(self.domain(), values)
    }

    fn constants(&self) -> Option<ObjectiveConstants> {
        Some(ObjectiveConstants {
            alpha: 2.0,
            beta: 2.0,
            lipschitz: 2.0 * std::f64::consts::SQRT_2,
        })
    }

    fn restricted_min(&self, support: &Support) -> Result<(Distribution, f64)> {
        let minimizer = project_restricted_general(self.target.as_function(), support)?;
        // The closed form, so the value agrees bit for bit with
        // `restricted_min_value` scans.
        let value = self.restricted_min_value(support)?;
        Ok((minimizer, value))
    }

    fn restricted_min_value(&self, support: &Support) -> Result<f64> {
        // (1−C)²/|X_S| − Σ_{X_S} t² + Σ_X t², using the cached total.
        let inside = self.domain().restricted_indices(support)?;
        let mut mass = 0.0;
        let mut inside_sq = 0.0;
        for &i in &inside {
            let v = self.target.values()[i];
            mass += v;
            inside_sq += v * v;
        }
        Ok((1.0 - mass) * (1.0 - mass) / inside.len() as f64 - inside_sq + self.target_norm_sq)
    }
}

/// Mass mixed into the current restricted domain before each KL
/// derivative evaluation, keeping iterates strictly positive on-support.
pub const KL_SUPPORT_MIX: f64 = 1e-12;

/// Floor substituted for exactly-zero mass when the KL derivative is
/// evaluated off-support, so `log(p/q) + 1` stays finite while the
/// `−log q(x)` ordering between points is preserved.
const KL_DERIVATIVE_FLOOR: f64 = 1e-12;

/// `F[p] = KL(p ‖ target) = Σ p(x) log(p(x)/target(x))` with the
/// convention `0·log 0 = 0`; derivative `log(p(x)/target(x)) + 1`.
///
/// The target must be strictly positive everywhere, otherwise the
/// divergence is undefined.
#[derive(Debug, Clone)]
pub struct KlObjective {
    target: Distribution,
}

impl KlObjective {
    pub fn new(target: Distribution) -> Result<Self> {
        for (index, &value) in target.values().iter().enumerate() {
            if value <= 0.0 {
                return Err(Error::KlZeroTarget { index });
            }
        }
        Ok(Self { target })
    }

    pub fn target(&self) -> &Distribution {
        &self.target
    }
}

impl Objective for KlObjective {
    fn domain(&self) -> LatticeDomain {
        self.target.domain()
    }

    fn value(&self, p: &DenseFunction) -> Result<f64> {
        if p.domain() != self.domain() {
            return Err(Error::DomainMismatch);
        }
        let mut total = 0.0;
        for (index, (&pi, &qi)) in p.values().iter().zip(self.target.values()).enumerate() {
            if pi == 0.0 {
                continue;
            }
            if pi < 0.0 {
                return Err(Error::NegativeMass { index, value: pi });
            }
            total += pi * (pi / qi).ln();
        }
        Ok(total)
    }

    fn derivative(&self, p: &DenseFunction) -> Result<DenseFunction> {
        if p.domain() != self.domain() {
            return Err(Error::DomainMismatch);
        }
        let mut values = Vec::with_capacity(p.values().len());
        for (index, (&pi, &qi)) in p.values().iter().zip(self.target.values()).enumerate() {
            if pi < 0.0 {
                return Err(Error::NegativeMass { index, value: pi });
            }
            let effective = if pi == 0.0 { KL_DERIVATIVE_FLOOR } else { pi };
            values.push((effective / qi).ln() + 1.0);
        }
        DenseFunction::new(self.domain(), values)
    }

    fn restricted_min(&self, support: &Support) -> Result<(Distribution, f64)> {
        restricted_min_kl(&self.target, support)
    }

    fn restricted_min_value(&self, support: &Support) -> Result<f64> {
        let mass = self.target.restricted_mass(support)?;
        if mass <= 0.0 {
            return Err(Error::ZeroRestrictedMass);
        }
        Ok(-mass.ln())
    }

    fn prepare_iterate(&self, p: &Distribution, support: &Support) -> Result<Distribution> {
        let domain = p.domain();
        let inside = domain.restricted_indices(support)?;
        let mut values = p.values().to_vec();
        let fill = KL_SUPPORT_MIX / inside.len() as f64;
        for &i in &inside {
            values[i] += fill;
        }
        let scale = 1.0 / (1.0 + KL_SUPPORT_MIX);
        for v in values.iter_mut() {
            *v *= scale;
        }
        Distribution::new(DenseFunction::new(domain, values)?)
    }
}

/// Minimizer of `KL(p ‖ target)` over `P_S`: the target renormalized on
/// `X_S`, with minimum value `−log C` where `C` is the restricted mass.
pub fn restricted_min_kl(target: &Distribution, support: &Support) -> Result<(Distribution, f64)> {
    let domain = target.domain();
    let inside = domain.restricted_indices(support)?;
    let mass: f64 = inside.iter().map(|&i| target.values()[i]).sum();
    if mass <= 0.0 {
        return Err(Error::ZeroRestrictedMass);
    }
    let mut values = vec![0.0; domain.num_points()];
    for &i in &inside {
        values[i] = target.values()[i] / mass;
    }
    let dist = Distribution::new(DenseFunction::new(domain, values)?)?;
    Ok((dist, -mass.ln()))
}

/// Maximum absolute discrepancy between the analytic derivative and the
/// central finite difference `(F(p + h·e_x) − F(p − h·e_x)) / 2h` over
/// all lattice points. Probes ignore simplex feasibility.
pub fn check_derivative(obj: &dyn Objective, p: &DenseFunction, h: f64) -> Result<f64> {
    if h <= 0.0 {
        return Err(Error::InvalidParameter("finite-difference step must be positive"));
    }
    let analytic = obj.derivative(p)?;
    let mut worst: f64 = 0.0;
    let mut probe = p.values().to_vec();
    for i in 0..probe.len() {
        let original = probe[i];
        probe[i] = original + h;
        let plus = obj.value(&DenseFunction::new(p.domain(), probe.clone())?)?;
        probe[i] = original - h;
        let minus = obj.value(&DenseFunction::new(p.domain(), probe.clone())?)?;
        probe[i] = original;
        let fd = (plus - minus) / (2.0 * h);
        worst = worst.max((analytic.values()[i] - fd).abs());
    }
    Ok(worst)
}

/// An objective over plain real vectors (the vector-sparsity mode).
pub trait VectorObjective {
    fn dim(&self) -> usize;

    fn value(&self, w: &[f64]) -> Result<f64>;

    fn gradient(&self, w: &[f64]) -> Result<Vec<f64>>;

    fn constants(&self) -> Option<ObjectiveConstants> {
        None
    }
}

/// `F(w) = ‖A w − A p₀‖²` with gradient `2 Aᵀ(A w − A p₀)`: moment
/// preservation under a sensing map.
#[derive(Debug, Clone)]
pub struct QuadraticSensing {
    sensing: Matrix,
    target_measurement: Vec<f64>,
}

impl QuadraticSensing {
    pub fn new(sensing: Matrix, reference: &[f64]) -> Result<Self> {
        let target_measurement = sensing.matvec(reference)?;
        Ok(Self {
            sensing,
            target_measurement,
        })
    }

    pub fn sensing(&self) -> &Matrix {
        &self.sensing
    }
}

impl VectorObjective for QuadraticSensing {
    fn dim(&self) -> usize {
        self.sensing.cols()
    }

    fn value(&self, w: &[f64]) -> Result<f64> {
        let aw = self.sensing.matvec(w)?;
        Ok(aw
            .iter()
            .zip(&self.target_measurement)
            .map(|(a, b)| (a - b) * (a - b))
            .sum())
    }

    fn gradient(&self, w: &[f64]) -> Result<Vec<f64>> {
        let mut residual = self.sensing.matvec(w)?;
        for (r, t) in residual.iter_mut().zip(&self.target_measurement) {
            *r -= t;
        }
        let mut grad = self.sensing.t_matvec(&residual)?;
        for g in grad.iter_mut() {
            *g *= 2.0;
        }
        Ok(grad)
    }
}

/// Squared maximum mean discrepancy between weight vectors under a
/// kernel matrix: `F(w) = wᵀKw − 2wᵀKν + νᵀKν`, gradient `2K(w − ν)`.
/// Nonnegative whenever `K` is positive semidefinite.
#[derive(Debug, Clone)]
pub struct MmdObjective {
    kernel: Matrix,
    reference: Vec<f64>,
    kernel_reference: Vec<f64>,
    reference_term: f64,
}

impl MmdObjective {
    pub fn new(kernel: Matrix, reference: Vec<f64>) -> Result<Self> {
        if kernel.rows() != kernel.cols() {
            return Err(Error::LengthMismatch {
                got: kernel.cols(),
                expected: kernel.rows(),
            });
        }
        if !kernel.is_symmetric(1e-9) {
            return Err(Error::InvalidParameter("kernel matrix must be symmetric"));
        }
        if reference.len() != kernel.rows() {
            return Err(Error::LengthMismatch {
                got: reference.len(),
                expected: kernel.rows(),
            });
        }
        let kernel_reference = kernel.matvec(&reference)?;
        let reference_term = reference
            .iter()
            .zip(&kernel_reference)
            .map(|(a, b)| a * b)
            .sum();
        Ok(Self {
            kernel,
            reference,
            kernel_reference,
            reference_term,
        })
    }
}

impl VectorObjective for MmdObjective {
    fn dim(&self) -> usize {
        self.kernel.rows()
    }

    fn value(&self, w: &[f64]) -> Result<f64> {
        let kw = self.kernel.matvec(w)?;
        let wkw: f64 = w.iter().zip(&kw).map(|(a, b)| a * b).sum();
        let wkv: f64 = w
            .iter()
            .zip(&self.kernel_reference)
            .map(|(a, b)| a * b)
            .sum();
        Ok(wkw - 2.0 * wkv + self.reference_term)
    }

    fn gradient(&self, w: &[f64]) -> Result<Vec<f64>> {
        let mut diff: Vec<f64> = w.iter().zip(&self.reference).map(|(a, b)| a - b).collect();
        diff = self.kernel.matvec(&diff)?;
        for g in diff.iter_mut() {
            *g *= 2.0;
        }
        Ok(diff)
    }
}

/// Vector analogue of [`check_derivative`].
pub fn check_gradient(obj: &dyn VectorObjective, w: &[f64], h: f64) -> Result<f64> {
    if h <= 0.0 {
        return Err(Error::InvalidParameter("finite-difference step must be positive"));
    }
    let analytic = obj.gradient(w)?;
    let mut probe = w.to_vec();
    let mut worst: f64 = 0.0;
    for i in 0..probe.len() {
        let original = probe[i];
        probe[i] = original + h;
        let plus = obj.value(&probe)?;
        probe[i] = original - h;
        let minus = obj.value(&probe)?;
        probe[i] = original;
        let fd = (plus - minus) / (2.0 * h);
        worst = worst.max((analytic[i] - fd).abs());
    }
    Ok(worst)
}
