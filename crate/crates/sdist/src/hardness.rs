//! Adversarial instance generators and decision procedures built from
//! the combinatorial structure of the sparse projection problem.
//!
//! Three constructions live here:
//!
//! - a subset-sum encoding: a 0/1 function on the binary lattice whose
//!   exact sparse projection reveals whether some size-`k` subset of a
//!   ground set sums to zero ([`ssp_instance_function`],
//!   [`subset_sum_decide`]);
//! - a spike instance that defeats greedy support search: a single
//!   off-support value `1+δ` that any scan probing only zero-valued
//!   regions cannot locate, driving the approximation ratio to `∞` as
//!   `δ → 0` ([`adversarial_instance`], [`approximation_ratio`]);
//! - the greedy recovery margin `θ`: the worst-case gap, over partial
//!   supports, between extending toward the true support and extending
//!   away from it. If `2μL < θ` the greedy projection of any
//!   `p − μ·g` with `‖g‖₂ ≤ L` recovers the true support exactly
//!   ([`greedy_recovery_margin`]).
//!
//! These are executable test oracles, not production paths, so they
//! carry small enumeration guards.

use crate::error::{Error, Result};
use crate::lattice::{LatticeDomain, Point, Support};
use crate::measures::{DenseFunction, SparseDistribution};
use crate::projection::{exact_sparse_project, restricted_distance_sq_closed_form};

/// Maximum ground-set size accepted by the subset-sum constructions.
pub const SSP_GUARD: usize = 20;

/// Maximum support size enumerated by [`greedy_recovery_margin`].
pub const MARGIN_GUARD: usize = 12;

/// A subset-sum query: does some size-`k` subset of `ground_set` sum to
/// zero?
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SspInstance {
    ground_set: Vec<i64>,
    k: usize,
}

impl SspInstance {
    pub fn new(ground_set: Vec<i64>, k: usize) -> Result<Self> {
        if ground_set.len() > SSP_GUARD {
            return Err(Error::GroundSetTooLarge {
                len: ground_set.len(),
                guard: SSP_GUARD,
            });
        }
        if k == 0 || k > ground_set.len() {
            return Err(Error::SparsityOutOfRange {
                k,
                max: ground_set.len(),
            });
        }
        Ok(Self { ground_set, k })
    }

    pub fn ground_set(&self) -> &[i64] {
        &self.ground_set
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// The projection instance encoding a subset-sum query: on the binary
/// lattice over `n = |G|` dimensions, value 1 at every point selecting a
/// zero-sum subset of cardinality exactly `k`, and 0 elsewhere.
pub fn ssp_instance_function(instance: &SspInstance) -> Result<DenseFunction> {
    let n = instance.ground_set.len();
    let domain = LatticeDomain::new(n, 2)?;
    let mut values = vec![0.0; domain.num_points()];
    for (index, value) in values.iter_mut().enumerate() {
        let mut sum: i64 = 0;
        let mut cardinality = 0usize;
        for (dim, element) in instance.ground_set.iter().enumerate() {
            if index & (1 << dim) != 0 {
                sum += element;
                cardinality += 1;
            }
        }
        if sum == 0 && cardinality == instance.k {
            *value = 1.0;
        }
    }
    DenseFunction::new(domain, values)
}

/// Decides subset sum by running the exact sparse projection for each
/// `k = 1..n`. A point mass at a cardinality-`k` point means that point
/// selects a zero-sum subset; the no-subset signature is the uniform
/// projection with `p̂(0) = 1/2^k`. Returns the first subset found.
pub fn subset_sum_decide(ground_set: &[i64]) -> Result<Option<Vec<i64>>> {
    if ground_set.len() > SSP_GUARD {
        return Err(Error::GroundSetTooLarge {
            len: ground_set.len(),
            guard: SSP_GUARD,
        });
    }
    if ground_set.is_empty() {
        return Ok(None);
    }
    for k in 1..=ground_set.len() {
        let instance = SspInstance::new(ground_set.to_vec(), k)?;
        let function = ssp_instance_function(&instance)?;
        let projection = exact_sparse_project(&function, k)?;
        let values = projection.result.dist().values();
        let Some((index, &mass)) = values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite"))
        else {
            continue;
        };
        if (mass - 1.0).abs() > 1e-9 {
            continue;
        }
        let point = function.domain().unrank(index)?;
        if point.support().len() != k {
            continue;
        }
        let subset: Vec<i64> = point
            .coords()
            .iter()
            .zip(ground_set)
            .filter(|&(&bit, _)| bit != 0)
            .map(|(_, &e)| e)
            .collect();
        debug_assert_eq!(subset.iter().sum::<i64>(), 0);
        return Ok(Some(subset));
    }
    Ok(None)
}

/// The spike construction: `q(x) = 1+δ` at `x*` and 0 elsewhere, with
/// `|supp(x*)| = k`. Its exact sparse projection is the point mass at
/// `x*` at squared distance `δ²`, but a support search that only sees
/// zeros has no way to find it.
pub fn adversarial_instance(
    n: usize,
    m: usize,
    k: usize,
    delta: f64,
    x_star: &Point,
) -> Result<DenseFunction> {
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::InvalidParameter("delta must be positive"));
    }
    let actual = x_star.support().len();
    if actual != k {
        return Err(Error::SupportSizeMismatch {
            expected: k,
            actual,
        });
    }
    let domain = LatticeDomain::new(n, m)?;
    let mut values = vec![0.0; domain.num_points()];
    values[domain.rank(x_star)?] = 1.0 + delta;
    DenseFunction::new(domain, values)
}

/// Multiplicative approximation slack of `candidate` against `oracle`:
/// `‖q − candidate‖² / ‖q − oracle‖² − 1`. Undefined when the oracle
/// fits exactly.
pub fn approximation_ratio(
    q: &DenseFunction,
    candidate: &SparseDistribution,
    oracle: &SparseDistribution,
) -> Result<f64> {
    let candidate_sq = q.l2_distance_sq(candidate.dist())?;
    let oracle_sq = q.l2_distance_sq(oracle.dist())?;
    if oracle_sq == 0.0 {
        return Err(Error::RatioUndefined);
    }
    Ok(candidate_sq / oracle_sq - 1.0)
}

/// The worst-case greedy recovery margin of an `S′`-supported
/// distribution, with the induced step-size bound.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryMargin {
    /// `θ`: the minimum, over partial supports `S ⊊ S′`, of the distance
    /// gap between adding a wrong dimension and a right one.
    pub theta: f64,
    /// `θ / (2L)`: the largest step size with a recovery guarantee.
    pub mu_max: f64,
    /// Whether `θ > 0` and `2μL < θ` for the queried `μ`.
    pub satisfied: bool,
}

/// Computes the recovery margin
///
/// ```text
/// θ = min over S ⊊ S′, i ∉ S′, j ∈ S′∖S of
///     ‖p̂_{S∪i} − p‖₂ − ‖p̂_{S∪j} − p‖₂
/// ```
///
/// by enumerating every proper subset of `S′` (guarded at
/// [`MARGIN_GUARD`] dimensions). When no dimension outside `S′` exists
/// the margin is vacuously `+∞`. `p` must place all its mass on
/// `X_{S′}`.
pub fn greedy_recovery_margin(
    p: &SparseDistribution,
    lipschitz: f64,
    mu: f64,
) -> Result<RecoveryMargin> {
    if !lipschitz.is_finite() || lipschitz <= 0.0 {
        return Err(Error::InvalidParameter("lipschitz bound must be positive"));
    }
    if mu < 0.0 {
        return Err(Error::InvalidParameter("step size must be nonnegative"));
    }
    let s_prime = p.support();
    if s_prime.len() > MARGIN_GUARD {
        return Err(Error::MarginGuardExceeded {
            len: s_prime.len(),
            guard: MARGIN_GUARD,
        });
    }
    let domain = p.dist().domain();
    let outside: Vec<usize> = (0..domain.dims())
        .filter(|&i| !s_prime.contains(i))
        .collect();

    let mut theta = f64::INFINITY;
    // Proper subsets of S′ by bitmask over its members.
    let members = s_prime.indices();
    let subsets = 1usize << members.len();
    for mask in 0..subsets - 1 {
        let partial: Vec<usize> = members
            .iter()
            .enumerate()
            .filter(|(pos, _)| mask & (1 << pos) != 0)
            .map(|(_, &dim)| dim)
            .collect();
        let partial = Support::new(partial)?;
        for &i in &outside {
            let with_wrong =
                restricted_distance_sq_closed_form(p.dist(), &partial.with(i)?)?.max(0.0);
            for &j in members {
                if partial.contains(j) {
                    continue;
                }
                let with_right =
                    restricted_distance_sq_closed_form(p.dist(), &partial.with(j)?)?.max(0.0);
                theta = theta.min(with_wrong.sqrt() - with_right.sqrt());
            }
        }
    }

    let mu_max = theta / (2.0 * lipschitz);
    Ok(RecoveryMargin {
        theta,
        mu_max,
        satisfied: theta > 0.0 && 2.0 * mu * lipschitz < theta,
    })
}
