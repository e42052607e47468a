//! Dense functions and probability distributions on a [`LatticeDomain`].
//!
//! A [`DenseFunction`] is any finite real-valued function on the lattice,
//! stored as one value per point in canonical index order. A
//! [`Distribution`] additionally is nonnegative and sums to one, and a
//! [`SparseDistribution`] places all of its mass on a restricted
//! sublattice `X_S`.

use crate::error::{Error, Result};
use crate::lattice::{LatticeDomain, Point, Support};

/// Values in `[-NEGATIVE_CLAMP_TOL, 0)` are clamped to zero when a
/// distribution is validated; anything more negative is rejected.
/// Projections introduce rounding at this scale.
pub const NEGATIVE_CLAMP_TOL: f64 = 1e-12;

/// Tolerance on `Σ p(x) = 1` for distribution validation.
pub const MASS_TOL: f64 = 1e-9;

/// A finite real-valued function on a lattice domain.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseFunction {
    domain: LatticeDomain,
    values: Vec<f64>,
}

impl DenseFunction {
    pub fn new(domain: LatticeDomain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.num_points() {
            return Err(Error::LengthMismatch {
                got: values.len(),
                expected: domain.num_points(),
            });
        }
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index, value });
            }
        }
        Ok(Self { domain, values })
    }

    pub fn zeros(domain: LatticeDomain) -> Self {
        Self {
            domain,
            values: vec![0.0; domain.num_points()],
        }
    }

    pub fn domain(&self) -> LatticeDomain {
        self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn value_at(&self, point: &Point) -> Result<f64> {
        Ok(self.values[self.domain.rank(point)?])
    }

    fn check_same_domain(&self, other: &DenseFunction) -> Result<()> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch);
        }
        Ok(())
    }

    /// `⟨f, g⟩ = Σ_x f(x) g(x)`.
    pub fn inner_product(&self, other: &DenseFunction) -> Result<f64> {
        self.check_same_domain(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum())
    }

    /// `Σ_x f(x)²`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// `‖f − g‖² = Σ_x (f(x) − g(x))²`.
    pub fn l2_distance_sq(&self, other: &DenseFunction) -> Result<f64> {
        self.check_same_domain(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum())
    }

    pub fn total_mass(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Sum of `f` over the restricted sublattice `X_S`.
    pub fn restricted_mass(&self, support: &Support) -> Result<f64> {
        Ok(self
            .domain
            .restricted_indices(support)?
            .into_iter()
            .map(|i| self.values[i])
            .sum())
    }
}

/// A nonnegative function summing to one.
///
/// Derefs to [`DenseFunction`], so all inner products and norms apply.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    inner: DenseFunction,
}

impl Distribution {
    /// Validates nonnegativity (clamping rounding noise in
    /// `[-1e-12, 0)` to zero) and unit mass within [`MASS_TOL`].
    pub fn new(function: DenseFunction) -> Result<Self> {
        let mut function = function;
        for (index, value) in function.values.iter_mut().enumerate() {
            if *value < 0.0 {
                if *value >= -NEGATIVE_CLAMP_TOL {
                    *value = 0.0;
                } else {
                    return Err(Error::NegativeMass {
                        index,
                        value: *value,
                    });
                }
            }
        }
        let sum = function.total_mass();
        if (sum - 1.0).abs() > MASS_TOL {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self { inner: function })
    }

    pub fn point_mass(domain: LatticeDomain, at: &Point) -> Result<Self> {
        let mut values = vec![0.0; domain.num_points()];
        values[domain.rank(at)?] = 1.0;
        Ok(Self {
            inner: DenseFunction::new(domain, values)?,
        })
    }

    pub fn uniform(domain: LatticeDomain) -> Self {
        let w = 1.0 / domain.num_points() as f64;
        Self {
            inner: DenseFunction {
                domain,
                values: vec![w; domain.num_points()],
            },
        }
    }

    /// Uniform mass over the restricted sublattice `X_S`.
    pub fn uniform_on(domain: LatticeDomain, support: &Support) -> Result<Self> {
        let indices = domain.restricted_indices(support)?;
        let w = 1.0 / indices.len() as f64;
        let mut values = vec![0.0; domain.num_points()];
        for i in indices {
            values[i] = w;
        }
        Ok(Self {
            inner: DenseFunction { domain, values },
        })
    }

    pub fn as_function(&self) -> &DenseFunction {
        &self.inner
    }

    pub fn into_function(self) -> DenseFunction {
        self.inner
    }

    /// Union of the point supports of all positive-mass points.
    pub fn mass_support(&self) -> Support {
        let domain = self.inner.domain;
        let m = domain.states();
        let mut active = vec![false; domain.dims()];
        for (index, &value) in self.inner.values.iter().enumerate() {
            if value > 0.0 {
                let mut rest = index;
                for dim in active.iter_mut() {
                    if rest == 0 {
                        break;
                    }
                    if rest % m != 0 {
                        *dim = true;
                    }
                    rest /= m;
                }
            }
        }
        Support::new(
            active
                .iter()
                .enumerate()
                .filter(|&(_, &a)| a)
                .map(|(i, _)| i)
                .collect(),
        )
        .expect("indices are unique by construction")
    }

    /// Whether the mass support fits in a set of at most `k` dimensions.
    pub fn is_k_sparse(&self, k: usize) -> bool {
        self.mass_support().len() <= k
    }
}

impl std::ops::Deref for Distribution {
    type Target = DenseFunction;

    fn deref(&self) -> &DenseFunction {
        &self.inner
    }
}

/// A distribution paired with a support that certifiably carries all of
/// its mass.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseDistribution {
    dist: Distribution,
    support: Support,
}

impl SparseDistribution {
    /// Checks that every point outside `X_support` has exactly zero mass.
    pub fn new(dist: Distribution, support: Support) -> Result<Self> {
        let domain = dist.domain();
        let inside = domain.restricted_indices(&support)?;
        let mut in_restricted = vec![false; domain.num_points()];
        for i in inside {
            in_restricted[i] = true;
        }
        let outside_mass: f64 = dist
            .values()
            .iter()
            .enumerate()
            .filter(|(i, _)| !in_restricted[*i])
            .map(|(_, &v)| v)
            .sum();
        if outside_mass != 0.0 {
            return Err(Error::MassOutsideSupport { mass: outside_mass });
        }
        Ok(Self { dist, support })
    }

    pub fn dist(&self) -> &Distribution {
        &self.dist
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn into_dist(self) -> Distribution {
        self.dist
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn domain22() -> LatticeDomain {
        LatticeDomain::new(2, 2).unwrap()
    }

    fn dist(domain: LatticeDomain, values: Vec<f64>) -> Distribution {
        Distribution::new(DenseFunction::new(domain, values).unwrap()).unwrap()
    }

    #[test]
    fn inner_product_examples() {
        let d = domain22();
        let origin = Distribution::point_mass(d, &Point::new(vec![0, 0])).unwrap();
        assert_eq!(origin.inner_product(&origin).unwrap(), 1.0);

        let uniform = Distribution::uniform(d);
        assert_eq!(uniform.inner_product(&origin).unwrap(), 0.25);

        let zero = DenseFunction::zeros(d);
        assert_eq!(uniform.inner_product(&zero).unwrap(), 0.0);
    }

    #[test]
    fn inner_product_rejects_domain_mismatch() {
        let f = DenseFunction::zeros(domain22());
        let g = DenseFunction::zeros(LatticeDomain::new(3, 2).unwrap());
        assert!(matches!(f.inner_product(&g), Err(Error::DomainMismatch)));
    }

    #[test]
    fn l2_distance_examples() {
        let d = domain22();
        let a = Distribution::point_mass(d, &Point::new(vec![0, 0])).unwrap();
        let b = Distribution::point_mass(d, &Point::new(vec![1, 1])).unwrap();
        assert_eq!(a.l2_distance_sq(&a).unwrap(), 0.0);
        assert_eq!(a.l2_distance_sq(&b).unwrap(), 2.0);
    }

    #[test]
    fn restricted_mass_examples() {
        let d = domain22();
        // p at ((0,0),(1,0),(0,1),(1,1)) in index order.
        let p = dist(d, vec![0.4, 0.2, 0.3, 0.1]);
        let s0 = Support::new(vec![0]).unwrap();
        assert!((p.restricted_mass(&s0).unwrap() - 0.6).abs() < 1e-15);
        assert!((p.restricted_mass(&Support::full(2)).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(p.restricted_mass(&Support::empty()).unwrap(), 0.4);
    }

    #[test]
    fn k_sparse_examples() {
        let d = domain22();
        let origin = Distribution::point_mass(d, &Point::new(vec![0, 0])).unwrap();
        assert!(origin.is_k_sparse(0));

        let uniform = Distribution::uniform(d);
        assert!(!uniform.is_k_sparse(1));
        assert!(uniform.is_k_sparse(2));

        // Mass on {(1,0),(0,0)} only: support union is {0}.
        let p = dist(d, vec![0.5, 0.5, 0.0, 0.0]);
        assert!(p.is_k_sparse(1));
        assert_eq!(p.mass_support(), Support::new(vec![0]).unwrap());
    }

    #[test]
    fn distribution_validation() {
        let d = domain22();
        // Tiny negative noise is clamped.
        let p = dist(d, vec![0.5, 0.5, -1e-13, 1e-13]);
        assert_eq!(p.values()[2], 0.0);

        // A real negative value is rejected.
        assert!(matches!(
            Distribution::new(DenseFunction::new(d, vec![0.5, 0.6, -0.1, 0.0]).unwrap()),
            Err(Error::NegativeMass { .. })
        ));

        // Mass must be 1 within 1e-9.
        assert!(matches!(
            Distribution::new(DenseFunction::new(d, vec![0.5, 0.6, 0.0, 0.0]).unwrap()),
            Err(Error::NotNormalized { .. })
        ));

        assert!(matches!(
            DenseFunction::new(d, vec![0.5, f64::NAN, 0.0, 0.0]),
            Err(Error::NonFinite { index: 1, .. })
        ));
    }

    #[test]
    fn sparse_distribution_rejects_outside_mass() {
        let d = domain22();
        let p = dist(d, vec![0.4, 0.2, 0.3, 0.1]);
        assert!(matches!(
            SparseDistribution::new(p, Support::new(vec![0]).unwrap()),
            Err(Error::MassOutsideSupport { .. })
        ));

        let q = dist(d, vec![0.6, 0.4, 0.0, 0.0]);
        let s = SparseDistribution::new(q, Support::new(vec![0]).unwrap()).unwrap();
        assert_eq!(s.support().indices(), &[0]);
    }

    fn function_strategy(len: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-2.0f64..2.0, len)
    }

    fn simplex_strategy(len: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..1.0, len).prop_map(|mut v| {
            let s: f64 = v.iter().sum();
            if s == 0.0 {
                v[0] = 1.0;
            } else {
                for x in v.iter_mut() {
                    *x /= s;
                }
            }
            v
        })
    }

    proptest! {
        #[test]
        fn cauchy_schwarz(fv in function_strategy(8), gv in function_strategy(8)) {
            let d = LatticeDomain::new(3, 2).unwrap();
            let f = DenseFunction::new(d, fv).unwrap();
            let g = DenseFunction::new(d, gv).unwrap();
            let ip = f.inner_product(&g).unwrap();
            prop_assert!(ip * ip <= f.l2_norm_sq() * g.l2_norm_sq() + 1e-12);
        }

        #[test]
        fn restricted_mass_monotone(pv in simplex_strategy(8), mask in 0u32..8, extra in 0usize..3) {
            let d = LatticeDomain::new(3, 2).unwrap();
            let p = dist(d, pv);
            let small: Vec<usize> = (0..3).filter(|i| mask & (1 << i) != 0).collect();
            let mut big = small.clone();
            if !big.contains(&extra) {
                big.push(extra);
            }
            let s1 = Support::new(small).unwrap();
            let s2 = Support::new(big).unwrap();
            prop_assert!(
                p.restricted_mass(&s1).unwrap() <= p.restricted_mass(&s2).unwrap() + 1e-12
            );
        }

        #[test]
        fn k_sparse_monotone(pv in simplex_strategy(8), k in 0usize..3) {
            let d = LatticeDomain::new(3, 2).unwrap();
            let p = dist(d, pv);
            if p.is_k_sparse(k) {
                prop_assert!(p.is_k_sparse(k + 1));
            }
        }
    }
}
