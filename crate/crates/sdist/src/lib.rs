//! Optimization of convex functionals over sparse discrete
//! distributions.
//!
//! A distribution on the lattice `X = {0..m−1}ⁿ` is *k-sparse* when all
//! of its mass sits on points whose nonzero coordinates fit in some set
//! `S` of at most `k` dimensions. The feasible set `D_k`, the union of
//! the restricted-distribution sets `P_S` over all such supports, is a
//! union of simplex faces and is nonconvex, so minimizing even a convex
//! functional over it is a combinatorial problem.
//!
//! The crate provides:
//!
//! - [`lattice`]: the domain, points, supports, and the frozen
//!   little-endian point↔index bijection;
//! - [`measures`]: dense functions, distributions, and sparsity
//!   predicates;
//! - [`projection`]: sparse ℓ2 projections: simplex projection,
//!   closed-form restricted projection, greedy support search, the
//!   exhaustive oracle, and the vector-sparsity variant;
//! - [`objectives`]: ℓ2 and KL functionals with variational
//!   derivatives, sensing and kernel-MMD vector objectives, and a
//!   finite-difference derivative checker;
//! - [`solvers`]: hard-thresholded projected gradient descent in
//!   distribution and vector modes with a trapped/escaping step
//!   schedule, greedy support selection, and Lasso/random baselines;
//! - [`hardness`]: executable adversarial constructions: the
//!   subset-sum reduction, the greedy-defeating spike family, and the
//!   greedy recovery margin;
//! - [`io`]: the JSON function file format and trace CSV.

pub mod error;
pub mod hardness;
pub mod io;
pub mod lattice;
pub mod matrix;
pub mod measures;
pub mod objectives;
pub mod projection;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
pub use lattice::{LatticeDomain, Point, Support};
pub use matrix::Matrix;
pub use measures::{DenseFunction, Distribution, SparseDistribution};
pub use objectives::{
    KlObjective, L2Objective, MmdObjective, Objective, ObjectiveConstants, QuadraticSensing,
    VectorObjective,
};
pub use projection::{
    exact_sparse_project, greedy_sparse_project, simplex_project, vector_sparse_project,
    ProjectionResult, TieBreak,
};
pub use solvers::{
    dist_iht, greedy_select, lasso_baseline, random_baseline, random_baseline_vector, vector_iht,
    InitMode, IterationRecord, IterationTrace, ProjectionMode, SolveResult, SolverConfig,
    VectorSolveResult,
};
