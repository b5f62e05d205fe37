//! Finite-volume solver for collision-induced fragmentation population
//! balance equations on a truncated volume domain.
//!
//! The equation tracks a number density C(t, m) of particles by volume m.
//! Pairs of particles collide at a rate set by a collision kernel K(m, n),
//! and each collision fragments the particles according to a breakage
//! distribution B(m, n, z). The solver discretizes the truncated domain
//! ]0, R] into cells, precomputes cell-averaged kernels and per-cell birth
//! weights, and advances cell-mean concentrations with explicit Euler steps
//! guarded by a stability budget.
//!
//! Crate layout:
//! - [`mesh`]: cell partitions of the domain (uniform and geometric).
//! - [`kernels`]: collision kernels, breakage distributions, and their
//!   finite-volume discretization.
//! - [`solver`]: right-hand side assembly, Euler stepping, stability budget.
//! - [`diagnostics`]: moments, convergence reports, nested-mesh distances.

pub mod diagnostics;
pub mod error;
pub mod kernels;
pub mod mesh;
pub mod quadrature;
pub mod solver;

pub use diagnostics::{ConvergenceReport, MomentSeries};
pub use error::Error;
pub use kernels::{BreakageDistribution, CollisionKernel, DiscreteKernels};
pub use mesh::Mesh;
pub use solver::{RunStats, SolverState, StabilityBudget, StepStats};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
