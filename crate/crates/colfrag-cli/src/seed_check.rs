//! Pre-flight cross-check of the production solver against the brute-force
//! reference, on a small instance built from the run's own kernel and
//! breakage configuration.

use anyhow::ensure;
use colfrag_core::kernels::discretize;
use colfrag_core::solver::{rhs, SolverState};
use colfrag_oracle::brute_force_rhs;

use crate::config::{build_breakage, build_kernel, build_mesh, ConfigFile, KERNEL_QUADRATURE_ORDER};

const CHECK_CELLS: usize = 8;

/// Evaluates the right-hand side on an 8-cell instance twice, through the
/// solver's precomputed tables and through the brute-force reference, and
/// demands agreement to round-off. Catches table-assembly bugs before a
/// long run burns time on them.
pub fn verify(file: &ConfigFile) -> anyhow::Result<()> {
    let mesh = build_mesh(file, CHECK_CELLS)?;
    let kernel = build_kernel(file)?;
    let dist = build_breakage(file)?;

    let concentrations: Vec<f64> = (0..CHECK_CELLS).map(|a| 0.2 + 0.15 * a as f64).collect();
    let state = SolverState::from_concentrations(concentrations, 0.0);

    let disc = discretize(&kernel, &dist, &mesh, KERNEL_QUADRATURE_ORDER)?;
    let fast = rhs(&state, &disc, &mesh)?;
    let slow = brute_force_rhs(&state, &kernel, &dist, &mesh, KERNEL_QUADRATURE_ORDER)?;

    let scale = fast.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    for (cell, (x, y)) in fast.iter().zip(&slow).enumerate() {
        ensure!(
            (x - y).abs() <= 1e-12 * scale,
            "solver deviates from the brute-force reference in cell {cell}: {x} vs {y}"
        );
    }
    Ok(())
}
