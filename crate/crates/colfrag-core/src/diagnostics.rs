//! Moments, convergence orders, and mesh-refinement comparisons.
//!
//! The solver's accuracy is judged through low-order moments of the
//! concentration (total number, total mass) and through how fast those
//! quantities settle as the mesh is refined. On a sequence of meshes whose
//! cell counts double, the difference between consecutive totals acts as the
//! error proxy, and the experimental order of convergence is the log₂ ratio
//! of consecutive proxies.

use crate::error::Error;
use crate::mesh::Mesh;
use crate::solver::SolverState;
use crate::Result;

/// Relative tolerance for checking that a fine mesh's even edges coincide
/// with the coarse mesh's edges.
const NESTING_TOL: f64 = 1e-12;

/// j-th moment M_j = Σ_a m_a^j C_a Δ_a by the midpoint rule.
///
/// Order 0 is the total number of particles, order 1 the total mass.
pub fn moment(state: &SolverState, mesh: &Mesh, order: u32) -> f64 {
    assert_eq!(
        state.concentrations.len(),
        mesh.cells(),
        "state and mesh disagree on cell count"
    );
    let mid = mesh.midpoints();
    let w = mesh.widths();
    let mut acc = 0.0;
    for a in 0..mesh.cells() {
        acc += mid[a].powi(order as i32) * state.concentrations[a] * w[a];
    }
    acc
}

/// Convergence orders from a sequence of error values, one per refinement
/// level: eoc_k = log₂(e_k / e_{k+1}). Needs at least two entries; a zero
/// entry admits no order.
pub fn eoc_from_errors(errors: &[f64]) -> Result<Vec<f64>> {
    if errors.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "convergence orders need at least two errors, got {}",
            errors.len()
        )));
    }
    for (index, &e) in errors.iter().enumerate() {
        if e == 0.0 || !e.is_finite() {
            return Err(Error::DegenerateConvergence { index });
        }
    }
    Ok(errors
        .windows(2)
        .map(|pair| (pair[0] / pair[1]).abs().log2())
        .collect())
}

/// Convergence orders from totals on doubling meshes: the error proxy at
/// level k is |N_{k+1} − N_k|, so at least three totals are needed. A
/// repeated total makes the proxy vanish and the order undefined.
pub fn eoc_from_totals(totals: &[f64]) -> Result<Vec<f64>> {
    if totals.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "convergence orders need at least three totals, got {}",
            totals.len()
        )));
    }
    let proxies: Vec<f64> = totals.windows(2).map(|p| (p[1] - p[0]).abs()).collect();
    eoc_from_errors(&proxies)
}

/// L¹ distance between a coarse solution and a solution on the once-refined
/// mesh, with the coarse solution projected piecewise-constant onto the fine
/// cells: Σ_b |C_fine[b] − C_coarse[b div 2]| Δ_fine[b].
///
/// The fine mesh must have exactly twice the cells and share every coarse
/// edge.
pub fn nested_l1_difference(
    coarse: &SolverState,
    coarse_mesh: &Mesh,
    fine: &SolverState,
    fine_mesh: &Mesh,
) -> Result<f64> {
    let ic = coarse_mesh.cells();
    if fine_mesh.cells() != 2 * ic {
        return Err(Error::DimensionMismatch {
            expected: 2 * ic,
            got: fine_mesh.cells(),
        });
    }
    if coarse.concentrations.len() != ic {
        return Err(Error::DimensionMismatch {
            expected: ic,
            got: coarse.concentrations.len(),
        });
    }
    if fine.concentrations.len() != 2 * ic {
        return Err(Error::DimensionMismatch {
            expected: 2 * ic,
            got: fine.concentrations.len(),
        });
    }
    let ce = coarse_mesh.edges();
    let fe = fine_mesh.edges();
    for b in 0..=ic {
        let scale = ce[b].abs().max(1.0);
        if (fe[2 * b] - ce[b]).abs() > NESTING_TOL * scale {
            return Err(Error::InvalidArgument(format!(
                "meshes are not nested: coarse edge {} is {}, fine edge {} is {}",
                b,
                ce[b],
                2 * b,
                fe[2 * b]
            )));
        }
    }
    let fw = fine_mesh.widths();
    let mut acc = 0.0;
    for b in 0..2 * ic {
        acc += (fine.concentrations[b] - coarse.concentrations[b / 2]).abs() * fw[b];
    }
    Ok(acc)
}

/// Totals, error proxies, and convergence orders across a doubling mesh
/// study, in table-ready form.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// Cells per level, strictly doubling.
    pub cell_counts: Vec<usize>,
    /// Observed total (e.g. particle number) per level.
    pub totals: Vec<f64>,
    /// |N_{k+1} − N_k| per refinement, one fewer than the levels.
    pub errors: Vec<f64>,
    /// log₂ ratios of consecutive errors, two fewer than the levels.
    pub eoc: Vec<f64>,
}

impl ConvergenceReport {
    /// Builds the report from per-level totals; the cell counts must double
    /// at every refinement and at least three levels are needed.
    pub fn from_totals(cell_counts: Vec<usize>, totals: Vec<f64>) -> Result<Self> {
        if cell_counts.len() != totals.len() {
            return Err(Error::DimensionMismatch {
                expected: cell_counts.len(),
                got: totals.len(),
            });
        }
        if cell_counts.len() < 3 {
            return Err(Error::InvalidArgument(format!(
                "a convergence report needs at least three levels, got {}",
                cell_counts.len()
            )));
        }
        for pair in cell_counts.windows(2) {
            if pair[1] != 2 * pair[0] {
                return Err(Error::InvalidArgument(format!(
                    "cell counts must double per level, got {} after {}",
                    pair[1], pair[0]
                )));
            }
        }
        let errors: Vec<f64> = totals.windows(2).map(|p| (p[1] - p[0]).abs()).collect();
        let eoc = eoc_from_errors(&errors)?;
        Ok(Self {
            cell_counts,
            totals,
            errors,
            eoc,
        })
    }
}

/// Time series of selected moments, one row per observed instant.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSeries {
    orders: Vec<u32>,
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl MomentSeries {
    /// An empty series tracking the given moment orders.
    pub fn new(orders: Vec<u32>) -> Self {
        Self {
            orders,
            times: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Appends one observation row for the state's time.
    pub fn push(&mut self, state: &SolverState, mesh: &Mesh) {
        self.times.push(state.time);
        self.values
            .push(self.orders.iter().map(|&j| moment(state, mesh, j)).collect());
    }

    /// Tracked moment orders.
    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    /// Observation times.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// One row of moment values per observation time.
    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }
}
