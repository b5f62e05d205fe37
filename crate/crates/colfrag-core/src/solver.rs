//! Explicit time stepping for the collision-induced fragmentation equation.
//!
//! The semi-discrete system on a mesh of I cells reads
//!
//! ```text
//! dC_a/dt = (1/Δ_a) Σ_j Σ_l K_{j,l} g_j g_l W_{a,j,l}  −  C_a Σ_j K_{a,j} g_j
//! ```
//!
//! with g_j = C_j Δ_j and W the precomputed birth windows from
//! [`crate::kernels::discretize`]. Stepping is explicit Euler under a step
//! bound derived from a Lipschitz estimate of the right-hand side; steps that
//! would drive a concentration below a small negativity floor abort, and
//! harmless round-off negativity above the floor is clamped to zero.

use crate::error::Error;
use crate::kernels::{BirthTable, DiscreteKernels};
use crate::mesh::Mesh;
use crate::quadrature::GaussLegendre;
use crate::Result;

/// Most negative concentration tolerated before a step counts as a scheme
/// failure. Values in [floor, 0) are treated as round-off and clamped.
pub const NEGATIVITY_FLOOR: f64 = -1e-14;

/// Relative slack when checking a step against the stability budget, so a
/// dt computed as exactly dt_max is not rejected for round-off.
const BUDGET_SLACK: f64 = 1e-12;

/// Concentrations (number densities per cell) at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    /// Cell number densities, length I.
    pub concentrations: Vec<f64>,
    /// Physical time.
    pub time: f64,
    /// Number of Euler steps taken to reach this state.
    pub step_index: u64,
}

impl SolverState {
    /// Wraps raw concentrations at a given time, with the step counter at 0.
    pub fn from_concentrations(concentrations: Vec<f64>, time: f64) -> Self {
        Self {
            concentrations,
            time,
            step_index: 0,
        }
    }
}

/// Projects a pointwise initial density onto cell averages by Gauss-Legendre
/// quadrature of the given order. The density must be finite and
/// non-negative at every quadrature node.
pub fn initial_state(
    mesh: &Mesh,
    init: impl Fn(f64) -> f64,
    quadrature_order: usize,
) -> Result<SolverState> {
    let quad = GaussLegendre::new(quadrature_order)?;
    let edges = mesh.edges();
    let mut concentrations = Vec::with_capacity(mesh.cells());
    for a in 0..mesh.cells() {
        let mut bad: Option<f64> = None;
        let avg = quad.average(edges[a], edges[a + 1], |m| {
            let v = init(m);
            if !v.is_finite() || v < 0.0 {
                bad = Some(v);
            }
            v
        });
        if let Some(v) = bad {
            return Err(Error::InvalidArgument(format!(
                "initial density evaluates to {v} inside cell {a}; it must be \
                 finite and non-negative"
            )));
        }
        concentrations.push(avg);
    }
    Ok(SolverState::from_concentrations(concentrations, 0.0))
}

/// Stability bound for explicit Euler: the largest admissible step is
/// dt_max = θ/S, where S bounds the Lipschitz constant of the right-hand
/// side over the run horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityBudget {
    /// The Lipschitz bound S.
    pub s: f64,
    /// Safety factor θ ∈ (0, 1).
    pub theta: f64,
    /// θ/S, the largest step the budget admits.
    pub dt_max: f64,
}

/// Computes the run-horizon stability constant
///
/// ```text
/// S = λ (2 R ‖C⁰‖₁ e^{2 λ R ‖B‖_∞ M₁ T} + M₁)
/// ```
///
/// and the step bound dt_max = θ/S. `lambda` is the collision-rate
/// prefactor, `r` the domain cap, `l1_init` the L¹ norm and `m1_init` the
/// first moment of the initial data, `b_sup` a pointwise bound on the
/// fragment density, and `t_horizon` the run length. The number of particles
/// can grow like e^{2λR‖B‖∞M₁t}, so horizons large enough to overflow the
/// exponential admit no usable budget and fail as such.
pub fn stability_constant(
    lambda: f64,
    r: f64,
    l1_init: f64,
    b_sup: f64,
    m1_init: f64,
    t_horizon: f64,
    theta: f64,
) -> Result<StabilityBudget> {
    for (name, v) in [
        ("lambda", lambda),
        ("r", r),
        ("l1_init", l1_init),
        ("b_sup", b_sup),
        ("m1_init", m1_init),
    ] {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "stability constant needs {name} > 0, got {v}"
            )));
        }
    }
    if !t_horizon.is_finite() || t_horizon < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "stability constant needs a horizon >= 0, got {t_horizon}"
        )));
    }
    if !theta.is_finite() || theta <= 0.0 || theta >= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "safety factor theta must lie in (0, 1), got {theta}"
        )));
    }
    let exponent = 2.0 * lambda * r * b_sup * m1_init * t_horizon;
    if exponent > 700.0 {
        return Err(Error::StabilityUnbounded { exponent });
    }
    let s = lambda * (2.0 * r * l1_init * exponent.exp() + m1_init);
    Ok(StabilityBudget {
        s,
        theta,
        dt_max: theta / s,
    })
}

/// Per-step bookkeeping emitted alongside every accepted Euler step.
#[derive(Debug, Clone, Copy)]
pub struct StepStats {
    /// Cells whose round-off negativity was clamped to zero.
    pub clamped: usize,
    /// Smallest concentration produced by the step, before clamping.
    pub min_before_clamp: f64,
    /// First moment (total mass) before the step.
    pub mass_before: f64,
    /// First moment after the step, after clamping.
    pub mass_after: f64,
}

/// Aggregated bookkeeping over a whole [`run`].
#[derive(Debug, Clone, Copy)]
pub struct RunStats {
    /// Accepted Euler steps.
    pub steps: u64,
    /// Total clamped cells across all steps.
    pub clamped_total: u64,
    /// Smallest pre-clamp concentration seen anywhere in the run.
    pub min_concentration: f64,
    /// Largest single-step mass change relative to the starting mass
    /// (negative throughout a run whose mass strictly decreases; −∞ if the
    /// run took no steps).
    pub max_rel_mass_increase: f64,
}

fn first_moment(concentrations: &[f64], mesh: &Mesh) -> f64 {
    let mid = mesh.midpoints();
    let w = mesh.widths();
    let mut acc = 0.0;
    for a in 0..concentrations.len() {
        acc += mid[a] * concentrations[a] * w[a];
    }
    acc
}

fn check_dimensions(state: &SolverState, disc: &DiscreteKernels, mesh: &Mesh) -> Result<()> {
    let i = mesh.cells();
    if disc.cells() != i {
        return Err(Error::DimensionMismatch {
            expected: i,
            got: disc.cells(),
        });
    }
    if state.concentrations.len() != i {
        return Err(Error::DimensionMismatch {
            expected: i,
            got: state.concentrations.len(),
        });
    }
    Ok(())
}

/// Evaluates the semi-discrete right-hand side dC/dt for one state.
///
/// The loop order is fixed and the accumulation sequential, so repeated
/// calls on the same inputs are bit-identical.
pub fn rhs(state: &SolverState, disc: &DiscreteKernels, mesh: &Mesh) -> Result<Vec<f64>> {
    check_dimensions(state, disc, mesh)?;
    let i = mesh.cells();
    let c = &state.concentrations;
    let widths = mesh.widths();
    let k = disc.k_matrix();

    // g_j = C_j Δ_j, the per-cell number content.
    let g: Vec<f64> = c.iter().zip(widths).map(|(c, w)| c * w).collect();

    // total[j] = Σ_l K_{j,l} g_l drives both the death term and, for
    // partner-independent fragments, the birth term.
    let mut total = vec![0.0; i];
    for j in 0..i {
        let row = &k[j * i..(j + 1) * i];
        let mut acc = 0.0;
        for l in 0..i {
            acc += row[l] * g[l];
        }
        total[j] = acc;
    }

    let mut birth = vec![0.0; i];
    match disc.birth_table() {
        BirthTable::SharedPerParent(rows) => {
            for j in 0..i {
                let s = g[j] * total[j];
                if s == 0.0 {
                    continue;
                }
                for &(a, wgt) in &rows[j] {
                    birth[a] += s * wgt;
                }
            }
        }
        BirthTable::SplitByPartner {
            smaller_partner,
            larger_or_equal_partner,
        } => {
            for j in 0..i {
                if g[j] == 0.0 {
                    continue;
                }
                let row = &k[j * i..(j + 1) * i];
                let mut below = 0.0;
                for l in 0..j {
                    below += row[l] * g[l];
                }
                let s_small = g[j] * below;
                let s_large = g[j] * (total[j] - below);
                for &(a, wgt) in &smaller_partner[j] {
                    birth[a] += s_small * wgt;
                }
                for &(a, wgt) in &larger_or_equal_partner[j] {
                    birth[a] += s_large * wgt;
                }
            }
        }
        BirthTable::PerPair(table) => {
            for j in 0..i {
                if g[j] == 0.0 {
                    continue;
                }
                for l in 0..i {
                    let s = g[j] * k[j * i + l] * g[l];
                    if s == 0.0 {
                        continue;
                    }
                    for &(a, wgt) in &table[j][l] {
                        birth[a] += s * wgt;
                    }
                }
            }
        }
    }

    let mut out = vec![0.0; i];
    for a in 0..i {
        out[a] = birth[a] / widths[a] - c[a] * total[a];
    }
    Ok(out)
}

/// Advances the state by one explicit Euler step of size `dt`.
///
/// A budget, when given, rejects steps beyond its dt_max before any work is
/// done. `dt` = 0 is a no-op that still reports stats. A concentration
/// falling below [`NEGATIVITY_FLOOR`] aborts the step as a scheme failure;
/// negativity above the floor is clamped to zero and counted.
pub fn euler_step(
    state: &SolverState,
    disc: &DiscreteKernels,
    mesh: &Mesh,
    dt: f64,
    budget: Option<&StabilityBudget>,
) -> Result<(SolverState, StepStats)> {
    if !dt.is_finite() || dt < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "step size must be finite and non-negative, got {dt}"
        )));
    }
    if let Some(b) = budget {
        if dt > b.dt_max * (1.0 + BUDGET_SLACK) {
            return Err(Error::RejectedStep {
                dt,
                dt_max: b.dt_max,
            });
        }
    }
    check_dimensions(state, disc, mesh)?;

    let mass_before = first_moment(&state.concentrations, mesh);
    if dt == 0.0 {
        let min = state
            .concentrations
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        return Ok((
            state.clone(),
            StepStats {
                clamped: 0,
                min_before_clamp: min,
                mass_before,
                mass_after: mass_before,
            },
        ));
    }

    let derivative = rhs(state, disc, mesh)?;
    let time_after = state.time + dt;
    let mut next = Vec::with_capacity(state.concentrations.len());
    let mut min_before_clamp = f64::INFINITY;
    let mut clamped = 0usize;
    for (a, (&c, &d)) in state.concentrations.iter().zip(&derivative).enumerate() {
        let mut v = c + dt * d;
        if v < min_before_clamp {
            min_before_clamp = v;
        }
        if v < NEGATIVITY_FLOOR {
            return Err(Error::SchemeFailure {
                cell: a,
                value: v,
                time: time_after,
            });
        }
        if v < 0.0 {
            v = 0.0;
            clamped += 1;
        }
        next.push(v);
    }

    let mass_after = first_moment(&next, mesh);
    Ok((
        SolverState {
            concentrations: next,
            time: time_after,
            step_index: state.step_index + 1,
        },
        StepStats {
            clamped,
            min_before_clamp,
            mass_before,
            mass_after,
        },
    ))
}

/// Integrates from the state's time to `t_final` with fixed step `dt`,
/// taking a final shorter step when the horizon is not a whole multiple of
/// `dt`. The observer sees every accepted state with its step stats; the
/// returned state lands on `t_final` exactly.
pub fn run(
    state: &SolverState,
    disc: &DiscreteKernels,
    mesh: &Mesh,
    t_final: f64,
    dt: f64,
    budget: Option<&StabilityBudget>,
    mut on_step: impl FnMut(&SolverState, &StepStats),
) -> Result<(SolverState, RunStats)> {
    if !t_final.is_finite() || t_final < state.time {
        return Err(Error::InvalidArgument(format!(
            "final time {t_final} must be finite and not precede the state time {}",
            state.time
        )));
    }
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "run step size must be finite and positive, got {dt}"
        )));
    }

    let span = t_final - state.time;
    // Tolerate round-off in span/dt so a horizon of exactly n·dt takes n
    // steps, not n−1 full steps plus a sliver.
    let n_full = (span / dt + 1e-12).floor() as u64;
    let remainder = span - n_full as f64 * dt;
    let tail = remainder > dt * 1e-9;

    let mass0 = first_moment(&state.concentrations, mesh);
    let denom = if mass0 > 0.0 { mass0 } else { 1.0 };
    let mut stats = RunStats {
        steps: 0,
        clamped_total: 0,
        min_concentration: state
            .concentrations
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min),
        max_rel_mass_increase: f64::NEG_INFINITY,
    };

    let mut current = state.clone();
    let mut absorb = |next: &SolverState, step: &StepStats, stats: &mut RunStats| {
        stats.steps += 1;
        stats.clamped_total += step.clamped as u64;
        stats.min_concentration = stats.min_concentration.min(step.min_before_clamp);
        let rel = (step.mass_after - step.mass_before) / denom;
        stats.max_rel_mass_increase = stats.max_rel_mass_increase.max(rel);
        on_step(next, step);
    };

    for _ in 0..n_full {
        let (next, step) = euler_step(&current, disc, mesh, dt, budget)?;
        absorb(&next, &step, &mut stats);
        current = next;
    }
    if tail {
        // Recomputed from the current time so the run lands on the horizon.
        let dt_tail = t_final - current.time;
        let (next, step) = euler_step(&current, disc, mesh, dt_tail, budget)?;
        absorb(&next, &step, &mut stats);
        current = next;
    }
    current.time = t_final;
    Ok((current, stats))
}
