//! Driving one solver run from a validated config.

use anyhow::Context;
use colfrag_core::diagnostics::moment;
use colfrag_core::kernels::discretize;
use colfrag_core::solver::{initial_state, run};

use crate::config::{
    build_breakage, build_budget, build_kernel, build_mesh, choose_dt, initial_density,
    ConfigFile, INIT_QUADRATURE_ORDER, KERNEL_QUADRATURE_ORDER,
};

/// One observed instant of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleRow {
    pub time: f64,
    pub total_number: f64,
    pub total_mass: f64,
    /// Smallest concentration produced at this instant, before clamping;
    /// for the initial row, the smallest initial concentration.
    pub min_concentration: f64,
    /// dt / dt_max of the run's stability budget.
    pub budget_usage: f64,
}

/// A completed single run: the observed rows plus step bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleOutcome {
    pub rows: Vec<SingleRow>,
    pub steps: u64,
    pub clamped: u64,
}

/// Runs the configured case to its horizon, recording every
/// `output.observer_every`-th step and always the final one. A zero horizon
/// yields just the initial row.
pub fn run_single(file: &ConfigFile) -> anyhow::Result<SingleOutcome> {
    let cells = file
        .mesh
        .cells
        .context("single runs need mesh.cells")?;
    let mesh = build_mesh(file, cells)?;
    let kernel = build_kernel(file)?;
    let dist = build_breakage(file)?;
    let init = initial_density(file)?;
    let state0 = initial_state(&mesh, |m| init(m), INIT_QUADRATURE_ORDER)?;
    let disc = discretize(&kernel, &dist, &mesh, KERNEL_QUADRATURE_ORDER)?;
    let budget = build_budget(file, &mesh, &state0)?;
    let dt = choose_dt(file, &mesh, &budget)?;
    let usage = dt / budget.dt_max;
    let t_final = file.time.t_final;

    let min0 = state0
        .concentrations
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let mut rows = vec![SingleRow {
        time: state0.time,
        total_number: moment(&state0, &mesh, 0),
        total_mass: moment(&state0, &mesh, 1),
        min_concentration: min0,
        budget_usage: usage,
    }];
    if t_final == state0.time {
        return Ok(SingleOutcome {
            rows,
            steps: 0,
            clamped: 0,
        });
    }

    let every = file.output.observer_every;
    let (_, stats) = run(
        &state0,
        &disc,
        &mesh,
        t_final,
        dt,
        Some(&budget),
        |state, step| {
            if state.step_index % every == 0 || state.time == t_final {
                rows.push(SingleRow {
                    time: state.time,
                    total_number: moment(state, &mesh, 0),
                    total_mass: moment(state, &mesh, 1),
                    min_concentration: step.min_before_clamp,
                    budget_usage: usage,
                });
            }
        },
    )?;

    Ok(SingleOutcome {
        rows,
        steps: stats.steps,
        clamped: stats.clamped_total,
    })
}
