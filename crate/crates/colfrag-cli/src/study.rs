//! Driving a mesh-refinement study from a validated config.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::Context;
use colfrag_core::diagnostics::{moment, ConvergenceReport};
use colfrag_core::kernels::discretize;
use colfrag_core::solver::{initial_state, run};

use crate::config::{
    build_breakage, build_budget, build_kernel, build_mesh, choose_dt, initial_density,
    ConfigFile, INIT_QUADRATURE_ORDER, KERNEL_QUADRATURE_ORDER,
};

/// Results of one refinement level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelOutcome {
    pub cells: usize,
    pub dt: f64,
    pub steps: u64,
    pub total_number: f64,
    pub min_concentration: f64,
    pub max_rel_mass_increase: f64,
    pub clamped: u64,
}

/// A completed study: per-level outcomes and the assembled convergence
/// table.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyOutcome {
    pub levels: Vec<LevelOutcome>,
    pub report: ConvergenceReport,
}

fn run_level(file: &ConfigFile, cells: usize) -> anyhow::Result<LevelOutcome> {
    let mesh = build_mesh(file, cells)?;
    let kernel = build_kernel(file)?;
    let dist = build_breakage(file)?;
    let init = initial_density(file)?;
    let state0 = initial_state(&mesh, |m| init(m), INIT_QUADRATURE_ORDER)?;
    let disc = discretize(&kernel, &dist, &mesh, KERNEL_QUADRATURE_ORDER)?;
    let budget = build_budget(file, &mesh, &state0)?;
    let dt = choose_dt(file, &mesh, &budget)?;
    let (final_state, stats) = run(
        &state0,
        &disc,
        &mesh,
        file.time.t_final,
        dt,
        Some(&budget),
        |_, _| {},
    )?;
    Ok(LevelOutcome {
        cells,
        dt,
        steps: stats.steps,
        total_number: moment(&final_state, &mesh, 0),
        min_concentration: stats.min_concentration,
        max_rel_mass_increase: stats.max_rel_mass_increase,
        clamped: stats.clamped_total,
    })
}

/// Runs every level of the study and assembles the convergence table.
///
/// Levels are independent, so they may run on `threads` workers; results
/// are aggregated in level order, making the output identical for any
/// thread count. A failing level aborts the study with an error naming it.
pub fn run_study(file: &ConfigFile, threads: usize) -> anyhow::Result<StudyOutcome> {
    let levels = &file
        .study
        .as_ref()
        .context("this configuration has no [study] section")?
        .levels;

    let results: Vec<Mutex<Option<anyhow::Result<LevelOutcome>>>> =
        levels.iter().map(|_| Mutex::new(None)).collect();

    if threads <= 1 {
        for (slot, &cells) in results.iter().zip(levels) {
            *slot.lock().unwrap() = Some(run_level(file, cells));
        }
    } else {
        let next = AtomicUsize::new(0);
        std::thread::scope(|scope| {
            for _ in 0..threads.min(levels.len()) {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= levels.len() {
                        break;
                    }
                    let outcome = run_level(file, levels[i]);
                    *results[i].lock().unwrap() = Some(outcome);
                });
            }
        });
    }

    // First failure in level order wins, so the error is deterministic.
    let mut outcomes = Vec::with_capacity(levels.len());
    for (slot, &cells) in results.iter().zip(levels) {
        let outcome = slot
            .lock()
            .unwrap()
            .take()
            .unwrap_or_else(|| panic!("level with {cells} cells was never run"));
        outcomes.push(
            outcome.with_context(|| format!("study level with {cells} cells failed"))?,
        );
    }

    let report = ConvergenceReport::from_totals(
        levels.clone(),
        outcomes.iter().map(|o| o.total_number).collect(),
    )?;
    Ok(StudyOutcome {
        levels: outcomes,
        report,
    })
}
