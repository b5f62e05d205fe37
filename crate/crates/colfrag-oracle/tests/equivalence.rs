//! The production solver and the brute-force oracle must agree to round-off
//! on instances small enough for the oracle, across every built-in
//! kernel/distribution pairing and mesh family.

use colfrag_core::kernels::{discretize, BreakageDistribution, CollisionKernel};
use colfrag_core::mesh::Mesh;
use colfrag_core::solver::{euler_step, rhs, SolverState, StabilityBudget};
use colfrag_oracle::{brute_force_rhs, oracle_euler_step, rk4_reference_run};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn builtin_pairs() -> Vec<(CollisionKernel, BreakageDistribution)> {
    let kernels = [
        CollisionKernel::product(1.0).unwrap(),
        CollisionKernel::Sum,
        CollisionKernel::piecewise_h2(0.8, 1.0, 0.3, 0.5).unwrap(),
    ];
    let dists = [
        BreakageDistribution::dirac_comb(vec![0.4, 0.6], vec![1.0, 1.0]).unwrap(),
        BreakageDistribution::ConditionalUniform,
    ];
    let mut pairs = Vec::new();
    for k in &kernels {
        for d in &dists {
            pairs.push((k.clone(), d.clone()));
        }
    }
    pairs
}

fn mesh_for(trial: usize, cells: usize) -> Mesh {
    match trial % 3 {
        0 => Mesh::uniform(0.0, 2.0, cells).unwrap(),
        1 => Mesh::uniform(0.1, 4.0, cells).unwrap(),
        _ => Mesh::geometric(1e-3, 5.0, cells, 1.3).unwrap(),
    }
}

fn random_state(rng: &mut ChaCha8Rng, cells: usize) -> SolverState {
    let c: Vec<f64> = (0..cells).map(|_| rng.gen_range(0.1..2.0)).collect();
    SolverState::from_concentrations(c, 0.0)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

#[test]
fn rhs_matches_brute_force_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0DDC0FFE);
    let pairs = builtin_pairs();
    for trial in 0..30 {
        let cells = rng.gen_range(1..=16);
        let mesh = mesh_for(trial, cells);
        let (kernel, dist) = &pairs[trial % pairs.len()];
        let state = random_state(&mut rng, cells);

        let disc = discretize(kernel, dist, &mesh, 3).unwrap();
        let fast = rhs(&state, &disc, &mesh).unwrap();
        let slow = brute_force_rhs(&state, kernel, dist, &mesh, 3).unwrap();

        let tol = 1e-12 * max_abs(&fast).max(1.0);
        for (a, (x, y)) in fast.iter().zip(&slow).enumerate() {
            assert!(
                (x - y).abs() <= tol,
                "trial {trial} cell {a}: solver {x} vs oracle {y}"
            );
        }
    }
}

#[test]
fn euler_step_matches_oracle_step() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xBEE5);
    let pairs = builtin_pairs();
    for trial in 0..12 {
        let cells = rng.gen_range(1..=12);
        let mesh = mesh_for(trial, cells);
        let (kernel, dist) = &pairs[trial % pairs.len()];
        let state = random_state(&mut rng, cells);

        let disc = discretize(kernel, dist, &mesh, 3).unwrap();
        let derivative = rhs(&state, &disc, &mesh).unwrap();
        let dt = 1e-3 * max_abs(&state.concentrations) / max_abs(&derivative).max(1.0);

        let (fast, _) = euler_step(&state, &disc, &mesh, dt, None).unwrap();
        let slow = oracle_euler_step(&state, kernel, dist, &mesh, dt, 3).unwrap();

        assert_eq!(fast.time, slow.time);
        for (a, (x, y)) in fast
            .concentrations
            .iter()
            .zip(&slow.concentrations)
            .enumerate()
        {
            assert!(
                (x - y).abs() <= 1e-12 * x.abs().max(1.0),
                "trial {trial} cell {a}: {x} vs {y}"
            );
        }
    }
}

/// On a single cell with the product kernel and a two-fragment comb landing
/// in-cell, the scheme collapses to C' = (λ/4)C², whose exact solution is
/// C(t) = C₀/(1 − (λ/4)C₀ t). RK4 at a small step must sit on it.
#[test]
fn rk4_reproduces_single_cell_closed_form() {
    let mesh = Mesh::uniform(0.0, 1.0, 1).unwrap();
    let comb = BreakageDistribution::dirac_comb(vec![0.4, 0.6], vec![1.0, 1.0]).unwrap();
    let kernel = CollisionKernel::product(1.0).unwrap();
    let initial = SolverState::from_concentrations(vec![1.0], 0.0);

    let out = rk4_reference_run(&initial, &kernel, &comb, &mesh, 0.5, 1e-3, 4, None).unwrap();
    let exact = 1.0 / (1.0 - 0.25 * 0.5);
    assert!(
        (out.concentrations[0] - exact).abs() < 1e-11,
        "{} vs {exact}",
        out.concentrations[0]
    );
    assert_eq!(out.time, 0.5);
}

#[test]
fn rk4_handles_partial_final_step() {
    let mesh = Mesh::uniform(0.0, 1.0, 1).unwrap();
    let comb = BreakageDistribution::dirac_comb(vec![0.4, 0.6], vec![1.0, 1.0]).unwrap();
    let kernel = CollisionKernel::product(1.0).unwrap();
    let initial = SolverState::from_concentrations(vec![1.0], 0.0);

    let out = rk4_reference_run(&initial, &kernel, &comb, &mesh, 0.25, 0.1, 4, None).unwrap();
    let exact = 1.0 / (1.0 - 0.25 * 0.25);
    assert_eq!(out.time, 0.25);
    assert!((out.concentrations[0] - exact).abs() < 1e-8);
}

#[test]
fn rk4_enforces_margin_below_the_euler_bound() {
    let mesh = Mesh::uniform(0.0, 1.0, 1).unwrap();
    let comb = BreakageDistribution::dirac_comb(vec![0.4, 0.6], vec![1.0, 1.0]).unwrap();
    let kernel = CollisionKernel::product(1.0).unwrap();
    let initial = SolverState::from_concentrations(vec![1.0], 0.0);
    let budget = StabilityBudget {
        s: 50.0,
        theta: 0.5,
        dt_max: 0.01,
    };

    assert!(rk4_reference_run(
        &initial, &kernel, &comb, &mesh, 0.1, 0.001, 4,
        Some(&budget)
    )
    .is_ok());
    let err = rk4_reference_run(
        &initial, &kernel, &comb, &mesh, 0.1, 0.002, 4,
        Some(&budget),
    )
    .unwrap_err();
    assert!(matches!(
        err,
        colfrag_core::Error::RejectedStep { .. }
    ));
}
