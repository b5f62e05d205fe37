//! Acceptance checks for the solver as a whole: convergence behavior of
//! the shipped study configs, agreement with an independent brute-force
//! reference, conservation and positivity guarantees, the growth
//! envelope, time-stepping order, and the convergence-table arithmetic.
//!
//! Each test prints one `acceptance <name>: PASS|FAIL` line carrying the
//! measured values next to the required ones. The harness shows those
//! lines for failing tests; pass `--nocapture` to see all of them. A
//! failing test here is a finding about the scheme, not a broken build:
//! the criteria are asserted as stated even where the method does not
//! meet them, and the README discusses the ones that fail.

use colfrag_cli::config::parse_config;
use colfrag_cli::run_study;
use colfrag_core::{diagnostics, kernels, solver};
use colfrag_core::{BreakageDistribution, CollisionKernel, Mesh, SolverState};

const PRODUCT_STUDY: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/product_comb_study.toml"));
const SUM_STUDY: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/sum_comb_study.toml"));

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Cell averages of e^{-m}, the initial data shared by the studies.
fn exp_state(mesh: &Mesh) -> SolverState {
    solver::initial_state(mesh, |m| (-m).exp(), 8).unwrap()
}

fn comb_40_60() -> BreakageDistribution {
    BreakageDistribution::dirac_comb(vec![0.4, 0.6], vec![1.0, 1.0]).unwrap()
}

fn first_order_study(name: &str, config: &str) {
    let parsed = parse_config(config).unwrap();
    let started = std::time::Instant::now();
    let outcome = run_study(&parsed.file, 1).expect("study must complete");
    let elapsed = started.elapsed();
    let eoc = &outcome.report.eoc;
    let in_band = eoc.iter().all(|e| (0.95..=1.15).contains(e));
    let settling = eoc.windows(2).all(|w| w[1] <= w[0]);
    let timely = elapsed < std::time::Duration::from_secs(120);
    let pass = in_band && settling && timely;
    let shown: Vec<String> = eoc.iter().map(|e| format!("{e:.4}")).collect();
    println!(
        "acceptance {name} study first-order convergence: {} - \
         eoc [{}] (need each in [0.95, 1.15], non-increasing), {:.2?} elapsed (cap 120 s)",
        verdict(pass),
        shown.join(", "),
        elapsed,
    );
    assert!(pass, "eoc {eoc:?}, elapsed {elapsed:?}");
}

#[test]
fn product_breakage_study_shows_clean_first_order_convergence() {
    first_order_study("product", PRODUCT_STUDY);
}

#[test]
fn sum_kernel_study_shows_clean_first_order_convergence() {
    first_order_study("sum", SUM_STUDY);
}

#[test]
fn tenth_cell_step_studies_match_the_reference_error_table() {
    let levels = [30usize, 60, 120, 240, 480];
    let comb = comb_40_60();
    let mut lines = Vec::new();
    let mut pass = true;

    for (label, kernel, first_error_target) in [
        ("product", CollisionKernel::product(1.0).unwrap(), 0.4271e-4),
        ("sum", CollisionKernel::Sum, 0.4309e-4),
    ] {
        let mut totals: Vec<Option<f64>> = Vec::new();
        let mut aborted = Vec::new();
        for &cells in &levels {
            let mesh = Mesh::uniform(1e-3, 10.0, cells).unwrap();
            let state = exp_state(&mesh);
            let disc = kernels::discretize(&kernel, &comb, &mesh, 4).unwrap();
            let dt = mesh.h_max() / 10.0;
            match solver::run(&state, &disc, &mesh, 1.0, dt, None, |_, _| {}) {
                Ok((end, _)) => totals.push(Some(diagnostics::moment(&end, &mesh, 0))),
                Err(err) => {
                    totals.push(None);
                    aborted.push(format!("{cells} cells: {err}"));
                }
            }
        }
        let errors: Vec<Option<f64>> = totals
            .windows(2)
            .map(|w| match (w[0], w[1]) {
                (Some(coarse), Some(fine)) => Some((fine - coarse).abs()),
                _ => None,
            })
            .collect();
        let first = errors[0];
        let first_ok = matches!(
            first,
            Some(e) if e >= first_error_target / 5.0 && e <= first_error_target * 5.0
        );
        let ratios: Vec<Option<f64>> = errors
            .windows(2)
            .map(|w| match (w[0], w[1]) {
                (Some(coarse), Some(fine)) if fine > 0.0 => Some(coarse / fine),
                _ => None,
            })
            .collect();
        let ratios_ok = ratios
            .iter()
            .all(|r| matches!(r, Some(x) if (1.7..=2.3).contains(x)));
        pass &= first_ok && ratios_ok && aborted.is_empty();

        let fmt = |v: &Option<f64>| v.map_or("unavailable".to_string(), |x| format!("{x:.4e}"));
        lines.push(format!(
            "{label}: first error {} (need within 5x of {first_error_target:.4e}), \
             halving ratios [{}] (need each in [1.7, 2.3]), aborted: {:?}",
            fmt(&first),
            ratios.iter().map(|r| fmt(r)).collect::<Vec<_>>().join(", "),
            aborted,
        ));
    }

    println!("acceptance tenth-cell-step error table: {}", verdict(pass));
    for line in &lines {
        println!("  {line}");
    }
    assert!(pass, "{}", lines.join(" | "));
}

#[test]
fn solver_agrees_with_brute_force_reference_within_round_off() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5EED);

    let kernel_choices = [
        CollisionKernel::product(1.0).unwrap(),
        CollisionKernel::Sum,
        CollisionKernel::piecewise_h2(0.8, 1.0, 0.3, 0.5).unwrap(),
    ];
    let dist_choices = [comb_40_60(), BreakageDistribution::ConditionalUniform];
    let pairs: Vec<(&CollisionKernel, &BreakageDistribution)> = kernel_choices
        .iter()
        .flat_map(|k| dist_choices.iter().map(move |d| (k, d)))
        .collect();

    let mut worst = 0.0f64;
    let mut violations = Vec::new();
    for trial in 0..100usize {
        let cells = rng.gen_range(1..=16usize);
        let mesh = match trial % 3 {
            0 => Mesh::uniform(0.0, 2.0, cells).unwrap(),
            1 => Mesh::uniform(0.1, 4.0, cells).unwrap(),
            _ => Mesh::geometric(1e-3, 5.0, cells, 1.3).unwrap(),
        };
        let (kernel, dist) = pairs[trial % pairs.len()];
        let concentrations: Vec<f64> = (0..cells).map(|_| rng.gen_range(0.1..2.0)).collect();
        let state = SolverState::from_concentrations(concentrations, 0.0);

        let disc = kernels::discretize(kernel, dist, &mesh, 4).unwrap();
        let fast = solver::rhs(&state, &disc, &mesh).unwrap();
        let slow = colfrag_oracle::brute_force_rhs(&state, kernel, dist, &mesh, 4).unwrap();
        let rate_scale = fast.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (cell, (x, y)) in fast.iter().zip(&slow).enumerate() {
            let rel = (x - y).abs() / rate_scale;
            worst = worst.max(rel);
            if rel > 1e-12 {
                violations.push(format!("trial {trial} rhs cell {cell}: {x} vs {y}"));
            }
        }

        let max_c = state.concentrations.iter().fold(0.0f64, |m, v| m.max(*v));
        let dt = 1e-3 * max_c / rate_scale;
        let (stepped, _) = solver::euler_step(&state, &disc, &mesh, dt, None).unwrap();
        let oracle =
            colfrag_oracle::oracle_euler_step(&state, kernel, dist, &mesh, dt, 4).unwrap();
        let state_scale = max_c.max(1.0);
        for (cell, (x, y)) in stepped
            .concentrations
            .iter()
            .zip(&oracle.concentrations)
            .enumerate()
        {
            let rel = (x - y).abs() / state_scale;
            worst = worst.max(rel);
            if rel > 1e-12 {
                violations.push(format!("trial {trial} step cell {cell}: {x} vs {y}"));
            }
        }
    }

    let pass = violations.is_empty();
    println!(
        "acceptance brute-force agreement: {} - 100 random instances, worst relative \
         deviation {worst:.3e} (cap 1e-12), {} violations",
        verdict(pass),
        violations.len(),
    );
    assert!(pass, "{violations:?}");
}

#[test]
fn product_study_keeps_mass_monotone_and_concentrations_floored() {
    let parsed = parse_config(PRODUCT_STUDY).unwrap();
    let outcome = run_study(&parsed.file, 4).unwrap();
    let worst_increase = outcome
        .levels
        .iter()
        .map(|l| l.max_rel_mass_increase)
        .fold(f64::NEG_INFINITY, f64::max);
    let lowest = outcome
        .levels
        .iter()
        .map(|l| l.min_concentration)
        .fold(f64::INFINITY, f64::min);
    let pass = worst_increase <= 1e-12 && lowest >= -1e-14;
    println!(
        "acceptance mass and positivity guards: {} - worst relative mass increase \
         {worst_increase:.3e} (cap 1e-12), lowest concentration {lowest:.3e} (floor -1e-14)",
        verdict(pass),
    );
    assert!(pass);
}

#[test]
fn particle_count_stays_inside_the_exponential_growth_envelope() {
    let mesh = Mesh::uniform(1e-3, 10.0, 60).unwrap();
    let dist = BreakageDistribution::ConditionalUniform;
    // The uniform fragment density peaks at 2/n, so its supremum over the
    // domain is 2/domain_min; that true bound feeds the envelope. The
    // stepping budget instead uses the tiny stand-in the shipped config
    // documents, because the true bound overflows the exponential.
    let density_sup = 2.0 / mesh.domain_min();
    let mut lines = Vec::new();
    let mut pass = true;

    for (lambda, t_final) in [(1.0, 1.0), (2.5, 0.5)] {
        let kernel = CollisionKernel::product(lambda).unwrap();
        let state = exp_state(&mesh);
        let l1 = diagnostics::moment(&state, &mesh, 0);
        let m1 = diagnostics::moment(&state, &mesh, 1);
        let disc = kernels::discretize(&kernel, &dist, &mesh, 4).unwrap();
        let budget =
            solver::stability_constant(lambda, mesh.domain_max(), l1, 1e-12, m1, t_final, 0.5)
                .unwrap();
        let dt = (0.04 * mesh.h_max()).min(budget.dt_max);
        let rate = 2.0 * lambda * mesh.domain_max() * density_sup * m1;

        let mut worst_margin = f64::NEG_INFINITY;
        let (end, _) = solver::run(&state, &disc, &mesh, t_final, dt, Some(&budget), |s, _| {
            let ln_count = diagnostics::moment(s, &mesh, 0).ln();
            let envelope = l1.ln() + rate * s.time;
            worst_margin = worst_margin.max(ln_count - envelope);
        })
        .unwrap();
        let ok = worst_margin <= 1e-9;
        pass &= ok;
        lines.push(format!(
            "lambda {lambda}, horizon {t_final}: count {:.6} -> {:.6}, worst log-margin \
             {worst_margin:.3e} (cap 1e-9)",
            l1,
            diagnostics::moment(&end, &mesh, 0),
        ));
    }

    println!("acceptance growth envelope: {}", verdict(pass));
    for line in &lines {
        println!("  {line}");
    }
    assert!(pass);
}

#[test]
fn euler_time_error_halves_with_the_step() {
    let mesh = Mesh::uniform(1e-3, 10.0, 120).unwrap();
    let kernel = CollisionKernel::product(1.0).unwrap();
    let comb = comb_40_60();
    let state = exp_state(&mesh);
    let disc = kernels::discretize(&kernel, &comb, &mesh, 4).unwrap();
    let reference =
        colfrag_oracle::rk4_reference_run(&state, &kernel, &comb, &mesh, 1.0, 1e-3, 4, None)
            .unwrap();

    let widths = mesh.widths();
    let distances: Vec<f64> = [0.02, 0.01, 0.005, 0.0025]
        .iter()
        .map(|&dt| {
            let (end, _) = solver::run(&state, &disc, &mesh, 1.0, dt, None, |_, _| {}).unwrap();
            end.concentrations
                .iter()
                .zip(&reference.concentrations)
                .zip(widths.iter())
                .map(|((a, b), w)| (a - b).abs() * w)
                .sum()
        })
        .collect();
    let ratios: Vec<f64> = distances.windows(2).map(|w| w[0] / w[1]).collect();
    let pass = ratios.iter().all(|r| (1.8..=2.2).contains(r));

    let fmt = |v: &Vec<f64>, p: usize| {
        v.iter()
            .map(|x| format!("{x:.p$e}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    println!(
        "acceptance first-order time stepping: {} - distances to the RK4 reference \
         [{}] at steps [0.02, 0.01, 0.005, 0.0025], halving ratios [{}] (need each in [1.8, 2.2])",
        verdict(pass),
        fmt(&distances, 3),
        ratios
            .iter()
            .map(|r| format!("{r:.4}"))
            .collect::<Vec<_>>()
            .join(", "),
    );
    assert!(pass, "ratios {ratios:?}");
}

#[test]
fn fragment_mass_identity_holds_across_random_parents() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xBA55);
    let dists = [
        comb_40_60(),
        BreakageDistribution::dirac_comb(vec![0.5], vec![2.0]).unwrap(),
        BreakageDistribution::dirac_comb(vec![0.2, 0.5, 0.9], vec![1.0, 0.8, 0.4 / 0.9]).unwrap(),
        BreakageDistribution::ConditionalUniform,
    ];
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n: f64 = rng.gen_range(1e-3..10.0);
        let z: f64 = rng.gen_range(1e-3..10.0);
        for dist in &dists {
            let rel = (dist.mass_check(n, z) - n).abs() / n.max(1.0);
            worst = worst.max(rel);
        }
    }
    let pass = worst <= 1e-12;
    println!(
        "acceptance fragment mass identity: {} - worst relative deviation {worst:.3e} \
         over 4000 parent/partner draws (cap 1e-12)",
        verdict(pass),
    );
    assert!(pass);
}

#[test]
fn convergence_orders_recompute_from_the_error_column() {
    let errors = [0.4271e-4, 0.2006e-4, 0.0973e-4];
    let stated = [1.0899, 1.0449];
    let eoc = diagnostics::eoc_from_errors(&errors).unwrap();
    let deviations: Vec<f64> = eoc.iter().zip(&stated).map(|(a, b)| (a - b).abs()).collect();
    let pass = deviations.iter().all(|d| *d <= 5e-4);
    println!(
        "acceptance error-table order arithmetic: {} - orders from the error column \
         [{:.7}, {:.7}], order column [{:.4}, {:.4}], deviations [{:.2e}, {:.2e}] (cap 5e-4)",
        verdict(pass),
        eoc[0],
        eoc[1],
        stated[0],
        stated[1],
        deviations[0],
        deviations[1],
    );
    assert!(pass, "deviations {deviations:?}");
}
