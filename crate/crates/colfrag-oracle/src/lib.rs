//! Slow, structurally independent reference implementations used to
//! cross-check the production solver.
//!
//! [`brute_force_rhs`] re-derives the semi-discrete right-hand side from the
//! scheme definition with plain triple loops and its own quadrature, without
//! any of the precomputed tables or algebraic shortcuts the solver uses.
//! [`rk4_reference_run`] produces a high-accuracy time reference on the same
//! spatial discretization, isolating the time-stepping error of explicit
//! Euler. Both are meant for small instances and tests, not production runs.

use colfrag_core::error::Error;
use colfrag_core::kernels::{discretize, BreakageDistribution, CollisionKernel};
use colfrag_core::mesh::Mesh;
use colfrag_core::solver::{rhs, SolverState, StabilityBudget, NEGATIVITY_FLOOR};
use colfrag_core::Result;

/// Largest instance the brute-force path accepts; beyond this the cubic
/// loops with per-pair quadrature stop being "slow but fine".
pub const MAX_BRUTE_FORCE_CELLS: usize = 64;

/// P_n(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> f64 {
    let mut p_prev = 1.0;
    if n == 0 {
        return p_prev;
    }
    let mut p = x;
    for k in 1..n {
        let next = ((2 * k + 1) as f64 * x * p - k as f64 * p_prev) / (k + 1) as f64;
        p_prev = p;
        p = next;
    }
    p
}

/// Gauss-Legendre nodes and weights on [−1, 1], found by bracketing the
/// sign changes of P_n on a fine grid and bisecting each bracket. Weights
/// use the P_{n+1} form w = 2(1−x²)/((n+1)² P_{n+1}(x)²).
fn gauss_rule(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "quadrature order must be at least 1");
    let n = order;
    let mut nodes = Vec::with_capacity(n);
    let samples = 20 * n + 1;
    let mut prev_x = -1.0;
    let mut prev_p = legendre(n, prev_x);
    for k in 1..samples {
        let x = -1.0 + 2.0 * k as f64 / (samples - 1) as f64;
        let p = legendre(n, x);
        if prev_p == 0.0 {
            nodes.push(prev_x);
        } else if prev_p * p < 0.0 {
            let (mut lo, mut hi) = (prev_x, x);
            let mut f_lo = prev_p;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid == lo || mid == hi {
                    break;
                }
                let f_mid = legendre(n, mid);
                if f_lo * f_mid <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    f_lo = f_mid;
                }
            }
            nodes.push(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_p = p;
    }
    assert_eq!(nodes.len(), n, "expected {n} roots of the Legendre polynomial");
    let weights = nodes
        .iter()
        .map(|&x| {
            let p_next = legendre(n + 1, x);
            2.0 * (1.0 - x * x) / ((n + 1) as f64 * p_next).powi(2)
        })
        .collect();
    (nodes, weights)
}

/// Mean of the kernel over one cell pair by the tensor rule.
fn cell_average(
    kernel: &CollisionKernel,
    (alo, ahi): (f64, f64),
    (blo, bhi): (f64, f64),
    nodes: &[f64],
    weights: &[f64],
) -> f64 {
    let ha = 0.5 * (ahi - alo);
    let ma = 0.5 * (ahi + alo);
    let hb = 0.5 * (bhi - blo);
    let mb = 0.5 * (bhi + blo);
    let mut acc = 0.0;
    for (xa, wa) in nodes.iter().zip(weights) {
        let m = ma + ha * xa;
        let mut inner = 0.0;
        for (xb, wb) in nodes.iter().zip(weights) {
            let n = mb + hb * xb;
            // Quadrature nodes are strictly interior, so both volumes are
            // positive on any valid mesh.
            inner += wb * kernel.eval(m, n).expect("volumes inside cells are positive");
        }
        acc += wa * inner;
    }
    acc * 0.25
}

/// Re-derives dC/dt for one state straight from the scheme definition:
///
/// ```text
/// dC_a/dt = (1/Δ_a) Σ_j Σ_l K_{j,l} C_j C_l Δ_j Δ_l ∫ B(m, m_j, m_l) dm
///           − C_a Σ_j K_{a,j} C_j Δ_j
/// ```
///
/// where the birth integral runs over ]edges[a], edges[a+1]] cut to the
/// midpoint in the parent's own cell, and every K_{j,l} is recomputed by
/// quadrature of the given order on the spot. The partner volume passed to
/// the distribution is the partner cell's midpoint. Instances above
/// [`MAX_BRUTE_FORCE_CELLS`] cells are refused.
pub fn brute_force_rhs(
    state: &SolverState,
    kernel: &CollisionKernel,
    dist: &BreakageDistribution,
    mesh: &Mesh,
    quadrature_order: usize,
) -> Result<Vec<f64>> {
    let i = mesh.cells();
    if i > MAX_BRUTE_FORCE_CELLS {
        return Err(Error::InvalidArgument(format!(
            "instance too large for the brute-force oracle: {i} cells (limit \
             {MAX_BRUTE_FORCE_CELLS})"
        )));
    }
    if state.concentrations.len() != i {
        return Err(Error::DimensionMismatch {
            expected: i,
            got: state.concentrations.len(),
        });
    }
    if quadrature_order == 0 {
        return Err(Error::InvalidArgument(
            "quadrature order must be at least 1".into(),
        ));
    }

    let (nodes, weights) = gauss_rule(quadrature_order);
    let c = &state.concentrations;
    let edges = mesh.edges();
    let mid = mesh.midpoints();
    let w = mesh.widths();

    let mut birth = vec![0.0; i];
    let mut death = vec![0.0; i];
    for j in 0..i {
        for l in 0..i {
            let kjl = cell_average(
                kernel,
                (edges[j], edges[j + 1]),
                (edges[l], edges[l + 1]),
                &nodes,
                &weights,
            );
            death[j] += kjl * c[j] * (c[l] * w[l]);
            let pair_rate = kjl * (c[j] * w[j]) * (c[l] * w[l]);
            if pair_rate == 0.0 {
                continue;
            }
            for a in 0..=j {
                let upper = if a == j { mid[j] } else { edges[a + 1] };
                let window = dist.interval_integral(edges[a], upper, mid[j], mid[l])?;
                birth[a] += pair_rate * window;
            }
        }
    }

    let mut out = vec![0.0; i];
    for a in 0..i {
        out[a] = birth[a] / w[a] - death[a];
    }
    Ok(out)
}

/// One explicit Euler step driven by [`brute_force_rhs`], with the same
/// negativity floor and clamping as the production stepper.
pub fn oracle_euler_step(
    state: &SolverState,
    kernel: &CollisionKernel,
    dist: &BreakageDistribution,
    mesh: &Mesh,
    dt: f64,
    quadrature_order: usize,
) -> Result<SolverState> {
    if !dt.is_finite() || dt < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "step size must be finite and non-negative, got {dt}"
        )));
    }
    if dt == 0.0 {
        return Ok(state.clone());
    }
    let derivative = brute_force_rhs(state, kernel, dist, mesh, quadrature_order)?;
    let time = state.time + dt;
    let mut next = Vec::with_capacity(state.concentrations.len());
    for (cell, (&cv, &dv)) in state.concentrations.iter().zip(&derivative).enumerate() {
        let v = cv + dt * dv;
        if v < NEGATIVITY_FLOOR {
            return Err(Error::SchemeFailure {
                cell,
                value: v,
                time,
            });
        }
        next.push(if v < 0.0 { 0.0 } else { v });
    }
    Ok(SolverState {
        concentrations: next,
        time,
        step_index: state.step_index + 1,
    })
}

/// Integrates the semi-discrete system to `t_final` with classical
/// fourth-order Runge-Kutta at a small fixed step, as a time-accurate
/// reference on the same spatial discretization the solver uses.
///
/// Stages and the final combination are left unclamped so the reference is
/// the pure ODE solution. When a budget is given, `dt_small` must stay at or
/// below a tenth of its Euler bound, keeping the reference's own time error
/// negligible next to what it is used to measure.
pub fn rk4_reference_run(
    initial: &SolverState,
    kernel: &CollisionKernel,
    dist: &BreakageDistribution,
    mesh: &Mesh,
    t_final: f64,
    dt_small: f64,
    quadrature_order: usize,
    budget: Option<&StabilityBudget>,
) -> Result<SolverState> {
    if !t_final.is_finite() || t_final < initial.time {
        return Err(Error::InvalidArgument(format!(
            "final time {t_final} must be finite and not precede the state time {}",
            initial.time
        )));
    }
    if !dt_small.is_finite() || dt_small <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "reference step size must be finite and positive, got {dt_small}"
        )));
    }
    if let Some(b) = budget {
        let cap = b.dt_max / 10.0;
        if dt_small > cap * (1.0 + 1e-12) {
            return Err(Error::RejectedStep {
                dt: dt_small,
                dt_max: cap,
            });
        }
    }

    let disc = discretize(kernel, dist, mesh, quadrature_order)?;
    let derivative = |c: &[f64]| -> Result<Vec<f64>> {
        rhs(
            &SolverState::from_concentrations(c.to_vec(), 0.0),
            &disc,
            mesh,
        )
    };

    let span = t_final - initial.time;
    let n_full = (span / dt_small + 1e-12).floor() as u64;
    let remainder = span - n_full as f64 * dt_small;
    let tail = remainder > dt_small * 1e-9;

    let mut current = initial.clone();
    let advance = |state: &SolverState, dt: f64| -> Result<SolverState> {
        let c = &state.concentrations;
        let k1 = derivative(c)?;
        let stage = |base: &[f64], k: &[f64], h: f64| -> Vec<f64> {
            base.iter().zip(k).map(|(b, k)| b + h * k).collect()
        };
        let k2 = derivative(&stage(c, &k1, 0.5 * dt))?;
        let k3 = derivative(&stage(c, &k2, 0.5 * dt))?;
        let k4 = derivative(&stage(c, &k3, dt))?;
        let next = c
            .iter()
            .zip(&k1)
            .zip(&k2)
            .zip(&k3)
            .zip(&k4)
            .map(|((((c, k1), k2), k3), k4)| c + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
            .collect();
        Ok(SolverState {
            concentrations: next,
            time: state.time + dt,
            step_index: state.step_index + 1,
        })
    };

    for _ in 0..n_full {
        current = advance(&current, dt_small)?;
    }
    if tail {
        let dt_tail = t_final - current.time;
        current = advance(&current, dt_tail)?;
    }
    current.time = t_final;
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_matches_known_low_orders() {
        let (n2, w2) = gauss_rule(2);
        let r = 1.0 / 3f64.sqrt();
        assert!((n2[0] + r).abs() < 1e-14 && (n2[1] - r).abs() < 1e-14);
        assert!((w2[0] - 1.0).abs() < 1e-14 && (w2[1] - 1.0).abs() < 1e-14);

        let (n3, w3) = gauss_rule(3);
        assert!(n3[1].abs() < 1e-14);
        assert!((w3[1] - 8.0 / 9.0).abs() < 1e-13);
        let r = (0.6f64).sqrt();
        assert!((n3[2] - r).abs() < 1e-14);
    }

    #[test]
    fn gauss_rule_integrates_high_degree_polynomials() {
        for order in 1..=8usize {
            let (nodes, weights) = gauss_rule(order);
            let deg = 2 * order - 1;
            // ∫_{−1}^{1} x^deg dx = 0 for odd deg; check x^{deg−1} too.
            let even = deg - 1;
            let exact = 2.0 / (even as f64 + 1.0);
            let got: f64 = nodes
                .iter()
                .zip(&weights)
                .map(|(x, w)| w * x.powi(even as i32))
                .sum();
            assert!(
                (got - exact).abs() < 1e-13,
                "order {order} degree {even}: {got} vs {exact}"
            );
        }
    }

    #[test]
    fn brute_force_refuses_large_instances() {
        let mesh = Mesh::uniform(0.0, 1.0, 65).unwrap();
        let state = SolverState::from_concentrations(vec![1.0; 65], 0.0);
        let comb = BreakageDistribution::dirac_comb(vec![0.5], vec![2.0]).unwrap();
        let err = brute_force_rhs(
            &state,
            &CollisionKernel::Sum,
            &comb,
            &mesh,
            3,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn brute_force_reproduces_hand_computed_single_cell() {
        let mesh = Mesh::uniform(0.0, 1.0, 1).unwrap();
        let state = SolverState::from_concentrations(vec![0.7], 0.0);
        let comb = BreakageDistribution::dirac_comb(vec![0.4, 0.6], vec![1.0, 1.0]).unwrap();
        let d = brute_force_rhs(
            &state,
            &CollisionKernel::product(1.0).unwrap(),
            &comb,
            &mesh,
            4,
        )
        .unwrap();
        assert!((d[0] - 0.1225).abs() < 1e-14);
    }
}
