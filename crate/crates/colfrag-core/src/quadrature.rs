//! Gauss-Legendre quadrature on arbitrary intervals.
//!
//! Nodes and weights are computed once per order by Newton iteration on the
//! Legendre recurrence; an order-n rule integrates polynomials of degree
//! 2n−1 exactly, which is what the kernel cell-averaging relies on.

use crate::error::Error;
use crate::Result;

/// A fixed-order Gauss-Legendre rule on the reference interval [−1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule with `order` nodes (order ≥ 1).
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument(
                "quadrature order must be at least 1".into(),
            ));
        }
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let pairs = n / 2 + n % 2;
        for i in 0..pairs {
            // Chebyshev-based initial guess for the i-th positive root.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // Evaluate P_n and its derivative by the three-term recurrence.
                let mut p1 = 1.0;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    p1 = ((2 * j + 1) as f64 * x * p2 - j as f64 * p3) / (j + 1) as f64;
                }
                dp = n as f64 * (x * p1 - p2) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            // The middle root of an odd-order rule is exactly zero.
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    /// Number of nodes.
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// ∫_lo^hi f(m) dm.
    pub fn integrate(&self, lo: f64, hi: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Interval mean of f over [lo, hi].
    pub fn average(&self, lo: f64, hi: f64, f: impl FnMut(f64) -> f64) -> f64 {
        self.integrate(lo, hi, f) / (hi - lo)
    }

    /// Mean of f over the rectangle [alo, ahi] × [blo, bhi] (tensor rule).
    pub fn average_2d(
        &self,
        alo: f64,
        ahi: f64,
        blo: f64,
        bhi: f64,
        mut f: impl FnMut(f64, f64) -> f64,
    ) -> f64 {
        let ha = 0.5 * (ahi - alo);
        let ma = 0.5 * (ahi + alo);
        let hb = 0.5 * (bhi - blo);
        let mb = 0.5 * (bhi + blo);
        let mut acc = 0.0;
        for (xa, wa) in self.nodes.iter().zip(&self.weights) {
            let a = ma + ha * xa;
            let mut inner = 0.0;
            for (xb, wb) in self.nodes.iter().zip(&self.weights) {
                inner += wb * f(a, mb + hb * xb);
            }
            acc += wa * inner;
        }
        // Weights sum to 2 per axis, so the mean divides by 4.
        acc * 0.25
    }
}
