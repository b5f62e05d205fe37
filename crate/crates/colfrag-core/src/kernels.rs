//! Collision kernels, breakage distributions, and their finite-volume
//! discretization.
//!
//! A collision kernel K(m, n) sets the rate at which particles of volumes m
//! and n collide. A breakage distribution B(m, n, z) describes the fragments
//! of volume m produced when a particle of volume n breaks after colliding
//! with a particle of volume z; its defining property is that fragment mass
//! integrates back to the parent: ∫₀ⁿ m·B(m, n, z) dm = n.
//!
//! [`discretize`] turns both into the per-cell tables the solver consumes:
//! cell-averaged collision values K_{a,j} and, for each parent cell j (and
//! partner l where B depends on it), the window integrals of B over each
//! receiving cell. The window of cell a is ]edges[a], p], where p is the
//! cell's upper edge, except for the parent's own cell, where the window is
//! cut at the midpoint so no fragment outgrows its parent's representative
//! volume.

use std::fmt;
use std::sync::Arc;

use crate::error::Error;
use crate::mesh::Mesh;
use crate::quadrature::GaussLegendre;
use crate::Result;

/// Tolerance for the fragment-mass identity Σ wᵢ·fᵢ = 1 at construction.
const MASS_IDENTITY_TOL: f64 = 1e-12;

type PointwiseKernel = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type PointwiseDensity = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
type IntervalIntegral = Arc<dyn Fn(f64, f64, f64, f64) -> f64 + Send + Sync>;

/// Collision rate K(m, n) between particle volumes m and n.
#[derive(Clone)]
pub enum CollisionKernel {
    /// K = λ·m·n.
    Product { lambda: f64 },
    /// K = m + n.
    Sum,
    /// Four-branch kernel switching at volume 1:
    /// λmn (both < 1), λmn^{−α} (m < 1 ≤ n), λm^{−α}n (n < 1 ≤ m),
    /// λ(m^ζ n^η + m^η n^ζ) (both ≥ 1). The boundary joins the last branch.
    PiecewiseH2 {
        lambda: f64,
        alpha: f64,
        zeta: f64,
        eta: f64,
    },
    /// User-supplied pointwise rate.
    Custom(PointwiseKernel),
}

impl fmt::Debug for CollisionKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Product { lambda } => write!(f, "Product {{ lambda: {lambda} }}"),
            Self::Sum => write!(f, "Sum"),
            Self::PiecewiseH2 {
                lambda,
                alpha,
                zeta,
                eta,
            } => write!(
                f,
                "PiecewiseH2 {{ lambda: {lambda}, alpha: {alpha}, zeta: {zeta}, eta: {eta} }}"
            ),
            Self::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl CollisionKernel {
    /// K = λ·m·n with λ > 0.
    pub fn product(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "product kernel needs lambda > 0, got {lambda}"
            )));
        }
        Ok(Self::Product { lambda })
    }

    /// Four-branch kernel; requires 0 < ζ ≤ η ≤ 1, ζ+η ≤ 1, α ≥ 0, λ > 0.
    pub fn piecewise_h2(lambda: f64, alpha: f64, zeta: f64, eta: f64) -> Result<Self> {
        let ok = lambda.is_finite()
            && lambda > 0.0
            && alpha.is_finite()
            && alpha >= 0.0
            && zeta.is_finite()
            && eta.is_finite()
            && zeta > 0.0
            && zeta <= eta
            && eta <= 1.0
            && zeta + eta <= 1.0;
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "piecewise kernel needs 0 < zeta <= eta <= 1, zeta+eta <= 1, \
                 alpha >= 0, lambda > 0; got lambda={lambda} alpha={alpha} \
                 zeta={zeta} eta={eta}"
            )));
        }
        Ok(Self::PiecewiseH2 {
            lambda,
            alpha,
            zeta,
            eta,
        })
    }

    /// Wraps a user-supplied pointwise rate function.
    pub fn custom(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Custom(Arc::new(f))
    }

    /// Evaluates K(m, n) for positive volumes.
    pub fn eval(&self, m: f64, n: f64) -> Result<f64> {
        if !(m > 0.0) || !(n > 0.0) || !m.is_finite() || !n.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "collision kernel arguments must be positive volumes, got ({m}, {n})"
            )));
        }
        Ok(self.eval_unchecked(m, n))
    }

    pub(crate) fn eval_unchecked(&self, m: f64, n: f64) -> f64 {
        match self {
            Self::Product { lambda } => lambda * m * n,
            Self::Sum => m + n,
            Self::PiecewiseH2 {
                lambda,
                alpha,
                zeta,
                eta,
            } => match (m < 1.0, n < 1.0) {
                (true, true) => lambda * m * n,
                (true, false) => lambda * m * n.powf(-alpha),
                (false, true) => lambda * m.powf(-alpha) * n,
                (false, false) => lambda * (m.powf(*zeta) * n.powf(*eta) + m.powf(*eta) * n.powf(*zeta)),
            },
            Self::Custom(f) => f(m, n),
        }
    }

    /// Whether K(m, n) = K(n, m) holds by construction.
    pub fn is_symmetric(&self) -> bool {
        !matches!(self, Self::Custom(_))
    }

    /// The rate prefactor λ entering the stability constant, when the
    /// variant defines one. The sum kernel m+n is the large-volume branch
    /// shape at λ = 1 (m + n bounds m^ζ n^η + m^η n^ζ for ζ+η = 1).
    pub fn effective_lambda(&self) -> Option<f64> {
        match self {
            Self::Product { lambda } => Some(*lambda),
            Self::Sum => Some(1.0),
            Self::PiecewiseH2 { lambda, .. } => Some(*lambda),
            Self::Custom(_) => None,
        }
    }
}

/// Fragment distribution B(m, n, z) for a parent n colliding with z.
#[derive(Clone)]
pub enum BreakageDistribution {
    /// Point fragments at fixed parent fractions: B = Σᵢ wᵢ·δ(m − fᵢ·n).
    DiracComb { fractions: Vec<f64>, weights: Vec<f64> },
    /// Uniform fragment density 2/n when the parent is the larger collider
    /// (n > z); the parent survives intact (δ(m − n)) when n ≤ z.
    ConditionalUniform,
    /// User-supplied bounded density with its exact interval integral
    /// ∫_lower^upper B(m, n, z) dm.
    Custom {
        density: PointwiseDensity,
        interval: IntervalIntegral,
    },
}

impl fmt::Debug for BreakageDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DiracComb { fractions, weights } => write!(
                f,
                "DiracComb {{ fractions: {fractions:?}, weights: {weights:?} }}"
            ),
            Self::ConditionalUniform => write!(f, "ConditionalUniform"),
            Self::Custom { .. } => write!(f, "Custom(..)"),
        }
    }
}

impl BreakageDistribution {
    /// Comb of point fragments at parent fractions `fractions` with weights
    /// `weights`. Construction enforces the fragment-mass identity
    /// Σᵢ wᵢ·fᵢ = 1 (each collision redistributes exactly the parent mass)
    /// and 0 < fᵢ ≤ 1.
    pub fn dirac_comb(fractions: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if fractions.is_empty() || fractions.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "comb needs matching non-empty fraction/weight lists, got {} and {}",
                fractions.len(),
                weights.len()
            )));
        }
        for (&fr, &w) in fractions.iter().zip(&weights) {
            if !fr.is_finite() || fr <= 0.0 || fr > 1.0 {
                return Err(Error::InvalidArgument(format!(
                    "comb fractions must lie in ]0, 1], got {fr}"
                )));
            }
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "comb weights must be positive, got {w}"
                )));
            }
        }
        let mass: f64 = fractions.iter().zip(&weights).map(|(f, w)| f * w).sum();
        if (mass - 1.0).abs() > MASS_IDENTITY_TOL {
            return Err(Error::InvalidArgument(format!(
                "comb fragment mass must equal the parent mass: sum w*f = {mass}"
            )));
        }
        Ok(Self::DiracComb { fractions, weights })
    }

    /// Wraps a user-supplied density and its exact interval integral.
    pub fn custom(
        density: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        interval: impl Fn(f64, f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::Custom {
            density: Arc::new(density),
            interval: Arc::new(interval),
        }
    }

    /// Exact ∫_lower^upper B(m, n, z) dm with the same half-open window
    /// convention as cells: a point fragment sitting exactly on `lower` is
    /// excluded, one on `upper` is included.
    pub fn interval_integral(&self, lower: f64, upper: f64, n: f64, z: f64) -> Result<f64> {
        if lower > upper {
            return Err(Error::InvalidArgument(format!(
                "integration window is inverted: [{lower}, {upper}]"
            )));
        }
        if !(n > 0.0) || !(z > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "parent and partner volumes must be positive, got ({n}, {z})"
            )));
        }
        Ok(match self {
            Self::DiracComb { fractions, weights } => {
                let mut acc = 0.0;
                for (&fr, &w) in fractions.iter().zip(weights) {
                    let site = fr * n;
                    if site > lower && site <= upper {
                        acc += w;
                    }
                }
                acc
            }
            Self::ConditionalUniform => {
                if n > z {
                    2.0 * (upper.min(n) - lower.min(n)).max(0.0) / n
                } else if n > lower && n <= upper {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Custom { interval, .. } => interval(lower, upper, n, z),
        })
    }

    /// ∫₀ⁿ m·B(m, n, z) dm, the fragment mass of one breakup; equals n for
    /// every distribution honoring the mass identity. Built-in variants are
    /// evaluated analytically; custom ones by high-order quadrature of the
    /// supplied density (meaningful only for bounded densities).
    pub fn mass_check(&self, n: f64, z: f64) -> f64 {
        debug_assert!(n > 0.0 && z > 0.0);
        match self {
            Self::DiracComb { fractions, weights } => fractions
                .iter()
                .zip(weights)
                .map(|(fr, w)| w * fr * n)
                .sum(),
            Self::ConditionalUniform => {
                if n > z {
                    // ∫₀ⁿ m·(2/n) dm
                    (2.0 / n) * (n * n / 2.0)
                } else {
                    // The delta at m = n sifts to the parent volume.
                    n
                }
            }
            Self::Custom { density, .. } => {
                let quad = GaussLegendre::new(64).expect("fixed order is valid");
                quad.integrate(0.0, n, |m| m * density(m, n, z))
            }
        }
    }
}

/// Sparse per-cell birth weights: a row is the list of (receiving cell,
/// window integral of B) for one parent cell.
type SparseRow = Vec<(usize, f64)>;

/// Precomputed birth-weight tables, laid out by how B depends on the
/// collision partner.
#[derive(Debug, Clone)]
pub enum BirthTable {
    /// B ignores the partner volume (point-fragment combs): one row per
    /// parent cell j.
    SharedPerParent(Vec<SparseRow>),
    /// B switches on parent vs partner size (conditional-uniform): one row
    /// per parent cell for partners strictly below it, one for the rest.
    SplitByPartner {
        smaller_partner: Vec<SparseRow>,
        larger_or_equal_partner: Vec<SparseRow>,
    },
    /// Fully general: a row per (parent cell, partner cell) pair.
    PerPair(Vec<Vec<SparseRow>>),
}

/// Cell-averaged collision values and birth-weight tables on one mesh.
#[derive(Debug, Clone)]
pub struct DiscreteKernels {
    cells: usize,
    k_cells: Vec<f64>,
    birth: BirthTable,
}

impl DiscreteKernels {
    /// Number of cells the tables were built for.
    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Cell-averaged collision value K_{a,j}.
    pub fn k(&self, a: usize, j: usize) -> f64 {
        self.k_cells[a * self.cells + j]
    }

    /// Row-major I×I matrix of cell-averaged collision values.
    pub fn k_matrix(&self) -> &[f64] {
        &self.k_cells
    }

    /// Birth-weight row for parent cell j colliding with partner cell l:
    /// entries (a, ∫ B over cell a's window).
    pub fn birth_row(&self, j: usize, l: usize) -> &[(usize, f64)] {
        match &self.birth {
            BirthTable::SharedPerParent(rows) => &rows[j],
            BirthTable::SplitByPartner {
                smaller_partner,
                larger_or_equal_partner,
            } => {
                if l < j {
                    &smaller_partner[j]
                } else {
                    &larger_or_equal_partner[j]
                }
            }
            BirthTable::PerPair(table) => &table[j][l],
        }
    }

    pub(crate) fn birth_table(&self) -> &BirthTable {
        &self.birth
    }
}

/// Upper window limit for fragments of parent cell j received by cell a:
/// the receiving cell's upper edge, cut to the midpoint in the parent's own
/// cell.
fn window_upper(mesh: &Mesh, a: usize, j: usize) -> f64 {
    if a == j {
        mesh.midpoints()[j]
    } else {
        mesh.edges()[a + 1]
    }
}

/// Builds the per-cell tables for one kernel/distribution pair on a mesh.
///
/// Collision averages use exact centroid formulas for the product and sum
/// kernels (both are polynomial, so the average factorizes) and tensor
/// Gauss-Legendre of `quadrature_order` otherwise. Birth weights are window
/// integrals of B, which are exact for every built-in distribution.
pub fn discretize(
    kernel: &CollisionKernel,
    dist: &BreakageDistribution,
    mesh: &Mesh,
    quadrature_order: usize,
) -> Result<DiscreteKernels> {
    let i = mesh.cells();
    let mid = mesh.midpoints();
    let edges = mesh.edges();

    let mut k_cells = vec![0.0; i * i];
    match kernel {
        CollisionKernel::Product { lambda } => {
            // The average of m·n over a cell pair is the product of the
            // cell centroids, which for an interval is its midpoint. The
            // grouping keeps the table bitwise symmetric.
            for a in 0..i {
                for j in 0..i {
                    k_cells[a * i + j] = lambda * (mid[a] * mid[j]);
                }
            }
        }
        CollisionKernel::Sum => {
            for a in 0..i {
                for j in 0..i {
                    k_cells[a * i + j] = mid[a] + mid[j];
                }
            }
        }
        _ => {
            let quad = GaussLegendre::new(quadrature_order)?;
            if kernel.is_symmetric() {
                for a in 0..i {
                    for j in a..i {
                        let v = quad.average_2d(edges[a], edges[a + 1], edges[j], edges[j + 1], |m, n| {
                            kernel.eval_unchecked(m, n)
                        });
                        k_cells[a * i + j] = v;
                        k_cells[j * i + a] = v;
                    }
                }
            } else {
                for a in 0..i {
                    for j in 0..i {
                        k_cells[a * i + j] = quad.average_2d(
                            edges[a],
                            edges[a + 1],
                            edges[j],
                            edges[j + 1],
                            |m, n| kernel.eval_unchecked(m, n),
                        );
                    }
                }
            }
        }
    }

    let birth = match dist {
        BreakageDistribution::DiracComb { .. } => {
            let mut rows = Vec::with_capacity(i);
            for j in 0..i {
                let mut row = SparseRow::new();
                for a in 0..=j {
                    // Comb weights ignore the partner volume.
                    let w = dist.interval_integral(edges[a], window_upper(mesh, a, j), mid[j], mid[j])?;
                    if w != 0.0 {
                        row.push((a, w));
                    }
                }
                rows.push(row);
            }
            BirthTable::SharedPerParent(rows)
        }
        BreakageDistribution::ConditionalUniform => {
            let mut smaller = Vec::with_capacity(i);
            let mut larger = Vec::with_capacity(i);
            for j in 0..i {
                let mut row_s = SparseRow::new();
                let mut row_l = SparseRow::new();
                for a in 0..=j {
                    let upper = window_upper(mesh, a, j);
                    // Any partner volume strictly below the parent picks the
                    // uniform-density branch; the midpoint of the parent's
                    // half-cell is a valid representative.
                    let w = dist.interval_integral(edges[a], upper, mid[j], 0.5 * mid[j])?;
                    if w != 0.0 {
                        row_s.push((a, w));
                    }
                    let w = dist.interval_integral(edges[a], upper, mid[j], mid[j])?;
                    if w != 0.0 {
                        row_l.push((a, w));
                    }
                }
                smaller.push(row_s);
                larger.push(row_l);
            }
            BirthTable::SplitByPartner {
                smaller_partner: smaller,
                larger_or_equal_partner: larger,
            }
        }
        BreakageDistribution::Custom { .. } => {
            let mut table = Vec::with_capacity(i);
            for j in 0..i {
                let mut per_l = Vec::with_capacity(i);
                for l in 0..i {
                    let mut row = SparseRow::new();
                    for a in 0..=j {
                        let w = dist.interval_integral(
                            edges[a],
                            window_upper(mesh, a, j),
                            mid[j],
                            mid[l],
                        )?;
                        if w != 0.0 {
                            row.push((a, w));
                        }
                    }
                    per_l.push(row);
                }
                table.push(per_l);
            }
            BirthTable::PerPair(table)
        }
    };

    Ok(DiscreteKernels {
        cells: i,
        k_cells,
        birth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comb_40_60() -> BreakageDistribution {
        BreakageDistribution::dirac_comb(vec![0.4, 0.6], vec![1.0, 1.0]).unwrap()
    }

    #[test]
    fn product_and_sum_evaluate_exactly() {
        let product = CollisionKernel::product(1.0).unwrap();
        assert_eq!(product.eval(0.5, 0.5).unwrap(), 0.25);
        assert_eq!(CollisionKernel::Sum.eval(2.0, 3.0).unwrap(), 5.0);
    }

    #[test]
    fn piecewise_branches() {
        let k = CollisionKernel::piecewise_h2(1.0, 1.0, 0.5, 0.5).unwrap();
        // Both large: lambda*(m^z n^e + m^e n^z).
        assert!((k.eval(4.0, 9.0).unwrap() - 12.0).abs() < 1e-12);
        // Both small: lambda*m*n.
        assert!((k.eval(0.5, 0.25).unwrap() - 0.125).abs() < 1e-15);
        // Mixed: the power alpha=1 inverts the large argument.
        assert!((k.eval(0.5, 4.0).unwrap() - 0.125).abs() < 1e-15);
        assert!((k.eval(4.0, 0.5).unwrap() - 0.125).abs() < 1e-15);
        // Volume exactly 1 joins the large branch.
        assert!((k.eval(1.0, 1.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn piecewise_parameters_validated() {
        assert!(CollisionKernel::piecewise_h2(1.0, 1.0, 0.0, 0.5).is_err());
        assert!(CollisionKernel::piecewise_h2(1.0, 1.0, 0.6, 0.5).is_err());
        assert!(CollisionKernel::piecewise_h2(1.0, 1.0, 0.6, 0.6).is_err());
        assert!(CollisionKernel::piecewise_h2(0.0, 1.0, 0.4, 0.5).is_err());
        assert!(CollisionKernel::piecewise_h2(1.0, -0.1, 0.4, 0.5).is_err());
    }

    #[test]
    fn nonpositive_volumes_rejected() {
        let k = CollisionKernel::Sum;
        assert!(k.eval(0.0, 1.0).is_err());
        assert!(k.eval(1.0, -2.0).is_err());
    }

    #[test]
    fn comb_construction_enforces_mass_identity() {
        assert!(BreakageDistribution::dirac_comb(vec![0.4, 0.6], vec![1.0, 1.0]).is_ok());
        assert!(BreakageDistribution::dirac_comb(vec![0.5], vec![2.0]).is_ok());
        assert!(BreakageDistribution::dirac_comb(vec![0.4, 0.6], vec![1.0, 0.9]).is_err());
        assert!(BreakageDistribution::dirac_comb(vec![1.5], vec![1.0]).is_err());
        assert!(BreakageDistribution::dirac_comb(vec![], vec![]).is_err());
    }

    #[test]
    fn comb_interval_counts_sites_half_open() {
        let comb = comb_40_60();
        assert_eq!(comb.interval_integral(0.3, 0.5, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(comb.interval_integral(0.0, 1.0, 1.0, 1.0).unwrap(), 2.0);
        // Site on the lower bound is excluded, on the upper included.
        assert_eq!(comb.interval_integral(0.4, 0.6, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(comb.interval_integral(0.39, 0.4, 1.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn conditional_uniform_interval_branches() {
        let cu = BreakageDistribution::ConditionalUniform;
        // Larger parent: density 2/n over ]0, n].
        assert_eq!(cu.interval_integral(0.0, 2.0, 2.0, 1.0).unwrap(), 2.0);
        assert_eq!(cu.interval_integral(0.0, 1.0, 2.0, 1.0).unwrap(), 1.0);
        // Window beyond the parent contributes nothing.
        assert_eq!(cu.interval_integral(2.0, 5.0, 2.0, 1.0).unwrap(), 0.0);
        // Smaller-or-equal parent survives as a point mass at n.
        assert_eq!(cu.interval_integral(0.5, 1.5, 1.0, 2.0).unwrap(), 1.0);
        assert_eq!(cu.interval_integral(1.0, 1.5, 1.0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn mass_check_returns_parent_volume() {
        let comb = comb_40_60();
        assert!((comb.mass_check(5.0, 1.0) - 5.0).abs() < 1e-12);
        let cu = BreakageDistribution::ConditionalUniform;
        assert!((cu.mass_check(3.0, 1.0) - 3.0).abs() < 1e-12);
        assert!((cu.mass_check(1.0, 2.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn discretize_product_uses_midpoints() {
        let mesh = Mesh::uniform(0.0, 1.0, 2).unwrap();
        let disc = discretize(
            &CollisionKernel::product(1.0).unwrap(),
            &comb_40_60(),
            &mesh,
            4,
        )
        .unwrap();
        assert!((disc.k(0, 1) - 0.25 * 0.75).abs() < 1e-15);
        assert!((disc.k(1, 0) - disc.k(0, 1)).abs() < 1e-15);
    }

    #[test]
    fn discretize_sum_on_two_cells() {
        let mesh = Mesh::uniform(0.0, 1.0, 2).unwrap();
        let disc = discretize(&CollisionKernel::Sum, &comb_40_60(), &mesh, 4).unwrap();
        assert!((disc.k(0, 1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn own_cell_window_cuts_at_midpoint() {
        // Four cells on [0, 1]; the last parent's sites 0.35 and 0.525 both
        // fall below its own window ]0.75, 0.875], so the row has no
        // self-cell entry.
        let mesh = Mesh::uniform(0.0, 1.0, 4).unwrap();
        let disc = discretize(
            &CollisionKernel::product(1.0).unwrap(),
            &comb_40_60(),
            &mesh,
            4,
        )
        .unwrap();
        let row = disc.birth_row(3, 0);
        assert!(row.iter().all(|&(a, _)| a != 3), "row: {row:?}");
        // The sites land in cells ]0.25,0.5] and ]0.5,0.75].
        assert_eq!(row, &[(1, 1.0), (2, 1.0)]);
    }

    #[test]
    fn quadrature_matches_analytic_average_for_polynomial_kernels() {
        let mesh = Mesh::geometric(0.1, 3.0, 5, 1.4).unwrap();
        let analytic = discretize(&CollisionKernel::Sum, &comb_40_60(), &mesh, 2).unwrap();
        let via_quad = {
            let quad = GaussLegendre::new(3).unwrap();
            let e = mesh.edges();
            let mut vals = vec![0.0; 25];
            for a in 0..5 {
                for j in 0..5 {
                    vals[a * 5 + j] =
                        quad.average_2d(e[a], e[a + 1], e[j], e[j + 1], |m, n| m + n);
                }
            }
            vals
        };
        for a in 0..5 {
            for j in 0..5 {
                let x = analytic.k(a, j);
                let y = via_quad[a * 5 + j];
                assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
            }
        }
    }
}
