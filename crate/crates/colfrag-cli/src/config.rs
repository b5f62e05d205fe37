//! TOML run configuration: strict schema, validation, and construction of
//! the solver objects a config describes.
//!
//! Unknown keys anywhere in the file are rejected, as are structurally valid
//! but meaningless values (a safety factor outside (0, 1), study levels that
//! do not double, kernel parameters out of range). A config describes either
//! a single run or a refinement study; the presence of a `[study]` section
//! decides which.

use anyhow::{ensure, Context};
use colfrag_core::kernels::{BreakageDistribution, CollisionKernel};
use colfrag_core::mesh::Mesh;
use colfrag_core::solver::{stability_constant, SolverState, StabilityBudget};
use colfrag_core::diagnostics::moment;
use serde::{Deserialize, Serialize};

/// Quadrature order for projecting the initial density onto cell averages.
pub const INIT_QUADRATURE_ORDER: usize = 8;

/// Quadrature order for cell-averaging non-polynomial collision kernels.
pub const KERNEL_QUADRATURE_ORDER: usize = 4;

/// Default safety factor for the stability budget.
pub const DEFAULT_THETA: f64 = 0.5;

/// Default resolution factor for the automatic step policy.
pub const DEFAULT_AUTO_C: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub domain: DomainSection,
    pub mesh: MeshSection,
    pub kernel: KernelSection,
    pub breakage: BreakageSection,
    pub initial: InitialSection,
    pub time: TimeSection,
    #[serde(default)]
    pub stability: StabilitySection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub study: Option<StudySection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    pub kind: MeshKind,
    /// Cell count for single runs; studies take their counts from
    /// `[study] levels` instead.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cells: Option<usize>,
    /// Width growth factor, geometric meshes only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshKind {
    Uniform,
    Geometric,
}

/// Kernel selection. Deserialized as a flat struct rather than a tagged
/// enum so unknown keys are still rejected; which parameters each type
/// requires is enforced in [`build_kernel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSection {
    #[serde(rename = "type")]
    pub kind: KernelKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Product,
    Sum,
    PiecewiseH2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BreakageSection {
    #[serde(rename = "type")]
    pub kind: BreakageKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fractions: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BreakageKind {
    DiracComb,
    ConditionalUniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    #[serde(rename = "type")]
    pub kind: InitialKind,
    /// (volume, density) samples for tabulated data, strictly increasing in
    /// volume; densities interpolate linearly and extend flat beyond the
    /// sampled range.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    ExpDecay,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub t_final: f64,
    pub step: StepSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepSection {
    pub policy: StepPolicy,
    /// Step size, fixed policy only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    /// Resolution factor for the automatic policy: dt = min(c·h, dt_max).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Safety factor θ ∈ (0, 1) of the stability budget.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepPolicy {
    Fixed,
    Auto,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilitySection {
    /// Override for the fragment-density bound entering the budget. The
    /// intrinsic bounds (fragment count over the smallest cell for combs,
    /// 2/domain_min for the conditional-uniform density) are often so
    /// conservative that the budget underflows; the override substitutes a
    /// nominal value while the negativity guard still polices every step.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_sup: Option<f64>,
    /// Override for the collision-rate prefactor; built-in kernels derive
    /// it from their own parameters.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
    /// Record every k-th step in single runs (the final step is always
    /// recorded).
    #[serde(default = "default_observer_every")]
    pub observer_every: u64,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            path: None,
            format: OutputFormat::default(),
            observer_every: default_observer_every(),
        }
    }
}

fn default_observer_every() -> u64 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySection {
    /// Cell counts per refinement level; at least three, each double the
    /// previous.
    pub levels: Vec<usize>,
}

/// Whether a validated config describes one run or a refinement study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Single,
    Study,
}

/// A validated configuration and the mode it selects.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedConfig {
    pub file: ConfigFile,
    pub mode: Mode,
}

/// Parses and fully validates a TOML configuration.
pub fn parse_config(text: &str) -> anyhow::Result<ParsedConfig> {
    let file: ConfigFile = toml::from_str(text).context("malformed configuration")?;
    let mode = validate(&file)?;
    Ok(ParsedConfig { file, mode })
}

fn validate(file: &ConfigFile) -> anyhow::Result<Mode> {
    let d = &file.domain;
    ensure!(
        d.min.is_finite() && d.max.is_finite() && d.min >= 0.0 && d.min < d.max,
        "domain must satisfy 0 <= min < max, got [{}, {}]",
        d.min,
        d.max
    );

    match file.mesh.kind {
        MeshKind::Uniform => ensure!(
            file.mesh.ratio.is_none(),
            "mesh.ratio applies only to geometric meshes"
        ),
        MeshKind::Geometric => {
            let ratio = file
                .mesh
                .ratio
                .context("geometric meshes need mesh.ratio")?;
            ensure!(
                ratio.is_finite() && ratio > 0.0,
                "mesh.ratio must be positive and finite, got {ratio}"
            );
        }
    }
    if let Some(cells) = file.mesh.cells {
        ensure!(cells >= 1, "mesh.cells must be at least 1");
    }

    build_kernel(file)?;
    build_breakage(file)?;

    match file.initial.kind {
        InitialKind::ExpDecay => ensure!(
            file.initial.points.is_none(),
            "initial.points applies only to tabulated data"
        ),
        InitialKind::Tabulated => {
            let points = file
                .initial
                .points
                .as_ref()
                .context("tabulated initial data needs initial.points")?;
            ensure!(
                points.len() >= 2,
                "tabulated initial data needs at least two points"
            );
            for pair in points.windows(2) {
                ensure!(
                    pair[0][0] < pair[1][0],
                    "initial.points must be strictly increasing in volume"
                );
            }
            for p in points {
                ensure!(
                    p[0].is_finite() && p[1].is_finite() && p[1] >= 0.0,
                    "initial.points entries must be finite with non-negative density, got {p:?}"
                );
            }
        }
    }

    let t = &file.time;
    ensure!(
        t.t_final.is_finite() && t.t_final >= 0.0,
        "time.t_final must be finite and non-negative, got {}",
        t.t_final
    );
    if let Some(theta) = t.step.theta {
        ensure!(
            theta.is_finite() && theta > 0.0 && theta < 1.0,
            "time.step.theta must lie in (0, 1), got {theta}"
        );
    }
    match t.step.policy {
        StepPolicy::Fixed => {
            let value = t
                .step
                .value
                .context("the fixed step policy needs time.step.value")?;
            ensure!(
                value.is_finite() && value > 0.0,
                "time.step.value must be positive and finite, got {value}"
            );
            ensure!(
                t.step.c.is_none(),
                "time.step.c applies only to the auto policy"
            );
        }
        StepPolicy::Auto => {
            ensure!(
                t.step.value.is_none(),
                "time.step.value applies only to the fixed policy"
            );
            if let Some(c) = t.step.c {
                ensure!(
                    c.is_finite() && c > 0.0,
                    "time.step.c must be positive and finite, got {c}"
                );
            }
        }
    }

    if let Some(b) = file.stability.b_sup {
        ensure!(
            b.is_finite() && b > 0.0,
            "stability.b_sup must be positive and finite, got {b}"
        );
    }
    if let Some(l) = file.stability.lambda {
        ensure!(
            l.is_finite() && l > 0.0,
            "stability.lambda must be positive and finite, got {l}"
        );
    }

    ensure!(
        file.output.observer_every >= 1,
        "output.observer_every must be at least 1"
    );

    match &file.study {
        Some(study) => {
            ensure!(
                file.mesh.cells.is_none(),
                "mesh.cells and [study] are mutually exclusive; study levels set the cell counts"
            );
            ensure!(
                study.levels.len() >= 3,
                "a study needs at least three levels, got {}",
                study.levels.len()
            );
            ensure!(study.levels[0] >= 1, "study levels must be positive");
            for pair in study.levels.windows(2) {
                ensure!(
                    pair[1] == 2 * pair[0],
                    "study levels must double at every refinement, got {} after {}",
                    pair[1],
                    pair[0]
                );
            }
            Ok(Mode::Study)
        }
        None => {
            ensure!(
                file.mesh.cells.is_some(),
                "single runs need mesh.cells (or add a [study] section)"
            );
            Ok(Mode::Single)
        }
    }
}

/// Builds the mesh a config describes at a given cell count.
pub fn build_mesh(file: &ConfigFile, cells: usize) -> anyhow::Result<Mesh> {
    let mesh = match file.mesh.kind {
        MeshKind::Uniform => Mesh::uniform(file.domain.min, file.domain.max, cells),
        MeshKind::Geometric => Mesh::geometric(
            file.domain.min,
            file.domain.max,
            cells,
            file.mesh.ratio.context("geometric meshes need mesh.ratio")?,
        ),
    };
    Ok(mesh?)
}

/// Builds the collision kernel, enforcing that exactly the parameters the
/// chosen type uses are present.
pub fn build_kernel(file: &ConfigFile) -> anyhow::Result<CollisionKernel> {
    let k = &file.kernel;
    let forbid = |name: &str, v: Option<f64>, kind: &str| -> anyhow::Result<()> {
        ensure!(
            v.is_none(),
            "kernel.{name} is not used by the {kind} kernel"
        );
        Ok(())
    };
    match k.kind {
        KernelKind::Product => {
            let lambda = k.lambda.context("the product kernel needs kernel.lambda")?;
            forbid("alpha", k.alpha, "product")?;
            forbid("zeta", k.zeta, "product")?;
            forbid("eta", k.eta, "product")?;
            Ok(CollisionKernel::product(lambda)?)
        }
        KernelKind::Sum => {
            forbid("lambda", k.lambda, "sum")?;
            forbid("alpha", k.alpha, "sum")?;
            forbid("zeta", k.zeta, "sum")?;
            forbid("eta", k.eta, "sum")?;
            Ok(CollisionKernel::Sum)
        }
        KernelKind::PiecewiseH2 => {
            let lambda = k
                .lambda
                .context("the piecewise_h2 kernel needs kernel.lambda")?;
            let alpha = k
                .alpha
                .context("the piecewise_h2 kernel needs kernel.alpha")?;
            let zeta = k.zeta.context("the piecewise_h2 kernel needs kernel.zeta")?;
            let eta = k.eta.context("the piecewise_h2 kernel needs kernel.eta")?;
            Ok(CollisionKernel::piecewise_h2(lambda, alpha, zeta, eta)?)
        }
    }
}

/// Builds the breakage distribution, enforcing parameter presence per type.
pub fn build_breakage(file: &ConfigFile) -> anyhow::Result<BreakageDistribution> {
    let b = &file.breakage;
    match b.kind {
        BreakageKind::DiracComb => {
            let fractions = b
                .fractions
                .clone()
                .context("dirac_comb needs breakage.fractions")?;
            let weights = b
                .weights
                .clone()
                .context("dirac_comb needs breakage.weights")?;
            Ok(BreakageDistribution::dirac_comb(fractions, weights)?)
        }
        BreakageKind::ConditionalUniform => {
            ensure!(
                b.fractions.is_none() && b.weights.is_none(),
                "breakage.fractions/weights apply only to dirac_comb"
            );
            Ok(BreakageDistribution::ConditionalUniform)
        }
    }
}

/// The pointwise initial density a config describes.
pub fn initial_density(file: &ConfigFile) -> anyhow::Result<Box<dyn Fn(f64) -> f64>> {
    match file.initial.kind {
        InitialKind::ExpDecay => Ok(Box::new(|m: f64| (-m).exp())),
        InitialKind::Tabulated => {
            let points = file
                .initial
                .points
                .clone()
                .context("tabulated initial data needs initial.points")?;
            Ok(Box::new(move |m: f64| {
                let first = points[0];
                let last = points[points.len() - 1];
                if m <= first[0] {
                    return first[1];
                }
                if m >= last[0] {
                    return last[1];
                }
                let k = points.partition_point(|p| p[0] < m);
                let (lo, hi) = (points[k - 1], points[k]);
                let t = (m - lo[0]) / (hi[0] - lo[0]);
                lo[1] + t * (hi[1] - lo[1])
            }))
        }
    }
}

/// Collision-rate prefactor entering the stability budget: the explicit
/// `[stability] lambda` override if present, else the kernel's own.
pub fn effective_lambda(file: &ConfigFile, kernel: &CollisionKernel) -> anyhow::Result<f64> {
    if let Some(l) = file.stability.lambda {
        return Ok(l);
    }
    kernel
        .effective_lambda()
        .context("this kernel has no intrinsic rate prefactor; set stability.lambda")
}

/// Fragment-density bound entering the budget: the `[stability] b_sup`
/// override if present, else the intrinsic bound of the distribution on
/// this mesh.
pub fn resolve_b_sup(file: &ConfigFile, mesh: &Mesh) -> anyhow::Result<f64> {
    if let Some(b) = file.stability.b_sup {
        return Ok(b);
    }
    match file.breakage.kind {
        BreakageKind::DiracComb => {
            // Point fragments have no bounded density; the sharpest usable
            // surrogate spreads the total fragment count over the smallest
            // cell.
            let total: f64 = file
                .breakage
                .weights
                .as_ref()
                .map(|w| w.iter().sum())
                .unwrap_or(0.0);
            let h_min = mesh
                .widths()
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            Ok(total / h_min)
        }
        BreakageKind::ConditionalUniform => {
            ensure!(
                mesh.domain_min() > 0.0,
                "the conditional-uniform density is unbounded on a domain reaching 0; \
                 set stability.b_sup explicitly"
            );
            Ok(2.0 / mesh.domain_min())
        }
    }
}

/// Assembles the stability budget for a run of the configured horizon from
/// the initial state's norms.
pub fn build_budget(
    file: &ConfigFile,
    mesh: &Mesh,
    initial: &SolverState,
) -> anyhow::Result<StabilityBudget> {
    let kernel = build_kernel(file)?;
    let lambda = effective_lambda(file, &kernel)?;
    let b_sup = resolve_b_sup(file, mesh)?;
    let l1 = moment(initial, mesh, 0);
    let m1 = moment(initial, mesh, 1);
    let theta = file.time.step.theta.unwrap_or(DEFAULT_THETA);
    Ok(stability_constant(
        lambda,
        mesh.domain_max(),
        l1,
        b_sup,
        m1,
        file.time.t_final,
        theta,
    )?)
}

/// Chooses the run step size: the configured fixed value (rejected here,
/// before any stepping, if it exceeds the budget), or min(c·h, dt_max) for
/// the automatic policy.
pub fn choose_dt(file: &ConfigFile, mesh: &Mesh, budget: &StabilityBudget) -> anyhow::Result<f64> {
    match file.time.step.policy {
        StepPolicy::Fixed => {
            let value = file
                .time
                .step
                .value
                .context("the fixed step policy needs time.step.value")?;
            ensure!(
                value <= budget.dt_max * (1.0 + 1e-12),
                "fixed step {value} exceeds the stability budget dt_max = {}",
                budget.dt_max
            );
            Ok(value)
        }
        StepPolicy::Auto => {
            let c = file.time.step.c.unwrap_or(DEFAULT_AUTO_C);
            Ok((c * mesh.h_max()).min(budget.dt_max))
        }
    }
}
