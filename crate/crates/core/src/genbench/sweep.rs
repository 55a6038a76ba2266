use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generator::{generate_instance, GeneratorParams, Instance, NoiseMode};
use crate::error::{invalid, Result};
use crate::pipeline::{default_eta_grid, optimal_cluster, recommended_eta, ClusterOutcome};
use crate::splitter::SolverConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisName {
    /// Disagreements per node (fixed per-node noise).
    B,
    /// Equal cluster size; `n` must be divisible by it.
    Kmin,
    Tau,
    P0,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: AxisName,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TemplateMode {
    #[default]
    Bernoulli,
    Fixed,
}

/// Generator parameters shared by every cell; the axes override fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTemplate {
    pub n: usize,
    /// Explicit cluster sizes, required unless one axis is `kmin`.
    #[serde(default)]
    pub sizes: Option<Vec<usize>>,
    #[serde(default)]
    pub mode: TemplateMode,
    #[serde(default)]
    pub tau: f64,
    #[serde(default = "one")]
    pub p0: f64,
    #[serde(default)]
    pub b: usize,
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSolver {
    /// Defaults to `0.01, 0.02, ..., 0.99`.
    #[serde(default)]
    pub eta_grid: Option<Vec<f64>>,
    /// Try `1 / (1 + sqrt(n p0))` before the grid.
    #[serde(default = "yes")]
    pub recommended_first: bool,
    #[serde(default)]
    pub max_iters: Option<usize>,
    #[serde(default)]
    pub tol_rel: Option<f64>,
}

impl Default for SweepSolver {
    fn default() -> Self {
        Self { eta_grid: None, recommended_first: true, max_iters: None, tol_rel: None }
    }
}

/// A two-axis success-rate experiment, usually read from TOML:
///
/// ```toml
/// trials = 10
/// seed = 7
/// [x]
/// name = "b"
/// values = [2, 6, 10, 14]
/// [y]
/// name = "kmin"
/// values = [25, 50, 100]
/// [template]
/// n = 200
/// mode = "fixed"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub trials: usize,
    pub seed: u64,
    pub x: Axis,
    pub y: Axis,
    pub template: SweepTemplate,
    #[serde(default)]
    pub solver: SweepSolver,
}

/// Mixes the master seed, cell index and trial index with splitmix64, so
/// every trial has an independent stream regardless of execution order.
pub fn cell_seed(master: u64, cell: usize, trial: usize) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    mix(mix(mix(master) ^ cell as u64) ^ trial as u64)
}

impl SweepSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: SweepSpec = toml::from_str(text).map_err(|e| invalid(format!("sweep spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("sweep spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(invalid("trials must be positive"));
        }
        if self.x.name == self.y.name {
            return Err(invalid("the two axes must name different parameters"));
        }
        if self.x.values.is_empty() || self.y.values.is_empty() {
            return Err(invalid("axes need at least one value"));
        }
        if self.template.sizes.is_none() && self.x.name != AxisName::Kmin && self.y.name != AxisName::Kmin {
            return Err(invalid("template.sizes is required unless an axis is kmin"));
        }
        if let Some(grid) = &self.solver.eta_grid {
            if grid.is_empty() || grid.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
                return Err(invalid("solver.eta_grid must be a non-empty list in (0, 1)"));
            }
        }
        for xi in 0..self.x.values.len() {
            for yi in 0..self.y.values.len() {
                self.cell_params(xi, yi, 0)?.validate()?;
            }
        }
        Ok(())
    }

    fn cells(&self) -> usize {
        self.x.values.len() * self.y.values.len()
    }

    /// Generator parameters of trial `trial` in cell `(xi, yi)`.
    pub fn cell_params(&self, xi: usize, yi: usize, trial: usize) -> Result<GeneratorParams> {
        let t = &self.template;
        let mut sizes = t.sizes.clone();
        let (mut tau, mut p0, mut b, mut fixed) = (t.tau, t.p0, t.b, t.mode == TemplateMode::Fixed);
        for (axis, v) in [(&self.x, self.x.values[xi]), (&self.y, self.y.values[yi])] {
            let as_count = |what: &str| -> Result<usize> {
                if v < 0.0 || v.fract() != 0.0 {
                    return Err(invalid(format!("{what} axis value {v} is not a non-negative integer")));
                }
                Ok(v as usize)
            };
            match axis.name {
                AxisName::B => {
                    b = as_count("b")?;
                    fixed = true;
                }
                AxisName::Kmin => {
                    let k = as_count("kmin")?;
                    if k == 0 || t.n % k != 0 {
                        return Err(invalid(format!("kmin = {k} does not divide n = {}", t.n)));
                    }
                    sizes = Some(vec![k; t.n / k]);
                }
                AxisName::Tau => tau = v,
                AxisName::P0 => p0 = v,
            }
        }
        let sizes = sizes.ok_or_else(|| invalid("cluster sizes unresolved"))?;
        if sizes.iter().sum::<usize>() != t.n {
            return Err(invalid(format!("cluster sizes do not sum to n = {}", t.n)));
        }
        let cell = yi * self.x.values.len() + xi;
        Ok(GeneratorParams {
            sizes,
            tau,
            p0,
            seed: cell_seed(self.seed, cell, trial),
            mode: if fixed { NoiseMode::FixedPerNode(b) } else { NoiseMode::BernoulliFlips },
        })
    }

    /// Eta values tried for an instance with `n` nodes observed at rate `p0`.
    pub fn eta_grid(&self, n: usize, p0: f64) -> Result<Vec<f64>> {
        let mut grid = Vec::new();
        if self.solver.recommended_first {
            grid.push(recommended_eta(n, p0)?);
        }
        grid.extend(self.solver.eta_grid.clone().unwrap_or_else(default_eta_grid));
        Ok(grid)
    }

    pub fn solver_config(&self) -> SolverConfig {
        let mut cfg = SolverConfig::default();
        if let Some(m) = self.solver.max_iters {
            cfg.max_iters = m;
        }
        if let Some(t) = self.solver.tol_rel {
            cfg.tol_rel = t;
        }
        cfg
    }
}

/// Success counts laid out as `successes[yi][xi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub x: Axis,
    pub y: Axis,
    pub trials: usize,
    pub successes: Vec<Vec<usize>>,
}

impl SweepResult {
    pub fn rate(&self, xi: usize, yi: usize) -> f64 {
        self.successes[yi][xi] as f64 / self.trials as f64
    }

    /// Rates as `rates[yi][xi]`.
    pub fn rates(&self) -> Vec<Vec<f64>> {
        (0..self.y.values.len()).map(|yi| (0..self.x.values.len()).map(|xi| self.rate(xi, yi)).collect()).collect()
    }

    /// Header row of x values, first column of y values, cells are rates.
    pub fn to_csv(&self) -> String {
        let name = |n: AxisName| match n {
            AxisName::B => "b",
            AxisName::Kmin => "kmin",
            AxisName::Tau => "tau",
            AxisName::P0 => "p0",
        };
        let mut s = format!("{}\\{}", name(self.y.name), name(self.x.name));
        for v in &self.x.values {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
        for (yi, v) in self.y.values.iter().enumerate() {
            let _ = write!(s, "{v}");
            for xi in 0..self.x.values.len() {
                let _ = write!(s, ",{}", self.rate(xi, yi));
            }
            s.push('\n');
        }
        s
    }
}

/// Contents of the metadata file written next to a sweep CSV.
pub fn sweep_meta(spec: &SweepSpec) -> String {
    format!(
        "# generated by splitclust {}\nartifact_version = \"{}\"\nmaster_seed = {}\n\n{}",
        env!("CARGO_PKG_VERSION"),
        env!("CARGO_PKG_VERSION"),
        spec.seed,
        spec.to_toml()
    )
}

/// Runs every trial of every cell on a pool of `jobs` threads. Results do
/// not depend on `jobs`.
pub fn run_sweep(spec: &SweepSpec, jobs: usize) -> Result<SweepResult> {
    run_sweep_with(spec, jobs, |_, _| {})
}

/// Like [`run_sweep`], calling `inspect` on every finished trial.
pub fn run_sweep_with(
    spec: &SweepSpec,
    jobs: usize,
    inspect: impl Fn(&Instance, &ClusterOutcome) + Sync,
) -> Result<SweepResult> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| invalid(format!("thread pool: {e}")))?;
    let nx = spec.x.values.len();
    let cfg = spec.solver_config();
    let tasks: Vec<(usize, usize)> = (0..spec.cells()).flat_map(|cell| (0..spec.trials).map(move |t| (cell, t))).collect();
    let outcomes: Vec<Result<bool>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(cell, trial)| {
                let params = spec.cell_params(cell % nx, cell / nx, trial)?;
                let inst = generate_instance(&params)?;
                let grid = spec.eta_grid(inst.truth.n(), params.p0)?;
                let out = optimal_cluster(&inst.graph, &grid, &cfg)?;
                inspect(&inst, &out);
                Ok(out.clustering.as_ref() == Some(&inst.truth))
            })
            .collect()
    });
    let mut successes = vec![vec![0usize; nx]; spec.y.values.len()];
    for (&(cell, _), ok) in tasks.iter().zip(outcomes) {
        if ok? {
            successes[cell / nx][cell % nx] += 1;
        }
    }
    Ok(SweepResult { x: spec.x.clone(), y: spec.y.clone(), trials: spec.trials, successes })
}
