//! JSON run configuration.
//!
//! A configuration file holds optional top-level settings (`out`, `seed`,
//! `emit`, `mode`) and at most one section named after the mode being run.
//! Missing fields take the documented defaults; unknown fields are errors.

use std::fmt;
use std::path::{Path, PathBuf};

use bihns_core::boundary::Compatibility;
use bihns_core::lab::kato::RegularitySweep;
use bihns_core::lab::{optimality, tail, traces};
use bihns_core::nonlinear::{BoundaryData, Family, InitialData, ProblemSpec};
use bihns_core::trace::{BoundaryTrace, SampledTrace};
use bihns_core::C64;
use serde::Deserialize;

/// Experiment selected on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Solve,
    #[value(name = "kato_sweep", alias = "kato-sweep")]
    KatoSweep,
    Optimality,
    Lambda4,
    Identities,
    Traces,
}

impl Mode {
    pub const ALL: [Mode; 6] = [
        Mode::Solve,
        Mode::KatoSweep,
        Mode::Optimality,
        Mode::Lambda4,
        Mode::Identities,
        Mode::Traces,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Solve => "solve",
            Mode::KatoSweep => "kato_sweep",
            Mode::Optimality => "optimality",
            Mode::Lambda4 => "lambda4",
            Mode::Identities => "identities",
            Mode::Traces => "traces",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Configuration problems. All of them map to exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Schema {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Which artifact kinds to write.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Emit {
    pub csv: bool,
    pub json: bool,
    pub plot: bool,
}

impl Default for Emit {
    fn default() -> Self {
        Self {
            csv: true,
            json: true,
            plot: true,
        }
    }
}

type Pair = [f64; 2];

fn complex(v: &[Pair]) -> Vec<C64> {
    v.iter().map(|&[re, im]| C64::new(re, im)).collect()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum InitialSection {
    Zero,
    /// `[re, im]` sine coefficients `q_1, q_2, …`.
    SineModes { coefficients: Vec<Pair> },
    /// `[re, im]` samples on a uniform grid of `[0,1]` including both ends.
    Grid { values: Vec<Pair> },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SamplesSection {
    #[serde(default)]
    start: f64,
    step: f64,
    values: Vec<Pair>,
}

/// A boundary trace: almost-periodic terms `c e^{i n π⁴ t}` given as
/// `[n, re, im]`, and/or uniformly sampled values.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct TraceSection {
    terms: Vec<[f64; 3]>,
    samples: Option<SamplesSection>,
}

impl TraceSection {
    fn build(&self, name: &str) -> Result<BoundaryTrace, ConfigError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for &[n, re, im] in &self.terms {
            if n.fract() != 0.0 || n.abs() > 1e9 {
                return Err(ConfigError::Invalid(format!(
                    "boundary.{name}: lattice index must be an integer (got {n})"
                )));
            }
            terms.push((n as i64, C64::new(re, im)));
        }
        let trace = BoundaryTrace::from_series(terms);
        match &self.samples {
            None => Ok(trace),
            Some(s) => {
                let sampled = SampledTrace::new(s.start, s.step, complex(&s.values))
                    .map_err(|e| ConfigError::Invalid(format!("boundary.{name}.samples: {e}")))?;
                Ok(trace.with_samples(sampled))
            }
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct BoundarySection {
    left: TraceSection,
    right: TraceSection,
    left_aux: TraceSection,
    right_aux: TraceSection,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum CompatibilitySection {
    Enforce,
    Ignore,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolveSection {
    family: Family,
    s: Option<f64>,
    p: Option<f64>,
    lambda: Option<f64>,
    horizon: Option<f64>,
    modes: Option<usize>,
    dt: Option<f64>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    dealias: Option<f64>,
    compatibility: Option<CompatibilitySection>,
    low_regularity: Option<bool>,
    snapshots: Option<usize>,
    initial: Option<InitialSection>,
    #[serde(default)]
    boundary: BoundarySection,
    grid_points: Option<usize>,
    value_tol: Option<f64>,
    aux_tol: Option<f64>,
}

/// A validated solve.
#[derive(Clone, Debug)]
pub struct SolveConfig {
    pub spec: ProblemSpec,
    /// Number of points of the uniform output grid on `[0,1]`.
    pub grid_points: usize,
    /// Allowed deviation of the recovered boundary values from the data.
    pub value_tol: f64,
    /// Same for the auxiliary traces; unchecked when absent.
    pub aux_tol: Option<f64>,
}

impl SolveSection {
    fn build(self) -> Result<SolveConfig, ConfigError> {
        let mut spec = ProblemSpec::new(self.family);
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { spec.$f = v; } )* };
        }
        take!(s, p, lambda, horizon, modes, dt, tol, max_iter, dealias, low_regularity, snapshots);
        if let Some(c) = self.compatibility {
            spec.compatibility = match c {
                CompatibilitySection::Enforce => Compatibility::Enforce,
                CompatibilitySection::Ignore => Compatibility::Ignore,
            };
        }
        spec.initial = match self.initial.unwrap_or(InitialSection::Zero) {
            InitialSection::Zero => InitialData::Zero,
            InitialSection::SineModes { coefficients } => InitialData::SineModes(complex(&coefficients)),
            InitialSection::Grid { values } => {
                if values.len() < 3 {
                    return Err(ConfigError::Invalid("initial.values needs at least 3 samples".into()));
                }
                InitialData::Grid(complex(&values))
            }
        };
        spec.boundary = BoundaryData {
            left: self.boundary.left.build("left")?,
            right: self.boundary.right.build("right")?,
            left_aux: self.boundary.left_aux.build("left_aux")?,
            right_aux: self.boundary.right_aux.build("right_aux")?,
        };
        spec.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let grid_points = self.grid_points.unwrap_or(65);
        if grid_points < 2 {
            return Err(ConfigError::Invalid("grid_points ≥ 2 required".into()));
        }
        let value_tol = self.value_tol.unwrap_or(1e-3);
        if !(value_tol > 0.0) || self.aux_tol.is_some_and(|t| !(t > 0.0)) {
            return Err(ConfigError::Invalid("value_tol and aux_tol must be positive".into()));
        }
        Ok(SolveConfig {
            spec,
            grid_points,
            value_tol,
            aux_tol: self.aux_tol,
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct KatoSection {
    s_grid: Vec<f64>,
    orders: Vec<usize>,
    epsilon: f64,
    ensemble: usize,
    modes: usize,
    tolerance: f64,
}

impl Default for KatoSection {
    fn default() -> Self {
        let d = RegularitySweep::default();
        Self {
            s_grid: d.s_grid,
            orders: d.orders,
            epsilon: d.epsilon,
            ensemble: d.ensemble,
            modes: d.modes,
            tolerance: 0.15,
        }
    }
}

#[derive(Clone, Debug)]
pub struct KatoConfig {
    pub sweep: RegularitySweep,
    /// Allowed `|median − predicted|`.
    pub tolerance: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimalityConfig {
    pub alpha: f64,
    pub beta: f64,
    pub order: usize,
    pub n_grid: Vec<usize>,
    /// Required `ratio(last)/ratio(first)` for a counterexample run.
    pub min_growth: f64,
    /// Allowed relative growth over the last two rows of a boundedness run.
    pub max_drift: f64,
}

impl Default for OptimalityConfig {
    fn default() -> Self {
        Self {
            alpha: 0.6,
            beta: 3.4,
            order: 0,
            n_grid: vec![4, 8, 16, 32, 64],
            min_growth: 1.2,
            max_drift: 0.05,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Lambda4Config {
    pub k_max: i64,
    pub max_multiplicity: usize,
}

impl Default for Lambda4Config {
    fn default() -> Self {
        Self {
            k_max: 200,
            max_multiplicity: 3,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdentitiesConfig {
    pub a_grid: Vec<f64>,
    pub x_grid: Vec<f64>,
    pub ks: Vec<usize>,
    pub exp_tol: f64,
    pub tail_x: Vec<f64>,
    pub tail_lambda: Vec<f64>,
    pub tail_alpha: f64,
}

impl Default for IdentitiesConfig {
    fn default() -> Self {
        use std::f64::consts::PI;
        Self {
            a_grid: (1..=10).map(|j| 0.5 * j as f64).collect(),
            x_grid: (1..=10).map(|j| PI * j as f64 / 11.0).collect(),
            ks: (0..6).map(|j| 250usize << j).collect(),
            exp_tol: 1e-12,
            tail_x: vec![0.2, 0.5, 0.8],
            tail_lambda: vec![16.0, 1e3, 1e5],
            tail_alpha: 0.8,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TracesConfig {
    pub s_grid: Vec<f64>,
    pub modes: usize,
    pub epsilon: f64,
    /// Number of seeded random data; ignored when `data` is given.
    pub ensemble: usize,
    /// Grid resolution `M` of the random data (`M + 1` samples).
    pub grid: usize,
    /// Explicit data, each a list of `[re, im]` samples.
    pub data: Option<Vec<Vec<Pair>>>,
}

impl Default for TracesConfig {
    fn default() -> Self {
        Self {
            s_grid: vec![0.5, 1.0, 1.5, 2.0],
            modes: 48,
            epsilon: 0.1,
            ensemble: 4,
            grid: 2048,
            data: None,
        }
    }
}

impl TracesConfig {
    pub fn explicit_data(&self) -> Option<Vec<Vec<C64>>> {
        self.data.as_ref().map(|d| d.iter().map(|v| complex(v)).collect())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mode: Option<Mode>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    #[serde(default)]
    emit: Emit,
    solve: Option<SolveSection>,
    kato_sweep: Option<KatoSection>,
    optimality: Option<OptimalityConfig>,
    lambda4: Option<Lambda4Config>,
    identities: Option<IdentitiesConfig>,
    traces: Option<TracesConfig>,
}

impl RawConfig {
    fn present(&self) -> Vec<Mode> {
        let flags = [
            self.solve.is_some(),
            self.kato_sweep.is_some(),
            self.optimality.is_some(),
            self.lambda4.is_some(),
            self.identities.is_some(),
            self.traces.is_some(),
        ];
        Mode::ALL.into_iter().zip(flags).filter(|(_, f)| *f).map(|(m, _)| m).collect()
    }
}

/// Mode-specific part of a run.
#[derive(Clone, Debug)]
pub enum Experiment {
    Solve(SolveConfig),
    KatoSweep(KatoConfig),
    Optimality(OptimalityConfig),
    Lambda4(Lambda4Config),
    Identities(IdentitiesConfig),
    Traces(TracesConfig),
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub mode: Mode,
    pub out: PathBuf,
    pub seed: u64,
    pub emit: Emit,
    pub experiment: Experiment,
}

/// Command-line overrides applied on top of the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

pub const DEFAULT_OUT: &str = "bihns-out";

/// Read, parse and validate a configuration for `mode`.
pub fn load_config(path: &Path, mode: Mode, overrides: &Overrides) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_config(&text, mode, overrides).map_err(|e| match e {
        ConfigError::Schema { source, .. } => ConfigError::Schema {
            path: path.to_owned(),
            source,
        },
        other => other,
    })
}

/// Parse and validate configuration text.
pub fn parse_config(text: &str, mode: Mode, overrides: &Overrides) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|source| ConfigError::Schema {
        path: PathBuf::from("<config>"),
        source,
    })?;
    if let Some(m) = raw.mode {
        if m != mode {
            return Err(ConfigError::Invalid(format!(
                "config declares mode `{m}` but `{mode}` was requested"
            )));
        }
    }
    let others: Vec<String> = raw
        .present()
        .into_iter()
        .filter(|&m| m != mode)
        .map(|m| format!("`{m}`"))
        .collect();
    if !others.is_empty() {
        return Err(ConfigError::Invalid(format!(
            "exactly one mode per run: found section(s) {} while running `{mode}`",
            others.join(", ")
        )));
    }
    let seed = overrides.seed.or(raw.seed).unwrap_or(0);
    let invalid = |e: bihns_core::Error| ConfigError::Invalid(e.to_string());
    let experiment = match mode {
        Mode::Solve => {
            let section = raw
                .solve
                .ok_or_else(|| ConfigError::Invalid("missing `solve` section (needs at least `family`)".into()))?;
            Experiment::Solve(section.build()?)
        }
        Mode::KatoSweep => {
            let k = raw.kato_sweep.unwrap_or_default();
            let sweep = RegularitySweep {
                s_grid: k.s_grid,
                orders: k.orders,
                epsilon: k.epsilon,
                ensemble: k.ensemble,
                modes: k.modes,
                seed,
            };
            sweep.validate().map_err(invalid)?;
            if sweep.s_grid.is_empty() || sweep.orders.is_empty() {
                return Err(ConfigError::Invalid("kato_sweep needs non-empty s_grid and orders".into()));
            }
            if !(k.tolerance > 0.0) {
                return Err(ConfigError::Invalid("kato_sweep.tolerance must be positive".into()));
            }
            Experiment::KatoSweep(KatoConfig {
                sweep,
                tolerance: k.tolerance,
            })
        }
        Mode::Optimality => {
            let o = raw.optimality.unwrap_or_default();
            optimality::check_parameters(o.alpha, o.beta, o.order, &o.n_grid).map_err(invalid)?;
            Experiment::Optimality(o)
        }
        Mode::Lambda4 => {
            let l = raw.lambda4.unwrap_or_default();
            if !(2..=5000).contains(&l.k_max) {
                return Err(ConfigError::Invalid(format!("lambda4.k_max must lie in 2..=5000 (got {})", l.k_max)));
            }
            Experiment::Lambda4(l)
        }
        Mode::Identities => {
            let c = raw.identities.unwrap_or_default();
            if c.ks.is_empty() || c.ks.contains(&0) || c.a_grid.is_empty() || c.x_grid.is_empty() {
                return Err(ConfigError::Invalid("identities needs non-empty grids and K ≥ 1".into()));
            }
            tail::check_parameters(&c.tail_x, &c.tail_lambda, c.tail_alpha).map_err(invalid)?;
            Experiment::Identities(c)
        }
        Mode::Traces => {
            let t = raw.traces.unwrap_or_default();
            traces::check_parameters(&t.s_grid, t.epsilon).map_err(invalid)?;
            if t.modes == 0 {
                return Err(ConfigError::Invalid("traces.modes must be positive".into()));
            }
            match &t.data {
                Some(d) if d.is_empty() || d.iter().any(|v| v.len() < 3) => {
                    return Err(ConfigError::Invalid("traces.data: each datum needs at least 3 samples".into()));
                }
                None if t.ensemble == 0 || t.grid < 2 => {
                    return Err(ConfigError::Invalid("traces needs ensemble ≥ 1 and grid ≥ 2".into()));
                }
                _ => {}
            }
            Experiment::Traces(t)
        }
    };
    Ok(RunConfig {
        mode,
        out: overrides.out.clone().or(raw.out).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        seed,
        emit: raw.emit,
        experiment,
    })
}
