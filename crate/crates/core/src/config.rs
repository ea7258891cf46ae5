//! JSON run configuration.
//!
//! ```json
//! {
//!   "dimension": 1,
//!   "grid_n": 128,
//!   "kernel": { "type": "constant" },
//!   "potential": { "type": "step", "v": 1.0 }
//! }
//! ```
//!
//! Every other section has defaults. Unknown keys are rejected.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::eigen::PerronOptions;
use crate::error::{Error, Result};
use crate::evolution::Integrator;
use crate::grid::TorusGrid;
use crate::io::{load_kernel_csv, load_potential_csv};
use crate::kernels::{wind_kernel, ContinuousKernel, GenericKernel, Potential, WoundKernel};
use crate::spectral::AnalysisOptions;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    pub grid_n: usize,
    pub kernel: KernelSpec,
    pub potential: PotentialSpec,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub evolution: EvolutionConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_dimension() -> usize {
    1
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    /// `a~ = value` on the torus.
    Constant {
        #[serde(default = "one")]
        value: f64,
    },
    Tophat { half_width: f64 },
    Gaussian { sigma: f64 },
    Exponential { scale: f64 },
    /// `1 + amplitude * sin(2 pi sum z)`.
    Sine {
        #[serde(default = "half")]
        amplitude: f64,
    },
    /// `a~(x - y) (1 + amplitude cos(2 pi sum x) cos(2 pi sum y))`.
    Modulated {
        base: Box<KernelSpec>,
        amplitude: f64,
    },
    Csv { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Constant { value: f64 },
    /// `-v` where the first coordinate is below `fraction`, zero elsewhere.
    Step {
        v: f64,
        #[serde(default = "half")]
        fraction: f64,
    },
    /// `-depth (1 + cos(2 pi x_1)) / 2`.
    Cosine { depth: f64 },
    Csv { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub seed: u64,
    pub perron_tol: f64,
    pub perron_max_iter: usize,
    pub bisection_tol: f64,
    pub cross_tol: f64,
    pub residual_tol: f64,
    pub n_max: usize,
    pub qr_cap: usize,
    /// Winding tail tolerance.
    pub tail_tol: f64,
    pub gap_slack: f64,
    pub diagnostic: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        let a = AnalysisOptions::default();
        Self {
            seed: a.perron.seed,
            perron_tol: a.perron.tol,
            perron_max_iter: a.perron.max_iter,
            bisection_tol: a.bisection_tol,
            cross_tol: a.cross_tol,
            residual_tol: a.residual_tol,
            n_max: a.n_max,
            qr_cap: a.qr_cap,
            tail_tol: 1e-12,
            gap_slack: crate::gapbound::DEFAULT_SLACK,
            diagnostic: false,
        }
    }
}

impl AnalysisConfig {
    pub fn options(&self) -> AnalysisOptions {
        AnalysisOptions {
            perron: PerronOptions {
                tol: self.perron_tol,
                max_iter: self.perron_max_iter,
                seed: self.seed,
            },
            bisection_tol: self.bisection_tol,
            cross_tol: self.cross_tol,
            residual_tol: self.residual_tol,
            n_max: self.n_max,
            qr_cap: self.qr_cap,
            diagnostic: self.diagnostic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialData {
    Ones,
    /// `1 + cos(2 pi x_1) / 2`.
    Bump,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionConfig {
    /// Defaults to `40 / |lambda|`.
    pub t_max: Option<f64>,
    /// Defaults to `0.01 / alpha0`.
    pub dt: Option<f64>,
    pub method: Integrator,
    pub initial: InitialData,
    /// Defaults to the last half of the trace.
    pub fit_window: Option<[f64; 2]>,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            t_max: None,
            dt: None,
            method: Integrator::Rk4,
            initial: InitialData::Ones,
            fit_window: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Only `"json"` is supported.
    pub format: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            format: "json".into(),
        }
    }
}

/// Parses and validates a configuration document. Relative CSV paths are
/// resolved against `base`.
pub fn parse_config(text: &str, base: Option<&Path>) -> Result<RunConfig> {
    // the serde_json message names the offending key and its line/column
    let mut config: RunConfig =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if let Some(base) = base {
        config.resolve_paths(base);
    }
    config.validate()?;
    Ok(config)
}

/// Reads a config file. Names under `fixtures/` that do not exist on disk
/// fall back to the built-in fixtures.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    match std::fs::read_to_string(path) {
        Ok(text) => parse_config(&text, path.parent()),
        Err(e) => match crate::fixtures::lookup(path) {
            Some(text) => parse_config(text, None),
            None => Err(Error::Io(e)),
        },
    }
}

fn positive(violations: &mut Vec<String>, name: &str, x: f64) {
    if !(x > 0.0 && x.is_finite()) {
        violations.push(format!("{name} must be positive and finite, got {x}"));
    }
}

impl RunConfig {
    pub fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.dimension, self.grid_n)
    }

    fn resolve_paths(&mut self, base: &Path) {
        fn fix(p: &mut PathBuf, base: &Path) {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        let mut k = &mut self.kernel;
        loop {
            match k {
                KernelSpec::Csv { path } => {
                    fix(path, base);
                    break;
                }
                KernelSpec::Modulated { base: inner, .. } => k = inner,
                _ => break,
            }
        }
        if let PotentialSpec::Csv { path } = &mut self.potential {
            fix(path, base);
        }
    }

    /// Applies command-line overrides and validates again.
    pub fn with_overrides(mut self, seed: Option<u64>, grid_n: Option<usize>) -> Result<Self> {
        if let Some(s) = seed {
            self.analysis.seed = s;
        }
        if let Some(n) = grid_n {
            self.grid_n = n;
        }
        self.validate()?;
        Ok(self)
    }

    /// Collects every violated invariant.
    pub fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        if !(1..=crate::grid::MAX_DIM).contains(&self.dimension) {
            v.push(format!("dimension must be 1 or 2, got {}", self.dimension));
        }
        if self.grid_n == 0 || self.grid_n % 2 != 0 {
            v.push(format!("grid_n must be a positive even integer, got {}", self.grid_n));
        }
        validate_kernel(&self.kernel, &mut v, "kernel");
        match &self.potential {
            PotentialSpec::Constant { value } if !value.is_finite() => {
                v.push(format!("potential.value must be finite, got {value}"))
            }
            PotentialSpec::Step { v: depth, fraction } => {
                if !depth.is_finite() {
                    v.push(format!("potential.v must be finite, got {depth}"));
                }
                if !(0.0..=1.0).contains(fraction) {
                    v.push(format!("potential.fraction must lie in [0, 1], got {fraction}"));
                }
            }
            PotentialSpec::Cosine { depth } if !depth.is_finite() => {
                v.push(format!("potential.depth must be finite, got {depth}"))
            }
            PotentialSpec::Csv { path } if !path.is_file() => {
                v.push(format!("potential file {} does not exist", path.display()))
            }
            _ => {}
        }

        let a = &self.analysis;
        positive(&mut v, "analysis.perron_tol", a.perron_tol);
        positive(&mut v, "analysis.bisection_tol", a.bisection_tol);
        positive(&mut v, "analysis.cross_tol", a.cross_tol);
        positive(&mut v, "analysis.residual_tol", a.residual_tol);
        positive(&mut v, "analysis.tail_tol", a.tail_tol);
        if !(a.gap_slack >= 0.0) {
            v.push(format!("analysis.gap_slack must be nonnegative, got {}", a.gap_slack));
        }
        for (name, x) in [
            ("analysis.perron_max_iter", a.perron_max_iter),
            ("analysis.n_max", a.n_max),
            ("analysis.qr_cap", a.qr_cap),
        ] {
            if x == 0 {
                v.push(format!("{name} must be positive"));
            }
        }

        let e = &self.evolution;
        if let Some(t) = e.t_max {
            positive(&mut v, "evolution.t_max", t);
        }
        if let Some(dt) = e.dt {
            positive(&mut v, "evolution.dt", dt);
        }
        if let Some([t0, t1]) = e.fit_window {
            if !(t0 >= 0.0 && t1 > t0) {
                v.push(format!("evolution.fit_window must satisfy 0 <= t0 < t1, got [{t0}, {t1}]"));
            }
        }
        if self.output.format != "json" {
            v.push(format!("output.format must be \"json\", got {:?}", self.output.format));
        }

        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }
}

fn validate_kernel(k: &KernelSpec, v: &mut Vec<String>, at: &str) {
    match k {
        KernelSpec::Constant { value } => {
            if !(*value > 0.0 && value.is_finite()) {
                v.push(format!("{at}.value must be positive, got {value}"));
            }
        }
        KernelSpec::Tophat { half_width } => positive(v, &format!("{at}.half_width"), *half_width),
        KernelSpec::Gaussian { sigma } => positive(v, &format!("{at}.sigma"), *sigma),
        KernelSpec::Exponential { scale } => positive(v, &format!("{at}.scale"), *scale),
        KernelSpec::Sine { amplitude } => {
            if !(amplitude.abs() <= 1.0) {
                v.push(format!("{at}.amplitude must lie in [-1, 1], got {amplitude}"));
            }
        }
        KernelSpec::Modulated { base, amplitude } => {
            if matches!(**base, KernelSpec::Modulated { .. } | KernelSpec::Csv { .. }) {
                v.push(format!("{at}.base must be a translation-invariant builtin kernel"));
            } else {
                validate_kernel(base, v, &format!("{at}.base"));
            }
            if !(amplitude.abs() < 1.0) {
                v.push(format!("{at}.amplitude must lie in (-1, 1), got {amplitude}"));
            }
        }
        KernelSpec::Csv { path } => {
            if !path.is_file() {
                v.push(format!("kernel file {} does not exist", path.display()));
            }
        }
    }
}

/// Discretized inputs of a run.
#[derive(Debug, Clone)]
pub struct Problem {
    pub grid: TorusGrid,
    pub kernel: GenericKernel,
    /// Present when the kernel is a plain convolution.
    pub wound: Option<WoundKernel>,
    pub potential: Potential,
}

fn wound(spec: &KernelSpec, grid: TorusGrid, tail_tol: f64) -> Result<Option<WoundKernel>> {
    let d = grid.dim();
    Ok(Some(match spec {
        KernelSpec::Constant { value } => WoundKernel::constant(grid, *value)?,
        KernelSpec::Tophat { half_width } => {
            wind_kernel(&ContinuousKernel::tophat(d, *half_width)?, grid, tail_tol)?
        }
        KernelSpec::Gaussian { sigma } => {
            wind_kernel(&ContinuousKernel::gaussian(d, *sigma)?, grid, tail_tol)?
        }
        KernelSpec::Exponential { scale } => {
            wind_kernel(&ContinuousKernel::exponential(d, *scale)?, grid, tail_tol)?
        }
        KernelSpec::Sine { amplitude } => WoundKernel::sine(grid, *amplitude)?,
        KernelSpec::Modulated { .. } | KernelSpec::Csv { .. } => return Ok(None),
    }))
}

impl Problem {
    pub fn build(config: &RunConfig) -> Result<Self> {
        let grid = config.grid()?;
        let tail_tol = config.analysis.tail_tol;
        let (kernel, wound) = match &config.kernel {
            KernelSpec::Csv { path } => (load_kernel_csv(path, &grid)?, None),
            KernelSpec::Modulated { base, amplitude } => {
                let a = wound(base, grid, tail_tol)?.ok_or_else(|| {
                    Error::InvalidArgument("modulated kernel needs a builtin base".into())
                })?;
                let amp = *amplitude;
                let b = GenericKernel::modulated(&a, |x, y| {
                    let cx = (2.0 * PI * x.iter().sum::<f64>()).cos();
                    let cy = (2.0 * PI * y.iter().sum::<f64>()).cos();
                    1.0 + amp * cx * cy
                })?;
                (b, None)
            }
            spec => {
                let a = wound(spec, grid, tail_tol)?.expect("builtin kernels wind");
                (GenericKernel::convolution(&a), Some(a))
            }
        };
        let potential = match &config.potential {
            PotentialSpec::Constant { value } => Potential::constant(grid, *value)?,
            PotentialSpec::Step { v, fraction } => Potential::step(grid, *v, *fraction)?,
            PotentialSpec::Cosine { depth } => Potential::from_fn(grid, |x| {
                -depth * 0.5 * (1.0 + (2.0 * PI * x[0]).cos())
            })?,
            PotentialSpec::Csv { path } => load_potential_csv(path, &grid)?,
        };
        Ok(Self {
            grid,
            kernel,
            wound,
            potential,
        })
    }

    pub fn initial_data(&self, initial: InitialData) -> Vec<f64> {
        (0..self.grid.len())
            .map(|i| match initial {
                InitialData::Ones => 1.0,
                InitialData::Bump => 1.0 + 0.5 * (2.0 * PI * self.grid.point(i)[0]).cos(),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "dimension": 1,
        "grid_n": 128,
        "kernel": {"type": "constant"},
        "potential": {"type": "step", "v": 1}
    }"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL, None).unwrap();
        assert_eq!(c.grid_n, 128);
        assert_eq!(c.kernel, KernelSpec::Constant { value: 1.0 });
        assert_eq!(c.potential, PotentialSpec::Step { v: 1.0, fraction: 0.5 });
        assert_eq!(c.analysis, AnalysisConfig::default());
        assert_eq!(c.analysis.bisection_tol, 1e-12);
        assert_eq!(c.evolution.method, Integrator::Rk4);
        assert_eq!(c.output.format, "json");
    }

    #[test]
    fn odd_grid_is_rejected() {
        let text = MINIMAL.replace("128", "127");
        match parse_config(&text, None) {
            Err(Error::Validation(v)) => assert!(v[0].contains("even")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_named() {
        let text = MINIMAL.replace("\"grid_n\": 128", "\"grid_n\": 128, \"grdi_n\": 4");
        match parse_config(&text, None) {
            Err(Error::Parse(msg)) => {
                assert!(msg.contains("grdi_n"), "{msg}");
                assert!(msg.contains("line 3"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn validation_lists_every_problem() {
        let text = r#"{"dimension": 3, "grid_n": 5,
            "kernel": {"type": "gaussian", "sigma": -1},
            "potential": {"type": "csv", "path": "/nonexistent/v.csv"},
            "analysis": {"cross_tol": 0}}"#;
        match parse_config(text, None) {
            Err(Error::Validation(v)) => assert_eq!(v.len(), 5, "{v:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn overrides_are_validated() {
        let c = parse_config(MINIMAL, None).unwrap();
        let c2 = c.clone().with_overrides(Some(7), Some(64)).unwrap();
        assert_eq!((c2.analysis.seed, c2.grid_n), (7, 64));
        assert!(matches!(c.with_overrides(None, Some(9)), Err(Error::Validation(_))));
    }

    #[test]
    fn builds_problems() {
        let c = parse_config(MINIMAL, None).unwrap();
        let p = Problem::build(&c).unwrap();
        assert!(p.wound.is_some());
        assert_eq!(p.potential.samples()[0], -1.0);
        assert_eq!(p.potential.samples()[127], 0.0);

        let text = r#"{"grid_n": 16, "kernel": {"type": "modulated",
            "base": {"type": "gaussian", "sigma": 0.2}, "amplitude": 0.5},
            "potential": {"type": "cosine", "depth": 1}}"#;
        let p = Problem::build(&parse_config(text, None).unwrap()).unwrap();
        assert!(p.wound.is_none());
        assert!((p.potential.samples()[0] + 1.0).abs() < 1e-15);
        assert!(p.potential.samples().iter().all(|&x| x <= 0.0));
    }
}
