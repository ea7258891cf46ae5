//! Command dispatch for batch runs.
//!
//! | command | artifacts |
//! |---------|-----------|
//! | `analyze` | `report.json` |
//! | `bound` | `bound.json` |
//! | `evolve` | `trace.csv`, `extinction.json` |
//! | `check-kernel` | `kernel_check.json` |
//!
//! Exit codes: 0 success, 1 configuration error, 2 hypothesis violation,
//! 3 numerical failure. Every error is also printed to stderr as a JSON
//! object.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;

use crate::config::{Problem, RunConfig};
use crate::discretize::assemble_m;
use crate::error::{Error, ErrorClass, Result};
use crate::evolution::{
    check_extinction, default_t_max, evolve, fit_decay_rate, EvolveOptions, ExtinctionSummary,
    DEFAULT_SNAPSHOTS,
};
use crate::gapbound::{gap_constants, gap_constants_generic, verify_gap, GapBound};
use crate::kernels::{
    check_potential, jump_rate, kernel_stats, KernelStats, PotentialDiagnostics,
};
use crate::report::{to_json_string, AnalysisReport, GapBoundEntry, Metadata};
use crate::spectral::{analyze, essential_spectrum, max_eigenvalue_direct, SpectrumReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Analyze,
    Bound,
    Evolve,
    CheckKernel,
}

/// Files written by a command, and the exit code it ends with.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit_code: i32,
    pub artifacts: Vec<PathBuf>,
    /// Error that set a nonzero exit code after artifacts were written.
    pub error: Option<String>,
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    error: &'a str,
    message: String,
    exit_code: i32,
}

/// JSON line describing an error, as printed on stderr.
pub fn error_json(e: &Error) -> String {
    let rec = ErrorRecord {
        error: e.kind(),
        message: e.to_string(),
        exit_code: e.class().exit_code(),
    };
    serde_json::to_string(&rec).expect("error record serializes")
}

/// Runs `command` and reports failures on stderr; returns the exit code.
pub fn run_command(command: Command, config: &RunConfig, out_dir: &Path) -> i32 {
    match execute(command, config, out_dir) {
        Ok(outcome) => {
            if let Some(msg) = &outcome.error {
                eprintln!("{msg}");
            }
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("{}", error_json(&e));
            e.class().exit_code()
        }
    }
}

pub fn execute(command: Command, config: &RunConfig, out_dir: &Path) -> Result<Outcome> {
    fs::create_dir_all(out_dir)?;
    let problem = Problem::build(config)?;
    match command {
        Command::Analyze => run_analyze(config, &problem, out_dir),
        Command::Bound => run_bound(config, &problem, out_dir),
        Command::Evolve => run_evolve(config, &problem, out_dir),
        Command::CheckKernel => run_check_kernel(config, &problem, out_dir),
    }
}

fn write_text(path: PathBuf, text: &str) -> Result<PathBuf> {
    fs::write(&path, text)?;
    Ok(path)
}

/// Theorem-mode analysis; on a hypothesis violation, reruns in diagnostic
/// mode and returns the violation alongside the report.
fn analyze_with_fallback(
    config: &RunConfig,
    problem: &Problem,
) -> Result<(SpectrumReport, Option<Error>)> {
    let opts = config.analysis.options();
    match analyze(&problem.kernel, &problem.potential, &problem.grid, &opts) {
        Ok(r) => Ok((r, None)),
        Err(e @ Error::HypothesisViolated(_)) => {
            let diag = crate::spectral::AnalysisOptions {
                diagnostic: true,
                ..opts
            };
            let r = analyze(&problem.kernel, &problem.potential, &problem.grid, &diag)?;
            Ok((r, Some(e)))
        }
        Err(e) => Err(e),
    }
}

fn bound_for(problem: &Problem) -> Result<GapBound> {
    match &problem.wound {
        Some(a) => gap_constants(&problem.potential, a),
        None => gap_constants_generic(&problem.potential, &problem.kernel),
    }
}

pub fn analysis_report(config: &RunConfig, problem: &Problem) -> Result<(AnalysisReport, Option<Error>)> {
    let (spectrum, violation) = analyze_with_fallback(config, problem)?;
    let gap = match bound_for(problem) {
        Ok(b) => Ok(GapBoundEntry::new(
            &b,
            &verify_gap(&spectrum, &b, config.analysis.gap_slack),
        )),
        Err(e) => Err(e.to_string()),
    };
    Ok((AnalysisReport::new(config, &spectrum, gap), violation))
}

fn run_analyze(config: &RunConfig, problem: &Problem, out: &Path) -> Result<Outcome> {
    let (report, violation) = analysis_report(config, problem)?;
    let path = write_text(out.join("report.json"), &to_json_string(&report)?)?;
    Ok(finish(vec![path], violation))
}

fn finish(artifacts: Vec<PathBuf>, violation: Option<Error>) -> Outcome {
    match violation {
        Some(e) => Outcome {
            exit_code: e.class().exit_code(),
            artifacts,
            error: Some(error_json(&e)),
        },
        None => Outcome {
            exit_code: 0,
            artifacts,
            error: None,
        },
    }
}

#[derive(Serialize)]
struct BoundArtifact {
    lambda: f64,
    gap_bound: GapBoundEntry,
    metadata: Metadata,
}

fn run_bound(config: &RunConfig, problem: &Problem, out: &Path) -> Result<Outcome> {
    let bound = bound_for(problem)?;
    let (spectrum, violation) = analyze_with_fallback(config, problem)?;
    let verdict = verify_gap(&spectrum, &bound, config.analysis.gap_slack);
    let artifact = BoundArtifact {
        lambda: spectrum.lambda,
        gap_bound: GapBoundEntry::new(&bound, &verdict),
        metadata: Metadata::now(),
    };
    let path = write_text(out.join("bound.json"), &to_json_string(&artifact)?)?;
    let violation = violation.or_else(|| {
        (!verdict.pass).then(|| Error::HypothesisViolated(vec![format!(
            "lambda = {} exceeds -kappa = {} by {:e}",
            spectrum.lambda, -bound.kappa, verdict.margin
        )]))
    });
    let mut outcome = finish(vec![path], violation);
    if !verdict.pass {
        // a failed bound with valid inputs is a numerical contradiction
        outcome.exit_code = ErrorClass::Numerical.exit_code();
    }
    Ok(outcome)
}

#[derive(Serialize)]
struct ExtinctionArtifact {
    #[serde(flatten)]
    summary: ExtinctionSummary,
    lambda_estimate: f64,
    t_max: f64,
    dt: f64,
    decay_rate_fit: Option<f64>,
    fit_window: Option<(f64, f64)>,
    min_value_seen: f64,
    conforming: bool,
    metadata: Metadata,
}

fn run_evolve(config: &RunConfig, problem: &Problem, out: &Path) -> Result<Outcome> {
    let potential = check_potential(&problem.potential)?;
    let mut violation = None;
    if !potential.eligible {
        let e = Error::HypothesisViolated(vec![
            "potential is not strictly negative at any grid node".into(),
        ]);
        if !config.analysis.diagnostic {
            return Err(e);
        }
        violation = Some(e);
    }

    let w = jump_rate(&problem.kernel);
    let essential = essential_spectrum(&problem.potential, &w)?;
    let m = assemble_m(&problem.kernel, &problem.potential, &problem.grid)?;
    let lambda = max_eigenvalue_direct(&m, essential.alpha0, &config.analysis.options().perron)?.lambda;

    let evo = &config.evolution;
    let t_max = match evo.t_max {
        Some(t) => t,
        None if lambda.abs() > 1e-12 => default_t_max(lambda),
        None => {
            return Err(Error::InvalidArgument(
                "lambda is zero; set evolution.t_max explicitly".into(),
            ))
        }
    };
    let opts = EvolveOptions {
        t_max,
        dt: evo.dt.unwrap_or(0.01 / essential.alpha0),
        method: evo.method,
        snapshots: DEFAULT_SNAPSHOTS,
    };
    let u0 = problem.initial_data(evo.initial);
    let mut trace = evolve(&m, &u0, &opts)?;
    if let Some([t0, t1]) = evo.fit_window {
        trace.decay_rate_fit = Some(fit_decay_rate(&trace, (t0, t1))?);
        trace.fit_window = Some((t0, t1));
    }

    let trace_path = out.join("trace.csv");
    let mut file = BufWriter::new(File::create(&trace_path)?);
    trace.write_csv(&mut file)?;
    file.flush()?;

    let artifact = ExtinctionArtifact {
        summary: check_extinction(&trace),
        lambda_estimate: lambda,
        t_max,
        dt: opts.dt,
        decay_rate_fit: trace.decay_rate_fit,
        fit_window: trace.fit_window,
        min_value_seen: trace.min_value_seen,
        conforming: violation.is_none(),
        metadata: Metadata::now(),
    };
    let ext_path = write_text(out.join("extinction.json"), &to_json_string(&artifact)?)?;
    Ok(finish(vec![trace_path, ext_path], violation))
}

#[derive(Serialize)]
struct WindingInfo {
    truncation: usize,
    tail_estimate: f64,
    mass: f64,
}

#[derive(Serialize)]
struct KernelCheckArtifact {
    grid: String,
    kernel_stats: Option<KernelStats>,
    kernel_error: Option<String>,
    winding: Option<WindingInfo>,
    potential: Option<PotentialDiagnostics>,
    potential_error: Option<String>,
    metadata: Metadata,
}

fn run_check_kernel(config: &RunConfig, problem: &Problem, out: &Path) -> Result<Outcome> {
    let mut violations = Vec::new();
    let mut first_error = None;
    let mut note = |e: Error, violations: &mut Vec<String>| -> Result<String> {
        if e.class() != ErrorClass::Hypothesis {
            return Err(e);
        }
        let msg = e.to_string();
        violations.push(msg.clone());
        first_error.get_or_insert(e.kind());
        Ok(msg)
    };

    let (stats, kernel_error) = match kernel_stats(&problem.kernel, config.analysis.n_max) {
        Ok(s) => (Some(s), None),
        Err(e) => (None, Some(note(e, &mut violations)?)),
    };
    let (potential, mut potential_error) = match check_potential(&problem.potential) {
        Ok(p) => (Some(p), None),
        Err(e) => (None, Some(note(e, &mut violations)?)),
    };
    if potential.as_ref().is_some_and(|p| !p.eligible) {
        let msg = "potential is not strictly negative at any grid node".to_string();
        violations.push(msg.clone());
        potential_error = Some(msg);
    }

    let artifact = KernelCheckArtifact {
        grid: problem.grid.to_string(),
        kernel_stats: stats,
        kernel_error,
        winding: problem.wound.as_ref().map(|a| WindingInfo {
            truncation: a.wind_truncation(),
            tail_estimate: a.tail_estimate(),
            mass: a.mass(),
        }),
        potential,
        potential_error,
        metadata: Metadata::now(),
    };
    let path = write_text(out.join("kernel_check.json"), &to_json_string(&artifact)?)?;
    let violation = (!violations.is_empty()).then(|| Error::HypothesisViolated(violations));
    Ok(finish(vec![path], violation))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn error_record_fields() {
        let s = error_json(&Error::BracketFailure("x".into()));
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["exit_code"], 3);
        assert_eq!(v["error"], "BracketFailure");
    }

    #[test]
    fn check_kernel_on_f4() {
        let dir = tempfile::tempdir().unwrap();
        let c = fixtures::config("F4").unwrap();
        let o = execute(Command::CheckKernel, &c, dir.path()).unwrap();
        assert_eq!(o.exit_code, 0);
        let text = fs::read_to_string(dir.path().join("kernel_check.json")).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["kernel_stats"]["n_prim"], 1);
    }
}
