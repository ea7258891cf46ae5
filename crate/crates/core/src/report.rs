//! JSON artifacts. Floats are written with 17 significant digits so every
//! double round-trips; non-finite values become `null`.

use std::io::{self, Write};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::config::RunConfig;
use crate::error::Result;
use crate::gapbound::{GapBound, GapVerdict};
use crate::spectral::{AnalysisDiagnostics, EssentialSpectrum, LambdaByMethod, SpectrumReport};
use crate::kernels::{KernelStats, PotentialDiagnostics};

/// Pretty printer that writes every `f64` in `{:.16e}` form.
pub struct ExactFormatter<'a> {
    pretty: PrettyFormatter<'a>,
}

impl Default for ExactFormatter<'_> {
    fn default() -> Self {
        Self {
            pretty: PrettyFormatter::with_indent(b"  "),
        }
    }
}

impl Formatter for ExactFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object_value(w)
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFormatter::default());
    value
        .serialize(&mut ser)
        .map_err(|e| crate::Error::InvalidArgument(format!("serialization failed: {e}")))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub unix_time: u64,
}

impl Metadata {
    pub fn now() -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            unix_time: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GroundStateStats {
    pub min: f64,
    pub max: f64,
    pub norm_residual: f64,
    pub adjoint_min: f64,
    pub adjoint_max: f64,
    pub adjoint_norm_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapBoundEntry {
    pub c1: f64,
    pub norm_v2: f64,
    pub gamma0: f64,
    pub c2: f64,
    pub kappa: f64,
    pub verdict: &'static str,
    pub margin: f64,
}

impl GapBoundEntry {
    pub fn new(b: &GapBound, v: &GapVerdict) -> Self {
        Self {
            c1: b.c1,
            norm_v2: b.norm_v2,
            gamma0: b.gamma0,
            c2: b.c2,
            kappa: b.kappa,
            verdict: if v.pass { "pass" } else { "fail" },
            margin: v.margin,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportDiagnostics {
    pub conforming: bool,
    pub violations: Vec<String>,
    pub grid: String,
    pub kernel_stats: Option<KernelStats>,
    pub potential: PotentialDiagnostics,
    pub analysis: AnalysisDiagnostics,
    /// Why the gap bound was not evaluated.
    pub gap_bound_skipped: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub config_echo: RunConfig,
    pub essential: EssentialSpectrum,
    pub lambda: f64,
    pub lambda_by_method: LambdaByMethod,
    pub discrete_eigenvalues: Vec<[f64; 2]>,
    pub ground_state_stats: GroundStateStats,
    pub gap_bound: Option<GapBoundEntry>,
    pub diagnostics: ReportDiagnostics,
    pub metadata: Metadata,
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

impl AnalysisReport {
    pub fn new(
        config: &RunConfig,
        spectrum: &SpectrumReport,
        gap: std::result::Result<GapBoundEntry, String>,
    ) -> Self {
        let (min, max) = min_max(&spectrum.psi);
        let (adjoint_min, adjoint_max) = min_max(&spectrum.phi);
        let (gap_bound, gap_bound_skipped) = match gap {
            Ok(g) => (Some(g), None),
            Err(reason) => (None, Some(reason)),
        };
        Self {
            config_echo: config.clone(),
            essential: spectrum.essential.clone(),
            lambda: spectrum.lambda,
            lambda_by_method: spectrum.lambda_by_method.clone(),
            discrete_eigenvalues: spectrum
                .discrete_eigenvalues
                .iter()
                .map(|z| [z.re, z.im])
                .collect(),
            ground_state_stats: GroundStateStats {
                min,
                max,
                norm_residual: spectrum.diagnostics.residual_psi,
                adjoint_min,
                adjoint_max,
                adjoint_norm_residual: spectrum.diagnostics.residual_phi,
            },
            gap_bound,
            diagnostics: ReportDiagnostics {
                conforming: spectrum.conforming,
                violations: spectrum.violations.clone(),
                grid: config.grid().map(|g| g.to_string()).unwrap_or_default(),
                kernel_stats: spectrum.kernel_stats.clone(),
                potential: spectrum.potential.clone(),
                analysis: spectrum.diagnostics.clone(),
                gap_bound_skipped,
            },
            metadata: Metadata::now(),
        }
    }
}
