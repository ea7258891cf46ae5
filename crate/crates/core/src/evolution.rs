//! Time stepping of `du/dt = M u` and decay diagnostics.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::discretize::OperatorMatrix;
use crate::eigen::eigen_decomposition;
use crate::error::{Error, Result};

/// Number of snapshot intervals recorded over `[0, t_max]`.
pub const DEFAULT_SNAPSHOTS: usize = 200;
/// Norm blow-up factor treated as instability.
pub const BLOWUP_FACTOR: f64 = 10.0;
/// Final-to-initial norm ratio that counts as extinction.
pub const EXTINCTION_RATIO: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    Rk4,
    EigenExpansion,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EvolveOptions {
    pub t_max: f64,
    pub dt: f64,
    pub method: Integrator,
    pub snapshots: usize,
}

impl EvolveOptions {
    /// RK4 with `dt = 0.01 / alpha0`.
    pub fn new(t_max: f64, alpha0: f64) -> Self {
        Self {
            t_max,
            dt: 0.01 / alpha0,
            method: Integrator::Rk4,
            snapshots: DEFAULT_SNAPSHOTS,
        }
    }
}

/// Horizon long enough to see forty e-folds at rate `lambda`.
pub fn default_t_max(lambda: f64) -> f64 {
    40.0 / lambda.abs()
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    /// `sqrt(h^d sum u^2)`.
    pub l2_norms: Vec<f64>,
    pub sup_norms: Vec<f64>,
    /// `h^d sum u`.
    pub masses: Vec<f64>,
    #[serde(skip)]
    pub states: Vec<Vec<f64>>,
    pub min_value_seen: f64,
    pub decay_rate_fit: Option<f64>,
    pub fit_window: Option<(f64, f64)>,
}

impl EvolutionTrace {
    /// Writes `t,l2,sup,mass` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "l2", "sup", "mass"])?;
        for i in 0..self.times.len() {
            w.write_record([
                format!("{:.16e}", self.times[i]),
                format!("{:.16e}", self.l2_norms[i]),
                format!("{:.16e}", self.sup_norms[i]),
                format!("{:.16e}", self.masses[i]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

struct Norms {
    l2: f64,
    sup: f64,
    mass: f64,
    min: f64,
}

fn norms(u: &[f64], h: f64) -> Norms {
    Norms {
        l2: (h * u.iter().map(|x| x * x).sum::<f64>()).sqrt(),
        sup: u.iter().map(|x| x.abs()).fold(0.0, f64::max),
        mass: h * u.iter().sum::<f64>(),
        min: u.iter().copied().fold(f64::INFINITY, f64::min),
    }
}

/// Largest diagonal magnitude; sets the explicit step limit.
pub fn stiffness(op: &OperatorMatrix) -> f64 {
    op.matrix()
        .diagonal()
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max)
}

pub fn evolve(op: &OperatorMatrix, u0: &[f64], opts: &EvolveOptions) -> Result<EvolutionTrace> {
    let n = op.order();
    if u0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: u0.len(),
        });
    }
    if !(opts.t_max > 0.0 && opts.t_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("t_max must be positive, got {}", opts.t_max)));
    }
    if opts.snapshots == 0 {
        return Err(Error::InvalidArgument("snapshots must be positive".into()));
    }
    if u0.iter().any(|x| !x.is_finite()) || u0.iter().all(|&x| x == 0.0) {
        return Err(Error::InvalidArgument(
            "initial condition must be finite and not identically zero".into(),
        ));
    }

    let snapshot_times: Vec<f64> = (0..=opts.snapshots)
        .map(|k| opts.t_max * k as f64 / opts.snapshots as f64)
        .collect();
    let states = match opts.method {
        Integrator::Rk4 => rk4_snapshots(op, u0, &snapshot_times, opts.dt)?,
        Integrator::EigenExpansion => expansion_snapshots(op, u0, &snapshot_times)?,
    };

    let h = op.grid().weight();
    let first = norms(u0, h);
    let (l2_limit, sup_limit) = (BLOWUP_FACTOR * first.l2, BLOWUP_FACTOR * first.sup);
    let mut trace = EvolutionTrace {
        times: snapshot_times,
        l2_norms: Vec::with_capacity(states.len()),
        sup_norms: Vec::with_capacity(states.len()),
        masses: Vec::with_capacity(states.len()),
        states: Vec::new(),
        min_value_seen: f64::INFINITY,
        decay_rate_fit: None,
        fit_window: None,
    };
    for (t, u) in trace.times.iter().zip(&states) {
        let s = norms(u, h);
        if !(s.l2 <= l2_limit) {
            return Err(Error::Unstable {
                time: *t,
                norm: s.l2,
                limit: l2_limit,
            });
        }
        if !(s.sup <= sup_limit) {
            return Err(Error::Unstable {
                time: *t,
                norm: s.sup,
                limit: sup_limit,
            });
        }
        trace.l2_norms.push(s.l2);
        trace.sup_norms.push(s.sup);
        trace.masses.push(s.mass);
        trace.min_value_seen = trace.min_value_seen.min(s.min);
    }
    trace.states = states;

    let window = (0.5 * opts.t_max, opts.t_max);
    if let Ok(rate) = fit_decay_rate(&trace, window) {
        trace.decay_rate_fit = Some(rate);
        trace.fit_window = Some(window);
    }
    Ok(trace)
}

fn rk4_snapshots(op: &OperatorMatrix, u0: &[f64], times: &[f64], dt: f64) -> Result<Vec<Vec<f64>>> {
    let stiff = stiffness(op);
    if !(dt > 0.0) || dt * stiff > 0.5 {
        return Err(Error::InvalidArgument(format!(
            "dt = {dt} violates dt <= 0.5 / {stiff}"
        )));
    }
    let m = op.matrix();
    let n = u0.len();
    let mut u = DVector::from_column_slice(u0);
    let mut k1 = DVector::zeros(n);
    let mut k2 = DVector::zeros(n);
    let mut k3 = DVector::zeros(n);
    let mut k4 = DVector::zeros(n);
    let mut tmp = DVector::zeros(n);
    let mut step = |u: &mut DVector<f64>, dt: f64| {
        k1.gemv(1.0, m, u, 0.0);
        tmp.copy_from(u);
        tmp.axpy(0.5 * dt, &k1, 1.0);
        k2.gemv(1.0, m, &tmp, 0.0);
        tmp.copy_from(u);
        tmp.axpy(0.5 * dt, &k2, 1.0);
        k3.gemv(1.0, m, &tmp, 0.0);
        tmp.copy_from(u);
        tmp.axpy(dt, &k3, 1.0);
        k4.gemv(1.0, m, &tmp, 0.0);
        u.axpy(dt / 6.0, &k1, 1.0);
        u.axpy(dt / 3.0, &k2, 1.0);
        u.axpy(dt / 3.0, &k3, 1.0);
        u.axpy(dt / 6.0, &k4, 1.0);
    };

    let mut out = Vec::with_capacity(times.len());
    out.push(u0.to_vec());
    let mut t = times[0];
    for &target in &times[1..] {
        // whole steps, then one short step to land on the snapshot
        let span = target - t;
        let whole = (span / dt * (1.0 - 1e-12)).floor() as usize;
        for _ in 0..whole {
            step(&mut u, dt);
        }
        let rest = span - whole as f64 * dt;
        if rest > 0.0 {
            step(&mut u, rest);
        }
        t = target;
        out.push(u.iter().copied().collect());
    }
    Ok(out)
}

/// Exact solution `V exp(tD) V^{-1} u0` from the dense real Schur-form
/// eigenvectors.
fn expansion_snapshots(op: &OperatorMatrix, u0: &[f64], times: &[f64]) -> Result<Vec<Vec<f64>>> {
    let dec = eigen_decomposition(op.matrix())?;
    let vectors: &DMatrix<f64> = &dec.vectors;
    let lu = vectors.clone().lu();
    let c = lu
        .solve(&DVector::from_column_slice(u0))
        .ok_or_else(|| Error::InvalidArgument("eigenvector matrix is singular".into()))?;
    let n = u0.len();
    let values: &[Complex64] = &dec.values;

    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let mut ct = DVector::zeros(n);
        let mut i = 0;
        while i < n {
            let z = values[i];
            if z.im == 0.0 || i + 1 == n {
                ct[i] = (z.re * t).exp() * c[i];
                i += 1;
            } else {
                // real block [[a, b], [-b, a]] on columns (i, i + 1)
                let (a, b) = (z.re, z.im);
                let e = (a * t).exp();
                let (s, co) = (b * t).sin_cos();
                ct[i] = e * (co * c[i] + s * c[i + 1]);
                ct[i + 1] = e * (-s * c[i] + co * c[i + 1]);
                i += 2;
            }
        }
        out.push((vectors * ct).iter().copied().collect());
    }
    Ok(out)
}

/// Least-squares slope of `ln |u|_2` over snapshots in `[t0, t1]`.
pub fn fit_decay_rate(trace: &EvolutionTrace, window: (f64, f64)) -> Result<f64> {
    let (t0, t1) = window;
    let mut pts = Vec::new();
    for (&t, &l2) in trace.times.iter().zip(&trace.l2_norms) {
        if t >= t0 && t <= t1 {
            if !(l2 > 0.0) {
                return Err(Error::ZeroNorm { time: t });
            }
            pts.push((t, l2.ln()));
        }
    }
    if pts.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "fit window [{t0}, {t1}] holds {} snapshot(s)",
            pts.len()
        )));
    }
    let k = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExtinctionSummary {
    pub extinct: bool,
    /// Final over initial L2 norm.
    pub ratio: f64,
    /// Earliest snapshot after which the L2 norm decreases strictly.
    pub monotone_from: Option<f64>,
}

pub fn check_extinction(trace: &EvolutionTrace) -> ExtinctionSummary {
    let l2 = &trace.l2_norms;
    let ratio = match (l2.first(), l2.last()) {
        (Some(&a), Some(&b)) if a > 0.0 => b / a,
        _ => f64::NAN,
    };
    let mut onset = l2.len().saturating_sub(1);
    while onset > 0 && l2[onset - 1] > l2[onset] {
        onset -= 1;
    }
    let monotone_from = (l2.len() >= 2 && onset + 1 < l2.len()).then(|| trace.times[onset]);
    ExtinctionSummary {
        extinct: monotone_from.is_some() && ratio < EXTINCTION_RATIO,
        ratio,
        monotone_from,
    }
}
