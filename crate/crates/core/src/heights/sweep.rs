//! The `kappa` sweep: `F(n) = -(1/18) log ||chi'_18||(C_n)` along `C_n = D_{1/n}`.

use std::fmt::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::periods::{curve_from_n, small_period_matrix, PeriodParams};
use crate::siegel::{hodge_norm_chi18_prime, siegel_reduce, EvalParams};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: f64,
    pub kappa: f64,
    /// `det Im Omega` at the reduced point.
    pub det_im_omega: f64,
    pub log_norm_chi18: f64,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepFailure {
    pub n: f64,
    pub error: String,
}

/// Ordinary least squares `y = slope x + intercept`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    pub points: usize,
}

pub fn ols(xs: &[f64], ys: &[f64]) -> Option<Fit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).abs())
        .fold(0.0, f64::max);
    Some(Fit {
        slope,
        intercept,
        max_residual,
        points: n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub failures: Vec<SweepFailure>,
    /// `F(n)` against `log n` over the last half of the rows.
    pub f_fit: Option<Fit>,
    /// `F(n)` against `log n` over all rows.
    pub f_fit_full: Option<Fit>,
    /// `det Im Omega` against `log n` over the last half of the rows.
    pub det_fit: Option<Fit>,
    /// `F(n) + (1/2) log det Im Omega` against `log n`; eighteen times its slope is the fitted order.
    pub order_fit: Option<Fit>,
    pub fitted_order: Option<f64>,
}

pub const SWEEP_CSV_HEADER: &str = "n,kappa,det_im_omega,log_norm_chi18,F";

const SWEEP_NOTE: &str = "# F = -(1/18) log ||chi'_18||_Hdg(C_n); the archimedean lambda(C_n) is not computed and not included";

fn sweep_row(n: f64, eval: &EvalParams, periods: &PeriodParams) -> Result<SweepRow, String> {
    let curve = curve_from_n(Complex64::new(n, 0.0)).map_err(|e| e.to_string())?;
    let point = small_period_matrix(&curve, periods).map_err(|e| e.to_string())?;
    let norm = hodge_norm_chi18_prime(&point, eval).map_err(|e| e.to_string())?;
    if !norm.log_norm.is_finite() {
        return Err("chi'_18 vanishes at this point".into());
    }
    let det_im_omega = siegel_reduce(&point).point.det_im();
    Ok(SweepRow {
        n,
        kappa: 1.0 / n,
        det_im_omega,
        log_norm_chi18: norm.log_norm,
        f: -norm.log_norm / 18.0,
    })
}

/// One row per `n`, computed in parallel; a failing row is reported and does not affect the others.
pub fn kappa_sweep(ns: &[f64], eval: &EvalParams, periods: &PeriodParams) -> SweepOutcome {
    let results: Vec<(f64, Result<SweepRow, String>)> =
        ns.par_iter().map(|&n| (n, sweep_row(n, eval, periods))).collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (n, r) in results {
        match r {
            Ok(row) => rows.push(row),
            Err(error) => failures.push(SweepFailure { n, error }),
        }
    }
    let f_fit_full = ols(
        &rows.iter().map(|r| r.n.abs().ln()).collect::<Vec<_>>(),
        &rows.iter().map(|r| r.f).collect::<Vec<_>>(),
    );
    let tail = &rows[rows.len() / 2..];
    let xs: Vec<f64> = tail.iter().map(|r| r.n.abs().ln()).collect();
    let f_fit = ols(&xs, &tail.iter().map(|r| r.f).collect::<Vec<_>>());
    let det_fit = ols(&xs, &tail.iter().map(|r| r.det_im_omega).collect::<Vec<_>>());
    let order_fit = ols(&xs, &tail.iter().map(|r| r.f + 0.5 * r.det_im_omega.ln()).collect::<Vec<_>>());
    let fitted_order = order_fit.as_ref().map(|f| 18.0 * f.slope);
    SweepOutcome {
        rows,
        failures,
        f_fit,
        f_fit_full,
        det_fit,
        order_fit,
        fitted_order,
    }
}

impl SweepOutcome {
    /// CSV with the fixed column order of [`SWEEP_CSV_HEADER`]; failed rows appear as comments.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{SWEEP_NOTE}").unwrap();
        writeln!(s, "{SWEEP_CSV_HEADER}").unwrap();
        for r in &self.rows {
            writeln!(
                s,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.n, r.kappa, r.det_im_omega, r.log_norm_chi18, r.f
            )
            .unwrap();
        }
        for f in &self.failures {
            writeln!(s, "# n = {:.16e} failed: {}", f.n, f.error).unwrap();
        }
        s
    }

    /// Whether `F` increases strictly along the rows.
    pub fn f_strictly_increasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].f > w[0].f)
    }
}
