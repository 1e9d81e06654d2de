//! The product of the 36 even theta constants in genus three and the
//! Hodge norm of the normalised form.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{even_characteristics, siegel_reduce, theta_null, Characteristic, EvalParams, SiegelError, SiegelPoint};

#[derive(Debug, Clone, PartialEq)]
pub struct Chi18Value {
    pub value: Complex64,
    /// `sum log |theta_eps|`; `-inf` if some factor is exactly zero.
    pub log_abs: f64,
    pub factors: Vec<(Characteristic, Complex64)>,
    /// Some factor is below `vanishing_tol` times the largest factor.
    pub vanishes: bool,
}

impl Chi18Value {
    pub fn min_factor(&self) -> (Characteristic, f64) {
        self.factors
            .iter()
            .map(|(c, z)| (*c, z.norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("36 factors")
    }
}

/// `prod_{eps even} theta[eps](0, Omega)` for `g = 3`.
pub fn chi18_tilde(point: &SiegelPoint, params: &EvalParams) -> Result<Chi18Value, SiegelError> {
    if point.genus() != 3 {
        return Err(SiegelError::WrongGenus(point.genus()));
    }
    let factors: Vec<(Characteristic, Complex64)> = even_characteristics(3)
        .into_par_iter()
        .map(|ch| theta_null(&ch, point, params).map(|t| (ch, t)))
        .collect::<Result<_, _>>()?;
    let value = factors
        .iter()
        .fold(Complex64::new(1.0, 0.0), |acc, (_, t)| acc * t);
    let log_abs: f64 = factors.iter().map(|(_, t)| t.norm().ln()).sum();
    // Zero when some factor is negligible next to the largest one; a product of
    // many moderately small factors near the boundary is not a zero.
    let largest = factors.iter().map(|(_, t)| t.norm()).fold(0.0, f64::max);
    let vanishes = factors
        .iter()
        .any(|(_, t)| t.norm() <= params.vanishing_tol * largest.max(params.tol));
    Ok(Chi18Value {
        value,
        log_abs,
        factors,
        vanishes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HodgeNorm {
    /// `log ||chi'_18||(Omega)`, `-inf` when the form vanishes.
    pub log_norm: f64,
    pub log_abs_chi18_tilde: f64,
    pub log_det_im: f64,
    pub vanishes: bool,
    pub min_theta_abs: f64,
    pub reduced: bool,
    /// Reduction stopped at its iteration cap.
    pub reduction_capped: bool,
}

impl HodgeNorm {
    pub fn norm(&self) -> f64 {
        self.log_norm.exp()
    }
}

/// `log (2^-28 (2 pi)^54 |chi~_18(Omega)| (det Im Omega)^9)`.
pub fn hodge_norm_chi18_prime(point: &SiegelPoint, params: &EvalParams) -> Result<HodgeNorm, SiegelError> {
    if point.genus() != 3 {
        return Err(SiegelError::WrongGenus(point.genus()));
    }
    let (work, capped) = if params.reduce {
        let r = siegel_reduce(point);
        (r.point, r.capped)
    } else {
        (point.clone(), false)
    };
    let chi = chi18_tilde(&work, params)?;
    let log_det_im = work.log_det_im();
    let log_norm = if chi.vanishes {
        f64::NEG_INFINITY
    } else {
        -28.0 * LN_2 + 54.0 * (2.0 * PI).ln() + chi.log_abs + 9.0 * log_det_im
    };
    Ok(HodgeNorm {
        log_norm,
        log_abs_chi18_tilde: chi.log_abs,
        log_det_im,
        vanishes: chi.vanishes,
        min_theta_abs: chi.min_factor().1,
        reduced: params.reduce,
        reduction_capped: capped,
    })
}
