//! Theta constants by enumeration of lattice points in an ellipsoid.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{Characteristic, EvalParams, SiegelError, SiegelPoint};

/// Neumaier-compensated accumulator for a complex sum.
#[derive(Default)]
struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

impl CompensatedSum {
    fn add_part(acc: &mut (f64, f64), x: f64) {
        let t = acc.0 + x;
        if acc.0.abs() >= x.abs() {
            acc.1 += (acc.0 - t) + x;
        } else {
            acc.1 += (x - t) + acc.0;
        }
        acc.0 = t;
    }

    fn add(&mut self, z: Complex64) {
        Self::add_part(&mut self.re, z.re);
        Self::add_part(&mut self.im, z.im);
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

/// Radius `R` such that the terms with `v^T Y v > R^2` sum to at most `tol`.
///
/// Uses `exp(-pi Q) <= exp(-pi R^2 / 2) exp(-pi Q / 2)` on the tail and
/// bounds the full sum of `exp(-pi Q / 2)` by `(1 + sqrt(2 / lambda_min))^g`.
pub fn truncation_radius(point: &SiegelPoint, tol: f64) -> f64 {
    let g = point.genus() as f64;
    let lambda_min = point.min_eigenvalue_im();
    let log_bound = g * (1.0 + (2.0 / lambda_min).sqrt()).ln();
    let r2 = 2.0 / PI * (log_bound - tol.ln());
    r2.max(0.0).sqrt()
}

/// `theta[eps](0, Omega)` to absolute accuracy `params.tol`.
pub fn theta_null(ch: &Characteristic, point: &SiegelPoint, params: &EvalParams) -> Result<Complex64, SiegelError> {
    params.validate()?;
    check_characteristic(ch, point)?;
    let radius = truncation_radius(point, params.tol);
    // Euclidean extent of the ellipsoid; the enumeration visits about extent^g points.
    let extent = radius / point.min_eigenvalue_im().sqrt();
    if extent > params.max_radius {
        return Err(SiegelError::TruncationRadiusExceeded {
            required: extent,
            max: params.max_radius,
        });
    }
    Ok(theta_null_with_radius(ch, point, radius))
}

fn check_characteristic(ch: &Characteristic, point: &SiegelPoint) -> Result<(), SiegelError> {
    if ch.g != point.genus() {
        return Err(SiegelError::GenusMismatch {
            expected: point.genus(),
            found: ch.g,
        });
    }
    if !ch.is_even() {
        return Err(SiegelError::OddCharacteristic);
    }
    Ok(())
}

/// The theta sum over all `v in Z^g + eps1` with `v^T (Im Omega) v <= radius^2`.
pub fn theta_null_with_radius(ch: &Characteristic, point: &SiegelPoint, radius: f64) -> Complex64 {
    let g = point.genus();
    let l = point.cholesky_im();
    let x = point.re();
    let eps1 = ch.eps1();
    let eps2 = ch.eps2();
    let mut sum = CompensatedSum::default();
    let mut v = vec![0.0; g];
    // Fincke-Pohst: with Y = L L^T, Q(v) = |L^T v|^2 and (L^T v)_i only involves v_i..v_{g-1}.
    fn descend(
        i: usize,
        rem: f64,
        v: &mut Vec<f64>,
        l: &nalgebra::DMatrix<f64>,
        eps1: &[f64],
        visit: &mut dyn FnMut(&[f64], f64),
        q_so_far: f64,
    ) {
        let g = v.len();
        let shift: f64 = (i + 1..g).map(|j| l[(j, i)] * v[j]).sum();
        let lii = l[(i, i)];
        let span = rem.max(0.0).sqrt();
        let lo = ((-shift - span) / lii - eps1[i]).ceil() as i64;
        let hi = ((-shift + span) / lii - eps1[i]).floor() as i64;
        for n in lo..=hi {
            v[i] = n as f64 + eps1[i];
            let coord = lii * v[i] + shift;
            let c2 = coord * coord;
            if c2 > rem {
                continue;
            }
            if i == 0 {
                visit(v, q_so_far + c2);
            } else {
                descend(i - 1, rem - c2, v, l, eps1, visit, q_so_far + c2);
            }
        }
    }
    let mut visit = |v: &[f64], q: f64| {
        let mut phase = 0.0;
        for a in 0..g {
            phase += x[(a, a)] * v[a] * v[a] + 2.0 * v[a] * eps2[a];
            for b in a + 1..g {
                phase += 2.0 * x[(a, b)] * v[a] * v[b];
            }
        }
        sum.add(Complex64::from_polar((-PI * q).exp(), PI * phase));
    };
    descend(g - 1, radius * radius, &mut v, l, &eps1, &mut visit, 0.0);
    sum.value()
}
