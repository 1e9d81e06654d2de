//! Points of Siegel's upper half space, theta constants with half-integer
//! characteristics, the degree-three modular form built from them, and
//! integral symplectic transformations.
//!
//! All numerics are in `f64`.

mod characteristics;
mod chi18;
mod symplectic;
mod theta;

use nalgebra::{Cholesky, DMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use characteristics::{even_characteristics, even_characteristic_count, Characteristic};
pub use chi18::{chi18_tilde, hodge_norm_chi18_prime, Chi18Value, HodgeNorm};
pub use symplectic::{
    quasi_inversion, random_symplectic, rotation, siegel_reduce, sp_transform, translation, Reduction,
    SymplecticMatrix,
};
pub use theta::{theta_null, theta_null_with_radius, truncation_radius};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SiegelError {
    #[error("not in Siegel space: {0}")]
    NotInSiegelSpace(String),
    #[error("matrix is not symmetric: max |Omega - Omega^T| = {0:e}")]
    SymmetryViolation(f64),
    #[error("characteristic is odd")]
    OddCharacteristic,
    #[error("characteristic has genus {found}, point has genus {expected}")]
    GenusMismatch { expected: usize, found: usize },
    #[error("operation needs genus 3, got {0}")]
    WrongGenus(usize),
    #[error("required lattice radius {required:.3} exceeds the maximum {max:.3}")]
    TruncationRadiusExceeded { required: f64, max: f64 },
    #[error("matrix is not an integral symplectic matrix")]
    NotSymplectic,
    #[error("C Omega + D is singular")]
    SingularDenominator,
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("malformed period matrix file: {0}")]
    Parse(String),
}

/// Evaluation controls for theta sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalParams {
    /// Absolute tolerance for each theta constant.
    pub tol: f64,
    /// Largest admissible Euclidean extent `R / sqrt(lambda_min(Im Omega))` of the
    /// summation ellipsoid `v^T (Im Omega) v <= R^2`.
    pub max_radius: f64,
    /// Reduce the point before evaluating the (invariant) Hodge norm.
    pub reduce: bool,
    /// A theta constant below this fraction of the largest one counts as zero.
    pub vanishing_tol: f64,
}

impl Default for EvalParams {
    fn default() -> Self {
        EvalParams {
            tol: 1e-12,
            max_radius: 200.0,
            reduce: true,
            vanishing_tol: 1e-8,
        }
    }
}

impl EvalParams {
    pub fn with_tol(tol: f64) -> Self {
        EvalParams {
            tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), SiegelError> {
        if !(self.tol > 0.0) || !(self.max_radius > 0.0) || !(self.vanishing_tol > 0.0) {
            return Err(SiegelError::BadParams(format!("{self:?}")));
        }
        Ok(())
    }
}

/// A symmetric complex matrix with positive-definite imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct SiegelPoint {
    omega: DMatrix<Complex64>,
    cholesky_im: DMatrix<f64>,
}

impl SiegelPoint {
    pub const SYMMETRY_TOL: f64 = 1e-9;

    /// Validates `omega`, symmetrising it when the asymmetry is within
    /// `SYMMETRY_TOL` relative to its largest entry.
    pub fn new(omega: DMatrix<Complex64>) -> Result<SiegelPoint, SiegelError> {
        Self::with_tolerance(omega, Self::SYMMETRY_TOL)
    }

    pub fn with_tolerance(omega: DMatrix<Complex64>, sym_tol: f64) -> Result<SiegelPoint, SiegelError> {
        let g = omega.nrows();
        if g == 0 || omega.ncols() != g {
            return Err(SiegelError::NotInSiegelSpace(format!(
                "expected a non-empty square matrix, got {}x{}",
                omega.nrows(),
                omega.ncols()
            )));
        }
        if omega.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SiegelError::NotInSiegelSpace("non-finite entry".into()));
        }
        let scale = omega.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let asym = (0..g)
            .flat_map(|i| (0..g).map(move |j| (i, j)))
            .map(|(i, j)| (omega[(i, j)] - omega[(j, i)]).norm())
            .fold(0.0, f64::max);
        if asym > sym_tol * scale {
            return Err(SiegelError::SymmetryViolation(asym));
        }
        let omega = (&omega + omega.transpose()).map(|z| z * 0.5);
        let im = omega.map(|z| z.im);
        let chol = Cholesky::new(im).ok_or_else(|| {
            SiegelError::NotInSiegelSpace("imaginary part is not positive definite".into())
        })?;
        Ok(SiegelPoint {
            cholesky_im: chol.l(),
            omega,
        })
    }

    pub fn from_parts(re: &DMatrix<f64>, im: &DMatrix<f64>) -> Result<SiegelPoint, SiegelError> {
        if re.shape() != im.shape() {
            return Err(SiegelError::NotInSiegelSpace("real and imaginary parts differ in shape".into()));
        }
        Self::new(re.zip_map(im, |a, b| Complex64::new(a, b)))
    }

    /// `diag(tau_1, ..., tau_g)`.
    pub fn diagonal(taus: &[Complex64]) -> Result<SiegelPoint, SiegelError> {
        let g = taus.len();
        Self::new(DMatrix::from_fn(g, g, |i, j| {
            if i == j {
                taus[i]
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn genus(&self) -> usize {
        self.omega.nrows()
    }

    pub fn omega(&self) -> &DMatrix<Complex64> {
        &self.omega
    }

    pub fn re(&self) -> DMatrix<f64> {
        self.omega.map(|z| z.re)
    }

    pub fn im(&self) -> DMatrix<f64> {
        self.omega.map(|z| z.im)
    }

    /// Lower Cholesky factor `L` of `Im Omega = L L^T`.
    pub fn cholesky_im(&self) -> &DMatrix<f64> {
        &self.cholesky_im
    }

    pub fn log_det_im(&self) -> f64 {
        2.0 * self.cholesky_im.diagonal().iter().map(|d| d.ln()).sum::<f64>()
    }

    pub fn det_im(&self) -> f64 {
        self.log_det_im().exp()
    }

    pub fn min_eigenvalue_im(&self) -> f64 {
        self.im().symmetric_eigenvalues().min()
    }

    pub fn from_json(text: &str) -> Result<SiegelPoint, SiegelError> {
        let file: OmegaFile = serde_json::from_str(text).map_err(|e| SiegelError::Parse(e.to_string()))?;
        file.to_point()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&OmegaFile::from_point(self)).expect("matrix serializes")
    }
}

/// On-disk form `{"g":3,"re":[[..]],"im":[[..]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaFile {
    pub g: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl OmegaFile {
    pub fn from_point(p: &SiegelPoint) -> OmegaFile {
        let g = p.genus();
        let rows = |m: DMatrix<f64>| (0..g).map(|i| (0..g).map(|j| m[(i, j)]).collect()).collect();
        OmegaFile {
            g,
            re: rows(p.re()),
            im: rows(p.im()),
        }
    }

    pub fn to_point(&self) -> Result<SiegelPoint, SiegelError> {
        let g = self.g;
        let ok = |m: &Vec<Vec<f64>>| m.len() == g && m.iter().all(|r| r.len() == g);
        if !ok(&self.re) || !ok(&self.im) {
            return Err(SiegelError::Parse(format!("expected {g}x{g} matrices")));
        }
        SiegelPoint::from_parts(
            &DMatrix::from_fn(g, g, |i, j| self.re[i][j]),
            &DMatrix::from_fn(g, g, |i, j| self.im[i][j]),
        )
    }
}
