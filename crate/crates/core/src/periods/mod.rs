//! Numerical period matrices of superelliptic curves `y^m = prod (x - a_i)`,
//! with the family `y^4 = x (x - 1) (x - kappa)` and hyperelliptic reference
//! curves as the main customers.

mod curve;
mod cycles;
pub mod quadrature;
mod symplectic_basis;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::siegel::{SiegelError, SiegelPoint};

pub use curve::{is_full_cycle, Differential, SuperellipticCurve};
pub use cycles::sorted_chain;
pub use symplectic_basis::symplectic_basis;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PeriodError {
    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),
    #[error("unsupported curve: {0}")]
    UnsupportedCurve(String),
    #[error("branch values {0} and {1} coincide")]
    CoincidentBranchPoints(usize, usize),
    #[error("found {found} holomorphic differentials, expected genus {genus}")]
    BasisCountMismatch { found: usize, genus: usize },
    #[error("quadrature did not converge on segment {segment} for dx/y^{j}")]
    QuadratureNonConvergence { segment: usize, j: u32 },
    #[error("cycles do not span a unimodular lattice: {0}")]
    RankDeficientCycles(String),
    #[error("intersection matrix is not skew-symmetric")]
    InconsistentIntersections,
    #[error("small period matrix is not symmetric: asymmetry {0:e}")]
    SymmetryViolation(f64),
    #[error("imaginary part of the period matrix is not definite")]
    NotPositiveDefinite,
    #[error(transparent)]
    Siegel(#[from] SiegelError),
}

/// Order in which the branch values are joined into a chain of segments.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ChainOrder {
    #[default]
    Sorted,
    Reversed,
}

impl ChainOrder {
    pub fn order(&self, roots: &[Complex64]) -> Vec<usize> {
        let mut order = sorted_chain(roots);
        if *self == ChainOrder::Reversed {
            order.reverse();
        }
        order
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodParams {
    /// Relative change between node doublings at which a segment integral is accepted.
    pub tol: f64,
    pub min_nodes: usize,
    /// Cap on Gauss nodes per piece before falling back to tanh-sinh.
    pub max_nodes: usize,
    /// Relative asymmetry of the small period matrix tolerated before symmetrising; errors above ten times this.
    pub symmetry_tol: f64,
    pub chain: ChainOrder,
}

impl Default for PeriodParams {
    fn default() -> Self {
        PeriodParams {
            tol: 1e-12,
            min_nodes: 16,
            max_nodes: 512,
            symmetry_tol: 1e-9,
            chain: ChainOrder::Sorted,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PeriodData {
    /// The curve actually integrated, of degree coprime to `m`.
    pub curve: SuperellipticCurve,
    pub basis: Vec<Differential>,
    /// `g x 2g`: differential `i` integrated over chain cycle `c`.
    pub big_periods: DMatrix<Complex64>,
    /// Intersection numbers of the chain cycles.
    pub intersections: DMatrix<i64>,
    /// Rows are the symplectic basis `A_1..A_g, B_1..B_g` in chain-cycle coordinates.
    pub change_of_basis: DMatrix<i64>,
    pub omega: SiegelPoint,
}

/// `D_kappa : y^4 = x (x - 1) (x - kappa)` with `kappa = 1/n`.
pub fn curve_from_n(n: Complex64) -> Result<SuperellipticCurve, PeriodError> {
    if n.norm() == 0.0 || (n - 1.0).norm() == 0.0 {
        return Err(PeriodError::DegenerateParameter(format!("n = {n} must avoid 0 and 1")));
    }
    curve_from_kappa(n.inv())
}

pub fn curve_from_kappa(kappa: Complex64) -> Result<SuperellipticCurve, PeriodError> {
    if kappa.norm() == 0.0 || (kappa - 1.0).norm() == 0.0 || !kappa.re.is_finite() || !kappa.im.is_finite() {
        return Err(PeriodError::DegenerateParameter(format!("kappa = {kappa} must avoid 0, 1, infinity")));
    }
    SuperellipticCurve::new(4, vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), kappa])
}

/// The genus-three hyperelliptic curve `y^2 = x^8 - 1`.
pub fn hyperelliptic_reference_curve() -> SuperellipticCurve {
    let roots = (0..8)
        .map(|k| Complex64::from_polar(1.0, std::f64::consts::PI * k as f64 / 4.0))
        .collect();
    SuperellipticCurve::new(2, roots).expect("eighth roots of unity are distinct")
}

pub fn hyperelliptic_reference(params: &PeriodParams) -> Result<SiegelPoint, PeriodError> {
    Ok(period_data(&hyperelliptic_reference_curve(), params)?.omega)
}

pub fn small_period_matrix(curve: &SuperellipticCurve, params: &PeriodParams) -> Result<SiegelPoint, PeriodError> {
    Ok(period_data(curve, params)?.omega)
}

/// Periods over the chain cycles, a symplectic basis for them, and the normalised period matrix.
pub fn period_data(curve: &SuperellipticCurve, params: &PeriodParams) -> Result<PeriodData, PeriodError> {
    if !(params.tol > 0.0) || params.min_nodes == 0 || params.max_nodes < params.min_nodes {
        return Err(PeriodError::UnsupportedCurve(format!("bad quadrature parameters {params:?}")));
    }
    let curve = curve.with_coprime_degree()?;
    let basis = curve.holomorphic_basis()?;
    let g = basis.len();
    if g == 0 {
        return Err(PeriodError::UnsupportedCurve("genus zero".into()));
    }
    let data = cycles::cycle_data(&curve, &basis, params)?;
    let change = symplectic_basis(&data.intersections)?;
    if change.nrows() != 2 * g {
        return Err(PeriodError::RankDeficientCycles(format!(
            "symplectic rank {} for genus {g}",
            change.nrows()
        )));
    }
    let t = change.map(|v| Complex64::new(v as f64, 0.0));
    let w = &data.periods * t.transpose();
    let wa = w.columns(0, g).into_owned();
    let wb = w.columns(g, g).into_owned();
    let inv = wa
        .clone()
        .try_inverse()
        .ok_or_else(|| PeriodError::RankDeficientCycles("A-periods are singular".into()))?;
    let mut omega = inv * wb;

    let scale = omega.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let asym = (0..g)
        .flat_map(|i| (0..g).map(move |j| (i, j)))
        .map(|(i, j)| (omega[(i, j)] - omega[(j, i)]).norm())
        .fold(0.0, f64::max)
        / scale;
    if asym > 10.0 * params.symmetry_tol {
        return Err(PeriodError::SymmetryViolation(asym));
    }
    let im = omega.map(|z| z.im);
    let im = (&im + im.transpose()) * 0.5;
    let eig = im.symmetric_eigenvalues();
    let (lo, hi) = (eig.min(), eig.max());
    let mut change = change;
    if lo <= 0.0 && hi >= 0.0 {
        return Err(PeriodError::NotPositiveDefinite);
    }
    if hi < 0.0 {
        // Opposite orientation: (A, -B) is the symplectic basis.
        omega = -omega;
        for r in g..2 * g {
            for c in 0..change.ncols() {
                change[(r, c)] = -change[(r, c)];
            }
        }
    }
    let omega = SiegelPoint::with_tolerance(omega, 10.0 * params.symmetry_tol)?;
    Ok(PeriodData {
        curve,
        basis,
        big_periods: data.periods,
        intersections: data.intersections,
        change_of_basis: change,
        omega,
    })
}
