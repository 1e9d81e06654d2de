//! Integral symplectic matrices, their action on Siegel space, and a
//! best-effort reduction towards the Siegel fundamental domain.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use super::{SiegelError, SiegelPoint};

/// A `2g x 2g` integer matrix `gamma` with `gamma^T J gamma = J`, `J = [[0, I], [-I, 0]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticMatrix {
    g: usize,
    m: DMatrix<i64>,
}

impl SymplecticMatrix {
    pub fn new(m: DMatrix<i64>) -> Result<SymplecticMatrix, SiegelError> {
        let n = m.nrows();
        if n == 0 || n % 2 == 1 || m.ncols() != n {
            return Err(SiegelError::NotSymplectic);
        }
        let g = n / 2;
        let j = |r: usize, c: usize| -> i128 {
            if c == r + g {
                1
            } else if r == c + g {
                -1
            } else {
                0
            }
        };
        // (gamma^T J gamma)_{rc} = sum_{a,b} gamma_{ar} J_{ab} gamma_{bc}
        for r in 0..n {
            for c in 0..n {
                let mut s: i128 = 0;
                for a in 0..n {
                    for b in 0..n {
                        let jab = j(a, b);
                        if jab != 0 {
                            s += m[(a, r)] as i128 * jab * m[(b, c)] as i128;
                        }
                    }
                }
                if s != j(r, c) {
                    return Err(SiegelError::NotSymplectic);
                }
            }
        }
        Ok(SymplecticMatrix { g, m })
    }

    pub fn identity(g: usize) -> SymplecticMatrix {
        SymplecticMatrix {
            g,
            m: DMatrix::identity(2 * g, 2 * g),
        }
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn matrix(&self) -> &DMatrix<i64> {
        &self.m
    }

    fn block(&self, r: usize, c: usize) -> DMatrix<Complex64> {
        let g = self.g;
        DMatrix::from_fn(g, g, |i, j| Complex64::new(self.m[(r * g + i, c * g + j)] as f64, 0.0))
    }

    /// `self * other`.
    pub fn compose(&self, other: &SymplecticMatrix) -> SymplecticMatrix {
        assert_eq!(self.g, other.g);
        SymplecticMatrix {
            g: self.g,
            m: &self.m * &other.m,
        }
    }

    /// The inverse `-J gamma^T J`.
    pub fn inverse(&self) -> SymplecticMatrix {
        let g = self.g;
        let block = |r: usize, c: usize| self.m.view((r * g, c * g), (g, g)).transpose();
        // gamma = [[A, B], [C, D]]  =>  gamma^-1 = [[D^T, -B^T], [-C^T, A^T]]
        let mut inv = DMatrix::zeros(2 * g, 2 * g);
        inv.view_mut((0, 0), (g, g)).copy_from(&block(1, 1));
        inv.view_mut((0, g), (g, g)).copy_from(&(-block(0, 1)));
        inv.view_mut((g, 0), (g, g)).copy_from(&(-block(1, 0)));
        inv.view_mut((g, g), (g, g)).copy_from(&block(0, 0));
        SymplecticMatrix { g, m: inv }
    }

    fn from_blocks(a: &DMatrix<i64>, b: &DMatrix<i64>, c: &DMatrix<i64>, d: &DMatrix<i64>) -> SymplecticMatrix {
        let g = a.nrows();
        let mut m = DMatrix::zeros(2 * g, 2 * g);
        m.view_mut((0, 0), (g, g)).copy_from(a);
        m.view_mut((0, g), (g, g)).copy_from(b);
        m.view_mut((g, 0), (g, g)).copy_from(c);
        m.view_mut((g, g), (g, g)).copy_from(d);
        SymplecticMatrix::new(m).expect("generator is symplectic")
    }
}

/// `[[I, S], [0, I]]` for an integer symmetric `S`.
pub fn translation(s: &DMatrix<i64>) -> Result<SymplecticMatrix, SiegelError> {
    let g = s.nrows();
    if s != &s.transpose() {
        return Err(SiegelError::NotSymplectic);
    }
    Ok(SymplecticMatrix::from_blocks(
        &DMatrix::identity(g, g),
        s,
        &DMatrix::zeros(g, g),
        &DMatrix::identity(g, g),
    ))
}

/// `diag(U, U^-T)` for a unimodular integer `U`.
pub fn rotation(u: &DMatrix<i64>) -> Result<SymplecticMatrix, SiegelError> {
    let g = u.nrows();
    let inv = u
        .map(|x| x as f64)
        .try_inverse()
        .ok_or(SiegelError::NotSymplectic)?
        .map(|x| x.round() as i64);
    if u * &inv != DMatrix::identity(g, g) {
        return Err(SiegelError::NotSymplectic);
    }
    Ok(SymplecticMatrix::from_blocks(
        u,
        &DMatrix::zeros(g, g),
        &DMatrix::zeros(g, g),
        &inv.transpose(),
    ))
}

/// The partial inversion `tau_kk -> -1/tau_kk` in coordinate `k`.
pub fn quasi_inversion(g: usize, k: usize) -> SymplecticMatrix {
    let mut a = DMatrix::identity(g, g);
    let mut b = DMatrix::zeros(g, g);
    let mut c = DMatrix::zeros(g, g);
    a[(k, k)] = 0;
    b[(k, k)] = -1;
    c[(k, k)] = 1;
    let d = a.clone();
    SymplecticMatrix::from_blocks(&a, &b, &c, &d)
}

/// A product of `steps` random elementary generators.
pub fn random_symplectic<R: Rng + ?Sized>(rng: &mut R, g: usize, steps: usize) -> SymplecticMatrix {
    let mut gamma = SymplecticMatrix::identity(g);
    for _ in 0..steps {
        let step = match rng.gen_range(0..3) {
            0 => {
                let mut s = DMatrix::zeros(g, g);
                for i in 0..g {
                    for j in i..g {
                        let x = rng.gen_range(-2..=2);
                        s[(i, j)] = x;
                        s[(j, i)] = x;
                    }
                }
                translation(&s).expect("symmetric")
            }
            1 => {
                let mut u = DMatrix::identity(g, g);
                if g > 1 {
                    let i = rng.gen_range(0..g);
                    let j = (i + rng.gen_range(1..g)) % g;
                    u[(i, j)] = if rng.gen_bool(0.5) { 1 } else { -1 };
                } else {
                    u[(0, 0)] = -1;
                }
                rotation(&u).expect("unimodular")
            }
            _ => quasi_inversion(g, rng.gen_range(0..g)),
        };
        gamma = step.compose(&gamma);
    }
    gamma
}

/// `Omega -> (A Omega + B)(C Omega + D)^-1`.
pub fn sp_transform(point: &SiegelPoint, gamma: &SymplecticMatrix) -> Result<SiegelPoint, SiegelError> {
    if gamma.genus() != point.genus() {
        return Err(SiegelError::NotSymplectic);
    }
    let omega = point.omega();
    let num = gamma.block(0, 0) * omega + gamma.block(0, 1);
    let den = gamma.block(1, 0) * omega + gamma.block(1, 1);
    let scale = den.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let lu = den.lu();
    let det = lu.determinant();
    if det.norm() <= 1e-14 * scale.powi(point.genus() as i32) {
        return Err(SiegelError::SingularDenominator);
    }
    let inv = lu.try_inverse().ok_or(SiegelError::SingularDenominator)?;
    SiegelPoint::with_tolerance(num * inv, 1e-7)
}

/// Result of [`siegel_reduce`]: `point = gamma . input`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub point: SiegelPoint,
    pub gamma: SymplecticMatrix,
    pub iterations: usize,
    /// The iteration cap was hit before a fixpoint.
    pub capped: bool,
}

const REDUCTION_CAP: usize = 200;

/// LLL-reduces `Im Omega`, moves `Re Omega` into `[-1/2, 1/2]` and applies the
/// partial inversion while `|Omega_11| < 1`, until nothing changes.
pub fn siegel_reduce(point: &SiegelPoint) -> Reduction {
    let g = point.genus();
    let mut gamma = SymplecticMatrix::identity(g);
    let mut current = point.clone();
    for iteration in 0..REDUCTION_CAP {
        let u = lll_gram(&current.im());
        if u != DMatrix::identity(g, g) {
            let step = rotation(&u).expect("LLL transforms are unimodular");
            current = sp_transform(&current, &step).expect("rotation keeps Siegel space");
            gamma = step.compose(&gamma);
        }
        let shift = current.re().map(|x| -(x.round() as i64));
        if shift.iter().any(|&x| x != 0) {
            let step = translation(&shift).expect("symmetric");
            current = sp_transform(&current, &step).expect("translation keeps Siegel space");
            gamma = step.compose(&gamma);
        }
        if current.omega()[(0, 0)].norm() < 1.0 - 1e-12 {
            let step = quasi_inversion(g, 0);
            current = sp_transform(&current, &step).expect("partial inversion keeps Siegel space");
            gamma = step.compose(&gamma);
            continue;
        }
        return Reduction {
            point: current,
            gamma,
            iterations: iteration + 1,
            capped: false,
        };
    }
    Reduction {
        point: current,
        gamma,
        iterations: REDUCTION_CAP,
        capped: true,
    }
}

/// Unimodular `U` whose rows form an LLL-reduced basis for the form `Y`,
/// i.e. `U Y U^T` is LLL-reduced (`delta = 0.99`).
fn lll_gram(y: &DMatrix<f64>) -> DMatrix<i64> {
    let g = y.nrows();
    let mut u: DMatrix<i64> = DMatrix::identity(g, g);
    if g == 1 {
        return u;
    }
    let gram_schmidt = |u: &DMatrix<i64>| -> (DMatrix<f64>, Vec<f64>) {
        let uf = u.map(|x| x as f64);
        let gram = &uf * y * uf.transpose();
        let mut mu = DMatrix::zeros(g, g);
        let mut bstar = vec![0.0; g];
        for i in 0..g {
            for j in 0..i {
                let mut s = gram[(i, j)];
                for k in 0..j {
                    s -= mu[(j, k)] * mu[(i, k)] * bstar[k];
                }
                mu[(i, j)] = s / bstar[j];
            }
            let mut s = gram[(i, i)];
            for k in 0..i {
                s -= mu[(i, k)] * mu[(i, k)] * bstar[k];
            }
            bstar[i] = s;
        }
        (mu, bstar)
    };
    let mut k = 1;
    let mut guard = 0;
    while k < g && guard < 10_000 {
        guard += 1;
        for j in (0..k).rev() {
            let (mu, _) = gram_schmidt(&u);
            let q = mu[(k, j)].round() as i64;
            if q != 0 {
                for c in 0..g {
                    u[(k, c)] -= q * u[(j, c)];
                }
            }
        }
        let (mu, bstar) = gram_schmidt(&u);
        if bstar[k] >= (0.99 - mu[(k, k - 1)].powi(2)) * bstar[k - 1] {
            k += 1;
        } else {
            u.swap_rows(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    u
}
