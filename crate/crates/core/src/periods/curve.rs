//! Superelliptic curves `y^m = prod (x - a_i)` and their holomorphic differentials.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
use serde::Serialize;

use super::PeriodError;

#[derive(Debug, Clone, PartialEq)]
pub struct SuperellipticCurve {
    m: u32,
    roots: Vec<Complex64>,
}

/// The differential `x^p dx / y^j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Differential {
    pub p: u32,
    pub j: u32,
}

impl SuperellipticCurve {
    pub fn new(m: u32, roots: Vec<Complex64>) -> Result<SuperellipticCurve, PeriodError> {
        if m < 2 {
            return Err(PeriodError::UnsupportedCurve(format!("exponent m = {m} < 2")));
        }
        if roots.len() < 2 {
            return Err(PeriodError::UnsupportedCurve(format!("only {} branch values", roots.len())));
        }
        if roots.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(PeriodError::UnsupportedCurve("non-finite branch value".into()));
        }
        let scale = roots.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for i in 0..roots.len() {
            for j in i + 1..roots.len() {
                if (roots[i] - roots[j]).norm() <= 1e-14 * scale {
                    return Err(PeriodError::CoincidentBranchPoints(i, j));
                }
            }
        }
        Ok(SuperellipticCurve { m, roots })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn degree(&self) -> u32 {
        self.roots.len() as u32
    }

    /// Number of points above infinity, `gcd(m, n)`.
    pub fn points_at_infinity(&self) -> u32 {
        self.m.gcd(&self.degree())
    }

    /// `((n - 1)(m - 1) + 1 - gcd(m, n)) / 2`.
    pub fn genus(&self) -> u32 {
        let (m, n, d) = (self.m, self.degree(), self.points_at_infinity());
        ((n - 1) * (m - 1) + 1 - d) / 2
    }

    pub fn eval_f(&self, x: Complex64) -> Complex64 {
        self.roots.iter().map(|a| x - a).product()
    }

    /// Order of vanishing of `x^p dx / y^j` at a finite branch point, in the
    /// local parameter `w` with `x - a = w^m`, `y ~ w`.
    pub fn valuation_at_branch_point(&self, w: Differential) -> i64 {
        self.m as i64 - 1 - w.j as i64
    }

    /// Order of vanishing at each point above infinity, with local parameter
    /// `s`, `x = s^-e`, `y ~ s^(-n/d)`, `e = m/d`.
    pub fn valuation_at_infinity(&self, w: Differential) -> i64 {
        let d = self.points_at_infinity() as i64;
        let (m, n) = (self.m as i64, self.degree() as i64);
        let e = m / d;
        w.j as i64 * n / d - e * (w.p as i64 + 1) - 1
    }

    /// `x^p dx / y^j` with `1 <= j < m` that are holomorphic everywhere.
    pub fn holomorphic_basis(&self) -> Result<Vec<Differential>, PeriodError> {
        let mut basis = Vec::new();
        for j in 1..self.m {
            for p in 0..self.degree() {
                let w = Differential { p, j };
                if self.valuation_at_branch_point(w) >= 0 && self.valuation_at_infinity(w) >= 0 {
                    basis.push(w);
                }
            }
        }
        basis.sort_by_key(|w| (w.j, w.p));
        if basis.len() != self.genus() as usize {
            return Err(PeriodError::BasisCountMismatch {
                found: basis.len(),
                genus: self.genus() as usize,
            });
        }
        Ok(basis)
    }

    /// An isomorphic curve of degree coprime to `m`, obtained by moving the
    /// first branch value to infinity when `m` divides the degree.
    pub fn with_coprime_degree(&self) -> Result<SuperellipticCurve, PeriodError> {
        let d = self.points_at_infinity();
        if d == 1 {
            return Ok(self.clone());
        }
        if d != self.m {
            return Err(PeriodError::UnsupportedCurve(format!(
                "gcd(m, n) = {d} is neither 1 nor m = {}",
                self.m
            )));
        }
        // x = a + 1/u turns prod (x - a_i) into a constant times u^-n prod (u - 1/(a_i - a)).
        let a = self.roots[0];
        let roots = self.roots[1..].iter().map(|ai| (ai - a).inv()).collect();
        SuperellipticCurve::new(self.m, roots)
    }

    /// The sheet permutation of `y` along a positively oriented circle around
    /// each finite branch value and around all of them (infinity).
    pub fn monodromy(&self) -> Vec<Vec<usize>> {
        let n = self.roots.len();
        let mut perms = Vec::with_capacity(n + 1);
        for (i, a) in self.roots.iter().enumerate() {
            let r = (0..n)
                .filter(|&k| k != i)
                .map(|k| (self.roots[k] - a).norm())
                .fold(f64::INFINITY, f64::min)
                * 0.3;
            perms.push(self.track_circle(*a, r));
        }
        let big = self.roots.iter().map(|z| z.norm()).fold(0.0, f64::max) * 2.0 + 1.0;
        perms.push(self.track_circle(Complex64::new(0.0, 0.0), big));
        perms
    }

    fn track_circle(&self, center: Complex64, radius: f64) -> Vec<usize> {
        let m = self.m as usize;
        let zeta = Complex64::from_polar(1.0, 2.0 * PI / m as f64);
        let steps = 2048;
        let at = |k: usize| center + Complex64::from_polar(radius, 2.0 * PI * k as f64 / steps as f64);
        let start: Vec<Complex64> = {
            let y0 = self.eval_f(at(0)).powf(1.0 / m as f64);
            (0..m).map(|s| y0 * zeta.powu(s as u32)).collect()
        };
        let mut current = start.clone();
        for k in 1..=steps {
            let y = self.eval_f(at(k)).powf(1.0 / m as f64);
            let candidates: Vec<Complex64> = (0..m).map(|s| y * zeta.powu(s as u32)).collect();
            for value in current.iter_mut() {
                *value = *candidates
                    .iter()
                    .min_by(|a, b| (*a - *value).norm().total_cmp(&(*b - *value).norm()))
                    .expect("m candidates");
            }
        }
        current
            .iter()
            .map(|v| {
                (0..m)
                    .min_by(|&a, &b| (start[a] - v).norm().total_cmp(&(start[b] - v).norm()))
                    .expect("m sheets")
            })
            .collect()
    }
}

/// Whether `perm` is a single cycle through all of its elements.
pub fn is_full_cycle(perm: &[usize]) -> bool {
    let mut seen = 0;
    let mut i = 0;
    loop {
        i = perm[i];
        seen += 1;
        if i == 0 {
            return seen == perm.len();
        }
        if seen > perm.len() {
            return false;
        }
    }
}
