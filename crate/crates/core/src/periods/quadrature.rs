//! Gauss-Jacobi rules on `[0, 1]` for weights `(1 - t)^alpha t^beta`,
//! computed by the Golub-Welsch method, plus a tanh-sinh rule for endpoint
//! singular integrands.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use statrs::function::gamma::ln_gamma;

/// Nodes in `(0, 1)` and weights for `int_0^1 (1-t)^alpha t^beta f(t) dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    /// `1 - node`, kept separately so that endpoint distances keep full precision.
    pub co_nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn cache() -> &'static Mutex<HashMap<(usize, u64, u64), Arc<Rule>>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u64, u64), Arc<Rule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Cached [`gauss_jacobi_uncached`].
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Arc<Rule> {
    let key = (n, alpha.to_bits(), beta.to_bits());
    if let Some(rule) = cache().lock().expect("cache lock").get(&key) {
        return rule.clone();
    }
    let rule = Arc::new(gauss_jacobi_uncached(n, alpha, beta));
    cache().lock().expect("cache lock").insert(key, rule.clone());
    rule
}

pub fn gauss_legendre(n: usize) -> Arc<Rule> {
    gauss_jacobi(n, 0.0, 0.0)
}

/// `n`-point Gauss rule for `(1-t)^alpha t^beta` on `[0,1]`, `alpha, beta > -1`.
pub fn gauss_jacobi_uncached(n: usize, alpha: f64, beta: f64) -> Rule {
    assert!(n >= 1 && alpha > -1.0 && beta > -1.0);
    // Jacobi matrix for (1-x)^alpha (1+x)^beta on [-1, 1].
    let ab = alpha + beta;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    for (k, d) in diag.iter_mut().enumerate() {
        let k = k as f64;
        let s = 2.0 * k + ab;
        *d = if k == 0.0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / (s * (s + 2.0))
        };
    }
    for k in 1..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        let b2 = if k == 1 {
            4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
        };
        off[k - 1] = b2.sqrt();
    }
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    tridiagonal_ql(&mut diag, &mut off, &mut z);
    let log_mu0 = (ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
        - ln_gamma(ab + 2.0);
    // Map x in [-1,1] to t = (1+x)/2; the weight picks up 2^-(alpha+beta+1).
    let scale = (log_mu0 - (ab + 1.0) * std::f64::consts::LN_2).exp();
    let mut pairs: Vec<(f64, f64)> = diag.iter().zip(&z).map(|(&x, &zi)| (x, scale * zi * zi)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Rule {
        nodes: pairs.iter().map(|(x, _)| (1.0 + x) / 2.0).collect(),
        co_nodes: pairs.iter().map(|(x, _)| (1.0 - x) / 2.0).collect(),
        weights: pairs.iter().map(|(_, w)| *w).collect(),
    }
}

/// Implicit QL on a symmetric tridiagonal matrix; on exit `d` holds the
/// eigenvalues and `z` the first components of the normalised eigenvectors.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) {
    let n = d.len();
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            assert!(iterations < 100, "tridiagonal QL did not converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// Tanh-sinh approximation of `int_0^1 f(t, 1 - t) dt` with step `h`.
/// The integrand receives both `t` and `1 - t` to keep endpoint precision.
pub fn tanh_sinh<F, T>(f: F, h: f64, zero: T) -> T
where
    F: Fn(f64, f64) -> T,
    T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Copy,
{
    let pi = std::f64::consts::PI;
    let mut sum = zero;
    let kmax = (6.5 / h).ceil() as i64;
    for k in -kmax..=kmax {
        let u = k as f64 * h;
        let s = pi * u.sinh();
        let t = 1.0 / (1.0 + (-s).exp());
        let ct = 1.0 / (1.0 + s.exp());
        if t <= 0.0 || ct <= 0.0 {
            continue;
        }
        let w = h * pi * u.cosh() * t * ct;
        sum = sum + f(t, ct) * w;
    }
    sum
}
