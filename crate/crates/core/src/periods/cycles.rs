//! Cycles on a superelliptic curve built from lifts of the segments of a
//! chain of branch points, their periods and their intersection numbers.
//!
//! Segment `k` joins `a_k` to `a_{k+1}`. On it `y = zeta^s y_k(x)` for a fixed
//! continuous branch `y_k`; the lift on sheet `s` is `c_k^s`, and the cycle
//! `(k, s)` is `c_k^s - c_k^{s+1}` for `s = 0..m-2`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::curve::{Differential, SuperellipticCurve};
use super::quadrature::{gauss_jacobi, gauss_legendre, tanh_sinh};
use super::{PeriodError, PeriodParams};

fn root(z: Complex64, m: u32) -> Complex64 {
    z.powf(1.0 / m as f64)
}

/// Deterministic ordering of branch values: by real part, then imaginary part.
pub fn sorted_chain(roots: &[Complex64]) -> Vec<usize> {
    let scale = roots.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let key = |z: &Complex64| ((z.re / (1e-9 * scale)).round() as i64, z.im);
    let mut order: Vec<usize> = (0..roots.len()).collect();
    order.sort_by(|&a, &b| {
        let (ka, kb) = (key(&roots[a]), key(&roots[b]));
        ka.0.cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
    });
    order
}

/// One segment of the chain with its continuous branch of `y`.
struct Segment<'a> {
    m: u32,
    start: Complex64,
    delta: Complex64,
    midpoint: Complex64,
    /// `(delta)^(1/m) (-delta)^(1/m)`.
    k_const: Complex64,
    others: Vec<(Complex64, Complex64)>,
    all: &'a [Complex64],
}

impl<'a> Segment<'a> {
    fn new(m: u32, chain: &'a [Complex64], k: usize) -> Segment<'a> {
        let (a, b) = (chain[k], chain[k + 1]);
        let midpoint = (a + b) * 0.5;
        let others = chain
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k && *i != k + 1)
            .map(|(_, ai)| (*ai, root(midpoint - ai, m)))
            .collect();
        Segment {
            m,
            start: a,
            delta: b - a,
            midpoint,
            k_const: root(b - a, m) * root(a - b, m),
            others,
            all: chain,
        }
    }

    /// `prod_{i != k, k+1} (x - a_i)^(1/m)`, continued from the midpoint.
    fn far_product(&self, x: Complex64) -> Complex64 {
        self.others
            .iter()
            .map(|(ai, cr)| cr * root((x - ai) / (self.midpoint - ai), self.m))
            .product()
    }

    /// `y_k(x) / (t (1-t))^(1/m)` at `x = a_k + t delta`.
    fn smooth_y(&self, t: f64) -> Complex64 {
        self.k_const * self.far_product(self.start + self.delta * t)
    }

    /// Distance from each endpoint to the nearest other branch point, relative to the segment length.
    fn endpoint_clearance(&self) -> (f64, f64) {
        let len = self.delta.norm();
        let end = self.start + self.delta;
        let near = |p: Complex64| {
            self.all
                .iter()
                .filter(|a| (**a - self.start).norm() > 0.0 && (**a - end).norm() > 0.0)
                .map(|a| (a - p).norm() / len)
                .fold(f64::INFINITY, f64::min)
        };
        (near(self.start), near(end))
    }
}

/// Breakpoints in `[0, 1]` grading geometrically toward endpoints that have
/// another branch point nearby.
fn breakpoints(clearance: (f64, f64)) -> Vec<f64> {
    const GRADE: f64 = 0.25;
    let mut pts = vec![0.0, 1.0];
    if clearance.0 < GRADE || clearance.1 < GRADE {
        pts.push(0.5);
    }
    if clearance.0 < GRADE {
        let mut x = clearance.0.max(1e-300);
        while x < 0.5 {
            pts.push(x);
            x *= 2.0;
        }
    }
    if clearance.1 < GRADE {
        let mut x = clearance.1.max(1e-300);
        while x < 0.5 {
            pts.push(1.0 - x);
            x *= 2.0;
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-300);
    pts
}

/// `int_0^1 (t(1-t))^e g(t) dt` with `e = -j/m`, for several smooth `g`
/// evaluated together, using `n` nodes per piece.
fn integrate_pieces(
    pieces: &[f64],
    expo: f64,
    n: usize,
    g: &dyn Fn(f64) -> Vec<Complex64>,
    width: usize,
) -> Vec<Complex64> {
    let mut total = vec![Complex64::new(0.0, 0.0); width];
    let last = pieces.len() - 2;
    for (idx, win) in pieces.windows(2).enumerate() {
        let (u0, u1) = (win[0], win[1]);
        let len = u1 - u0;
        let (alpha, beta) = match (idx == 0, idx == last) {
            (true, true) => (expo, expo),
            (true, false) => (0.0, expo),
            (false, true) => (expo, 0.0),
            (false, false) => (0.0, 0.0),
        };
        let rule = if alpha == 0.0 && beta == 0.0 {
            gauss_legendre(n)
        } else {
            gauss_jacobi(n, alpha, beta)
        };
        for i in 0..rule.len() {
            let t = u0 + len * rule.nodes[i];
            let ct = 1.0 - u1 + len * rule.co_nodes[i];
            // Weight factors not absorbed by the rule.
            let mut extra = len;
            if beta == 0.0 {
                extra *= t.powf(expo);
            } else {
                extra *= len.powf(beta);
            }
            if alpha == 0.0 {
                extra *= ct.powf(expo);
            } else {
                extra *= len.powf(alpha);
            }
            let vals = g(t);
            let w = rule.weights[i] * extra;
            for (acc, v) in total.iter_mut().zip(vals) {
                *acc += v * w;
            }
        }
    }
    total
}

fn rel_change(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm() / y.norm().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

/// `I_k(p, j) = int_{a_k}^{a_{k+1}} x^p dx / y_k^j` for all basis differentials.
fn segment_integrals(
    seg: &Segment,
    basis: &[Differential],
    params: &PeriodParams,
    k: usize,
) -> Result<Vec<Complex64>, PeriodError> {
    let mut out = vec![Complex64::new(0.0, 0.0); basis.len()];
    let pieces = breakpoints(seg.endpoint_clearance());
    let mut js: Vec<u32> = basis.iter().map(|w| w.j).collect();
    js.dedup();
    for j in js {
        let idx: Vec<usize> = (0..basis.len()).filter(|&i| basis[i].j == j).collect();
        let expo = -(j as f64) / seg.m as f64;
        let g = |t: f64| -> Vec<Complex64> {
            let x = seg.start + seg.delta * t;
            let inv = seg.smooth_y(t).powu(j).inv() * seg.delta;
            idx.iter().map(|&i| x.powu(basis[i].p) * inv).collect()
        };
        let mut n = params.min_nodes;
        let mut prev = integrate_pieces(&pieces, expo, n, &g, idx.len());
        let mut converged = None;
        while n < params.max_nodes {
            n *= 2;
            let next = integrate_pieces(&pieces, expo, n, &g, idx.len());
            let change = rel_change(&prev, &next);
            prev = next;
            if change < params.tol {
                converged = Some(prev.clone());
                break;
            }
        }
        let values = match converged {
            Some(v) => v,
            None => tanh_sinh_fallback(seg, &idx, basis, j, params)
                .ok_or(PeriodError::QuadratureNonConvergence { segment: k, j })?,
        };
        for (slot, v) in idx.iter().zip(values) {
            out[*slot] = v;
        }
    }
    Ok(out)
}

fn tanh_sinh_fallback(
    seg: &Segment,
    idx: &[usize],
    basis: &[Differential],
    j: u32,
    params: &PeriodParams,
) -> Option<Vec<Complex64>> {
    let expo = -(j as f64) / seg.m as f64;
    let eval = |h: f64| -> Vec<Complex64> {
        idx.iter()
            .map(|&i| {
                let p = basis[i].p;
                let re = tanh_sinh(
                    |t, ct| {
                        let x = seg.start + seg.delta * t;
                        let v = x.powu(p) * seg.delta / seg.smooth_y(t).powu(j) * (t * ct).powf(expo);
                        v.re
                    },
                    h,
                    0.0,
                );
                let im = tanh_sinh(
                    |t, ct| {
                        let x = seg.start + seg.delta * t;
                        let v = x.powu(p) * seg.delta / seg.smooth_y(t).powu(j) * (t * ct).powf(expo);
                        v.im
                    },
                    h,
                    0.0,
                );
                Complex64::new(re, im)
            })
            .collect()
    };
    let mut h = 0.125;
    let mut prev = eval(h);
    for _ in 0..6 {
        h /= 2.0;
        let next = eval(h);
        if rel_change(&prev, &next) < params.tol.max(1e-12) {
            return Some(next);
        }
        prev = next;
    }
    None
}

/// Angle in the local uniformiser `w` (`x - b = w^m`, `y = w v(x)`) of a
/// lifted segment end leaving the branch point `b` in direction `dir`.
fn ray_angle(m: u32, y_limit: Complex64, v_b: Complex64, dir: Complex64) -> f64 {
    let approx = (y_limit / v_b).arg();
    let alpha = dir.arg();
    let t = ((m as f64 * approx - alpha) / (2.0 * PI)).round();
    ((alpha + 2.0 * PI * t) / m as f64).rem_euclid(2.0 * PI)
}

/// Everything needed downstream: cycle periods and intersection numbers.
pub struct CycleData {
    /// `periods[(i, c)]` is the integral of basis differential `i` over cycle `c`.
    pub periods: DMatrix<Complex64>,
    pub intersections: DMatrix<i64>,
}

pub fn cycle_data(
    curve: &SuperellipticCurve,
    basis: &[Differential],
    params: &PeriodParams,
) -> Result<CycleData, PeriodError> {
    let m = curve.m();
    let order = params.chain.order(curve.roots());
    let chain: Vec<Complex64> = order.iter().map(|&i| curve.roots()[i]).collect();
    let nseg = chain.len() - 1;
    let zeta = Complex64::from_polar(1.0, 2.0 * PI / m as f64);

    // v(b) = (prod_{i != b} (b - a_i))^(1/m), principal branch.
    let v: Vec<Complex64> = (0..chain.len())
        .map(|b| {
            let prod: Complex64 = (0..chain.len()).filter(|&i| i != b).map(|i| chain[b] - chain[i]).product();
            root(prod, m)
        })
        .collect();

    let segments: Vec<Segment> = (0..nseg).map(|k| Segment::new(m, &chain, k)).collect();
    let integrals: Vec<Vec<Complex64>> = {
        use rayon::prelude::*;
        (0..nseg)
            .into_par_iter()
            .map(|k| segment_integrals(&segments[k], basis, params, k))
            .collect::<Result<_, _>>()?
    };

    // Ray angles of sheet 0 at each end of each segment.
    let mut start_angle = vec![0.0; nseg];
    let mut end_angle = vec![0.0; nseg];
    for (k, seg) in segments.iter().enumerate() {
        let at_start = seg.k_const * seg.far_product(chain[k]);
        let at_end = seg.k_const * seg.far_product(chain[k + 1]);
        start_angle[k] = ray_angle(m, at_start, v[k], seg.delta);
        end_angle[k] = ray_angle(m, at_end, v[k + 1], -seg.delta);
    }
    let sheet = |base: f64, s: u32| (base + 2.0 * PI * s as f64 / m as f64).rem_euclid(2.0 * PI);

    let labels: Vec<(usize, u32)> = (0..nseg).flat_map(|k| (0..m - 1).map(move |s| (k, s))).collect();
    let ncyc = labels.len();

    let mut periods = DMatrix::from_element(basis.len(), ncyc, Complex64::new(0.0, 0.0));
    for (c, &(k, s)) in labels.iter().enumerate() {
        for (i, w) in basis.iter().enumerate() {
            let phase = zeta.powf(-((w.j * s) as f64)) * (Complex64::new(1.0, 0.0) - zeta.powf(-(w.j as f64)));
            periods[(i, c)] = phase * integrals[k][i];
        }
    }

    // Local (in, out) rays of a cycle at each chain vertex it passes through.
    let local = |k: usize, s: u32| -> [(usize, f64, f64); 2] {
        [
            (k, sheet(start_angle[k], s + 1), sheet(start_angle[k], s)),
            (k + 1, sheet(end_angle[k], s), sheet(end_angle[k], s + 1)),
        ]
    };
    let eta = PI / (64.0 * m as f64);
    let pairing = |c1: (usize, u32), c2: (usize, u32)| -> i64 {
        if c1 == c2 {
            return 0;
        }
        let mut total = 0;
        for (vertex, in1, out1) in local(c1.0, c1.1) {
            for (vertex2, in2, out2) in local(c2.0, c2.1) {
                if vertex != vertex2 {
                    continue;
                }
                // Push the second cycle off to its left.
                total += crossing(in1, out1, in2 - eta, out2 + eta);
            }
        }
        total
    };
    let mut intersections = DMatrix::zeros(ncyc, ncyc);
    for a in 0..ncyc {
        for b in 0..ncyc {
            intersections[(a, b)] = pairing(labels[a], labels[b]);
        }
    }
    if intersections != -intersections.transpose() {
        return Err(PeriodError::InconsistentIntersections);
    }
    Ok(CycleData {
        periods,
        intersections,
    })
}

/// Local intersection number at a common point of two paths through it,
/// path 1 arriving along ray `in1` and leaving along `out1`.
fn crossing(in1: f64, out1: f64, in2: f64, out2: f64) -> i64 {
    // Left of path 1 is the counter-clockwise arc from out1 to in1.
    let left = |phi: f64| {
        let span = (in1 - out1).rem_euclid(2.0 * PI);
        let pos = (phi - out1).rem_euclid(2.0 * PI);
        pos > 0.0 && pos < span
    };
    left(out2) as i64 - left(in2) as i64
}
