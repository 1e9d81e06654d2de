//! Acceptance suite. Each test prints one `criterion N: PASS|FAIL` line.
//!
//! Run with `cargo test -p gsh-core --test acceptance -- --nocapture`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gsh_core::electrical::{
    height_jump_twogon, lambda_invariant, slope_mu, tau, tau_from, theta_invariant,
};
use gsh_core::genus3::{local_contribution_bound, ord_chi18_lower_bound, twogon_contribution};
use gsh_core::heights::synthetic::random_place_table;
use gsh_core::heights::{
    assemble, faltings_from_chi18, faltings_route_height, gs_height, kappa_sweep, noether_check, ols,
    omega_bar_from_hat, LogNv, Mixed, PlaceTable,
};
use gsh_core::periods::{
    curve_from_kappa, hyperelliptic_reference, hyperelliptic_reference_curve, period_data, PeriodParams,
    SuperellipticCurve,
};
use gsh_core::pmgraph::random::{random_pm_graph, random_polarized_tree, wedge_sum, RandomGraphParams};
use gsh_core::pmgraph::shapes::{loop_graph, segment, two_gon};
use gsh_core::rational::{frac, int, to_f64};
use gsh_core::siegel::{
    chi18_tilde, even_characteristics, hodge_norm_chi18_prime, random_symplectic, siegel_reduce, sp_transform,
    theta_null, Characteristic, EvalParams, SiegelPoint,
};
use gsh_core::{PmGraph, Rational};

const EXACT_GRID: usize = 120;
const RANDOM_GRAPHS: usize = 100;
const WEDGE_SUMS: usize = 60;
const SLOPE_GRAPHS: usize = 300;
const SYNTHETIC_TABLES: usize = 120;

const THETA_TOL: f64 = 1e-10;
const INVARIANCE_TOL: f64 = 1e-8;
const SYMMETRY_TOL: f64 = 1e-8;
const LEMNISCATE_TOL: f64 = 1e-10;
const DOUBLING_TOL: f64 = 1e-10;
const SLOPE_DRIFT: f64 = 0.05;
/// Largest residual of the affine fit of `det Im Omega`, relative to its range.
const DET_AFFINE_TOL: f64 = 0.01;
const TRIANGLE_TOL: f64 = 1e-10;

struct Check {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Check {
    fn that(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok && self.failures.len() < 8 {
            self.failures.push(what());
        } else if !ok {
            self.failures.push(String::new());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

fn criterion(n: u32, limit: Duration, body: impl FnOnce(&mut Check)) {
    let mut check = Check {
        failures: Vec::new(),
        notes: Vec::new(),
    };
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(|| body(&mut check)));
    let elapsed = start.elapsed();
    if let Err(e) = outcome {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        check.failures.push(format!("panicked: {msg}"));
    }
    if elapsed > limit {
        check
            .failures
            .push(format!("runtime {:.2}s exceeds {:.0}s", elapsed.as_secs_f64(), limit.as_secs_f64()));
    }
    let ok = check.failures.is_empty();
    println!(
        "criterion {n}: {} ({:.2}s){}{}",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        if check.notes.is_empty() { String::new() } else { format!(" {}", check.notes.join("; ")) },
        if ok {
            String::new()
        } else {
            let shown: Vec<&str> = check.failures.iter().map(|s| s.as_str()).filter(|s| !s.is_empty()).collect();
            format!(" [{} failures] {}", check.failures.len(), shown.join(" | "))
        }
    );
    assert!(ok, "criterion {n} failed");
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_positive(r: &mut ChaCha8Rng) -> Rational {
    frac(r.gen_range(1..=30), r.gen_range(1..=7))
}

/// Determinant by cofactor expansion, memoised on the set of used columns.
fn det(m: &[Vec<Rational>]) -> Rational {
    fn go(m: &[Vec<Rational>], row: usize, used: u32, memo: &mut HashMap<u32, Rational>) -> Rational {
        if row == m.len() {
            return int(1);
        }
        if let Some(v) = memo.get(&used) {
            return v.clone();
        }
        let mut total = Rational::zero();
        let mut sign = true;
        for c in 0..m.len() {
            if used >> c & 1 == 1 {
                continue;
            }
            if !m[row][c].is_zero() {
                let term = &m[row][c] * go(m, row + 1, used | 1 << c, memo);
                if sign {
                    total += term;
                } else {
                    total -= term;
                }
            }
            sign = !sign;
        }
        memo.insert(used, total.clone());
        total
    }
    go(m, 0, 0, &mut HashMap::new())
}

/// Effective resistance from the matrix-tree theorem on a raw edge list.
fn kirchhoff(n: usize, edges: &[(usize, usize, Rational)], p: usize, q: usize) -> Rational {
    if p == q {
        return Rational::zero();
    }
    let mut lap = vec![vec![Rational::zero(); n]; n];
    for (u, v, l) in edges {
        if u == v {
            continue;
        }
        let c = l.recip();
        lap[*u][*u] += &c;
        lap[*v][*v] += &c;
        lap[*u][*v] -= &c;
        lap[*v][*u] -= &c;
    }
    let minor = |drop: &[usize]| -> Vec<Vec<Rational>> {
        (0..n)
            .filter(|i| !drop.contains(i))
            .map(|i| (0..n).filter(|j| !drop.contains(j)).map(|j| lap[i][j].clone()).collect())
            .collect()
    };
    det(&minor(&[p, q])) / det(&minor(&[p]))
}

/// `tau = (1/4) sum_e int_e (d/dx r(p, x))^2 dx`. On each edge `r(p, .)` is a
/// quadratic, fixed here by its values at both ends and at the midpoint.
fn tau_oracle(g: &PmGraph, p: usize) -> Rational {
    let n = g.vertices().len();
    let edges: Vec<(usize, usize, Rational)> = g.edges().iter().map(|e| (e.u, e.v, e.length.clone())).collect();
    let mut total = Rational::zero();
    for (i, (u, v, len)) in edges.iter().enumerate() {
        let half = len / int(2);
        let mut split: Vec<_> = edges
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, e)| e.clone())
            .collect();
        split.push((*u, n, half.clone()));
        split.push((n, *v, half.clone()));
        let r0 = kirchhoff(n + 1, &split, p, *u);
        let rm = kirchhoff(n + 1, &split, p, n);
        let r1 = kirchhoff(n + 1, &split, p, *v);
        // r(t) = a t^2 + b t + r0 on [0, len].
        let a = (&r0 + &r1 - &rm * int(2)) * int(2) / (len * len);
        let b = (&r1 - &r0) / len - &a * len;
        let l2 = len * len;
        total += &a * &a * &l2 * len * frac(4, 3) + &a * &b * &l2 * int(2) + &b * &b * len;
    }
    total / int(4)
}

#[test]
fn criterion_01_closed_forms() {
    criterion(1, Duration::from_secs(5), |c| {
        let mut r = rng(1);
        for _ in 0..EXACT_GRID {
            let g = r.gen_range(2..=6u32);
            let gi = g as i64;
            let (m1, m2, d) = (random_positive(&mut r), random_positive(&mut r), random_positive(&mut r));

            let lp = loop_graph(g - 1, d.clone()).unwrap();
            c.that(tau(&lp) == &d / int(12), || format!("loop tau g={g}"));
            c.that(theta_invariant(&lp).is_zero(), || format!("loop theta g={g}"));
            c.that(lambda_invariant(&lp) * int(8 * gi + 4) == &d * int(gi), || format!("loop lambda g={g}"));

            let h = r.gen_range(1..g) as i64;
            let seg = segment(h as u32, (gi - h) as u32, d.clone()).unwrap();
            c.that(tau(&seg) == &d / int(4), || format!("segment tau g={g} h={h}"));
            c.that(
                theta_invariant(&seg) == &d * int(2 * (2 * h - 1) * (2 * gi - 2 * h - 1)),
                || format!("segment theta g={g} h={h}"),
            );
            c.that(
                lambda_invariant(&seg) * int(8 * gi + 4) == &d * int(4 * h * (gi - h)),
                || format!("segment lambda g={g} h={h}"),
            );

            let tree = random_polarized_tree(&mut r, g, &RandomGraphParams::default());
            let delta = tree.classify_edges().delta;
            let expected: Rational = (1..=g / 2)
                .map(|k| delta.get(k) * int(4 * k as i64 * (gi - k as i64)))
                .fold(Rational::zero(), |a, b| a + b);
            c.that(tree.total_length() == *delta.total(), || format!("tree delta g={g}"));
            c.that(lambda_invariant(&tree) * int(8 * gi + 4) == expected, || format!("tree lambda g={g}"));

            let h = r.gen_range(0..g) as i64;
            let k = gi - h - 1;
            let tg = two_gon(h as u32, k as u32, m1.clone(), m2.clone()).unwrap();
            let sum = &m1 + &m2;
            let prod = &m1 * &m2;
            c.that(tau(&tg) == &sum / int(12), || format!("two-gon tau g={g} h={h}"));
            c.that(
                theta_invariant(&tg) == &prod * int(8 * k * h) / &sum,
                || format!("two-gon theta g={g} h={h}"),
            );
            c.that(
                lambda_invariant(&tg) * int(8 * gi + 4) == &prod * int(4 * k * h) / &sum + &sum * int(gi),
                || format!("two-gon lambda g={g} h={h}"),
            );
        }
        c.note(format!("{EXACT_GRID} tuples"));
    });
}

#[test]
fn criterion_02_base_point_and_subdivision() {
    criterion(2, Duration::from_secs(30), |c| {
        let mut r = rng(2);
        let params = RandomGraphParams {
            max_vertices: 8,
            ..Default::default()
        };
        for i in 0..RANDOM_GRAPHS {
            let g = random_pm_graph(&mut r, &params);
            let t = tau(&g);
            for p in 0..g.vertices().len() {
                c.that(tau_from(&g, p).unwrap() == t, || format!("graph {i}: base point {p}"));
            }
            c.that(tau_oracle(&g, 0) == t, || format!("graph {i}: Kirchhoff oracle"));
            if g.edges().is_empty() {
                continue;
            }
            let e = &g.edges()[r.gen_range(0..g.edges().len())];
            let at = &e.length * frac(r.gen_range(1..20), 20);
            let split = g.subdivide_edge(&e.id, &at).unwrap();
            c.that(tau(&split) == t, || format!("graph {i}: subdivision"));
            // The new vertex is a base point in the interior of an old edge.
            let new = split.vertices().len() - 1;
            c.that(tau_from(&split, new).unwrap() == t, || format!("graph {i}: interior base point"));
        }
        c.note(format!("{RANDOM_GRAPHS} graphs"));
    });
}

#[test]
fn criterion_03_wedge_additivity() {
    criterion(3, Duration::from_secs(60), |c| {
        let mut r = rng(3);
        let params = RandomGraphParams {
            max_vertices: 4,
            max_genus: 3,
            ..Default::default()
        };
        for i in 0..WEDGE_SUMS {
            let count = r.gen_range(2..=3);
            let pieces: Vec<PmGraph> = (0..count).map(|_| random_pm_graph(&mut r, &params)).collect();
            let w = wedge_sum(&mut r, &pieces);
            let raw: Rational = pieces.iter().map(tau).fold(Rational::zero(), |a, b| a + b);
            c.that(tau(&w) == raw, || format!("sum {i}: tau over glued pieces"));

            let parts = w.wedge_decompose();
            let add = |f: &dyn Fn(&PmGraph) -> Rational| parts.iter().map(f).fold(Rational::zero(), |a, b| a + b);
            c.that(add(&tau) == tau(&w), || format!("sum {i}: tau"));
            c.that(add(&lambda_invariant) == lambda_invariant(&w), || format!("sum {i}: lambda"));
            let delta = w.classify_edges().delta;
            for h in 0..=w.genus() / 2 {
                let pieces_h = add(&|p: &PmGraph| p.classify_edges().delta.get(h));
                c.that(pieces_h == delta.get(h), || format!("sum {i}: delta_{h}"));
            }
        }
        c.note(format!("{WEDGE_SUMS} wedge sums"));
    });
}

#[test]
fn criterion_04_slope_nonnegative() {
    criterion(4, Duration::from_secs(60), |c| {
        let mut r = rng(4);
        let params = RandomGraphParams::default();
        let mut min = None::<Rational>;
        for i in 0..SLOPE_GRAPHS {
            let g = match i % 3 {
                0 => random_pm_graph(&mut r, &params),
                1 => {
                    let genus = r.gen_range(1..=6);
                    random_polarized_tree(&mut r, genus, &params)
                }
                _ => {
                    let small = RandomGraphParams {
                        max_vertices: 3,
                        max_genus: 2,
                        ..Default::default()
                    };
                    let pieces: Vec<PmGraph> = (0..3).map(|_| random_pm_graph(&mut r, &small)).collect();
                    wedge_sum(&mut r, &pieces)
                }
            };
            let mu = slope_mu(&g);
            c.that(!mu.is_negative(), || format!("graph {i}: mu = {mu}"));
            if min.as_ref().is_none_or(|m| &mu < m) {
                min = Some(mu);
            }
        }
        c.note(format!("{SLOPE_GRAPHS} graphs, min mu = {}", min.map(|m| m.to_string()).unwrap_or_default()));
    });
}

#[test]
fn criterion_05_slope_equals_height_jump() {
    criterion(5, Duration::from_secs(60), |c| {
        for a in 1..=50 {
            for b in 1..=50 {
                let (m1, m2) = (int(a), int(b));
                let mu = slope_mu(&two_gon(1, 1, m1.clone(), m2.clone()).unwrap());
                let jump = height_jump_twogon(3, 1, &m1, &m2).unwrap();
                c.that(mu == jump, || format!("({a},{b}): {mu} vs {jump}"));
            }
        }
    });
}

#[test]
fn criterion_06_genus_three_local_bounds() {
    criterion(6, Duration::from_secs(120), |c| {
        let mut r = rng(6);
        let params = RandomGraphParams::default();
        for i in 0..RANDOM_GRAPHS {
            let tree = random_polarized_tree(&mut r, 3, &params);
            let b = local_contribution_bound(&tree).unwrap();
            c.that(b == tree.total_length() / int(21), || format!("tree {i}: B = {b}"));
        }
        for a in 1..=200 {
            for b in 1..=200 {
                let (m1, m2) = (int(a), int(b));
                let value = twogon_contribution(&m1, &m2).unwrap().value;
                c.that(value.is_positive(), || format!("({a},{b}) not positive"));
                let graph = two_gon(1, 1, m1, m2).unwrap();
                let direct = ord_chi18_lower_bound(&graph).unwrap() / int(18) - lambda_invariant(&graph);
                c.that(value == direct, || format!("({a},{b}): {value} vs {direct}"));
            }
        }
        c.note(format!("{RANDOM_GRAPHS} trees, 200x200 two-gons"));
    });
}

fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..40 {
        (a, b) = ((a + b) / 2.0, (a * b).sqrt());
    }
    a
}

fn theta_series(a: u32, b: u32, tau: Complex64) -> Complex64 {
    let (e1, e2) = (0.5 * a as f64, 0.5 * b as f64);
    (-80..=80)
        .map(|n| {
            let v = n as f64 + e1;
            (Complex64::i() * PI * (tau * v * v + 2.0 * v * e2)).exp()
        })
        .sum()
}

fn random_point(r: &mut ChaCha8Rng, g: usize) -> SiegelPoint {
    let a = DMatrix::from_fn(g, g, |_, _| r.gen_range(-0.6..0.6));
    let im = &a * a.transpose() + DMatrix::identity(g, g) * 0.8;
    let re = DMatrix::from_fn(g, g, |_, _| r.gen_range(-0.5..0.5));
    SiegelPoint::from_parts(&((&re + re.transpose()) * 0.5), &im).unwrap()
}

#[test]
fn criterion_07_theta_numerics() {
    criterion(7, Duration::from_secs(60), |c| {
        let params = EvalParams::default();
        let i = Complex64::new(0.0, 1.0);

        let at_i = SiegelPoint::diagonal(&[i]).unwrap();
        let t = theta_null(&Characteristic::zero(1), &at_i, &params).unwrap();
        let oracle = agm(1.0, 0.5f64.sqrt()).powf(-0.5);
        c.that((t - oracle).norm() < THETA_TOL, || format!("theta(i) = {t}, AGM {oracle}"));
        for ch in even_characteristics(1) {
            let s = theta_series(ch.a, ch.b, i);
            let v = theta_null(&ch, &at_i, &params).unwrap();
            c.that((v - s).norm() < THETA_TOL, || format!("{ch} at i: {v} vs series {s}"));
        }

        let mut r = rng(7);
        for _ in 0..3 {
            let a = random_point(&mut r, 2);
            let tau = Complex64::new(r.gen_range(-0.5..0.5), r.gen_range(0.7..1.8));
            let mut omega = DMatrix::from_element(3, 3, Complex64::new(0.0, 0.0));
            omega.view_mut((0, 0), (2, 2)).copy_from(a.omega());
            omega[(2, 2)] = tau;
            let p = SiegelPoint::new(omega).unwrap();
            for ch in even_characteristics(3) {
                let (c1, c2) = (ch.restrict(0, 2), ch.restrict(2, 1));
                let whole = theta_null(&ch, &p, &params).unwrap();
                let prod = if c1.is_even() {
                    theta_null(&c1, &a, &params).unwrap() * theta_series(c2.a, c2.b, tau)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                c.that((whole - prod).norm() < THETA_TOL, || format!("block {ch}: {}", (whole - prod).norm()));
            }
        }

        let diag = SiegelPoint::diagonal(&[i; 3]).unwrap();
        let chi = chi18_tilde(&diag, &params).unwrap();
        c.that(chi.vanishes, || "chi18 at diag(i,i,i) does not vanish".into());

        let p = random_point(&mut r, 3);
        let base = hodge_norm_chi18_prime(&p, &params).unwrap().log_norm;
        let mut worst = 0.0f64;
        for k in 0..20 {
            let gamma = random_symplectic(&mut r, 3, 4);
            let q = sp_transform(&p, &gamma).unwrap();
            let moved = hodge_norm_chi18_prime(&q, &params).unwrap().log_norm;
            let rel = (moved - base).abs() / base.abs().max(1.0);
            worst = worst.max(rel);
            c.that(rel < INVARIANCE_TOL, || format!("gamma {k}: relative change {rel:e}"));
        }
        c.note(format!("worst invariance {worst:.1e}"));
    });
}

#[test]
fn criterion_08_hyperelliptic_vanishing() {
    criterion(8, Duration::from_secs(30), |c| {
        let point = hyperelliptic_reference(&PeriodParams::default()).unwrap();
        let params = EvalParams::default();
        let chi = chi18_tilde(&siegel_reduce(&point).point, &params).unwrap();
        c.that(chi.vanishes, || "chi18 does not vanish".into());
        let largest = chi.factors.iter().map(|(_, t)| t.norm()).fold(0.0, f64::max);
        let (ch, smallest) = chi.min_factor();
        c.note(format!("min |theta| = {smallest:.1e} at {ch}, max {largest:.3}"));
        let norm = hodge_norm_chi18_prime(&point, &params).unwrap();
        c.that(norm.vanishes && norm.log_norm == f64::NEG_INFINITY, || "Hodge norm is finite".into());
    });
}

fn lemniscatic() -> SuperellipticCurve {
    let c = |x: f64| Complex64::new(x, 0.0);
    SuperellipticCurve::new(2, vec![c(-1.0), c(0.0), c(1.0)]).unwrap()
}

fn doubled(params: &PeriodParams) -> PeriodParams {
    PeriodParams {
        min_nodes: 2 * params.min_nodes,
        max_nodes: 2 * params.max_nodes,
        ..params.clone()
    }
}

#[test]
fn criterion_09_periods() {
    criterion(9, Duration::from_secs(180), |c| {
        let params = PeriodParams::default();
        let curves = [
            ("D_1/2", curve_from_kappa(Complex64::new(0.5, 0.0)).unwrap()),
            ("lemniscate", lemniscatic()),
            ("y^2=x^8-1", hyperelliptic_reference_curve()),
        ];
        for (name, curve) in &curves {
            let start = Instant::now();
            let data = period_data(curve, &params).unwrap();
            let g = data.basis.len();
            let t = data.change_of_basis.map(|v| Complex64::new(v as f64, 0.0));
            let w = &data.big_periods * t.transpose();
            let raw = w.columns(0, g).into_owned().try_inverse().unwrap() * w.columns(g, g);
            let asym = (&raw - raw.transpose()).norm();
            if *name == "D_1/2" {
                c.that(asym < SYMMETRY_TOL, || format!("{name}: asymmetry {asym:e}"));
                c.that(data.omega.min_eigenvalue_im() > 0.0, || format!("{name}: Im not positive definite"));
                c.note(format!("{name} asymmetry {asym:.1e}"));
            }
            if *name == "lemniscate" {
                let red = siegel_reduce(&data.omega).point.omega()[(0, 0)];
                let d = (red - Complex64::new(0.0, 1.0)).norm();
                c.that(d < LEMNISCATE_TOL, || format!("reduced tau = {red}"));
            }
            let fine = period_data(curve, &doubled(&params)).unwrap();
            let diff = (data.omega.omega() - fine.omega.omega()).norm();
            c.that(diff < DOUBLING_TOL, || format!("{name}: doubling changes Omega by {diff:e}"));
            let secs = start.elapsed().as_secs_f64();
            c.that(secs < 60.0, || format!("{name}: {secs:.1}s"));
        }
    });
}

#[test]
fn criterion_10_divergence_sweep() {
    criterion(10, Duration::from_secs(600), |c| {
        let ns: Vec<f64> = (1..=6).map(|k| 10f64.powi(k)).collect();
        let out = kappa_sweep(&ns, &EvalParams::default(), &PeriodParams::default());
        c.that(out.failures.is_empty(), || format!("failed rows: {:?}", out.failures));
        c.that(out.rows.len() == ns.len(), || "missing rows".into());
        let f: Vec<f64> = out.rows.iter().map(|r| r.f).collect();
        c.that(f.windows(2).all(|w| w[1] > w[0]), || format!("F not increasing: {f:?}"));

        let logs: Vec<f64> = out.rows.iter().map(|r| r.n.ln()).collect();
        let upto5 = ols(&logs[..5], &f[..5]).unwrap();
        let upto6 = ols(&logs, &f).unwrap();
        c.that(upto5.slope > 0.0 && upto6.slope > 0.0, || "non-positive slope".into());
        let drift = (upto6.slope - upto5.slope).abs() / upto6.slope;
        c.that(drift < SLOPE_DRIFT, || format!("slope drift {drift:.3}"));

        let det: Vec<f64> = out.rows.iter().map(|r| r.det_im_omega).collect();
        let det_fit = ols(&logs, &det).unwrap();
        let range = det.iter().cloned().fold(f64::MIN, f64::max) - det.iter().cloned().fold(f64::MAX, f64::min);
        c.that(det_fit.slope > 0.0, || "det Im Omega does not grow".into());
        c.that(det_fit.max_residual < DET_AFFINE_TOL * range, || {
            format!("det Im Omega residual {:.2e} of range {range:.3}", det_fit.max_residual)
        });
        c.note(format!(
            "F slope {:.5} (k<=5) vs {:.5} (k<=6), drift {:.1}%; det Im slope {:.6}, residual {:.1e}",
            upto5.slope,
            upto6.slope,
            100.0 * drift,
            det_fit.slope,
            det_fit.max_residual
        ));
    });
}

fn total_weighted<'a>(items: impl Iterator<Item = (Mixed, &'a LogNv)>) -> Mixed {
    items.map(|(v, w)| v.weighted(w)).sum()
}

#[test]
fn criterion_11_assembly_triangle() {
    criterion(11, Duration::from_secs(30), |c| {
        let mut r = rng(11);
        let one = LogNv::one();
        let close = |a: f64, b: f64, scale: f64| (a - b).abs() <= TRIANGLE_TOL * scale.abs().max(1.0);
        for i in 0..SYNTHETIC_TABLES {
            let finite = r.gen_range(0..=6);
            let infinite = r.gen_range(1..=3);
            let t: PlaceTable = random_place_table(&mut r, finite, infinite);

            let gs = gs_height(&t).unwrap();
            let degree = faltings_from_chi18(&t).unwrap();
            let lambda: Vec<(Mixed, LogNv)> = t
                .finite
                .iter()
                .map(|p| (Mixed::exact(p.lambda.clone().unwrap()), p.log_nv.clone()))
                .chain(t.infinite.iter().map(|p| (Mixed::float(p.lambda.unwrap()), one.clone())))
                .collect();
            let route = faltings_route_height(3, &degree, &lambda).unwrap();
            c.that(gs.exact == route.exact, || format!("table {i}: exact parts differ"));
            c.that(close(gs.float, route.float, gs.float.max(route.float)), || {
                format!("table {i}: float parts {} vs {}", gs.float, route.float)
            });

            // Plain floating-point evaluation of the per-place sum.
            let direct: f64 = t
                .finite
                .iter()
                .map(|p| 21.0 * (to_f64(p.ord.as_ref().unwrap()) / 18.0 - to_f64(p.lambda.as_ref().unwrap())) * p.log_nv.value())
                .chain(t.infinite.iter().map(|p| 21.0 * (-p.log_norm_chi18.unwrap() / 18.0 - p.lambda.unwrap())))
                .sum();
            c.that(close(gs.total(), direct, direct), || format!("table {i}: {} vs direct {direct}", gs.total()));

            let deg = Mixed::float(t.faltings_degree.unwrap());
            let delta = total_weighted(
                t.finite
                    .iter()
                    .map(|p| (Mixed::exact(p.delta.clone().unwrap()), &p.log_nv))
                    .chain(t.infinite.iter().map(|p| (Mixed::float(p.delta.unwrap()), &one))),
            );
            let noether = noether_check(&deg, &Mixed::float(t.omega_bar_sq.unwrap()), &[(delta, one.clone())]);
            c.that(close(noether.total(), 0.0, 12.0 * deg.total()), || format!("table {i}: Noether residual {}", noether.total()));

            let eps: Vec<(Mixed, LogNv)> = t
                .finite
                .iter()
                .map(|p| (Mixed::exact(p.epsilon.clone().unwrap()), p.log_nv.clone()))
                .collect();
            let bar = omega_bar_from_hat(&Mixed::float(t.omega_hat_sq.unwrap()), &eps);
            let wb = t.omega_bar_sq.unwrap();
            c.that(close(bar.total(), wb, wb), || format!("table {i}: self-intersection {} vs {wb}", bar.total()));

            c.that(assemble(&t).unwrap().consistent, || format!("table {i}: assembly inconsistent"));
        }
        c.note(format!("{SYNTHETIC_TABLES} tables"));
    });
}
