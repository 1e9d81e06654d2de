use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::synthetic::random_place_table;
use super::*;
use crate::periods::{curve_from_kappa, small_period_matrix, PeriodParams};
use crate::pmgraph::shapes::{star, two_gon};
use crate::rational::{frac, int, Rational};
use crate::siegel::{EvalParams, OmegaFile};

fn finite(label: &str, log_nv: LogNv, ord: Rational, lambda: Rational) -> FinitePlace {
    let mut p = FinitePlace::new(label, log_nv);
    p.ord = Some(ord);
    p.lambda = Some(lambda);
    p
}

#[test]
fn gs_height_examples() {
    assert_eq!(gs_height(&PlaceTable::new(3)).unwrap(), Mixed::zero());
    let mut t = PlaceTable::new(3);
    t.finite.push(finite("p", LogNv::Exact(int(1)), int(6), frac(2, 7)));
    assert_eq!(gs_height(&t).unwrap(), Mixed::exact(int(1)));
    t.finite[0].lambda = None;
    assert_eq!(
        gs_height(&t).unwrap_err(),
        HeightError::MissingField {
            place: "p".into(),
            field: "lambda"
        }
    );
    assert_eq!(gs_height(&PlaceTable::new(4)).unwrap_err(), HeightError::WrongGenus(4));
}

#[test]
fn lower_bound_sign_report() {
    let mut t = PlaceTable::new(3);
    let mut p = FinitePlace::new("p", LogNv::Float(3f64.ln()));
    p.graph = Some(two_gon(1, 1, int(1), int(1)).unwrap());
    p.ord = Some(int(8));
    t.finite.push(p);
    let t = graph_autofill(&t, &EvalParams::default()).unwrap();
    let c = &place_contributions(&t).unwrap()[0];
    assert_eq!(c.ord_respects_bound, Some(true));
    let lb = c.lower_bound.as_ref().unwrap();
    // 21 B log 3 with B = 1/21.
    assert!((lb.total() - 3f64.ln()).abs() < 1e-15);
    assert!(c.contribution.total() >= lb.total());
}

#[test]
fn zhang_examples() {
    assert_eq!(zhang_identity(3, 0.0, &[], 1, 0.0).unwrap(), 0.0);
    for g in 2..7u32 {
        let w = (2.0 * g as f64 - 2.0) / (2.0 * g as f64 + 1.0);
        assert!((zhang_identity(g, w, &[(Mixed::zero(), LogNv::one())], 2, 0.0).unwrap() - 1.0).abs() < 1e-15);
    }
    let phi = [(Mixed::exact(frac(1, 3)), LogNv::Float(2f64.ln()))];
    let base = zhang_identity(3, 0.5, &phi, 2, 0.0).unwrap();
    for h in [1e-6, 0.1, 3.0] {
        assert!(zhang_identity(3, 0.5, &phi, 2, h).unwrap() > base);
    }
    assert_eq!(zhang_identity(1, 0.0, &[], 1, 0.0).unwrap_err(), HeightError::WrongGenus(1));
}

#[test]
fn faltings_examples() {
    let lam = [(Mixed::exact(frac(1, 2)), LogNv::Exact(int(4)))];
    assert_eq!(faltings_route_height(3, &Mixed::exact(int(2)), &lam).unwrap(), Mixed::zero());
    assert_eq!(faltings_route_height(3, &Mixed::exact(int(3)), &lam).unwrap(), Mixed::exact(int(21)));
    assert_eq!(faltings_route_height(2, &Mixed::exact(int(1)), &[]).unwrap(), Mixed::exact(int(30)));
    assert!(faltings_route_height(1, &Mixed::zero(), &[]).is_err());

    assert_eq!(faltings_from_chi18(&PlaceTable::new(3)).unwrap(), Mixed::zero());
    let mut t = PlaceTable::new(3);
    t.finite.push(finite("p", LogNv::Exact(int(1)), int(18), int(0)));
    assert_eq!(faltings_from_chi18(&t).unwrap(), Mixed::exact(int(1)));
    t.infinite.push(InfinitePlace::new("s"));
    assert!(matches!(faltings_from_chi18(&t), Err(HeightError::MissingField { field: "log_norm_chi18", .. })));
}

#[test]
fn noether_examples() {
    let delta = [(Mixed::exact(int(3)), LogNv::Exact(int(2))), (Mixed::float(1.5), LogNv::one())];
    // 12 * 1 = 4.5 + 6 + 1.5.
    let r = noether_check(&Mixed::exact(int(1)), &Mixed::float(4.5), &delta);
    assert_eq!(r.total(), 0.0);
    let r = noether_check(&Mixed::exact(int(1)), &Mixed::float(5.5), &delta);
    assert_eq!(r.total(), -1.0);
    let eps = [(Mixed::exact(frac(1, 4)), LogNv::Exact(int(2)))];
    assert_eq!(omega_bar_from_hat(&Mixed::float(4.0), &eps).total(), 4.5);
}

fn conj_table(omega_hat_sq: f64, phi: Rational) -> PlaceTable {
    let mut t = PlaceTable::new(3);
    let mut p = FinitePlace::new("p", LogNv::Exact(int(1)));
    p.phi = Some(phi);
    t.finite.push(p);
    t.omega_hat_sq = Some(omega_hat_sq);
    t
}

#[test]
fn conjecture_report_examples() {
    let r = conjecture_report(&conj_table(100.0, int(1))).unwrap();
    assert!(r.conjectural_satisfied && r.unconditional_satisfied && !r.conjectural_tight);
    let r = conjecture_report(&conj_table(0.0, int(1))).unwrap();
    assert!(!r.conjectural_satisfied && !r.unconditional_satisfied);
    // (2g-2)/(2g+1) = 4/7 in genus three.
    let r = conjecture_report(&conj_table(4.0 / 7.0 * 7.0, int(7))).unwrap();
    assert!(r.conjectural_tight && r.conjectural_satisfied && !r.unconditional_tight);
    assert!((r.canonical_height).abs() < 1e-12);
    let mut t = conj_table(1.0, int(1));
    t.omega_hat_sq = None;
    assert!(matches!(conjecture_report(&t), Err(HeightError::MissingField { field: "omega_hat_sq", .. })));
}

#[test]
fn autofill_odd_place_two_gon() {
    let mut t = PlaceTable::new(3);
    let mut p = FinitePlace::new("odd", LogNv::Exact(int(1)));
    p.graph = Some(two_gon(1, 1, int(1), int(1)).unwrap());
    t.finite.push(p);
    let filled = graph_autofill(&t, &EvalParams::default()).unwrap();
    let p = &filled.finite[0];
    assert_eq!(p.lambda, Some(frac(2, 7)));
    assert_eq!(p.ord_lower_bound, Some(int(6)));
    assert_eq!(p.delta, Some(int(2)));
    assert_eq!(p.h, Some(int(1)));
    assert_eq!(p.delta_by_type, Some(vec![int(2), int(0)]));
    assert_eq!(p.local_bound, Some(frac(1, 21)));
}

#[test]
fn autofill_tree_fiber() {
    let lengths = [frac(1, 2), int(3), frac(5, 3)];
    let mut t = PlaceTable::new(3);
    let mut p = FinitePlace::new("two", LogNv::Float(2f64.ln()));
    p.graph = Some(star(0, &lengths.iter().map(|l| (1, l.clone())).collect::<Vec<_>>()).unwrap());
    p.lambda = Some(lengths.iter().map(|l| l * int(2) / int(7)).sum());
    t.finite.push(p);
    let filled = graph_autofill(&t, &EvalParams::default()).unwrap();
    assert_eq!(filled.finite[0].h, Some(int(0)));

    t.finite[0].lambda = Some(frac(1, 7));
    assert!(matches!(
        graph_autofill(&t, &EvalParams::default()),
        Err(HeightError::FieldConflict { field: "lambda", .. })
    ));
}

#[test]
fn autofill_computes_archimedean_norm() {
    let point = small_period_matrix(&curve_from_kappa(Complex64::new(0.5, 0.0)).unwrap(), &PeriodParams::default())
        .unwrap();
    let mut t = PlaceTable::new(3);
    let mut s = InfinitePlace::new("s");
    s.omega = Some(OmegaFile::from_point(&point));
    t.infinite.push(s);
    let filled = graph_autofill(&t, &EvalParams::default()).unwrap();
    let norm = filled.infinite[0].log_norm_chi18.unwrap();
    assert!(norm.is_finite());
    t.infinite[0].log_norm_chi18 = Some(norm + 1.0);
    assert!(matches!(
        graph_autofill(&t, &EvalParams::default()),
        Err(HeightError::FieldConflict { field: "log_norm_chi18", .. })
    ));
}

#[test]
fn place_table_json() {
    let text = r#"{
        "g": 3,
        "finite": [
            {"label": "p2", "log_nv": "3/2", "ord": 6, "lambda": "2/7"},
            {"label": "p3", "norm": 3, "ord": "7", "lambda": "1/3",
             "graph": {"vertices": [{"id": "a", "genus": 1}, {"id": "b", "genus": 1}],
                       "edges": [{"id": "e", "u": "a", "v": "b", "length": 1}, {"id": "f", "u": "a", "v": "b", "length": 2}]}}
        ],
        "infinite": [{"label": "s", "log_norm_chi18": 1.5, "lambda": 0.25}]
    }"#;
    let t = PlaceTable::from_json(text).unwrap();
    assert_eq!(t.degree, 1);
    assert_eq!(t.finite[0].log_nv, LogNv::Exact(frac(3, 2)));
    assert_eq!(t.finite[1].log_nv, LogNv::Float(3f64.ln()));
    assert!(t.finite[1].graph.is_some());
    let back = PlaceTable::from_json(&t.to_json()).unwrap();
    assert_eq!(back, t);

    assert!(PlaceTable::from_json(r#"{"g": 1}"#).is_err());
    assert!(PlaceTable::from_json(r#"{"g": 3, "finite": [{"label": "p", "log_nv": 0}]}"#).is_err());
    assert!(PlaceTable::from_json(r#"{"g": 3, "finite": [{"label": "p", "norm": 1}]}"#).is_err());
    assert!(PlaceTable::from_json(r#"{"g": 3, "finite": [{"label": "p", "log_nv": 1, "bogus": 2}]}"#).is_err());
}

#[test]
fn synthetic_tables_are_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let t = random_place_table(&mut rng, 4, 2);
        let report = assemble(&t).unwrap();
        assert!(report.consistent, "{report:?}");
        assert!(report.noether_residual.unwrap().abs() < 1e-9);
        assert!(report.omega_bar_residual.unwrap().abs() < 1e-9);
    }
}

#[test]
fn assembly_flags_inconsistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut t = random_place_table(&mut rng, 3, 1);
    t.omega_bar_sq = Some(t.omega_bar_sq.unwrap() + 1.0);
    let report = assemble(&t).unwrap();
    assert!(!report.consistent);
    assert!((report.noether_residual.unwrap() + 1.0).abs() < 1e-9);
}

#[test]
fn sweep_is_deterministic_and_isolates_failures() {
    let ns = [10.0, 1.0, 100.0, 1000.0];
    let a = kappa_sweep(&ns, &EvalParams::default(), &PeriodParams::default());
    let b = kappa_sweep(&ns, &EvalParams::default(), &PeriodParams::default());
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(a.rows.len(), 3);
    assert_eq!(a.failures.len(), 1);
    assert_eq!(a.failures[0].n, 1.0);
    assert!(a.f_strictly_increasing());
    let csv = a.to_csv();
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next(), Some(SWEEP_CSV_HEADER));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first[0], 10.0);
    assert_eq!(first[4], a.rows[0].f);
}

#[test]
fn ols_recovers_lines() {
    let xs = [1.0, 2.0, 3.0, 4.0];
    let f = ols(&xs, &xs.map(|x| 2.5 * x - 1.0)).unwrap();
    assert!((f.slope - 2.5).abs() < 1e-14 && (f.intercept + 1.0).abs() < 1e-14 && f.max_residual < 1e-14);
    assert!(ols(&[1.0], &[1.0]).is_none());
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn lambda_data(t: &PlaceTable) -> Vec<(Mixed, LogNv)> {
    t.finite
        .iter()
        .map(|p| (Mixed::exact(p.lambda.clone().unwrap()), p.log_nv.clone()))
        .chain(t.infinite.iter().map(|p| (Mixed::float(p.lambda.unwrap()), LogNv::one())))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn consistency_triangle(seed in any::<u64>(), nf in 0usize..6, ni in 1usize..4) {
        let t = random_place_table(&mut rng_for(seed), nf, ni);
        let gs = gs_height(&t).unwrap();
        let route = faltings_route_height(3, &faltings_from_chi18(&t).unwrap(), &lambda_data(&t)).unwrap();
        prop_assert_eq!(&gs.exact, &route.exact);
        prop_assert!(gs.approx_eq(&route, 1e-10));
    }

    #[test]
    fn gs_height_is_monotone_in_ord(seed in any::<u64>(), bump in 1i64..20) {
        let t = random_place_table(&mut rng_for(seed), 3, 1);
        let base = gs_height(&t).unwrap().total();
        let mut u = t.clone();
        let ord = u.finite[1].ord.clone().unwrap();
        u.finite[1].ord = Some(ord + int(bump));
        prop_assert!(gs_height(&u).unwrap().total() > base);
    }

    #[test]
    fn finite_part_is_homogeneous_in_log_norms(seed in any::<u64>()) {
        let mut t = random_place_table(&mut rng_for(seed), 4, 1);
        t.infinite.clear();
        let once = gs_height(&t).unwrap();
        for p in t.finite.iter_mut() {
            p.log_nv = match &p.log_nv {
                LogNv::Exact(r) => LogNv::Exact(r * int(2)),
                LogNv::Float(x) => LogNv::Float(2.0 * x),
            };
        }
        let twice = gs_height(&t).unwrap();
        prop_assert_eq!(&twice.exact, &(&once.exact * int(2)));
        prop_assert!((twice.float - 2.0 * once.float).abs() <= 1e-12 * once.float.abs().max(1.0));
    }
}
