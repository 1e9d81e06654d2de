//! Random place tables satisfying all global identities, for tests.

use rand::Rng;

use super::{FinitePlace, InfinitePlace, LogNv, PlaceTable};
use crate::rational::{frac, int, to_f64, Rational};

fn small_rational<R: Rng + ?Sized>(rng: &mut R, max_num: i64) -> Rational {
    frac(rng.gen_range(0..=max_num), rng.gen_range(1..=12))
}

/// A genus-three table with `finite` finite and `infinite >= 1` infinite places.
/// `log Nv` is exact at even-indexed finite places and a float `ln p` at odd ones.
/// Global quantities are chosen so that the Zhang, Noether and admissible
/// self-intersection identities hold and the Faltings height matches the
/// modular-form expression.
pub fn random_place_table<R: Rng + ?Sized>(rng: &mut R, finite: usize, infinite: usize) -> PlaceTable {
    assert!(infinite >= 1);
    const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
    let mut table = PlaceTable::new(3);
    table.degree = infinite as u32;
    for i in 0..finite {
        let log_nv = if i % 2 == 0 {
            LogNv::Exact(frac(rng.gen_range(1..=20), rng.gen_range(1..=6)))
        } else {
            LogNv::Float((PRIMES[rng.gen_range(0..PRIMES.len())] as f64).ln())
        };
        let mut p = FinitePlace::new(&format!("p{i}"), log_nv);
        p.ord = Some(int(rng.gen_range(0..=60)));
        p.lambda = Some(small_rational(rng, 30));
        p.epsilon = Some(small_rational(rng, 30));
        p.phi = Some(small_rational(rng, 30));
        p.delta = Some(small_rational(rng, 30));
        table.finite.push(p);
    }
    for i in 0..infinite {
        let mut p = InfinitePlace::new(&format!("s{i}"));
        p.log_norm_chi18 = Some(rng.gen_range(-80.0..80.0));
        p.lambda = Some(rng.gen_range(-5.0..5.0));
        p.phi = Some(rng.gen_range(0.0..5.0));
        p.delta = Some(rng.gen_range(-30.0..30.0));
        table.infinite.push(p);
    }
    let weighted = |f: &dyn Fn(&FinitePlace) -> &Rational, t: &PlaceTable| -> f64 {
        t.finite.iter().map(|p| to_f64(f(p)) * p.log_nv.value()).sum()
    };

    let fin_gs: f64 = table
        .finite
        .iter()
        .map(|p| (to_f64(p.ord.as_ref().unwrap()) / 18.0 - to_f64(p.lambda.as_ref().unwrap())) * p.log_nv.value())
        .sum();
    let inf_gs: f64 = table
        .infinite
        .iter()
        .map(|p| -p.log_norm_chi18.unwrap() / 18.0 - p.lambda.unwrap())
        .sum();
    let gs = 21.0 * (fin_gs + inf_gs);
    let phi_sum = weighted(&|p| p.phi.as_ref().unwrap(), &table) + table.infinite.iter().map(|p| p.phi.unwrap()).sum::<f64>();
    // gs = 7/4 omega_hat^2 - sum phi log Nv.
    let omega_hat_sq = 4.0 / 7.0 * (gs + phi_sum);
    let omega_bar_sq = omega_hat_sq + weighted(&|p| p.epsilon.as_ref().unwrap(), &table);
    let deg = (weighted(&|p| p.ord.as_ref().unwrap(), &table)
        - table.infinite.iter().map(|p| p.log_norm_chi18.unwrap()).sum::<f64>())
        / 18.0;
    // Choose the last archimedean delta to satisfy Noether's formula.
    let delta_rest = weighted(&|p| p.delta.as_ref().unwrap(), &table)
        + table.infinite[..infinite - 1].iter().map(|p| p.delta.unwrap()).sum::<f64>();
    table.infinite[infinite - 1].delta = Some(12.0 * deg - omega_bar_sq - delta_rest);
    table.omega_hat_sq = Some(omega_hat_sq);
    table.omega_bar_sq = Some(omega_bar_sq);
    table.faltings_degree = Some(deg);
    table.nt_height = Some(0.0);
    table
}
