use serde::Serialize;

use super::{HeightError, LogNv, Mixed, PlaceTable};
use crate::rational::{frac, int, Rational};

fn require_genus3(table: &PlaceTable) -> Result<(), HeightError> {
    table.validate()?;
    match table.g {
        3 => Ok(()),
        g => Err(HeightError::WrongGenus(g)),
    }
}

/// `21 [ sum_fin (ord_v/18 - lambda_v) log Nv + sum_inf (-log||chi'_18||_v / 18 - lambda_v) ]`.
pub fn gs_height(table: &PlaceTable) -> Result<Mixed, HeightError> {
    Ok(place_contributions(table)?.into_iter().map(|c| c.contribution).sum())
}

/// Per-place summands of [`gs_height`], each already multiplied by 21.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlaceContribution {
    pub label: String,
    pub finite: bool,
    pub contribution: Mixed,
    /// `21 B log Nv` with `B = ord_bound/18 - lambda` when the ord lower bound is known.
    pub lower_bound: Option<Mixed>,
    /// Whether the supplied `ord_v` is at least the graph lower bound.
    pub ord_respects_bound: Option<bool>,
}

pub fn place_contributions(table: &PlaceTable) -> Result<Vec<PlaceContribution>, HeightError> {
    require_genus3(table)?;
    let mut out = Vec::new();
    for p in &table.finite {
        let ord = p.require("ord", &p.ord)?;
        let lambda = p.require("lambda", &p.lambda)?;
        let local = ord / int(18) - lambda;
        let bound_local = p.ord_lower_bound.as_ref().map(|b| b / int(18) - lambda);
        out.push(PlaceContribution {
            label: p.label.clone(),
            finite: true,
            contribution: Mixed::exact(local * int(21)).weighted(&p.log_nv),
            lower_bound: bound_local.map(|b| Mixed::exact(b * int(21)).weighted(&p.log_nv)),
            ord_respects_bound: p.ord_lower_bound.as_ref().map(|b| ord >= b),
        });
    }
    for p in &table.infinite {
        let norm = p.require("log_norm_chi18", p.log_norm_chi18)?;
        let lambda = p.require("lambda", p.lambda)?;
        out.push(PlaceContribution {
            label: p.label.clone(),
            finite: false,
            contribution: Mixed::float(21.0 * (-norm / 18.0 - lambda)),
            lower_bound: None,
            ord_respects_bound: None,
        });
    }
    Ok(out)
}

/// `(2g+1)/(2g-2) <omega^, omega^> - sum phi_v log Nv + 12 (g-1) [k:Q] h(x_alpha)`.
pub fn zhang_identity(
    g: u32,
    omega_hat_sq: f64,
    phi: &[(Mixed, LogNv)],
    degree: u32,
    nt_height: f64,
) -> Result<f64, HeightError> {
    if g < 2 {
        return Err(HeightError::WrongGenus(g));
    }
    let g = g as f64;
    let phi_sum: f64 = phi.iter().map(|(v, w)| v.weighted(w).total()).sum();
    Ok((2.0 * g + 1.0) / (2.0 * g - 2.0) * omega_hat_sq - phi_sum + 12.0 * (g - 1.0) * degree as f64 * nt_height)
}

/// `6(2g+1)/(g-1) (deg - sum lambda_v log Nv)`.
pub fn faltings_route_height(g: u32, degree: &Mixed, lambda: &[(Mixed, LogNv)]) -> Result<Mixed, HeightError> {
    if g < 2 {
        return Err(HeightError::WrongGenus(g));
    }
    let sum: Mixed = lambda.iter().map(|(v, w)| v.weighted(w)).sum();
    let factor: Rational = frac(6 * (2 * g as i64 + 1), g as i64 - 1);
    Ok((degree.clone() - sum).scale(&factor))
}

/// `deg det f_* omega = (1/18) [ sum_fin ord_v log Nv - sum_inf log||chi'_18||_v ]`.
pub fn faltings_from_chi18(table: &PlaceTable) -> Result<Mixed, HeightError> {
    require_genus3(table)?;
    let mut sum = Mixed::zero();
    for p in &table.finite {
        sum += Mixed::exact(p.require("ord", &p.ord)?.clone()).weighted(&p.log_nv);
    }
    for p in &table.infinite {
        sum += Mixed::float(-p.require("log_norm_chi18", p.log_norm_chi18)?);
    }
    Ok(sum.scale(&frac(1, 18)))
}

/// `12 deg - <omega-, omega-> - sum delta_v log Nv`; zero on consistent data.
pub fn noether_check(degree: &Mixed, omega_bar_sq: &Mixed, delta: &[(Mixed, LogNv)]) -> Mixed {
    let sum: Mixed = delta.iter().map(|(v, w)| v.weighted(w)).sum();
    degree.scale(&int(12)) - omega_bar_sq.clone() - sum
}

/// `<omega-, omega-> = <omega^, omega^> + sum_fin epsilon_v log Nv`.
pub fn omega_bar_from_hat(omega_hat_sq: &Mixed, epsilon: &[(Mixed, LogNv)]) -> Mixed {
    omega_hat_sq.clone() + epsilon.iter().map(|(v, w)| v.weighted(w)).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjectureReport {
    pub g: u32,
    pub omega_hat_sq: f64,
    /// `sum phi_v log Nv` over all places.
    pub phi_sum: f64,
    /// `(2g-2)/(2g+1) sum phi_v log Nv`.
    pub conjectural_bound: f64,
    /// `2/(3g-1) sum phi_v log Nv`.
    pub unconditional_bound: f64,
    pub conjectural_satisfied: bool,
    pub unconditional_satisfied: bool,
    pub conjectural_tight: bool,
    pub unconditional_tight: bool,
    /// Height of the canonical cycle, `nt_height = 0`.
    pub canonical_height: f64,
}

const TIGHT_TOL: f64 = 1e-12;

pub fn conjecture_report(table: &PlaceTable) -> Result<ConjectureReport, HeightError> {
    table.validate()?;
    let omega_hat_sq = table.require_global("omega_hat_sq", table.omega_hat_sq)?;
    let phi = phi_terms(table)?;
    let g = table.g;
    let phi_sum: f64 = phi.iter().map(|(v, w)| v.weighted(w).total()).sum();
    let gf = g as f64;
    let conjectural_bound = (2.0 * gf - 2.0) / (2.0 * gf + 1.0) * phi_sum;
    let unconditional_bound = 2.0 / (3.0 * gf - 1.0) * phi_sum;
    let tight = |b: f64| (omega_hat_sq - b).abs() <= TIGHT_TOL * omega_hat_sq.abs().max(b.abs()).max(1.0);
    Ok(ConjectureReport {
        g,
        omega_hat_sq,
        phi_sum,
        conjectural_bound,
        unconditional_bound,
        conjectural_satisfied: omega_hat_sq >= conjectural_bound || tight(conjectural_bound),
        unconditional_satisfied: omega_hat_sq >= unconditional_bound || tight(unconditional_bound),
        conjectural_tight: tight(conjectural_bound),
        unconditional_tight: tight(unconditional_bound),
        canonical_height: zhang_identity(g, omega_hat_sq, &phi, table.degree, 0.0)?,
    })
}

fn phi_terms(table: &PlaceTable) -> Result<Vec<(Mixed, LogNv)>, HeightError> {
    let mut out = Vec::new();
    for p in &table.finite {
        out.push((Mixed::exact(p.require("phi", &p.phi)?.clone()), p.log_nv.clone()));
    }
    for p in &table.infinite {
        out.push((Mixed::float(p.require("phi", p.phi)?), LogNv::one()));
    }
    Ok(out)
}

pub(crate) fn lambda_terms(table: &PlaceTable) -> Result<Vec<(Mixed, LogNv)>, HeightError> {
    let mut out = Vec::new();
    for p in &table.finite {
        out.push((Mixed::exact(p.require("lambda", &p.lambda)?.clone()), p.log_nv.clone()));
    }
    for p in &table.infinite {
        out.push((Mixed::float(p.require("lambda", p.lambda)?), LogNv::one()));
    }
    Ok(out)
}

fn delta_terms(table: &PlaceTable) -> Result<Vec<(Mixed, LogNv)>, HeightError> {
    let mut out = Vec::new();
    for p in &table.finite {
        out.push((Mixed::exact(p.require("delta", &p.delta)?.clone()), p.log_nv.clone()));
    }
    for p in &table.infinite {
        out.push((Mixed::float(p.require("delta", p.delta)?), LogNv::one()));
    }
    Ok(out)
}

fn epsilon_terms(table: &PlaceTable) -> Result<Vec<(Mixed, LogNv)>, HeightError> {
    table
        .finite
        .iter()
        .map(|p| Ok((Mixed::exact(p.require("epsilon", &p.epsilon)?.clone()), p.log_nv.clone())))
        .collect()
}

/// Everything that can be evaluated from a place table, with consistency verdicts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssemblyReport {
    pub gs_height: Mixed,
    pub places: Vec<PlaceContribution>,
    pub faltings_degree_from_chi18: Mixed,
    pub faltings_route_height: Mixed,
    pub triangle_consistent: bool,
    /// Present when the table carries a Faltings height.
    pub faltings_degree_discrepancy: Option<f64>,
    pub zhang_height: Option<f64>,
    pub zhang_discrepancy: Option<f64>,
    pub noether_residual: Option<f64>,
    pub omega_bar_residual: Option<f64>,
    pub lower_bounds_respected: bool,
    pub consistent: bool,
}

/// Relative tolerance for float parts of identity checks.
pub const IDENTITY_TOL: f64 = 1e-10;

fn rel_small(x: f64, scale: f64) -> bool {
    x.abs() <= IDENTITY_TOL * scale.abs().max(1.0)
}

pub fn assemble(table: &PlaceTable) -> Result<AssemblyReport, HeightError> {
    let places = place_contributions(table)?;
    let gs: Mixed = places.iter().map(|c| c.contribution.clone()).sum();
    let degree = faltings_from_chi18(table)?;
    let route = faltings_route_height(3, &degree, &lambda_terms(table)?)?;
    let triangle_consistent = gs.approx_eq(&route, IDENTITY_TOL);
    let faltings_degree_discrepancy = table.faltings_degree.map(|d| d - degree.total());

    let phi = phi_terms(table).ok();
    let zhang_height = match (table.omega_hat_sq, &phi) {
        (Some(w), Some(phi)) => Some(zhang_identity(3, w, phi, table.degree, table.nt_height.unwrap_or(0.0))?),
        _ => None,
    };
    let zhang_discrepancy = zhang_height.map(|z| z - gs.total());

    let deg_for_noether = table.faltings_degree.map(Mixed::float).unwrap_or_else(|| degree.clone());
    let noether_residual = match (table.omega_bar_sq, delta_terms(table).ok()) {
        (Some(wb), Some(delta)) => Some(noether_check(&deg_for_noether, &Mixed::float(wb), &delta).total()),
        _ => None,
    };
    let omega_bar_residual = match (table.omega_bar_sq, table.omega_hat_sq, epsilon_terms(table).ok()) {
        (Some(wb), Some(wh), Some(eps)) => Some(wb - omega_bar_from_hat(&Mixed::float(wh), &eps).total()),
        _ => None,
    };
    let lower_bounds_respected = places.iter().all(|c| c.ord_respects_bound != Some(false));
    let scale = gs.total().abs() + 12.0 * deg_for_noether.total().abs();
    let consistent = triangle_consistent
        && lower_bounds_respected
        && faltings_degree_discrepancy.is_none_or(|d| rel_small(d, degree.total()))
        && zhang_discrepancy.is_none_or(|d| rel_small(d, gs.total()))
        && noether_residual.is_none_or(|r| rel_small(r, scale))
        && omega_bar_residual.is_none_or(|r| rel_small(r, table.omega_bar_sq.unwrap_or(1.0)));
    Ok(AssemblyReport {
        gs_height: gs,
        places,
        faltings_degree_from_chi18: degree,
        faltings_route_height: route,
        triangle_consistent,
        faltings_degree_discrepancy,
        zhang_height,
        zhang_discrepancy,
        noether_residual,
        omega_bar_residual,
        lower_bounds_respected,
        consistent,
    })
}
