use super::{HeightError, PlaceTable};
use crate::electrical::lambda_invariant;
use crate::genus3::{h_invariant, local_contribution_bound, ord_chi18_lower_bound};
use crate::rational::{format_rational, Rational};
use crate::siegel::{hodge_norm_chi18_prime, EvalParams};

fn fill(
    place: &str,
    field: &'static str,
    slot: &mut Option<Rational>,
    derived: Rational,
) -> Result<(), HeightError> {
    match slot {
        Some(provided) if *provided != derived => Err(HeightError::FieldConflict {
            place: place.to_string(),
            field,
            provided: format_rational(provided),
            derived: format_rational(&derived),
        }),
        Some(_) => Ok(()),
        None => {
            *slot = Some(derived);
            Ok(())
        }
    }
}

/// Relative agreement demanded between a supplied `log_norm_chi18` and one recomputed from `omega`.
const NORM_CONFLICT_TOL: f64 = 1e-8;

/// Derives `lambda`, `delta`, `delta_h` and, in genus three, `h`, the ord
/// lower bound and the local bound from attached graphs; computes
/// `log_norm_chi18` from attached period matrices. Provided values must agree.
pub fn graph_autofill(table: &PlaceTable, params: &EvalParams) -> Result<PlaceTable, HeightError> {
    table.validate()?;
    let mut out = table.clone();
    for p in out.finite.iter_mut() {
        let Some(graph) = p.graph.clone() else { continue };
        if graph.genus() != table.g {
            return Err(HeightError::FieldConflict {
                place: p.label.clone(),
                field: "graph genus",
                provided: table.g.to_string(),
                derived: graph.genus().to_string(),
            });
        }
        let label = p.label.clone();
        fill(&label, "lambda", &mut p.lambda, lambda_invariant(&graph))?;
        let delta = graph.classify_edges().delta;
        fill(&label, "delta", &mut p.delta, delta.total().clone())?;
        let by_type = delta.by_type().to_vec();
        match &p.delta_by_type {
            Some(given) if *given != by_type => {
                let show = |v: &[Rational]| v.iter().map(format_rational).collect::<Vec<_>>().join(",");
                return Err(HeightError::FieldConflict {
                    place: label,
                    field: "delta_by_type",
                    provided: show(given),
                    derived: show(&by_type),
                });
            }
            Some(_) => {}
            None => p.delta_by_type = Some(by_type),
        }
        if table.g == 3 {
            fill(&label, "h", &mut p.h, h_invariant(&graph)?)?;
            fill(&label, "ord_lower_bound", &mut p.ord_lower_bound, ord_chi18_lower_bound(&graph)?)?;
            fill(&label, "local_bound", &mut p.local_bound, local_contribution_bound(&graph)?)?;
        }
    }
    for p in out.infinite.iter_mut() {
        let Some(omega) = &p.omega else { continue };
        let norm = hodge_norm_chi18_prime(&omega.to_point()?, params)?.log_norm;
        match p.log_norm_chi18 {
            Some(given) if (given - norm).abs() > NORM_CONFLICT_TOL * norm.abs().max(1.0) => {
                return Err(HeightError::FieldConflict {
                    place: p.label.clone(),
                    field: "log_norm_chi18",
                    provided: format!("{given:e}"),
                    derived: format!("{norm:e}"),
                });
            }
            Some(_) => {}
            None => p.log_norm_chi18 = Some(norm),
        }
    }
    Ok(out)
}
