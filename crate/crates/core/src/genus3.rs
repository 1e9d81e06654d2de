//! Genus-three invariants: pairs of h-type, the h-invariant, the lower bound
//! for the order of vanishing of the modular discriminant, and the local
//! contribution bounds.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::electrical::{lambda_invariant, ElectricalError};
use crate::pmgraph::{EdgeType, PmGraph};
use crate::rational::{format_rational, int, min_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Genus3Error {
    #[error("graph has genus {0}, expected 3")]
    WrongGenus(u32),
    #[error("graph has eliminable vertices; smooth them first")]
    EliminableVerticesPresent,
    #[error("found two distinct pairs of h-type: {first:?} and {second:?}")]
    MultipleHTypePairs {
        first: (String, String),
        second: (String, String),
    },
    #[error("ord = {ord} is smaller than 2 delta = {twice_delta}")]
    InconsistentOrd { ord: String, twice_delta: String },
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error(transparent)]
    Electrical(#[from] ElectricalError),
}

fn require_genus3(graph: &PmGraph) -> Result<(), Genus3Error> {
    match graph.genus() {
        3 => Ok(()),
        g => Err(Genus3Error::WrongGenus(g)),
    }
}

fn is_h_type(graph: &PmGraph, e: &str, f: &str) -> bool {
    let r = graph.restrict_to(&[e, f]).expect("edge ids come from the graph");
    r.vertices().len() == 2
        && r.edges().iter().all(|x| !x.is_loop())
        && r.vertices().iter().all(|v| v.genus == 1)
}

/// The pair of h-type, if any. The graph must have no eliminable vertices.
pub fn find_h_type_pair(graph: &PmGraph) -> Result<Option<(String, String)>, Genus3Error> {
    require_genus3(graph)?;
    if graph.has_eliminable_vertices() {
        return Err(Genus3Error::EliminableVerticesPresent);
    }
    let edges = graph.edges();
    let mut found: Option<(String, String)> = None;
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            if !is_h_type(graph, &edges[i].id, &edges[j].id) {
                continue;
            }
            let pair = (edges[i].id.clone(), edges[j].id.clone());
            if let Some(first) = found {
                return Err(Genus3Error::MultipleHTypePairs { first, second: pair });
            }
            found = Some(pair);
        }
    }
    Ok(found)
}

/// `min(m1, m2)` over the pair of h-type, or zero. Eliminable vertices are
/// smoothed away first.
pub fn h_invariant(graph: &PmGraph) -> Result<Rational, Genus3Error> {
    require_genus3(graph)?;
    let smooth = graph.smooth_eliminable();
    Ok(match find_h_type_pair(&smooth)? {
        Some((e, f)) => {
            let a = &smooth.edge(&e).expect("pair edge").length;
            let b = &smooth.edge(&f).expect("pair edge").length;
            min_rational(a, b).clone()
        }
        None => Rational::zero(),
    })
}

/// `2 h + 2 delta_0 + 6 delta_1`.
pub fn ord_chi18_lower_bound(graph: &PmGraph) -> Result<Rational, Genus3Error> {
    let h = h_invariant(graph)?;
    let delta = graph.classify_edges().delta;
    Ok(h * int(2) + delta.get(0) * int(2) + delta.get(1) * int(6))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HorikawaIndex {
    #[serde(serialize_with = "ser_q")]
    pub index: Rational,
    /// `h + 2 delta_1` when a graph was supplied.
    #[serde(serialize_with = "ser_q_opt")]
    pub lower_bound: Option<Rational>,
    pub satisfies_lower_bound: Option<bool>,
}

/// `Ind = (ord - 2 delta) / 2`, checked against `h + 2 delta_1` when the graph is known.
pub fn horikawa_index_from_ord(
    ord: &Rational,
    delta: &Rational,
    graph: Option<&PmGraph>,
) -> Result<HorikawaIndex, Genus3Error> {
    let twice_delta = delta * int(2);
    if ord < &twice_delta {
        return Err(Genus3Error::InconsistentOrd {
            ord: format_rational(ord),
            twice_delta: format_rational(&twice_delta),
        });
    }
    let index = (ord - twice_delta) / int(2);
    let lower_bound = match graph {
        Some(g) => Some(h_invariant(g)? + g.classify_edges().delta.get(1) * int(2)),
        None => None,
    };
    let satisfies_lower_bound = lower_bound.as_ref().map(|b| &index >= b);
    Ok(HorikawaIndex {
        index,
        lower_bound,
        satisfies_lower_bound,
    })
}

/// `B = h/9 + delta_0/9 + delta_1/3 - lambda`, a lower bound for `ord/18 - lambda`.
pub fn local_contribution_bound(graph: &PmGraph) -> Result<Rational, Genus3Error> {
    let h = h_invariant(graph)?;
    let delta = graph.classify_edges().delta;
    Ok(h / int(9) + delta.get(0) / int(9) + delta.get(1) / int(3) - lambda_invariant(graph))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwogonContribution {
    #[serde(serialize_with = "ser_q")]
    pub value: Rational,
    /// `24 m^2 - 4 m n + n^2` with `m = min(m1, m2)`, `n = |m2 - m1|`.
    #[serde(serialize_with = "ser_q")]
    pub witness: Rational,
}

pub fn twogon_contribution(m1: &Rational, m2: &Rational) -> Result<TwogonContribution, Genus3Error> {
    if !m1.is_positive() || !m2.is_positive() {
        return Err(Genus3Error::BadParameters(format!(
            "multiplicities must be positive, got {} and {}",
            format_rational(m1),
            format_rational(m2)
        )));
    }
    let sum = m1 + m2;
    let m = min_rational(m1, m2).clone();
    let n = (m2 - m1).abs();
    let value = &sum / int(252) + &m / int(9) - m1 * m2 / (&sum * int(7));
    let witness = &m * &m * int(24) - &m * &n * int(4) + &n * &n;
    Ok(TwogonContribution { value, witness })
}

/// `Phi(Gamma_0) = 12 (B - delta_1/21)`, with `Gamma_0` obtained by
/// contracting all edges of type 1. Both sides are evaluated and compared.
pub fn phi_yamaki(graph: &PmGraph) -> Result<Rational, Genus3Error> {
    let bound = local_contribution_bound(graph)?;
    let classes = graph.classify_edges();
    let from_bound = (bound - classes.delta.get(1) / int(21)) * int(12);
    let type_one: Vec<&str> = classes
        .types
        .iter()
        .filter(|(_, t)| **t == EdgeType(1))
        .map(|(id, _)| id.as_str())
        .collect();
    let reduced = graph.contract(&type_one).expect("ids from classification");
    let direct = local_contribution_bound(&reduced)? * int(12);
    debug_assert_eq!(direct, from_bound);
    Ok(direct)
}

/// Genus-three block of an invariant report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Genus3Report {
    #[serde(serialize_with = "ser_q")]
    pub h: Rational,
    pub h_type_pair: Option<(String, String)>,
    #[serde(serialize_with = "ser_q")]
    pub ord_lower_bound: Rational,
    #[serde(serialize_with = "ser_q")]
    pub local_bound: Rational,
    #[serde(serialize_with = "ser_q")]
    pub phi_yamaki: Rational,
    pub local_bound_positive: bool,
    pub phi_yamaki_negative: bool,
}

impl Genus3Report {
    pub fn compute(graph: &PmGraph) -> Result<Genus3Report, Genus3Error> {
        require_genus3(graph)?;
        let h_type_pair = find_h_type_pair(&graph.smooth_eliminable())?;
        let h = h_invariant(graph)?;
        let ord_lower_bound = ord_chi18_lower_bound(graph)?;
        let local_bound = local_contribution_bound(graph)?;
        let phi_yamaki = phi_yamaki(graph)?;
        Ok(Genus3Report {
            local_bound_positive: local_bound.is_positive(),
            phi_yamaki_negative: phi_yamaki.is_negative(),
            h,
            h_type_pair,
            ord_lower_bound,
            local_bound,
            phi_yamaki,
        })
    }
}

/// One row of the two-gon positivity scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwogonScanRow {
    pub m1: u64,
    pub m2: u64,
    pub bound: Rational,
    pub witness: Rational,
}

/// `B` and its witness for every integer pair `1 <= m1, m2 <= m_max`.
pub fn scan_twogon(m_max: u64) -> Vec<TwogonScanRow> {
    let mut rows = Vec::with_capacity((m_max * m_max) as usize);
    for m1 in 1..=m_max {
        for m2 in 1..=m_max {
            let c = twogon_contribution(&int(m1 as i64), &int(m2 as i64)).expect("positive");
            rows.push(TwogonScanRow {
                m1,
                m2,
                bound: c.value,
                witness: c.witness,
            });
        }
    }
    rows
}

pub(crate) fn ser_q<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

pub(crate) fn ser_q_opt<S: serde::Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_some(&format_rational(r)),
        None => s.serialize_none(),
    }
}
