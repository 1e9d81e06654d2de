//! Effective resistance on pm-graphs and the resistance-based invariants
//! `tau`, `theta`, `lambda`, the slope `mu` and the two-gon height jump.
//!
//! Every value is an exact rational. Resistances come from the inverse of a
//! grounded weighted Laplacian (conductance `1/l` per edge, loops dropped).

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::genus3::Genus3Report;
use crate::pmgraph::{DeltaVector, PmGraph};
use crate::rational::{format_rational, frac, int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ElectricalError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("quadratic profile on edge `{edge}` disagrees with the quarter-point sample")]
    ProfileInterpolationMismatch { edge: String },
    #[error("genus {0} is too small (need g >= 2)")]
    GenusTooSmall(u32),
    #[error("bad parameters: {0}")]
    BadParameters(String),
}

/// Inverts a square matrix by Gauss-Jordan elimination; `None` if singular.
pub(crate) fn invert(mut a: Vec<Vec<Rational>>) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let scale = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &scale;
        }
        for x in inv[col].iter_mut() {
            *x *= &scale;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in 0..n {
                let d = &factor * &a[col][c];
                a[r][c] -= d;
                let d = &factor * &inv[col][c];
                inv[r][c] -= d;
            }
        }
    }
    Some(inv)
}

/// Full matrix of vertex-to-vertex effective resistances.
pub fn resistance_matrix(graph: &PmGraph) -> Vec<Vec<Rational>> {
    let n = graph.vertices().len();
    let mut r = vec![vec![Rational::zero(); n]; n];
    if n == 1 {
        return r;
    }
    // Ground vertex 0; the reduced Laplacian of a connected graph is invertible.
    let mut lap = vec![vec![Rational::zero(); n - 1]; n - 1];
    for e in graph.edges() {
        if e.is_loop() {
            continue;
        }
        let c = e.length.recip();
        let (u, v) = (e.u, e.v);
        if u > 0 {
            lap[u - 1][u - 1] += &c;
        }
        if v > 0 {
            lap[v - 1][v - 1] += &c;
        }
        if u > 0 && v > 0 {
            lap[u - 1][v - 1] -= &c;
            lap[v - 1][u - 1] -= &c;
        }
    }
    let m = invert(lap).expect("reduced Laplacian of a connected graph is invertible");
    let entry = |p: usize, q: usize| -> Rational {
        if p == 0 || q == 0 {
            Rational::zero()
        } else {
            m[p - 1][q - 1].clone()
        }
    };
    for p in 0..n {
        for q in p + 1..n {
            let value = entry(p, p) + entry(q, q) - entry(p, q) * int(2);
            r[p][q] = value.clone();
            r[q][p] = value;
        }
    }
    r
}

pub fn effective_resistance(graph: &PmGraph, p: &str, q: &str) -> Result<Rational, ElectricalError> {
    let pi = graph
        .vertex_index(p)
        .ok_or_else(|| ElectricalError::UnknownVertex(p.to_string()))?;
    let qi = graph
        .vertex_index(q)
        .ok_or_else(|| ElectricalError::UnknownVertex(q.to_string()))?;
    Ok(resistance_matrix(graph)[pi][qi].clone())
}

/// `r(p, x(t)) = a t^2 + b t + c` for `t` the distance from the edge's first endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResistanceProfile {
    pub edge: String,
    pub length: Rational,
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
}

impl ResistanceProfile {
    pub fn eval(&self, t: &Rational) -> Rational {
        &self.a * t * t + &self.b * t + &self.c
    }

    /// `int_0^l (d/dt r)^2 dt`.
    pub fn energy(&self) -> Rational {
        let l = &self.length;
        let (a, b) = (&self.a, &self.b);
        a * a * l * l * l * frac(4, 3) + a * b * l * l * int(2) + b * b * l
    }
}

pub fn resistance_profile(graph: &PmGraph, p: &str, edge: &str) -> Result<ResistanceProfile, ElectricalError> {
    let pi = graph
        .vertex_index(p)
        .ok_or_else(|| ElectricalError::UnknownVertex(p.to_string()))?;
    let ei = graph
        .edge_index(edge)
        .ok_or_else(|| ElectricalError::UnknownEdge(edge.to_string()))?;
    profile_at(graph, pi, ei)
}

fn profile_at(graph: &PmGraph, p: usize, ei: usize) -> Result<ResistanceProfile, ElectricalError> {
    let e = &graph.edges()[ei];
    let l = e.length.clone();
    let half = &l / int(2);
    let quarter = &l / int(4);
    // Subdividing at l/2 keeps the first half under the same id, so the
    // second split at l/4 is again measured from the first endpoint.
    let split = graph
        .subdivide_edge(&e.id, &half)
        .and_then(|g| g.subdivide_edge(&e.id, &quarter))
        .expect("midpoints lie strictly inside the edge");
    let n = graph.vertices().len();
    let r = resistance_matrix(&split);
    let r0 = r[p][e.u].clone();
    let r1 = r[p][e.v].clone();
    let rm = r[p][n].clone();
    let rq = r[p][n + 1].clone();
    let a = (&r1 - &rm * int(2) + &r0) * int(2) / (&l * &l);
    let b = (&rm * int(4) - &r1 - &r0 * int(3)) / &l;
    let profile = ResistanceProfile {
        edge: e.id.clone(),
        length: l,
        a,
        b,
        c: r0,
    };
    if profile.eval(&quarter) != rq {
        return Err(ElectricalError::ProfileInterpolationMismatch { edge: e.id.clone() });
    }
    Ok(profile)
}

/// `tau` computed from the resistance profiles based at vertex index `p`.
pub fn tau_from(graph: &PmGraph, p: usize) -> Result<Rational, ElectricalError> {
    let mut total = Rational::zero();
    for ei in 0..graph.edges().len() {
        total += profile_at(graph, p, ei)?.energy();
    }
    Ok(total / int(4))
}

pub fn tau(graph: &PmGraph) -> Rational {
    tau_from(graph, 0).expect("quadratic restriction of r(p, .) holds on every edge")
}

/// `theta = sum_{p,q} K(p) K(q) r(p,q)` over ordered vertex pairs.
pub fn theta_invariant(graph: &PmGraph) -> Rational {
    let k = graph.canonical_divisor();
    let r = resistance_matrix(graph);
    let mut total = Rational::zero();
    for (p, kp) in k.iter().enumerate() {
        for (q, kq) in k.iter().enumerate() {
            if *kp != 0 && *kq != 0 {
                total += &r[p][q] * int(kp * kq);
            }
        }
    }
    total
}

fn lambda_from(g: u32, tau: &Rational, theta: &Rational, delta: &Rational) -> Rational {
    let g = g as i64;
    (tau * int(6 * (g - 1)) + theta / int(2) + delta * frac(g + 1, 2)) / int(8 * g + 4)
}

pub fn lambda_invariant(graph: &PmGraph) -> Rational {
    lambda_from(
        graph.genus(),
        &tau(graph),
        &theta_invariant(graph),
        &graph.total_length(),
    )
}

/// Solves `lambda = (g-1)/(6(2g+1)) phi + (delta + epsilon)/12` for `phi`.
pub fn phi_from_lambda_epsilon(
    g: u32,
    lambda: &Rational,
    epsilon: &Rational,
    delta: &Rational,
) -> Result<Rational, ElectricalError> {
    if g < 2 {
        return Err(ElectricalError::GenusTooSmall(g));
    }
    let g = g as i64;
    Ok((lambda - (delta + epsilon) / int(12)) * frac(6 * (2 * g + 1), g - 1))
}

fn mu_from(g: u32, lambda: &Rational, delta: &DeltaVector) -> Rational {
    let gi = g as i64;
    let mut mu = lambda * int(8 * gi + 4) - delta.get(0) * int(gi);
    for h in 1..=g / 2 {
        let h = h as i64;
        mu -= delta.get(h as u32) * int(4 * h * (gi - h));
    }
    mu
}

pub fn slope_mu(graph: &PmGraph) -> Rational {
    mu_from(
        graph.genus(),
        &lambda_invariant(graph),
        &graph.classify_edges().delta,
    )
}

/// Height jump for two smooth components of genera `h`, `g-h-1` meeting in
/// two points with local multiplicities `m1`, `m2`.
pub fn height_jump_twogon(g: u32, h: u32, m1: &Rational, m2: &Rational) -> Result<Rational, ElectricalError> {
    if g < 2 {
        return Err(ElectricalError::BadParameters(format!("g = {g} < 2")));
    }
    if h > g - 1 {
        return Err(ElectricalError::BadParameters(format!("h = {h} > g - 1 = {}", g - 1)));
    }
    if !m1.is_positive() || !m2.is_positive() {
        return Err(ElectricalError::BadParameters(format!(
            "multiplicities must be positive, got {} and {}",
            format_rational(m1),
            format_rational(m2)
        )));
    }
    let factor = int(4 * (g - h - 1) as i64 * h as i64);
    Ok(m1 * m2 * factor / (m1 + m2))
}

/// Exact invariants of one pm-graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantReport {
    pub g: u32,
    pub delta: DeltaVector,
    pub tau: Rational,
    pub theta: Rational,
    pub lambda: Rational,
    pub mu: Rational,
    pub genus3: Option<Genus3Report>,
}

impl InvariantReport {
    pub fn compute(graph: &PmGraph) -> InvariantReport {
        let g = graph.genus();
        let delta = graph.classify_edges().delta;
        let tau = tau(graph);
        let theta = theta_invariant(graph);
        let lambda = lambda_from(g, &tau, &theta, delta.total());
        let mu = mu_from(g, &lambda, &delta);
        let genus3 = (g == 3).then(|| Genus3Report::compute(graph).expect("genus checked"));
        InvariantReport {
            g,
            delta,
            tau,
            theta,
            lambda,
            mu,
            genus3,
        }
    }

    /// Checks the two defining identities of the report.
    pub fn is_consistent(&self) -> bool {
        let g = self.g as i64;
        let cinkir = &self.lambda * int(8 * g + 4)
            == &self.tau * int(6 * (g - 1)) + &self.theta / int(2) + self.delta.total() * frac(g + 1, 2);
        cinkir && self.mu == mu_from(self.g, &self.lambda, &self.delta) && !self.mu.is_negative()
    }

    pub const CSV_HEADER: &'static str = "g,delta,tau,theta,lambda,mu,delta_by_type,h,ord_lower_bound,local_bound,phi_yamaki";

    pub fn to_csv_row(&self) -> String {
        let by_type: Vec<String> = self.delta.by_type().iter().map(format_rational).collect();
        let mut fields = vec![
            self.g.to_string(),
            format_rational(self.delta.total()),
            format_rational(&self.tau),
            format_rational(&self.theta),
            format_rational(&self.lambda),
            format_rational(&self.mu),
            by_type.join(";"),
        ];
        match &self.genus3 {
            Some(r) => fields.extend([
                format_rational(&r.h),
                format_rational(&r.ord_lower_bound),
                format_rational(&r.local_bound),
                format_rational(&r.phi_yamaki),
            ]),
            None => fields.extend(std::iter::repeat(String::new()).take(4)),
        }
        fields.join(",")
    }
}

impl Serialize for InvariantReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("InvariantReport", 7)?;
        st.serialize_field("g", &self.g)?;
        st.serialize_field("delta", &self.delta)?;
        st.serialize_field("tau", &format_rational(&self.tau))?;
        st.serialize_field("theta", &format_rational(&self.theta))?;
        st.serialize_field("lambda", &format_rational(&self.lambda))?;
        st.serialize_field("mu", &format_rational(&self.mu))?;
        st.serialize_field("genus3", &self.genus3)?;
        st.end()
    }
}
