//! Random valid pm-graphs for property testing and fuzzing.

use rand::Rng;

use super::{Edge, PmGraph, Vertex};
use crate::rational::{frac, Rational};

#[derive(Debug, Clone, Copy)]
pub struct RandomGraphParams {
    pub max_vertices: usize,
    pub max_extra_edges: usize,
    pub max_genus: u32,
    /// Lengths are `p/q` with `1 <= p <= max_numerator`, `1 <= q <= max_denominator`.
    pub max_numerator: i64,
    pub max_denominator: i64,
    pub allow_loops: bool,
}

impl Default for RandomGraphParams {
    fn default() -> Self {
        RandomGraphParams {
            max_vertices: 8,
            max_extra_edges: 4,
            max_genus: 6,
            max_numerator: 9,
            max_denominator: 4,
            allow_loops: true,
        }
    }
}

pub fn random_length<R: Rng + ?Sized>(rng: &mut R, params: &RandomGraphParams) -> Rational {
    frac(
        rng.gen_range(1..=params.max_numerator),
        rng.gen_range(1..=params.max_denominator),
    )
}

/// Draws a connected multigraph and a polarization making it a pm-graph of
/// genus at most `max_genus`. Retries until the constraints can be met.
pub fn random_pm_graph<R: Rng + ?Sized>(rng: &mut R, params: &RandomGraphParams) -> PmGraph {
    loop {
        if let Some(g) = try_random_pm_graph(rng, params) {
            return g;
        }
    }
}

fn try_random_pm_graph<R: Rng + ?Sized>(rng: &mut R, params: &RandomGraphParams) -> Option<PmGraph> {
    let n = rng.gen_range(1..=params.max_vertices.max(1));
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push((u, v));
    }
    for _ in 0..rng.gen_range(0..=params.max_extra_edges) {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v && !params.allow_loops {
            continue;
        }
        edges.push((u, v));
    }
    let betti = edges.len() as i64 - n as i64 + 1;
    let mut valence = vec![0i64; n];
    for &(u, v) in &edges {
        valence[u] += 1;
        valence[v] += 1;
    }
    // Smallest genera making K effective, then spend the remaining budget at random.
    let mut genus: Vec<u32> = valence
        .iter()
        .map(|&val| if val < 2 { 1 } else { 0 })
        .collect();
    let forced: i64 = genus.iter().map(|&q| q as i64).sum();
    let budget = params.max_genus as i64 - betti - forced;
    if budget < 0 {
        return None;
    }
    let extra = rng.gen_range(0..=budget);
    for _ in 0..extra {
        let p = rng.gen_range(0..n);
        genus[p] += 1;
    }
    if betti + genus.iter().map(|&q| q as i64).sum::<i64>() < 1 {
        return None;
    }
    let vertices = genus
        .into_iter()
        .enumerate()
        .map(|(i, q)| Vertex {
            id: format!("v{i}"),
            genus: q,
        })
        .collect();
    let edges = edges
        .into_iter()
        .enumerate()
        .map(|(i, (u, v))| Edge {
            id: format!("e{i}"),
            u,
            v,
            length: random_length(rng, params),
        })
        .collect();
    PmGraph::from_parts(vertices, edges).ok()
}

/// Random polarized tree of the given genus with every leaf of positive genus.
pub fn random_polarized_tree<R: Rng + ?Sized>(rng: &mut R, genus: u32, params: &RandomGraphParams) -> PmGraph {
    loop {
        let n = rng.gen_range(1..=params.max_vertices.max(1));
        let mut edges = Vec::new();
        for v in 1..n {
            edges.push((rng.gen_range(0..v), v));
        }
        let mut valence = vec![0u32; n];
        for &(u, v) in &edges {
            valence[u] += 1;
            valence[v] += 1;
        }
        let mut q: Vec<u32> = valence.iter().map(|&val| (val < 2) as u32).collect();
        let forced: u32 = q.iter().sum();
        if forced > genus {
            continue;
        }
        for _ in 0..genus - forced {
            let p = rng.gen_range(0..n);
            q[p] += 1;
        }
        let vertices = q
            .into_iter()
            .enumerate()
            .map(|(i, genus)| Vertex {
                id: format!("v{i}"),
                genus,
            })
            .collect();
        let edges = edges
            .into_iter()
            .enumerate()
            .map(|(i, (u, v))| Edge {
                id: format!("e{i}"),
                u,
                v,
                length: random_length(rng, params),
            })
            .collect();
        if let Ok(g) = PmGraph::from_parts(vertices, edges) {
            return g;
        }
    }
}

/// Glues `pieces` into a wedge sum: piece `i` is attached at one of its
/// vertices to a vertex of the graph built so far. Vertex genera of the
/// pieces are kept; the result has genus equal to the sum of piece genera.
pub fn wedge_sum<R: Rng + ?Sized>(rng: &mut R, pieces: &[PmGraph]) -> PmGraph {
    let mut vertices: Vec<Vertex> = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();
    for (k, piece) in pieces.iter().enumerate() {
        let offset = vertices.len();
        let glue_here = rng.gen_range(0..piece.vertices().len());
        let glue_there = if offset == 0 { None } else { Some(rng.gen_range(0..offset)) };
        let mut map = Vec::with_capacity(piece.vertices().len());
        for (i, v) in piece.vertices().iter().enumerate() {
            match (i == glue_here, glue_there) {
                (true, Some(t)) => {
                    vertices[t].genus += v.genus;
                    map.push(t);
                }
                _ => {
                    map.push(vertices.len());
                    vertices.push(Vertex {
                        id: format!("w{k}_{}", v.id),
                        genus: v.genus,
                    });
                }
            }
        }
        for e in piece.edges() {
            edges.push(Edge {
                id: format!("w{k}_{}", e.id),
                u: map[e.u],
                v: map[e.v],
                length: e.length.clone(),
            });
        }
    }
    PmGraph::from_parts(vertices, edges).expect("wedge sums of pm-graphs are pm-graphs")
}
