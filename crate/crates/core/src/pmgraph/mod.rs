//! Polarized metrized graphs (pm-graphs).
//!
//! A pm-graph is a connected finite multigraph (loops allowed) with positive
//! rational edge lengths and a nonnegative integer genus `q(p)` on every
//! vertex, subject to effectivity of the canonical divisor
//! `K(p) = v(p) - 2 + 2 q(p)`. Its genus is `b_1 + sum q(p)`.
//!
//! All structural operations here are exact and return fresh graphs;
//! a [`PmGraph`] is immutable after validation.

mod blocks;
mod io;
pub mod random;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{format_rational, Rational};

pub use io::{RawEdge, RawGraph, RawVertex};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("graph has no vertices")]
    EmptyVertexSet,
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("vertex `{vertex}` has negative genus {genus}")]
    NegativeVertexGenus { vertex: String, genus: i64 },
    #[error("edge `{edge}` has non-positive length {length}")]
    NonPositiveLength { edge: String, length: String },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("canonical divisor is not effective: K({vertex}) = {value}")]
    NonEffectiveCanonicalDivisor { vertex: String, value: i64 },
    #[error("graph has genus zero")]
    GenusZero,
    #[error("split point {t} is not strictly inside edge `{edge}`")]
    SplitOutOfRange { edge: String, t: String },
    #[error("malformed graph description: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: String,
    pub genus: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub u: usize,
    pub v: usize,
    pub length: Rational,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    fn other_end(&self, p: usize) -> usize {
        if self.u == p {
            self.v
        } else {
            self.u
        }
    }
}

/// Type of an edge: `0` for non-separating edges, otherwise the smaller
/// genus `h` of the two pm-graphs left after removing the edge's interior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeType(pub u32);

impl EdgeType {
    pub const NON_SEPARATING: EdgeType = EdgeType(0);

    pub fn is_separating(self) -> bool {
        self.0 > 0
    }
}

/// Total edge length by type, `delta_h` for `h = 0..=g/2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaVector {
    by_type: Vec<Rational>,
    total: Rational,
}

impl DeltaVector {
    fn zero(genus: u32) -> Self {
        DeltaVector {
            by_type: vec![Rational::zero(); genus as usize / 2 + 1],
            total: Rational::zero(),
        }
    }

    /// `delta_h`; zero for `h` beyond `g/2`.
    pub fn get(&self, h: u32) -> Rational {
        self.by_type
            .get(h as usize)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn total(&self) -> &Rational {
        &self.total
    }

    pub fn by_type(&self) -> &[Rational] {
        &self.by_type
    }
}

impl Serialize for DeltaVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("DeltaVector", 2)?;
        let by_type: Vec<String> = self.by_type.iter().map(format_rational).collect();
        st.serialize_field("by_type", &by_type)?;
        st.serialize_field("total", &format_rational(&self.total))?;
        st.end()
    }
}

/// Per-edge types together with the aggregated [`DeltaVector`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeClassification {
    pub types: BTreeMap<String, EdgeType>,
    pub delta: DeltaVector,
}

/// A validated polarized metrized graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PmGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    genus: u32,
}

impl PmGraph {
    /// Validates vertex/edge lists given by id. Edge endpoints refer to vertex ids.
    pub fn new<V, E>(vertices: V, edges: E) -> Result<PmGraph, GraphError>
    where
        V: IntoIterator<Item = (String, i64)>,
        E: IntoIterator<Item = (String, String, String, Rational)>,
    {
        let raw = RawGraph {
            vertices: vertices
                .into_iter()
                .map(|(id, genus)| RawVertex { id, genus })
                .collect(),
            edges: edges
                .into_iter()
                .map(|(id, u, v, length)| RawEdge { id, u, v, length })
                .collect(),
        };
        Self::validate(&raw)
    }

    /// Checks the pm-graph conditions and builds the graph.
    pub fn validate(raw: &RawGraph) -> Result<PmGraph, GraphError> {
        if raw.vertices.is_empty() {
            return Err(GraphError::EmptyVertexSet);
        }
        let mut index = BTreeMap::new();
        let mut vertices = Vec::with_capacity(raw.vertices.len());
        for (i, rv) in raw.vertices.iter().enumerate() {
            if index.insert(rv.id.clone(), i).is_some() {
                return Err(GraphError::DuplicateId(rv.id.clone()));
            }
            if rv.genus < 0 {
                return Err(GraphError::NegativeVertexGenus {
                    vertex: rv.id.clone(),
                    genus: rv.genus,
                });
            }
            vertices.push(Vertex {
                id: rv.id.clone(),
                genus: rv.genus as u32,
            });
        }
        let mut edge_ids = BTreeSet::new();
        let mut edges = Vec::with_capacity(raw.edges.len());
        for re in &raw.edges {
            if !edge_ids.insert(re.id.clone()) {
                return Err(GraphError::DuplicateId(re.id.clone()));
            }
            let u = *index
                .get(&re.u)
                .ok_or_else(|| GraphError::UnknownVertex(re.u.clone()))?;
            let v = *index
                .get(&re.v)
                .ok_or_else(|| GraphError::UnknownVertex(re.v.clone()))?;
            if !re.length.is_positive() {
                return Err(GraphError::NonPositiveLength {
                    edge: re.id.clone(),
                    length: format_rational(&re.length),
                });
            }
            edges.push(Edge {
                id: re.id.clone(),
                u,
                v,
                length: re.length.clone(),
            });
        }
        Self::from_parts(vertices, edges)
    }

    fn from_parts(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<PmGraph, GraphError> {
        let mut graph = PmGraph {
            vertices,
            edges,
            genus: 0,
        };
        if !graph.is_connected_without(None) {
            return Err(GraphError::Disconnected);
        }
        for (p, k) in graph.canonical_divisor().into_iter().enumerate() {
            if k < 0 {
                return Err(GraphError::NonEffectiveCanonicalDivisor {
                    vertex: graph.vertices[p].id.clone(),
                    value: k,
                });
            }
        }
        let betti = graph.edges.len() as i64 - graph.vertices.len() as i64 + 1;
        let genus = betti + graph.vertices.iter().map(|v| v.genus as i64).sum::<i64>();
        if genus < 1 {
            return Err(GraphError::GenusZero);
        }
        graph.genus = genus as u32;
        Ok(graph)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn betti_number(&self) -> u32 {
        (self.edges.len() + 1 - self.vertices.len()) as u32
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    /// Number of edge ends at vertex `p`; loops count twice.
    pub fn valence(&self, p: usize) -> u32 {
        self.edges
            .iter()
            .map(|e| (e.u == p) as u32 + (e.v == p) as u32)
            .sum()
    }

    /// `K(p) = v(p) - 2 + 2 q(p)` in vertex order.
    pub fn canonical_divisor(&self) -> Vec<i64> {
        (0..self.vertices.len())
            .map(|p| self.valence(p) as i64 - 2 + 2 * self.vertices[p].genus as i64)
            .collect()
    }

    /// Canonical divisor keyed by vertex id.
    pub fn canonical_divisor_by_id(&self) -> BTreeMap<String, i64> {
        self.vertices
            .iter()
            .map(|v| v.id.clone())
            .zip(self.canonical_divisor())
            .collect()
    }

    /// Total length `delta`.
    pub fn total_length(&self) -> Rational {
        self.edges
            .iter()
            .fold(Rational::zero(), |acc, e| acc + &e.length)
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.vertices.len()
    }

    fn is_eliminable(&self, p: usize) -> bool {
        self.vertices[p].genus == 0 && self.valence(p) == 2
    }

    pub fn has_eliminable_vertices(&self) -> bool {
        (0..self.vertices.len()).any(|p| self.is_eliminable(p))
    }

    fn edge_indices<I: AsRef<str>>(&self, ids: &[I]) -> Result<BTreeSet<usize>, GraphError> {
        ids.iter()
            .map(|id| {
                self.edge_index(id.as_ref())
                    .ok_or_else(|| GraphError::UnknownEdge(id.as_ref().to_string()))
            })
            .collect()
    }

    fn is_connected_without(&self, removed: Option<usize>) -> bool {
        self.component_of(0, removed).len() == self.vertices.len()
    }

    /// Vertices reachable from `start` when edge `removed` is deleted.
    fn component_of(&self, start: usize, removed: Option<usize>) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            for (i, e) in self.edges.iter().enumerate() {
                if Some(i) == removed || (e.u != p && e.v != p) {
                    continue;
                }
                let q = e.other_end(p);
                if seen.insert(q) {
                    queue.push_back(q);
                }
            }
        }
        seen
    }

    fn fresh_vertex_id(&self, base: &str) -> String {
        fresh_id(base, |c| self.vertex_index(c).is_some())
    }

    fn fresh_edge_id(&self, base: &str) -> String {
        fresh_id(base, |c| self.edge_index(c).is_some())
    }

    /// Inserts a genus-0 vertex at distance `t` from `edge`'s first endpoint.
    ///
    /// The first piece keeps the edge id; the second piece and the new vertex
    /// get fresh ids derived from it.
    pub fn subdivide_edge(&self, edge: &str, t: &Rational) -> Result<PmGraph, GraphError> {
        let ei = self
            .edge_index(edge)
            .ok_or_else(|| GraphError::UnknownEdge(edge.to_string()))?;
        let e = &self.edges[ei];
        if !t.is_positive() || t >= &e.length {
            return Err(GraphError::SplitOutOfRange {
                edge: edge.to_string(),
                t: format_rational(t),
            });
        }
        let mut vertices = self.vertices.clone();
        let mut edges = self.edges.clone();
        let w = vertices.len();
        vertices.push(Vertex {
            id: self.fresh_vertex_id(&format!("{edge}@{}", format_rational(t))),
            genus: 0,
        });
        let second = Edge {
            id: self.fresh_edge_id(&format!("{edge}'")),
            u: w,
            v: e.v,
            length: &e.length - t,
        };
        edges[ei].v = w;
        edges[ei].length = t.clone();
        edges.push(second);
        Self::from_parts(vertices, edges)
    }

    /// Removes every genus-0 vertex of valence 2 by merging its two edges.
    ///
    /// A vertex whose only edge is a loop is kept, so a circle reduces to a
    /// single loop on its lexicographically smallest vertex. The merged edge
    /// takes the smaller of the two edge ids.
    pub fn smooth_eliminable(&self) -> PmGraph {
        let mut graph = self.clone();
        loop {
            let candidate = (0..graph.vertices.len())
                .filter(|&p| graph.is_eliminable(p))
                .filter(|&p| !graph.edges.iter().any(|e| e.is_loop() && e.u == p))
                .max_by(|&a, &b| graph.vertices[a].id.cmp(&graph.vertices[b].id));
            let Some(p) = candidate else {
                return graph;
            };
            let incident: Vec<usize> = (0..graph.edges.len())
                .filter(|&i| graph.edges[i].u == p || graph.edges[i].v == p)
                .collect();
            debug_assert_eq!(incident.len(), 2);
            let (e1, e2) = (&graph.edges[incident[0]], &graph.edges[incident[1]]);
            let merged = Edge {
                id: e1.id.clone().min(e2.id.clone()),
                u: e1.other_end(p),
                v: e2.other_end(p),
                length: &e1.length + &e2.length,
            };
            let mut edges: Vec<Edge> = graph
                .edges
                .iter()
                .enumerate()
                .filter(|(i, _)| !incident.contains(i))
                .map(|(_, e)| e.clone())
                .collect();
            edges.push(merged);
            let mut vertices = graph.vertices.clone();
            vertices.remove(p);
            for e in &mut edges {
                e.u -= (e.u > p) as usize;
                e.v -= (e.v > p) as usize;
            }
            graph = Self::from_parts(vertices, edges)
                .expect("smoothing an eliminable vertex preserves the pm-graph conditions");
        }
    }

    /// Contracts every edge of `subset` to a point.
    ///
    /// The polarization of a merged vertex is read off from the pushforward
    /// of the canonical divisor: `q_S(w) = (K_push(w) - val(w) + 2) / 2`.
    /// Merged vertices take the lexicographically smallest id.
    pub fn contract<I: AsRef<str>>(&self, subset: &[I]) -> Result<PmGraph, GraphError> {
        let subset = self.edge_indices(subset)?;
        Ok(self.contract_indices(&subset))
    }

    /// Contracts every edge *not* in `subset`.
    pub fn restrict_to<I: AsRef<str>>(&self, subset: &[I]) -> Result<PmGraph, GraphError> {
        let keep = self.edge_indices(subset)?;
        let complement: BTreeSet<usize> = (0..self.edges.len())
            .filter(|i| !keep.contains(i))
            .collect();
        Ok(self.contract_indices(&complement))
    }

    pub(crate) fn contract_indices(&self, subset: &BTreeSet<usize>) -> PmGraph {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut root = x;
            while parent[root] != root {
                root = parent[root];
            }
            let mut cur = x;
            while parent[cur] != root {
                let next = parent[cur];
                parent[cur] = root;
                cur = next;
            }
            root
        }
        for &i in subset {
            let (a, b) = (
                find(&mut parent, self.edges[i].u),
                find(&mut parent, self.edges[i].v),
            );
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        // New vertices in order of their smallest original index.
        let mut new_index = vec![usize::MAX; n];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for p in 0..n {
            let root = find(&mut parent, p);
            if new_index[root] == usize::MAX {
                new_index[root] = classes.len();
                classes.push(Vec::new());
            }
            new_index[p] = new_index[root];
            classes[new_index[p]].push(p);
        }
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !subset.contains(i))
            .map(|(_, e)| Edge {
                id: e.id.clone(),
                u: new_index[e.u],
                v: new_index[e.v],
                length: e.length.clone(),
            })
            .collect();
        let canonical = self.canonical_divisor();
        let vertices: Vec<Vertex> = classes
            .iter()
            .enumerate()
            .map(|(w, members)| {
                let pushed: i64 = members.iter().map(|&p| canonical[p]).sum();
                let valence: i64 = edges
                    .iter()
                    .map(|e| (e.u == w) as i64 + (e.v == w) as i64)
                    .sum();
                let twice_genus = pushed - valence + 2;
                debug_assert!(twice_genus >= 0 && twice_genus % 2 == 0);
                Vertex {
                    id: members
                        .iter()
                        .map(|&p| self.vertices[p].id.clone())
                        .min()
                        .expect("non-empty class"),
                    genus: (twice_genus / 2) as u32,
                }
            })
            .collect();
        Self::from_parts(vertices, edges).expect("contraction preserves the pm-graph conditions")
    }

    /// Types every edge and aggregates the lengths into `delta_h`.
    pub fn classify_edges(&self) -> EdgeClassification {
        let mut delta = DeltaVector::zero(self.genus);
        let mut types = BTreeMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            let ty = self.edge_type_of(i);
            delta.by_type[ty.0 as usize] += &e.length;
            delta.total += &e.length;
            types.insert(e.id.clone(), ty);
        }
        EdgeClassification { types, delta }
    }

    fn edge_type_of(&self, i: usize) -> EdgeType {
        let e = &self.edges[i];
        if e.is_loop() {
            return EdgeType::NON_SEPARATING;
        }
        let side = self.component_of(e.u, Some(i));
        if side.contains(&e.v) {
            return EdgeType::NON_SEPARATING;
        }
        // Removing a bridge splits b_1 between the two sides.
        let side_edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|(j, f)| *j != i && side.contains(&f.u))
            .count();
        let side_betti = side_edges as i64 - side.len() as i64 + 1;
        let side_genus =
            side_betti + side.iter().map(|&p| self.vertices[p].genus as i64).sum::<i64>();
        let other = self.genus as i64 - side_genus;
        EdgeType(side_genus.min(other) as u32)
    }

    /// Splits the graph at its cut vertices into irreducible pieces, each
    /// realized as a pm-graph of the same genus by contracting all edges
    /// outside the piece.
    pub fn wedge_decompose(&self) -> Vec<PmGraph> {
        if self.edges.is_empty() {
            return vec![self.clone()];
        }
        blocks::edge_blocks(self)
            .into_iter()
            .map(|block| {
                let outside: BTreeSet<usize> = (0..self.edges.len())
                    .filter(|i| !block.contains(i))
                    .collect();
                self.contract_indices(&outside)
            })
            .collect()
    }

    /// Isomorphism-invariant signature used to compare graphs up to relabeling.
    ///
    /// Each vertex contributes its genus and the sorted lengths of its incident
    /// edge ends; each edge contributes its length, loop flag and the sorted
    /// genera of its endpoints.
    pub fn canonical_signature(&self) -> (Vec<(u32, Vec<Rational>)>, Vec<(Rational, bool, u32, u32)>) {
        let mut vsig: Vec<(u32, Vec<Rational>)> = (0..self.vertices.len())
            .map(|p| {
                let mut ends: Vec<Rational> = Vec::new();
                for e in &self.edges {
                    if e.u == p {
                        ends.push(e.length.clone());
                    }
                    if e.v == p {
                        ends.push(e.length.clone());
                    }
                }
                ends.sort();
                (self.vertices[p].genus, ends)
            })
            .collect();
        vsig.sort();
        let mut esig: Vec<(Rational, bool, u32, u32)> = self
            .edges
            .iter()
            .map(|e| {
                let (a, b) = (self.vertices[e.u].genus, self.vertices[e.v].genus);
                (e.length.clone(), e.is_loop(), a.min(b), a.max(b))
            })
            .collect();
        esig.sort();
        (vsig, esig)
    }

    pub fn to_raw(&self) -> RawGraph {
        RawGraph {
            vertices: self
                .vertices
                .iter()
                .map(|v| RawVertex {
                    id: v.id.clone(),
                    genus: v.genus as i64,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| RawEdge {
                    id: e.id.clone(),
                    u: self.vertices[e.u].id.clone(),
                    v: self.vertices[e.v].id.clone(),
                    length: e.length.clone(),
                })
                .collect(),
        }
    }
}

fn fresh_id(base: &str, taken: impl Fn(&str) -> bool) -> String {
    if !taken(base) {
        return base.to_string();
    }
    (1..)
        .map(|k| format!("{base}#{k}"))
        .find(|c| !taken(c))
        .expect("unbounded search")
}

/// Small named shapes that recur throughout the invariant computations.
pub mod shapes {
    use super::*;

    fn build(vertices: &[(&str, u32)], edges: &[(&str, &str, &str, Rational)]) -> Result<PmGraph, GraphError> {
        PmGraph::new(
            vertices.iter().map(|(id, q)| (id.to_string(), *q as i64)),
            edges
                .iter()
                .map(|(id, u, v, l)| (id.to_string(), u.to_string(), v.to_string(), l.clone())),
        )
    }

    /// A single vertex of genus `q`, no edges.
    pub fn point(q: u32) -> Result<PmGraph, GraphError> {
        build(&[("v0", q)], &[])
    }

    /// One vertex of genus `q` carrying a loop of the given length.
    pub fn loop_graph(q: u32, length: Rational) -> Result<PmGraph, GraphError> {
        build(&[("v0", q)], &[("e0", "v0", "v0", length)])
    }

    /// Two vertices of genera `q0`, `q1` joined by one edge.
    pub fn segment(q0: u32, q1: u32, length: Rational) -> Result<PmGraph, GraphError> {
        build(&[("v0", q0), ("v1", q1)], &[("e0", "v0", "v1", length)])
    }

    /// Two vertices of genera `q0`, `q1` joined by two edges of lengths `m1`, `m2`.
    pub fn two_gon(q0: u32, q1: u32, m1: Rational, m2: Rational) -> Result<PmGraph, GraphError> {
        build(
            &[("v0", q0), ("v1", q1)],
            &[("e0", "v0", "v1", m1), ("e1", "v0", "v1", m2)],
        )
    }

    /// A cycle through vertices of the given genera with the given lengths;
    /// edge `i` joins vertex `i` to vertex `i+1` (cyclically).
    pub fn circle(genera: &[u32], lengths: &[Rational]) -> Result<PmGraph, GraphError> {
        assert_eq!(genera.len(), lengths.len());
        let n = genera.len();
        if n == 1 {
            return loop_graph(genera[0], lengths[0].clone());
        }
        PmGraph::new(
            genera.iter().enumerate().map(|(i, q)| (format!("v{i}"), *q as i64)),
            lengths.iter().enumerate().map(|(i, l)| {
                (format!("e{i}"), format!("v{i}"), format!("v{}", (i + 1) % n), l.clone())
            }),
        )
    }

    /// A genus-`q_center` hub joined by one edge to each leaf.
    pub fn star(q_center: u32, leaves: &[(u32, Rational)]) -> Result<PmGraph, GraphError> {
        PmGraph::new(
            std::iter::once(("c".to_string(), q_center as i64)).chain(
                leaves
                    .iter()
                    .enumerate()
                    .map(|(i, (q, _))| (format!("l{i}"), *q as i64)),
            ),
            leaves
                .iter()
                .enumerate()
                .map(|(i, (_, l))| (format!("e{i}"), "c".to_string(), format!("l{i}"), l.clone())),
        )
    }
}
