//! Biconnected components (blocks) of a multigraph, as sets of edge indices.
//!
//! Loops form blocks of their own; parallel edges land in the same block.

use std::collections::BTreeSet;

use super::PmGraph;

struct Tarjan {
    adjacency: Vec<Vec<(usize, usize)>>,
    disc: Vec<Option<usize>>,
    low: Vec<usize>,
    time: usize,
    stack: Vec<usize>,
    blocks: Vec<BTreeSet<usize>>,
}

impl Tarjan {
    fn visit(&mut self, p: usize, via_edge: Option<usize>) {
        self.disc[p] = Some(self.time);
        self.low[p] = self.time;
        self.time += 1;
        let neighbours = self.adjacency[p].clone();
        for (edge, q) in neighbours {
            if Some(edge) == via_edge {
                continue;
            }
            match self.disc[q] {
                None => {
                    self.stack.push(edge);
                    self.visit(q, Some(edge));
                    self.low[p] = self.low[p].min(self.low[q]);
                    if self.low[q] >= self.disc[p].unwrap() {
                        let mut block = BTreeSet::new();
                        while let Some(top) = self.stack.pop() {
                            block.insert(top);
                            if top == edge {
                                break;
                            }
                        }
                        self.blocks.push(block);
                    }
                }
                Some(dq) if dq < self.disc[p].unwrap() => {
                    self.stack.push(edge);
                    self.low[p] = self.low[p].min(dq);
                }
                Some(_) => {}
            }
        }
    }
}

pub(super) fn edge_blocks(graph: &PmGraph) -> Vec<BTreeSet<usize>> {
    let n = graph.vertices().len();
    let mut adjacency = vec![Vec::new(); n];
    let mut blocks = Vec::new();
    for (i, e) in graph.edges().iter().enumerate() {
        if e.is_loop() {
            blocks.push(BTreeSet::from([i]));
        } else {
            adjacency[e.u].push((i, e.v));
            adjacency[e.v].push((i, e.u));
        }
    }
    let mut tarjan = Tarjan {
        adjacency,
        disc: vec![None; n],
        low: vec![0; n],
        time: 0,
        stack: Vec::new(),
        blocks: Vec::new(),
    };
    tarjan.visit(0, None);
    debug_assert!(tarjan.disc.iter().all(Option::is_some));
    blocks.extend(tarjan.blocks);
    blocks.sort_by_key(|b| *b.iter().next().expect("blocks are non-empty"));
    blocks
}
