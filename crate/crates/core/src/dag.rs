//! Adjacency access shared by the transformed graph and plain digraphs, plus
//! the topological sort used as the acyclicity check.

use std::collections::VecDeque;

use thiserror::Error;

use crate::rows::Rows;

/// Dense id of a vertex in a DAG.
pub type NodeId = u32;

pub trait Dag {
    fn num_nodes(&self) -> usize;
    fn successors(&self, v: NodeId) -> &[NodeId];
    fn predecessors(&self, v: NodeId) -> &[NodeId];

    fn num_arcs(&self) -> usize {
        (0..self.num_nodes() as NodeId)
            .map(|v| self.successors(v).len())
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("graph has a cycle through {}", fmt_cycle(.cycle))]
pub struct CycleError {
    /// One directed cycle, listed in edge order; the first vertex closes it.
    pub cycle: Vec<NodeId>,
}

fn fmt_cycle(c: &[NodeId]) -> String {
    let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
    parts.join(" -> ")
}

/// The identity order when every arc points to a larger id; otherwise
/// Kahn's algorithm with sources released in ascending id order.
pub fn topological_order<G: Dag + ?Sized>(g: &G) -> Result<Vec<NodeId>, CycleError> {
    let n = g.num_nodes();
    if (0..n as NodeId).all(|v| g.successors(v).iter().all(|&w| w > v)) {
        return Ok((0..n as NodeId).collect());
    }
    let mut indeg: Vec<u32> = (0..n as NodeId)
        .map(|v| g.predecessors(v).len() as u32)
        .collect();
    let mut queue: VecDeque<NodeId> = (0..n as NodeId).filter(|&v| indeg[v as usize] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in g.successors(v) {
            let d = &mut indeg[w as usize];
            *d -= 1;
            if *d == 0 {
                queue.push_back(w);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // Every leftover vertex keeps a leftover predecessor; walking backwards
    // must revisit one.
    let start = (0..n).find(|&v| indeg[v] > 0).unwrap() as NodeId;
    let mut seen = vec![usize::MAX; n];
    let mut walk = Vec::new();
    let mut cur = start;
    while seen[cur as usize] == usize::MAX {
        seen[cur as usize] = walk.len();
        walk.push(cur);
        cur = *g
            .predecessors(cur)
            .iter()
            .find(|&&p| indeg[p as usize] > 0)
            .expect("leftover vertex without leftover predecessor");
    }
    let mut cycle = walk[seen[cur as usize]..].to_vec();
    cycle.reverse();
    Err(CycleError { cycle })
}

/// A plain directed graph in two-way row storage.
#[derive(Debug, Clone, Default)]
pub struct Digraph {
    out: Rows<NodeId>,
    inn: Rows<NodeId>,
}

impl Digraph {
    pub fn from_edges(num_nodes: usize, edges: &[(NodeId, NodeId)]) -> Self {
        let rev: Vec<(NodeId, NodeId)> = edges.iter().map(|&(a, b)| (b, a)).collect();
        Self {
            out: Rows::from_pairs(num_nodes, edges),
            inn: Rows::from_pairs(num_nodes, &rev),
        }
    }
}

impl Dag for Digraph {
    fn num_nodes(&self) -> usize {
        self.out.num_rows()
    }

    fn successors(&self, v: NodeId) -> &[NodeId] {
        self.out.row(v as usize)
    }

    fn predecessors(&self, v: NodeId) -> &[NodeId] {
        self.inn.row(v as usize)
    }
}
