//! Incremental edge insertion with label maintenance.

use std::collections::VecDeque;
use std::str::FromStr;

use thiserror::Error;

use crate::chains::{ChainCode, CodeMode};
use crate::dag::{CycleError, Dag, NodeId};
use crate::index::Index;
use crate::labels::{build_topo_labels, join_into, Side};
use crate::tgraph::{EdgeError, TemporalEdge};
use crate::transform::Kind;

/// How topological labels are handled after an insert.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TopoMode {
    /// Mark them stale; queries stop using them until refreshed.
    #[default]
    Plain,
    /// Recompute them.
    Plus,
}

impl FromStr for TopoMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plain" => Ok(TopoMode::Plain),
            "plus" => Ok(TopoMode::Plus),
            other => Err(format!("unknown update mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct UpdateStats {
    pub vertices_created: usize,
    pub claims_rewired: usize,
    pub out_labels_touched: usize,
    pub in_labels_touched: usize,
    pub topo_refreshed: bool,
}

impl UpdateStats {
    fn absorb(&mut self, other: UpdateStats) {
        self.vertices_created += other.vertices_created;
        self.claims_rewired += other.claims_rewired;
        self.out_labels_touched += other.out_labels_touched;
        self.in_labels_touched += other.in_labels_touched;
        self.topo_refreshed |= other.topo_refreshed;
    }
}

#[derive(Debug, Error)]
pub enum UpdateError {
    #[error(transparent)]
    Edge(#[from] EdgeError),
    #[error("incremental insertion needs a temporal cover with timestamp codes")]
    Unsupported,
    #[error(transparent)]
    Cycle(#[from] CycleError),
}

impl Index {
    /// Inserts one temporal edge.
    pub fn insert_edge(&mut self, e: TemporalEdge, mode: TopoMode) -> Result<UpdateStats, UpdateError> {
        let mut stats = self.insert_edge_inner(e)?;
        match mode {
            TopoMode::Plain => self.topo_fresh = false,
            TopoMode::Plus => {
                self.refresh_topo()?;
                stats.topo_refreshed = true;
            }
        }
        Ok(stats)
    }

    /// Inserts edges in order; in `Plus` mode the topological labels are
    /// recomputed once at the end.
    pub fn insert_batch(&mut self, edges: &[TemporalEdge], mode: TopoMode) -> Result<UpdateStats, UpdateError> {
        let mut total = UpdateStats::default();
        for &e in edges {
            total.absorb(self.insert_edge_inner(e)?);
            self.topo_fresh = false;
        }
        if mode == TopoMode::Plus && !self.topo_fresh {
            self.refresh_topo()?;
            total.topo_refreshed = true;
        }
        Ok(total)
    }

    pub fn refresh_topo(&mut self) -> Result<(), CycleError> {
        self.topo = build_topo_labels(&self.graph)?;
        self.topo_fresh = true;
        Ok(())
    }

    fn insert_edge_inner(&mut self, e: TemporalEdge) -> Result<UpdateStats, UpdateError> {
        let e = TemporalEdge::new(e.u, e.v, e.t, e.lambda)?;
        if !self.cover.is_temporal() || self.config.codes != CodeMode::Timestamp {
            return Err(UpdateError::Unsupported);
        }
        self.expand_labels()?;
        let mut stats = UpdateStats::default();

        let (u, created_u) = self.graph.ensure_copy(e.u, e.t, Kind::Out);
        if created_u {
            self.place_copy(u);
        }
        let (v, created_v) = self.graph.ensure_copy(e.v, e.arrival(), Kind::In);
        if created_v {
            self.place_copy(v);
        }
        stats.vertices_created = usize::from(created_u) + usize::from(created_v);

        stats.claims_rewired = self.graph.rewire_claims(e.u);
        if e.v != e.u {
            stats.claims_rewired += self.graph.rewire_claims(e.v);
        }
        // A new copy reaches exactly what its neighbours reach, so its labels
        // follow from theirs; no older label changes until the edge is added.
        for (w, created) in [(u, created_u), (v, created_v)] {
            if created {
                self.init_labels(w);
            }
        }

        if self.graph.add_edge(u, v) {
            stats.out_labels_touched = self.propagate(u, v, Side::Out);
            stats.in_labels_touched = self.propagate(v, u, Side::In);
        }
        Ok(stats)
    }

    /// Registers a fresh copy with the cover, the labels and the topo table.
    fn place_copy(&mut self, w: NodeId) {
        let c = self.cover.insert_temporal(&self.graph, w);
        let code = ChainCode::new(self.cover.rank(c), self.graph.time(w));
        let id = self.labels.push_vertex(code);
        debug_assert_eq!(id, w);
        for table in [&mut self.topo.level, &mut self.topo.sigma1, &mut self.topo.sigma2] {
            table.resize(self.graph.num_vertices(), 0);
        }
    }

    fn init_labels(&mut self, w: NodeId) {
        let k = self.config.k;
        let (mut acc, mut tmp) = (Vec::with_capacity(k), Vec::with_capacity(k));
        acc.push(self.labels.code(w));
        for &c in self.graph.successors(w) {
            join_into(&acc, self.labels.l_out(c), k, Side::Out, &mut tmp);
            std::mem::swap(&mut acc, &mut tmp);
        }
        self.labels.set_out(w, &acc);
        acc.clear();
        acc.push(self.labels.code(w));
        for &p in self.graph.predecessors(w) {
            join_into(&acc, self.labels.l_in(p), k, Side::In, &mut tmp);
            std::mem::swap(&mut acc, &mut tmp);
        }
        self.labels.set_in(w, &acc);
    }

    /// Merges the label of `from` into `start` and pushes changes onwards:
    /// out-labels travel to predecessors, in-labels to successors. A vertex
    /// whose label does not change ends its branch. Returns the number of
    /// labels changed.
    fn propagate(&mut self, start: NodeId, from: NodeId, side: Side) -> usize {
        let k = self.config.k;
        let mut tmp = Vec::with_capacity(k);
        let mut queue = VecDeque::new();
        let mut touched = 0;
        let src: Vec<ChainCode> = self.side_label(from, side).to_vec();
        if self.merge_into(start, &src, side, k, &mut tmp) {
            touched += 1;
            queue.push_back(start);
        }
        let mut current = Vec::with_capacity(k);
        while let Some(w) = queue.pop_front() {
            current.clear();
            current.extend_from_slice(self.side_label(w, side));
            let next: Vec<NodeId> = match side {
                Side::Out => self.graph.predecessors(w).to_vec(),
                Side::In => self.graph.successors(w).to_vec(),
            };
            for x in next {
                if self.merge_into(x, &current, side, k, &mut tmp) {
                    touched += 1;
                    queue.push_back(x);
                }
            }
        }
        touched
    }

    fn side_label(&self, w: NodeId, side: Side) -> &[ChainCode] {
        match side {
            Side::Out => self.labels.l_out(w),
            Side::In => self.labels.l_in(w),
        }
    }

    fn merge_into(&mut self, w: NodeId, src: &[ChainCode], side: Side, k: usize, tmp: &mut Vec<ChainCode>) -> bool {
        join_into(self.side_label(w, side), src, k, side, tmp);
        if tmp.as_slice() == self.side_label(w, side) {
            return false;
        }
        match side {
            Side::Out => self.labels.set_out(w, tmp),
            Side::In => self.labels.set_in(w, tmp),
        }
        true
    }
}
