//! Two-phase transformation of a temporal graph into a DAG of time-stamped
//! vertex copies.
//!
//! Every original vertex `v` gets one IN copy `⟨v,t⟩` per distinct arrival
//! time and one OUT copy per distinct departure time. Copies of the same kind
//! are chained by ascending time, each IN copy is linked to an OUT copy by
//! the descending claim procedure, and every temporal edge `(u, v, t, λ)`
//! becomes the cross edge `⟨u,t⟩ → ⟨v,t+λ⟩`.
//!
//! DAG ids are dense. A fresh build numbers copies by time, IN before OUT on
//! equal times, so id order is a topological order; copies added later by
//! incremental insertion are appended.

use crate::dag::{topological_order, CycleError, Dag, NodeId};
use crate::rows::Rows;
use crate::tgraph::{TemporalGraph, Time, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    In,
    Out,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::In => "in",
            Kind::Out => "out",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DagVertex {
    pub original: VertexId,
    pub time: Time,
    pub kind: Kind,
}

#[derive(Debug, Clone, Default)]
pub struct TransformedGraph {
    vertices: Vec<DagVertex>,
    out: Rows<NodeId>,
    inn: Rows<NodeId>,
    v_in: Vec<Vec<NodeId>>,
    v_out: Vec<Vec<NodeId>>,
    num_edges: usize,
}

/// Step 2(b) claiming on sorted, distinct time lists. Returns
/// `(in_index, out_index)` pairs: each IN time, scanned in descending order,
/// links to the earliest OUT time not before it unless an IN copy scanned
/// earlier already holds that OUT copy.
pub fn claim_edges(in_times: &[Time], out_times: &[Time]) -> Vec<(usize, usize)> {
    let mut claims = Vec::new();
    let mut last_claimed = None;
    for (i, &t) in in_times.iter().enumerate().rev() {
        let j = out_times.partition_point(|&o| o < t);
        if j < out_times.len() && last_claimed != Some(j) {
            claims.push((i, j));
            last_claimed = Some(j);
        }
    }
    claims
}

pub fn transform(g: &TemporalGraph) -> TransformedGraph {
    let n = g.num_vertices();
    let m = g.num_edges();
    // One entry per edge endpoint; sorting them by copy key in time-major
    // order numbers the copies and tells each edge which copies it joins.
    let mut ends: Vec<(Time, Kind, VertexId, u32)> = Vec::with_capacity(2 * m);
    for (i, e) in g.edges().iter().enumerate() {
        ends.push((e.t, Kind::Out, e.u, i as u32));
        ends.push((e.arrival(), Kind::In, e.v, i as u32));
    }
    ends.sort_unstable();

    let mut vertices: Vec<DagVertex> = Vec::with_capacity(ends.len());
    let mut cross = vec![(0, 0); m];
    for (j, &(time, kind, original, i)) in ends.iter().enumerate() {
        let fresh = j == 0 || {
            let (pt, pk, po, _) = ends[j - 1];
            (pt, pk, po) != (time, kind, original)
        };
        if fresh {
            vertices.push(DagVertex { original, time, kind });
        }
        let id = (vertices.len() - 1) as NodeId;
        match kind {
            Kind::Out => cross[i as usize].0 = id,
            Kind::In => cross[i as usize].1 = id,
        }
    }
    drop(ends);

    let (mut n_in, mut n_out) = (vec![0usize; n], vec![0usize; n]);
    for d in &vertices {
        match d.kind {
            Kind::In => n_in[d.original as usize] += 1,
            Kind::Out => n_out[d.original as usize] += 1,
        }
    }
    let mut v_in: Vec<Vec<NodeId>> = n_in.iter().map(|&c| Vec::with_capacity(c)).collect();
    let mut v_out: Vec<Vec<NodeId>> = n_out.iter().map(|&c| Vec::with_capacity(c)).collect();
    for (id, d) in vertices.iter().enumerate() {
        match d.kind {
            Kind::In => v_in[d.original as usize].push(id as NodeId),
            Kind::Out => v_out[d.original as usize].push(id as NodeId),
        }
    }

    let mut edges: Vec<(NodeId, NodeId)> = Vec::with_capacity(2 * vertices.len() + m);
    let (mut t_in, mut t_out) = (Vec::new(), Vec::new());
    for v in 0..n {
        for list in [&v_in[v], &v_out[v]] {
            edges.extend(list.windows(2).map(|w| (w[0], w[1])));
        }
        t_in.clear();
        t_in.extend(v_in[v].iter().map(|&id| vertices[id as usize].time));
        t_out.clear();
        t_out.extend(v_out[v].iter().map(|&id| vertices[id as usize].time));
        for (i, j) in claim_edges(&t_in, &t_out) {
            edges.push((v_in[v][i], v_out[v][j]));
        }
    }
    edges.extend(cross);
    // Rows end up sorted by neighbour id, which is also time order.
    edges.sort_unstable();
    edges.dedup();

    let rev: Vec<(NodeId, NodeId)> = edges.iter().map(|&(a, b)| (b, a)).collect();
    TransformedGraph {
        out: Rows::from_pairs(vertices.len(), &edges),
        inn: Rows::from_pairs(vertices.len(), &rev),
        num_edges: edges.len(),
        vertices,
        v_in,
        v_out,
    }
}

impl Dag for TransformedGraph {
    fn num_nodes(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    fn successors(&self, v: NodeId) -> &[NodeId] {
        self.out.row(v as usize)
    }

    #[inline]
    fn predecessors(&self, v: NodeId) -> &[NodeId] {
        self.inn.row(v as usize)
    }

    fn num_arcs(&self) -> usize {
        self.num_edges
    }
}

impl TransformedGraph {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    /// Number of original vertices the graph was built over.
    pub fn num_originals(&self) -> usize {
        self.v_in.len()
    }

    #[inline]
    pub fn vertex(&self, v: NodeId) -> DagVertex {
        self.vertices[v as usize]
    }

    #[inline]
    pub fn time(&self, v: NodeId) -> Time {
        self.vertices[v as usize].time
    }

    pub fn vertices(&self) -> &[DagVertex] {
        &self.vertices
    }

    /// V_in(v), ascending by time.
    pub fn v_in(&self, v: VertexId) -> &[NodeId] {
        &self.v_in[v as usize]
    }

    /// V_out(v), ascending by time.
    pub fn v_out(&self, v: VertexId) -> &[NodeId] {
        &self.v_out[v as usize]
    }

    /// V_in(v) and V_out(v) merged by ascending time, IN before OUT on ties.
    pub fn merged_copies(&self, v: VertexId) -> Vec<NodeId> {
        let (ins, outs) = (self.v_in(v), self.v_out(v));
        let mut all = Vec::with_capacity(ins.len() + outs.len());
        let (mut i, mut j) = (0, 0);
        while i < ins.len() || j < outs.len() {
            if j == outs.len() || (i < ins.len() && self.time(ins[i]) <= self.time(outs[j])) {
                all.push(ins[i]);
                i += 1;
            } else {
                all.push(outs[j]);
                j += 1;
            }
        }
        all
    }

    /// All edges in row order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.num_vertices() as NodeId)
            .flat_map(move |v| self.successors(v).iter().map(move |&w| (v, w)))
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.out.contains(a as usize, b)
    }

    /// The OUT copy of `a` with the smallest time `>= t_alpha`.
    pub fn locate_out(&self, a: VertexId, t_alpha: Time) -> Option<NodeId> {
        let list = self.v_out.get(a as usize)?;
        let i = list.partition_point(|&id| self.time(id) < t_alpha);
        list.get(i).copied()
    }

    /// The IN copy of `b` with the largest time `<= t_omega`.
    pub fn locate_in(&self, b: VertexId, t_omega: Time) -> Option<NodeId> {
        let list = self.v_in.get(b as usize)?;
        let i = list.partition_point(|&id| self.time(id) <= t_omega);
        i.checked_sub(1).map(|i| list[i])
    }

    /// IN copies of `b` with time in `[lo, hi]`, ascending.
    pub fn in_copies_between(&self, b: VertexId, lo: Time, hi: Time) -> &[NodeId] {
        copies_between(self, &self.v_in[b as usize], lo, hi)
    }

    /// OUT copies of `a` with time in `[lo, hi]`, ascending.
    pub fn out_copies_between(&self, a: VertexId, lo: Time, hi: Time) -> &[NodeId] {
        copies_between(self, &self.v_out[a as usize], lo, hi)
    }

    /// Checks acyclicity; returns one topological order.
    pub fn verify_dag(&self) -> Result<Vec<NodeId>, CycleError> {
        topological_order(self)
    }

    /// Approximate heap footprint in bytes.
    pub fn heap_bytes(&self) -> usize {
        self.vertices.len() * std::mem::size_of::<DagVertex>()
            + (self.out.buffer_len() + self.inn.buffer_len()) * 4
            + self.vertices.len() * 4 * 6
    }

    // ---- mutation, used by incremental insertion and index loading ----

    pub fn from_parts(
        num_originals: usize,
        vertices: Vec<DagVertex>,
        edges: &[(NodeId, NodeId)],
    ) -> Self {
        let mut v_in = vec![Vec::new(); num_originals];
        let mut v_out = vec![Vec::new(); num_originals];
        for (id, d) in vertices.iter().enumerate() {
            let list = match d.kind {
                Kind::In => &mut v_in[d.original as usize],
                Kind::Out => &mut v_out[d.original as usize],
            };
            list.push(id as NodeId);
        }
        for list in v_in.iter_mut().chain(v_out.iter_mut()) {
            list.sort_by_key(|&id| vertices[id as usize].time);
        }
        let rev: Vec<(NodeId, NodeId)> = edges.iter().map(|&(a, b)| (b, a)).collect();
        Self {
            out: Rows::from_pairs(vertices.len(), edges),
            inn: Rows::from_pairs(vertices.len(), &rev),
            num_edges: edges.len(),
            vertices,
            v_in,
            v_out,
        }
    }

    pub(crate) fn ensure_originals(&mut self, n: usize) {
        if n > self.v_in.len() {
            self.v_in.resize(n, Vec::new());
            self.v_out.resize(n, Vec::new());
        }
    }

    pub(crate) fn add_edge(&mut self, a: NodeId, b: NodeId) -> bool {
        if self.has_edge(a, b) {
            return false;
        }
        self.out.push(a as usize, b);
        self.inn.push(b as usize, a);
        self.num_edges += 1;
        true
    }

    pub(crate) fn remove_edge(&mut self, a: NodeId, b: NodeId) -> bool {
        if self.out.remove(a as usize, b) {
            self.inn.remove(b as usize, a);
            self.num_edges -= 1;
            true
        } else {
            false
        }
    }

    /// Finds the copy `⟨v,t⟩` of the given kind, creating it (with its
    /// same-kind chain edges) when absent. Returns `(id, created)`.
    pub(crate) fn ensure_copy(&mut self, v: VertexId, time: Time, kind: Kind) -> (NodeId, bool) {
        self.ensure_originals(v as usize + 1);
        let list = match kind {
            Kind::In => &self.v_in[v as usize],
            Kind::Out => &self.v_out[v as usize],
        };
        let pos = list.partition_point(|&id| self.vertices[id as usize].time < time);
        if let Some(&id) = list.get(pos) {
            if self.vertices[id as usize].time == time {
                return (id, false);
            }
        }
        let prev = pos.checked_sub(1).map(|p| list[p]);
        let next = list.get(pos).copied();

        let id = self.vertices.len() as NodeId;
        self.vertices.push(DagVertex {
            original: v,
            time,
            kind,
        });
        self.out.add_row();
        self.inn.add_row();
        let list = match kind {
            Kind::In => &mut self.v_in[v as usize],
            Kind::Out => &mut self.v_out[v as usize],
        };
        list.insert(pos, id);

        if let (Some(p), Some(n)) = (prev, next) {
            self.remove_edge(p, n);
        }
        if let Some(p) = prev {
            self.add_edge(p, id);
        }
        if let Some(n) = next {
            self.add_edge(id, n);
        }
        (id, true)
    }

    /// Re-runs the claim procedure for original `v` and rewires its IN→OUT
    /// edges to match. Returns the number of edges added plus removed.
    pub(crate) fn rewire_claims(&mut self, v: VertexId) -> usize {
        let ins = self.v_in[v as usize].clone();
        let outs = self.v_out[v as usize].clone();
        let in_t: Vec<Time> = ins.iter().map(|&id| self.time(id)).collect();
        let out_t: Vec<Time> = outs.iter().map(|&id| self.time(id)).collect();
        let mut want: Vec<(NodeId, NodeId)> = claim_edges(&in_t, &out_t)
            .into_iter()
            .map(|(i, j)| (ins[i], outs[j]))
            .collect();
        want.sort_unstable();

        let mut have: Vec<(NodeId, NodeId)> = Vec::new();
        for &i in &ins {
            for &w in self.successors(i) {
                let d = self.vertex(w);
                if d.kind == Kind::Out && d.original == v {
                    have.push((i, w));
                }
            }
        }
        have.sort_unstable();

        let mut changed = 0;
        for &(a, b) in &have {
            if want.binary_search(&(a, b)).is_err() {
                self.remove_edge(a, b);
                changed += 1;
            }
        }
        for &(a, b) in &want {
            if have.binary_search(&(a, b)).is_err() {
                self.add_edge(a, b);
                changed += 1;
            }
        }
        changed
    }
}

fn copies_between<'a>(g: &TransformedGraph, list: &'a [NodeId], lo: Time, hi: Time) -> &'a [NodeId] {
    let s = list.partition_point(|&id| g.time(id) < lo);
    let e = list.partition_point(|&id| g.time(id) <= hi);
    if s >= e {
        &[]
    } else {
        &list[s..e]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tgraph::example_graph;

    fn id_of(g: &TransformedGraph, v: VertexId, t: Time, kind: Kind) -> NodeId {
        let list = match kind {
            Kind::In => g.v_in(v),
            Kind::Out => g.v_out(v),
        };
        *list.iter().find(|&&id| g.time(id) == t).unwrap()
    }

    fn times(g: &TransformedGraph, list: &[NodeId]) -> Vec<Time> {
        list.iter().map(|&id| g.time(id)).collect()
    }

    #[test]
    fn example_vertex_sets() {
        let g = transform(&example_graph());
        assert_eq!(g.num_vertices(), 12);
        let (a, b, c, d) = (0, 1, 2, 3);
        assert_eq!(times(&g, g.v_out(a)), vec![1, 2, 4]);
        assert_eq!(times(&g, g.v_in(a)), vec![7]);
        assert_eq!(times(&g, g.v_in(b)), vec![2, 3]);
        assert_eq!(times(&g, g.v_out(b)), vec![4]);
        assert_eq!(times(&g, g.v_in(c)), vec![5]);
        assert_eq!(times(&g, g.v_out(c)), vec![5, 6]);
        assert_eq!(times(&g, g.v_in(d)), vec![5, 6]);
        assert!(g.v_out(d).is_empty());
    }

    #[test]
    fn example_edges() {
        use Kind::{In, Out};
        let g = transform(&example_graph());
        let e = |u: (VertexId, Time, Kind), v: (VertexId, Time, Kind)| {
            (id_of(&g, u.0, u.1, u.2), id_of(&g, v.0, v.1, v.2))
        };
        let mut expected = vec![
            e((0, 1, Out), (0, 2, Out)),
            e((0, 2, Out), (0, 4, Out)),
            e((1, 2, In), (1, 3, In)),
            e((1, 3, In), (1, 4, Out)),
            e((2, 5, In), (2, 5, Out)),
            e((2, 5, Out), (2, 6, Out)),
            e((3, 5, In), (3, 6, In)),
            e((0, 1, Out), (1, 2, In)),
            e((0, 2, Out), (1, 3, In)),
            e((0, 4, Out), (2, 5, In)),
            e((1, 4, Out), (3, 5, In)),
            e((2, 5, Out), (3, 6, In)),
            e((2, 6, Out), (0, 7, In)),
        ];
        expected.sort();
        let mut got: Vec<_> = g.edges().collect();
        got.sort();
        assert_eq!(got, expected);
        assert_eq!(g.num_edges(), 13);
    }

    #[test]
    fn ids_are_time_major() {
        let g = transform(&example_graph());
        let keys: Vec<(Time, Kind)> = g.vertices().iter().map(|d| (d.time, d.kind)).collect();
        assert!(keys.windows(2).all(|w| w[0] <= w[1]));
        assert!(g.edges().all(|(a, b)| a < b));
        assert_eq!(g.verify_dag().unwrap(), (0..12).collect::<Vec<NodeId>>());
    }

    #[test]
    fn claim_procedure() {
        assert_eq!(claim_edges(&[1, 3], &[2, 5]), vec![(1, 1), (0, 0)]);
        // b in the running example: IN {2,3}, OUT {4}; only ⟨b,3⟩ claims.
        assert_eq!(claim_edges(&[2, 3], &[4]), vec![(1, 0)]);
        assert_eq!(claim_edges(&[7], &[1, 2, 4]), vec![]);
        assert_eq!(claim_edges(&[5], &[5, 6]), vec![(0, 0)]);
    }

    #[test]
    fn isolated_vertex_has_no_copies() {
        let g = transform(&TemporalGraph::new(1));
        assert_eq!((g.num_vertices(), g.num_edges()), (0, 0));
        assert!(g.verify_dag().unwrap().is_empty());
    }

    #[test]
    fn example_is_acyclic_despite_temporal_cycle() {
        let g = transform(&example_graph());
        let order = g.verify_dag().unwrap();
        let mut pos = vec![0; order.len()];
        for (i, &v) in order.iter().enumerate() {
            pos[v as usize] = i;
        }
        for (a, b) in g.edges() {
            assert!(pos[a as usize] < pos[b as usize]);
        }
    }

    #[test]
    fn locate_entry_copies() {
        let g = transform(&example_graph());
        assert_eq!(g.locate_out(0, 2).map(|v| g.time(v)), Some(2));
        assert_eq!(g.locate_out(0, 5), None);
        assert_eq!(g.locate_out(3, 0), None);
        assert_eq!(g.locate_in(3, 5).map(|v| g.time(v)), Some(5));
        assert_eq!(g.locate_in(3, 3), None);
        assert_eq!(g.locate_in(3, 100).map(|v| g.time(v)), Some(6));
        assert_eq!(g.locate_in(9, 100), None);
    }

    #[test]
    fn ensure_copy_splices_chain() {
        let mut g = transform(&example_graph());
        let before = g.num_edges();
        let (id, created) = g.ensure_copy(0, 3, Kind::Out);
        assert!(created);
        let a2 = id_of(&g, 0, 2, Kind::Out);
        let a4 = id_of(&g, 0, 4, Kind::Out);
        assert!(g.has_edge(a2, id) && g.has_edge(id, a4) && !g.has_edge(a2, a4));
        assert_eq!(g.num_edges(), before + 1);
        assert_eq!(g.ensure_copy(0, 3, Kind::Out), (id, false));
        assert_eq!(g.rewire_claims(0), 0);
    }
}
