//! Top-k chain labels, label reduction and topological pruning labels.
//!
//! `L_out(v)` holds, for the `k` best-ranked chains `v` can reach, the code
//! of the first vertex of that chain `v` reaches; `L_in(v)` holds the code of
//! the last vertex of each of the `k` best-ranked chains reaching `v`. Sets
//! are sorted by ascending chain rank with at most one code per chain.

use crate::chains::ChainCode;
use crate::dag::{topological_order, CycleError, Dag, NodeId};
use crate::rows::Rows;
use crate::transform::TransformedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Out,
    In,
}

/// Joins two label sets: ascending by chain rank, one code per chain (the
/// smaller `y` for out-labels, the larger for in-labels), at most `k` codes.
pub fn join_into(a: &[ChainCode], b: &[ChainCode], k: usize, side: Side, out: &mut Vec<ChainCode>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while out.len() < k && (i < a.len() || j < b.len()) {
        let code = match (a.get(i), b.get(j)) {
            (Some(&p), Some(&q)) if p.x == q.x => {
                i += 1;
                j += 1;
                let y = match side {
                    Side::Out => p.y.min(q.y),
                    Side::In => p.y.max(q.y),
                };
                ChainCode::new(p.x, y)
            }
            (Some(&p), Some(&q)) if p.x < q.x => {
                i += 1;
                p
            }
            (Some(&p), None) => {
                i += 1;
                p
            }
            (_, Some(&q)) => {
                j += 1;
                q
            }
            (None, None) => unreachable!(),
        };
        out.push(code);
    }
}

/// k-way top-k merge of sorted label sets.
pub fn merge_topk(sets: &[&[ChainCode]], k: usize, side: Side) -> Vec<ChainCode> {
    let mut acc = Vec::new();
    let mut tmp = Vec::new();
    for set in sets {
        join_into(&acc, set, k, side, &mut tmp);
        std::mem::swap(&mut acc, &mut tmp);
    }
    acc
}

const OWNED: u32 = u32::MAX;
const SINGLETON: u32 = u32::MAX - 1;

/// Where a vertex's label set lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelSource {
    /// Stored with the vertex.
    Owned,
    /// Borrowed from a partner copy of the same original vertex.
    Partner(NodeId),
    /// Just the vertex's own code.
    Singleton,
}

fn encode(src: LabelSource) -> u32 {
    match src {
        LabelSource::Owned => OWNED,
        LabelSource::Singleton => SINGLETON,
        LabelSource::Partner(p) => p,
    }
}

fn decode(raw: u32) -> LabelSource {
    match raw {
        OWNED => LabelSource::Owned,
        SINGLETON => LabelSource::Singleton,
        p => LabelSource::Partner(p),
    }
}

#[derive(Debug, Clone)]
pub struct IndexLabels {
    k: usize,
    own: Vec<ChainCode>,
    out: Rows<ChainCode>,
    inn: Rows<ChainCode>,
    out_src: Vec<u32>,
    in_src: Vec<u32>,
}

impl IndexLabels {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_vertices(&self) -> usize {
        self.own.len()
    }

    #[inline]
    pub fn code(&self, v: NodeId) -> ChainCode {
        self.own[v as usize]
    }

    pub fn codes(&self) -> &[ChainCode] {
        &self.own
    }

    #[inline]
    pub fn l_out(&self, v: NodeId) -> &[ChainCode] {
        match self.out_src[v as usize] {
            OWNED => self.out.row(v as usize),
            SINGLETON => std::slice::from_ref(&self.own[v as usize]),
            p => self.out.row(p as usize),
        }
    }

    #[inline]
    pub fn l_in(&self, v: NodeId) -> &[ChainCode] {
        match self.in_src[v as usize] {
            OWNED => self.inn.row(v as usize),
            SINGLETON => std::slice::from_ref(&self.own[v as usize]),
            p => self.inn.row(p as usize),
        }
    }

    pub fn out_source(&self, v: NodeId) -> LabelSource {
        decode(self.out_src[v as usize])
    }

    pub fn in_source(&self, v: NodeId) -> LabelSource {
        decode(self.in_src[v as usize])
    }

    pub fn is_reduced(&self) -> bool {
        self.out_src.iter().chain(&self.in_src).any(|&s| s != OWNED)
    }

    /// Number of codes stored with vertex `v`.
    pub fn owned_len(&self, v: NodeId) -> usize {
        let mut n = 0;
        if self.out_src[v as usize] == OWNED {
            n += self.out.row(v as usize).len();
        }
        if self.in_src[v as usize] == OWNED {
            n += self.inn.row(v as usize).len();
        }
        n
    }

    /// Total number of stored codes.
    pub fn total_owned(&self) -> usize {
        (0..self.own.len() as NodeId).map(|v| self.owned_len(v)).sum()
    }

    pub fn heap_bytes(&self) -> usize {
        let code = std::mem::size_of::<ChainCode>();
        (self.out.buffer_len() + self.inn.buffer_len() + self.own.len()) * code + self.own.len() * 4 * 8
    }

    /// Assembles labels from stored parts, e.g. when loading an index.
    pub fn from_parts(
        k: usize,
        own: Vec<ChainCode>,
        out: Vec<(LabelSource, Vec<ChainCode>)>,
        inn: Vec<(LabelSource, Vec<ChainCode>)>,
    ) -> Self {
        let n = own.len();
        let mut labels = Self {
            k,
            own,
            out: Rows::from_pairs(n, &[]),
            inn: Rows::from_pairs(n, &[]),
            out_src: out.iter().map(|(s, _)| encode(*s)).collect(),
            in_src: inn.iter().map(|(s, _)| encode(*s)).collect(),
        };
        for (v, (_, set)) in out.iter().enumerate() {
            labels.out.set(v, set);
        }
        for (v, (_, set)) in inn.iter().enumerate() {
            labels.inn.set(v, set);
        }
        labels.out.compact();
        labels.inn.compact();
        labels
    }

    pub(crate) fn set_out(&mut self, v: NodeId, set: &[ChainCode]) {
        debug_assert_eq!(self.out_src[v as usize], OWNED);
        self.out.set(v as usize, set);
    }

    pub(crate) fn set_in(&mut self, v: NodeId, set: &[ChainCode]) {
        debug_assert_eq!(self.in_src[v as usize], OWNED);
        self.inn.set(v as usize, set);
    }

    /// Registers a new vertex whose labels are its own code.
    pub(crate) fn push_vertex(&mut self, code: ChainCode) -> NodeId {
        let v = self.own.len();
        self.own.push(code);
        self.out.add_row();
        self.inn.add_row();
        self.out.set(v, &[code]);
        self.inn.set(v, &[code]);
        self.out_src.push(OWNED);
        self.in_src.push(OWNED);
        v as NodeId
    }

    /// Keeps only `L_out` for OUT copies and only `L_in` for IN copies; the
    /// other side resolves to the nearest partner copy of the same original
    /// vertex (IN at or before an OUT copy, OUT at or after an IN copy), or
    /// to the own code when there is no such partner.
    pub fn reduce(&mut self, g: &TransformedGraph) {
        for a in 0..g.num_originals() as u32 {
            let (ins, outs) = (g.v_in(a), g.v_out(a));
            // Walk both lists once: IN copies find the first OUT copy at or
            // after them, OUT copies the last IN copy at or before them.
            let mut j = 0;
            for &w in ins {
                while j < outs.len() && g.time(outs[j]) < g.time(w) {
                    j += 1;
                }
                self.out_src[w as usize] = outs.get(j).copied().unwrap_or(SINGLETON);
                self.out.clear_row(w as usize);
            }
            let mut i = 0;
            for &w in outs {
                while i < ins.len() && g.time(ins[i]) <= g.time(w) {
                    i += 1;
                }
                self.in_src[w as usize] = if i == 0 { SINGLETON } else { ins[i - 1] };
                self.inn.clear_row(w as usize);
            }
        }
        self.out.compact();
        self.inn.compact();
    }

    /// Recomputes the dropped sides of reduced labels from the owned ones.
    /// `order` must be a topological order of `g`.
    pub fn expand<G: Dag + ?Sized>(&mut self, g: &G, order: &[NodeId]) {
        let (mut acc, mut tmp) = (Vec::new(), Vec::new());
        for &v in order {
            if self.in_src[v as usize] == OWNED {
                continue;
            }
            acc.clear();
            acc.push(self.own[v as usize]);
            for &p in g.predecessors(v) {
                debug_assert_eq!(self.in_src[p as usize], OWNED);
                join_into(&acc, self.inn.row(p as usize), self.k, Side::In, &mut tmp);
                std::mem::swap(&mut acc, &mut tmp);
            }
            self.in_src[v as usize] = OWNED;
            self.inn.set(v as usize, &acc);
        }
        for &v in order.iter().rev() {
            if self.out_src[v as usize] == OWNED {
                continue;
            }
            acc.clear();
            acc.push(self.own[v as usize]);
            for &c in g.successors(v) {
                debug_assert_eq!(self.out_src[c as usize], OWNED);
                join_into(&acc, self.out.row(c as usize), self.k, Side::Out, &mut tmp);
                std::mem::swap(&mut acc, &mut tmp);
            }
            self.out_src[v as usize] = OWNED;
            self.out.set(v as usize, &acc);
        }
    }
}

/// Label construction: out-labels in reverse topological order, in-labels in
/// topological order, each the top-k join of the own code with the
/// neighbours' labels.
pub fn build_labels<G: Dag + ?Sized>(g: &G, codes: &[ChainCode], k: usize, order: &[NodeId]) -> IndexLabels {
    assert!((1..=u8::MAX as usize).contains(&k), "k must be in 1..=255");
    let n = g.num_nodes();
    debug_assert_eq!(codes.len(), n);
    let own = codes.to_vec();
    let (mut acc, mut tmp) = (Vec::with_capacity(k), Vec::with_capacity(k));

    let mut out = Rows::with_capacity(n, n * 2);
    for &v in order.iter().rev() {
        acc.clear();
        acc.push(own[v as usize]);
        for &c in g.successors(v) {
            join_into(&acc, out.row(c as usize), k, Side::Out, &mut tmp);
            std::mem::swap(&mut acc, &mut tmp);
        }
        out.append_row(v as usize, &acc);
    }

    let mut inn = Rows::with_capacity(n, n * 2);
    for &v in order {
        acc.clear();
        acc.push(own[v as usize]);
        for &p in g.predecessors(v) {
            join_into(&acc, inn.row(p as usize), k, Side::In, &mut tmp);
            std::mem::swap(&mut acc, &mut tmp);
        }
        inn.append_row(v as usize, &acc);
    }

    IndexLabels {
        k,
        own,
        out,
        inn,
        out_src: vec![OWNED; n],
        in_src: vec![OWNED; n],
    }
}

/// Topological level and two DFS-based topological positions per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopoLabels {
    pub level: Vec<u32>,
    pub sigma1: Vec<u32>,
    pub sigma2: Vec<u32>,
}

impl TopoLabels {
    /// True when the labels prove `u` cannot reach `v`.
    #[inline]
    pub fn excludes(&self, u: NodeId, v: NodeId) -> bool {
        let (u, v) = (u as usize, v as usize);
        (u != v && self.level[u] >= self.level[v]) || self.sigma1[u] > self.sigma1[v] || self.sigma2[u] > self.sigma2[v]
    }
}

/// Positions (1-based) in the reverse DFS postorder; roots are taken in
/// ascending id order and children in stored order, or reversed.
fn dfs_positions<G: Dag + ?Sized>(g: &G, reverse_children: bool) -> Vec<u32> {
    let n = g.num_nodes();
    let mut visited = vec![0u64; n.div_ceil(64)];
    let mut mark = |v: NodeId| {
        let (word, bit) = (v as usize / 64, 1u64 << (v % 64));
        let fresh = visited[word] & bit == 0;
        visited[word] |= bit;
        fresh
    };
    let mut pos = vec![0u32; n];
    let mut finished = 0usize;
    let mut stack: Vec<(NodeId, &[NodeId])> = Vec::new();
    for root in 0..n as NodeId {
        if !mark(root) {
            continue;
        }
        stack.push((root, g.successors(root)));
        while let Some(top) = stack.last_mut() {
            let next = if reverse_children { top.1.split_last() } else { top.1.split_first() };
            match next {
                Some((&w, rest)) => {
                    top.1 = rest;
                    if mark(w) {
                        let succ = g.successors(w);
                        // Touch the grandchildren's rows so their cache misses overlap.
                        for &c in succ {
                            std::hint::black_box(g.successors(c).first());
                        }
                        stack.push((w, succ));
                    }
                }
                None => {
                    let v = top.0;
                    stack.pop();
                    finished += 1;
                    pos[v as usize] = (n - finished + 1) as u32;
                }
            }
        }
    }
    pos
}

pub fn build_topo_labels<G: Dag + ?Sized>(g: &G) -> Result<TopoLabels, CycleError> {
    let order = topological_order(g)?;
    let mut level = vec![1u32; g.num_nodes()];
    for &v in &order {
        let l = level[v as usize];
        for &w in g.successors(v) {
            level[w as usize] = level[w as usize].max(l + 1);
        }
    }
    Ok(TopoLabels {
        level,
        sigma1: dfs_positions(g, false),
        sigma2: dfs_positions(g, true),
    })
}
