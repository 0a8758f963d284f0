//! Label-based reachability over the transformed graph and the temporal
//! queries built on it: reachability, earliest arrival and minimum duration
//! within a time interval.

use std::fmt;

use thiserror::Error;

use crate::chains::ChainCode;
use crate::dag::{Dag, NodeId};
use crate::index::Index;
use crate::tgraph::{Time, VertexId};
use crate::transform::Kind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TimeInterval {
    pub start: Time,
    /// `Time::MAX` stands for an unbounded end.
    pub end: Time,
}

impl TimeInterval {
    pub fn new(start: Time, end: Time) -> Result<Self, QueryError> {
        if start > end {
            return Err(QueryError::InvalidInterval { start, end });
        }
        Ok(Self { start, end })
    }

    pub fn unbounded(start: Time) -> Self {
        Self { start, end: Time::MAX }
    }

    /// `[0, ∞]`.
    pub fn all() -> Self {
        Self::unbounded(0)
    }

    pub fn is_unbounded(&self) -> bool {
        self.end == Time::MAX
    }

    pub fn contains(&self, t: Time) -> bool {
        self.start <= t && t <= self.end
    }
}

impl fmt::Display for TimeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unbounded() {
            write!(f, "[{}, inf]", self.start)
        } else {
            write!(f, "[{}, {}]", self.start, self.end)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("invalid interval [{start}, {end}]")]
    InvalidInterval { start: Time, end: Time },
}

/// A time or duration answer. `trivial` marks the empty path of a
/// self-query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathValue {
    pub value: Time,
    pub trivial: bool,
}

impl PathValue {
    fn path(value: Time) -> Self {
        Self { value, trivial: false }
    }

    fn empty(value: Time) -> Self {
        Self { value, trivial: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QueryKind {
    Reach,
    Earliest,
    Fastest,
}

impl QueryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            QueryKind::Reach => "reach",
            QueryKind::Earliest => "ea",
            QueryKind::Fastest => "fastest",
        }
    }
}

impl std::str::FromStr for QueryKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "reach" => Ok(QueryKind::Reach),
            "ea" | "earliest" => Ok(QueryKind::Earliest),
            "fastest" | "duration" => Ok(QueryKind::Fastest),
            other => Err(format!("unknown query type `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryAnswer {
    Reach(bool),
    Earliest(Option<PathValue>),
    Fastest(Option<PathValue>),
}

impl fmt::Display for QueryAnswer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryAnswer::Reach(r) => write!(f, "{}", u8::from(*r)),
            QueryAnswer::Earliest(v) | QueryAnswer::Fastest(v) => match v {
                Some(p) => write!(f, "{}", p.value),
                None => f.write_str("-"),
            },
        }
    }
}

/// `L_out(u) ⊕ L_in(v)`: some chain appears in both with the out-code not
/// after the in-code, which proves `u → v`.
pub fn oplus(l_out_u: &[ChainCode], l_in_v: &[ChainCode]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < l_out_u.len() && j < l_in_v.len() {
        let (r, s) = (l_out_u[i], l_in_v[j]);
        if r.x == s.x {
            if r.y <= s.y {
                return true;
            }
            i += 1;
            j += 1;
        } else if r.x < s.x {
            i += 1;
        } else {
            j += 1;
        }
    }
    false
}

/// Shared body of the two `≫` checks. `later` tells whether a code of `a`
/// lies strictly beyond the code of `b` on the same chain.
fn dominates(a: &[ChainCode], b: &[ChainCode], later: impl Fn(u64, u64) -> bool) -> bool {
    let Some(max_a) = a.last().map(|c| c.x) else {
        return false;
    };
    let mut i = 0;
    for r in b {
        while i < a.len() && a[i].x < r.x {
            i += 1;
        }
        match a.get(i) {
            Some(w) if w.x == r.x => {
                if later(w.y, r.y) {
                    return true;
                }
            }
            _ => {
                if max_a > r.x {
                    return true;
                }
            }
        }
    }
    false
}

/// `L_out(u) ≫ L_out(v)`, which proves `u ↛ v`.
pub fn gg_out(l_out_u: &[ChainCode], l_out_v: &[ChainCode]) -> bool {
    dominates(l_out_u, l_out_v, |wy, ry| wy > ry)
}

/// `L_in(v) ≫ L_in(u)`, which proves `u ↛ v`.
pub fn gg_in(l_in_v: &[ChainCode], l_in_u: &[ChainCode]) -> bool {
    dominates(l_in_v, l_in_u, |wy, ry| wy < ry)
}

enum Verdict {
    Reachable,
    Unreachable,
    Expand,
}

/// Query executor over a shared index; owns the per-query scratch.
pub struct Querier<'a> {
    index: &'a Index,
    visited: Vec<u32>,
    epoch: u32,
    stack: Vec<NodeId>,
    topo: bool,
    expanded: u64,
}

impl<'a> Querier<'a> {
    pub fn new(index: &'a Index) -> Self {
        Self {
            index,
            visited: vec![0; index.graph().num_vertices()],
            epoch: 0,
            stack: Vec::new(),
            topo: index.topo_pruning(),
            expanded: 0,
        }
    }

    pub fn index(&self) -> &'a Index {
        self.index
    }

    /// Number of vertices expanded by searches so far.
    pub fn expanded(&self) -> u64 {
        self.expanded
    }

    fn check(&self, w: NodeId, v: NodeId) -> Verdict {
        if w == v {
            return Verdict::Reachable;
        }
        let index = self.index;
        let labels = index.labels();
        let (cw, cv) = (labels.code(w), labels.code(v));
        if cw.x == cv.x {
            if !index.cover().is_temporal() {
                return if cw.y <= cv.y { Verdict::Reachable } else { Verdict::Unreachable };
            }
            let g = index.graph();
            let (dw, dv) = (g.vertex(w), g.vertex(v));
            if (dw.time, dw.kind) > (dv.time, dv.kind) {
                return Verdict::Unreachable;
            }
            // Only an OUT copy may fail to reach a later IN copy of its own
            // vertex; that needs a round trip through other vertices.
            if dw.kind == Kind::Out && dv.kind == Kind::In {
                if self.topo && index.topo().excludes(w, v) {
                    return Verdict::Unreachable;
                }
                return Verdict::Expand;
            }
            return Verdict::Reachable;
        }
        if self.topo && index.topo().excludes(w, v) {
            return Verdict::Unreachable;
        }
        let (out_w, out_v) = (labels.l_out(w), labels.l_out(v));
        let (in_w, in_v) = (labels.l_in(w), labels.l_in(v));
        if gg_out(out_w, out_v) || gg_in(in_v, in_w) {
            return Verdict::Unreachable;
        }
        if oplus(out_w, in_v) {
            return Verdict::Reachable;
        }
        Verdict::Expand
    }

    fn next_epoch(&mut self) {
        let n = self.index.graph().num_vertices();
        if self.visited.len() != n {
            self.visited = vec![0; n];
            self.epoch = 0;
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.visited.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
    }

    /// `u → v` in the transformed graph, never stepping on copies later than
    /// `cutoff`.
    pub fn reach_dag(&mut self, u: NodeId, v: NodeId, cutoff: Option<Time>) -> bool {
        let g = self.index.graph();
        let limit = cutoff.unwrap_or(Time::MAX).min(g.time(v));
        if g.time(u) > limit {
            return false;
        }
        self.next_epoch();
        self.stack.clear();
        self.stack.push(u);
        self.visited[u as usize] = self.epoch;
        while let Some(w) = self.stack.pop() {
            match self.check(w, v) {
                Verdict::Reachable => return true,
                Verdict::Unreachable => continue,
                Verdict::Expand => {}
            }
            self.expanded += 1;
            for &c in g.successors(w) {
                if g.time(c) > limit || self.visited[c as usize] == self.epoch {
                    continue;
                }
                self.visited[c as usize] = self.epoch;
                self.stack.push(c);
            }
        }
        false
    }

    fn check_vertex(&self, a: VertexId) -> Result<(), QueryError> {
        if (a as usize) < self.index.num_originals() {
            Ok(())
        } else {
            Err(QueryError::UnknownVertex(a))
        }
    }

    /// Whether a temporal path from `a` to `b` departs no earlier than
    /// `iv.start` and arrives no later than `iv.end`. For `a == b` the path
    /// must be non-empty.
    pub fn reach(&mut self, a: VertexId, b: VertexId, iv: TimeInterval) -> Result<bool, QueryError> {
        self.check_vertex(a)?;
        self.check_vertex(b)?;
        let g = self.index.graph();
        let (Some(u), Some(v)) = (g.locate_out(a, iv.start), g.locate_in(b, iv.end)) else {
            return Ok(false);
        };
        Ok(self.reach_dag(u, v, Some(iv.end)))
    }

    /// Smallest index `i` with `u → targets[i]`, given that reachability is
    /// monotone along `targets`.
    fn first_reached(&mut self, u: NodeId, targets: &[NodeId], cutoff: Time) -> Option<usize> {
        let last = *targets.last()?;
        if !self.reach_dag(u, last, Some(cutoff)) {
            return None;
        }
        let (mut lo, mut hi) = (0, targets.len() - 1);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.reach_dag(u, targets[mid], Some(cutoff)) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Some(lo)
    }

    pub fn earliest_arrival(
        &mut self,
        a: VertexId,
        b: VertexId,
        iv: TimeInterval,
    ) -> Result<Option<PathValue>, QueryError> {
        self.check_vertex(a)?;
        self.check_vertex(b)?;
        if a == b {
            return Ok(Some(PathValue::empty(iv.start)));
        }
        let g = self.index.graph();
        let Some(u) = g.locate_out(a, iv.start) else {
            return Ok(None);
        };
        let targets = g.in_copies_between(b, iv.start, iv.end);
        Ok(self
            .first_reached(u, targets, iv.end)
            .map(|i| PathValue::path(g.time(targets[i]))))
    }

    pub fn min_duration(&mut self, a: VertexId, b: VertexId, iv: TimeInterval) -> Result<Option<PathValue>, QueryError> {
        self.check_vertex(a)?;
        self.check_vertex(b)?;
        if a == b {
            return Ok(Some(PathValue::empty(0)));
        }
        let g = self.index.graph();
        let mut best: Option<Time> = None;
        for &u in g.out_copies_between(a, iv.start, iv.end) {
            let t = g.time(u);
            // Only arrivals that beat the best duration so far matter.
            let hi = match best {
                Some(d) => iv.end.min(t.saturating_add(d - 1)),
                None => iv.end,
            };
            if hi <= t {
                continue;
            }
            let targets = g.in_copies_between(b, t + 1, hi);
            if let Some(i) = self.first_reached(u, targets, hi) {
                best = Some(g.time(targets[i]) - t);
            }
        }
        Ok(best.map(PathValue::path))
    }

    pub fn answer(&mut self, kind: QueryKind, a: VertexId, b: VertexId, iv: TimeInterval) -> Result<QueryAnswer, QueryError> {
        Ok(match kind {
            QueryKind::Reach => QueryAnswer::Reach(self.reach(a, b, iv)?),
            QueryKind::Earliest => QueryAnswer::Earliest(self.earliest_arrival(a, b, iv)?),
            QueryKind::Fastest => QueryAnswer::Fastest(self.min_duration(a, b, iv)?),
        })
    }
}
