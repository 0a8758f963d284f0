//! Reference answers computed directly on the temporal graph with a
//! one-pass scan over time-sorted edges, and a seeded synthetic graph
//! generator.

use std::collections::HashMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::query::TimeInterval;
use crate::tgraph::{TemporalEdge, TemporalGraph, Time, VertexId};

const NEVER: Time = Time::MAX;

/// Earliest arrivals from one source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrivals {
    /// Per vertex; the source holds the interval start.
    pub arrival: Vec<Time>,
    /// Earliest return to the source over a non-empty path.
    pub back: Time,
}

impl Arrivals {
    pub fn get(&self, v: VertexId) -> Option<Time> {
        match self.arrival.get(v as usize) {
            Some(&t) if t != NEVER => Some(t),
            _ => None,
        }
    }
}

/// Edges sorted by start time, ready for repeated scans.
#[derive(Debug, Clone)]
pub struct OnePass {
    num_vertices: usize,
    edges: Vec<TemporalEdge>,
}

impl OnePass {
    pub fn new(g: &TemporalGraph) -> Self {
        let mut edges = g.edges().to_vec();
        edges.sort_by_key(|e| e.t);
        Self {
            num_vertices: g.num_vertices(),
            edges,
        }
    }

    /// Earliest arrival at every vertex over paths that leave `a` no earlier
    /// than `iv.start` and arrive no later than `iv.end`.
    pub fn arrivals(&self, a: VertexId, iv: TimeInterval) -> Arrivals {
        let mut arrival = vec![NEVER; self.num_vertices];
        let mut back = NEVER;
        if (a as usize) >= self.num_vertices {
            return Arrivals { arrival, back };
        }
        arrival[a as usize] = iv.start;
        let first = self.edges.partition_point(|e| e.t < iv.start);
        for e in &self.edges[first..] {
            if e.t > iv.end {
                break;
            }
            if arrival[e.u as usize] == NEVER || e.t < arrival[e.u as usize] || e.arrival() > iv.end {
                continue;
            }
            let slot = &mut arrival[e.v as usize];
            *slot = (*slot).min(e.arrival());
            if e.v == a {
                back = back.min(e.arrival());
            }
        }
        Arrivals { arrival, back }
    }

    pub fn earliest_arrival(&self, a: VertexId, b: VertexId, iv: TimeInterval) -> Option<Time> {
        if a == b {
            return Some(iv.start);
        }
        self.arrivals(a, iv).get(b)
    }

    /// Non-empty path semantics: `reach(a, a, ..)` needs a round trip.
    pub fn reach(&self, a: VertexId, b: VertexId, iv: TimeInterval) -> bool {
        let arr = self.arrivals(a, iv);
        if a == b {
            arr.back != NEVER
        } else {
            arr.get(b).is_some()
        }
    }

    /// Distinct departure times of `a` inside the interval, ascending.
    pub fn departures(&self, a: VertexId, iv: TimeInterval) -> Vec<Time> {
        let mut starts: Vec<Time> = self
            .edges
            .iter()
            .filter(|e| e.u == a && iv.contains(e.t))
            .map(|e| e.t)
            .collect();
        starts.dedup();
        starts
    }

    /// Minimum duration from `a` to every vertex; the source itself gets 0.
    pub fn min_durations(&self, a: VertexId, iv: TimeInterval) -> Vec<Option<Time>> {
        let mut best: Vec<Option<Time>> = vec![None; self.num_vertices];
        for t in self.departures(a, iv) {
            let arr = self.arrivals(a, TimeInterval { start: t, end: iv.end });
            for (v, &at) in arr.arrival.iter().enumerate() {
                if at != NEVER && v != a as usize {
                    let d = at - t;
                    if best[v].is_none_or(|b| d < b) {
                        best[v] = Some(d);
                    }
                }
            }
        }
        if let Some(slot) = best.get_mut(a as usize) {
            *slot = Some(0);
        }
        best
    }

    pub fn min_duration(&self, a: VertexId, b: VertexId, iv: TimeInterval) -> Option<Time> {
        if a == b {
            return Some(0);
        }
        self.min_durations(a, iv).get(b as usize).copied().flatten()
    }
}

pub fn oracle_earliest_arrival(g: &TemporalGraph, a: VertexId, b: VertexId, iv: TimeInterval) -> Option<Time> {
    OnePass::new(g).earliest_arrival(a, b, iv)
}

pub fn oracle_reach(g: &TemporalGraph, a: VertexId, b: VertexId, iv: TimeInterval) -> bool {
    OnePass::new(g).reach(a, b, iv)
}

pub fn oracle_min_duration(g: &TemporalGraph, a: VertexId, b: VertexId, iv: TimeInterval) -> Option<Time> {
    OnePass::new(g).min_duration(a, b, iv)
}

/// Synthetic graph parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenParams {
    pub vertices: usize,
    pub avg_degree: f64,
    /// Most temporal edges allowed between one ordered pair.
    pub max_multiplicity: usize,
    /// Start times are drawn from `0..horizon`.
    pub horizon: Time,
    pub lambda_min: Time,
    pub lambda_max: Time,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            vertices: 50,
            avg_degree: 10.0,
            max_multiplicity: 5,
            horizon: 100,
            lambda_min: 1,
            lambda_max: 5,
            seed: 0,
        }
    }
}

/// Seeded random temporal graph with about `vertices * avg_degree` edges.
/// Sources follow a power law (degree exponent 2.5) over a shuffled vertex
/// order; targets are uniform and never equal to the source.
pub fn random_temporal_graph(p: &GenParams) -> TemporalGraph {
    let n = p.vertices;
    let mut g = TemporalGraph::new(n);
    if n < 2 || p.max_multiplicity == 0 {
        return g;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut order: Vec<VertexId> = (0..n as VertexId).collect();
    order.shuffle(&mut rng);
    let weights: Vec<f64> = (0..n).map(|i| ((i + 1) as f64).powf(-2.0 / 3.0)).collect();
    let sources = WeightedIndex::new(&weights).expect("positive weights");

    let target = (n as f64 * p.avg_degree).round() as usize;
    let capacity = n * (n - 1) * p.max_multiplicity;
    let m = target.min(capacity);
    let mut count: HashMap<(VertexId, VertexId), usize> = HashMap::new();
    let lam_hi = p.lambda_max.max(p.lambda_min).max(1);
    let lam_lo = p.lambda_min.clamp(1, lam_hi);
    let mut attempts = 0usize;
    while g.num_edges() < m && attempts < m.saturating_mul(50) {
        attempts += 1;
        let u = order[sources.sample(&mut rng)];
        let mut v = rng.gen_range(0..n as VertexId - 1);
        if v >= u {
            v += 1;
        }
        let c = count.entry((u, v)).or_insert(0);
        if *c >= p.max_multiplicity {
            continue;
        }
        *c += 1;
        let t = rng.gen_range(0..p.horizon.max(1));
        let lambda = rng.gen_range(lam_lo..=lam_hi);
        g.add_edge(TemporalEdge::new(u, v, t, lambda).expect("positive lambda"))
            .expect("endpoints in range");
    }
    g
}
