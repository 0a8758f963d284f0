//! Chain covers of the DAG, chain rankings and chain codes.
//!
//! Two covers are available: the temporal cover merges `V_in(v)` and
//! `V_out(v)` of each original vertex into one chain, and the greedy cover
//! works on any DAG. A ranking assigns ranks `1..=l` to the chains; a vertex
//! code is `(rank of its chain, order key)`.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dag::{topological_order, CycleError, Dag, NodeId};
use crate::tgraph::{Time, VertexId};
use crate::transform::TransformedGraph;

const NO_CHAIN: u32 = u32::MAX;

/// `(x, y)`: chain rank and order key within the chain.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChainCode {
    pub x: u32,
    pub y: u64,
}

impl ChainCode {
    pub const fn new(x: u32, y: u64) -> Self {
        Self { x, y }
    }
}

impl fmt::Display for ChainCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CodeMode {
    /// `y` is the vertex time stamp.
    #[default]
    Timestamp,
    /// `y` is the 1-based position in the chain.
    Position,
}

impl CodeMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CodeMode::Timestamp => "timestamp",
            CodeMode::Position => "position",
        }
    }
}

impl FromStr for CodeMode {
    type Err = ChainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "timestamp" => Ok(CodeMode::Timestamp),
            "position" => Ok(CodeMode::Position),
            other => Err(ChainError::UnknownCodeMode(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("timestamp codes need a temporal chain cover")]
    TimestampOnGeneralCover,
    #[error("chain cover is not ranked")]
    Unranked,
    #[error("ranks are not a permutation of 1..={0}")]
    InvalidRanks(usize),
    #[error("unknown code mode `{0}`")]
    UnknownCodeMode(String),
    #[error(transparent)]
    Cycle(#[from] CycleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverKind {
    /// One merged chain per original vertex of a transformed graph.
    Temporal,
    /// Chains reachable in the DAG itself.
    General,
}

#[derive(Debug, Clone)]
pub struct ChainCover {
    kind: CoverKind,
    chains: Vec<Vec<NodeId>>,
    chain_of: Vec<u32>,
    /// 1-based rank per chain; empty until ranked.
    rank: Vec<u32>,
    /// Original vertex of each temporal chain.
    owner: Vec<Option<VertexId>>,
    /// Temporal chain index per original vertex.
    by_original: Vec<u32>,
}

impl ChainCover {
    fn from_chains(kind: CoverKind, chains: Vec<Vec<NodeId>>, owner: Vec<Option<VertexId>>, n: usize) -> Self {
        let mut chain_of = vec![NO_CHAIN; n];
        for (c, chain) in chains.iter().enumerate() {
            for &v in chain {
                chain_of[v as usize] = c as u32;
            }
        }
        let mut by_original = Vec::new();
        for (c, o) in owner.iter().enumerate() {
            if let Some(o) = *o {
                if by_original.len() <= o as usize {
                    by_original.resize(o as usize + 1, NO_CHAIN);
                }
                by_original[o as usize] = c as u32;
            }
        }
        Self {
            kind,
            chains,
            chain_of,
            rank: Vec::new(),
            owner,
            by_original,
        }
    }

    /// Reassembles a ranked cover, e.g. from an index file.
    pub fn from_ranked_chains(
        kind: CoverKind,
        chains: Vec<Vec<NodeId>>,
        owner: Vec<Option<VertexId>>,
        ranks: Vec<u32>,
        num_nodes: usize,
    ) -> Result<Self, ChainError> {
        let mut cover = Self::from_chains(kind, chains, owner, num_nodes);
        cover.set_ranks(ranks)?;
        Ok(cover)
    }

    pub fn kind(&self) -> CoverKind {
        self.kind
    }

    pub fn is_temporal(&self) -> bool {
        self.kind == CoverKind::Temporal
    }

    pub fn len(&self) -> usize {
        self.chains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chains.is_empty()
    }

    pub fn chains(&self) -> &[Vec<NodeId>] {
        &self.chains
    }

    pub fn chain(&self, c: usize) -> &[NodeId] {
        &self.chains[c]
    }

    #[inline]
    pub fn chain_of(&self, v: NodeId) -> usize {
        self.chain_of[v as usize] as usize
    }

    pub fn owner(&self, c: usize) -> Option<VertexId> {
        self.owner[c]
    }

    pub fn chain_of_original(&self, v: VertexId) -> Option<usize> {
        match self.by_original.get(v as usize) {
            Some(&c) if c != NO_CHAIN => Some(c as usize),
            _ => None,
        }
    }

    pub fn is_ranked(&self) -> bool {
        self.rank.len() == self.chains.len()
    }

    pub fn rank(&self, c: usize) -> u32 {
        self.rank[c]
    }

    pub fn ranks(&self) -> &[u32] {
        &self.rank
    }

    /// Deterministic tie key: the original vertex for temporal chains, the
    /// chain index otherwise.
    fn tie_key(&self, c: usize) -> u64 {
        match self.owner[c] {
            Some(o) => o as u64,
            None => c as u64,
        }
    }

    pub fn set_ranks(&mut self, ranks: Vec<u32>) -> Result<(), ChainError> {
        let l = self.chains.len();
        let mut seen = vec![false; l];
        if ranks.len() != l {
            return Err(ChainError::InvalidRanks(l));
        }
        for &r in &ranks {
            if r == 0 || r as usize > l || std::mem::replace(&mut seen[r as usize - 1], true) {
                return Err(ChainError::InvalidRanks(l));
            }
        }
        self.rank = ranks;
        Ok(())
    }

    /// Checks that the chains partition `0..num_nodes`.
    pub fn is_partition(&self, num_nodes: usize) -> bool {
        let mut count = vec![0u32; num_nodes];
        for chain in &self.chains {
            for &v in chain {
                match count.get_mut(v as usize) {
                    Some(c) => *c += 1,
                    None => return false,
                }
            }
        }
        count.iter().all(|&c| c == 1)
    }

    /// Places a newly created copy into the chain of its original vertex,
    /// opening a chain ranked after all others if there is none. Returns the
    /// chain index.
    pub(crate) fn insert_temporal(&mut self, g: &TransformedGraph, v: NodeId) -> usize {
        debug_assert!(self.is_temporal());
        let d = g.vertex(v);
        if self.chain_of.len() <= v as usize {
            self.chain_of.resize(v as usize + 1, NO_CHAIN);
        }
        let c = match self.chain_of_original(d.original) {
            Some(c) => {
                let chain = &mut self.chains[c];
                let pos = chain.partition_point(|&w| {
                    let e = g.vertex(w);
                    (e.time, e.kind) < (d.time, d.kind)
                });
                chain.insert(pos, v);
                c
            }
            None => {
                let c = self.chains.len();
                self.chains.push(vec![v]);
                self.owner.push(Some(d.original));
                if self.by_original.len() <= d.original as usize {
                    self.by_original.resize(d.original as usize + 1, NO_CHAIN);
                }
                self.by_original[d.original as usize] = c as u32;
                if !self.rank.is_empty() || c == 0 {
                    self.rank.push(c as u32 + 1);
                }
                c
            }
        };
        self.chain_of[v as usize] = c as u32;
        c
    }
}

/// Merges `V_in(v)` and `V_out(v)` of every original vertex into one chain,
/// ascending by time with IN before OUT on ties.
pub fn temporal_chain_cover(g: &TransformedGraph) -> ChainCover {
    let mut chains = Vec::new();
    let mut owner = Vec::new();
    for v in 0..g.num_originals() as VertexId {
        let merged = g.merged_copies(v);
        if !merged.is_empty() {
            chains.push(merged);
            owner.push(Some(v));
        }
    }
    ChainCover::from_chains(CoverKind::Temporal, chains, owner, g.num_vertices())
}

/// Greedy cover of an arbitrary DAG: start at the first unassigned vertex in
/// topological order and keep appending the unassigned out-neighbour that
/// comes first in that order.
pub fn greedy_chain_cover<G: Dag + ?Sized>(g: &G) -> Result<ChainCover, CycleError> {
    let order = topological_order(g)?;
    let n = g.num_nodes();
    let mut pos = vec![0u32; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v as usize] = i as u32;
    }
    let mut assigned = vec![false; n];
    let mut chains = Vec::new();
    for &start in &order {
        if assigned[start as usize] {
            continue;
        }
        let mut chain = vec![start];
        assigned[start as usize] = true;
        let mut cur = start;
        while let Some(&next) = g
            .successors(cur)
            .iter()
            .filter(|&&w| !assigned[w as usize])
            .min_by_key(|&&w| pos[w as usize])
        {
            assigned[next as usize] = true;
            chain.push(next);
            cur = next;
        }
        chains.push(chain);
    }
    let owner = vec![None; chains.len()];
    Ok(ChainCover::from_chains(CoverKind::General, chains, owner, n))
}

/// Φ(C): in-degree plus out-degree summed over the chain's vertices.
pub fn chain_degree<G: Dag + ?Sized>(cover: &ChainCover, g: &G, c: usize) -> usize {
    cover.chains[c]
        .iter()
        .map(|&v| g.successors(v).len() + g.predecessors(v).len())
        .sum()
}

/// Ranks by descending Φ; ties go to the smaller original vertex id.
pub fn degree_ranks<G: Dag + ?Sized>(cover: &ChainCover, g: &G) -> Vec<u32> {
    let phi: Vec<usize> = (0..cover.len()).map(|c| chain_degree(cover, g, c)).collect();
    let mut by_rank: Vec<usize> = (0..cover.len()).collect();
    by_rank.sort_by_key(|&c| (std::cmp::Reverse(phi[c]), cover.tie_key(c)));
    let mut ranks = vec![0u32; cover.len()];
    for (i, &c) in by_rank.iter().enumerate() {
        ranks[c] = i as u32 + 1;
    }
    ranks
}

/// A seed-deterministic random permutation of ranks.
pub fn random_ranks(cover: &ChainCover, seed: u64) -> Vec<u32> {
    let mut ranks: Vec<u32> = (1..=cover.len() as u32).collect();
    ranks.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    ranks
}

pub fn rank_by_degree<G: Dag + ?Sized>(mut cover: ChainCover, g: &G) -> ChainCover {
    let ranks = degree_ranks(&cover, g);
    cover.set_ranks(ranks).expect("degree ranks form a permutation");
    cover
}

pub fn rank_random(mut cover: ChainCover, seed: u64) -> ChainCover {
    let ranks = random_ranks(&cover, seed);
    cover.set_ranks(ranks).expect("random ranks form a permutation");
    cover
}

/// Code of every vertex. Timestamp mode reads times from `times`.
pub fn assign_codes(
    cover: &ChainCover,
    times: impl Fn(NodeId) -> Time,
    num_nodes: usize,
    mode: CodeMode,
) -> Result<Vec<ChainCode>, ChainError> {
    if !cover.is_ranked() {
        return Err(ChainError::Unranked);
    }
    if mode == CodeMode::Timestamp && !cover.is_temporal() {
        return Err(ChainError::TimestampOnGeneralCover);
    }
    let mut codes = vec![ChainCode::default(); num_nodes];
    for (c, chain) in cover.chains.iter().enumerate() {
        let x = cover.rank[c];
        for (i, &v) in chain.iter().enumerate() {
            let y = match mode {
                CodeMode::Timestamp => times(v),
                CodeMode::Position => i as u64 + 1,
            };
            codes[v as usize] = ChainCode::new(x, y);
        }
    }
    Ok(codes)
}

/// Builds a chain cover for a transformed graph.
pub trait CoverStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn cover(&self, g: &TransformedGraph) -> Result<ChainCover, ChainError>;
}

/// Orders the chains of a cover; returns one rank per chain.
pub trait RankStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn ranks(&self, cover: &ChainCover, g: &TransformedGraph) -> Vec<u32>;
}

pub struct TemporalCover;

impl CoverStrategy for TemporalCover {
    fn name(&self) -> &'static str {
        "temporal"
    }

    fn cover(&self, g: &TransformedGraph) -> Result<ChainCover, ChainError> {
        Ok(temporal_chain_cover(g))
    }
}

pub struct GreedyCover;

impl CoverStrategy for GreedyCover {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn cover(&self, g: &TransformedGraph) -> Result<ChainCover, ChainError> {
        Ok(greedy_chain_cover(g)?)
    }
}

pub struct DegreeRank;

impl RankStrategy for DegreeRank {
    fn name(&self) -> &'static str {
        "degree"
    }

    fn ranks(&self, cover: &ChainCover, g: &TransformedGraph) -> Vec<u32> {
        degree_ranks(cover, g)
    }
}

pub struct RandomRank {
    pub seed: u64,
}

impl RankStrategy for RandomRank {
    fn name(&self) -> &'static str {
        "random"
    }

    fn ranks(&self, cover: &ChainCover, _g: &TransformedGraph) -> Vec<u32> {
        random_ranks(cover, self.seed)
    }
}
