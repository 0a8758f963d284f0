//! The assembled index: transformed graph, ranked chain cover, top-k labels
//! and topological labels, all built from one graph version.

use thiserror::Error;

use crate::chains::{assign_codes, ChainCover, ChainError, CodeMode};
use crate::dag::CycleError;
use crate::labels::{build_labels, build_topo_labels, IndexLabels, TopoLabels};
use crate::strategy::{variant, Registry, StrategyParams, UnknownStrategy};
use crate::tgraph::TemporalGraph;
use crate::transform::{transform, TransformedGraph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexConfig {
    pub k: usize,
    pub cover: String,
    pub rank: String,
    pub codes: CodeMode,
    /// Store one label side per copy where the cover allows it.
    pub reduce: bool,
    /// Use topological labels for pruning while they are fresh.
    pub topo: bool,
    pub seed: u64,
}

impl Default for IndexConfig {
    fn default() -> Self {
        Self {
            k: 5,
            cover: "temporal".into(),
            rank: "degree".into(),
            codes: CodeMode::Timestamp,
            reduce: true,
            topo: true,
            seed: 0,
        }
    }
}

impl IndexConfig {
    /// Default configuration for a named variant. General covers get
    /// position codes, the only mode they support.
    pub fn for_variant(name: &str) -> Result<Self, UnknownStrategy> {
        let v = variant(name)?;
        let mut config = Self {
            cover: v.cover.into(),
            rank: v.rank.into(),
            ..Self::default()
        };
        if v.cover != "temporal" {
            config.codes = CodeMode::Position;
        }
        Ok(config)
    }
}

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error(transparent)]
    Strategy(#[from] UnknownStrategy),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("transformed graph is not acyclic: {0}")]
    Cycle(#[from] CycleError),
    #[error("inconsistent index: {0}")]
    Inconsistent(String),
}

/// Label size totals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LabelSizes {
    pub total: usize,
    pub max_per_vertex: usize,
}

#[derive(Debug, Clone)]
pub struct Index {
    pub(crate) config: IndexConfig,
    pub(crate) graph: TransformedGraph,
    pub(crate) cover: ChainCover,
    pub(crate) labels: IndexLabels,
    pub(crate) topo: TopoLabels,
    pub(crate) topo_fresh: bool,
}

impl Index {
    pub fn build(g: &TemporalGraph, config: IndexConfig) -> Result<Self, IndexError> {
        Self::build_with(g, config, &Registry::default())
    }

    pub fn build_with(g: &TemporalGraph, config: IndexConfig, registry: &Registry) -> Result<Self, IndexError> {
        if config.k == 0 {
            return Err(IndexError::ZeroK);
        }
        let params = StrategyParams { seed: config.seed };
        let cover_strategy = registry.cover(&config.cover, &params)?;
        let rank_strategy = registry.rank(&config.rank, &params)?;

        let graph = transform(g);
        let order = graph.verify_dag()?;
        let mut cover = cover_strategy.cover(&graph)?;
        let ranks = rank_strategy.ranks(&cover, &graph);
        cover.set_ranks(ranks)?;
        let codes = assign_codes(&cover, |v| graph.time(v), graph.num_vertices(), config.codes)?;
        let mut labels = build_labels(&graph, &codes, config.k, &order);
        if config.reduce && cover.is_temporal() {
            labels.reduce(&graph);
        }
        let topo = build_topo_labels(&graph)?;
        Ok(Self {
            config,
            graph,
            cover,
            labels,
            topo,
            topo_fresh: true,
        })
    }

    /// Reassembles an index from stored components.
    pub fn from_parts(
        config: IndexConfig,
        graph: TransformedGraph,
        cover: ChainCover,
        labels: IndexLabels,
        topo: TopoLabels,
        topo_fresh: bool,
    ) -> Result<Self, IndexError> {
        let n = graph.num_vertices();
        if labels.num_vertices() != n || !cover.is_partition(n) {
            return Err(IndexError::Inconsistent("vertex counts differ between sections".into()));
        }
        if topo_fresh && (topo.level.len() != n || topo.sigma1.len() != n || topo.sigma2.len() != n) {
            return Err(IndexError::Inconsistent("topological labels do not cover every vertex".into()));
        }
        if labels.is_reduced() && !cover.is_temporal() {
            return Err(IndexError::Inconsistent("reduced labels need a temporal cover".into()));
        }
        Ok(Self {
            config,
            graph,
            cover,
            labels,
            topo,
            topo_fresh,
        })
    }

    pub fn config(&self) -> &IndexConfig {
        &self.config
    }

    pub fn k(&self) -> usize {
        self.config.k
    }

    pub fn graph(&self) -> &TransformedGraph {
        &self.graph
    }

    pub fn cover(&self) -> &ChainCover {
        &self.cover
    }

    pub fn labels(&self) -> &IndexLabels {
        &self.labels
    }

    pub fn topo(&self) -> &TopoLabels {
        &self.topo
    }

    /// True when the topological labels match the current graph.
    pub fn topo_fresh(&self) -> bool {
        self.topo_fresh
    }

    /// True when queries may prune with the topological labels.
    pub fn topo_pruning(&self) -> bool {
        self.config.topo && self.topo_fresh
    }

    pub fn set_topo_pruning(&mut self, on: bool) {
        self.config.topo = on;
    }

    pub fn num_originals(&self) -> usize {
        self.graph.num_originals()
    }

    pub fn is_reduced(&self) -> bool {
        self.labels.is_reduced()
    }

    /// Reduces the labels if the configuration and cover allow it.
    pub fn reduce_labels(&mut self) {
        if self.config.reduce && self.cover.is_temporal() && !self.labels.is_reduced() {
            self.labels.reduce(&self.graph);
        }
    }

    /// Restores both label sides for every vertex.
    pub fn expand_labels(&mut self) -> Result<(), CycleError> {
        if self.labels.is_reduced() {
            let order = self.graph.verify_dag()?;
            self.labels.expand(&self.graph, &order);
        }
        Ok(())
    }

    pub fn label_sizes(&self) -> LabelSizes {
        let mut sizes = LabelSizes::default();
        for v in 0..self.graph.num_vertices() as u32 {
            let n = self.labels.owned_len(v);
            sizes.total += n;
            sizes.max_per_vertex = sizes.max_per_vertex.max(n);
        }
        sizes
    }

    /// Approximate heap footprint in bytes.
    pub fn heap_bytes(&self) -> usize {
        let n = self.graph.num_vertices();
        self.graph.heap_bytes()
            + self.labels.heap_bytes()
            + (self.topo.level.len() + self.topo.sigma1.len() + self.topo.sigma2.len()) * 4
            + n * 8
    }
}
