//! Temporal reachability index over the DAG transformation of a temporal
//! graph, with top-k chain labels, incremental insertion and a brute-force
//! oracle.

pub mod chains;
pub mod dag;
pub mod index;
pub mod labels;
pub mod oracle;
pub mod query;
pub mod rows;
pub mod strategy;
pub mod tgraph;
pub mod transform;
pub mod update;

pub use chains::{ChainCode, ChainCover, CodeMode};
pub use index::{Index, IndexConfig, IndexError};
pub use query::{PathValue, Querier, QueryAnswer, QueryError, QueryKind, TimeInterval};
pub use tgraph::{TemporalEdge, TemporalGraph, Time, VertexId};
pub use transform::{transform, TransformedGraph};
pub use update::{TopoMode, UpdateStats};
