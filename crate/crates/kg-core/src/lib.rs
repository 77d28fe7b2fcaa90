//! Knowledge-graph ingestion, connectivity, and centrality analysis.
//!
//! The pipeline starts from tab-separated triplet files, builds an in-memory
//! multigraph, extracts the largest connected component, and derives
//! per-entity structural measures (degree, clustering, PageRank, Katz,
//! closeness, betweenness) plus score-vs-property bin curves.
//!
//! Heavy per-source sweeps are data-parallel via rayon behind the `parallel`
//! feature (on by default) and are bitwise-reproducible regardless of the
//! execution strategy.

pub mod binning;
pub mod centrality;
pub mod component;
pub mod error;
pub mod exec;
pub mod graph;
pub mod triplet;

pub use binning::{bin_by_property, BinRow, BinScale, BinnedCurve};
pub use centrality::{
    betweenness, centrality, closeness, clustering_all, clustering_coefficient,
    degree_centrality, katz, pagerank, CentralityKind, CentralityMap, KatzParams, PageRankParams,
};
pub use component::{
    connected_components, induced_subgraph, largest_connected_component, ComponentLabels,
    ComponentMode,
};
pub use error::CoreError;
pub use exec::{map_indexed, sum_chunked, Strategy, CHUNK};
pub use graph::{
    build_graph, DegreeKind, EntityId, GraphSummary, KnowledgeGraph, RelationId, TripletId,
};
pub use triplet::{parse_triplets, ColumnOrder, Triplet};
