//! Community detection with the Flex quality function.
//!
//! The crate provides the quality functions ([`fitness`]), a
//! concentration-based immune-network optimizer over locus-encoded
//! partitions ([`optimizer`]), a threshold heuristic that turns a disjoint
//! partition into an overlapping cover ([`overlap`]), NMI scoring
//! ([`metrics`]) and a benchmark harness with a planted-partition
//! generator ([`bench`]).

pub mod bench;
pub mod datasets;
pub mod error;
pub mod fitness;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod optimizer;
pub mod overlap;
pub mod partition;

pub use error::{Error, Result};
pub use fitness::{flex, modularity, FlexParams};
pub use graph::{Graph, TripleScope};
pub use metrics::{nmi_cover, nmi_disjoint};
pub use optimizer::OptimizerConfig;
pub use overlap::{find_overlaps, OverlapThresholds};
pub use partition::{Cover, Partition};
