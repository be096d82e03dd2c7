//! Exact enumeration and counting on directed cycle powers `Cay(Z_n, {1..p})`.
//!
//! * [`graph`]: the ambient graphs, edge bit sets, triangles, rotations, export.
//! * [`jacobsthal`]: the Jacobsthal sequence and its identities.
//! * [`arborescence`]: rooted spanning trees by enumeration, determinant and
//!   spectral product.
//! * [`wcsc`]: closed subgraphs, closure, strips with tails, classification.
//! * [`decomposition`]: trees bucketed by their containing strip, cube-cycle check.

pub mod arborescence;
pub mod decomposition;
pub mod error;
pub mod graph;
pub mod jacobsthal;
pub mod report;
pub mod wcsc;

pub use arborescence::{
    count_arborescences_det, enumerate_arborescences, is_arborescence, spectral_product,
    Arborescence, CountReport, Digraph,
};
pub use decomposition::{
    count_square_cycle, count_strip, count_strip_with_tails, locate_tree, verify_cube_remark,
    verify_partition, CubeRemarkReport, PartitionReport,
};
pub use error::{Error, Result};
pub use graph::{build_cycle_power, CyclePowerGraph, Edge, EdgeSet, ExportFormat, Triangle};
pub use jacobsthal::{jacobsthal, JacobsthalTable};
pub use report::VerificationReport;
pub use wcsc::{
    classify, closure, enumerate_wcsc, escape_route, homology_trivial, is_closed, strip_with_tails,
    StripParams, WcscClass,
};
