//! Community detection by multislice modularity optimization.
//!
//! A static network (or an image turned into a patch-similarity graph) is copied
//! into several slices, each with its own resolution parameter, and copies of the
//! same node in adjacent slices are tied together by a coupling weight. A
//! Louvain-style optimizer then maximizes the multislice modularity over all
//! (node, slice) pairs, yielding one partition per resolution value that stays
//! consistent across neighbouring slices.
//!
//! ```
//! use slicemod::{graph::Graph, multislice, louvain, modularity::QualityNormalization};
//!
//! let g = Graph::load_edge_list("0 1\n1 2\n0 2\n3 4\n4 5\n3 5\n2 3").unwrap();
//! let gammas = multislice::linear_gamma_schedule(1.0, 0.0, 1).unwrap();
//! let ms = multislice::build_uniform_multislice(g, gammas, 0.0).unwrap();
//! let result = louvain::optimize(&ms, &louvain::OptimizerParams::default(), QualityNormalization::Conventional).unwrap();
//! assert!((result.quality - 5.0 / 14.0).abs() < 1e-12);
//! ```

pub mod affinity;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod graph;
pub mod louvain;
pub mod modularity;
pub mod multislice;
pub mod pnm;
pub mod scene;

mod sum;

pub use error::{Error, Result};
