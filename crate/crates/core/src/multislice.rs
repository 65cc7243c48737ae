//! Multislice networks built from one shared graph.
//!
//! Every slice uses the same adjacency matrix with its own resolution parameter,
//! and each node is coupled to its own copies in the neighbouring slices with a
//! constant weight `omega`. Slices are ordered; only slices `s` and `s ± 1` are
//! coupled.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sum::CompensatedSum;

/// Ordered per-slice resolution parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GammaSchedule(Vec<f64>);

impl GammaSchedule {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::validation("gamma schedule must have at least one slice"));
        }
        if let Some(bad) = values.iter().find(|g| !g.is_finite() || **g < 0.0) {
            return Err(Error::validation(format!(
                "resolution parameters must be finite and nonnegative, got {bad}"
            )));
        }
        Ok(GammaSchedule(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `start + step * (s - 1)` for `s = 1..=count`.
pub fn linear_gamma_schedule(start: f64, step: f64, count: usize) -> Result<GammaSchedule> {
    if count == 0 {
        return Err(Error::validation("gamma count must be at least 1"));
    }
    GammaSchedule::new((0..count).map(|s| start + step * s as f64).collect())
}

/// A stack of identical slices with per-slice resolution and chain coupling.
///
/// Supra-nodes `(node, slice)` are addressed slice-major by
/// [`MultisliceNetwork::supra_index`].
#[derive(Debug, Clone)]
pub struct MultisliceNetwork {
    base: Arc<Graph>,
    gammas: GammaSchedule,
    omega: f64,
    two_mu: f64,
}

pub fn build_uniform_multislice(
    graph: impl Into<Arc<Graph>>,
    gammas: GammaSchedule,
    omega: f64,
) -> Result<MultisliceNetwork> {
    MultisliceNetwork::new(graph.into(), gammas, omega)
}

impl MultisliceNetwork {
    pub fn new(base: Arc<Graph>, gammas: GammaSchedule, omega: f64) -> Result<Self> {
        if !omega.is_finite() || omega < 0.0 {
            return Err(Error::validation(format!(
                "interslice coupling must be finite and nonnegative, got {omega}"
            )));
        }
        let mut ms = MultisliceNetwork {
            base,
            gammas,
            omega,
            two_mu: 0.0,
        };
        let mut total = CompensatedSum::default();
        for s in 0..ms.num_slices() {
            for j in 0..ms.num_nodes() {
                total.add(ms.intra_strength(j, s));
                total.add(ms.inter_strength(j, s));
            }
        }
        ms.two_mu = total.value();
        Ok(ms)
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn shared_base(&self) -> Arc<Graph> {
        Arc::clone(&self.base)
    }

    pub fn num_nodes(&self) -> usize {
        self.base.node_count()
    }

    pub fn num_slices(&self) -> usize {
        self.gammas.len()
    }

    pub fn num_supra_nodes(&self) -> usize {
        self.num_nodes() * self.num_slices()
    }

    pub fn supra_index(&self, node: usize, slice: usize) -> usize {
        slice * self.num_nodes() + node
    }

    pub fn gammas(&self) -> &GammaSchedule {
        &self.gammas
    }

    pub fn gamma(&self, slice: usize) -> f64 {
        self.gammas.values()[slice]
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `C_jsr`: the coupling between slices `s` and `r` for any node.
    pub fn coupling(&self, s: usize, r: usize) -> f64 {
        if s.abs_diff(r) == 1 && s.max(r) < self.num_slices() {
            self.omega
        } else {
            0.0
        }
    }

    /// `k_js`, identical in every slice.
    pub fn intra_strength(&self, node: usize, _slice: usize) -> f64 {
        self.base.strength(node)
    }

    /// `c_js = sum_r C_jsr`.
    pub fn inter_strength(&self, _node: usize, slice: usize) -> f64 {
        let mut adjacent = 0;
        if slice > 0 {
            adjacent += 1;
        }
        if slice + 1 < self.num_slices() {
            adjacent += 1;
        }
        self.omega * adjacent as f64
    }

    /// `2m_s` of slice `s`.
    pub fn two_m(&self, _slice: usize) -> f64 {
        self.base.total_weight_2m()
    }

    /// `2 mu`: total intraslice strength plus total interslice strength.
    pub fn two_mu(&self) -> f64 {
        self.two_mu
    }
}
