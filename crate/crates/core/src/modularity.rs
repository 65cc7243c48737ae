//! Single-slice and multislice modularity, and exact single-move quality changes.
//!
//! All sums run over ordered node pairs and include the diagonal, so a partition
//! with every node in one community has zero modularity at resolution 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::multislice::MultisliceNetwork;
use crate::sum::CompensatedSum;

/// Prefactor applied to the multislice quality sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QualityNormalization {
    /// `1 / (2 mu)`.
    #[default]
    Conventional,
    /// `1 / mu`, twice the conventional value.
    Paper,
}

impl QualityNormalization {
    pub fn prefactor(self, two_mu: f64) -> f64 {
        match self {
            QualityNormalization::Conventional => 1.0 / two_mu,
            QualityNormalization::Paper => 2.0 / two_mu,
        }
    }
}

impl std::str::FromStr for QualityNormalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conventional" => Ok(QualityNormalization::Conventional),
            "paper" => Ok(QualityNormalization::Paper),
            other => Err(Error::validation(format!(
                "unknown normalization {other:?} (expected conventional or paper)"
            ))),
        }
    }
}

/// Community assignment of every `(node, slice)` pair.
///
/// Alongside the labels it caches, for every community, its total intraslice
/// strength in each slice and its member count, which is what the null-model
/// part of an incremental move needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    num_nodes: usize,
    num_slices: usize,
    labels: Vec<usize>,
    slice_strength: Vec<f64>,
    members: Vec<usize>,
}

impl Partition {
    /// Builds a partition from slice-major labels (`labels[s * n + j]`).
    ///
    /// Community ids may be sparse; the id space is `0..=max label`.
    pub fn new(ms: &MultisliceNetwork, labels: Vec<usize>) -> Result<Self> {
        let n = ms.num_nodes();
        let slices = ms.num_slices();
        if labels.len() != n * slices {
            return Err(Error::validation(format!(
                "{} labels for {} nodes in {} slices",
                labels.len(),
                n,
                slices
            )));
        }
        let capacity = labels.iter().max().map_or(0, |m| m + 1);
        let mut p = Partition {
            num_nodes: n,
            num_slices: slices,
            labels,
            slice_strength: vec![0.0; capacity * slices],
            members: vec![0; capacity],
        };
        for s in 0..slices {
            for j in 0..n {
                let c = p.labels[s * n + j];
                p.slice_strength[c * slices + s] += ms.intra_strength(j, s);
                p.members[c] += 1;
            }
        }
        Ok(p)
    }

    /// Builds a partition from one label vector per slice.
    pub fn from_slices(ms: &MultisliceNetwork, per_slice: &[Vec<usize>]) -> Result<Self> {
        if per_slice.len() != ms.num_slices() {
            return Err(Error::validation(format!(
                "{} slices of labels for a {}-slice network",
                per_slice.len(),
                ms.num_slices()
            )));
        }
        if let Some(bad) = per_slice.iter().find(|l| l.len() != ms.num_nodes()) {
            return Err(Error::validation(format!(
                "slice labels of length {} for {} nodes",
                bad.len(),
                ms.num_nodes()
            )));
        }
        Self::new(ms, per_slice.concat())
    }

    /// Every supra-node in its own community.
    pub fn singletons(ms: &MultisliceNetwork) -> Self {
        Self::new(ms, (0..ms.num_supra_nodes()).collect()).expect("sizes match")
    }

    /// Every supra-node in community 0.
    pub fn uniform(ms: &MultisliceNetwork) -> Self {
        Self::new(ms, vec![0; ms.num_supra_nodes()]).expect("sizes match")
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_slices(&self) -> usize {
        self.num_slices
    }

    /// Size of the community id space (some ids may be empty).
    pub fn capacity(&self) -> usize {
        self.members.len()
    }

    /// Number of nonempty communities.
    pub fn num_communities(&self) -> usize {
        self.members.iter().filter(|&&m| m > 0).count()
    }

    pub fn community(&self, node: usize, slice: usize) -> usize {
        self.labels[slice * self.num_nodes + node]
    }

    /// Slice-major labels.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn slice_labels(&self, slice: usize) -> &[usize] {
        &self.labels[slice * self.num_nodes..(slice + 1) * self.num_nodes]
    }

    /// Total intraslice strength of `community`'s members in `slice`.
    pub fn community_strength(&self, slice: usize, community: usize) -> f64 {
        self.slice_strength[community * self.num_slices + slice]
    }

    pub fn member_count(&self, community: usize) -> usize {
        self.members[community]
    }

    /// Reassigns one supra-node, keeping the cached sums current.
    pub fn move_node(
        &mut self,
        ms: &MultisliceNetwork,
        node: usize,
        slice: usize,
        target: usize,
    ) -> Result<()> {
        self.check_supra_node(node, slice)?;
        if target >= self.capacity() {
            return Err(Error::validation(format!(
                "community {target} outside 0..{}",
                self.capacity()
            )));
        }
        let idx = slice * self.num_nodes + node;
        let source = self.labels[idx];
        let k = ms.intra_strength(node, slice);
        self.slice_strength[source * self.num_slices + slice] -= k;
        self.slice_strength[target * self.num_slices + slice] += k;
        self.members[source] -= 1;
        self.members[target] += 1;
        self.labels[idx] = target;
        Ok(())
    }

    /// Renumbers communities densely in order of first appearance (slice-major).
    pub fn compact(&mut self, ms: &MultisliceNetwork) {
        let labels = compact_labels(&self.labels);
        *self = Partition::new(ms, labels).expect("sizes unchanged");
    }

    fn check_supra_node(&self, node: usize, slice: usize) -> Result<()> {
        if node >= self.num_nodes || slice >= self.num_slices {
            return Err(Error::validation(format!(
                "supra-node ({node}, {slice}) outside {} nodes x {} slices",
                self.num_nodes, self.num_slices
            )));
        }
        Ok(())
    }

    fn check_matches(&self, ms: &MultisliceNetwork) -> Result<()> {
        if self.num_slices != ms.num_slices() || self.num_nodes != ms.num_nodes() {
            return Err(Error::validation(format!(
                "partition covers {} nodes x {} slices, network has {} x {}",
                self.num_nodes,
                self.num_slices,
                ms.num_nodes(),
                ms.num_slices()
            )));
        }
        Ok(())
    }
}

/// Renumbers labels to `0..C` in order of first appearance.
pub fn compact_labels(labels: &[usize]) -> Vec<usize> {
    let capacity = labels.iter().max().map_or(0, |m| m + 1);
    let mut remap = vec![usize::MAX; capacity];
    let mut next = 0;
    labels
        .iter()
        .map(|&l| {
            if remap[l] == usize::MAX {
                remap[l] = next;
                next += 1;
            }
            remap[l]
        })
        .collect()
}

/// Newman modularity of `labels` on `g` at resolution `gamma`.
pub fn modularity_single(g: &Graph, labels: &[usize], gamma: f64) -> Result<f64> {
    if labels.len() != g.node_count() {
        return Err(Error::validation(format!(
            "{} labels for {} nodes",
            labels.len(),
            g.node_count()
        )));
    }
    let two_m = g.total_weight_2m();
    if two_m <= 0.0 {
        return Err(Error::UndefinedQuality("graph has no edge weight".into()));
    }
    let capacity = labels.iter().max().map_or(0, |m| m + 1);
    let mut totals = vec![0.0; capacity];
    let mut intra = CompensatedSum::default();
    for (i, &li) in labels.iter().enumerate() {
        totals[li] += g.strength(i);
        for (j, w) in g.neighbors(i) {
            if labels[j] == li {
                intra.add(if i == j { 2.0 * w } else { w });
            }
        }
    }
    let mut null = CompensatedSum::default();
    for t in totals {
        null.add(t * t);
    }
    Ok((intra.value() - gamma * null.value() / two_m) / two_m)
}

/// Multislice modularity of `p` on `ms`.
pub fn modularity_multislice(
    ms: &MultisliceNetwork,
    p: &Partition,
    norm: QualityNormalization,
) -> Result<f64> {
    p.check_matches(ms)?;
    let two_mu = ms.two_mu();
    if two_mu <= 0.0 {
        return Err(Error::UndefinedQuality("network has no edge or coupling weight".into()));
    }
    let n = ms.num_nodes();
    let g = ms.base();
    let mut total = CompensatedSum::default();
    for s in 0..ms.num_slices() {
        let labels = p.slice_labels(s);
        for (i, &li) in labels.iter().enumerate() {
            for (j, w) in g.neighbors(i) {
                if labels[j] == li {
                    total.add(if i == j { 2.0 * w } else { w });
                }
            }
        }
        let two_m = ms.two_m(s);
        if two_m > 0.0 {
            let gamma = ms.gamma(s);
            for c in 0..p.capacity() {
                let k = p.community_strength(s, c);
                if k != 0.0 {
                    total.add(-gamma * k * k / two_m);
                }
            }
        }
    }
    let omega = ms.omega();
    if omega > 0.0 {
        for s in 0..ms.num_slices().saturating_sub(1) {
            for j in 0..n {
                if p.community(j, s) == p.community(j, s + 1) {
                    // C_j,s,s+1 and C_j,s+1,s
                    total.add(2.0 * omega);
                }
            }
        }
    }
    Ok(norm.prefactor(two_mu) * total.value())
}

/// Change in multislice modularity from moving `(node, slice)` into `target`.
///
/// Only the moved supra-node's edges, the two affected communities' strength in
/// its slice, and its copies in the adjacent slices are inspected.
pub fn delta_move(
    ms: &MultisliceNetwork,
    p: &Partition,
    node: usize,
    slice: usize,
    target: usize,
    norm: QualityNormalization,
) -> Result<f64> {
    p.check_matches(ms)?;
    p.check_supra_node(node, slice)?;
    if target >= p.capacity() {
        return Err(Error::validation(format!(
            "community {target} outside 0..{}",
            p.capacity()
        )));
    }
    let two_mu = ms.two_mu();
    if two_mu <= 0.0 {
        return Err(Error::UndefinedQuality("network has no edge or coupling weight".into()));
    }
    let source = p.community(node, slice);
    if source == target {
        return Ok(0.0);
    }

    let labels = p.slice_labels(slice);
    let (mut to_target, mut to_source) = (0.0, 0.0);
    for (i, w) in ms.base().neighbors(node) {
        if i == node {
            continue;
        }
        if labels[i] == target {
            to_target += w;
        } else if labels[i] == source {
            to_source += w;
        }
    }
    let omega = ms.omega();
    let adjacent = [slice.checked_sub(1), Some(slice + 1).filter(|&r| r < ms.num_slices())];
    for r in adjacent.into_iter().flatten() {
        let c = p.community(node, r);
        if c == target {
            to_target += omega;
        } else if c == source {
            to_source += omega;
        }
    }

    let two_m = ms.two_m(slice);
    let null = if two_m > 0.0 {
        let k = ms.intra_strength(node, slice);
        let diff = p.community_strength(slice, target) - p.community_strength(slice, source) + k;
        ms.gamma(slice) * k * diff / two_m
    } else {
        0.0
    };
    Ok(norm.prefactor(two_mu) * 2.0 * (to_target - to_source - null))
}
