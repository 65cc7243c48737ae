//! Coarsening levels of the supra-graph.
//!
//! A level is a weighted graph whose vertices are groups of supra-nodes. Each
//! vertex carries a per-slice strength vector so the slice-specific null model
//! `gamma_s k k' / 2m_s` stays exact after communities spanning several slices are
//! collapsed. Intraslice edges and interslice couplings are both positive weights
//! at this point and are stored together.

use crate::multislice::MultisliceNetwork;

enum Adjacency<'a> {
    /// Level 0: neighbors are read from the shared base graph.
    Base(&'a MultisliceNetwork),
    Explicit {
        offsets: Vec<usize>,
        targets: Vec<usize>,
        weights: Vec<f64>,
    },
}

pub(crate) struct Level<'a> {
    adjacency: Adjacency<'a>,
    /// Diagonal entry of the ordered-pair weight sum for each vertex.
    self_weight: Vec<f64>,
    strength_offsets: Vec<usize>,
    strength_slices: Vec<usize>,
    strength_values: Vec<f64>,
}

impl<'a> Level<'a> {
    pub(crate) fn base(ms: &'a MultisliceNetwork) -> Self {
        let n = ms.num_nodes();
        let total = ms.num_supra_nodes();
        let mut self_weight = Vec::with_capacity(total);
        let mut strength_slices = Vec::with_capacity(total);
        let mut strength_values = Vec::with_capacity(total);
        for s in 0..ms.num_slices() {
            for j in 0..n {
                self_weight.push(2.0 * ms.base().self_loop(j));
                strength_slices.push(s);
                strength_values.push(ms.intra_strength(j, s));
            }
        }
        Level {
            adjacency: Adjacency::Base(ms),
            self_weight,
            strength_offsets: (0..=total).collect(),
            strength_slices,
            strength_values,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.self_weight.len()
    }

    pub(crate) fn self_weight(&self, v: usize) -> f64 {
        self.self_weight[v]
    }

    /// Calls `f(u, w)` for every neighbor `u != v`.
    #[inline]
    pub(crate) fn for_each_neighbor(&self, v: usize, mut f: impl FnMut(usize, f64)) {
        match &self.adjacency {
            Adjacency::Base(ms) => {
                let n = ms.num_nodes();
                let (s, j) = (v / n, v % n);
                let offset = s * n;
                for (i, w) in ms.base().neighbors(j) {
                    if i != j {
                        f(offset + i, w);
                    }
                }
                let omega = ms.omega();
                if omega > 0.0 {
                    if s > 0 {
                        f(v - n, omega);
                    }
                    if s + 1 < ms.num_slices() {
                        f(v + n, omega);
                    }
                }
            }
            Adjacency::Explicit {
                offsets,
                targets,
                weights,
            } => {
                for idx in offsets[v]..offsets[v + 1] {
                    f(targets[idx], weights[idx]);
                }
            }
        }
    }

    /// `(slice, strength)` pairs of vertex `v`.
    #[inline]
    pub(crate) fn strengths(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.strength_offsets[v]..self.strength_offsets[v + 1];
        self.strength_slices[range.clone()]
            .iter()
            .copied()
            .zip(self.strength_values[range].iter().copied())
    }

    /// Collapses every community of `labels` (dense in `0..communities`) into one
    /// vertex of a new level.
    pub(crate) fn aggregate(
        &self,
        labels: &[usize],
        communities: usize,
        num_slices: usize,
    ) -> Level<'static> {
        // bucket members by community
        let mut member_offsets = vec![0usize; communities + 1];
        for &c in labels {
            member_offsets[c + 1] += 1;
        }
        for c in 0..communities {
            member_offsets[c + 1] += member_offsets[c];
        }
        let mut cursor = member_offsets.clone();
        let mut members = vec![0usize; labels.len()];
        for (v, &c) in labels.iter().enumerate() {
            members[cursor[c]] = v;
            cursor[c] += 1;
        }

        let mut offsets = Vec::with_capacity(communities + 1);
        offsets.push(0);
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        let mut self_weight = vec![0.0; communities];
        let mut strength_offsets = Vec::with_capacity(communities + 1);
        strength_offsets.push(0);
        let mut strength_slices = Vec::new();
        let mut strength_values = Vec::new();

        let mut acc = vec![0.0; communities];
        let mut seen = vec![false; communities];
        let mut touched: Vec<usize> = Vec::new();
        let mut slice_acc = vec![0.0; num_slices];
        let mut slice_seen = vec![false; num_slices];

        for c in 0..communities {
            for &v in &members[member_offsets[c]..member_offsets[c + 1]] {
                self_weight[c] += self.self_weight[v];
                self.for_each_neighbor(v, |u, w| {
                    let d = labels[u];
                    if d == c {
                        self_weight[c] += w;
                    } else {
                        if !seen[d] {
                            seen[d] = true;
                            touched.push(d);
                        }
                        acc[d] += w;
                    }
                });
                for (s, k) in self.strengths(v) {
                    slice_seen[s] = true;
                    slice_acc[s] += k;
                }
            }
            touched.sort_unstable();
            for &d in &touched {
                targets.push(d);
                weights.push(acc[d]);
                acc[d] = 0.0;
                seen[d] = false;
            }
            touched.clear();
            offsets.push(targets.len());

            for s in 0..num_slices {
                if slice_seen[s] {
                    strength_slices.push(s);
                    strength_values.push(slice_acc[s]);
                    slice_acc[s] = 0.0;
                    slice_seen[s] = false;
                }
            }
            strength_offsets.push(strength_slices.len());
        }

        Level {
            adjacency: Adjacency::Explicit {
                offsets,
                targets,
                weights,
            },
            self_weight,
            strength_offsets,
            strength_slices,
            strength_values,
        }
    }

    /// Unnormalized quality (`2 mu * Q`, conventional) of `labels` on this level.
    #[cfg(test)]
    pub(crate) fn raw_quality(&self, labels: &[usize], ms: &MultisliceNetwork) -> f64 {
        let slices = ms.num_slices();
        let capacity = labels.iter().max().map_or(0, |m| m + 1);
        let mut totals = vec![0.0; capacity * slices];
        let mut total = 0.0;
        for v in 0..self.len() {
            total += self.self_weight[v];
            self.for_each_neighbor(v, |u, w| {
                if labels[u] == labels[v] {
                    total += w;
                }
            });
            for (s, k) in self.strengths(v) {
                totals[labels[v] * slices + s] += k;
            }
        }
        for c in 0..capacity {
            for s in 0..slices {
                let k = totals[c * slices + s];
                total -= ms.gamma(s) * k * k / ms.two_m(s);
            }
        }
        total
    }
}
