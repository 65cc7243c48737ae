//! Exhaustive search over all set partitions of the supra-nodes.
//!
//! Used as a test oracle. The quality of each partition is accumulated from a
//! dense supra-modularity matrix, independently of the optimizer's incremental
//! bookkeeping.

use crate::error::{Error, Result};
use crate::modularity::{modularity_multislice, Partition, QualityNormalization};
use crate::multislice::MultisliceNetwork;

use super::OptimizeResult;

/// Largest supra-node count accepted by [`brute_force_optimum`] (Bell(12) ≈ 4.2M partitions).
pub const BRUTE_FORCE_LIMIT: usize = 12;

pub fn brute_force_optimum(
    ms: &MultisliceNetwork,
    norm: QualityNormalization,
) -> Result<OptimizeResult> {
    let total = ms.num_supra_nodes();
    if total > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            supra_nodes: total,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    if ms.two_mu() <= 0.0 {
        return Err(Error::UndefinedQuality(
            "network has no edge or coupling weight".into(),
        ));
    }

    let n = ms.num_nodes();
    let g = ms.base();
    let mut b = vec![0.0; total * total];
    for u in 0..total {
        let (s, i) = (u / n, u % n);
        for v in 0..total {
            let (r, j) = (v / n, v % n);
            let mut entry = 0.0;
            if s == r {
                let a = if i == j { 2.0 * g.self_loop(i) } else { g.weight(i, j) };
                entry += a - ms.gamma(s) * g.strength(i) * g.strength(j) / ms.two_m(s);
            }
            if i == j {
                entry += ms.coupling(s, r);
            }
            b[u * total + v] = entry;
        }
    }

    let mut search = Search {
        total,
        b: &b,
        labels: vec![0; total],
        best_labels: vec![0; total],
        best: f64::NEG_INFINITY,
        block_sums: vec![0.0; total * total],
    };
    search.descend(0, 0, 0.0);

    let partition = Partition::new(ms, search.best_labels)?;
    let quality = modularity_multislice(ms, &partition, norm)?;
    Ok(OptimizeResult {
        partition,
        quality,
        passes_used: 0,
        restart_index_of_best: 0,
    })
}

struct Search<'a> {
    total: usize,
    b: &'a [f64],
    labels: Vec<usize>,
    best_labels: Vec<usize>,
    best: f64,
    /// Per depth: sum of `b[t][u]` over earlier nodes `u` in each block.
    block_sums: Vec<f64>,
}

impl Search<'_> {
    /// Assigns supra-node `t` given `blocks` blocks already opened by nodes `0..t`
    /// (restricted growth strings enumerate each set partition once).
    fn descend(&mut self, t: usize, blocks: usize, value: f64) {
        if t == self.total {
            if value > self.best {
                self.best = value;
                self.best_labels.copy_from_slice(&self.labels);
            }
            return;
        }
        let total = self.total;
        let row = &self.b[t * total..(t + 1) * total];
        let sums = &mut self.block_sums[t * total..(t + 1) * total];
        sums[..=blocks].fill(0.0);
        for u in 0..t {
            sums[self.labels[u]] += row[u];
        }
        let diag = row[t];
        for c in 0..=blocks {
            let gain = diag + 2.0 * self.block_sums[t * total + c];
            self.labels[t] = c;
            let opened = if c == blocks { blocks + 1 } else { blocks };
            self.descend(t + 1, opened, value + gain);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::multislice::{build_uniform_multislice, GammaSchedule};

    fn ms(text: &str, gammas: Vec<f64>, omega: f64) -> MultisliceNetwork {
        let g = Graph::load_edge_list(text).unwrap();
        build_uniform_multislice(g, GammaSchedule::new(gammas).unwrap(), omega).unwrap()
    }

    const CONV: QualityNormalization = QualityNormalization::Conventional;

    #[test]
    fn bowtie_optimum() {
        let r = brute_force_optimum(&ms("0 1\n1 2\n0 2\n3 4\n4 5\n3 5\n2 3", vec![1.0], 0.0), CONV).unwrap();
        assert!((r.quality - 5.0 / 14.0).abs() < 1e-12);
        assert_eq!(r.partition.labels(), &[0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn triangle_at_high_resolution_splits() {
        let r = brute_force_optimum(&ms("0 1\n1 2\n0 2", vec![3.0], 0.0), CONV).unwrap();
        assert_eq!(r.partition.labels(), &[0, 1, 2]);
        let r = brute_force_optimum(&ms("0 1\n1 2\n0 2", vec![1.0], 0.0), CONV).unwrap();
        assert_eq!(r.partition.labels(), &[0, 0, 0]);
        assert!(r.quality.abs() < 1e-15);
    }

    #[test]
    fn single_edge() {
        let r = brute_force_optimum(&ms("0 1", vec![1.0], 0.0), CONV).unwrap();
        assert_eq!(r.partition.labels(), &[0, 0]);
        assert!(r.quality.abs() < 1e-15);
    }

    #[test]
    fn dominates_sampled_partitions() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let net = ms("0 1 2\n1 2\n2 3 0.5\n3 4\n4 5 1.5\n5 0\n1 4 0.3", vec![0.7, 1.3], 0.4);
        let best = brute_force_optimum(&net, CONV).unwrap();
        for _ in 0..2000 {
            let labels = (0..12).map(|_| rng.gen_range(0..5)).collect();
            let q = modularity_multislice(&net, &Partition::new(&net, labels).unwrap(), CONV).unwrap();
            assert!(q <= best.quality + 1e-12);
        }
    }

    #[test]
    fn refuses_large_instances() {
        let big = ms("0 1\n1 2\n2 3\n3 4\n4 5\n5 6", vec![1.0, 1.0], 0.1);
        assert!(matches!(brute_force_optimum(&big, CONV), Err(Error::TooLarge { .. })));
    }
}
