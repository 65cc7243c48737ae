//! Louvain-style maximization of multislice modularity.
//!
//! Each run alternates two phases until a local-moving phase makes no move:
//!
//! 1. Local moving: vertices are visited in a seeded random order and moved to
//!    the neighbouring community with the largest positive quality gain
//!    (neighbours include the same node's copies in adjacent slices). Sweeps
//!    repeat until a sweep improves quality by less than `min_delta`.
//! 2. Aggregation: every community becomes one vertex of a coarser level. Edge
//!    and coupling weights are summed and per-slice strengths are kept as a
//!    vector, so the coarse level evaluates exactly the same quality.
//!
//! Independent restarts use separate random streams and the best run wins,
//! ties going to the lowest restart index.

mod brute;
mod level;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modularity::{compact_labels, modularity_multislice, Partition, QualityNormalization};
use crate::multislice::MultisliceNetwork;

pub use brute::{brute_force_optimum, BRUTE_FORCE_LIMIT};
use level::Level;

/// A move is accepted only if it raises the (conventional) quality by more than this.
const MOVE_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoveStrategy {
    #[default]
    BestImprovement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerParams {
    pub seed: u64,
    /// Upper bound on move-then-aggregate passes per run.
    pub max_passes: usize,
    /// Local moving stops once a full sweep gains less than this.
    pub min_delta: f64,
    pub restarts: usize,
    pub move_strategy: MoveStrategy,
}

impl Default for OptimizerParams {
    fn default() -> Self {
        OptimizerParams {
            seed: 0,
            max_passes: 100,
            min_delta: 1e-10,
            restarts: 1,
            move_strategy: MoveStrategy::BestImprovement,
        }
    }
}

impl OptimizerParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_passes == 0 {
            return Err(Error::validation("max_passes must be at least 1"));
        }
        if self.min_delta < 0.0 || !self.min_delta.is_finite() {
            return Err(Error::validation(format!(
                "min_delta must be finite and nonnegative, got {}",
                self.min_delta
            )));
        }
        if self.restarts == 0 {
            return Err(Error::validation("restarts must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult {
    /// Compacted partition (ids in order of first appearance, slice-major).
    pub partition: Partition,
    pub quality: f64,
    pub passes_used: usize,
    pub restart_index_of_best: usize,
}

pub fn optimize(
    ms: &MultisliceNetwork,
    params: &OptimizerParams,
    norm: QualityNormalization,
) -> Result<OptimizeResult> {
    params.validate()?;
    if ms.two_mu() <= 0.0 {
        return Err(Error::UndefinedQuality(
            "network has no edge or coupling weight".into(),
        ));
    }
    let runs: Vec<(Vec<usize>, usize)> = (0..params.restarts)
        .into_par_iter()
        .map(|restart| run(ms, params, restart))
        .collect();

    let mut best: Option<OptimizeResult> = None;
    for (restart, (labels, passes_used)) in runs.into_iter().enumerate() {
        let partition = Partition::new(ms, compact_labels(&labels))?;
        let quality = modularity_multislice(ms, &partition, norm)?;
        if best.as_ref().is_none_or(|b| quality > b.quality) {
            best = Some(OptimizeResult {
                partition,
                quality,
                passes_used,
                restart_index_of_best: restart,
            });
        }
    }
    Ok(best.expect("at least one restart"))
}

/// One seeded run; returns supra-node labels and the number of passes.
fn run(ms: &MultisliceNetwork, params: &OptimizerParams, restart: usize) -> (Vec<usize>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(restart as u64);

    let slices = ms.num_slices();
    let null_scale: Vec<f64> = (0..slices)
        .map(|s| {
            let two_m = ms.two_m(s);
            if two_m > 0.0 {
                ms.gamma(s) / two_m
            } else {
                0.0
            }
        })
        .collect();
    let mover = LocalMover {
        null_scale,
        slices,
        // raw gains are half the unnormalized quality change
        gain_to_quality: 2.0 / ms.two_mu(),
        min_delta: params.min_delta,
    };

    let mut membership: Vec<usize> = (0..ms.num_supra_nodes()).collect();
    let mut level = Level::base(ms);
    let mut passes = 0;
    #[cfg(debug_assertions)]
    let mut tracked = level.raw_quality_of_singletons(&mover);
    while passes < params.max_passes {
        passes += 1;
        let outcome = mover.run(&level, &mut rng);
        #[cfg(debug_assertions)]
        {
            tracked += outcome.gain;
        }
        if outcome.moves == 0 {
            break;
        }
        for m in membership.iter_mut() {
            *m = outcome.labels[*m];
        }
        level = level.aggregate(&outcome.labels, outcome.communities, slices);
    }
    #[cfg(debug_assertions)]
    {
        let p = Partition::new(ms, membership.clone()).expect("sizes match");
        let q = modularity_multislice(ms, &p, QualityNormalization::Conventional).unwrap();
        debug_assert!(
            (q - tracked).abs() < 1e-9,
            "accumulated move gains {tracked} disagree with recomputed quality {q}"
        );
    }
    (membership, passes)
}

struct LocalMover {
    /// `gamma_s / 2m_s` per slice.
    null_scale: Vec<f64>,
    slices: usize,
    gain_to_quality: f64,
    min_delta: f64,
}

struct MoveOutcome {
    labels: Vec<usize>,
    communities: usize,
    moves: usize,
    /// Conventional quality gained over the whole phase.
    #[cfg_attr(not(debug_assertions), allow(dead_code))]
    gain: f64,
}

impl LocalMover {
    fn run(&self, level: &Level<'_>, rng: &mut ChaCha8Rng) -> MoveOutcome {
        let n = level.len();
        let slices = self.slices;
        let mut labels: Vec<usize> = (0..n).collect();
        let mut totals = vec![0.0; n * slices];
        for v in 0..n {
            for (s, k) in level.strengths(v) {
                totals[v * slices + s] += k;
            }
        }
        let mut weight_to = vec![0.0; n];
        let mut seen = vec![false; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut order: Vec<usize> = (0..n).collect();
        let mut moves = 0;
        let mut gain = 0.0;

        loop {
            order.shuffle(rng);
            let mut sweep_moves = 0;
            let mut sweep_gain = 0.0;
            for &v in &order {
                let current = labels[v];
                level.for_each_neighbor(v, |u, w| {
                    let c = labels[u];
                    if !seen[c] {
                        seen[c] = true;
                        touched.push(c);
                    }
                    weight_to[c] += w;
                });
                for (s, k) in level.strengths(v) {
                    totals[current * slices + s] -= k;
                }
                let null = |c: usize| -> f64 {
                    level
                        .strengths(v)
                        .map(|(s, k)| self.null_scale[s] * k * totals[c * slices + s])
                        .sum()
                };

                let stay = weight_to[current] - null(current);
                let mut best = usize::MAX;
                let mut best_gain = f64::NEG_INFINITY;
                for &c in &touched {
                    if c == current {
                        continue;
                    }
                    let g = weight_to[c] - null(c);
                    if g > best_gain || (g == best_gain && c < best) {
                        best = c;
                        best_gain = g;
                    }
                }
                let improvement = (best_gain - stay) * self.gain_to_quality;
                let target = if best != usize::MAX && improvement > MOVE_TOLERANCE {
                    debug_assert!(improvement > 0.0);
                    sweep_moves += 1;
                    sweep_gain += improvement;
                    best
                } else {
                    current
                };
                for (s, k) in level.strengths(v) {
                    totals[target * slices + s] += k;
                }
                labels[v] = target;

                for &c in &touched {
                    weight_to[c] = 0.0;
                    seen[c] = false;
                }
                touched.clear();
            }
            moves += sweep_moves;
            gain += sweep_gain;
            if sweep_moves == 0 || sweep_gain < self.min_delta {
                break;
            }
        }

        let labels = compact_labels(&labels);
        let communities = labels.iter().max().map_or(0, |m| m + 1);
        MoveOutcome {
            labels,
            communities,
            moves,
            gain,
        }
    }
}

#[cfg(debug_assertions)]
impl Level<'_> {
    /// Conventional quality of the all-singletons assignment of this level.
    fn raw_quality_of_singletons(&self, mover: &LocalMover) -> f64 {
        let mut total = 0.0;
        for v in 0..self.len() {
            total += self.self_weight(v);
            for (s, k) in self.strengths(v) {
                total -= mover.null_scale[s] * k * k;
            }
        }
        total * mover.gain_to_quality / 2.0
    }
}
