//! Command-line pipeline: `detect` on edge lists, `segment` on images, and
//! `rerun` from a previously written manifest.
//!
//! Every run writes `assignments.csv` (`node,slice,community`), `diagnostics.csv`
//! and `manifest.json` into the output directory; `segment` also writes one
//! label map `slice_<s>.ppm` per slice. Slices and communities are 0-based.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::affinity::{build_affinity_graph, AffinityConfig, CandidateWindow};
use crate::diagnostics::{render_label_map, SliceDiagnostics};
use crate::error::{Error, Result};
use crate::graph::{parse_edge_line, Graph};
use crate::louvain::{optimize, OptimizeResult, OptimizerParams};
use crate::modularity::QualityNormalization;
use crate::multislice::{build_uniform_multislice, linear_gamma_schedule};
use crate::pnm::{read_image, write_ppm};

pub const DEFAULT_GAMMA_START: f64 = 0.01;
pub const DEFAULT_GAMMA_STEP: f64 = 0.04;
pub const DEFAULT_GAMMA_COUNT: usize = 6;
pub const DEFAULT_OMEGA: f64 = 0.3;

#[derive(Debug, Parser)]
#[command(name = "slicemod", version, about = "Multislice modularity community detection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Detect communities in an edge-list network.
    Detect {
        input: PathBuf,
        /// Treat node tokens as arbitrary names instead of 0-based integers.
        #[arg(long)]
        named_nodes: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Segment a PGM/PPM/CSV image.
    Segment {
        input: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        affinity: AffinityArgs,
    },
    /// Repeat the run recorded in a manifest.json.
    Rerun {
        manifest: PathBuf,
        /// Write outputs here instead of the recorded directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long, default_value_t = DEFAULT_GAMMA_START)]
    pub gamma_start: f64,
    #[arg(long, default_value_t = DEFAULT_GAMMA_STEP)]
    pub gamma_step: f64,
    #[arg(long, default_value_t = DEFAULT_GAMMA_COUNT)]
    pub gamma_count: usize,
    #[arg(long, default_value_t = DEFAULT_OMEGA)]
    pub omega: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub restarts: usize,
    #[arg(long, default_value = "conventional", value_parser = parse_norm)]
    pub norm: QualityNormalization,
    #[arg(long, default_value_t = 100)]
    pub max_passes: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub min_delta: f64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AffinityArgs {
    #[arg(long, default_value_t = 1)]
    pub patch_radius: usize,
    #[arg(long, default_value_t = 30)]
    pub tau_rank: usize,
    #[arg(long, default_value_t = 30)]
    pub knn: usize,
    /// Half-width of the candidate search window, or "all".
    #[arg(long, default_value = "10", value_parser = parse_window)]
    pub window: CandidateWindow,
}

fn parse_norm(s: &str) -> std::result::Result<QualityNormalization, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_window(s: &str) -> std::result::Result<CandidateWindow, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Detect,
    Segment,
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub input: PathBuf,
    pub gamma_start: f64,
    pub gamma_step: f64,
    pub gamma_count: usize,
    pub omega: f64,
    pub norm: QualityNormalization,
    pub optimizer: OptimizerParams,
    #[serde(default)]
    pub named_nodes: bool,
    pub affinity: AffinityConfig,
    pub out: PathBuf,
}

impl RunConfig {
    /// Defaults for `mode` on `input`, matching the command-line defaults.
    pub fn new(mode: Mode, input: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        RunConfig {
            mode,
            input: input.into(),
            gamma_start: DEFAULT_GAMMA_START,
            gamma_step: DEFAULT_GAMMA_STEP,
            gamma_count: DEFAULT_GAMMA_COUNT,
            omega: DEFAULT_OMEGA,
            norm: QualityNormalization::Conventional,
            optimizer: OptimizerParams::default(),
            named_nodes: false,
            affinity: AffinityConfig::default(),
            out: out.into(),
        }
    }

    fn from_common(mode: Mode, input: PathBuf, common: CommonArgs) -> Self {
        RunConfig {
            gamma_start: common.gamma_start,
            gamma_step: common.gamma_step,
            gamma_count: common.gamma_count,
            omega: common.omega,
            norm: common.norm,
            optimizer: OptimizerParams {
                seed: common.seed,
                max_passes: common.max_passes,
                min_delta: common.min_delta,
                restarts: common.restarts,
                ..OptimizerParams::default()
            },
            ..RunConfig::new(mode, input, common.out)
        }
    }

    pub fn from_cli(command: CliCommand) -> Result<Self> {
        Ok(match command {
            CliCommand::Detect {
                input,
                named_nodes,
                common,
            } => RunConfig {
                named_nodes,
                ..RunConfig::from_common(Mode::Detect, input, common)
            },
            CliCommand::Segment {
                input,
                common,
                affinity,
            } => RunConfig {
                affinity: AffinityConfig {
                    patch_radius: affinity.patch_radius,
                    tau_rank: affinity.tau_rank,
                    knn: affinity.knn,
                    window: affinity.window,
                },
                ..RunConfig::from_common(Mode::Segment, input, common)
            },
            CliCommand::Rerun { manifest, out } => {
                let mut cfg = load_manifest(&manifest)?.config;
                if let Some(out) = out {
                    cfg.out = out;
                }
                cfg
            }
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub config: RunConfig,
    pub gammas: Vec<f64>,
    pub nodes: usize,
    pub edges: usize,
    pub quality: f64,
    pub passes_used: usize,
    pub restart_index_of_best: usize,
    pub community_counts: Vec<usize>,
}

pub fn load_manifest(path: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::validation(format!("{}: {e}", path.display())))
}

pub struct RunOutput {
    pub result: OptimizeResult,
    pub diagnostics: SliceDiagnostics,
    pub files: Vec<PathBuf>,
}

pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    match cfg.mode {
        Mode::Detect => cmd_detect(cfg),
        Mode::Segment => cmd_segment(cfg),
    }
}

pub fn cmd_detect(cfg: &RunConfig) -> Result<RunOutput> {
    let text = fs::read_to_string(&cfg.input).map_err(|e| Error::io(&cfg.input, e))?;
    let (graph, names) = if cfg.named_nodes {
        let (g, names) = load_named_edge_list(&text)?;
        (g, Some(names))
    } else {
        (Graph::load_edge_list(&text)?, None)
    };
    execute(cfg, graph, names.as_deref(), None)
}

pub fn cmd_segment(cfg: &RunConfig) -> Result<RunOutput> {
    let img = read_image(&cfg.input)?;
    let graph = build_affinity_graph(&img, &cfg.affinity)?;
    execute(cfg, graph, None, Some((img.width(), img.height())))
}

fn execute(
    cfg: &RunConfig,
    graph: Graph,
    names: Option<&[String]>,
    raster: Option<(usize, usize)>,
) -> Result<RunOutput> {
    let gammas = linear_gamma_schedule(cfg.gamma_start, cfg.gamma_step, cfg.gamma_count)?;
    let nodes = graph.node_count();
    let edges = graph.edge_count();
    let ms = build_uniform_multislice(graph, gammas, cfg.omega)?;
    let result = optimize(&ms, &cfg.optimizer, cfg.norm)?;
    let diagnostics = SliceDiagnostics::compute(&result.partition, result.quality);

    fs::create_dir_all(&cfg.out).map_err(|e| Error::io(&cfg.out, e))?;
    let mut files = Vec::new();
    let mut write = |name: &str, bytes: &[u8]| -> Result<()> {
        let path = cfg.out.join(name);
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        files.push(path);
        Ok(())
    };

    let mut assignments = String::from("node,slice,community\n");
    for s in 0..ms.num_slices() {
        for (j, c) in result.partition.slice_labels(s).iter().enumerate() {
            match names {
                Some(names) => writeln!(assignments, "{},{s},{c}", names[j]).unwrap(),
                None => writeln!(assignments, "{j},{s},{c}").unwrap(),
            }
        }
    }
    write("assignments.csv", assignments.as_bytes())?;
    write("diagnostics.csv", diagnostics.to_csv().as_bytes())?;

    let manifest = Manifest {
        config: cfg.clone(),
        gammas: ms.gammas().values().to_vec(),
        nodes,
        edges,
        quality: result.quality,
        passes_used: result.passes_used,
        restart_index_of_best: result.restart_index_of_best,
        community_counts: diagnostics.community_counts.clone(),
    };
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    write("manifest.json", json.as_bytes())?;

    if let Some((width, height)) = raster {
        for s in 0..ms.num_slices() {
            let map = render_label_map(&result.partition, s, width, height)?;
            let path = cfg.out.join(format!("slice_{s}.ppm"));
            write_ppm(&path, &map)?;
            files.push(path);
        }
    }

    Ok(RunOutput {
        result,
        diagnostics,
        files,
    })
}

/// Edge list whose node tokens are arbitrary names; ids follow first appearance.
pub fn load_named_edge_list(text: &str) -> Result<(Graph, Vec<String>)> {
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut names: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let parsed = parse_edge_line(line, idx + 1, |tok| {
            Ok(*ids.entry(tok.to_string()).or_insert_with(|| {
                names.push(tok.to_string());
                names.len() - 1
            }))
        })?;
        if let Some((u, v, w)) = parsed {
            if w < 0.0 {
                return Err(Error::validation(format!(
                    "line {}: negative weight {w}",
                    idx + 1
                )));
            }
            edges.push((u, v, w));
        }
    }
    let graph = Graph::from_edges(names.len(), edges)?;
    Ok((graph, names))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_nodes_follow_first_appearance() {
        let (g, names) = load_named_edge_list("# people\nalice bob\nbob carol 2\ncarol alice\n").unwrap();
        assert_eq!(names, vec!["alice", "bob", "carol"]);
        assert_eq!(g.weight(1, 2), 2.0);
        assert_eq!(g.total_weight_2m(), 8.0);
        assert!(load_named_edge_list("a b -1").is_err());
    }

    #[test]
    fn defaults_follow_reference_experiment() {
        let cli = Cli::parse_from(["slicemod", "segment", "cow.ppm"]);
        let cfg = RunConfig::from_cli(cli.command).unwrap();
        assert_eq!(cfg.mode, Mode::Segment);
        assert_eq!(cfg.omega, 0.3);
        assert_eq!(cfg.gamma_count, 6);
        assert_eq!(cfg.affinity, AffinityConfig::default());
        assert_eq!(cfg.norm, QualityNormalization::Conventional);
    }

    #[test]
    fn flags_are_parsed() {
        let cli = Cli::parse_from([
            "slicemod", "segment", "x.pgm", "--window", "all", "--knn", "3", "--tau-rank", "2",
            "--norm", "paper", "--restarts", "4", "--seed", "9", "--out", "dir",
        ]);
        let cfg = RunConfig::from_cli(cli.command).unwrap();
        assert_eq!(cfg.affinity.window, CandidateWindow::All);
        assert_eq!(cfg.affinity.knn, 3);
        assert_eq!(cfg.affinity.tau_rank, 2);
        assert_eq!(cfg.norm, QualityNormalization::Paper);
        assert_eq!(cfg.optimizer.restarts, 4);
        assert_eq!(cfg.optimizer.seed, 9);
        assert_eq!(cfg.out, PathBuf::from("dir"));
        assert!(Cli::try_parse_from(["slicemod", "segment", "x", "--window", "wide"]).is_err());
        assert!(Cli::try_parse_from(["slicemod", "detect", "x", "--norm", "other"]).is_err());
    }

    #[test]
    fn manifest_round_trips_config() {
        let cfg = RunConfig::new(Mode::Detect, "net.txt", "out");
        let json = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
        assert!(json.contains("\"window\":\"10\""));
    }
}
