//! Patch-similarity graphs of raster images.
//!
//! Every pixel is described by the intensities of the square patch around it.
//! Two pixels are compared by the Euclidean distance between their patches, and
//! each pixel gets a local scale equal to its `tau_rank`-th smallest distance to
//! the other candidate pixels. Each pixel keeps its `knn` closest candidates with
//! weight `exp(-d^2 / (tau_i * tau_j))`, and the result is symmetrized by taking
//! the larger of the two directed proposals.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Local scales below this are clamped; duplicate patches otherwise give `tau = 0`.
pub const TAU_FLOOR: f64 = 1e-8;

/// Row-major raster with channel-interleaved intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    channels: usize,
    pixels: Vec<f64>,
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, channels: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::validation(format!("empty image {width}x{height}")));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::validation(format!(
                "images have 1 or 3 channels, got {channels}"
            )));
        }
        if pixels.len() != width * height * channels {
            return Err(Error::validation(format!(
                "{} samples for a {width}x{height}x{channels} image",
                pixels.len()
            )));
        }
        if let Some(bad) = pixels.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::validation(format!(
                "intensity {bad} outside [0, 1]"
            )));
        }
        Ok(ImageBuffer {
            width,
            height,
            channels,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    /// Samples of the pixel at column `x`, row `y`.
    pub fn at(&self, x: usize, y: usize) -> &[f64] {
        let start = (y * self.width + x) * self.channels;
        &self.pixels[start..start + self.channels]
    }
}

/// Spatial extent of the neighbor candidates of a pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum CandidateWindow {
    /// Pixels within this Chebyshev distance.
    HalfWidth(usize),
    /// Every other pixel.
    All,
}

impl fmt::Display for CandidateWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CandidateWindow::HalfWidth(w) => write!(f, "{w}"),
            CandidateWindow::All => f.write_str("all"),
        }
    }
}

impl From<CandidateWindow> for String {
    fn from(w: CandidateWindow) -> String {
        w.to_string()
    }
}

impl TryFrom<String> for CandidateWindow {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for CandidateWindow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "all" {
            return Ok(CandidateWindow::All);
        }
        s.parse::<usize>()
            .map(CandidateWindow::HalfWidth)
            .map_err(|_| Error::validation(format!("window must be an integer or \"all\", got {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinityConfig {
    pub patch_radius: usize,
    pub tau_rank: usize,
    pub knn: usize,
    pub window: CandidateWindow,
}

impl Default for AffinityConfig {
    fn default() -> Self {
        AffinityConfig {
            patch_radius: 1,
            tau_rank: 30,
            knn: 30,
            window: CandidateWindow::HalfWidth(10),
        }
    }
}

impl AffinityConfig {
    /// Smallest candidate set any pixel of a `width x height` image sees.
    fn min_candidates(&self, width: usize, height: usize) -> usize {
        match self.window {
            CandidateWindow::All => width * height - 1,
            CandidateWindow::HalfWidth(w) => {
                (w.min(width - 1) + 1) * (w.min(height - 1) + 1) - 1
            }
        }
    }

    pub fn validate_for(&self, img: &ImageBuffer) -> Result<()> {
        if self.tau_rank == 0 || self.knn == 0 {
            return Err(Error::validation("tau_rank and knn must be at least 1"));
        }
        let needed = self.tau_rank.max(self.knn);
        let available = self.min_candidates(img.width, img.height);
        if available < needed {
            return Err(Error::validation(format!(
                "a {}x{} image with window {} offers only {available} candidates per pixel, \
                 but tau_rank {} and knn {} need {needed}",
                img.width, img.height, self.window, self.tau_rank, self.knn
            )));
        }
        Ok(())
    }
}

/// Intensities of the `(2r+1) x (2r+1)` patch centred on `pixel` (row-major
/// index), channel-interleaved, with borders extended by edge replication.
pub fn extract_patch(img: &ImageBuffer, pixel: usize, radius: usize) -> Result<Vec<f64>> {
    if pixel >= img.pixel_count() {
        return Err(Error::validation(format!(
            "pixel {pixel} outside a {}-pixel image",
            img.pixel_count()
        )));
    }
    let side = 2 * radius + 1;
    let mut patch = Vec::with_capacity(side * side * img.channels);
    fill_patch(img, pixel, radius, &mut patch);
    Ok(patch)
}

fn fill_patch(img: &ImageBuffer, pixel: usize, radius: usize, out: &mut Vec<f64>) {
    let (x0, y0) = ((pixel % img.width) as isize, (pixel / img.width) as isize);
    let r = radius as isize;
    let clamp = |v: isize, hi: usize| v.clamp(0, hi as isize - 1) as usize;
    for dy in -r..=r {
        let y = clamp(y0 + dy, img.height);
        for dx in -r..=r {
            let x = clamp(x0 + dx, img.width);
            out.extend_from_slice(img.at(x, y));
        }
    }
}

pub fn patch_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::validation(format!(
            "patch lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(squared_distance(a, b).sqrt())
}

#[inline]
fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// The `tau_rank`-th smallest of `distances` (excluding the self-distance),
/// floored at [`TAU_FLOOR`].
pub fn local_scale(distances: &[f64], tau_rank: usize) -> Result<f64> {
    if tau_rank == 0 || distances.len() < tau_rank {
        return Err(Error::validation(format!(
            "rank {tau_rank} needs at least that many distances, got {}",
            distances.len()
        )));
    }
    let mut buf = distances.to_vec();
    let (_, nth, _) = buf.select_nth_unstable_by(tau_rank - 1, f64::total_cmp);
    Ok(nth.max(TAU_FLOOR))
}

/// Weight between two pixels at patch distance `distance` with local scales `tau_i`, `tau_j`.
pub fn kernel_weight(distance: f64, tau_i: f64, tau_j: f64) -> f64 {
    (-(distance * distance) / (tau_i * tau_j)).exp()
}

struct PixelNeighbors {
    tau: f64,
    /// `(candidate, distance)` of the kept nearest candidates.
    nearest: Vec<(usize, f64)>,
}

pub fn build_affinity_graph(img: &ImageBuffer, cfg: &AffinityConfig) -> Result<Graph> {
    cfg.validate_for(img)?;
    let n = img.pixel_count();
    let side = 2 * cfg.patch_radius + 1;
    let dim = side * side * img.channels;
    let mut patches = Vec::with_capacity(n * dim);
    for pixel in 0..n {
        fill_patch(img, pixel, cfg.patch_radius, &mut patches);
    }
    let patch = |i: usize| &patches[i * dim..(i + 1) * dim];

    let per_pixel: Vec<PixelNeighbors> = (0..n)
        .into_par_iter()
        .map_init(Vec::new, |candidates: &mut Vec<(usize, f64)>, i| {
            candidates.clear();
            let pi = patch(i);
            for_each_candidate(img, cfg.window, i, |j| {
                candidates.push((j, squared_distance(pi, patch(j)).sqrt()));
            });
            let by_distance = |a: &(usize, f64), b: &(usize, f64)| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0));
            candidates.select_nth_unstable_by(cfg.tau_rank - 1, by_distance);
            let tau = candidates[cfg.tau_rank - 1].1.max(TAU_FLOOR);
            candidates.select_nth_unstable_by(cfg.knn - 1, by_distance);
            let mut nearest = candidates[..cfg.knn].to_vec();
            nearest.sort_unstable_by(by_distance);
            PixelNeighbors { tau, nearest }
        })
        .collect();

    let mut proposals: Vec<(usize, usize, f64)> = Vec::with_capacity(n * cfg.knn);
    for (i, px) in per_pixel.iter().enumerate() {
        for &(j, d) in &px.nearest {
            let w = kernel_weight(d, px.tau, per_pixel[j].tau);
            proposals.push((i.min(j), i.max(j), w));
        }
    }
    proposals.sort_unstable_by_key(|a| (a.0, a.1));
    let mut edges: Vec<(usize, usize, f64)> = Vec::with_capacity(proposals.len());
    for (u, v, w) in proposals {
        match edges.last_mut() {
            Some(last) if last.0 == u && last.1 == v => last.2 = last.2.max(w),
            _ => edges.push((u, v, w)),
        }
    }
    Graph::from_edges(n, edges)
}

fn for_each_candidate(img: &ImageBuffer, window: CandidateWindow, pixel: usize, mut f: impl FnMut(usize)) {
    match window {
        CandidateWindow::All => {
            for j in (0..img.pixel_count()).filter(|&j| j != pixel) {
                f(j);
            }
        }
        CandidateWindow::HalfWidth(w) => {
            let (x0, y0) = (pixel % img.width, pixel / img.width);
            let ys = y0.saturating_sub(w)..=(y0 + w).min(img.height - 1);
            for y in ys {
                for x in x0.saturating_sub(w)..=(x0 + w).min(img.width - 1) {
                    let j = y * img.width + x;
                    if j != pixel {
                        f(j);
                    }
                }
            }
        }
    }
}
