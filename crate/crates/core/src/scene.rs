//! Synthetic four-region test scene: a sky band over a grass band with two
//! elliptical blobs standing on the grass.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::affinity::ImageBuffer;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Sky,
    Grass,
    LeftBlob,
    RightBlob,
}

pub struct Scene {
    pub image: ImageBuffer,
    /// Ground-truth region of every pixel, row-major.
    pub regions: Vec<Region>,
}

const SKY: [f64; 3] = [0.55, 0.75, 0.95];
const GRASS: [f64; 3] = [0.25, 0.55, 0.20];
const LEFT_BLOB: [f64; 3] = [0.35, 0.22, 0.12];
const RIGHT_BLOB: [f64; 3] = [0.92, 0.90, 0.86];

fn in_ellipse(x: f64, y: f64, cx: f64, cy: f64, rx: f64, ry: f64) -> bool {
    let (dx, dy) = ((x - cx) / rx, (y - cy) / ry);
    dx * dx + dy * dy <= 1.0
}

/// Renders the scene at `width x height` with seeded uniform noise of amplitude
/// `noise` (doubled on the grass).
pub fn four_region_scene(width: usize, height: usize, noise: f64, seed: u64) -> Scene {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (width as f64, height as f64);
    let mut pixels = Vec::with_capacity(width * height * 3);
    let mut regions = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            let (fx, fy) = (x as f64 + 0.5, y as f64 + 0.5);
            let region = if in_ellipse(fx, fy, 0.28 * w, 0.58 * h, 0.16 * w, 0.2 * h) {
                Region::LeftBlob
            } else if in_ellipse(fx, fy, 0.72 * w, 0.62 * h, 0.14 * w, 0.18 * h) {
                Region::RightBlob
            } else if fy < 0.35 * h {
                Region::Sky
            } else {
                Region::Grass
            };
            let (base, amplitude) = match region {
                Region::Sky => (SKY, noise),
                Region::Grass => (GRASS, 2.0 * noise),
                Region::LeftBlob => (LEFT_BLOB, noise),
                Region::RightBlob => (RIGHT_BLOB, noise),
            };
            for c in base {
                let jitter = if amplitude > 0.0 {
                    rng.gen_range(-amplitude..=amplitude)
                } else {
                    0.0
                };
                pixels.push((c + jitter).clamp(0.0, 1.0));
            }
            regions.push(region);
        }
    }
    Scene {
        image: ImageBuffer::new(width, height, 3, pixels).expect("valid dimensions"),
        regions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_regions_present() {
        let scene = four_region_scene(80, 50, 0.03, 1);
        for r in [Region::Sky, Region::Grass, Region::LeftBlob, Region::RightBlob] {
            assert!(scene.regions.iter().filter(|&&q| q == r).count() > 200, "{r:?}");
        }
        assert_eq!(scene.image.pixel_count(), 4000);
    }

    #[test]
    fn seeded() {
        assert_eq!(
            four_region_scene(20, 10, 0.05, 3).image,
            four_region_scene(20, 10, 0.05, 3).image
        );
    }
}
