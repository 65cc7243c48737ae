//! Per-slice and cross-slice summaries of a multislice partition.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::modularity::Partition;
use crate::pnm::RgbImage;

/// Fixed label-map palette; community `c` is drawn with `PALETTE[c % 24]`.
pub const PALETTE: [[u8; 3]; 24] = [
    [230, 25, 75],
    [60, 180, 75],
    [255, 225, 25],
    [0, 130, 200],
    [245, 130, 48],
    [145, 30, 180],
    [70, 240, 240],
    [240, 50, 230],
    [210, 245, 60],
    [250, 190, 212],
    [0, 128, 128],
    [220, 190, 255],
    [170, 110, 40],
    [255, 250, 200],
    [128, 0, 0],
    [170, 255, 195],
    [128, 128, 0],
    [255, 215, 180],
    [0, 0, 128],
    [128, 128, 128],
    [255, 255, 255],
    [0, 0, 0],
    [100, 149, 237],
    [255, 99, 71],
];

/// Number of nonempty communities in each slice.
pub fn community_counts(p: &Partition) -> Vec<usize> {
    community_sizes(p).iter().map(Vec::len).collect()
}

/// Community sizes in each slice, largest first.
pub fn community_sizes(p: &Partition) -> Vec<Vec<usize>> {
    let mut counts = vec![0usize; p.capacity()];
    (0..p.num_slices())
        .map(|s| {
            for &c in p.slice_labels(s) {
                counts[c] += 1;
            }
            let mut sizes: Vec<usize> = counts.iter().copied().filter(|&k| k > 0).collect();
            counts.iter_mut().for_each(|k| *k = 0);
            sizes.sort_unstable_by(|a, b| b.cmp(a));
            sizes
        })
        .collect()
}

/// Fraction of nodes whose community is the same in slices `s` and `s + 1`,
/// for each adjacent pair.
pub fn adjacent_persistence(p: &Partition) -> Vec<f64> {
    let n = p.num_nodes();
    (0..p.num_slices().saturating_sub(1))
        .map(|s| {
            let same = p
                .slice_labels(s)
                .iter()
                .zip(p.slice_labels(s + 1))
                .filter(|(a, b)| a == b)
                .count();
            same as f64 / n as f64
        })
        .collect()
}

/// Fraction of (node, adjacent slice pair) combinations with an unchanged community.
pub fn persistence(p: &Partition) -> Result<f64> {
    if p.num_slices() < 2 {
        return Err(Error::UndefinedDiagnostic(
            "persistence needs at least two slices".into(),
        ));
    }
    if p.num_nodes() == 0 {
        return Err(Error::UndefinedDiagnostic("partition has no nodes".into()));
    }
    let pairs = adjacent_persistence(p);
    Ok(pairs.iter().sum::<f64>() / pairs.len() as f64)
}

/// Colors slice `slice` of `p` as a `width x height` label map.
pub fn render_label_map(p: &Partition, slice: usize, width: usize, height: usize) -> Result<RgbImage> {
    if width * height != p.num_nodes() {
        return Err(Error::validation(format!(
            "{width}x{height} raster for {} nodes",
            p.num_nodes()
        )));
    }
    if slice >= p.num_slices() {
        return Err(Error::validation(format!(
            "slice {slice} outside 0..{}",
            p.num_slices()
        )));
    }
    let data = p
        .slice_labels(slice)
        .iter()
        .flat_map(|&c| PALETTE[c % PALETTE.len()])
        .collect();
    Ok(RgbImage {
        width,
        height,
        data,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceDiagnostics {
    pub community_counts: Vec<usize>,
    /// Per slice, community sizes in descending order.
    pub community_sizes: Vec<Vec<usize>>,
    /// Per adjacent slice pair `(s, s + 1)`.
    pub persistence_to_next: Vec<f64>,
    /// `None` for single-slice partitions.
    pub global_persistence: Option<f64>,
    pub quality: f64,
}

impl SliceDiagnostics {
    pub fn compute(p: &Partition, quality: f64) -> Self {
        let community_sizes = community_sizes(p);
        SliceDiagnostics {
            community_counts: community_sizes.iter().map(Vec::len).collect(),
            community_sizes,
            persistence_to_next: adjacent_persistence(p),
            global_persistence: persistence(p).ok(),
            quality,
        }
    }

    pub fn largest_sizes(&self) -> Vec<usize> {
        self.community_sizes
            .iter()
            .map(|sizes| sizes.first().copied().unwrap_or(0))
            .collect()
    }

    /// `slice,n_communities,largest_size,persistence_to_next`; the last slice
    /// leaves the persistence column empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("slice,n_communities,largest_size,persistence_to_next\n");
        for (s, (count, largest)) in self
            .community_counts
            .iter()
            .zip(self.largest_sizes())
            .enumerate()
        {
            let next = self
                .persistence_to_next
                .get(s)
                .map(|v| format!("{v:.6}"))
                .unwrap_or_default();
            writeln!(out, "{s},{count},{largest},{next}").unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::multislice::{build_uniform_multislice, linear_gamma_schedule, MultisliceNetwork};

    fn network(n: usize, slices: usize) -> MultisliceNetwork {
        build_uniform_multislice(
            Graph::from_edges(n, []).unwrap(),
            linear_gamma_schedule(1.0, 0.0, slices).unwrap(),
            0.5,
        )
        .unwrap()
    }

    fn partition(slices: &[Vec<usize>]) -> Partition {
        Partition::from_slices(&network(slices[0].len(), slices.len()), slices).unwrap()
    }

    #[test]
    fn counts() {
        assert_eq!(community_counts(&partition(&[vec![0, 0, 1], vec![0, 1, 2]])), vec![2, 3]);
        assert_eq!(community_counts(&partition(&[vec![0; 4], vec![0; 4], vec![0; 4]])), vec![1, 1, 1]);
        assert_eq!(community_counts(&partition(&[vec![0, 1, 2], vec![3, 4, 5]])), vec![3, 3]);
    }

    #[test]
    fn sizes_sum_to_node_count() {
        let p = partition(&[vec![0, 0, 1, 2, 2, 2], vec![5, 1, 1, 1, 0, 5]]);
        for sizes in community_sizes(&p) {
            assert_eq!(sizes.iter().sum::<usize>(), 6);
        }
        assert_eq!(community_sizes(&p)[0], vec![3, 2, 1]);
    }

    #[test]
    fn persistence_values() {
        assert_eq!(persistence(&partition(&[vec![0, 1, 1], vec![0, 1, 1]])).unwrap(), 1.0);
        let p = partition(&[vec![0, 1, 1], vec![0, 1, 0]]);
        assert!((persistence(&p).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let p = partition(&[vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]);
        assert_eq!(persistence(&p).unwrap(), 0.0);
        assert!(matches!(
            persistence(&partition(&[vec![0, 1]])),
            Err(Error::UndefinedDiagnostic(_))
        ));
    }

    #[test]
    fn persistence_ignores_relabeling() {
        let a = partition(&[vec![0, 1, 1, 2], vec![0, 1, 2, 2], vec![1, 1, 2, 0]]);
        let perm = [2, 0, 1];
        let b = partition(&[vec![2, 0, 0, 1], vec![2, 0, 1, 1], vec![0, 0, 1, 2]]);
        assert_eq!(b.labels(), a.labels().iter().map(|&c| perm[c]).collect::<Vec<_>>());
        assert_eq!(persistence(&a).unwrap(), persistence(&b).unwrap());
    }

    #[test]
    fn label_maps() {
        let same = render_label_map(&partition(&[vec![0, 0]]), 0, 2, 1).unwrap();
        assert_eq!(same.pixel(0, 0), PALETTE[0]);
        assert_eq!(same.pixel(1, 0), PALETTE[0]);
        let p = partition(&[vec![0, 1]]);
        let two = render_label_map(&p, 0, 2, 1).unwrap();
        assert_ne!(two.pixel(0, 0), two.pixel(1, 0));
        assert_eq!(two.to_ppm(), render_label_map(&p, 0, 2, 1).unwrap().to_ppm());
        assert!(render_label_map(&p, 0, 3, 1).is_err());
        assert!(render_label_map(&p, 1, 2, 1).is_err());
    }

    #[test]
    fn palette_colors_are_distinct() {
        for (i, a) in PALETTE.iter().enumerate() {
            assert!(!PALETTE[i + 1..].contains(a));
        }
    }

    #[test]
    fn csv_layout() {
        let p = partition(&[vec![0, 0, 1], vec![0, 1, 1]]);
        let d = SliceDiagnostics::compute(&p, 0.25);
        assert_eq!(
            d.to_csv(),
            "slice,n_communities,largest_size,persistence_to_next\n0,2,2,0.666667\n1,2,2,\n"
        );
        assert!((d.global_persistence.unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }
}
