//! Sparse weighted undirected graphs.
//!
//! Adjacency is stored in compressed sparse row form with each undirected edge
//! present in both endpoint rows. A self-loop of weight `w` appears once in its
//! node's row and contributes `2w` to that node's strength, so that collapsing a
//! community into a single node preserves the total weight `2m`.

use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    strengths: Vec<f64>,
    total_weight_2m: f64,
}

impl Graph {
    /// Builds a graph on `n` nodes from undirected `(u, v, w)` triples.
    ///
    /// Repeated pairs (in either orientation) have their weights summed, and
    /// zero-weight edges are dropped.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut canonical: Vec<(usize, usize, f64)> = Vec::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::validation(format!(
                    "edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::validation(format!(
                    "edge ({u}, {v}) has invalid weight {w}"
                )));
            }
            canonical.push((u.min(v), u.max(v), w));
        }
        canonical.sort_by_key(|a| (a.0, a.1));

        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(canonical.len());
        for (u, v, w) in canonical {
            match merged.last_mut() {
                Some(last) if last.0 == u && last.1 == v => last.2 += w,
                _ => merged.push((u, v, w)),
            }
        }
        merged.retain(|e| e.2 > 0.0);

        let mut degree = vec![0usize; n];
        for &(u, v, _) in &merged {
            degree[u] += 1;
            if u != v {
                degree[v] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let nnz = *offsets.last().unwrap();
        let mut targets = vec![0usize; nnz];
        let mut weights = vec![0.0; nnz];
        let mut cursor = offsets[..n].to_vec();
        for &(u, v, w) in &merged {
            targets[cursor[u]] = v;
            weights[cursor[u]] = w;
            cursor[u] += 1;
            if u != v {
                targets[cursor[v]] = u;
                weights[cursor[v]] = w;
                cursor[v] += 1;
            }
        }
        for i in 0..n {
            let (lo, hi) = (offsets[i], offsets[i + 1]);
            let mut row: Vec<(usize, f64)> = targets[lo..hi]
                .iter()
                .copied()
                .zip(weights[lo..hi].iter().copied())
                .collect();
            row.sort_by_key(|e| e.0);
            for (k, (t, w)) in row.into_iter().enumerate() {
                targets[lo + k] = t;
                weights[lo + k] = w;
            }
        }

        let mut strengths = vec![0.0; n];
        for (i, k) in strengths.iter_mut().enumerate() {
            for idx in offsets[i]..offsets[i + 1] {
                *k += weights[idx];
                if targets[idx] == i {
                    *k += weights[idx];
                }
            }
        }
        let total_weight_2m = strengths.iter().sum();

        Ok(Graph {
            offsets,
            targets,
            weights,
            strengths,
            total_weight_2m,
        })
    }

    /// Parses the whitespace-delimited `u v [w]` edge-list format.
    ///
    /// Blank lines and lines starting with `#` are skipped. The node count is one
    /// more than the largest id that appears.
    pub fn load_edge_list(text: &str) -> Result<Self> {
        Self::read_edge_list(text.as_bytes())
    }

    pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Self> {
        let mut edges = Vec::new();
        let mut max_id: Option<usize> = None;
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.map_err(|e| Error::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
            let Some((u, v, w)) = parse_edge_line(&line, line_no, |tok| {
                tok.parse::<usize>().map_err(|_| format!("invalid node id {tok:?}"))
            })?
            else {
                continue;
            };
            if w < 0.0 {
                return Err(Error::validation(format!(
                    "line {line_no}: negative weight {w}"
                )));
            }
            max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
            edges.push((u, v, w));
        }
        let n = max_id.map_or(0, |m| m + 1);
        Self::from_edges(n, edges)
    }

    /// Writes one `u v w` line per undirected edge with `u <= v`.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for u in 0..self.node_count() {
            for (v, w) in self.neighbors(u) {
                if u <= v {
                    writeln!(out, "{u} {v} {w:?}").unwrap();
                }
            }
        }
        out
    }

    pub fn node_count(&self) -> usize {
        self.strengths.len()
    }

    /// Number of undirected edges, self-loops included.
    pub fn edge_count(&self) -> usize {
        (0..self.node_count())
            .map(|u| self.neighbors(u).filter(|&(v, _)| u <= v).count())
            .sum()
    }

    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    /// Neighbors of `node` in ascending id order, including `node` itself when it
    /// has a self-loop.
    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[node]..self.offsets[node + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        let range = self.offsets[u]..self.offsets[u + 1];
        match self.targets[range.clone()].binary_search(&v) {
            Ok(pos) => self.weights[range.start + pos],
            Err(_) => 0.0,
        }
    }

    pub fn self_loop(&self, node: usize) -> f64 {
        self.weight(node, node)
    }

    pub fn strength(&self, node: usize) -> f64 {
        self.strengths[node]
    }

    pub fn strengths(&self) -> &[f64] {
        &self.strengths
    }

    /// Sum of all strengths, i.e. twice the total edge weight.
    pub fn total_weight_2m(&self) -> f64 {
        self.total_weight_2m
    }

    /// Collapses each community into one node.
    ///
    /// Edges between different communities are summed into a single edge, and
    /// edges inside a community become a self-loop carrying their summed weight,
    /// so strengths of the new nodes equal the summed strengths of their members.
    pub fn aggregate_by_partition(&self, labels: &[usize]) -> Result<Graph> {
        if labels.len() != self.node_count() {
            return Err(Error::validation(format!(
                "{} labels for {} nodes",
                labels.len(),
                self.node_count()
            )));
        }
        let communities = labels.iter().max().map_or(0, |m| m + 1);
        let mut used = vec![false; communities];
        for &a in labels {
            used[a] = true;
        }
        if let Some(gap) = used.iter().position(|&u| !u) {
            return Err(Error::validation(format!(
                "labels are not dense: community {gap} has no members"
            )));
        }
        let mut edges = Vec::with_capacity(self.targets.len() / 2 + 1);
        for (u, &a) in labels.iter().enumerate() {
            for (v, w) in self.neighbors(u) {
                if u <= v {
                    edges.push((a, labels[v], w));
                }
            }
        }
        Graph::from_edges(communities, edges)
    }
}

/// Splits one edge-list line into `(u, v, w)`, returning `None` for blank and
/// comment lines. Node tokens are decoded by `node`.
pub(crate) fn parse_edge_line<T>(
    line: &str,
    line_no: usize,
    mut node: impl FnMut(&str) -> std::result::Result<T, String>,
) -> Result<Option<(T, T, f64)>> {
    let trimmed = line.trim();
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return Ok(None);
    }
    let parse_err = |message: String| Error::Parse {
        line: line_no,
        message,
    };
    let tokens: Vec<&str> = trimmed.split_whitespace().collect();
    if tokens.len() < 2 || tokens.len() > 3 {
        return Err(parse_err(format!(
            "expected \"u v [w]\", found {} fields",
            tokens.len()
        )));
    }
    let u = node(tokens[0]).map_err(parse_err)?;
    let v = node(tokens[1]).map_err(parse_err)?;
    let w = match tokens.get(2) {
        Some(tok) => tok
            .parse::<f64>()
            .ok()
            .filter(|w| w.is_finite())
            .ok_or_else(|| parse_err(format!("invalid weight {tok:?}")))?,
        None => 1.0,
    };
    Ok(Some((u, v, w)))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BOWTIE: &str = "0 1\n1 2\n0 2\n3 4\n4 5\n3 5\n2 3";

    #[test]
    fn triangle_strengths() {
        let g = Graph::load_edge_list("0 1\n1 2\n0 2").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.strengths(), &[2.0, 2.0, 2.0]);
        assert_eq!(g.total_weight_2m(), 6.0);
    }

    #[test]
    fn bowtie_strengths() {
        let g = Graph::load_edge_list(BOWTIE).unwrap();
        assert_eq!(g.strengths(), &[2.0, 2.0, 3.0, 3.0, 2.0, 2.0]);
        assert_eq!(g.total_weight_2m(), 14.0);
        assert_eq!(g.edge_count(), 7);
    }

    #[test]
    fn negative_weight_rejected() {
        let err = Graph::load_edge_list("0 1 -2").unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = Graph::load_edge_list("0 1\n# ok\n1 x\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other}"),
        }
        assert!(Graph::load_edge_list("0 1 2 3").is_err());
        assert!(Graph::load_edge_list("0").is_err());
        assert!(Graph::load_edge_list("0 1 nan").is_err());
    }

    #[test]
    fn comments_duplicates_and_weights() {
        let g = Graph::load_edge_list("# header\n\n0 1 0.5\n1 0 1.5\n1 2 2\n").unwrap();
        assert_eq!(g.weight(0, 1), 2.0);
        assert_eq!(g.weight(1, 0), 2.0);
        assert_eq!(g.strengths(), &[2.0, 4.0, 2.0]);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn self_loop_counts_twice() {
        let g = Graph::load_edge_list("0 0 1.5\n0 1").unwrap();
        assert_eq!(g.self_loop(0), 1.5);
        assert_eq!(g.strength(0), 4.0);
        assert_eq!(g.total_weight_2m(), 5.0);
    }

    #[test]
    fn zero_weight_edges_absent() {
        let g = Graph::load_edge_list("0 1 0\n1 2").unwrap();
        assert_eq!(g.degree(0), 0);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn aggregate_bowtie() {
        let g = Graph::load_edge_list(BOWTIE).unwrap();
        let agg = g.aggregate_by_partition(&[0, 0, 0, 1, 1, 1]).unwrap();
        assert_eq!(agg.node_count(), 2);
        assert_eq!(agg.self_loop(0), 3.0);
        assert_eq!(agg.self_loop(1), 3.0);
        assert_eq!(agg.weight(0, 1), 1.0);
        assert_eq!(agg.total_weight_2m(), 14.0);
        assert_eq!(agg.strengths(), &[7.0, 7.0]);
    }

    #[test]
    fn aggregate_identity_and_full() {
        let g = Graph::load_edge_list(BOWTIE).unwrap();
        let same = g.aggregate_by_partition(&[0, 1, 2, 3, 4, 5]).unwrap();
        assert_eq!(same, g);

        let tri = Graph::load_edge_list("0 1\n1 2\n0 2").unwrap();
        let one = tri.aggregate_by_partition(&[0, 0, 0]).unwrap();
        assert_eq!(one.node_count(), 1);
        assert_eq!(one.self_loop(0), 3.0);
        assert_eq!(one.strength(0), 6.0);
    }

    #[test]
    fn aggregate_rejects_bad_labels() {
        let g = Graph::load_edge_list("0 1").unwrap();
        assert!(g.aggregate_by_partition(&[0]).is_err());
        assert!(g.aggregate_by_partition(&[0, 2]).is_err());
    }

    #[test]
    fn empty_input() {
        let g = Graph::load_edge_list("# nothing\n").unwrap();
        assert_eq!(g.node_count(), 0);
        assert_eq!(g.total_weight_2m(), 0.0);
    }
}
