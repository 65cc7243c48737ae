use proptest::prelude::*;
use slicemod::graph::Graph;
use slicemod::louvain::{optimize, OptimizerParams};
use slicemod::modularity::{modularity_multislice, QualityNormalization};
use slicemod::multislice::{build_uniform_multislice, GammaSchedule};

fn edges(max_n: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize, f64)>)> {
    (2..max_n).prop_flat_map(|n| {
        let edge = (0..n, 0..n, 0.1f64..5.0);
        (Just(n), prop::collection::vec(edge, 1..3 * n))
    })
}

proptest! {
    #[test]
    fn edge_list_round_trip((n, e) in edges(15)) {
        let g = Graph::from_edges(n, e).unwrap();
        let back = Graph::load_edge_list(&g.to_edge_list()).unwrap();
        prop_assert_eq!(back.edge_count(), g.edge_count());
        for i in 0..back.node_count() {
            for (j, w) in back.neighbors(i) {
                prop_assert!((g.weight(i, j) - w).abs() <= 1e-12 * w.max(1.0));
            }
        }
    }

    #[test]
    fn strengths_match_adjacency((n, e) in edges(15)) {
        let g = Graph::from_edges(n, e).unwrap();
        let mut total = 0.0;
        for i in 0..n {
            let k: f64 = g.neighbors(i).map(|(j, w)| if j == i { 2.0 * w } else { w }).sum();
            prop_assert!((k - g.strength(i)).abs() < 1e-9);
            total += k;
        }
        prop_assert!((total - g.total_weight_2m()).abs() < 1e-9);
    }

    #[test]
    fn reported_quality_is_recomputable(
        (n, e) in edges(25),
        gammas in prop::collection::vec(0.0f64..2.0, 1..4),
        omega in 0.0f64..2.0,
        seed in any::<u64>(),
    ) {
        let g = Graph::from_edges(n, e).unwrap();
        prop_assume!(g.total_weight_2m() > 0.0);
        let ms = build_uniform_multislice(g, GammaSchedule::new(gammas).unwrap(), omega).unwrap();
        let norm = QualityNormalization::Conventional;
        let params = OptimizerParams { seed, ..OptimizerParams::default() };
        let r = optimize(&ms, &params, norm).unwrap();
        let q = modularity_multislice(&ms, &r.partition, norm).unwrap();
        prop_assert!((q - r.quality).abs() < 1e-9);
        prop_assert!(q <= 1.0 + 1e-12);
    }
}
