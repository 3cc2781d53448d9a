mod support;

use cocoe::graph::WeightedGraph;
use cocoe::measures::{articulation_points, biconnected_components, global_stats, PathMode};
use cocoe::taxonomy::cluster_membership;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::oracles::*;

fn graph(seed: u64, max_n: usize, p: f64, loops: bool) -> WeightedGraph<usize> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_n);
    random_graph(n, p, loops, &mut rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn blocks_match_brute_force(seed in any::<u64>(), p in 0.05f64..0.6) {
        let g = graph(seed, 20, p, true);
        prop_assert_eq!(biconnected_components(&g), brute_blocks(&g));
        prop_assert_eq!(articulation_points(&g), brute_articulation(&g));
    }

    #[test]
    fn expansion_matches_path_enumeration(seed in any::<u64>(), p in 0.1f64..0.7, eps_step in 0u32..16) {
        let g = graph(seed, 10, p, true);
        let eps = eps_step as f64 / 16.0;
        for s in 0..g.node_count() {
            prop_assert_eq!(cluster_membership(&g, s, eps), brute_membership(&g, s, eps), "seed node {}", s);
        }
    }

    #[test]
    fn path_stats_match_floyd(seed in any::<u64>(), p in 0.01f64..0.2) {
        let g = graph(seed, 120, p, false);
        let exact = global_stats(&g, PathMode::Exact);
        let (d, l) = floyd_path_stats(&g);
        prop_assert_eq!(exact.diameter, d);
        prop_assert!((exact.avg_shortest_path - l).abs() < 1e-12);
        let all = global_stats(&g, PathMode::Estimate { sources: g.node_count(), seed });
        prop_assert_eq!(&all, &exact);
        let few = global_stats(&g, PathMode::Estimate { sources: 5, seed });
        prop_assert!(few.diameter <= exact.diameter);
        prop_assert!(few.diameter * 2 >= exact.diameter);
    }
}
