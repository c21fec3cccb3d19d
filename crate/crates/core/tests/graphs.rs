mod common;

use common::{bfs, dijkstra, random_connected_graph};
use contagion_maps::{
    contagion_matrix, floyd_warshall, run_realization, seed_set, ContagionConfig, NeighbourhoodGraph,
    ShortestPathConfig,
};

#[test]
fn zero_threshold_contagion_is_breadth_first_search() {
    for seed in 0..40 {
        let n = 5 + (seed as usize * 7) % 60;
        let g = random_connected_graph(n, n / 2, false, seed);
        let cfg = ContagionConfig::new(0.0).unwrap();
        let x = contagion_matrix(&g, &cfg).unwrap();
        for j in 0..n {
            let expect = bfs(&g, &seed_set(&g, j).unwrap());
            let got: Vec<Option<u32>> = x.realization(j).iter().map(|&t| Some(t)).collect();
            assert_eq!(got, expect, "graph {seed}, seed node {j}");
        }
    }
}

#[test]
fn activation_times_grow_with_threshold() {
    let g = random_connected_graph(80, 120, false, 9);
    let seeds = seed_set(&g, 3).unwrap();
    let mut prev = run_realization(&g, &ContagionConfig::new(0.0).unwrap(), &seeds).unwrap();
    for k in 1..=10 {
        let cur = run_realization(&g, &ContagionConfig::new(k as f64 / 10.0).unwrap(), &seeds).unwrap();
        assert!(prev.iter().zip(&cur).all(|(a, b)| a <= b));
        prev = cur;
    }
}

#[test]
fn seed_entries_are_exactly_the_zeros() {
    let g = random_connected_graph(40, 30, false, 4);
    let x = contagion_matrix(&g, &ContagionConfig::new(0.25).unwrap()).unwrap();
    for j in 0..40 {
        let seeds = seed_set(&g, j).unwrap();
        for i in 0..40 {
            assert_eq!(x.time(j, i) == 0, seeds.contains(&i));
        }
    }
}

#[test]
fn weighted_floyd_warshall_matches_dijkstra() {
    for seed in 0..20 {
        let g = random_connected_graph(30, 40, true, 100 + seed);
        let d = floyd_warshall(&g, &ShortestPathConfig::weighted()).unwrap();
        for s in 0..30 {
            for (t, want) in dijkstra(&g, s).into_iter().enumerate() {
                assert!((d.get(s, t) - want).abs() <= 1e-12 * want.max(1.0));
            }
        }
    }
}

#[test]
fn hop_floyd_warshall_matches_bfs() {
    let g = random_connected_graph(300, 200, false, 77);
    let d = floyd_warshall(&g, &ShortestPathConfig::hops()).unwrap();
    for s in (0..300).step_by(13) {
        for (t, h) in bfs(&g, &[s]).into_iter().enumerate() {
            assert_eq!(d.get(s, t), f64::from(h.unwrap()));
        }
    }
}

#[test]
fn path_weights_add_up() {
    let g = NeighbourhoodGraph::from_edge_list(3, [(0, 1, Some(1.0)), (1, 2, Some(2.0))]).unwrap();
    let d = floyd_warshall(&g, &ShortestPathConfig::weighted()).unwrap();
    assert_eq!(d.get(0, 2), 3.0);
}
