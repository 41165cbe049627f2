mod common;

use proptest::prelude::*;

use common::{graph_and_partition, path_graph};
use inflap::fixtures::{fig1, grid_one_side, Fig3, HalfLine, HalfPlane};
use inflap::graph::{ball_and_sphere, compute_boundary, connected_components, distance, intrinsic_distance};
use inflap::oracle::truncate;
use inflap::{BoundaryPartition, Error, Graph};

#[test]
fn path_distances() {
    let g = path_graph(4);
    assert_eq!(distance(&g, 1, &[3]).unwrap(), Some(2));
    assert_eq!(distance(&g, 2, &[2, 0]).unwrap(), Some(0));
    assert!(matches!(distance(&g, 1, &[]), Err(Error::Argument(_))));
    let split = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
    assert_eq!(distance(&split, 0, &[3]).unwrap(), None);
}

#[test]
fn fig1_depth_and_boundary() {
    let fx = fig1(4).unwrap();
    let ys: Vec<usize> = (1..=4).map(|i| fx.y_(i)).collect();
    assert_eq!(fx.partition.boundary(), &ys[..]);
    assert_eq!(distance(&fx.graph, 0, &ys).unwrap(), Some(2));
    let computed = compute_boundary(&fx.graph, &[0, 1, 2, 3, 4]).unwrap();
    assert_eq!(computed.boundary(), &ys[..]);
    // Vertices two steps from x are exactly the y's, all valued 1.
    let two: Vec<usize> = fx.graph.ball(0, 2).into_iter().filter(|&(_, d)| d == 2).map(|(v, _)| v).collect();
    assert_eq!(two, ys);
    assert!(two.iter().all(|&v| fx.u.raw()[v] == 1.0));
}

#[test]
fn half_line_ball_and_sphere() {
    let g = path_graph(4);
    let p = BoundaryPartition::new(&g, &[1, 2, 3], &[0]).unwrap();
    assert_eq!(ball_and_sphere(&p, 2).unwrap(), (vec![1, 2], vec![2]));
    assert!(ball_and_sphere(&p, 0).is_err());
}

#[test]
fn grid_spheres_have_five_vertices() {
    let fx = grid_one_side(5, 5).unwrap();
    for r in 1..=4 {
        let (_, s) = ball_and_sphere(&fx.partition, r).unwrap();
        assert_eq!(s.len(), 5, "r = {r}");
    }
}

#[test]
fn compute_boundary_basics() {
    let g = path_graph(3);
    assert_eq!(compute_boundary(&g, &[1]).unwrap().boundary(), &[0, 2]);
    let all = compute_boundary(&g, &[0, 1, 2]).unwrap();
    assert!(all.boundary().is_empty());
    assert!(all.validate(&g).is_err());
}

#[test]
fn components_of_a_path() {
    let g = path_graph(5);
    assert_eq!(connected_components(&g, &[0, 1, 3]), vec![vec![0, 1], vec![3]]);
    assert!(connected_components(&g, &[]).is_empty());
}

#[test]
fn intrinsic_distance_examples() {
    let g = path_graph(4);
    assert_eq!(intrinsic_distance(&g, &[1, 2], 0, 3).unwrap(), Some(3));
    assert_eq!(intrinsic_distance(&g, &[1, 2], 1, 1).unwrap(), Some(0));
    let far = path_graph(6);
    assert!(intrinsic_distance(&far, &[1, 2], 0, 5).is_err());
    // 6-cycle with K = {1, 2, 3, 4}: from 1 to 4 inside K the long way is 3, the short way via 0, 5 is blocked.
    let cycle = Graph::from_edges(6, (0..6).map(|i| (i, (i + 1) % 6))).unwrap();
    assert_eq!(intrinsic_distance(&cycle, &[1, 2, 3, 4], 1, 4).unwrap(), Some(3));
    // With K = {1, 2}, 0 and 3 are in δK and only the path through K counts.
    assert_eq!(intrinsic_distance(&cycle, &[1, 2], 0, 3).unwrap(), Some(3));
    assert_eq!(intrinsic_distance(&cycle, &[1, 4], 1, 4).unwrap(), None);
}

#[test]
fn partition_validation() {
    let g = path_graph(4);
    assert!(BoundaryPartition::new(&g, &[1, 2, 3], &[]).is_err());
    // Boundary vertex 3 not adjacent to U = {1}.
    assert!(BoundaryPartition::new(&g, &[1], &[0, 2, 3]).is_err());
    // Interior vertex 2 adjacent to vertex 3, which is outside the partition.
    assert!(BoundaryPartition::new(&g, &[1, 2], &[0]).is_err());
    assert!(BoundaryPartition::new(&g, &[1, 2], &[0, 3]).is_ok());
}

#[test]
fn graph_rejects_bad_input() {
    assert!(Graph::from_edges(2, [(0, 0)]).is_err());
    assert!(Graph::from_edges(2, [(0, 2)]).is_err());
    assert!(Graph::from_adjacency(vec![vec![1], vec![]]).is_err());
}

#[test]
fn half_line_truncation() {
    let t = truncate(&HalfLine, 3).unwrap();
    assert_eq!(t.graph.vertex_count(), 5);
    assert_eq!(t.graph.edge_count(), 4);
    assert_eq!(t.outer_sphere.len(), 1);
    assert_eq!(t.keys[t.outer_sphere[0]], 4);
    assert_eq!(t.depth[t.outer_sphere[0]], 4);
}

#[test]
fn half_plane_truncation() {
    let o = HalfPlane::new(8).unwrap();
    let t = truncate(&o, 2).unwrap();
    assert_eq!(t.graph.vertex_count(), 8 * 4);
    for (v, key) in t.keys.iter().enumerate() {
        assert_eq!(t.depth[v], key.1);
    }
    assert!(t.outer_sphere.iter().all(|&v| t.keys[v].1 == 3));
    assert_eq!(t.partition.interior().len(), 16);
}

#[test]
fn fig3_truncation() {
    let o = Fig3::new(7).unwrap();
    let t = truncate(&o, 5).unwrap();
    // Root plus depths 1..=6 on each of the 7 rays.
    assert_eq!(t.graph.vertex_count(), 1 + 7 * 6);
    assert_eq!(t.outer_sphere.len(), 7);
    assert_eq!(t.partition.interior().len(), 7 * 5);
}

proptest! {
    #[test]
    fn triangle_inequality(seed in any::<u64>(), n in 3usize..25, triples in prop::collection::vec((0usize..1000, 0usize..1000, 0usize..1000), 100)) {
        let (g, _) = graph_and_partition(seed, n);
        for (a, b, c) in triples {
            let (a, b, c) = (a % n, b % n, c % n);
            let ab = distance(&g, a, &[b]).unwrap().unwrap();
            let bc = distance(&g, b, &[c]).unwrap().unwrap();
            let ac = distance(&g, a, &[c]).unwrap().unwrap();
            prop_assert!(ac <= ab + bc);
        }
    }

    #[test]
    fn spheres_are_ball_differences(seed in any::<u64>(), n in 3usize..25) {
        let (_, p) = graph_and_partition(seed, n);
        let mut prev: Vec<usize> = Vec::new();
        for r in 1..=p.width() {
            let (ball, sphere) = ball_and_sphere(&p, r).unwrap();
            let diff: Vec<usize> = ball.iter().copied().filter(|v| !prev.contains(v)).collect();
            prop_assert_eq!(&diff, &sphere);
            prev = ball;
        }
        prop_assert_eq!(prev.len(), p.interior().len());
    }

    #[test]
    fn intrinsic_with_everything_is_combinatorial(seed in any::<u64>(), n in 3usize..20) {
        let (g, _) = graph_and_partition(seed, n);
        let all: Vec<usize> = (0..n).collect();
        for x in 0..n {
            for y in 0..n {
                prop_assert_eq!(intrinsic_distance(&g, &all, x, y).unwrap(), distance(&g, x, &[y]).unwrap());
            }
        }
    }

    #[test]
    fn components_match_closure(seed in any::<u64>(), mask in prop::collection::vec(any::<bool>(), 10)) {
        let (g, _) = graph_and_partition(seed, 10);
        let set: Vec<usize> = (0..10).filter(|&v| mask[v]).collect();
        // Transitive closure of adjacency restricted to the set.
        let mut reach = vec![vec![false; 10]; 10];
        for &a in &set {
            reach[a][a] = true;
            for &b in g.neighbors(a) {
                if mask[b] {
                    reach[a][b] = true;
                }
            }
        }
        for k in 0..10 {
            for a in 0..10 {
                for b in 0..10 {
                    if reach[a][k] && reach[k][b] {
                        reach[a][b] = true;
                    }
                }
            }
        }
        let comps = connected_components(&g, &set);
        let total: usize = comps.iter().map(Vec::len).sum();
        prop_assert_eq!(total, set.len());
        for comp in &comps {
            for &a in comp {
                for &b in &set {
                    prop_assert_eq!(reach[a][b], comp.contains(&b));
                }
            }
        }
    }

    #[test]
    fn truncations_are_consistent(r in 1usize..6, extra in 1usize..4, period in 3usize..7) {
        let o = HalfPlane::new(period).unwrap();
        let small = truncate(&o, r).unwrap();
        let big = truncate(&o, r + extra).unwrap();
        let keep = |t: &inflap::oracle::Truncation<(usize, usize)>| {
            let mut edges: Vec<((usize, usize), (usize, usize))> = t
                .graph
                .edges()
                .filter(|&(a, b)| t.depth[a] <= r && t.depth[b] <= r)
                .map(|(a, b)| (t.keys[a], t.keys[b]))
                .collect();
            edges.sort();
            let mut keys: Vec<(usize, usize)> = (0..t.keys.len()).filter(|&v| t.depth[v] <= r).map(|v| t.keys[v]).collect();
            keys.sort();
            (keys, edges)
        };
        prop_assert_eq!(keep(&small), keep(&big));
        // Ids of the smaller truncation are a prefix of the larger one.
        prop_assert_eq!(&big.keys[..small.keys.len()], &small.keys[..]);
        prop_assert!(small.outer_sphere.iter().all(|&v| small.depth[v] == r + 1));
    }
}
