use circnet::metrics::{all_sources, bfs_distances, bisection_exact, bisection_heuristic, diameter_mpl, CirculantBfs, Profile};
use circnet::routing::{circulant_routes, routes_for};
use circnet::topology::{parse_spec, JumpSet, Topology};
use circnet::traffic::{evaluate, pattern_all_to_all, pattern_random_pairs};
use num_integer::Integer;
use proptest::prelude::*;

/// A jump set drawn from `[1, n/2]` for some `n` in `4..=max_n`.
fn jump_set(max_n: usize) -> impl Strategy<Value = JumpSet> {
    (4..=max_n)
        .prop_flat_map(|n| (Just(n), proptest::collection::btree_set(1..=n / 2, 1..=(n / 2).min(5))))
        .prop_map(|(n, s)| JumpSet::new(n, s).unwrap())
}

/// Random simple graph on `n` vertices, edges as a bit per pair.
fn graph(max_n: usize) -> impl Strategy<Value = Topology> {
    (2..=max_n)
        .prop_flat_map(|n| (Just(n), proptest::collection::vec(any::<bool>(), n * (n - 1) / 2)))
        .prop_map(|(n, bits)| {
            let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
            let edges: Vec<_> = pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e).collect();
            Topology::from_edges(n, edges).unwrap()
        })
}

fn floyd_warshall(t: &Topology) -> Vec<Vec<u32>> {
    let n = t.n();
    let inf = u32::MAX / 2;
    let mut d = vec![vec![inf; n]; n];
    for u in 0..n {
        d[u][u] = 0;
        for &v in t.neighbors(u) {
            d[u][v as usize] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
            }
        }
    }
    d
}

fn connected(t: &Topology) -> bool {
    bfs_distances(t, 0).is_ok()
}

fn distance_multiset(t: &Topology) -> Vec<u32> {
    let mut d = bfs_distances(t, 0).unwrap();
    d.sort_unstable();
    d
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn circulants_are_regular(js in jump_set(64)) {
        let t = Topology::circulant(&js);
        let half = js.jumps().iter().filter(|&&s| 2 * s == js.n()).count();
        prop_assert_eq!(js.degree(), 2 * js.jumps().len() - half);
        prop_assert!((0..t.n()).all(|v| t.neighbors(v).len() == js.degree()));
    }

    #[test]
    fn gcd_test_matches_bfs(js in jump_set(64)) {
        let g = js.jumps().iter().fold(js.n(), |g, &s| g.gcd(&s));
        prop_assert_eq!(js.is_connected(), g == 1);
        prop_assert_eq!(js.is_connected(), connected(&Topology::circulant(&js)));
    }

    #[test]
    fn multiplier_images_share_distances(js in jump_set(48), u in 1usize..48) {
        let n = js.n();
        prop_assume!(u < n && u.gcd(&n) == 1);
        let image = js.adam_multiply(u).unwrap();
        prop_assume!(js.is_connected());
        let a = Topology::circulant(&js);
        let b = Topology::circulant(&image);
        prop_assert_eq!(distance_multiset(&a), distance_multiset(&b));
        prop_assert_eq!(js.adam_canonical(), image.adam_canonical());
    }

    #[test]
    fn product_degrees_add(a in jump_set(12), b in jump_set(12)) {
        let p = Topology::cartesian_product(&Topology::circulant(&a), &Topology::circulant(&b));
        prop_assert_eq!(p.n(), a.n() * b.n());
        prop_assert_eq!(p.degree(), Some(a.degree() + b.degree()));
        prop_assert_eq!(p.edge_count(), a.n() * b.n() * (a.degree() + b.degree()) / 2);
    }

    #[test]
    fn bfs_matches_floyd_warshall(t in graph(14)) {
        let fw = floyd_warshall(&t);
        for s in 0..t.n() {
            match bfs_distances(&t, s) {
                Ok(d) => prop_assert!(d.iter().zip(&fw[s]).all(|(a, b)| a == b)),
                Err(_) => prop_assert!(fw[s].iter().any(|&x| x >= u32::MAX / 2)),
            }
        }
    }

    #[test]
    fn fast_path_equals_all_sources(js in jump_set(64)) {
        prop_assume!(js.is_connected());
        let t = Topology::circulant(&js);
        prop_assert_eq!(diameter_mpl(&t).unwrap(), all_sources(&t).unwrap());
        let stats = all_sources(&t).unwrap();
        let profile = CirculantBfs::new(js.n()).profile_jumps(&js);
        prop_assert_eq!(profile, Profile::Connected { diameter: stats.diameter, dist_sum: stats.total / js.n() as u64 });
    }

    #[test]
    fn adding_an_edge_never_lengthens_paths(t in graph(12), u in 0usize..12, v in 0usize..12) {
        prop_assume!(connected(&t));
        let n = t.n();
        let (u, v) = (u % n, v % n);
        prop_assume!(u != v && !t.has_edge(u, v));
        let mut edges: Vec<_> = t.edges().collect();
        edges.push((u.min(v), u.max(v)));
        let bigger = Topology::from_edges(n, edges).unwrap();
        let (a, b) = (all_sources(&t).unwrap(), all_sources(&bigger).unwrap());
        prop_assert!(b.total < a.total);
        prop_assert!(b.mpl() < a.mpl());
        prop_assert!(b.diameter <= a.diameter);
    }

    #[test]
    fn heuristic_never_beats_exact(t in graph(14), seed in any::<u64>()) {
        prop_assume!(t.n() % 2 == 0);
        let exact = bisection_exact(&t, 32).unwrap();
        let heur = bisection_heuristic(&t, 4, seed).unwrap();
        prop_assert!(heur.width >= exact.width);
        prop_assert_eq!(2 * heur.part.iter().filter(|&&x| x).count(), t.n());
    }

    #[test]
    fn circulant_routes_are_shortest_and_shift_covariant(js in jump_set(40)) {
        prop_assume!(js.is_connected());
        let t = Topology::circulant(&js);
        let table = circulant_routes(&t).unwrap();
        let n = t.n();
        for s in 0..n {
            let dist = bfs_distances(&t, s).unwrap();
            for d in 0..n {
                let p = table.path(s, d);
                prop_assert_eq!(p.len() - 1, dist[d] as usize);
                let shifted: Vec<usize> = table.path(0, (d + n - s) % n).iter().map(|v| (v + s) % n).collect();
                prop_assert_eq!(p, shifted);
            }
        }
    }

    #[test]
    fn traffic_conserves_load(js in jump_set(40), pairs in 1usize..200, seed in any::<u64>()) {
        prop_assume!(js.is_connected());
        let t = Topology::circulant(&js);
        let table = routes_for(&t).unwrap();
        let p = pattern_random_pairs(t.n(), pairs, seed).unwrap();
        let r = evaluate(&t, &table, &p).unwrap();
        let hops: u64 = p.flows.iter().map(|f| table.hops(f.src, f.dst) as u64).sum();
        prop_assert_eq!(r.total_load(), hops);
        prop_assert_eq!(r.total_demand, pairs as u64);
    }

    #[test]
    fn specs_round_trip(js in jump_set(64), dims in proptest::collection::vec(3usize..7, 1..4)) {
        let spec = format!("circulant:{}:{}", js.n(), js);
        let t = parse_spec(&spec).unwrap();
        prop_assert_eq!(t.spec(), Some(spec));
        let torus = format!("torus:{}", dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","));
        let t = parse_spec(&torus).unwrap();
        prop_assert_eq!(parse_spec(&t.spec().unwrap()).unwrap(), t);
    }
}

#[test]
fn all_to_all_loads_are_shift_invariant() {
    let js = JumpSet::new(32, [1, 7]).unwrap();
    let t = Topology::circulant(&js);
    let r = evaluate(&t, &circulant_routes(&t).unwrap(), &pattern_all_to_all(32)).unwrap();
    for &j in js.jumps() {
        for step in [j, 32 - j] {
            let first = r.load(0, step).unwrap();
            assert!((0..32).all(|i| r.load(i, (i + step) % 32) == Some(first)), "jump {step}");
        }
    }
}

#[test]
fn circulant_congests_less_than_torus() {
    let c = Topology::circulant(&JumpSet::new(32, [1, 7]).unwrap());
    let t = Topology::torus(&[8, 4]).unwrap();
    let p = pattern_all_to_all(32);
    let rc = evaluate(&c, &routes_for(&c).unwrap(), &p).unwrap();
    let rt = evaluate(&t, &routes_for(&t).unwrap(), &p).unwrap();
    assert!(rc.max_load < rt.max_load, "{} vs {}", rc.max_load, rt.max_load);
    assert_eq!(rc.total_demand, rt.total_demand);
}

#[test]
fn products_of_symmetric_factors_use_one_source() {
    let t = parse_spec("product:circulant:16:1,8*complete:4").unwrap();
    assert!(t.is_vertex_symmetric());
    assert_eq!(diameter_mpl(&t).unwrap(), all_sources(&t).unwrap());
    let h = Topology::hypercube(6).unwrap();
    assert_eq!(diameter_mpl(&h).unwrap(), all_sources(&h).unwrap());
}
