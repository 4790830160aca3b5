//! d-separation against independent oracles.
//!
//! The reachability implementation is specified against exhaustive path
//! enumeration: a query is separated iff every skeleton path between the
//! sets is blocked. Blocking itself is re-implemented here literally from
//! the two defining conditions, so the two oracles share no code with the
//! implementation under test.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rankwitness_core::graph::{CausalGraph, SeparationQuery};
use rankwitness_core::model::{random_dag, DiscreteModel};
use rankwitness_core::scalar::Rational;

/// Literal transcription of the blocking conditions: a fork or chain with
/// a conditioned middle vertex, or a collider whose middle vertex and all
/// descendants are unconditioned.
fn blocked_literal(graph: &CausalGraph, path: &[usize], z: &[usize]) -> bool {
    let in_z = |v: usize| z.contains(&v);
    for w in path.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        let fork = graph.has_edge(b, a) && graph.has_edge(b, c);
        let chain = (graph.has_edge(a, b) && graph.has_edge(b, c))
            || (graph.has_edge(c, b) && graph.has_edge(b, a));
        let collider = graph.has_edge(a, b) && graph.has_edge(c, b);
        if (fork || chain) && in_z(b) {
            return true;
        }
        if collider && !in_z(b) && !graph.descendants(b).iter().any(|&d| in_z(d)) {
            return true;
        }
    }
    false
}

fn d_separated_by_enumeration(graph: &CausalGraph, x: usize, y: usize, z: &[usize]) -> bool {
    graph
        .all_simple_paths(x, y)
        .iter()
        .all(|path| blocked_literal(graph, path, z))
}

fn random_query(graph: &CausalGraph, rng: &mut ChaCha8Rng) -> (usize, usize, Vec<usize>) {
    let n = graph.len();
    let x = rng.gen_range(0..n);
    let mut y = rng.gen_range(0..n);
    while y == x {
        y = rng.gen_range(0..n);
    }
    let z: Vec<usize> =
        (0..n).filter(|&v| v != x && v != y && rng.gen_bool(0.4)).collect();
    (x, y, z)
}

fn query_of(graph: &CausalGraph, x: usize, y: usize, z: &[usize]) -> SeparationQuery {
    let name = |i: usize| graph.variable(i).name.clone();
    SeparationQuery {
        x_set: vec![name(x)],
        y_set: vec![name(y)],
        z_set: z.iter().map(|&i| name(i)).collect(),
    }
}

#[test]
fn reachability_matches_path_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd5e9);
    for round in 0..300 {
        let n = rng.gen_range(2..=8);
        let graph = random_dag(n, 3, &mut rng);
        let (x, y, z) = random_query(&graph, &mut rng);
        let fast = graph.d_separated(&query_of(&graph, x, y, z.as_slice())).unwrap();
        let slow = d_separated_by_enumeration(&graph, x, y, &z);
        assert_eq!(fast, slow, "round {round}: graph edges {:?}", graph.edges().collect::<Vec<_>>());
    }
}

#[test]
fn set_queries_match_pairwise_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xbee);
    for _ in 0..100 {
        let n = rng.gen_range(4..=7);
        let graph = random_dag(n, 3, &mut rng);
        let mut indices: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            indices.swap(i, rng.gen_range(0..=i));
        }
        let x_set = &indices[0..2];
        let y_set = &indices[2..4];
        let z_set: Vec<usize> = indices[4..].iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        let name = |i: usize| graph.variable(i).name.clone();
        let query = SeparationQuery {
            x_set: x_set.iter().map(|&i| name(i)).collect(),
            y_set: y_set.iter().map(|&i| name(i)).collect(),
            z_set: z_set.iter().map(|&i| name(i)).collect(),
        };
        let fast = graph.d_separated(&query).unwrap();
        let slow = x_set.iter().all(|&x| {
            y_set.iter().all(|&y| d_separated_by_enumeration(&graph, x, y, &z_set))
        });
        assert_eq!(fast, slow);
    }
}

#[test]
fn path_is_blocked_matches_literal_conditions() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc);
    for _ in 0..150 {
        let n = rng.gen_range(3..=6);
        let graph = random_dag(n, 3, &mut rng);
        let (x, y, z) = random_query(&graph, &mut rng);
        let z_names: Vec<String> =
            z.iter().map(|&i| graph.variable(i).name.clone()).collect();
        for path in graph.all_simple_paths(x, y) {
            if path.len() > 6 {
                continue;
            }
            let names: Vec<&str> =
                path.iter().map(|&i| graph.variable(i).name.as_str()).collect();
            let via_api = graph.path_is_blocked(&names, &z_names).unwrap();
            assert_eq!(via_api, blocked_literal(&graph, &path, &z));
        }
    }
}

#[test]
fn symmetry_of_d_separation() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x515);
    for _ in 0..100 {
        let n = rng.gen_range(2..=7);
        let graph = random_dag(n, 3, &mut rng);
        let (x, y, z) = random_query(&graph, &mut rng);
        let fwd = graph.d_separated(&query_of(&graph, x, y, &z)).unwrap();
        let bwd = graph.d_separated(&query_of(&graph, y, x, &z)).unwrap();
        assert_eq!(fwd, bwd);
    }
}

#[test]
fn unblocked_colliderless_paths_block_via_any_middle_vertex() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x77);
    let mut exercised = 0;
    for _ in 0..200 {
        let n = rng.gen_range(3..=6);
        let graph = random_dag(n, 3, &mut rng);
        let (x, y, z) = random_query(&graph, &mut rng);
        let z_names: Vec<String> =
            z.iter().map(|&i| graph.variable(i).name.clone()).collect();
        for path in graph.all_simple_paths(x, y) {
            if path.len() < 3 || blocked_literal(&graph, &path, &z) {
                continue;
            }
            let has_collider = path.windows(3).any(|w| {
                graph.has_edge(w[0], w[1]) && graph.has_edge(w[2], w[1])
            });
            if has_collider {
                continue;
            }
            let names: Vec<&str> =
                path.iter().map(|&i| graph.variable(i).name.as_str()).collect();
            for &middle in &path[1..path.len() - 1] {
                let mut extended = z_names.clone();
                extended.push(graph.variable(middle).name.clone());
                assert!(graph.path_is_blocked(&names, &extended).unwrap());
                exercised += 1;
            }
        }
    }
    assert!(exercised > 20, "random graphs produced too few open chain/fork paths");
}

/// Smoke-scale soundness: d-separation implies exact conditional
/// independence in the Markov-factorized joint. The full 200-graph suite
/// runs in the acceptance tests.
#[test]
fn d_separation_implies_exact_conditional_independence() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc1);
    let mut separated_seen = 0;
    for _ in 0..60 {
        let n = rng.gen_range(3..=5);
        let graph = random_dag(n, 3, &mut rng);
        let model = DiscreteModel::<Rational>::random(graph, &mut rng);
        let joint = model.joint();
        let graph = model.graph();
        let (x, y, z) = random_query(graph, &mut rng);
        if !graph.d_separated(&query_of(graph, x, y, &z)).unwrap() {
            continue;
        }
        separated_seen += 1;
        let name = |i: usize| graph.variable(i).name.clone();
        let x_name = name(x);
        let y_name = name(y);
        let z_names: Vec<String> = z.iter().map(|&i| name(i)).collect();
        let z_refs: Vec<&str> = z_names.iter().map(String::as_str).collect();
        assert!(
            joint
                .conditionally_independent(&[&x_name], &[&y_name], &z_refs, 0.0)
                .unwrap(),
            "d-separated pair is not exactly independent"
        );
    }
    assert!(separated_seen > 5, "too few separated queries sampled");
}
