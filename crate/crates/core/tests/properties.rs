use proptest::prelude::*;
use tightcycle::connect::{connectable_pairs, RobustFamily};
use tightcycle::constructions::random_hypergraph;
use tightcycle::hgraph::validate_tight;
use tightcycle::io::{parse_g2, parse_h3, parse_seq, write_g2, write_h3, write_seq};
use tightcycle::oracle::{count_paths, count_walks};
use tightcycle::{Graph, Hypergraph3};

fn instance() -> impl Strategy<Value = Hypergraph3> {
    (4usize..14, 0.2f64..1.0, any::<u64>()).prop_map(|(n, p, seed)| random_hypergraph(n, p, seed))
}

fn graph() -> impl Strategy<Value = Graph> {
    (3usize..10, any::<u64>()).prop_map(|(n, bits)| {
        let mut g = Graph::full_vertex_set(n);
        let mut b = bits;
        for u in 0..n {
            for v in u + 1..n {
                if b & 1 == 1 {
                    g.add_edge(u, v);
                }
                b = b.rotate_right(1) ^ 0x9E37_79B9_7F4A_7C15u64.rotate_left(u as u32);
            }
        }
        g
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn degree_sum_is_thrice_the_edge_count(h in instance()) {
        let total: usize = (0..h.n()).map(|v| h.degree(v)).sum();
        prop_assert_eq!(total, 3 * h.edge_count());
    }

    #[test]
    fn link_graph_size_equals_vertex_degree(h in instance()) {
        for v in 0..h.n() {
            prop_assert_eq!(h.link_graph(v).edge_count(), h.degree(v));
        }
    }

    #[test]
    fn tight_validation_agrees_with_direct_window_scan(
        h in instance(),
        raw in proptest::collection::vec(0usize..14, 3..10),
    ) {
        let seq: Vec<usize> = raw.into_iter().filter(|&v| v < h.n()).collect();
        prop_assume!(seq.len() >= 3);
        let mut distinct = seq.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let windows_ok =
            seq.windows(3).all(|w| h.has_edge(w[0], w[1], w[2]));
        let expect_path = distinct.len() == seq.len() && windows_ok;
        prop_assert_eq!(validate_tight(&h, &seq, false).is_ok(), expect_path);

        let wrap_ok = windows_ok
            && seq.len() >= 4
            && (0..seq.len()).all(|i| {
                h.has_edge(seq[i], seq[(i + 1) % seq.len()], seq[(i + 2) % seq.len()])
            });
        let expect_cycle = distinct.len() == seq.len() && wrap_ok;
        prop_assert_eq!(validate_tight(&h, &seq, true).is_ok(), expect_cycle);
    }

    #[test]
    fn walks_dominate_paths(g in graph(), len in 1usize..5) {
        let n = g.ambient_n();
        for x in 0..n {
            for y in 0..n {
                if x == y {
                    continue;
                }
                let w = count_walks(&g, x, y, len);
                let p = count_paths(&g, x, y, len).unwrap();
                prop_assert!(w >= p.into(), "x={x} y={y} len={len}: {w} walks < {p} paths");
            }
        }
    }

    #[test]
    fn connectable_pairs_shrink_as_zeta_grows(h in instance()) {
        let fam = RobustFamily::build(&h, 0.2);
        let loose = connectable_pairs(&fam, 0.1);
        let tight = connectable_pairs(&fam, 0.5);
        prop_assert!(tight.iter().all(|p| loose.contains(p)));
    }

    #[test]
    fn h3_serialization_round_trips(h in instance()) {
        let parsed = parse_h3(&write_h3(&h)).unwrap();
        prop_assert_eq!(parsed.n(), h.n());
        prop_assert_eq!(parsed.edges(), h.edges());
    }

    #[test]
    fn g2_serialization_round_trips(g in graph()) {
        let parsed = parse_g2(&write_g2(&g)).unwrap();
        prop_assert_eq!(parsed.ambient_n(), g.ambient_n());
        prop_assert_eq!(parsed.edge_count(), g.edge_count());
        for (u, v) in g.edges() {
            prop_assert!(parsed.has_edge(u, v));
        }
    }

    #[test]
    fn seq_serialization_round_trips(seq in proptest::collection::vec(0usize..1000, 1..40)) {
        prop_assert_eq!(parse_seq(&write_seq(&seq)).unwrap(), seq);
    }
}
