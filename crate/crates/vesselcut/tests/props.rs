//! Property tests for the solver and the vessel geometry.

use proptest::prelude::*;

use vesselcut::cutcost::{pair_cost, CostMode, CostParams};
use vesselcut::flownet::{FlowNetwork, NodeLabel, INF};
use vesselcut::vessel::{VesselError, VesselMask};

#[derive(Debug, Clone)]
struct NetSpec {
    nodes: usize,
    edges: Vec<(usize, usize, u8, u8)>,
    terminals: Vec<(u8, u8)>,
}

fn net_spec(max_nodes: usize) -> impl Strategy<Value = NetSpec> {
    (1..=max_nodes).prop_flat_map(|nodes| {
        let edge = (0..nodes, 0..nodes, any::<u8>(), any::<u8>());
        (
            proptest::collection::vec(edge, 0..=3 * nodes),
            proptest::collection::vec((any::<u8>(), any::<u8>()), nodes),
        )
            .prop_map(move |(edges, terminals)| NetSpec {
                nodes,
                edges,
                terminals,
            })
    })
}

fn build(spec: &NetSpec) -> FlowNetwork {
    let mut net = FlowNetwork::new(spec.nodes);
    for &(u, v, c1, c2) in &spec.edges {
        if u != v {
            net.add_edge(u, v, (c1 % 21) as f64, (c2 % 21) as f64)
                .unwrap();
        }
    }
    for (u, &(s, t)) in spec.terminals.iter().enumerate() {
        net.set_terminal(u, (s % 21) as f64, (t % 21) as f64)
            .unwrap();
    }
    net
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Max-flow equals the exhaustive min cut exactly on integer inputs,
    /// and the induced cut pays exactly the flow.
    #[test]
    fn solver_agrees_with_enumeration(spec in net_spec(10)) {
        let net = build(&spec);
        let solved = net.solve();
        let oracle = net.brute_force_min_cut().unwrap();
        prop_assert_eq!(solved.flow_value(), oracle.flow_value());
        prop_assert_eq!(net.cut_capacity(solved.labels()), solved.flow_value());
    }

    /// Raising one capacity never lowers the max flow.
    #[test]
    fn flow_is_monotone_in_capacity(spec in net_spec(10), bump in 1u8..20, pick in any::<prop::sample::Index>()) {
        let net = build(&spec);
        let before = net.solve().flow_value();
        let mut more = build(&spec);
        if more.edge_count() > 0 {
            let pair = pick.index(more.edge_count());
            let (u, v, c_uv, _) = more.edge(pair);
            // Re-adding is additive, so this raises the forward capacity.
            more.add_edge(u, v, f64::from(bump), 0.0).unwrap();
            prop_assert!(c_uv >= 0.0);
        } else {
            let node = pick.index(more.node_count());
            more.set_terminal(node, f64::from(bump), 0.0).unwrap();
        }
        prop_assert!(more.solve().flow_value() >= before);
    }

    /// Hard seeds always keep their side.
    #[test]
    fn infinite_seeds_hold(spec in net_spec(8), s_pick in any::<prop::sample::Index>(), t_pick in any::<prop::sample::Index>()) {
        let mut net = build(&spec);
        let s = s_pick.index(net.node_count());
        let mut t = t_pick.index(net.node_count());
        if t == s {
            if net.node_count() < 2 {
                return Ok(());
            }
            t = (t + 1) % net.node_count();
        }
        net.set_terminal(s, INF, 0.0).unwrap();
        net.set_terminal(t, 0.0, INF).unwrap();
        let cut = net.solve();
        prop_assert_eq!(cut.label(s), NodeLabel::SourceSide);
        prop_assert_eq!(cut.label(t), NodeLabel::SinkSide);
    }

    /// Pair costs stay within [0, 1] over the whole intensity range; the
    /// exponential form is strictly positive wherever the exponent does
    /// not underflow f64 (always true for sigma >= 5 with 8-bit deltas).
    #[test]
    fn pair_cost_stays_bounded(a in 0.0f64..=255.0, b in 0.0f64..=255.0, sigma in 0.5f64..=120.0) {
        let exp = pair_cost(a, b, &CostParams { sigma, ..CostParams::default() });
        prop_assert!((0.0..=1.0).contains(&exp));
        if sigma >= 5.0 {
            prop_assert!(exp > 0.0);
        }
        let lin = pair_cost(a, b, &CostParams { mode: CostMode::Linear, ..CostParams::default() });
        prop_assert!((0.0..=1.0).contains(&lin));
    }

    /// Seed bands are disjoint, interior-only, and the source band sits
    /// strictly below the sink band whenever bands fit at all.
    #[test]
    fn seed_bands_partition_cleanly(
        cols in 1usize..24,
        rows in 1usize..48,
        fraction in 0.01f64..0.49,
    ) {
        let (w, h) = (cols + 4, rows + 4);
        let mut inside = vec![false; w * h];
        for y in 2..2 + rows {
            for x in 2..2 + cols {
                inside[y * w + x] = true;
            }
        }
        let mask = VesselMask::from_inside(w, h, inside).unwrap();
        match mask.seed_bands(fraction) {
            Ok(bands) => {
                prop_assert!(bands.source_count() > 0 && bands.sink_count() > 0);
                prop_assert!(bands.sink_rows().1 < bands.source_rows().0);
                for y in 0..h {
                    for x in 0..w {
                        let s = bands.is_source(x, y);
                        let t = bands.is_sink(x, y);
                        prop_assert!(!(s && t));
                        if s || t {
                            prop_assert!(mask.is_inside(x, y));
                        }
                    }
                }
            }
            Err(VesselError::BandsOverlap { band, height }) => {
                // Overlap is exactly two bands not fitting in the extent.
                prop_assert_eq!(height, rows);
                prop_assert!(2 * band > rows);
            }
            Err(other) => return Err(TestCaseError::fail(format!("unexpected error {other:?}"))),
        }
    }
}
