use lightforest::algorithms::route_observed;
use lightforest::simulation::{gen_mc_nodes, gen_session};
use lightforest::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(topology: &str, seed: u64) -> (Network, MulticastSession) {
    let base = builtin_topology(topology).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mc = rng.gen_range(0..=base.node_count());
    let net = gen_mc_nodes(&mut rng, &base, mc).unwrap();
    let m = rng.gen_range(2..=base.node_count());
    let ms = gen_session(&mut rng, &net, m).unwrap();
    (net, ms)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grdp_paths_are_shortest_in_the_renewed_view(
        topology in prop::sample::select(vec!["nsf", "longhaul", "cost239"]),
        seed in any::<u64>(),
        lh in any::<bool>(),
    ) {
        let (net, ms) = instance(topology, seed);
        let algo = if lh { Algorithm::GrdpLh } else { Algorithm::GrdpLt };
        let mut problems = Vec::new();
        route_observed(&net, &ms, algo, &TieBreakPolicy::default(), |st, sel| {
            if sel.cost == 0.0 {
                return;
            }
            let from = st.structure.visits()[sel.connector.0].node;
            if sel.path.first() != Some(&from) || sel.path.last() != Some(&sel.destination) {
                problems.push(format!("path {:?} does not join {from} to {}", sel.path, sel.destination));
            }
            let mut cost = 0.0;
            for w in sel.path.windows(2) {
                match net.edge_between(w[0], w[1]) {
                    Some(e) if st.view.is_edge_usable(e) => cost += net.link(e).cost(),
                    _ => problems.push(format!("edge {}-{} not in the view", w[0], w[1])),
                }
            }
            if (cost - sel.cost).abs() > 1e-9 {
                problems.push(format!("path cost {cost} != selection cost {}", sel.cost));
            }
            for &c in &st.connectors {
                let node = st.structure.visits()[c.0].node;
                let Ok(sp) = st.view.shortest_paths(node) else { continue };
                for d in &st.pending {
                    if sp.distance(*d) < sel.cost - 1e-9 {
                        problems.push(format!("{node}->{d} costs {} < chosen {}", sp.distance(*d), sel.cost));
                    }
                }
            }
        })
        .unwrap();
        prop_assert!(problems.is_empty(), "{problems:?}");
    }

    #[test]
    fn every_destination_is_served_exactly_once(
        topology in prop::sample::select(vec!["nsf", "longhaul", "cost239"]),
        seed in any::<u64>(),
    ) {
        let (net, ms) = instance(topology, seed);
        for algo in Algorithm::ALL {
            let r = route(&net, &ms, algo, &TieBreakPolicy::default()).unwrap();
            for d in ms.destinations() {
                let serving = r.structures.iter().filter(|s| s.served().contains_key(d)).count();
                prop_assert_eq!(serving, 1, "{} serves {} {} times", algo, d, serving);
            }
            for s in &r.structures {
                prop_assert_eq!(s.kind(), algo.kind());
                prop_assert!(s.validate(&net, ms.source()).is_empty());
            }
        }
    }

    #[test]
    fn renewal_never_costs_structures(
        topology in prop::sample::select(vec!["nsf", "longhaul", "cost239"]),
        seed in any::<u64>(),
    ) {
        let (net, ms) = instance(topology, seed);
        let p = TieBreakPolicy::default();
        let lt = grdp_lt(&net, &ms, &p).unwrap().structure_count();
        let lh = grdp_lh(&net, &ms, &p).unwrap().structure_count();
        let mc_nodes = net.nodes().filter(|v| net.is_mc(*v)).count();
        prop_assert!(lh <= ms.destinations().len());
        prop_assert!(lt <= ms.destinations().len());
        if mc_nodes == net.node_count() {
            prop_assert_eq!((lt, lh), (1, 1));
        }
    }
}
