//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::Instant;

use lightforest::algorithms::route_observed;
use lightforest::oracle::{check_heuristic, min_forest_size, OracleBudget};
use lightforest::simulation::{
    gen_mc_nodes, gen_session, run_metric_campaign, run_throughput, CampaignConfig, CampaignRow, MemberSpec,
};
use lightforest::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn n(v: &[u32]) -> Vec<NodeId> {
    v.iter().map(|&i| NodeId(i)).collect()
}

fn session(s: u32, d: &[u32]) -> MulticastSession {
    MulticastSession::new(NodeId(s), n(d)).unwrap()
}

fn nsf_with_mc(mc: &[u32]) -> Network {
    builtin_topology("nsf").unwrap().with_mc_nodes(&n(mc)).unwrap()
}

fn edge_set(net: &Network, s: &LightStructure) -> BTreeSet<(u32, u32)> {
    s.used_edges()
        .iter()
        .map(|e| {
            let (a, b) = net.link(*e).endpoints();
            (a.0.min(b.0), a.0.max(b.0))
        })
        .collect()
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn criterion_1() -> Outcome {
    let net = nsf_with_mc(&[7]);
    let ms = session(7, &[4, 6]);
    let policy = TieBreakPolicy::default();
    let mo = member_only(&net, &ms, &policy).map_err(|e| e.to_string())?;
    let lt = grdp_lt(&net, &ms, &policy).map_err(|e| e.to_string())?;
    ensure!(mo.structure_count() == 2, "member_only gave {} structures", mo.structure_count());
    ensure!(lt.structure_count() == 1, "grdp_lt gave {} structures", lt.structure_count());
    let want = BTreeSet::from([(5, 7), (4, 5), (7, 8), (8, 10), (10, 11), (6, 11)]);
    ensure!(edge_set(&net, &lt.structures[0]) == want, "grdp_lt edges differ");
    let m_mo = evaluate(&net, &mo, &ms).map_err(|e| e.to_string())?;
    let m_lt = evaluate(&net, &lt, &ms).map_err(|e| e.to_string())?;
    ensure!(m_mo.link_stress == 2 && m_lt.link_stress == 1, "stress {} vs {}", m_mo.link_stress, m_lt.link_stress);
    ensure!(m_mo.total_cost == 4.0 && m_lt.total_cost == 6.0, "cost {} vs {}", m_mo.total_cost, m_lt.total_cost);
    ensure!(m_lt.average_delay == 3.0, "grdp_lt delay {}", m_lt.average_delay);
    ensure!(m_lt.diameter == 4, "grdp_lt diameter {}", m_lt.diameter);
    Ok("stress 2/1, cost 4/6, delay 3, diameter 4".into())
}

fn criterion_2() -> Outcome {
    let net = nsf_with_mc(&[1]);
    let ms = session(1, &[2, 3, 4, 5]);
    let connector_of_2 = |policy: &TieBreakPolicy| -> Result<(NodeId, usize, usize), String> {
        let mut found = None;
        let r = route_observed(&net, &ms, Algorithm::GrdpLt, policy, |st, sel| {
            if sel.destination == NodeId(2) {
                let conn = st.structure.visits()[sel.connector.0].node;
                let depth = st.structure.in_structure_distance(sel.connector).unwrap() as usize;
                found = Some((conn, depth));
            }
        })
        .map_err(|e| e.to_string())?;
        let (conn, depth) = found.ok_or("destination 2 never selected")?;
        let k = r.serving(NodeId(2)).ok_or("2 unserved")?;
        let hops = r.structures[k].lightpath(NodeId(2)).map_err(|e| e.to_string())?.len() - 1;
        Ok((conn, depth, hops))
    };
    let (conn, depth, hops) = connector_of_2(&TieBreakPolicy::default())?;
    ensure!(conn == NodeId(1) && depth == 0, "with priority: connector {conn} depth {depth}");
    let off = TieBreakPolicy {
        connector_rule: ConnectorRule::MostRecent,
        ..Default::default()
    };
    let (conn_off, _, hops_off) = connector_of_2(&off)?;
    ensure!(conn_off == NodeId(3), "without priority: connector {conn_off}");
    ensure!(hops + 1 == hops_off, "delay {hops} vs {hops_off} hops");
    Ok(format!("connector 1 at depth 0, {hops} hops vs {hops_off} via 3"))
}

fn criterion_3() -> Outcome {
    let net = nsf_with_mc(&[8]);
    let ms = session(8, &[3, 6, 10, 11, 13, 14]);
    let fourteen_first = TieBreakPolicy::explicit(n(&[10, 14, 13, 6, 3, 11]));
    let counts = |p: &TieBreakPolicy| -> Result<[usize; 3], String> {
        let mut out = [0; 3];
        for (k, a) in Algorithm::ALL.into_iter().enumerate() {
            out[k] = route(&net, &ms, a, p).map_err(|e| e.to_string())?.structure_count();
        }
        Ok(out)
    };
    let a = counts(&fourteen_first)?;
    ensure!(a == [2, 2, 1], "14-before-11 counts {a:?}");
    let lh = grdp_lh(&net, &ms, &fourteen_first).map_err(|e| e.to_string())?;
    let h = &lh.structures[0];
    ensure!(h.visit_count(NodeId(6)) == 2, "node 6 visited {} times", h.visit_count(NodeId(6)));
    let p11 = h.lightpath(NodeId(11)).map_err(|e| e.to_string())?;
    ensure!(p11 == n(&[8, 7, 5, 6, 11]), "lightpath to 11 is {p11:?}");
    let b = counts(&TieBreakPolicy::default())?;
    ensure!(b == [2, 1, 1], "smallest-id counts {b:?}");
    Ok(format!("explicit {a:?}, smallest-id {b:?}"))
}

fn criterion_4() -> Outcome {
    let mut checked = 0;
    for name in ["nsf", "longhaul", "cost239"] {
        let base = builtin_topology(name).map_err(|e| e.to_string())?;
        let all: Vec<NodeId> = base.nodes().collect();
        let net = base.with_mc_nodes(&all).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..500 {
            let m = rng.gen_range(2..=net.node_count());
            let ms = gen_session(&mut rng, &net, m).map_err(|e| e.to_string())?;
            for a in Algorithm::ALL {
                let r = route(&net, &ms, a, &TieBreakPolicy::default()).map_err(|e| e.to_string())?;
                let m = evaluate(&net, &r, &ms).map_err(|e| e.to_string())?;
                ensure!(
                    r.structure_count() == 1 && m.link_stress == 1,
                    "{name} {a} source {} gave {} structures",
                    ms.source(),
                    r.structure_count()
                );
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} routings, all one structure"))
}

/// Connected graph on `nodes` vertices: random spanning tree plus extra links.
fn random_instance(rng: &mut ChaCha8Rng) -> (Network, MulticastSession) {
    let nodes = rng.gen_range(3..=8u32);
    let mut links = BTreeSet::new();
    for v in 2..=nodes {
        let u = rng.gen_range(1..v);
        links.insert((u, v));
    }
    let extra = rng.gen_range(0..=nodes);
    for _ in 0..extra {
        let u = rng.gen_range(1..=nodes);
        let v = rng.gen_range(1..=nodes);
        if u != v && links.len() < 14 {
            links.insert((u.min(v), u.max(v)));
        }
    }
    let mut text = String::new();
    for v in 1..=nodes {
        let cap = if rng.gen_bool(0.3) { "MC" } else { "MI" };
        text.push_str(&format!("node {v} {cap}\n"));
    }
    for (u, v) in &links {
        text.push_str(&format!("edge {u} {v}\n"));
    }
    let net = load_topology(&text).expect("generated topology parses");
    let dests = rng.gen_range(1..=3.min(nodes as usize - 1));
    let ms = gen_session(rng, &net, dests + 1).expect("member count in range");
    (net, ms)
}

fn criterion_5() -> Outcome {
    let budget = OracleBudget {
        max_edges_per_structure: 14,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let policy = TieBreakPolicy::default();
    let mut gaps = 0;
    for i in 0..200 {
        let (net, ms) = random_instance(&mut rng);
        let tree = min_forest_size(&net, &ms, StructureKind::Tree, &budget).map_err(|e| format!("instance {i}: {e}"))?;
        let hier =
            min_forest_size(&net, &ms, StructureKind::Hierarchy, &budget).map_err(|e| format!("instance {i}: {e}"))?;
        ensure!(hier <= tree, "instance {i}: hierarchy optimum {hier} > tree optimum {tree}");
        for a in Algorithm::ALL {
            let report = check_heuristic(&net, &ms, &policy, a, &budget).map_err(|e| format!("instance {i}: {e}"))?;
            ensure!(report.passed(), "instance {i}:\n{}{report}", net.to_topology_text());
            gaps += report.gap();
        }
    }
    Ok(format!("200 instances, total heuristic excess {gaps} structures"))
}

fn row(rows: &[CampaignRow], a: Algorithm, mc: usize) -> &CampaignRow {
    rows.iter().find(|r| r.algorithm == a && r.mc_count == mc).expect("row present")
}

fn criterion_6() -> Outcome {
    let longhaul = builtin_topology("longhaul").unwrap();
    let grid: Vec<usize> = (0..=24).step_by(4).collect();
    let mut cfg = CampaignConfig::new(longhaul.clone());
    cfg.seed = 1;
    cfg.trials = 1000;
    cfg.mc_counts = grid.clone();
    let (mo, lt, lh) = (Algorithm::MemberOnly, Algorithm::GrdpLt, Algorithm::GrdpLh);
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    let mut gaps = Vec::new();

    for m in [7, 14, 21] {
        cfg.members = MemberSpec::Count(m);
        let rows = run_metric_campaign(&cfg).map_err(|e| e.to_string())?;
        let stress = |a, mc| row(&rows, a, mc).metrics.as_ref().unwrap().stress.mean;
        let cost = |a, mc| row(&rows, a, mc).metrics.as_ref().unwrap().cost.mean;
        let mut peak: f64 = 0.0;
        for &mc in &grid {
            let (s_mo, s_lt) = (stress(mo, mc), stress(lt, mc));
            if s_lt >= s_mo {
                failures.push(format!("(a) M={m} mc={mc}: stress LT {s_lt:.4} >= MO {s_mo:.4}"));
            }
            peak = peak.max((s_mo - s_lt) / s_mo);
            if cost(lt, mc) > cost(mo, mc) {
                failures.push(format!("(c) M={m} mc={mc}: cost LT {:.4} > MO {:.4}", cost(lt, mc), cost(mo, mc)));
            }
        }
        if !(0.03..=0.25).contains(&peak) {
            failures.push(format!("(a) M={m}: peak reduction {:.1}% outside 3-25%", 100.0 * peak));
        }
        let gap = stress(lt, 0) - stress(lh, 0);
        if !(0.05..=0.6).contains(&gap) {
            failures.push(format!("(b) M={m}: LH gap {gap:.3} outside 0.05-0.6"));
        }
        gaps.push(gap);
        notes.push(format!("M={m} peak {:.1}% gap {gap:.3}", 100.0 * peak));
    }
    if !gaps.windows(2).all(|w| w[0] < w[1]) {
        failures.push(format!("(b) gaps not increasing in M: {gaps:?}"));
    }

    let rows = run_throughput(&cfg).map_err(|e| e.to_string())?;
    let accepted = |rows: &[CampaignRow], a, mc| row(rows, a, mc).accepted.unwrap().mean;
    let mut peak_gain: f64 = 0.0;
    for &mc in &grid {
        let (a_mo, a_lt, a_lh) = (accepted(&rows, mo, mc), accepted(&rows, lt, mc), accepted(&rows, lh, mc));
        if !(a_lh >= a_lt && a_lt >= a_mo) {
            failures.push(format!("(d) mc={mc}: accepted LH {a_lh} LT {a_lt} MO {a_mo}"));
        }
        peak_gain = peak_gain.max((a_lh - a_lt) / a_lt);
    }
    if peak_gain < 0.05 {
        failures.push(format!("(d) peak LH-LT improvement {:.1}% < 5%", 100.0 * peak_gain));
    }
    notes.push(format!("throughput peak gain {:.1}%", 100.0 * peak_gain));

    let cost239 = builtin_topology("cost239").unwrap();
    let half = (0.5 * cost239.node_count() as f64).round() as usize;
    let mut cfg = CampaignConfig::new(cost239);
    cfg.seed = 1;
    cfg.trials = 1000;
    cfg.mc_counts = vec![half];
    cfg.algorithms = vec![lt, lh];
    let rows = run_throughput(&cfg).map_err(|e| e.to_string())?;
    let (a_lt, a_lh) = (accepted(&rows, lt, half), accepted(&rows, lh, half));
    let rel = (a_lh - a_lt).abs() / a_lt;
    if rel > 0.02 {
        failures.push(format!("(e) cost239 mc={half}: LH {a_lh} vs LT {a_lt}, {:.2}% apart", 100.0 * rel));
    }
    notes.push(format!("cost239 LH {a_lh:.3} LT {a_lt:.3}"));

    if failures.is_empty() {
        Ok(notes.join("; "))
    } else {
        Err(failures.join("; "))
    }
}

fn criterion_7() -> Outcome {
    let nets: Vec<Network> = ["nsf", "cost239"]
        .iter()
        .map(|t| builtin_topology(t).unwrap().with_wavelengths(4).unwrap())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut blocked = 0;
    for seq in 0..10_000 {
        let net = &nets[seq % nets.len()];
        let mc = rng.gen_range(0..=net.node_count());
        let net = gen_mc_nodes(&mut rng, net, mc).map_err(|e| e.to_string())?;
        let mut state = WavelengthState::new(&net);
        let mut live: Vec<(RoutingResult, wavelength::Assignment)> = Vec::new();
        for _ in 0..rng.gen_range(1..=12) {
            if !live.is_empty() && rng.gen_bool(0.3) {
                let (forest, asg) = live.swap_remove(rng.gen_range(0..live.len()));
                state.release_in_place(&asg, &forest).map_err(|e| format!("sequence {seq}: {e}"))?;
                continue;
            }
            let m = rng.gen_range(2..=5);
            let ms = gen_session(&mut rng, &net, m).map_err(|e| e.to_string())?;
            let algo = Algorithm::ALL[rng.gen_range(0..3)];
            let forest = route(&net, &ms, algo, &TieBreakPolicy::default()).map_err(|e| e.to_string())?;
            let before = state.clone();
            let expected = rescan(&state, &forest);
            match state.admit(&forest) {
                Ok(asg) => {
                    ensure!(
                        expected.as_deref() == Some(&asg.indices[..]),
                        "sequence {seq}: assignment {:?}, rescan {expected:?}",
                        asg.indices
                    );
                    live.push((forest, asg));
                }
                Err(_) => {
                    blocked += 1;
                    ensure!(expected.is_none(), "sequence {seq}: blocked but rescan found {expected:?}");
                    ensure!(state == before, "sequence {seq}: blocked call changed the state");
                }
            }
            check_no_duplicates(&net, &state, &live).map_err(|e| format!("sequence {seq}: {e}"))?;
        }
    }
    Ok(format!("10000 sequences, {blocked} blocked admissions"))
}

/// Smallest-index assignment found by testing every index in order.
fn rescan(state: &WavelengthState, forest: &RoutingResult) -> Option<Vec<u32>> {
    let mut taken: Vec<(EdgeId, u32)> = Vec::new();
    let mut out = Vec::new();
    for s in &forest.structures {
        let index = (1..=state.wavelengths()).find(|&w| {
            s.used_edges()
                .iter()
                .all(|e| !state.is_occupied(*e, w) && !taken.contains(&(*e, w)))
        })?;
        taken.extend(s.used_edges().iter().map(|e| (*e, index)));
        out.push(index);
    }
    Some(out)
}

fn check_no_duplicates(
    net: &Network,
    state: &WavelengthState,
    live: &[(RoutingResult, wavelength::Assignment)],
) -> Result<(), String> {
    let mut holders: BTreeSet<(EdgeId, u32)> = BTreeSet::new();
    for (forest, asg) in live {
        for (s, w) in forest.structures.iter().zip(&asg.indices) {
            for e in s.used_edges() {
                if !holders.insert((*e, *w)) {
                    return Err(format!("index {w} held twice on edge {}", e.0));
                }
            }
        }
    }
    for (e, _) in net.edges() {
        for w in state.occupied(e) {
            if !holders.contains(&(e, w)) {
                return Err(format!("stray occupancy {w} on edge {}", e.0));
            }
        }
    }
    Ok(())
}

fn criterion_8() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_lightforest");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let csv = dir.path().join("out.csv");
    let csv = csv.to_str().unwrap();
    let small = dir.path().join("small.topo");
    std::fs::write(&small, "node 1 MC\nnode 2 MI\nnode 3 MI\nnode 4 MI\nnode 5 MI\nedge 1 2\nedge 2 3\nedge 2 4\nedge 2 5\nedge 3 4\n")
        .map_err(|e| e.to_string())?;
    let small = small.to_str().unwrap();
    let invocations: Vec<Vec<&str>> = vec![
        vec!["route", "--topology", "nsf", "--source", "8", "--dest", "3,6,10,11,13,14", "--mc", "8", "--algo", "grdp-lh"],
        vec!["route", "--topology", "longhaul", "--source", "1", "--dest", "5,9,17,26", "--mc", "none", "--algo", "mo"],
        vec!["campaign", "--topology", "nsf", "--members", "5", "--mc", "0..14:7", "--trials", "50", "--seed", "3"],
        vec!["throughput", "--topology", "cost239", "--mc", "0,6", "--trials", "20", "--seed", "9"],
        vec!["campaign", "--topology", "nsf", "--ratio", "0.3", "--mc", "4", "--trials", "30", "--seed", "3", "--jobs", "2", "--out", csv],
        vec!["oracle", "--topology", small, "--source", "1", "--dest", "3,5", "--algos", "mo,lt,lh"],
    ];
    let mut compared = 0;
    for args in &invocations {
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let out = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
            let file = std::fs::read(csv).unwrap_or_default();
            outputs.push((out.status.code(), out.stdout, out.stderr, file));
        }
        ensure!(outputs[0] == outputs[1], "`{}` differs between runs", args.join(" "));
        ensure!(
            matches!(outputs[0].0, Some(0 | 1)),
            "`{}` exited with {:?}: {}",
            args.join(" "),
            outputs[0].0,
            String::from_utf8_lossy(&outputs[0].2)
        );
        compared += 1;
    }
    Ok(format!("{compared} invocations byte-identical"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("example 1 pinning", criterion_1),
        ("example 2 pinning", criterion_2),
        ("example 3 pinning", criterion_3),
        ("full-splitting collapse", criterion_4),
        ("oracle equivalence sweep", criterion_5),
        ("trend reproduction", criterion_6),
        ("first-fit properties", criterion_7),
        ("determinism", criterion_8),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|o| o != k + 1) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({secs:.1}s) {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({secs:.1}s) {why}", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
