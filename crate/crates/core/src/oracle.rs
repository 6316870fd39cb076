//! Exact minimum light-forest size on tiny instances, by exhaustive search.
//!
//! A structure is tracked as the set of directed links it uses (parent to
//! child). For a node `v` the number of visits is its in-degree (plus one at
//! the root) and an MI node can host a new child while its out-degree is
//! below that. Pairing each new output with any childless visit always
//! yields a valid visit-tree, so the directed link set is a complete state.
//! Every reachable state is enumerated once; the destination sets it touches
//! are then combined by a minimum-cover search.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::algorithms::{route, Algorithm, MulticastSession, RoutingError, RoutingResult, TieBreakPolicy};
use crate::structures::{StructureKind, Violation};
use crate::topology::{Network, NodeId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("instance exceeds the oracle budget: {0}")]
    BudgetExceeded(String),
    #[error(transparent)]
    Routing(#[from] RoutingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_nodes: usize,
    pub max_destinations: usize,
    /// A search that finds a structure this large that could still grow
    /// reports `BudgetExceeded` instead of an inexact answer.
    pub max_edges_per_structure: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_nodes: 8,
            max_destinations: 3,
            max_edges_per_structure: 10,
        }
    }
}

struct Search<'a> {
    network: &'a Network,
    kind: StructureKind,
    root: usize,
    root_splits: bool,
    mc: Vec<bool>,
    /// `(u, v, link)` for both directions of every link.
    arcs: Vec<(usize, usize, usize)>,
    dest_bit: Vec<Option<u32>>,
    limit: usize,
    seen: HashSet<u64>,
    coverable: HashSet<u32>,
    truncated: bool,
}

impl Search<'_> {
    fn run(&mut self) {
        let mut stack = vec![0u64];
        self.seen.insert(0);
        while let Some(state) = stack.pop() {
            let n = self.network.node_count();
            let mut indeg = vec![0u32; n];
            let mut outdeg = vec![0u32; n];
            let mut used_links = 0u64;
            let mut covered = 0u32;
            for (k, &(u, v, link)) in self.arcs.iter().enumerate() {
                if state >> k & 1 == 1 {
                    outdeg[u] += 1;
                    indeg[v] += 1;
                    used_links |= 1 << link;
                }
            }
            for (v, bit) in self.dest_bit.iter().enumerate() {
                if let Some(b) = bit {
                    if indeg[v] > 0 || v == self.root {
                        covered |= 1 << b;
                    }
                }
            }
            self.coverable.insert(covered);

            let edges = state.count_ones() as usize;
            let can_host = |v: usize| -> bool {
                let visits = indeg[v] + u32::from(v == self.root);
                if visits == 0 {
                    return false;
                }
                self.mc[v] || (v == self.root && self.root_splits) || outdeg[v] < visits
            };
            for (k, &(u, v, link)) in self.arcs.iter().enumerate() {
                if used_links >> link & 1 == 1 || !can_host(u) {
                    continue;
                }
                if self.kind == StructureKind::Tree && (indeg[v] > 0 || v == self.root) {
                    continue;
                }
                if edges >= self.limit {
                    self.truncated = true;
                    continue;
                }
                let next = state | 1 << k;
                if self.seen.insert(next) {
                    stack.push(next);
                }
            }
        }
    }
}

/// Smallest number of `kind` structures rooted at the source that together
/// reach every destination, with a split-capable source.
pub fn min_forest_size(
    network: &Network,
    session: &MulticastSession,
    kind: StructureKind,
    budget: &OracleBudget,
) -> Result<usize, OracleError> {
    min_forest_size_with_root(network, session, kind, budget, true)
}

/// As [`min_forest_size`], choosing whether an MI source may split.
pub fn min_forest_size_with_root(
    network: &Network,
    session: &MulticastSession,
    kind: StructureKind,
    budget: &OracleBudget,
    root_splits: bool,
) -> Result<usize, OracleError> {
    session.check(network)?;
    if network.node_count() > budget.max_nodes {
        return Err(OracleError::BudgetExceeded(format!(
            "{} nodes > {}",
            network.node_count(),
            budget.max_nodes
        )));
    }
    let dests: Vec<NodeId> = session.destinations().iter().copied().collect();
    if dests.len() > budget.max_destinations {
        return Err(OracleError::BudgetExceeded(format!(
            "{} destinations > {}",
            dests.len(),
            budget.max_destinations
        )));
    }
    if network.edge_count() > 32 {
        return Err(OracleError::BudgetExceeded(format!("{} links > 32", network.edge_count())));
    }
    let reach = network
        .full_view()
        .shortest_paths(session.source())
        .map_err(|_| RoutingError::UnknownNode(session.source()))?;
    if let Some(d) = dests.iter().find(|d| !reach.distance(**d).is_finite()) {
        return Err(RoutingError::Infeasible(*d).into());
    }

    let ids: Vec<NodeId> = network.nodes().collect();
    let index = |id: NodeId| ids.iter().position(|x| *x == id).expect("member of network");
    let mut dest_bit = vec![None; ids.len()];
    for (b, d) in dests.iter().enumerate() {
        dest_bit[index(*d)] = Some(b as u32);
    }
    let mut arcs = Vec::with_capacity(2 * network.edge_count());
    for (e, link) in network.edges() {
        let (a, b) = link.endpoints();
        arcs.push((index(a), index(b), e.0));
        arcs.push((index(b), index(a), e.0));
    }
    let mut search = Search {
        network,
        kind,
        root: index(session.source()),
        root_splits,
        mc: ids.iter().map(|n| network.is_mc(*n)).collect(),
        arcs,
        dest_bit,
        limit: budget.max_edges_per_structure,
        seen: HashSet::new(),
        coverable: HashSet::new(),
        truncated: false,
    };
    search.run();
    if search.truncated {
        return Err(OracleError::BudgetExceeded(format!(
            "a structure needs more than {} links",
            budget.max_edges_per_structure
        )));
    }

    // Breadth-first over covered-destination masks.
    let full = (1u32 << dests.len()) - 1;
    let sets: Vec<u32> = search.coverable.into_iter().filter(|m| *m != 0).collect();
    let mut frontier: BTreeSet<u32> = BTreeSet::from([0]);
    let mut reached: HashSet<u32> = HashSet::from([0]);
    for k in 0..=dests.len() {
        if frontier.contains(&full) {
            return Ok(k);
        }
        let mut next = BTreeSet::new();
        for m in &frontier {
            for s in &sets {
                let u = m | s;
                if reached.insert(u) {
                    next.insert(u);
                }
            }
        }
        frontier = next;
    }
    unreachable!("each reachable destination is coverable by a single path")
}

/// Outcome of checking one heuristic run against the oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicReport {
    pub algorithm: Algorithm,
    pub heuristic_count: usize,
    pub optimum: usize,
    pub violations: Vec<(usize, Violation)>,
    pub uncovered: Vec<NodeId>,
    pub forest: RoutingResult,
}

impl HeuristicReport {
    pub fn passed(&self) -> bool {
        self.heuristic_count >= self.optimum && self.violations.is_empty() && self.uncovered.is_empty()
    }

    /// Structures beyond the optimum.
    pub fn gap(&self) -> usize {
        self.heuristic_count.saturating_sub(self.optimum)
    }
}

impl fmt::Display for HeuristicReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {} structures, optimum {} ({})",
            self.algorithm,
            self.heuristic_count,
            self.optimum,
            if self.passed() { "pass" } else { "FAIL" }
        )?;
        for (k, v) in &self.violations {
            writeln!(f, "  structure {k}: {v}")?;
        }
        for d in &self.uncovered {
            writeln!(f, "  destination {d} not served")?;
        }
        if !self.passed() {
            for (k, s) in self.forest.structures.iter().enumerate() {
                writeln!(f, "  structure {k}:")?;
                for line in s.to_string().lines() {
                    writeln!(f, "    {line}")?;
                }
            }
        }
        Ok(())
    }
}

/// Runs `algorithm` and compares it with the oracle optimum of its kind.
pub fn check_heuristic(
    network: &Network,
    session: &MulticastSession,
    policy: &TieBreakPolicy,
    algorithm: Algorithm,
    budget: &OracleBudget,
) -> Result<HeuristicReport, OracleError> {
    let optimum = min_forest_size_with_root(
        network,
        session,
        algorithm.kind(),
        budget,
        !policy.mi_source_single_output,
    )?;
    let forest = route(network, session, algorithm, policy)?;
    let mut violations = Vec::new();
    for (k, s) in forest.structures.iter().enumerate() {
        if s.kind() != algorithm.kind() {
            violations.push((k, Violation::KindMismatch));
        }
        violations.extend(s.validate(network, session.source()).into_iter().map(|v| (k, v)));
    }
    let uncovered = session
        .destinations()
        .iter()
        .filter(|d| forest.serving(**d).is_none())
        .copied()
        .collect();
    Ok(HeuristicReport {
        algorithm,
        heuristic_count: forest.structure_count(),
        optimum,
        violations,
        uncovered,
        forest,
    })
}
