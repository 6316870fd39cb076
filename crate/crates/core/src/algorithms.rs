//! Light-forest construction: Member-Only, GRDP-LT and GRDP-LH.
//!
//! All three grow one structure at a time from the source, repeatedly
//! attaching the nearest pending destination to a connector of the current
//! structure. They differ in how a candidate path is found:
//!
//! * Member-Only takes the shortest path in the original graph and accepts it
//!   only if it avoids every exhausted MI node.
//! * GRDP-LT searches a renewed graph from which used links and non-leaf MI
//!   nodes have been deleted, so every path it finds is usable.
//! * GRDP-LH deletes only used links, which lets a path cross an MI node that
//!   is already in the structure through a fresh pair of ports.
//!
//! When no pending destination can be attached, the structure is closed and
//! the next one starts from the source on the full graph.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::structures::{ConstructionState, LightStructure, StructureError, StructureKind, VisitId};
use crate::topology::{Network, NodeId, ShortestPaths, TopologyError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RoutingError {
    #[error("node {0} is not in the network")]
    UnknownNode(NodeId),
    #[error("a session needs at least one destination")]
    NoDestinations,
    #[error("source {0} cannot also be a destination")]
    SourceIsDestination(NodeId),
    #[error("destination {0} is unreachable from the source")]
    Infeasible(NodeId),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// A multicast request `ms(s, D)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MulticastSession {
    source: NodeId,
    destinations: BTreeSet<NodeId>,
}

impl MulticastSession {
    pub fn new(
        source: NodeId,
        destinations: impl IntoIterator<Item = NodeId>,
    ) -> Result<Self, RoutingError> {
        let destinations: BTreeSet<NodeId> = destinations.into_iter().collect();
        if destinations.is_empty() {
            return Err(RoutingError::NoDestinations);
        }
        if destinations.contains(&source) {
            return Err(RoutingError::SourceIsDestination(source));
        }
        Ok(MulticastSession { source, destinations })
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn destinations(&self) -> &BTreeSet<NodeId> {
        &self.destinations
    }

    /// Every member must exist in `network`.
    pub fn check(&self, network: &Network) -> Result<(), RoutingError> {
        std::iter::once(&self.source)
            .chain(&self.destinations)
            .find(|n| !network.contains(**n))
            .map_or(Ok(()), |n| Err(RoutingError::UnknownNode(*n)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    MemberOnly,
    GrdpLt,
    GrdpLh,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::MemberOnly, Algorithm::GrdpLt, Algorithm::GrdpLh];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::MemberOnly => "member_only",
            Algorithm::GrdpLt => "grdp_lt",
            Algorithm::GrdpLh => "grdp_lh",
        }
    }

    pub fn kind(self) -> StructureKind {
        match self {
            Algorithm::GrdpLh => StructureKind::Hierarchy,
            _ => StructureKind::Tree,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "mo" | "member-only" => Ok(Algorithm::MemberOnly),
            "lt" | "grdp-lt" => Ok(Algorithm::GrdpLt),
            "lh" | "grdp-lh" => Ok(Algorithm::GrdpLh),
            _ => Err(format!("unknown algorithm `{s}` (expected mo, grdp-lt or grdp-lh)")),
        }
    }
}

/// Which destination wins when several are equally near.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum DestinationRule {
    #[default]
    SmallestId,
    /// Earlier in the list wins; unlisted nodes follow, by id.
    Explicit(Vec<NodeId>),
}

/// Which connector wins when several reach the chosen destination equally cheaply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConnectorRule {
    /// In-tree distance priority: fewest hops to the source inside the
    /// structure, then smallest node id.
    #[default]
    InTreeDistance,
    SmallestId,
    /// The connector that joined last. Used to measure what the in-tree
    /// distance priority buys.
    MostRecent,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TieBreakPolicy {
    pub destination_rule: DestinationRule,
    /// Connector rule for GRDP-LT and GRDP-LH. Member-Only always breaks
    /// connector ties by smallest id.
    pub connector_rule: ConnectorRule,
    /// Make an MI source obey the one-output rule instead of splitting.
    pub mi_source_single_output: bool,
}

impl TieBreakPolicy {
    pub fn explicit(order: impl IntoIterator<Item = NodeId>) -> Self {
        TieBreakPolicy {
            destination_rule: DestinationRule::Explicit(order.into_iter().collect()),
            ..Default::default()
        }
    }

    fn destination_rank(&self, d: NodeId) -> (usize, NodeId) {
        match &self.destination_rule {
            DestinationRule::SmallestId => (0, d),
            DestinationRule::Explicit(order) => {
                (order.iter().position(|x| *x == d).unwrap_or(usize::MAX), d)
            }
        }
    }
}

/// Light-forest for one session.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutingResult {
    pub algorithm: Algorithm,
    pub structures: Vec<LightStructure>,
    /// Per structure, destinations in the order they were connected.
    pub adding_order: Vec<Vec<NodeId>>,
}

impl RoutingResult {
    pub fn structure_count(&self) -> usize {
        self.structures.len()
    }

    /// Index of the structure serving `destination`.
    pub fn serving(&self, destination: NodeId) -> Option<usize> {
        self.structures
            .iter()
            .position(|s| s.served().contains_key(&destination))
    }
}

/// The destination, connector and path picked by one construction step.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub destination: NodeId,
    pub connector: VisitId,
    pub path: Vec<NodeId>,
    pub cost: f64,
}

struct Candidate {
    dest: NodeId,
    connector: VisitId,
    cost: f64,
    /// Index into the shortest-path cache, or `None` for a zero-length tap.
    tree: Option<usize>,
}

/// Nearest pending destination and its connector in the current renewed view.
///
/// Minimizes path cost over every (destination, connector) pair, breaks
/// destination ties with the policy's destination rule and connector ties
/// with its connector rule. `None` when no pending destination is reachable.
pub fn select_nearest(
    state: &ConstructionState<'_>,
    policy: &TieBreakPolicy,
) -> Option<Selection> {
    select(state, policy, policy.connector_rule, false)
}

fn select(
    state: &ConstructionState<'_>,
    policy: &TieBreakPolicy,
    connector_rule: ConnectorRule,
    member_only: bool,
) -> Option<Selection> {
    let structure = &state.structure;
    let mut candidates = Vec::new();

    // A pending destination already on the structure taps the signal where it is.
    for d in &state.pending {
        if let Some(v) = structure.visits_of(*d).min_by_key(|v| structure.depth(*v)) {
            candidates.push(Candidate {
                dest: *d,
                connector: v,
                cost: 0.0,
                tree: None,
            });
        }
    }

    let mut trees: Vec<ShortestPaths<'_>> = Vec::new();
    let mut tree_of: HashMap<NodeId, usize> = HashMap::new();
    if candidates.is_empty() {
        for &c in &state.connectors {
            let node = structure.visits()[c.0].node;
            let t = match tree_of.get(&node) {
                Some(t) => *t,
                None => match state.view.shortest_paths(node) {
                    Ok(sp) => {
                        trees.push(sp);
                        tree_of.insert(node, trees.len() - 1);
                        trees.len() - 1
                    }
                    Err(_) => continue,
                },
            };
            for d in &state.pending {
                let cost = trees[t].distance(*d);
                if !cost.is_finite() {
                    continue;
                }
                if member_only && !constraint_free(state, &trees[t], *d) {
                    continue;
                }
                candidates.push(Candidate {
                    dest: *d,
                    connector: c,
                    cost,
                    tree: Some(t),
                });
            }
        }
    }

    let best = candidates.iter().map(|c| c.cost).min_by(f64::total_cmp)?;
    candidates.retain(|c| c.cost == best);
    let dest = candidates
        .iter()
        .map(|c| c.dest)
        .min_by_key(|d| policy.destination_rank(*d))?;
    candidates.retain(|c| c.dest == dest);

    let join_rank = |v: VisitId| state.connectors.iter().position(|c| *c == v);
    let chosen = match connector_rule {
        ConnectorRule::InTreeDistance => candidates.iter().min_by_key(|c| {
            let node = structure.visits()[c.connector.0].node;
            (structure.depth(c.connector), node, c.connector)
        }),
        ConnectorRule::SmallestId => candidates.iter().min_by_key(|c| {
            let node = structure.visits()[c.connector.0].node;
            (node, structure.depth(c.connector), c.connector)
        }),
        ConnectorRule::MostRecent => candidates.iter().max_by_key(|c| join_rank(c.connector)),
    }?;

    let path = match chosen.tree {
        Some(t) => trees[t].path(dest)?,
        None => vec![dest],
    };
    Some(Selection {
        destination: dest,
        connector: chosen.connector,
        path,
        cost: best,
    })
}

/// Member-Only feasibility of the representative shortest path to `dest`:
/// no exhausted MI node anywhere on it, and no interior node that is
/// already part of the structure.
fn constraint_free(state: &ConstructionState<'_>, sp: &ShortestPaths<'_>, dest: NodeId) -> bool {
    let Some(path) = sp.path(dest) else { return false };
    if path.iter().any(|n| state.exhausted.contains(n)) {
        return false;
    }
    path.len() < 3 || path[1..path.len() - 1].iter().all(|n| !state.structure.contains_node(*n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Renewal {
    /// Keep the original graph (Member-Only).
    None,
    /// Delete used links and non-leaf MI nodes (GRDP-LT).
    LinksAndSpentNodes,
    /// Delete used links only (GRDP-LH).
    LinksOnly,
}

fn apply(
    network: &Network,
    state: &mut ConstructionState<'_>,
    sel: &Selection,
    renewal: Renewal,
) -> Result<(), RoutingError> {
    let before = state.structure.visits().len();
    let tap = state.structure.add_path(network, sel.connector, &sel.path)?;
    state.pending.remove(&sel.destination);

    let connector_node = state.structure.visits()[sel.connector.0].node;
    let connector_spent = sel.path.len() > 1 && !state.structure.can_extend(network, sel.connector);
    if connector_spent {
        state.connectors.retain(|v| *v != sel.connector);
        state.exhausted.insert(connector_node);
    }

    let mut spent_interior = Vec::new();
    for i in before..state.structure.visits().len() {
        let visit = VisitId(i);
        let node = state.structure.visits()[i].node;
        if visit == tap || network.is_mc(node) {
            state.connectors.push(visit);
        } else {
            state.exhausted.insert(node);
            spent_interior.push(node);
        }
    }

    if renewal == Renewal::None {
        return Ok(());
    }
    for hop in sel.path.windows(2) {
        let edge = network.edge_between(hop[0], hop[1]).expect("path follows links");
        state.view.remove_edge(edge);
    }
    if renewal == Renewal::LinksAndSpentNodes {
        for node in spent_interior {
            state.view.remove_node(node).expect("node in network");
        }
        if connector_spent {
            state.view.remove_node(connector_node).expect("node in network");
        }
    }
    Ok(())
}

/// Runs `algorithm`, calling `observe` with the state seen by each step
/// just before its selection is applied.
pub fn route_observed(
    network: &Network,
    session: &MulticastSession,
    algorithm: Algorithm,
    policy: &TieBreakPolicy,
    mut observe: impl FnMut(&ConstructionState<'_>, &Selection),
) -> Result<RoutingResult, RoutingError> {
    session.check(network)?;
    let source = session.source();
    let reach = network
        .full_view()
        .shortest_paths(source)
        .map_err(|e| match e {
            TopologyError::UnknownNode(n) => RoutingError::UnknownNode(n),
            _ => RoutingError::UnknownNode(source),
        })?;
    if let Some(d) = session.destinations().iter().find(|d| !reach.distance(**d).is_finite()) {
        return Err(RoutingError::Infeasible(*d));
    }

    let renewal = match algorithm {
        Algorithm::MemberOnly => Renewal::None,
        Algorithm::GrdpLt => Renewal::LinksAndSpentNodes,
        Algorithm::GrdpLh => Renewal::LinksOnly,
    };
    let connector_rule = match algorithm {
        Algorithm::MemberOnly => ConnectorRule::SmallestId,
        _ => policy.connector_rule,
    };
    let root_splits = !policy.mi_source_single_output;

    let mut pending = session.destinations().clone();
    let mut structures = Vec::new();
    let mut adding_order = Vec::new();
    while !pending.is_empty() {
        let mut state =
            ConstructionState::new(network, source, algorithm.kind(), root_splits, std::mem::take(&mut pending));
        let mut order = Vec::new();
        while !state.pending.is_empty() {
            let member_only = algorithm == Algorithm::MemberOnly;
            let Some(sel) = select(&state, policy, connector_rule, member_only) else {
                break;
            };
            observe(&state, &sel);
            apply(network, &mut state, &sel, renewal)?;
            order.push(sel.destination);
        }
        if order.is_empty() {
            let stuck = *state.pending.first().expect("pending is nonempty");
            return Err(RoutingError::Infeasible(stuck));
        }
        pending = state.pending;
        structures.push(state.structure);
        adding_order.push(order);
    }
    Ok(RoutingResult {
        algorithm,
        structures,
        adding_order,
    })
}

pub fn route(
    network: &Network,
    session: &MulticastSession,
    algorithm: Algorithm,
    policy: &TieBreakPolicy,
) -> Result<RoutingResult, RoutingError> {
    route_observed(network, session, algorithm, policy, |_, _| {})
}

/// Member-Only light-forest: shortest paths in the original graph that avoid
/// exhausted MI nodes.
pub fn member_only(
    network: &Network,
    session: &MulticastSession,
    policy: &TieBreakPolicy,
) -> Result<RoutingResult, RoutingError> {
    route(network, session, Algorithm::MemberOnly, policy)
}

/// Graph Renewal & Distance Priority light-trees.
pub fn grdp_lt(
    network: &Network,
    session: &MulticastSession,
    policy: &TieBreakPolicy,
) -> Result<RoutingResult, RoutingError> {
    route(network, session, Algorithm::GrdpLt, policy)
}

/// Graph Renewal & Distance Priority light-hierarchies.
pub fn grdp_lh(
    network: &Network,
    session: &MulticastSession,
    policy: &TieBreakPolicy,
) -> Result<RoutingResult, RoutingError> {
    route(network, session, Algorithm::GrdpLh, policy)
}
