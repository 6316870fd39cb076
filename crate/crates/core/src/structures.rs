//! Light structures as rooted visit-trees.
//!
//! A light-tree visits every node at most once. A light-hierarchy may pass
//! through a node several times over distinct links; each pass is its own
//! [`Visit`], so the structure stays a tree in visit space even when its
//! projection onto the network has cycles.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::topology::{Capability, EdgeId, GraphView, Network, NodeId};

/// Index of a visit inside its structure, in construction order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VisitId(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub struct Visit {
    pub node: NodeId,
    /// k-th traversal of `node` within the structure, from 0.
    pub visit_index: u32,
    pub parent: Option<VisitId>,
    pub via_edge: Option<EdgeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StructureKind {
    Tree,
    Hierarchy,
}

impl fmt::Display for StructureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StructureKind::Tree => "tree",
            StructureKind::Hierarchy => "hierarchy",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StructureError {
    #[error("edge {0}-{1} is already used by this structure")]
    EdgeReuse(NodeId, NodeId),
    #[error("connector visit {0:?} is not part of the structure")]
    ForeignVisit(VisitId),
    #[error("path must start at the connector node {expected}, starts at {found}")]
    PathStart { expected: NodeId, found: NodeId },
    #[error("path is empty")]
    EmptyPath,
    #[error("no link between {0} and {1}")]
    MissingLink(NodeId, NodeId),
    #[error("destination {0} is already served")]
    AlreadyServed(NodeId),
    #[error("destination {0} is not served by this structure")]
    NotServed(NodeId),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A constraint broken by a structure, as reported by [`LightStructure::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    RootCount(usize),
    RootMismatch { expected: NodeId, found: NodeId },
    /// Parent reference out of range or part of a parent cycle.
    Disconnected(VisitId),
    /// `via_edge` missing, or not a link between parent and child nodes.
    BadLink(VisitId),
    UnknownNode(NodeId),
    EdgeReuse(EdgeId),
    /// A non-root MI visit feeding more than one child.
    MiSplit { node: NodeId, visit_index: u32, children: usize },
    /// Tree kind with a node visited more than once.
    TreeRevisit(NodeId),
    VisitIndexGap(NodeId),
    ServedWithoutVisit(NodeId),
    /// Structure kind differs from what the algorithm promises.
    KindMismatch,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RootCount(n) => write!(f, "expected exactly one root visit, found {n}"),
            Violation::RootMismatch { expected, found } => {
                write!(f, "root is node {found} but the session source is {expected}")
            }
            Violation::Disconnected(v) => write!(f, "visit {} is not connected to the root", v.0),
            Violation::BadLink(v) => write!(f, "visit {} does not hang off its parent by a network link", v.0),
            Violation::UnknownNode(n) => write!(f, "node {n} is not in the network"),
            Violation::EdgeReuse(e) => write!(f, "edge #{} used more than once", e.0),
            Violation::MiSplit { node, visit_index, children } => write!(
                f,
                "MI node {node} (visit {visit_index}) splits into {children} outputs"
            ),
            Violation::TreeRevisit(n) => write!(f, "node {n} visited more than once in a light-tree"),
            Violation::VisitIndexGap(n) => write!(f, "visit indices of node {n} are not 0,1,2,..."),
            Violation::ServedWithoutVisit(n) => write!(f, "destination {n} is served at a missing visit"),
            Violation::KindMismatch => write!(f, "structure kind does not match the algorithm"),
        }
    }
}

/// One light-tree or light-hierarchy, all on a single wavelength.
#[derive(Debug, Clone, PartialEq)]
pub struct LightStructure {
    kind: StructureKind,
    root_splits: bool,
    visits: Vec<Visit>,
    children: Vec<Vec<VisitId>>,
    depth: Vec<u32>,
    served: BTreeMap<NodeId, VisitId>,
    served_order: Vec<NodeId>,
    used_edges: BTreeSet<EdgeId>,
    visit_counts: HashMap<NodeId, u32>,
}

impl LightStructure {
    /// Structure holding only the root visit at `source`.
    pub fn new(source: NodeId, kind: StructureKind) -> Self {
        LightStructure {
            kind,
            root_splits: true,
            visits: vec![Visit {
                node: source,
                visit_index: 0,
                parent: None,
                via_edge: None,
            }],
            children: vec![Vec::new()],
            depth: vec![0],
            served: BTreeMap::new(),
            served_order: Vec::new(),
            used_edges: BTreeSet::new(),
            visit_counts: HashMap::from([(source, 1)]),
        }
    }

    /// Makes an MI source obey the one-output rule like any other MI node.
    /// MC sources split regardless.
    pub fn with_root_splitting(mut self, root_splits: bool) -> Self {
        self.root_splits = root_splits;
        self
    }

    /// Assembles a structure from raw parts without checking anything.
    /// Use [`LightStructure::validate`] afterwards.
    pub fn from_parts(
        kind: StructureKind,
        visits: Vec<Visit>,
        served: Vec<(NodeId, VisitId)>,
    ) -> Self {
        let n = visits.len();
        let mut children = vec![Vec::new(); n];
        for (i, v) in visits.iter().enumerate() {
            if let Some(p) = v.parent.filter(|p| p.0 < n) {
                children[p.0].push(VisitId(i));
            }
        }
        let depth = (0..n)
            .map(|i| {
                let mut d = 0u32;
                let mut cur = i;
                while let Some(p) = visits[cur].parent {
                    if p.0 >= n || d as usize > n {
                        return u32::MAX;
                    }
                    cur = p.0;
                    d += 1;
                }
                d
            })
            .collect();
        let mut visit_counts = HashMap::new();
        for v in &visits {
            *visit_counts.entry(v.node).or_insert(0) += 1;
        }
        let used_edges = visits.iter().filter_map(|v| v.via_edge).collect();
        LightStructure {
            kind,
            root_splits: true,
            children,
            depth,
            served_order: served.iter().map(|(d, _)| *d).collect(),
            served: served.into_iter().collect(),
            used_edges,
            visit_counts,
            visits,
        }
    }

    pub fn kind(&self) -> StructureKind {
        self.kind
    }

    pub fn root(&self) -> VisitId {
        VisitId(0)
    }

    pub fn source(&self) -> NodeId {
        self.visits[0].node
    }

    pub fn root_splits(&self) -> bool {
        self.root_splits
    }

    pub fn visits(&self) -> &[Visit] {
        &self.visits
    }

    pub fn visit(&self, id: VisitId) -> Option<&Visit> {
        self.visits.get(id.0)
    }

    pub fn children(&self, id: VisitId) -> &[VisitId] {
        self.children.get(id.0).map_or(&[], |c| c.as_slice())
    }

    /// Destination → visit where it taps the signal.
    pub fn served(&self) -> &BTreeMap<NodeId, VisitId> {
        &self.served
    }

    /// Served destinations in the order they were connected.
    pub fn served_order(&self) -> &[NodeId] {
        &self.served_order
    }

    pub fn used_edges(&self) -> &BTreeSet<EdgeId> {
        &self.used_edges
    }

    pub fn uses_edge(&self, edge: EdgeId) -> bool {
        self.used_edges.contains(&edge)
    }

    pub fn contains_node(&self, node: NodeId) -> bool {
        self.visit_counts.contains_key(&node)
    }

    pub fn visit_count(&self, node: NodeId) -> u32 {
        self.visit_counts.get(&node).copied().unwrap_or(0)
    }

    /// Distinct network nodes touched by the structure.
    pub fn nodes(&self) -> BTreeSet<NodeId> {
        self.visit_counts.keys().copied().collect()
    }

    /// Visits of `node`, by ascending visit index.
    pub fn visits_of(&self, node: NodeId) -> impl Iterator<Item = VisitId> + '_ {
        self.visits
            .iter()
            .enumerate()
            .filter(move |(_, v)| v.node == node)
            .map(|(i, _)| VisitId(i))
    }

    /// Number of parent links from `visit` up to the root.
    pub fn in_structure_distance(&self, visit: VisitId) -> Result<u32, StructureError> {
        self.depth
            .get(visit.0)
            .copied()
            .ok_or(StructureError::ForeignVisit(visit))
    }

    pub(crate) fn depth(&self, visit: VisitId) -> u32 {
        self.depth[visit.0]
    }

    /// Whether a visit may take one more child under the splitting rules.
    pub fn can_extend(&self, network: &Network, visit: VisitId) -> bool {
        let v = &self.visits[visit.0];
        if network.capability(v.node) == Some(Capability::Mc) {
            return true;
        }
        if visit == self.root() && self.root_splits {
            return true;
        }
        self.children[visit.0].is_empty()
    }

    /// Grows the structure along `path`, which must start at the connector's
    /// node and end at the destination. Every hop becomes a new visit; a
    /// single-node path taps the destination at the connector itself.
    ///
    /// Returns the destination's tap visit.
    pub fn add_path(
        &mut self,
        network: &Network,
        connector: VisitId,
        path: &[NodeId],
    ) -> Result<VisitId, StructureError> {
        let start = self
            .visits
            .get(connector.0)
            .ok_or(StructureError::ForeignVisit(connector))?
            .node;
        let (&first, _) = path.split_first().ok_or(StructureError::EmptyPath)?;
        if first != start {
            return Err(StructureError::PathStart {
                expected: start,
                found: first,
            });
        }
        let dest = *path.last().expect("nonempty");
        if self.served.contains_key(&dest) {
            return Err(StructureError::AlreadyServed(dest));
        }
        // Check everything before mutating.
        let mut edges = Vec::with_capacity(path.len().saturating_sub(1));
        for hop in path.windows(2) {
            let e = network
                .edge_between(hop[0], hop[1])
                .ok_or(StructureError::MissingLink(hop[0], hop[1]))?;
            if self.used_edges.contains(&e) || edges.contains(&e) {
                return Err(StructureError::EdgeReuse(hop[0], hop[1]));
            }
            edges.push(e);
        }

        let mut parent = connector;
        for (node, edge) in path[1..].iter().zip(edges) {
            let count = self.visit_counts.entry(*node).or_insert(0);
            let id = VisitId(self.visits.len());
            self.visits.push(Visit {
                node: *node,
                visit_index: *count,
                parent: Some(parent),
                via_edge: Some(edge),
            });
            *count += 1;
            self.children.push(Vec::new());
            self.children[parent.0].push(id);
            self.depth.push(self.depth[parent.0] + 1);
            self.used_edges.insert(edge);
            parent = id;
        }
        self.served.insert(dest, parent);
        self.served_order.push(dest);
        Ok(parent)
    }

    /// Node sequence from the root to the destination's tap visit.
    pub fn lightpath(&self, destination: NodeId) -> Result<Vec<NodeId>, StructureError> {
        let tap = *self
            .served
            .get(&destination)
            .ok_or(StructureError::NotServed(destination))?;
        Ok(self.walk_to_root(tap).iter().rev().map(|v| self.visits[v.0].node).collect())
    }

    /// Sum of link delays along the destination's lightpath.
    pub fn lightpath_delay(&self, network: &Network, destination: NodeId) -> Result<f64, StructureError> {
        let tap = *self
            .served
            .get(&destination)
            .ok_or(StructureError::NotServed(destination))?;
        Ok(self
            .walk_to_root(tap)
            .iter()
            .filter_map(|v| self.visits[v.0].via_edge)
            .map(|e| network.link(e).delay())
            .sum())
    }

    fn walk_to_root(&self, from: VisitId) -> Vec<VisitId> {
        let mut out = vec![from];
        let mut cur = from;
        while let Some(p) = self.visits[cur.0].parent {
            out.push(p);
            cur = p;
        }
        out
    }

    /// Sum of link costs over the structure.
    pub fn cost(&self, network: &Network) -> f64 {
        self.used_edges.iter().map(|e| network.link(*e).cost()).sum()
    }

    /// Checks every structural and splitting constraint; empty means valid.
    pub fn validate(&self, network: &Network, source: NodeId) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.visits.len();

        let roots: Vec<usize> = (0..n).filter(|i| self.visits[*i].parent.is_none()).collect();
        if roots.len() != 1 || roots[0] != 0 {
            out.push(Violation::RootCount(roots.len()));
        }
        if let Some(root) = self.visits.first() {
            if root.node != source {
                out.push(Violation::RootMismatch {
                    expected: source,
                    found: root.node,
                });
            }
        }

        let mut unknown = BTreeSet::new();
        for v in &self.visits {
            if !network.contains(v.node) {
                unknown.insert(v.node);
            }
        }
        out.extend(unknown.into_iter().map(Violation::UnknownNode));

        let mut edge_uses: BTreeMap<EdgeId, usize> = BTreeMap::new();
        for (i, v) in self.visits.iter().enumerate() {
            if self.depth[i] == u32::MAX {
                out.push(Violation::Disconnected(VisitId(i)));
                continue;
            }
            let Some(p) = v.parent else { continue };
            let parent_node = self.visits[p.0].node;
            match v.via_edge {
                Some(e) if e.0 < network.edge_count()
                    && network.edge_between(parent_node, v.node) == Some(e) =>
                {
                    *edge_uses.entry(e).or_insert(0) += 1;
                }
                _ => out.push(Violation::BadLink(VisitId(i))),
            }
        }
        for (e, uses) in edge_uses {
            if uses > 1 {
                out.push(Violation::EdgeReuse(e));
            }
        }

        for (i, v) in self.visits.iter().enumerate() {
            let kids = self.children[i].len();
            let exempt = i == 0 && self.root_splits;
            if kids > 1 && !exempt && network.capability(v.node) == Some(Capability::Mi) {
                out.push(Violation::MiSplit {
                    node: v.node,
                    visit_index: v.visit_index,
                    children: kids,
                });
            }
        }

        let mut indices: BTreeMap<NodeId, Vec<u32>> = BTreeMap::new();
        for v in &self.visits {
            indices.entry(v.node).or_default().push(v.visit_index);
        }
        for (node, mut idx) in indices {
            if self.kind == StructureKind::Tree && idx.len() > 1 {
                out.push(Violation::TreeRevisit(node));
            }
            idx.sort_unstable();
            if idx.iter().enumerate().any(|(k, i)| *i as usize != k) {
                out.push(Violation::VisitIndexGap(node));
            }
        }

        for (dest, tap) in &self.served {
            if self.visits.get(tap.0).is_none_or(|v| v.node != *dest) {
                out.push(Violation::ServedWithoutVisit(*dest));
            }
        }
        out
    }

    /// Visits in preorder, children taken in construction order.
    pub fn preorder(&self) -> Vec<VisitId> {
        let mut order = Vec::with_capacity(self.visits.len());
        let mut stack = vec![self.root()];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(self.children[v.0].iter().rev());
        }
        order
    }

    /// Parses the text produced by the `Display` impl.
    pub fn parse(text: &str, network: &Network, kind: StructureKind) -> Result<Self, StructureError> {
        let mut visits: Vec<Visit> = Vec::new();
        let mut keys: HashMap<(NodeId, u32), VisitId> = HashMap::new();
        let mut parents: Vec<(usize, Option<(NodeId, u32)>)> = Vec::new();
        let mut served = Vec::new();
        let mut pending_served = Vec::new();

        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            // `#` separates node and visit index, so only `//` starts a comment.
            let content = raw.split("//").next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |msg: &str| StructureError::Parse {
                line,
                msg: msg.to_string(),
            };
            let f: Vec<&str> = content.split_whitespace().collect();
            match f[0] {
                "visit" => {
                    let key = parse_visit_key(f.get(1).copied()).ok_or_else(|| err("bad visit key"))?;
                    let (parent, rest) = match f.get(2).copied() {
                        Some("root") => (None, &f[3..]),
                        Some("parent") => (
                            Some(parse_visit_key(f.get(3).copied()).ok_or_else(|| err("bad parent key"))?),
                            &f[4..],
                        ),
                        _ => return Err(err("expected `root` or `parent <node>#<idx>`")),
                    };
                    let via = match rest {
                        ["-"] => None,
                        ["via", uv] => {
                            let (u, v) = uv.split_once('-').ok_or_else(|| err("bad via edge"))?;
                            let u: NodeId = u.parse().map_err(|_| err("bad via edge"))?;
                            let v: NodeId = v.parse().map_err(|_| err("bad via edge"))?;
                            Some(network.edge_between(u, v).ok_or_else(|| err("via edge is not a network link"))?)
                        }
                        _ => return Err(err("expected `via <u>-<v>` or `-`")),
                    };
                    if keys.insert(key, VisitId(visits.len())).is_some() {
                        return Err(err("visit declared twice"));
                    }
                    parents.push((visits.len(), parent));
                    visits.push(Visit {
                        node: key.0,
                        visit_index: key.1,
                        parent: None,
                        via_edge: via,
                    });
                }
                "served" => {
                    if f.len() != 4 || f[2] != "at" {
                        return Err(err("expected `served <dest> at <node>#<idx>`"));
                    }
                    let dest: NodeId = f[1].parse().map_err(|_| err("bad destination"))?;
                    let key = parse_visit_key(Some(f[3])).ok_or_else(|| err("bad visit key"))?;
                    pending_served.push((line, dest, key));
                }
                "kind" | "structure" => {}
                _ => return Err(err("unknown line")),
            }
        }
        for (i, parent) in parents {
            if let Some(key) = parent {
                let p = keys.get(&key).copied().unwrap_or(VisitId(usize::MAX));
                visits[i].parent = Some(p);
            }
        }
        // Root first so VisitId(0) is the root.
        if let Some(r) = visits.iter().position(|v| v.parent.is_none()) {
            if r != 0 {
                visits.swap(0, r);
                let remap = |v: VisitId| match v.0 {
                    0 => VisitId(r),
                    x if x == r => VisitId(0),
                    _ => v,
                };
                for v in &mut visits {
                    v.parent = v.parent.map(remap);
                }
                for id in keys.values_mut() {
                    *id = remap(*id);
                }
            }
        }
        for (line, dest, key) in pending_served {
            let tap = keys.get(&key).copied().ok_or(StructureError::Parse {
                line,
                msg: "served at an undeclared visit".into(),
            })?;
            served.push((dest, tap));
        }
        Ok(LightStructure::from_parts(kind, visits, served))
    }
}

fn parse_visit_key(s: Option<&str>) -> Option<(NodeId, u32)> {
    let (node, idx) = s?.split_once('#')?;
    Some((node.parse().ok()?, idx.parse().ok()?))
}

impl fmt::Display for LightStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for id in self.preorder() {
            let v = &self.visits[id.0];
            match v.parent {
                None => writeln!(f, "visit {}#{} root -", v.node, v.visit_index)?,
                Some(p) => {
                    let pv = &self.visits[p.0];
                    writeln!(
                        f,
                        "visit {}#{} parent {}#{} via {}-{}",
                        v.node, v.visit_index, pv.node, pv.visit_index, pv.node, v.node
                    )?
                }
            }
        }
        for dest in &self.served_order {
            let tap = &self.visits[self.served[dest].0];
            writeln!(f, "served {} at {}#{}", dest, tap.node, tap.visit_index)?;
        }
        Ok(())
    }
}

/// Working state while one structure is being grown.
#[derive(Debug, Clone)]
pub struct ConstructionState<'a> {
    pub structure: LightStructure,
    /// Connector visits (MC_SET) in the order they joined.
    pub connectors: Vec<VisitId>,
    /// MI nodes whose splitting capability is used up (MI_SET).
    pub exhausted: BTreeSet<NodeId>,
    /// Destinations not yet served by this or an earlier structure.
    pub pending: BTreeSet<NodeId>,
    /// The current renewed graph.
    pub view: GraphView<'a>,
}

impl<'a> ConstructionState<'a> {
    pub fn new(
        network: &'a Network,
        source: NodeId,
        kind: StructureKind,
        root_splits: bool,
        pending: BTreeSet<NodeId>,
    ) -> Self {
        let structure = LightStructure::new(source, kind).with_root_splitting(root_splits);
        ConstructionState {
            connectors: vec![structure.root()],
            structure,
            exhausted: BTreeSet::new(),
            pending,
            view: network.full_view(),
        }
    }
}
