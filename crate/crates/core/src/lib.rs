//! Multicast routing with sparse light splitting in all-optical WDM networks.
//!
//! A session is served by a light-forest: one or more light-structures, each
//! on its own wavelength. Nodes are either multicast-capable (MC, may split a
//! signal) or multicast-incapable (MI, tap-and-continue only), which limits
//! how far one structure can spread.

pub mod algorithms;
pub mod metrics;
pub mod oracle;
pub mod simulation;
pub mod structures;
pub mod topology;
pub mod wavelength;

pub use algorithms::{
    grdp_lh, grdp_lt, member_only, route, Algorithm, ConnectorRule, DestinationRule, MulticastSession,
    RoutingError, RoutingResult, TieBreakPolicy,
};
pub use metrics::{evaluate, MetricsRecord};
pub use structures::{LightStructure, StructureKind, Violation};
pub use topology::{builtin_topology, load_topology, Capability, EdgeId, GraphView, Network, NodeId};
pub use wavelength::{first_fit, release, Assignment, WavelengthState};
