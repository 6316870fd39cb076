//! Per-session evaluation metrics of a light-forest.

use std::collections::HashMap;
use std::fmt;

use crate::algorithms::{MulticastSession, RoutingResult};
use crate::structures::StructureError;
use crate::topology::Network;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRecord {
    /// Most structures sharing any one fiber.
    pub link_stress: usize,
    pub total_cost: f64,
    pub average_delay: f64,
    /// Longest lightpath, in hops.
    pub diameter: usize,
    pub structure_count: usize,
}

impl fmt::Display for MetricsRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "stress {} cost {} delay {} diameter {} structures {}",
            self.link_stress, self.total_cost, self.average_delay, self.diameter, self.structure_count
        )
    }
}

pub fn link_stress(forest: &RoutingResult) -> usize {
    let mut load: HashMap<usize, usize> = HashMap::new();
    for e in forest.structures.iter().flat_map(|s| s.used_edges()) {
        *load.entry(e.0).or_default() += 1;
    }
    load.into_values().max().unwrap_or(0)
}

pub fn total_cost(network: &Network, forest: &RoutingResult) -> f64 {
    forest.structures.iter().map(|s| s.cost(network)).sum()
}

/// Mean source-to-destination delay along each destination's lightpath.
pub fn average_delay(
    network: &Network,
    forest: &RoutingResult,
    session: &MulticastSession,
) -> Result<f64, StructureError> {
    let mut sum = 0.0;
    for d in session.destinations() {
        let s = forest
            .serving(*d)
            .map(|k| &forest.structures[k])
            .ok_or(StructureError::NotServed(*d))?;
        sum += s.lightpath_delay(network, *d)?;
    }
    Ok(sum / session.destinations().len() as f64)
}

pub fn diameter(forest: &RoutingResult) -> usize {
    forest
        .structures
        .iter()
        .flat_map(|s| s.served().values().map(move |v| s.in_structure_distance(*v)))
        .filter_map(Result::ok)
        .max()
        .unwrap_or(0) as usize
}

pub fn evaluate(
    network: &Network,
    forest: &RoutingResult,
    session: &MulticastSession,
) -> Result<MetricsRecord, StructureError> {
    Ok(MetricsRecord {
        link_stress: link_stress(forest),
        total_cost: total_cost(network, forest),
        average_delay: average_delay(network, forest, session)?,
        diameter: diameter(forest),
        structure_count: forest.structure_count(),
    })
}
