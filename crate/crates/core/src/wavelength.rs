//! First-Fit wavelength assignment with all-or-nothing session admission.
//!
//! Wavelength indices run from 1 to W. A fiber carries each index at most
//! once, whichever direction the signal travels.

use std::fmt;

use thiserror::Error;

use crate::algorithms::RoutingResult;
use crate::structures::LightStructure;
use crate::topology::{EdgeId, Network};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WavelengthError {
    #[error("session blocked: structure {structure} has no free wavelength on all its links")]
    Blocked { structure: usize },
    #[error("wavelength {index} is not occupied on edge {edge}")]
    NotOccupied { edge: usize, index: u32 },
    #[error("edge {0} is outside the network")]
    UnknownEdge(usize),
    #[error("assignment has {assignment} indices but the forest has {forest} structures")]
    LengthMismatch { assignment: usize, forest: usize },
    #[error("wavelength count must be positive")]
    ZeroWavelengths,
}

/// Per-fiber occupancy of wavelength indices `1..=W`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WavelengthState {
    w: u32,
    words: usize,
    bits: Vec<u64>,
}

/// Wavelength index of each structure, in forest order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    pub indices: Vec<u32>,
}

impl Assignment {
    pub fn max_index(&self) -> u32 {
        self.indices.iter().copied().max().unwrap_or(0)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices.iter().map(u32::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl WavelengthState {
    /// Empty state sized for `network`'s links and wavelength count.
    pub fn new(network: &Network) -> Self {
        Self::with_capacity(network.edge_count(), network.wavelengths())
            .expect("networks always have W > 0")
    }

    pub fn with_capacity(edges: usize, w: u32) -> Result<Self, WavelengthError> {
        if w == 0 {
            return Err(WavelengthError::ZeroWavelengths);
        }
        let words = (w as usize).div_ceil(64);
        Ok(WavelengthState {
            w,
            words,
            bits: vec![0; edges * words],
        })
    }

    pub fn wavelengths(&self) -> u32 {
        self.w
    }

    pub fn edge_count(&self) -> usize {
        self.bits.len() / self.words
    }

    fn slot(&self, edge: EdgeId, index: u32) -> (usize, u64) {
        let bit = (index - 1) as usize;
        (edge.0 * self.words + bit / 64, 1u64 << (bit % 64))
    }

    pub fn is_occupied(&self, edge: EdgeId, index: u32) -> bool {
        if index == 0 || index > self.w || edge.0 >= self.edge_count() {
            return false;
        }
        let (word, mask) = self.slot(edge, index);
        self.bits[word] & mask != 0
    }

    /// Occupied indices on `edge`, ascending.
    pub fn occupied(&self, edge: EdgeId) -> Vec<u32> {
        (1..=self.w).filter(|i| self.is_occupied(edge, *i)).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|w| *w == 0)
    }

    /// Smallest index free on every edge of `structure`.
    pub fn first_free(&self, structure: &LightStructure) -> Option<u32> {
        let edges = structure.used_edges();
        (0..self.words).find_map(|word| {
            let mut busy = 0u64;
            for e in edges {
                busy |= self.bits[e.0 * self.words + word];
            }
            let free = !busy;
            if free == 0 {
                return None;
            }
            let index = (word * 64) as u32 + free.trailing_zeros() + 1;
            (index <= self.w).then_some(index)
        })
    }

    fn check_edges(&self, forest: &RoutingResult) -> Result<(), WavelengthError> {
        let n = self.edge_count();
        match forest
            .structures
            .iter()
            .flat_map(|s| s.used_edges())
            .find(|e| e.0 >= n)
        {
            Some(e) => Err(WavelengthError::UnknownEdge(e.0)),
            None => Ok(()),
        }
    }

    /// Assigns every structure of `forest` in place, or leaves the state
    /// untouched and reports the first structure that found no index.
    pub fn admit(&mut self, forest: &RoutingResult) -> Result<Assignment, WavelengthError> {
        self.check_edges(forest)?;
        let mut indices = Vec::with_capacity(forest.structures.len());
        for (k, s) in forest.structures.iter().enumerate() {
            let Some(index) = self.first_free(s) else {
                self.clear(forest, &indices);
                return Err(WavelengthError::Blocked { structure: k });
            };
            for e in s.used_edges() {
                let (word, mask) = self.slot(*e, index);
                self.bits[word] |= mask;
            }
            indices.push(index);
        }
        Ok(Assignment { indices })
    }

    fn clear(&mut self, forest: &RoutingResult, indices: &[u32]) {
        for (s, index) in forest.structures.iter().zip(indices) {
            for e in s.used_edges() {
                let (word, mask) = self.slot(*e, *index);
                self.bits[word] &= !mask;
            }
        }
    }

    /// Removes exactly the occupancies recorded by `assignment`.
    pub fn release_in_place(
        &mut self,
        assignment: &Assignment,
        forest: &RoutingResult,
    ) -> Result<(), WavelengthError> {
        if assignment.indices.len() != forest.structures.len() {
            return Err(WavelengthError::LengthMismatch {
                assignment: assignment.indices.len(),
                forest: forest.structures.len(),
            });
        }
        self.check_edges(forest)?;
        for (s, index) in forest.structures.iter().zip(&assignment.indices) {
            for e in s.used_edges() {
                if !self.is_occupied(*e, *index) {
                    return Err(WavelengthError::NotOccupied { edge: e.0, index: *index });
                }
            }
        }
        self.clear(forest, &assignment.indices);
        Ok(())
    }

    /// Occupies `index` on `edge` directly.
    pub fn occupy(&mut self, edge: EdgeId, index: u32) -> Result<(), WavelengthError> {
        if edge.0 >= self.edge_count() {
            return Err(WavelengthError::UnknownEdge(edge.0));
        }
        if index == 0 || index > self.w {
            return Err(WavelengthError::NotOccupied { edge: edge.0, index });
        }
        let (word, mask) = self.slot(edge, index);
        self.bits[word] |= mask;
        Ok(())
    }
}

/// Functional First-Fit: the assignment and the updated state, or `Blocked`
/// with `state` untouched.
pub fn first_fit(
    state: &WavelengthState,
    forest: &RoutingResult,
) -> Result<(Assignment, WavelengthState), WavelengthError> {
    let mut next = state.clone();
    let assignment = next.admit(forest)?;
    Ok((assignment, next))
}

pub fn release(
    state: &WavelengthState,
    assignment: &Assignment,
    forest: &RoutingResult,
) -> Result<WavelengthState, WavelengthError> {
    let mut next = state.clone();
    next.release_in_place(assignment, forest)?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{member_only, grdp_lt, MulticastSession, TieBreakPolicy};
    use crate::metrics::link_stress;
    use crate::topology::{builtin_topology, NodeId};
    use proptest::prelude::*;

    fn ms1() -> (Network, MulticastSession) {
        let net = builtin_topology("nsf").unwrap().with_mc_nodes(&[NodeId(7)]).unwrap();
        (net, MulticastSession::new(NodeId(7), [NodeId(4), NodeId(6)]).unwrap())
    }

    #[test]
    fn single_tree_gets_index_one() {
        let (net, ms) = ms1();
        let lt = grdp_lt(&net, &ms, &TieBreakPolicy::default()).unwrap();
        let (a, s) = first_fit(&WavelengthState::new(&net), &lt).unwrap();
        assert_eq!(a.indices, vec![1]);
        assert!(!s.is_empty());
    }

    #[test]
    fn member_only_forest_needs_two() {
        let (net, ms) = ms1();
        let mo = member_only(&net, &ms, &TieBreakPolicy::default()).unwrap();
        let (a, _) = first_fit(&WavelengthState::new(&net), &mo).unwrap();
        assert_eq!(a.indices, vec![1, 2]);
        assert_eq!(a.max_index() as usize, link_stress(&mo));
    }

    #[test]
    fn saturated_edge_blocks_atomically() {
        let (net, ms) = ms1();
        let mo = member_only(&net, &ms, &TieBreakPolicy::default()).unwrap();
        let e75 = net.edge_between(NodeId(7), NodeId(5)).unwrap();
        let mut state = WavelengthState::new(&net);
        for i in 1..=20 {
            state.occupy(e75, i).unwrap();
        }
        let before = state.clone();
        assert_eq!(first_fit(&state, &mo), Err(WavelengthError::Blocked { structure: 0 }));
        assert_eq!(state.admit(&mo), Err(WavelengthError::Blocked { structure: 0 }));
        assert_eq!(state, before);
    }

    #[test]
    fn second_structure_blocking_rolls_back_first() {
        let (net, ms) = ms1();
        let net = net.with_wavelengths(1).unwrap();
        let mo = member_only(&net, &ms, &TieBreakPolicy::default()).unwrap();
        let mut state = WavelengthState::new(&net);
        assert_eq!(state.admit(&mo), Err(WavelengthError::Blocked { structure: 1 }));
        assert!(state.is_empty());
    }

    #[test]
    fn release_round_trip_and_errors() {
        let (net, ms) = ms1();
        let lt = grdp_lt(&net, &ms, &TieBreakPolicy::default()).unwrap();
        let mo = member_only(&net, &ms, &TieBreakPolicy::default()).unwrap();
        let empty = WavelengthState::new(&net);
        let (a1, s1) = first_fit(&empty, &lt).unwrap();
        assert_eq!(release(&s1, &a1, &lt).unwrap(), empty);
        assert!(matches!(release(&empty, &a1, &lt), Err(WavelengthError::NotOccupied { .. })));

        let (a2, s2) = first_fit(&s1, &mo).unwrap();
        assert_eq!(a2.indices, vec![2, 3]);
        let s3 = release(&s2, &a1, &lt).unwrap();
        let (_, only_mo) = first_fit(&empty, &mo).unwrap();
        assert_ne!(s3, only_mo);
        for (s, idx) in mo.structures.iter().zip(&a2.indices) {
            for e in s.used_edges() {
                assert!(s3.is_occupied(*e, *idx));
            }
        }
        assert!(matches!(
            release(&s2, &Assignment { indices: vec![] }, &lt),
            Err(WavelengthError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn wide_wavelength_counts() {
        let (net, ms) = ms1();
        let net = net.with_wavelengths(130).unwrap();
        let mo = member_only(&net, &ms, &TieBreakPolicy::default()).unwrap();
        let e75 = net.edge_between(NodeId(7), NodeId(5)).unwrap();
        let mut state = WavelengthState::new(&net);
        for i in 1..=127 {
            state.occupy(e75, i).unwrap();
        }
        assert_eq!(state.admit(&mo).unwrap().indices, vec![128, 129]);
        assert!(state.admit(&mo).is_err());
        assert_eq!(WavelengthState::with_capacity(3, 0), Err(WavelengthError::ZeroWavelengths));
    }

    proptest! {
        #[test]
        fn first_fit_is_minimal(seed_edges in proptest::collection::vec((0usize..19, 1u32..=6), 0..40)) {
            let (net, ms) = ms1();
            let net = net.with_wavelengths(6).unwrap();
            let mo = member_only(&net, &ms, &TieBreakPolicy::default()).unwrap();
            let mut state = WavelengthState::new(&net);
            for (e, i) in seed_edges {
                state.occupy(EdgeId(e), i).unwrap();
            }
            let before = state.clone();
            match first_fit(&state, &mo) {
                Ok((a, after)) => {
                    let mut probe = before.clone();
                    for (s, idx) in mo.structures.iter().zip(&a.indices) {
                        for lower in 1..*idx {
                            prop_assert!(s.used_edges().iter().any(|e| probe.is_occupied(*e, lower)));
                        }
                        for e in s.used_edges() {
                            prop_assert!(!probe.is_occupied(*e, *idx));
                            probe.occupy(*e, *idx).unwrap();
                        }
                    }
                    prop_assert_eq!(probe, after);
                }
                Err(_) => prop_assert_eq!(state, before),
            }
        }
    }
}
