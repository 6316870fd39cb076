//! C ABI for lightforest.
//!
//! Objects are opaque heap handles released with their `*_free` function.
//! Every fallible call returns an [`LfStatus`]; on failure a description is
//! available from [`lf_last_error_message`] on the same thread. No call
//! unwinds across the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use lightforest::algorithms::{route, Algorithm, MulticastSession, RoutingError, RoutingResult, TieBreakPolicy};
use lightforest::metrics::evaluate;
use lightforest::topology::{builtin_topology, load_topology, Network, NodeId, TopologyError};
use lightforest::wavelength::{WavelengthError, WavelengthState};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    UnknownTopology = 4,
    UnknownNode = 5,
    InvalidSession = 6,
    Infeasible = 7,
    Blocked = 8,
    BufferTooSmall = 9,
    InvalidArgument = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LfAlgorithm {
    MemberOnly = 0,
    GrdpLt = 1,
    GrdpLh = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LfMetrics {
    pub link_stress: u32,
    pub total_cost: f64,
    pub average_delay: f64,
    pub diameter: u32,
    pub structure_count: u32,
}

/// Opaque network handle.
pub struct LfNetwork {
    inner: Network,
}

/// Opaque routed light-forest, with the network and session it was built for.
pub struct LfForest {
    network: Network,
    session: MulticastSession,
    forest: RoutingResult,
}

/// Opaque per-fiber wavelength occupancy.
pub struct LfWavelengthState {
    inner: WavelengthState,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).expect("interior NULs removed"));
}

struct Fail(LfStatus, String);

impl From<TopologyError> for Fail {
    fn from(e: TopologyError) -> Self {
        let status = match e {
            TopologyError::UnknownTopology(_) => LfStatus::UnknownTopology,
            TopologyError::UnknownNode(_) => LfStatus::UnknownNode,
            _ => LfStatus::Parse,
        };
        Fail(status, e.to_string())
    }
}

impl From<RoutingError> for Fail {
    fn from(e: RoutingError) -> Self {
        let status = match e {
            RoutingError::UnknownNode(_) => LfStatus::UnknownNode,
            RoutingError::Infeasible(_) => LfStatus::Infeasible,
            _ => LfStatus::InvalidSession,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(LfStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording failures and converting panics.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> LfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            LfStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            LfStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(LfStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn ids_arg<'a>(p: *const u32, len: usize, what: &str) -> Result<&'a [u32], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Parses topology-file text into a new network.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lf_network_load(text: *const c_char, out: *mut *mut LfNetwork) -> LfStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let net = load_topology(str_arg(text, "text")?)?;
        *out = Box::into_raw(Box::new(LfNetwork { inner: net }));
        Ok(())
    })
}

/// Loads a bundled topology: `nsf`, `longhaul` or `cost239`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lf_network_builtin(name: *const c_char, out: *mut *mut LfNetwork) -> LfStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let net = builtin_topology(str_arg(name, "name")?)?;
        *out = Box::into_raw(Box::new(LfNetwork { inner: net }));
        Ok(())
    })
}

/// Number of nodes, or 0 for a null handle.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lf_network_node_count(net: *const LfNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.inner.node_count())
}

/// Makes exactly the `len` listed nodes multicast capable.
///
/// # Safety
/// `net` must be a live handle; `ids` must point to `len` values.
#[no_mangle]
pub unsafe extern "C" fn lf_network_set_mc(net: *mut LfNetwork, ids: *const u32, len: usize) -> LfStatus {
    guard(|| {
        let net = out_arg(net, "net")?;
        let ids: Vec<NodeId> = ids_arg(ids, len, "ids")?.iter().map(|i| NodeId(*i)).collect();
        net.inner = net.inner.with_mc_nodes(&ids)?;
        Ok(())
    })
}

/// # Safety
/// `net` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lf_network_free(net: *mut LfNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Routes a session. `order` lists destinations in tie-break priority;
/// pass `order_len = 0` for smallest-id-first.
///
/// # Safety
/// `net` must be a live handle, `dests` and `order` must point to the
/// given number of values, and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lf_route(
    net: *const LfNetwork,
    source: u32,
    dests: *const u32,
    dests_len: usize,
    algorithm: LfAlgorithm,
    order: *const u32,
    order_len: usize,
    out: *mut *mut LfForest,
) -> LfStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let net = net.as_ref().ok_or_else(|| null("net"))?;
        let dests = ids_arg(dests, dests_len, "dests")?.iter().map(|i| NodeId(*i));
        let session = MulticastSession::new(NodeId(source), dests)?;
        session.check(&net.inner)?;
        let policy = if order_len == 0 {
            TieBreakPolicy::default()
        } else {
            TieBreakPolicy::explicit(ids_arg(order, order_len, "order")?.iter().map(|i| NodeId(*i)))
        };
        let algorithm = match algorithm {
            LfAlgorithm::MemberOnly => Algorithm::MemberOnly,
            LfAlgorithm::GrdpLt => Algorithm::GrdpLt,
            LfAlgorithm::GrdpLh => Algorithm::GrdpLh,
        };
        let forest = route(&net.inner, &session, algorithm, &policy)?;
        *out = Box::into_raw(Box::new(LfForest {
            network: net.inner.clone(),
            session,
            forest,
        }));
        Ok(())
    })
}

/// Number of light-structures, or 0 for a null handle.
///
/// # Safety
/// `forest` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lf_forest_structure_count(forest: *const LfForest) -> usize {
    forest.as_ref().map_or(0, |f| f.forest.structure_count())
}

/// # Safety
/// `forest` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lf_forest_metrics(forest: *const LfForest, out: *mut LfMetrics) -> LfStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let f = forest.as_ref().ok_or_else(|| null("forest"))?;
        let m = evaluate(&f.network, &f.forest, &f.session).map_err(|e| Fail(LfStatus::InvalidSession, e.to_string()))?;
        *out = LfMetrics {
            link_stress: m.link_stress as u32,
            total_cost: m.total_cost,
            average_delay: m.average_delay,
            diameter: m.diameter as u32,
            structure_count: m.structure_count as u32,
        };
        Ok(())
    })
}

fn serialize(f: &LfForest) -> String {
    let mut text = String::new();
    for (k, s) in f.forest.structures.iter().enumerate() {
        text.push_str(&format!("structure {}\n{s}", k + 1));
    }
    text
}

/// Writes the text form of every structure into `buf` (NUL-terminated).
/// `needed` receives the byte count including the NUL; when `capacity` is
/// too small nothing is written and `LF_STATUS_BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `forest` must be live, `buf` must hold `capacity` bytes (or be null with
/// `capacity = 0`), and `needed` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lf_forest_serialize(
    forest: *const LfForest,
    buf: *mut c_char,
    capacity: usize,
    needed: *mut usize,
) -> LfStatus {
    guard(|| {
        let needed = out_arg(needed, "needed")?;
        let f = forest.as_ref().ok_or_else(|| null("forest"))?;
        let text = serialize(f);
        *needed = text.len() + 1;
        if capacity < text.len() + 1 {
            return Err(Fail(
                LfStatus::BufferTooSmall,
                format!("need {} bytes, have {capacity}", text.len() + 1),
            ));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(text.as_ptr(), buf.cast::<u8>(), text.len());
        *buf.add(text.len()) = 0;
        Ok(())
    })
}

/// Text form of the forest as a new string, released with [`lf_string_free`].
///
/// # Safety
/// `forest` must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lf_forest_to_string(forest: *const LfForest, out: *mut *mut c_char) -> LfStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let f = forest.as_ref().ok_or_else(|| null("forest"))?;
        *out = CString::new(serialize(f)).expect("no NULs in text").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `forest` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lf_forest_free(forest: *mut LfForest) {
    if !forest.is_null() {
        drop(Box::from_raw(forest));
    }
}

/// Empty occupancy for `net`; `wavelengths = 0` uses the network's own count.
///
/// # Safety
/// `net` must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lf_wavelength_state_new(
    net: *const LfNetwork,
    wavelengths: u32,
    out: *mut *mut LfWavelengthState,
) -> LfStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let net = net.as_ref().ok_or_else(|| null("net"))?;
        let w = if wavelengths == 0 {
            net.inner.wavelengths()
        } else {
            wavelengths
        };
        let inner = WavelengthState::with_capacity(net.inner.edge_count(), w)
            .map_err(|e| Fail(LfStatus::InvalidArgument, e.to_string()))?;
        *out = Box::into_raw(Box::new(LfWavelengthState { inner }));
        Ok(())
    })
}

/// First-Fit admission of the whole forest. On success one 1-based index per
/// structure is written to `indices`; when blocked the state is unchanged.
///
/// # Safety
/// `state` and `forest` must be live; `indices` must hold `capacity` values.
#[no_mangle]
pub unsafe extern "C" fn lf_wavelength_state_first_fit(
    state: *mut LfWavelengthState,
    forest: *const LfForest,
    indices: *mut u32,
    capacity: usize,
) -> LfStatus {
    guard(|| {
        let state = out_arg(state, "state")?;
        let f = forest.as_ref().ok_or_else(|| null("forest"))?;
        let count = f.forest.structure_count();
        if capacity < count {
            return Err(Fail(
                LfStatus::BufferTooSmall,
                format!("need {count} index slots, have {capacity}"),
            ));
        }
        if indices.is_null() {
            return Err(null("indices"));
        }
        if state.inner.edge_count() != f.network.edge_count() {
            return Err(Fail(LfStatus::InvalidArgument, "state and forest come from different networks".into()));
        }
        let assignment = state.inner.admit(&f.forest).map_err(|e| match e {
            WavelengthError::Blocked { .. } => Fail(LfStatus::Blocked, e.to_string()),
            _ => Fail(LfStatus::InvalidArgument, e.to_string()),
        })?;
        slice::from_raw_parts_mut(indices, count).copy_from_slice(&assignment.indices);
        Ok(())
    })
}

/// # Safety
/// `state` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lf_wavelength_state_free(state: *mut LfWavelengthState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Description of the last failure on this thread (empty after a success).
/// The pointer stays valid until the next library call on this thread.
#[no_mangle]
pub extern "C" fn lf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
