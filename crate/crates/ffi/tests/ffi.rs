use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use lightforest_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(lf_last_error_message()) }.to_string_lossy().into_owned()
}

fn builtin(name: &str) -> *mut LfNetwork {
    let name = CString::new(name).unwrap();
    let mut net = ptr::null_mut();
    assert_eq!(unsafe { lf_network_builtin(name.as_ptr(), &mut net) }, LfStatus::Ok);
    net
}

fn route(net: *const LfNetwork, source: u32, dests: &[u32], algo: LfAlgorithm) -> (LfStatus, *mut LfForest) {
    let mut forest = ptr::null_mut();
    let status = unsafe { lf_route(net, source, dests.as_ptr(), dests.len(), algo, ptr::null(), 0, &mut forest) };
    (status, forest)
}

#[test]
fn routes_and_measures_on_nsf() {
    let net = builtin("nsf");
    assert_eq!(unsafe { lf_network_node_count(net) }, 14);
    let mc = [2u32, 10];
    assert_eq!(unsafe { lf_network_set_mc(net, mc.as_ptr(), mc.len()) }, LfStatus::Ok);
    let (status, forest) = route(net, 8, &[3, 6, 10, 11, 13, 14], LfAlgorithm::GrdpLt);
    assert_eq!(status, LfStatus::Ok, "{}", last_error());
    let mut m = LfMetrics::default();
    assert_eq!(unsafe { lf_forest_metrics(forest, &mut m) }, LfStatus::Ok);
    assert_eq!(m.structure_count as usize, unsafe { lf_forest_structure_count(forest) });
    assert!(m.total_cost > 0.0 && m.link_stress >= 1);
    unsafe {
        lf_forest_free(forest);
        lf_network_free(net);
    }
}

#[test]
fn serialize_reports_needed_length() {
    let net = builtin("nsf");
    let (_, forest) = route(net, 1, &[2, 3, 4, 5], LfAlgorithm::GrdpLh);
    let mut needed = 0usize;
    let status = unsafe { lf_forest_serialize(forest, ptr::null_mut(), 0, &mut needed) };
    assert_eq!(status, LfStatus::BufferTooSmall);
    assert!(needed > 1);
    let mut buf = vec![0 as std::ffi::c_char; needed];
    assert_eq!(unsafe { lf_forest_serialize(forest, buf.as_mut_ptr(), buf.len(), &mut needed) }, LfStatus::Ok);
    let text = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap().to_owned();
    assert!(text.starts_with("structure 1\n"));

    let mut owned = ptr::null_mut();
    assert_eq!(unsafe { lf_forest_to_string(forest, &mut owned) }, LfStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(owned) }.to_str().unwrap(), text);
    unsafe {
        lf_string_free(owned);
        lf_forest_free(forest);
        lf_network_free(net);
    }
}

#[test]
fn first_fit_blocks_without_side_effects() {
    let net = builtin("nsf");
    let mut state = ptr::null_mut();
    assert_eq!(unsafe { lf_wavelength_state_new(net, 1, &mut state) }, LfStatus::Ok);
    let (_, forest) = route(net, 1, &[2, 3, 4, 5], LfAlgorithm::GrdpLt);
    let mut idx = [0u32; 16];
    assert_eq!(unsafe { lf_wavelength_state_first_fit(state, forest, idx.as_mut_ptr(), idx.len()) }, LfStatus::Ok);
    assert_eq!(idx[0], 1);
    let status = unsafe { lf_wavelength_state_first_fit(state, forest, idx.as_mut_ptr(), idx.len()) };
    assert_eq!(status, LfStatus::Blocked);
    assert!(!last_error().is_empty());
    unsafe {
        lf_wavelength_state_free(state);
        lf_forest_free(forest);
        lf_network_free(net);
    }
}

#[test]
fn error_codes() {
    let mut net = ptr::null_mut();
    assert_eq!(unsafe { lf_network_builtin(ptr::null(), &mut net) }, LfStatus::NullPointer);
    let bogus = CString::new("atlantis").unwrap();
    assert_eq!(unsafe { lf_network_builtin(bogus.as_ptr(), &mut net) }, LfStatus::UnknownTopology);
    let bad = CString::new("nodes 1 2\nedge 1 9 1\n").unwrap();
    let status = unsafe { lf_network_load(bad.as_ptr(), &mut net) };
    assert_ne!(status, LfStatus::Ok);
    assert!(!last_error().is_empty());

    let net = builtin("nsf");
    assert_eq!(route(net, 1, &[99], LfAlgorithm::GrdpLt).0, LfStatus::UnknownNode);
    assert_eq!(route(net, 1, &[], LfAlgorithm::GrdpLt).0, LfStatus::InvalidSession);
    assert_eq!(route(net, 1, &[1, 2], LfAlgorithm::GrdpLt).0, LfStatus::InvalidSession);
    assert_eq!(route(ptr::null(), 1, &[2], LfAlgorithm::GrdpLt).0, LfStatus::NullPointer);
    unsafe { lf_network_free(net) };
    assert_eq!(unsafe { lf_network_node_count(ptr::null()) }, 0);
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/lightforest.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in ["lf_route", "lf_last_error_message", "LF_STATUS_BLOCKED", "typedef struct LfNetwork LfNetwork"] {
        assert!(text.contains(sym), "header lacks {sym}");
    }
    match Command::new("cc").args(["-fsyntax-only", "-x", "c"]).arg(&header).status() {
        Ok(status) => assert!(status.success()),
        Err(_) => eprintln!("cc not found, syntax check skipped"),
    }
}
