//! C ABI over the hvncolor library. Graphs travel as opaque handles created
//! and destroyed here; every function returns a status code and writes its
//! results through out-pointers. Strings returned to the caller must be
//! released with [`hvn_string_free`], graphs with [`hvn_graph_free`].

use std::ffi::{c_char, CStr, CString};

use hvncolor::coloring::{color_class_member, ColorBudget, ColoringError};
use hvncolor::formats::{read_graph6, write_graph6};
use hvncolor::generators::{extremal, grotzsch, mycielski, sample_class_member};
use hvncolor::graph::Graph;
use hvncolor::oracle::{chromatic_number, clique_number, NodeBudget, OracleError};
use hvncolor::patterns::class_violation;

/// Opaque graph handle.
pub struct HvnGraph {
    inner: Graph,
}

/// Status codes returned by every FFI call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum HvnStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidArgument = 4,
    NotClassMember = 5,
    BudgetExceeded = 6,
    AssertionFailure = 7,
    BufferTooSmall = 8,
}

fn budget_from(node_budget: u64) -> NodeBudget {
    if node_budget == 0 {
        NodeBudget::UNLIMITED
    } else {
        NodeBudget::limited(node_budget)
    }
}

/// Parses one graph6 line into a new graph handle.
///
/// # Safety
/// `line` must be a valid NUL-terminated C string and `out` a valid pointer.
/// The returned handle must be released with [`hvn_graph_free`].
#[no_mangle]
pub unsafe extern "C" fn hvn_graph_from_graph6(
    line: *const c_char,
    out: *mut *mut HvnGraph,
) -> HvnStatus {
    if line.is_null() || out.is_null() {
        return HvnStatus::NullArgument;
    }
    let Ok(text) = CStr::from_ptr(line).to_str() else {
        return HvnStatus::InvalidUtf8;
    };
    match read_graph6(text) {
        Ok(graph) => {
            *out = Box::into_raw(Box::new(HvnGraph { inner: graph }));
            HvnStatus::Ok
        }
        Err(_) => HvnStatus::ParseError,
    }
}

/// Encodes a graph as a newly allocated graph6 C string.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer. Release the string
/// with [`hvn_string_free`].
#[no_mangle]
pub unsafe extern "C" fn hvn_graph_to_graph6(
    g: *const HvnGraph,
    out: *mut *mut c_char,
) -> HvnStatus {
    if g.is_null() || out.is_null() {
        return HvnStatus::NullArgument;
    }
    match write_graph6(&(*g).inner) {
        Ok(s) => {
            let c = CString::new(s).expect("graph6 has no interior NULs");
            *out = c.into_raw();
            HvnStatus::Ok
        }
        Err(_) => HvnStatus::InvalidArgument,
    }
}

/// Releases a string allocated by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn hvn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Releases a graph handle.
///
/// # Safety
/// `g` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn hvn_graph_free(g: *mut HvnGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of vertices.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hvn_graph_order(g: *const HvnGraph, out: *mut u32) -> HvnStatus {
    if g.is_null() || out.is_null() {
        return HvnStatus::NullArgument;
    }
    *out = (*g).inner.n() as u32;
    HvnStatus::Ok
}

/// Adjacency test.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hvn_graph_has_edge(
    g: *const HvnGraph,
    u: u32,
    v: u32,
    out: *mut bool,
) -> HvnStatus {
    if g.is_null() || out.is_null() {
        return HvnStatus::NullArgument;
    }
    let graph = &(*g).inner;
    if u as usize >= graph.n() || v as usize >= graph.n() {
        return HvnStatus::InvalidArgument;
    }
    *out = graph.has_edge(u as usize, v as usize);
    HvnStatus::Ok
}

/// Builds the tight 2ω²-vertex construction (needs omega >= 4).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hvn_extremal(omega: u32, out: *mut *mut HvnGraph) -> HvnStatus {
    if out.is_null() {
        return HvnStatus::NullArgument;
    }
    match extremal(omega as usize) {
        Ok(graph) => {
            *out = Box::into_raw(Box::new(HvnGraph { inner: graph }));
            HvnStatus::Ok
        }
        Err(_) => HvnStatus::InvalidArgument,
    }
}

/// Builds the 11-vertex triangle-free graph with chromatic number 4.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hvn_grotzsch(out: *mut *mut HvnGraph) -> HvnStatus {
    if out.is_null() {
        return HvnStatus::NullArgument;
    }
    *out = Box::into_raw(Box::new(HvnGraph { inner: grotzsch() }));
    HvnStatus::Ok
}

/// Mycielskian of a graph.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hvn_mycielski(g: *const HvnGraph, out: *mut *mut HvnGraph) -> HvnStatus {
    if g.is_null() || out.is_null() {
        return HvnStatus::NullArgument;
    }
    *out = Box::into_raw(Box::new(HvnGraph {
        inner: mycielski(&(*g).inner),
    }));
    HvnStatus::Ok
}

/// Seeded random class member (repaired G(n, density)).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hvn_sample_class_member(
    n: u32,
    density: f64,
    seed: u64,
    out: *mut *mut HvnGraph,
) -> HvnStatus {
    if out.is_null() {
        return HvnStatus::NullArgument;
    }
    if !(0.0..=1.0).contains(&density) {
        return HvnStatus::InvalidArgument;
    }
    *out = Box::into_raw(Box::new(HvnGraph {
        inner: sample_class_member(n as usize, density, seed),
    }));
    HvnStatus::Ok
}

/// Class membership. On a violation, up to `witness_cap` witness vertices
/// are written to `witness` and `witness_len` receives the count (pass 6 to
/// always fit; a too-small buffer reports BUFFER_TOO_SMALL). For members,
/// `witness_len` is set to 0.
///
/// # Safety
/// `g`, `member` and `witness_len` must be valid; `witness` must point to at
/// least `witness_cap` writable u32 slots (or be NULL with cap 0).
#[no_mangle]
pub unsafe extern "C" fn hvn_is_class_member(
    g: *const HvnGraph,
    member: *mut bool,
    witness: *mut u32,
    witness_cap: usize,
    witness_len: *mut usize,
) -> HvnStatus {
    if g.is_null() || member.is_null() || witness_len.is_null() {
        return HvnStatus::NullArgument;
    }
    match class_violation(&(*g).inner) {
        None => {
            *member = true;
            *witness_len = 0;
            HvnStatus::Ok
        }
        Some(w) => {
            *member = false;
            let vs = w.vertices();
            *witness_len = vs.len();
            if witness.is_null() || witness_cap < vs.len() {
                return HvnStatus::BufferTooSmall;
            }
            for (i, &v) in vs.iter().enumerate() {
                *witness.add(i) = v as u32;
            }
            HvnStatus::Ok
        }
    }
}

/// Exact clique number.
///
/// # Safety
/// `g` must be a live handle and `omega` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hvn_clique_number(g: *const HvnGraph, omega: *mut u32) -> HvnStatus {
    if g.is_null() || omega.is_null() {
        return HvnStatus::NullArgument;
    }
    *omega = clique_number(&(*g).inner).0 as u32;
    HvnStatus::Ok
}

/// Exact chromatic number within a node budget (0 = unlimited).
///
/// # Safety
/// `g` must be a live handle and `chi` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hvn_chromatic_number(
    g: *const HvnGraph,
    node_budget: u64,
    chi: *mut u32,
) -> HvnStatus {
    if g.is_null() || chi.is_null() {
        return HvnStatus::NullArgument;
    }
    match chromatic_number(&(*g).inner, budget_from(node_budget)) {
        Ok((value, _)) => {
            *chi = value;
            HvnStatus::Ok
        }
        Err(OracleError::BudgetExceeded { .. }) => HvnStatus::BudgetExceeded,
        Err(_) => HvnStatus::InvalidArgument,
    }
}

/// Permitted palette size for a clique number.
///
/// # Safety
/// `budget` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hvn_color_budget(omega: u32, budget: *mut u32) -> HvnStatus {
    if budget.is_null() {
        return HvnStatus::NullArgument;
    }
    *budget = ColorBudget::for_omega(omega as usize).budget;
    HvnStatus::Ok
}

/// Colors a class member within the budget. `colors` receives one 1-based
/// color per vertex; `colors_cap` must be at least the graph order.
/// `colors_used` receives the number of distinct colors.
///
/// # Safety
/// `g` and `colors_used` must be valid; `colors` must point to at least
/// `colors_cap` writable u32 slots.
#[no_mangle]
pub unsafe extern "C" fn hvn_color_class_member(
    g: *const HvnGraph,
    node_budget: u64,
    colors: *mut u32,
    colors_cap: usize,
    colors_used: *mut u32,
) -> HvnStatus {
    if g.is_null() || colors.is_null() || colors_used.is_null() {
        return HvnStatus::NullArgument;
    }
    let graph = &(*g).inner;
    if colors_cap < graph.n() {
        return HvnStatus::BufferTooSmall;
    }
    match color_class_member(graph, budget_from(node_budget)) {
        Ok((coloring, _trace)) => {
            for (i, &c) in coloring.colors().iter().enumerate() {
                *colors.add(i) = c;
            }
            *colors_used = coloring.colors_used();
            HvnStatus::Ok
        }
        Err(ColoringError::NotClassMember(_)) => HvnStatus::NotClassMember,
        Err(ColoringError::Oracle(OracleError::BudgetExceeded { .. })) => HvnStatus::BudgetExceeded,
        Err(_) => HvnStatus::AssertionFailure,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn graph6_roundtrip_through_ffi() {
        let line = CString::new("Bw").unwrap();
        let mut handle: *mut HvnGraph = ptr::null_mut();
        unsafe {
            assert!(hvn_graph_from_graph6(line.as_ptr(), &mut handle) == HvnStatus::Ok);
            let mut order = 0u32;
            assert!(hvn_graph_order(handle, &mut order) == HvnStatus::Ok);
            assert_eq!(order, 3);
            let mut adj = false;
            assert!(hvn_graph_has_edge(handle, 0, 1, &mut adj) == HvnStatus::Ok);
            assert!(adj);
            let mut text: *mut c_char = ptr::null_mut();
            assert!(hvn_graph_to_graph6(handle, &mut text) == HvnStatus::Ok);
            assert_eq!(CStr::from_ptr(text).to_str().unwrap(), "Bw");
            hvn_string_free(text);
            hvn_graph_free(handle);
        }
    }

    #[test]
    fn parse_error_reported() {
        let line = CString::new("B ").unwrap();
        let mut handle: *mut HvnGraph = ptr::null_mut();
        unsafe {
            assert!(hvn_graph_from_graph6(line.as_ptr(), &mut handle) == HvnStatus::ParseError);
        }
        assert!(handle.is_null());
        unsafe {
            assert!(
                hvn_graph_from_graph6(ptr::null(), &mut handle) == HvnStatus::NullArgument
            );
        }
    }

    #[test]
    fn extremal_pipeline_over_ffi() {
        unsafe {
            let mut g: *mut HvnGraph = ptr::null_mut();
            assert!(hvn_extremal(4, &mut g) == HvnStatus::Ok);
            let mut order = 0;
            hvn_graph_order(g, &mut order);
            assert_eq!(order, 32);

            let mut member = false;
            let mut witness = [0u32; 6];
            let mut len = 0usize;
            assert!(
                hvn_is_class_member(g, &mut member, witness.as_mut_ptr(), 6, &mut len)
                    == HvnStatus::Ok
            );
            assert!(member);

            let mut omega = 0;
            assert!(hvn_clique_number(g, &mut omega) == HvnStatus::Ok);
            assert_eq!(omega, 4);

            let mut budget = 0;
            assert!(hvn_color_budget(omega, &mut budget) == HvnStatus::Ok);
            assert_eq!(budget, 6);

            let mut colors = vec![0u32; 32];
            let mut used = 0;
            assert!(
                hvn_color_class_member(g, 0, colors.as_mut_ptr(), colors.len(), &mut used)
                    == HvnStatus::Ok
            );
            assert!(used <= budget);
            assert!(colors.iter().all(|&c| c >= 1 && c <= budget));

            let mut chi = 0;
            assert!(hvn_chromatic_number(g, 0, &mut chi) == HvnStatus::Ok);
            assert_eq!(chi, 6);

            hvn_graph_free(g);
        }
    }

    #[test]
    fn non_member_witness_over_ffi() {
        // K5 minus two edges at vertex 0 is the basic violation
        let g6 = {
            let mut b = hvncolor::Graph::complete(5).to_builder();
            b.remove_edge(0, 1).unwrap();
            b.remove_edge(0, 2).unwrap();
            write_graph6(&b.build()).unwrap()
        };
        let line = CString::new(g6).unwrap();
        unsafe {
            let mut g: *mut HvnGraph = ptr::null_mut();
            assert!(hvn_graph_from_graph6(line.as_ptr(), &mut g) == HvnStatus::Ok);
            let mut member = true;
            let mut witness = [0u32; 6];
            let mut len = 0usize;
            assert!(
                hvn_is_class_member(g, &mut member, witness.as_mut_ptr(), 6, &mut len)
                    == HvnStatus::Ok
            );
            assert!(!member);
            assert_eq!(len, 5);

            // short buffer still reports the needed length
            let mut short = [0u32; 2];
            assert!(
                hvn_is_class_member(g, &mut member, short.as_mut_ptr(), 2, &mut len)
                    == HvnStatus::BufferTooSmall
            );
            assert_eq!(len, 5);

            let mut colors = [0u32; 5];
            let mut used = 0;
            assert!(
                hvn_color_class_member(g, 0, colors.as_mut_ptr(), 5, &mut used)
                    == HvnStatus::NotClassMember
            );
            hvn_graph_free(g);
        }
    }
}
