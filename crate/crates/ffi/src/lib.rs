// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.


//! C ABI over `spanning-embed`.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free`. Every fallible call returns an
//! [`SeStatus`]; on failure [`se_last_error`] describes the cause for the
//! calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_traits::ToPrimitive;
use spanning_embed::density::m1_density;
use spanning_embed::embed::{embed_bounded, embed_degenerate, embed_direct, EmbedConfig, ExposureMode};
use spanning_embed::graph::io::parse_edge_list;
use spanning_embed::graph::Graph;
use spanning_embed::random::{sample_gnp, split_host, RandomSource};

/// Status codes; `SE_OK` is zero.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeStatus {
    SeOk = 0,
    SeNullPointer = 1,
    SeInvalidArgument = 2,
    SeParse = 3,
    /// The pipeline ran but found no embedding.
    SeEmbedFailed = 4,
    /// A Rust panic was caught at the boundary.
    SePanic = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeMode {
    SeDegenerate = 0,
    SeBounded = 1,
    SeDirect = 2,
}

/// Opaque graph.
pub struct SeGraph(Graph);

/// Opaque total embedding `target vertex -> host vertex`.
pub struct SeEmbedding {
    map: Vec<usize>,
    attempts: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), (SeStatus, String)>) -> SeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SeStatus::SeOk,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside spanning-embed");
            SeStatus::SePanic
        }
    }
}

fn null(what: &str) -> (SeStatus, String) {
    (SeStatus::SeNullPointer, format!("{what} is null"))
}

/// Message for the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn se_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a graph on `n` vertices from `m` pairs stored flat in `edges`.
///
/// # Safety
/// `edges` must point to `2 * m` readable values (or be null when `m = 0`);
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn se_graph_new(n: usize, edges: *const usize, m: usize, out: *mut *mut SeGraph) -> SeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let flat: &[usize] = match (edges.is_null(), m) {
            (_, 0) => &[],
            (true, _) => return Err(null("edges")),
            (false, _) => std::slice::from_raw_parts(edges, 2 * m),
        };
        let pairs: Vec<(usize, usize)> = flat.chunks(2).map(|c| (c[0], c[1])).collect();
        let g = Graph::new(n, &pairs).map_err(|e| (SeStatus::SeInvalidArgument, e.to_string()))?;
        *out = Box::into_raw(Box::new(SeGraph(g)));
        Ok(())
    })
}

/// Parses the `n m` / `u v` edge-list text format.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn se_graph_parse(text: *const c_char, out: *mut *mut SeGraph) -> SeStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let s = CStr::from_ptr(text).to_str().map_err(|e| (SeStatus::SeParse, e.to_string()))?;
        let g = parse_edge_list(s).map_err(|e| (SeStatus::SeParse, e.to_string()))?;
        *out = Box::into_raw(Box::new(SeGraph(g)));
        Ok(())
    })
}

/// Samples `G(n, p)` from `seed`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn se_sample_gnp(n: usize, p: f64, seed: u64, out: *mut *mut SeGraph) -> SeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let g = sample_gnp(n, p, RandomSource::new(seed, 0)).map_err(|e| (SeStatus::SeInvalidArgument, e.to_string()))?;
        *out = Box::into_raw(Box::new(SeGraph(g)));
        Ok(())
    })
}

/// # Safety
/// `g` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn se_graph_free(g: *mut SeGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Vertex count, or 0 for null.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn se_graph_vertex_count(g: *const SeGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.n())
}

/// Edge count, or 0 for null.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn se_graph_edge_count(g: *const SeGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.edge_count())
}

/// Exact `m_1(g)` as the reduced fraction `num / den`.
///
/// # Safety
/// `g` must be a live handle; `num` and `den` must be writable.
#[no_mangle]
pub unsafe extern "C" fn se_m1_density(g: *const SeGraph, num: *mut u64, den: *mut u64) -> SeStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("g"))?;
        if num.is_null() || den.is_null() {
            return Err(null("num/den"));
        }
        let v = m1_density(&g.0).map_err(|e| (SeStatus::SeInvalidArgument, e.to_string()))?;
        *num = v.value.numer().to_u64().expect("edge count fits u64");
        *den = v.value.denom().to_u64().expect("vertex count fits u64");
        Ok(())
    })
}

/// Embeds `target` into `host`, treating `host` as a `G(n, p)` sample split
/// into the exposures the mode needs. `d` is read only in degenerate mode.
///
/// # Safety
/// `host` and `target` must be live handles; `out` must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn se_embed(
    host: *const SeGraph,
    target: *const SeGraph,
    mode: SeMode,
    d: usize,
    delta: usize,
    p: f64,
    seed: u64,
    out: *mut *mut SeEmbedding,
) -> SeStatus {
    guard(|| {
        let host = &host.as_ref().ok_or_else(|| null("host"))?.0;
        let target = &target.as_ref().ok_or_else(|| null("target"))?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let bad = |e: String| (SeStatus::SeInvalidArgument, e);
        let rounds = match mode {
            SeMode::SeDegenerate => 3,
            SeMode::SeBounded => 2,
            SeMode::SeDirect => 1,
        };
        let src = RandomSource::new(seed, 0);
        let exposures = split_host(host, p, rounds, src.child(0)).map_err(|e| bad(e.to_string()))?;
        let cfg = EmbedConfig { exposure: ExposureMode::Split, ..EmbedConfig::default() };
        let result = match mode {
            SeMode::SeDegenerate => embed_degenerate(&exposures, target, d, delta, &cfg, src.child(1)),
            SeMode::SeBounded => embed_bounded(&exposures, target, delta, &cfg, src.child(1)),
            SeMode::SeDirect => embed_direct(&exposures, target, delta, &cfg, src.child(1)),
        };
        let outcome = result.map_err(|e| (SeStatus::SeEmbedFailed, e.to_string()))?;
        let map = (0..target.n()).map(|v| outcome.phi.get(v).expect("total embedding")).collect();
        *out = Box::into_raw(Box::new(SeEmbedding { map, attempts: outcome.attempts }));
        Ok(())
    })
}

/// Number of target vertices, or 0 for null.
///
/// # Safety
/// `e` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn se_embedding_len(e: *const SeEmbedding) -> usize {
    e.as_ref().map_or(0, |e| e.map.len())
}

/// Pipeline attempts used, or 0 for null.
///
/// # Safety
/// `e` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn se_embedding_attempts(e: *const SeEmbedding) -> usize {
    e.as_ref().map_or(0, |e| e.attempts)
}

/// Copies the image of every target vertex into `buf` (`len` slots).
///
/// # Safety
/// `e` must be a live handle and `buf` writable for `len` values.
#[no_mangle]
pub unsafe extern "C" fn se_embedding_copy(e: *const SeEmbedding, buf: *mut usize, len: usize) -> SeStatus {
    guard(|| {
        let e = e.as_ref().ok_or_else(|| null("e"))?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        if len < e.map.len() {
            return Err((SeStatus::SeInvalidArgument, format!("buffer holds {len}, need {}", e.map.len())));
        }
        ptr::copy_nonoverlapping(e.map.as_ptr(), buf, e.map.len());
        Ok(())
    })
}

/// # Safety
/// `e` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn se_embedding_free(e: *mut SeEmbedding) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}
