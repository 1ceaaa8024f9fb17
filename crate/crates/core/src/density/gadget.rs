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

//! Absorber gadgets: `F` with outside vertices attached to `Γ`, and chains
//! of `F` copies linked through outside vertices.

use super::DensityError;
use crate::graph::{Graph, VertexSubset, DEFAULT_BITSET_CAP};

fn check_gamma(f: &Graph, gamma: &VertexSubset) -> Result<(), DensityError> {
    match gamma.iter().find(|&v| v >= f.n()) {
        Some(v) => Err(DensityError::Gadget(format!("Γ vertex {v} outside F on {} vertices", f.n()))),
        None => Ok(()),
    }
}

/// `F` plus `count` pairwise nonadjacent vertices, each adjacent exactly to
/// `Γ`; the new ids are `v(F)..v(F)+count`.
pub fn attach_outside(f: &Graph, gamma: &VertexSubset, count: usize) -> Result<Graph, DensityError> {
    check_gamma(f, gamma)?;
    let n = f.n();
    let mut adj: Vec<Vec<usize>> = (0..n).map(|v| f.neighbors(v).to_vec()).collect();
    adj.resize(n + count, Vec::new());
    for o in n..n + count {
        for g in gamma.iter() {
            adj[o].push(g);
            adj[g].push(o);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    Ok(Graph::from_adjacency(adj, DEFAULT_BITSET_CAP))
}

/// `F_Γ⁺`: three outside vertices on `Γ`.
pub fn build_f_gamma_plus(f: &Graph, gamma: &VertexSubset) -> Result<Graph, DensityError> {
    attach_outside(f, gamma, 3)
}

#[derive(Clone, Debug)]
pub struct GadgetSpec {
    pub base: Graph,
    pub gamma: VertexSubset,
    pub length: usize,
    pub max_degree: usize,
}

impl GadgetSpec {
    pub fn new(base: Graph, gamma: VertexSubset, length: usize, max_degree: usize) -> Result<Self, DensityError> {
        check_gamma(&base, &gamma)?;
        if gamma.len() > max_degree {
            return Err(DensityError::Gadget(format!("|Γ| = {} exceeds Δ = {max_degree}", gamma.len())));
        }
        if let Some(v) = gamma.iter().find(|&v| base.degree(v) + 1 > max_degree) {
            return Err(DensityError::Gadget(format!(
                "Γ vertex {v} has degree {} in F, above Δ - 1",
                base.degree(v)
            )));
        }
        if !length.is_multiple_of(2) {
            return Err(DensityError::Gadget(format!("path length {length} is odd")));
        }
        Ok(GadgetSpec { base, gamma, length, max_degree })
    }
}

/// Hosted layout of an `F_Γ`-path.
#[derive(Clone, Debug)]
pub struct PathGadget {
    pub graph: Graph,
    pub endpoints: (usize, usize),
    /// First id of each `F` copy; copy `i` occupies `offset..offset + v(F)`.
    pub copy_offsets: Vec<usize>,
    /// Outside vertices in path order, endpoints included.
    pub outside: Vec<usize>,
}

/// Lays out the path as `o_0, copy_1, o_1, copy_2, ..., o_{L/2}` in id order.
pub fn path_gadget(layout: &GadgetSpec) -> PathGadget {
    let f = &layout.base;
    let vf = f.n();
    let copies = layout.length / 2;
    let total = copies * (vf + 1) + 1;
    let mut adj = vec![Vec::new(); total];
    let mut copy_offsets = Vec::with_capacity(copies);
    let mut outside = Vec::with_capacity(copies + 1);
    for j in 0..=copies {
        outside.push(j * (vf + 1));
        if j < copies {
            copy_offsets.push(j * (vf + 1) + 1);
        }
    }
    for &off in &copy_offsets {
        for (u, v) in f.edges() {
            adj[off + u].push(off + v);
            adj[off + v].push(off + u);
        }
    }
    for (j, &o) in outside.iter().enumerate() {
        let neighbors_copies = [j.checked_sub(1), (j < copies).then_some(j)];
        for c in neighbors_copies.into_iter().flatten() {
            for g in layout.gamma.iter() {
                adj[o].push(copy_offsets[c] + g);
                adj[copy_offsets[c] + g].push(o);
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    PathGadget {
        graph: Graph::from_adjacency(adj, DEFAULT_BITSET_CAP),
        endpoints: (outside[0], outside[copies]),
        copy_offsets,
        outside,
    }
}

pub fn build_f_gamma_path(layout: &GadgetSpec) -> (Graph, (usize, usize)) {
    let g = path_gadget(layout);
    (g.graph, g.endpoints)
}
