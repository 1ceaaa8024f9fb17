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


//! Layered S-embedding: each vertex goes to a random candidate in the first
//! reservoir layer that has one.

use fixedbitset::FixedBitSet;
use rand::Rng;
use serde::Serialize;

use super::{EmbedError, PartialEmbedding};
use crate::graph::{degeneracy_ordering_with_anchor, Graph, VertexSubset};
use crate::random::RandomSource;

/// Layers `W_1..W_k` carved out of a reserved set; `W_0` is everything else
/// outside `X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reservoir {
    n: usize,
    layers: Vec<Vec<usize>>,
    /// `J_j` for `j = 0..=k`.
    occupancy: Vec<usize>,
}

impl Reservoir {
    /// `max(1, ceil(2 ln n / ln ln n))`, with `ln ln n` clamped to at least 1.
    pub fn layer_count(n: usize) -> usize {
        let ln = (n.max(2) as f64).ln();
        let k = (2.0 * ln / ln.ln().max(1.0)).ceil() as usize;
        k.max(1)
    }

    /// Consecutive chunks of `w` of size `|w| / (k + 1)`.
    pub fn new(n: usize, w: &VertexSubset) -> Self {
        let k = Self::layer_count(n);
        let size = w.len() / (k + 1);
        let layers = (0..k).map(|j| w.as_slice()[j * size..(j + 1) * size].to_vec()).collect();
        Reservoir { n, layers, occupancy: vec![0; k + 1] }
    }

    pub fn from_layers(n: usize, layers: Vec<Vec<usize>>) -> Result<Self, EmbedError> {
        let mut seen = FixedBitSet::with_capacity(n);
        for &v in layers.iter().flatten() {
            if v >= n {
                return Err(EmbedError::Vertex { v, n });
            }
            if seen.put(v) {
                return Err(EmbedError::Precondition(format!("vertex {v} in two reservoir layers")));
            }
        }
        let k = layers.len();
        Ok(Reservoir { n, layers, occupancy: vec![0; k + 1] })
    }

    pub fn k(&self) -> usize {
        self.layers.len()
    }

    /// `W_1..W_k`.
    pub fn layers(&self) -> &[Vec<usize>] {
        &self.layers
    }

    pub fn occupancy(&self) -> &[usize] {
        &self.occupancy
    }

    fn members(&self) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(self.n);
        b.extend(self.layers.iter().flatten().copied());
        b
    }

    /// Layer index of host vertex `g` given `X`, or `None` for `g` in `X`.
    pub fn layer_of(&self, g: usize, x: &VertexSubset) -> Option<usize> {
        if x.contains(g) {
            return None;
        }
        Some(self.layers.iter().position(|l| l.contains(&g)).map_or(0, |j| j + 1))
    }

    /// Bitsets `W_0, W_1, ..., W_k`.
    fn layer_bits(&self, x: &FixedBitSet) -> Vec<FixedBitSet> {
        let mut w0 = self.members();
        w0.union_with(x);
        w0.toggle_range(..);
        let mut out = vec![w0];
        for l in &self.layers {
            let mut b = FixedBitSet::with_capacity(self.n);
            b.extend(l.iter().copied());
            out.push(b);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepTrace {
    pub position: usize,
    pub vertex: usize,
    pub l_size: usize,
    pub layer: usize,
    pub image: usize,
}

#[derive(Clone, Debug)]
pub struct SEmbedOutcome {
    pub phi: PartialEmbedding,
    pub trace: Vec<StepTrace>,
    /// `J_j` per layer, `j = 0..=k`.
    pub occupancy: Vec<usize>,
}

/// Extends `phi` to all of `V(H) \ S` along a back-degree-`d` ordering.
#[allow(clippy::too_many_arguments)]
pub fn s_embed(
    host: &Graph,
    h: &Graph,
    s: &VertexSubset,
    phi: PartialEmbedding,
    x: &VertexSubset,
    res: &mut Reservoir,
    d: usize,
    gamma: f64,
    src: RandomSource,
) -> Result<SEmbedOutcome, EmbedError> {
    let ordering = degeneracy_ordering_with_anchor(h, s, d).map_err(|e| EmbedError::Ordering(e.to_string()))?;
    s_embed_ordered(host, h, s, phi, x, res, &ordering.order, gamma, src)
}

/// [`s_embed`] along a caller-supplied ordering of unmapped vertices outside
/// `S`. Back-neighbors of a vertex are its neighbors in `S` and earlier in
/// `order`; vertices in neither stay unmapped. The back-degree of `order` is
/// not checked here.
#[allow(clippy::too_many_arguments)]
pub fn s_embed_ordered(
    host: &Graph,
    h: &Graph,
    s: &VertexSubset,
    mut phi: PartialEmbedding,
    x: &VertexSubset,
    res: &mut Reservoir,
    order: &[usize],
    gamma: f64,
    src: RandomSource,
) -> Result<SEmbedOutcome, EmbedError> {
    let n = host.n();
    if phi.target_n() != h.n() || phi.host_n() != n {
        return Err(EmbedError::Precondition("embedding dimensions do not match graphs".into()));
    }
    let allowed = (n as f64 - x.len() as f64 - gamma * n as f64).floor().max(0.0) as usize;
    if s.len() + order.len() > allowed {
        return Err(EmbedError::Capacity { target: s.len() + order.len(), allowed });
    }
    let x_bits = {
        let mut b = x.to_bits();
        b.grow(n);
        b
    };
    let reserved = res.members();
    for v in s.iter() {
        let g = phi.get(v).ok_or_else(|| EmbedError::Precondition(format!("S vertex {v} unmapped")))?;
        if x_bits.contains(g) || reserved.contains(g) {
            return Err(EmbedError::Precondition(format!("S vertex {v} mapped into W or X")));
        }
    }
    let mut in_order = FixedBitSet::with_capacity(h.n());
    for &v in order {
        if v >= h.n() || s.contains(v) || phi.get(v).is_some() || in_order.put(v) {
            return Err(EmbedError::Precondition(format!("order entry {v} is invalid")));
        }
    }
    let layers = res.layer_bits(&x_bits);
    let mut free = FixedBitSet::with_capacity(n);
    free.insert_range(..);
    for (_, g) in phi.pairs() {
        free.set(g, false);
    }
    let mut done = s.to_bits();
    done.grow(h.n());
    let mut rng = src.rng();
    let mut trace = Vec::with_capacity(order.len());
    for (position, &v) in order.iter().enumerate() {
        let l: Vec<usize> = h.neighbors(v).iter().filter(|&&u| done.contains(u)).map(|&u| phi.get(u).unwrap()).collect();
        let mut cn = host.common_neighbors(&l);
        cn.intersect_with(&free);
        let mut picked = None;
        for (j, layer) in layers.iter().enumerate() {
            let count = cn.intersection_count(layer);
            if count > 0 {
                let r = rng.random_range(0..count);
                picked = Some((j, cn.intersection(layer).nth(r).unwrap()));
                break;
            }
        }
        let Some((layer, g)) = picked else {
            let all = host.common_neighbors(&l);
            return Err(EmbedError::NoCandidate {
                position,
                vertex: v,
                l_size: l.len(),
                per_layer: layers.iter().map(|b| all.intersection_count(b)).collect(),
            });
        };
        phi.assign(v, g)?;
        free.set(g, false);
        done.insert(v);
        res.occupancy[layer] += 1;
        trace.push(StepTrace { position, vertex: v, l_size: l.len(), layer, image: g });
    }
    Ok(SEmbedOutcome { phi, trace, occupancy: res.occupancy.clone() })
}
