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


//! S-embedding for maximum degree `Δ` with back-degree `Δ - 1`: strip one
//! edge from every component of `H \ S` that is `Δ`-regular in `H`, embed
//! the rest, then put the stripped edges back on anchored host edges.

use std::fmt;

use fixedbitset::FixedBitSet;
use serde::Serialize;
use thiserror::Error;

use super::search::{find_anchored_edges, SearchParams};
use super::sembed::{s_embed_ordered, Reservoir, SEmbedOutcome};
use super::{EmbedError, PartialEmbedding};
use crate::graph::{bfs_layer_ordering, degeneracy_ordering_with_anchor, Graph, OrderingResult, VertexSubset};
use crate::random::RandomSource;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DeltaStage {
    Strip,
    Order,
    SEmbed,
    Reinsert,
}

impl fmt::Display for DeltaStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DeltaStage::Strip => "strip",
            DeltaStage::Order => "order",
            DeltaStage::SEmbed => "s_embed",
            DeltaStage::Reinsert => "reinsert",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
#[error("{stage}: {source}")]
pub struct DeltaError {
    pub stage: DeltaStage,
    #[source]
    pub source: EmbedError,
}

fn at(stage: DeltaStage) -> impl Fn(EmbedError) -> DeltaError {
    move |source| DeltaError { stage, source }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MatchingRemoval {
    /// `(a_i, b_i)` per stripped component.
    pub edges: Vec<(usize, usize)>,
    /// `(A_i, B_i)`, filled once the neighbors are embedded.
    pub anchors: Vec<(Vec<usize>, Vec<usize>)>,
    /// Host edges `(x_i, y_i)` receiving `(a_i, b_i)`.
    pub images: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct DeltaOutcome {
    pub phi: PartialEmbedding,
    pub removal: MatchingRemoval,
    pub ordering: OrderingResult,
    pub sembed: SEmbedOutcome,
}

/// One edge per component of `H \ S` whose vertices all have degree `Δ` in `H`:
/// `a` = the smallest vertex, `b` = its smallest neighbor outside `S`.
pub fn strip_matching(h: &Graph, s: &VertexSubset, delta: usize) -> Vec<(usize, usize)> {
    let mut keep = s.to_bits();
    keep.grow(h.n());
    keep.toggle_range(..);
    h.components_within(&keep)
        .into_iter()
        .filter(|c| c.iter().all(|&v| h.degree(v) == delta))
        .filter_map(|c| {
            let a = *c.iter().min().unwrap();
            h.neighbors(a).iter().copied().find(|&u| !s.contains(u)).map(|b| (a, b))
        })
        .collect()
}

/// Extends `phi` (defined exactly on `S`) to all of `H`, avoiding `X`.
/// `w` is split in half: the first half feeds the reservoir layers, the
/// second half is kept for the reinserted edges.
#[allow(clippy::too_many_arguments)]
pub fn delta_s_embed(
    host: &Graph,
    h: &Graph,
    s: &VertexSubset,
    phi: PartialEmbedding,
    x: &VertexSubset,
    w: &VertexSubset,
    delta: usize,
    gamma: f64,
    src: RandomSource,
    params: SearchParams,
) -> Result<DeltaOutcome, DeltaError> {
    let n = host.n();
    let strip = at(DeltaStage::Strip);
    if delta < 2 {
        return Err(strip(EmbedError::Precondition(format!("Δ = {delta} < 2"))));
    }
    if let Some(v) = (0..h.n()).find(|&v| h.degree(v) > delta) {
        return Err(strip(EmbedError::Precondition(format!("vertex {v} has degree {} > Δ", h.degree(v)))));
    }
    let s_bits = {
        let mut b = s.to_bits();
        b.grow(h.n());
        b
    };
    if let Some(v) = (0..h.n()).find(|&v| !s_bits.contains(v) && h.degree_into(v, &s_bits) > delta - 1) {
        return Err(strip(EmbedError::Precondition(format!("vertex {v} has more than Δ - 1 neighbors in S"))));
    }
    if let Some(g) = w.iter().find(|&g| x.contains(g)) {
        return Err(strip(EmbedError::Precondition(format!("host vertex {g} in both W and X"))));
    }
    let allowed = (n as f64 - x.len() as f64 - gamma * n as f64).floor().max(0.0) as usize;
    if h.n() > allowed {
        return Err(strip(EmbedError::Capacity { target: h.n(), allowed }));
    }

    let edges = strip_matching(h, s, delta);
    let mut m_bits = FixedBitSet::with_capacity(h.n());
    for &(a, b) in &edges {
        m_bits.insert(a);
        m_bits.insert(b);
    }
    let kept: Vec<(usize, usize)> = h.edges().filter(|&(u, v)| !m_bits.contains(u) && !m_bits.contains(v)).collect();
    let h_prime = Graph::new(h.n(), &kept).expect("subgraph of a valid graph");

    let order = at(DeltaStage::Order);
    let mut sm_bits = s_bits.clone();
    sm_bits.union_with(&m_bits);
    let sm = VertexSubset::from_bits(&sm_bits);
    let seeds: Vec<usize> = (0..h.n()).filter(|&v| !sm_bits.contains(v) && h_prime.degree(v) < delta).collect();
    let seeds = VertexSubset::new(h.n(), seeds).expect("distinct vertices");
    let ordering = bfs_layer_ordering(&h_prime, &sm, &seeds).map_err(|e| order(EmbedError::Ordering(e.to_string())))?;
    if ordering.back_degree_bound > delta - 1 {
        return Err(order(EmbedError::Ordering(format!(
            "layer ordering has back-degree {} > Δ - 1",
            ordering.back_degree_bound
        ))));
    }
    degeneracy_ordering_with_anchor(&h_prime, &sm, delta - 1).map_err(|e| order(EmbedError::Ordering(e.to_string())))?;

    let half = w.len() / 2;
    let res_part = VertexSubset::new(n, w.as_slice()[..half].iter().copied()).unwrap();
    let edge_pool = VertexSubset::new(n, w.as_slice()[half..].iter().copied()).unwrap();
    let mut res = Reservoir::new(n, &res_part);
    let x_inner = VertexSubset::new(n, x.iter().chain(edge_pool.iter())).unwrap();
    let sembed = s_embed_ordered(
        host,
        &h_prime,
        s,
        phi,
        &x_inner,
        &mut res,
        &ordering.order,
        0.0,
        src.child(0),
    )
    .map_err(at(DeltaStage::SEmbed))?;
    let mut phi = sembed.phi.clone();

    let reinsert = at(DeltaStage::Reinsert);
    let anchors: Vec<(Vec<usize>, Vec<usize>)> = edges
        .iter()
        .map(|&(a, b)| {
            let side = |u: usize, other: usize| phi.images(h.neighbors(u).iter().copied().filter(|&v| v != other));
            (side(a, b), side(b, a))
        })
        .collect();
    let mut w_prime_bits = FixedBitSet::with_capacity(n);
    w_prime_bits.extend(phi.free());
    for g in x.iter().chain(edge_pool.iter()) {
        w_prime_bits.set(g, false);
    }
    let w_prime = VertexSubset::from_bits(&w_prime_bits);
    let images =
        find_anchored_edges(host, &anchors, &edge_pool, &w_prime, delta, src.child(1), params).map_err(&reinsert)?;
    for (&(a, b), &(xa, yb)) in edges.iter().zip(&images) {
        phi.assign(a, xa).map_err(&reinsert)?;
        phi.assign(b, yb).map_err(&reinsert)?;
    }
    Ok(DeltaOutcome { phi, removal: MatchingRemoval { edges, anchors, images }, ordering, sembed })
}
