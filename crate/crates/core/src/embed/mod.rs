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

//! Embedding machinery: partial embeddings, auxiliary bipartite graphs,
//! copy searches, the layered S-embedding, and the two full pipelines.

mod aux;
mod delta;
pub mod pipeline;
mod sembed;
pub(crate) mod search;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, VertexSubset};

pub use aux::{aux_bipartite, max_matching, AuxBipartite, MatchingResult};
pub use delta::{delta_s_embed, strip_matching, DeltaError, DeltaOutcome, DeltaStage, MatchingRemoval};
pub use pipeline::{
    embed_bounded, embed_degenerate, embed_direct, EmbedConfig, EmbedOutcome, ExposureMode, Phase, PipelineError, Route, TraceEvent,
};
pub use sembed::{s_embed, s_embed_ordered, Reservoir, SEmbedOutcome, StepTrace};
pub use search::{find_anchored_copies, find_anchored_edges, find_f_matching, SearchParams};

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("target vertex {h} already mapped")]
    TargetTaken { h: usize },
    #[error("host vertex {g} already occupied")]
    HostTaken { g: usize },
    #[error("empty set at index {index} of the family")]
    EmptySet { index: usize },
    #[error("vertex {v} outside [0, {n})")]
    Vertex { v: usize, n: usize },
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("capacity: target has {target} vertices, host allows {allowed}")]
    Capacity { target: usize, allowed: usize },
    #[error("no candidate for vertex {vertex} at position {position}: |L| = {l_size}, per-layer common neighbors {per_layer:?}")]
    NoCandidate { position: usize, vertex: usize, l_size: usize, per_layer: Vec<usize> },
    #[error("F-matching found {found} of {wanted} copies")]
    FMatching { found: usize, wanted: usize },
    #[error("anchored search could not complete tuple {index}")]
    Anchored { index: usize },
    #[error("anchored edges: no edge for pair {index}")]
    AnchoredEdges { index: usize },
    #[error("ordering: {0}")]
    Ordering(String),
}

/// Injective partial map target -> host with reverse occupancy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialEmbedding {
    forward: Vec<Option<usize>>,
    reverse: Vec<Option<usize>>,
    len: usize,
}

impl PartialEmbedding {
    pub fn new(target_n: usize, host_n: usize) -> Self {
        PartialEmbedding { forward: vec![None; target_n], reverse: vec![None; host_n], len: 0 }
    }

    pub fn from_pairs(target_n: usize, host_n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, EmbedError> {
        let mut e = Self::new(target_n, host_n);
        for (h, g) in pairs {
            e.assign(h, g)?;
        }
        Ok(e)
    }

    pub fn target_n(&self) -> usize {
        self.forward.len()
    }

    pub fn host_n(&self) -> usize {
        self.reverse.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_total(&self) -> bool {
        self.len == self.forward.len()
    }

    pub fn assign(&mut self, h: usize, g: usize) -> Result<(), EmbedError> {
        if h >= self.forward.len() {
            return Err(EmbedError::Vertex { v: h, n: self.forward.len() });
        }
        if g >= self.reverse.len() {
            return Err(EmbedError::Vertex { v: g, n: self.reverse.len() });
        }
        if self.forward[h].is_some() {
            return Err(EmbedError::TargetTaken { h });
        }
        if self.reverse[g].is_some() {
            return Err(EmbedError::HostTaken { g });
        }
        self.forward[h] = Some(g);
        self.reverse[g] = Some(h);
        self.len += 1;
        Ok(())
    }

    pub fn unassign(&mut self, h: usize) -> Option<usize> {
        let g = self.forward[h].take()?;
        self.reverse[g] = None;
        self.len -= 1;
        Some(g)
    }

    pub fn get(&self, h: usize) -> Option<usize> {
        self.forward[h]
    }

    pub fn preimage(&self, g: usize) -> Option<usize> {
        self.reverse[g]
    }

    pub fn is_free(&self, g: usize) -> bool {
        self.reverse[g].is_none()
    }

    /// Unoccupied host vertices.
    pub fn free(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.reverse.len()).filter(|&g| self.reverse[g].is_none())
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.forward.iter().enumerate().filter_map(|(h, g)| g.map(|g| (h, g)))
    }

    /// Images of `vertices`, which must all be mapped.
    pub fn images(&self, vertices: impl IntoIterator<Item = usize>) -> Vec<usize> {
        vertices.into_iter().map(|h| self.forward[h].expect("vertex mapped")).collect()
    }

    /// Forward map as a dense vector (`usize::MAX` for unmapped).
    pub fn to_vec(&self) -> Vec<usize> {
        self.forward.iter().map(|g| g.unwrap_or(usize::MAX)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scope {
    Full,
    /// Skip edges with both endpoints in the set.
    SkipPocketEdges(VertexSubset),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    Unmapped { h: usize },
    NotInjective { g: usize },
    MissingEdge { h: (usize, usize), g: (usize, usize) },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

pub fn verify_embedding(host: &Graph, h: &Graph, phi: &PartialEmbedding, scope: &Scope) -> Verdict {
    let mut owner = vec![usize::MAX; host.n()];
    for v in 0..h.n() {
        let Some(g) = phi.get(v) else {
            return Verdict::Unmapped { h: v };
        };
        if g >= host.n() || std::mem::replace(&mut owner[g], v) != usize::MAX {
            return Verdict::NotInjective { g };
        }
    }
    for (a, b) in h.edges() {
        if let Scope::SkipPocketEdges(s) = scope {
            if s.contains(a) && s.contains(b) {
                continue;
            }
        }
        let (ga, gb) = (phi.get(a).unwrap(), phi.get(b).unwrap());
        if !host.has_edge(ga, gb) {
            return Verdict::MissingEdge { h: (a, b), g: (ga, gb) };
        }
    }
    Verdict::Pass
}
