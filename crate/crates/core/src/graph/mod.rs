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

//! Simple undirected graphs with dense ids, plus the structural utilities
//! shared by the rest of the crate.

mod canon;
pub mod io;
mod ordering;

use std::collections::VecDeque;

use fixedbitset::FixedBitSet;
use thiserror::Error;

pub use canon::{canonical_rooted_form, canonical_rooted_labeling, CanonicalForm, CANONICAL_CAP};
pub use ordering::{
    bfs_layer_ordering, degeneracy_ordering_with_anchor, distance_k_independent_set,
    InfeasibleOrdering, OrderingResult,
};

/// Graphs up to this many vertices also keep one neighbor bitset per vertex.
pub const DEFAULT_BITSET_CAP: usize = 4096;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("edge ({u}, {v}) has an endpoint outside [0, {n})")]
    EndpointOutOfRange { u: usize, v: usize, n: usize },
    #[error("self-loop at vertex {v}")]
    SelfLoop { v: usize },
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: usize, v: usize },
    #[error("vertex {v} outside [0, {n})")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("vertex {v} listed twice in a subset")]
    DuplicateMember { v: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("canonical form limited to {cap} vertices, got {n}")]
    CanonicalCap { n: usize, cap: usize },
    #[error("component {component:?} is not reachable from the seed set")]
    UnreachableComponent { component: Vec<usize> },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Immutable simple graph on vertices `0..n`.
#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    m: usize,
    adj: Vec<Vec<usize>>,
    bits: Option<Vec<FixedBitSet>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.adj == other.adj
    }
}

impl Eq for Graph {}

/// Validating constructor; see [`Graph::new`].
pub fn build_graph(n: usize, edges: &[(usize, usize)]) -> Result<Graph, GraphError> {
    Graph::new(n, edges)
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        Self::with_bitset_cap(n, edges, DEFAULT_BITSET_CAP)
    }

    pub fn with_bitset_cap(
        n: usize,
        edges: &[(usize, usize)],
        cap: usize,
    ) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::EndpointOutOfRange { u, v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop { v });
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let (a, b) = if u < w[0] { (u, w[0]) } else { (w[0], u) };
                return Err(GraphError::DuplicateEdge { u: a, v: b });
            }
        }
        Ok(Self::from_adjacency(adj, cap))
    }

    pub fn empty(n: usize) -> Self {
        Self::from_adjacency(vec![Vec::new(); n], DEFAULT_BITSET_CAP)
    }

    /// Trusted constructor: lists must be sorted, symmetric and loop-free.
    pub(crate) fn from_adjacency(adj: Vec<Vec<usize>>, cap: usize) -> Self {
        let n = adj.len();
        let m = adj.iter().map(Vec::len).sum::<usize>() / 2;
        let bits = (n <= cap).then(|| {
            adj.iter()
                .map(|list| {
                    let mut b = FixedBitSet::with_capacity(n);
                    for &v in list {
                        b.insert(v);
                    }
                    b
                })
                .collect()
        });
        Graph { n, m, adj, bits }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Sorted neighbor list.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        match &self.bits {
            Some(bits) => bits[u].contains(v),
            None => self.adj[u].binary_search(&v).is_ok(),
        }
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn neighbor_bits(&self, v: usize) -> FixedBitSet {
        match &self.bits {
            Some(bits) => bits[v].clone(),
            None => {
                let mut b = FixedBitSet::with_capacity(self.n);
                for &u in &self.adj[v] {
                    b.insert(u);
                }
                b
            }
        }
    }

    /// Intersection of the neighborhoods of `set`; every vertex when `set` is empty.
    pub fn common_neighbors(&self, set: &[usize]) -> FixedBitSet {
        let mut acc = FixedBitSet::with_capacity(self.n);
        match set.split_first() {
            None => acc.insert_range(..),
            Some((&first, rest)) => {
                acc = self.neighbor_bits(first);
                for &v in rest {
                    match &self.bits {
                        Some(bits) => acc.intersect_with(&bits[v]),
                        None => acc.intersect_with(&self.neighbor_bits(v)),
                    }
                }
            }
        }
        acc
    }

    /// Number of neighbors of `v` inside `mask`.
    pub fn degree_into(&self, v: usize, mask: &FixedBitSet) -> usize {
        self.adj[v].iter().filter(|&&u| mask.contains(u)).count()
    }

    /// Induced subgraph on `vertices` (relabeled `0..len` in the given order).
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let adj = vertices
            .iter()
            .map(|&v| {
                let mut list: Vec<usize> = self.adj[v]
                    .iter()
                    .filter_map(|&u| (index[u] != usize::MAX).then_some(index[u]))
                    .collect();
                list.sort_unstable();
                list
            })
            .collect();
        Graph::from_adjacency(adj, DEFAULT_BITSET_CAP)
    }

    /// Graph on the same vertex set with every edge of `self` and `other`.
    pub fn union(&self, other: &Graph) -> Graph {
        assert_eq!(self.n, other.n, "union of graphs on different vertex sets");
        let adj = (0..self.n)
            .map(|v| {
                let mut list = self.adj[v].clone();
                list.extend_from_slice(&other.adj[v]);
                list.sort_unstable();
                list.dedup();
                list
            })
            .collect();
        Graph::from_adjacency(adj, DEFAULT_BITSET_CAP)
    }

    /// Same graph with `extra` isolated vertices appended.
    pub fn with_isolated(&self, extra: usize) -> Graph {
        let mut adj = self.adj.clone();
        adj.resize(self.n + extra, Vec::new());
        Graph::from_adjacency(adj, DEFAULT_BITSET_CAP)
    }

    pub fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.n {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { v, n: self.n })
        }
    }

    /// Vertices within distance `radius` of `src`, `src` included, in BFS order.
    pub fn ball(&self, src: usize, radius: usize) -> Vec<usize> {
        let mut dist = std::collections::HashMap::new();
        dist.insert(src, 0usize);
        let mut out = vec![src];
        let mut head = 0;
        while head < out.len() {
            let u = out[head];
            head += 1;
            let du = dist[&u];
            if du == radius {
                continue;
            }
            for &w in &self.adj[u] {
                if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(w) {
                    e.insert(du + 1);
                    out.push(w);
                }
            }
        }
        out
    }

    /// BFS distances from `src` (`usize::MAX` when unreachable).
    pub fn distances_from(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Multi-source BFS distances.
    pub fn distances_from_set(&self, sources: &[usize]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] == usize::MAX {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Connected components of the subgraph induced by `keep`, each sorted,
    /// listed by smallest vertex.
    pub fn components_within(&self, keep: &FixedBitSet) -> Vec<Vec<usize>> {
        let mut seen = FixedBitSet::with_capacity(self.n);
        let mut comps = Vec::new();
        for s in keep.ones() {
            if seen.contains(s) {
                continue;
            }
            seen.insert(s);
            let mut comp = vec![s];
            let mut head = 0;
            while head < comp.len() {
                let u = comp[head];
                head += 1;
                for &w in &self.adj[u] {
                    if keep.contains(w) && !seen.contains(w) {
                        seen.insert(w);
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }
}

/// Shortest-path length between `u` and `v`; `None` when disconnected.
pub fn bfs_distance(g: &Graph, u: usize, v: usize) -> Result<Option<usize>, GraphError> {
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    if u == v {
        return Ok(Some(0));
    }
    let d = g.distances_from(u)[v];
    Ok((d != usize::MAX).then_some(d))
}

/// Sorted set of distinct vertex ids below `universe`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub struct VertexSubset {
    universe: usize,
    members: Vec<usize>,
}

impl VertexSubset {
    pub fn new(universe: usize, members: impl IntoIterator<Item = usize>) -> Result<Self, GraphError> {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        if let Some(&v) = members.iter().find(|&&v| v >= universe) {
            return Err(GraphError::VertexOutOfRange { v, n: universe });
        }
        if let Some(w) = members.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateMember { v: w[0] });
        }
        Ok(VertexSubset { universe, members })
    }

    pub fn empty(universe: usize) -> Self {
        VertexSubset { universe, members: Vec::new() }
    }

    pub fn full(universe: usize) -> Self {
        VertexSubset { universe, members: (0..universe).collect() }
    }

    pub fn from_bits(bits: &FixedBitSet) -> Self {
        VertexSubset { universe: bits.len(), members: bits.ones().collect() }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.members
    }

    pub fn to_bits(&self) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(self.universe);
        for &v in &self.members {
            b.insert(v);
        }
        b
    }

    pub fn complement(&self) -> Self {
        let bits = self.to_bits();
        VertexSubset {
            universe: self.universe,
            members: (0..self.universe).filter(|&v| !bits.contains(v)).collect(),
        }
    }
}
