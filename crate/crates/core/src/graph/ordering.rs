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

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use super::{Graph, GraphError, VertexSubset};

/// Ordering of `V(H) \ S` with a recorded back-degree bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderingResult {
    pub order: Vec<usize>,
    /// BFS layer of each position when produced by [`bfs_layer_ordering`].
    pub layers: Option<Vec<usize>>,
    pub layer_count: usize,
    pub back_degree_bound: usize,
}

impl OrderingResult {
    /// Back-degree of every position into `S` and earlier positions.
    pub fn back_degrees(&self, h: &Graph, s: &VertexSubset) -> Vec<usize> {
        let mut placed = s.to_bits();
        placed.grow(h.n());
        self.order
            .iter()
            .map(|&v| {
                let b = h.degree_into(v, &placed);
                placed.insert(v);
                b
            })
            .collect()
    }
}

#[derive(Clone, Debug, Error)]
#[error("no ordering with back-degree <= {d}; {} vertices each have more than {d} neighbors in S plus the witness", witness.len())]
pub struct InfeasibleOrdering {
    pub d: usize,
    pub witness: VertexSubset,
}

/// Greedy distance-separated subset of `s`: scan in ascending id, keep a
/// vertex, delete its radius-`k` ball. Kept vertices are pairwise at
/// distance at least `k + 1`.
pub fn distance_k_independent_set(h: &Graph, s: &VertexSubset, k: usize) -> VertexSubset {
    let mut deleted = FixedBitSet::with_capacity(h.n());
    let mut kept = Vec::new();
    for v in s.iter() {
        if deleted.contains(v) {
            continue;
        }
        kept.push(v);
        for u in h.ball(v, k) {
            deleted.insert(u);
        }
    }
    VertexSubset { universe: s.universe(), members: kept }
}

/// Smallest-last peeling of `V(H) \ S`: the back-degree of each vertex is
/// its degree into `S` plus the vertices still unpeeled when it is removed.
pub fn degeneracy_ordering_with_anchor(
    h: &Graph,
    s: &VertexSubset,
    d: usize,
) -> Result<OrderingResult, InfeasibleOrdering> {
    let in_s = s.to_bits();
    let mut deg = vec![0usize; h.n()];
    let mut queue = BTreeSet::new();
    for v in (0..h.n()).filter(|&v| !in_s.contains(v)) {
        deg[v] = h.degree(v);
        queue.insert((deg[v], v));
    }
    let mut removed = FixedBitSet::with_capacity(h.n());
    let mut rev = Vec::with_capacity(queue.len());
    while let Some(&(dv, v)) = queue.first() {
        if dv > d {
            return Err(InfeasibleOrdering {
                d,
                witness: VertexSubset::new(h.n(), queue.iter().map(|&(_, u)| u)).unwrap(),
            });
        }
        queue.pop_first();
        removed.insert(v);
        rev.push(v);
        for &u in h.neighbors(v) {
            if !in_s.contains(u) && !removed.contains(u) {
                queue.remove(&(deg[u], u));
                deg[u] -= 1;
                queue.insert((deg[u], u));
            }
        }
    }
    rev.reverse();
    Ok(OrderingResult { order: rev, layers: None, layer_count: 0, back_degree_bound: d })
}

/// Layers `D_0 = seeds`, `D_j = N(D_{j-1})` minus earlier layers, inside
/// `H \ S`, emitted as `D_{l-1}, ..., D_0` (ascending id within a layer).
/// Every vertex outside `D_0` then has a neighbor later in the order.
pub fn bfs_layer_ordering(
    h: &Graph,
    s: &VertexSubset,
    seeds: &VertexSubset,
) -> Result<OrderingResult, GraphError> {
    let in_s = s.to_bits();
    let mut layer = vec![usize::MAX; h.n()];
    let mut frontier: Vec<usize> = seeds.iter().filter(|&v| !in_s.contains(v)).collect();
    for &v in &frontier {
        layer[v] = 0;
    }
    let mut layers: Vec<Vec<usize>> = Vec::new();
    while !frontier.is_empty() {
        let j = layers.len();
        let mut next = Vec::new();
        for &u in &frontier {
            for &w in h.neighbors(u) {
                if !in_s.contains(w) && layer[w] == usize::MAX {
                    layer[w] = j + 1;
                    next.push(w);
                }
            }
        }
        frontier.sort_unstable();
        layers.push(std::mem::take(&mut frontier));
        frontier = next;
    }
    if let Some(v) = (0..h.n()).find(|&v| !in_s.contains(v) && layer[v] == usize::MAX) {
        let mut keep = in_s.clone();
        keep.toggle_range(..);
        let comp = h.components_within(&keep).into_iter().find(|c| c.contains(&v)).unwrap();
        return Err(GraphError::UnreachableComponent { component: comp });
    }
    let layer_count = layers.len();
    let mut order = Vec::new();
    let mut pos_layer = Vec::new();
    for (j, l) in layers.into_iter().enumerate().rev() {
        pos_layer.extend(std::iter::repeat_n(j, l.len()));
        order.extend(l);
    }
    let mut out = OrderingResult { order, layers: Some(pos_layer), layer_count, back_degree_bound: 0 };
    out.back_degree_bound = out.back_degrees(h, s).into_iter().max().unwrap_or(0);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::bfs_distance;

    fn path(n: usize) -> Graph {
        Graph::new(n, &(1..n).map(|i| (i - 1, i)).collect::<Vec<_>>()).unwrap()
    }

    fn path_square(n: usize) -> Graph {
        let mut e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        e.extend((2..n).map(|i| (i - 2, i)));
        Graph::new(n, &e).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let mut e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        e.push((0, n - 1));
        Graph::new(n, &e).unwrap()
    }

    #[test]
    fn greedy_on_path() {
        let p = path(10);
        let out = distance_k_independent_set(&p, &VertexSubset::full(10), 2);
        assert_eq!(out.as_slice(), &[0, 3, 6, 9]);
        for u in out.iter() {
            for v in out.iter().filter(|&v| v != u) {
                assert!(bfs_distance(&p, u, v).unwrap().unwrap() >= 2);
            }
        }
        let single = VertexSubset::new(10, [4]).unwrap();
        assert_eq!(distance_k_independent_set(&p, &single, 3), single);
        assert!(distance_k_independent_set(&p, &VertexSubset::empty(10), 3).is_empty());
    }

    #[test]
    fn degeneracy_examples() {
        let forest = Graph::new(6, &[(0, 1), (1, 2), (3, 4)]).unwrap();
        assert!(degeneracy_ordering_with_anchor(&forest, &VertexSubset::empty(6), 1).is_ok());

        let k4 = Graph::new(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let err = degeneracy_ordering_with_anchor(&k4, &VertexSubset::empty(4), 2).unwrap_err();
        assert_eq!(err.witness, VertexSubset::full(4));

        let sq = path_square(6);
        let s = VertexSubset::empty(6);
        let ord = degeneracy_ordering_with_anchor(&sq, &s, 2).unwrap();
        assert!(ord.back_degrees(&sq, &s).iter().all(|&b| b <= 2));
        let manual = OrderingResult { order: (0..6).collect(), layers: None, layer_count: 0, back_degree_bound: 2 };
        assert!(manual.back_degrees(&sq, &s).iter().all(|&b| b <= 2));
    }

    #[test]
    fn anchor_counts_toward_back_degree() {
        // Star center in S: each leaf has back-degree 1.
        let star = Graph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let s = VertexSubset::new(4, [0]).unwrap();
        assert!(degeneracy_ordering_with_anchor(&star, &s, 0).is_err());
        let ord = degeneracy_ordering_with_anchor(&star, &s, 1).unwrap();
        assert_eq!(ord.order.len(), 3);
        assert!(ord.back_degrees(&star, &s).iter().all(|&b| b == 1));
    }

    #[test]
    fn layers_on_path_and_cycle() {
        let p = path(5);
        let ord = bfs_layer_ordering(&p, &VertexSubset::empty(5), &VertexSubset::new(5, [0]).unwrap()).unwrap();
        assert_eq!(ord.order, vec![4, 3, 2, 1, 0]);
        assert_eq!(ord.layer_count, 5);

        let c = cycle(6);
        let s = VertexSubset::empty(6);
        let ord = bfs_layer_ordering(&c, &s, &VertexSubset::new(6, [0, 1]).unwrap()).unwrap();
        assert_eq!(ord.layer_count, 3);
        assert_eq!(ord.layers.as_ref().unwrap(), &vec![2, 2, 1, 1, 0, 0]);
        assert_eq!(ord.order, vec![3, 4, 2, 5, 0, 1]);
        for (i, &v) in ord.order.iter().enumerate() {
            if ord.layers.as_ref().unwrap()[i] > 0 {
                assert!(ord.order[i + 1..].iter().any(|&u| c.has_edge(u, v)));
            }
        }
    }

    #[test]
    fn layers_reject_unseeded_component() {
        let g = Graph::new(4, &[(0, 1), (2, 3)]).unwrap();
        let err = bfs_layer_ordering(&g, &VertexSubset::empty(4), &VertexSubset::new(4, [0]).unwrap());
        assert!(matches!(err, Err(GraphError::UnreachableComponent { component }) if component == vec![2, 3]));
        let all_s = VertexSubset::full(4);
        assert!(bfs_layer_ordering(&g, &all_s, &VertexSubset::empty(4)).unwrap().order.is_empty());
    }
}
