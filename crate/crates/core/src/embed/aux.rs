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

use super::EmbedError;
use crate::graph::{Graph, VertexSubset};
use crate::matching::hopcroft_karp;

/// `B_G(L, U)`: left sets, right vertices, edge iff the set lies in the
/// right vertex's neighborhood.
#[derive(Clone, Debug)]
pub struct AuxBipartite {
    /// `(owner label, sorted host set)` per left vertex.
    pub left: Vec<(usize, Vec<usize>)>,
    pub right: Vec<usize>,
    /// Indices into `right` per left vertex.
    pub adj: Vec<Vec<usize>>,
}

impl AuxBipartite {
    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, left: usize, host_vertex: usize) -> bool {
        self.adj[left].iter().any(|&r| self.right[r] == host_vertex)
    }
}

pub fn aux_bipartite(host: &Graph, family: &[(usize, Vec<usize>)], u: &VertexSubset) -> Result<AuxBipartite, EmbedError> {
    for (index, (_, set)) in family.iter().enumerate() {
        if set.is_empty() {
            return Err(EmbedError::EmptySet { index });
        }
        if let Some(&v) = set.iter().find(|&&v| v >= host.n()) {
            return Err(EmbedError::Vertex { v, n: host.n() });
        }
    }
    if let Some(v) = u.iter().find(|&v| v >= host.n()) {
        return Err(EmbedError::Vertex { v, n: host.n() });
    }
    let right: Vec<usize> = u.iter().collect();
    let adj = family
        .iter()
        .map(|(_, set)| {
            let cn = host.common_neighbors(set);
            (0..right.len()).filter(|&i| cn.contains(right[i])).collect()
        })
        .collect();
    let left = family
        .iter()
        .map(|(o, s)| {
            let mut s = s.clone();
            s.sort_unstable();
            (*o, s)
        })
        .collect();
    Ok(AuxBipartite { left, right, adj })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingResult {
    /// Host vertex matched to each left set.
    pub assignment: Vec<Option<usize>>,
    pub size: usize,
    /// Left indices violating Hall's condition, when not left-saturating.
    pub deficient: Option<Vec<usize>>,
}

impl MatchingResult {
    pub fn saturates_left(&self) -> bool {
        self.size == self.assignment.len()
    }
}

pub fn max_matching(b: &AuxBipartite) -> MatchingResult {
    let m = hopcroft_karp(&b.adj, b.right.len());
    MatchingResult {
        assignment: m.left_to_right.iter().map(|r| r.map(|r| b.right[r])).collect(),
        size: m.size,
        deficient: m.deficient,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        let mut e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        e.push((0, n - 1));
        Graph::new(n, &e).unwrap()
    }

    #[test]
    fn singleton_family_is_host_edges() {
        let g = cycle(6);
        let b = aux_bipartite(&g, &[(0, vec![2])], &VertexSubset::full(6)).unwrap();
        assert_eq!(b.adj[0].iter().map(|&r| b.right[r]).collect::<Vec<_>>(), vec![1, 3]);
    }

    #[test]
    fn c5_common_neighbor() {
        let g = cycle(5);
        let u = VertexSubset::new(5, [1, 3, 4]).unwrap();
        let b = aux_bipartite(&g, &[(7, vec![0, 2])], &u).unwrap();
        assert_eq!(b.edge_count(), 1);
        assert!(b.has_edge(0, 1));
        assert_eq!(b.left[0].0, 7);
    }

    #[test]
    fn complete_host_is_complete_bipartite() {
        let e: Vec<_> = (0..8).flat_map(|u| (u + 1..8).map(move |v| (u, v))).collect();
        let g = Graph::new(8, &e).unwrap();
        let u = VertexSubset::new(8, [4, 5, 6, 7]).unwrap();
        let fam: Vec<_> = (0..4).map(|i| (i, vec![i])).collect();
        let b = aux_bipartite(&g, &fam, &u).unwrap();
        assert_eq!(b.edge_count(), 16);
        assert!(max_matching(&b).saturates_left());
    }

    #[test]
    fn empty_set_rejected() {
        let g = cycle(4);
        assert!(matches!(
            aux_bipartite(&g, &[(0, vec![1]), (1, vec![])], &VertexSubset::full(4)),
            Err(EmbedError::EmptySet { index: 1 })
        ));
    }

    #[test]
    fn star_deficiency() {
        let g = Graph::new(4, &[(0, 3), (1, 3), (2, 3)]).unwrap();
        let fam: Vec<_> = (0..3).map(|i| (i, vec![i])).collect();
        let b = aux_bipartite(&g, &fam, &VertexSubset::new(4, [3]).unwrap()).unwrap();
        let m = max_matching(&b);
        assert_eq!(m.size, 1);
        assert_eq!(m.deficient.unwrap().len(), 3);
    }
}
