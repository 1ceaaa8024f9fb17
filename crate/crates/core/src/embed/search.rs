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

//! Randomized backtracking searches for copies of small patterns.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{EmbedError, PartialEmbedding};
use crate::graph::{Graph, VertexSubset};
use crate::random::RandomSource;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchParams {
    /// Candidate trials allowed per single-copy search.
    pub node_budget: usize,
    /// Full restarts with fresh streams.
    pub retries: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams { node_budget: 20_000, retries: 5 }
    }
}

/// Pattern vertices in search order: fixed ones first, then greedily the
/// vertex with most already-ordered neighbors (ties: higher degree, lower id).
fn plan(pattern: &Graph, fixed: &[usize]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let n = pattern.n();
    let mut placed = vec![false; n];
    let mut order: Vec<usize> = fixed.to_vec();
    for &v in fixed {
        placed[v] = true;
    }
    let mut links = vec![0usize; n];
    for &v in fixed {
        for &u in pattern.neighbors(v) {
            links[u] += 1;
        }
    }
    while order.len() < n {
        let next = (0..n)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| (links[v], pattern.degree(v), std::cmp::Reverse(v)))
            .unwrap();
        placed[next] = true;
        order.push(next);
        for &u in pattern.neighbors(next) {
            links[u] += 1;
        }
    }
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let back = order
        .iter()
        .map(|&v| pattern.neighbors(v).iter().copied().filter(|&u| pos[u] < pos[v]).collect())
        .collect();
    (order, back)
}

struct Dfs<'a, R: Rng> {
    host: &'a Graph,
    order: Vec<usize>,
    back: Vec<Vec<usize>>,
    pool: &'a FixedBitSet,
    map: Vec<usize>,
    used: FixedBitSet,
    rng: &'a mut R,
    budget: usize,
}

impl<R: Rng> Dfs<'_, R> {
    fn go(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let v = self.order[depth];
        let images: Vec<usize> = self.back[depth].iter().map(|&u| self.map[u]).collect();
        let mut cand = self.host.common_neighbors(&images);
        cand.intersect_with(self.pool);
        cand.difference_with(&self.used);
        let mut list: Vec<usize> = cand.ones().collect();
        list.shuffle(self.rng);
        for g in list {
            if self.budget == 0 {
                return false;
            }
            self.budget -= 1;
            self.map[v] = g;
            self.used.insert(g);
            if self.go(depth + 1) {
                return true;
            }
            self.used.set(g, false);
        }
        self.map[v] = usize::MAX;
        false
    }
}

/// One copy of `pattern` with `fixed` pattern -> host assignments and every
/// other vertex drawn from `pool`; `None` when the budget runs out.
pub(crate) fn find_copy<R: Rng>(
    host: &Graph,
    pattern: &Graph,
    fixed: &[(usize, usize)],
    pool: &FixedBitSet,
    rng: &mut R,
    budget: usize,
) -> Option<Vec<usize>> {
    for (i, &(a, ga)) in fixed.iter().enumerate() {
        for &(b, gb) in &fixed[..i] {
            if ga == gb || (pattern.has_edge(a, b) && !host.has_edge(ga, gb)) {
                return None;
            }
        }
    }
    let fixed_ids: Vec<usize> = fixed.iter().map(|&(a, _)| a).collect();
    let (order, back) = plan(pattern, &fixed_ids);
    let mut map = vec![usize::MAX; pattern.n()];
    let mut used = FixedBitSet::with_capacity(host.n());
    for &(a, ga) in fixed {
        map[a] = ga;
        used.insert(ga);
    }
    // Edges from fixed vertices into later ones are checked by the search;
    // fixed-fixed edges were checked above.
    let start = fixed.len();
    let mut dfs = Dfs {
        host,
        order: order[start..].to_vec(),
        back: back[start..].to_vec(),
        pool,
        map,
        used,
        rng,
        budget,
    };
    dfs.go(0).then_some(dfs.map)
}

fn to_embedding(map: &[usize], host_n: usize) -> PartialEmbedding {
    PartialEmbedding::from_pairs(map.len(), host_n, map.iter().copied().enumerate()).expect("copy is injective")
}

/// `count` vertex-disjoint copies of `f` inside `allowed`.
pub fn find_f_matching(
    host: &Graph,
    f: &Graph,
    count: usize,
    allowed: &VertexSubset,
    src: RandomSource,
    params: SearchParams,
) -> Result<Vec<PartialEmbedding>, (EmbedError, Vec<PartialEmbedding>)> {
    if count * f.n() > allowed.len() {
        return Err((
            EmbedError::Precondition(format!("{count} copies of {} vertices exceed |allowed| = {}", f.n(), allowed.len())),
            Vec::new(),
        ));
    }
    let mut best: Vec<Vec<usize>> = Vec::new();
    for attempt in 0..=params.retries as u64 {
        let mut rng = src.child(attempt).rng();
        let mut pool = allowed.to_bits();
        pool.grow(host.n());
        let mut copies = Vec::with_capacity(count);
        while copies.len() < count {
            match find_copy(host, f, &[], &pool, &mut rng, params.node_budget) {
                Some(map) => {
                    for &g in &map {
                        pool.set(g, false);
                    }
                    copies.push(map);
                }
                None => break,
            }
        }
        if copies.len() == count {
            return Ok(copies.iter().map(|m| to_embedding(m, host.n())).collect());
        }
        if copies.len() > best.len() {
            best = copies;
        }
    }
    let found = best.len();
    Err((
        EmbedError::FMatching { found, wanted: count },
        best.iter().map(|m| to_embedding(m, host.n())).collect(),
    ))
}

/// One copy of `f` per tuple in `tuples`, mapping `x[j] -> tuple[j]`, with
/// all other vertices in `w` and pairwise disjoint.
pub fn find_anchored_copies(
    host: &Graph,
    f: &Graph,
    x: &[usize],
    tuples: &[Vec<usize>],
    w: &VertexSubset,
    src: RandomSource,
    params: SearchParams,
) -> Result<Vec<PartialEmbedding>, EmbedError> {
    for (i, &a) in x.iter().enumerate() {
        if a >= f.n() {
            return Err(EmbedError::Vertex { v: a, n: f.n() });
        }
        if x[..i].iter().any(|&b| b == a || f.has_edge(a, b)) {
            return Err(EmbedError::Precondition("anchor tuple is not an independent set".into()));
        }
    }
    let mut anchor_bits = FixedBitSet::with_capacity(host.n());
    for t in tuples {
        if t.len() != x.len() {
            return Err(EmbedError::Precondition("tuple length differs from anchor tuple".into()));
        }
        for &g in t {
            if g >= host.n() {
                return Err(EmbedError::Vertex { v: g, n: host.n() });
            }
            if anchor_bits.put(g) {
                return Err(EmbedError::Precondition(format!("host vertex {g} appears in two tuples")));
            }
        }
    }
    anchored_maps(host, f, x, tuples, w, src, params).map(|maps| maps.iter().map(|m| to_embedding(m, host.n())).collect())
}

/// Anchored copies as dense maps; tuples may share host vertices, internal
/// vertices stay pairwise disjoint and inside `w` minus every anchor.
pub(crate) fn anchored_maps(
    host: &Graph,
    f: &Graph,
    x: &[usize],
    tuples: &[Vec<usize>],
    w: &VertexSubset,
    src: RandomSource,
    params: SearchParams,
) -> Result<Vec<Vec<usize>>, EmbedError> {
    let internal = f.n() - x.len();
    let mut anchor_bits = FixedBitSet::with_capacity(host.n());
    anchor_bits.extend(tuples.iter().flatten().copied());
    if tuples.len() * internal > w.len() {
        return Err(EmbedError::Precondition(format!(
            "{} tuples need {} internal vertices, |W| = {}",
            tuples.len(),
            tuples.len() * internal,
            w.len()
        )));
    }
    let mut stuck = 0;
    for attempt in 0..=params.retries as u64 {
        let mut rng = src.child(attempt).rng();
        let mut pool = w.to_bits();
        pool.grow(host.n());
        pool.difference_with(&anchor_bits);
        let mut maps = Vec::with_capacity(tuples.len());
        for (i, t) in tuples.iter().enumerate() {
            let fixed: Vec<(usize, usize)> = x.iter().copied().zip(t.iter().copied()).collect();
            match find_copy(host, f, &fixed, &pool, &mut rng, params.node_budget) {
                Some(map) => {
                    for (v, &g) in map.iter().enumerate() {
                        if !x.contains(&v) {
                            pool.set(g, false);
                        }
                    }
                    maps.push(map);
                }
                None => {
                    stuck = stuck.max(i);
                    break;
                }
            }
        }
        if maps.len() == tuples.len() {
            return Ok(maps);
        }
    }
    Err(EmbedError::Anchored { index: stuck })
}

/// Vertex-disjoint host edges `x_i y_i` inside `W ∪ W'` with
/// `A_i ⊆ N(x_i)` and `B_i ⊆ N(y_i)`.
pub fn find_anchored_edges(
    host: &Graph,
    pairs: &[(Vec<usize>, Vec<usize>)],
    w: &VertexSubset,
    w_prime: &VertexSubset,
    delta: usize,
    src: RandomSource,
    params: SearchParams,
) -> Result<Vec<(usize, usize)>, EmbedError> {
    if pairs.is_empty() {
        return Ok(Vec::new());
    }
    let need = delta.saturating_sub(1);
    let mut appearances: HashMap<usize, usize> = HashMap::new();
    for (i, (a, b)) in pairs.iter().enumerate() {
        if a.len() != need || b.len() != need {
            return Err(EmbedError::Precondition(format!(
                "pair {i} has |A| = {}, |B| = {}, expected Δ - 1 = {need}",
                a.len(),
                b.len()
            )));
        }
        let mut seen: Vec<usize> = a.iter().chain(b).copied().collect();
        seen.sort_unstable();
        seen.dedup();
        for g in seen {
            let c = appearances.entry(g).or_insert(0);
            *c += 1;
            if *c > delta {
                return Err(EmbedError::Precondition(format!("host vertex {g} appears in more than Δ = {delta} pairs")));
            }
        }
    }
    if 2 * pairs.len() > w_prime.len() {
        return Err(EmbedError::Precondition(format!("2t = {} exceeds |W'| = {}", 2 * pairs.len(), w_prime.len())));
    }
    let mut pool = w.to_bits();
    pool.grow(host.n());
    pool.union_with(&w_prime.to_bits());
    let cands: Vec<(FixedBitSet, FixedBitSet)> = pairs
        .iter()
        .map(|(a, b)| {
            let mut xa = host.common_neighbors(a);
            xa.intersect_with(&pool);
            let mut yb = host.common_neighbors(b);
            yb.intersect_with(&pool);
            (xa, yb)
        })
        .collect();
    if let Some(i) = cands.iter().position(|(xa, yb)| xa.is_clear() || yb.is_clear()) {
        return Err(EmbedError::AnchoredEdges { index: i });
    }
    let mut stuck = 0;
    for attempt in 0..=params.retries as u64 {
        let mut rng = src.child(attempt).rng();
        let mut order: Vec<usize> = (0..pairs.len()).collect();
        order.shuffle(&mut rng);
        order.sort_by_key(|&i| cands[i].0.count_ones(..) * cands[i].1.count_ones(..));
        let mut state = EdgeSearch {
            host,
            cands: &cands,
            order: &order,
            used: FixedBitSet::with_capacity(host.n()),
            chosen: vec![(0, 0); pairs.len()],
            budget: params.node_budget,
            deepest: 0,
        };
        if state.go(0, &mut rng) {
            return Ok(state.chosen);
        }
        stuck = order[state.deepest.min(order.len() - 1)];
    }
    Err(EmbedError::AnchoredEdges { index: stuck })
}

struct EdgeSearch<'a> {
    host: &'a Graph,
    cands: &'a [(FixedBitSet, FixedBitSet)],
    order: &'a [usize],
    used: FixedBitSet,
    chosen: Vec<(usize, usize)>,
    budget: usize,
    deepest: usize,
}

impl EdgeSearch<'_> {
    fn go<R: Rng>(&mut self, depth: usize, rng: &mut R) -> bool {
        self.deepest = self.deepest.max(depth);
        if depth == self.order.len() {
            return true;
        }
        let i = self.order[depth];
        let (xa, yb) = &self.cands[i];
        let mut edges = Vec::new();
        for x in xa.ones().filter(|&x| !self.used.contains(x)) {
            for &y in self.host.neighbors(x) {
                if yb.contains(y) && !self.used.contains(y) {
                    edges.push((x, y));
                }
            }
        }
        edges.shuffle(rng);
        for (x, y) in edges {
            if self.budget == 0 {
                return false;
            }
            self.budget -= 1;
            self.used.insert(x);
            self.used.insert(y);
            self.chosen[i] = (x, y);
            if self.go(depth + 1, rng) {
                return true;
            }
            self.used.set(x, false);
            self.used.set(y, false);
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::sample_gnp;

    fn complete(n: usize) -> Graph {
        let e: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph::new(n, &e).unwrap()
    }

    fn is_copy(host: &Graph, f: &Graph, e: &PartialEmbedding) -> bool {
        f.edges().all(|(a, b)| host.has_edge(e.get(a).unwrap(), e.get(b).unwrap()))
    }

    #[test]
    fn edges_in_complete_graph() {
        let host = complete(11);
        let edge = complete(2);
        let r = find_f_matching(&host, &edge, 5, &VertexSubset::full(11), RandomSource::new(1, 0), SearchParams::default()).unwrap();
        assert_eq!(r.len(), 5);
        let mut all: Vec<usize> = r.iter().flat_map(|e| e.to_vec()).collect();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), 10);
    }

    #[test]
    fn triangle_free_host_fails() {
        let c5 = Graph::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        let err = find_f_matching(&c5, &complete(3), 1, &VertexSubset::full(5), RandomSource::new(1, 0), SearchParams::default())
            .unwrap_err();
        assert!(matches!(err.0, EmbedError::FMatching { found: 0, wanted: 1 }));
    }

    #[test]
    fn k4_matching_in_dense_random_graph() {
        let host = sample_gnp(500, 0.5, RandomSource::new(4, 0)).unwrap();
        let k4 = complete(4);
        let r = find_f_matching(&host, &k4, 50, &VertexSubset::full(500), RandomSource::new(4, 1), SearchParams::default()).unwrap();
        assert_eq!(r.len(), 50);
        assert!(r.iter().all(|e| is_copy(&host, &k4, e)));
    }

    #[test]
    fn anchored_paths_in_complete_graph() {
        let host = complete(10);
        let p3 = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let tuples = vec![vec![0, 1], vec![2, 3]];
        let w = VertexSubset::new(10, 4..10).unwrap();
        let r = find_anchored_copies(&host, &p3, &[0, 2], &tuples, &w, RandomSource::new(2, 0), SearchParams::default()).unwrap();
        assert_eq!(r.len(), 2);
        for (e, t) in r.iter().zip(&tuples) {
            assert_eq!((e.get(0), e.get(2)), (Some(t[0]), Some(t[1])));
            assert!(w.contains(e.get(1).unwrap()));
        }
        assert_ne!(r[0].get(1), r[1].get(1));
        let none = find_anchored_copies(&host, &p3, &[0, 2], &[], &w, RandomSource::new(2, 0), SearchParams::default()).unwrap();
        assert!(none.is_empty());
        assert!(find_anchored_copies(&host, &p3, &[0, 1], &tuples, &w, RandomSource::new(2, 0), SearchParams::default()).is_err());
    }

    #[test]
    fn anchored_edges() {
        let host = complete(12);
        let w = VertexSubset::new(12, 4..8).unwrap();
        let wp = VertexSubset::new(12, 8..12).unwrap();
        let p = SearchParams::default();
        assert!(find_anchored_edges(&host, &[], &w, &wp, 2, RandomSource::new(0, 0), p).unwrap().is_empty());
        let pairs = vec![(vec![0], vec![1]), (vec![2], vec![3])];
        let r = find_anchored_edges(&host, &pairs, &w, &wp, 2, RandomSource::new(0, 0), p).unwrap();
        let mut used: Vec<usize> = r.iter().flat_map(|&(x, y)| [x, y]).collect();
        used.sort_unstable();
        used.dedup();
        assert_eq!(used.len(), 4);
        assert!(used.iter().all(|&g| g >= 4));
        // Vertex 0 in three pairs with Δ = 2.
        let crowded = vec![(vec![0], vec![1]), (vec![0], vec![2]), (vec![3], vec![0])];
        assert!(matches!(
            find_anchored_edges(&host, &crowded, &w, &wp, 2, RandomSource::new(0, 0), p),
            Err(EmbedError::Precondition(_))
        ));
    }
}
