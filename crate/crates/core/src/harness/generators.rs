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


//! Target families for experiments.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::random::{sample_gnp, RandomSource};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("pairing model produced collisions in {0} attempts")]
    Collisions(usize),
}

/// Target family. Every family respects the maximum degree passed to
/// [`generate_test_graph`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetSpec {
    /// `⌊n / (Δ+1)⌋` disjoint copies of `K_{Δ+1}`.
    CliqueFactor,
    /// `P_n^d`.
    PowerPath { d: usize },
    RandomForest,
    RandomRegular,
    CycleUnion {
        #[serde(default = "default_min_cycle")]
        min_len: usize,
        #[serde(default = "default_max_cycle")]
        max_len: usize,
    },
    ErdosRenyiCapped { p: f64 },
    /// Clique factor on a `share` of the vertices, cycles on the rest.
    CliqueCycles {
        #[serde(default = "default_share")]
        share: f64,
    },
}

fn default_min_cycle() -> usize {
    5
}

fn default_max_cycle() -> usize {
    12
}

fn default_share() -> f64 {
    0.75
}

fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
    Graph::new(n, edges).expect("generator emits a simple graph")
}

fn cliques(count: usize, size: usize, offset: usize, edges: &mut Vec<(usize, usize)>) {
    for c in 0..count {
        let base = offset + c * size;
        for i in 0..size {
            for j in i + 1..size {
                edges.push((base + i, base + j));
            }
        }
    }
}

pub fn clique_factor(n: usize, delta: usize) -> Graph {
    let mut e = Vec::new();
    cliques(n / (delta + 1), delta + 1, 0, &mut e);
    graph(n, &e)
}

pub fn power_path(n: usize, d: usize) -> Graph {
    let e: Vec<_> = (0..n).flat_map(|i| (i + 1..n.min(i + d + 1)).map(move |j| (i, j))).collect();
    graph(n, &e)
}

/// Random recursive forest: vertex `i` joins a uniform earlier vertex of
/// degree below `Δ` with probability 0.95, labels shuffled.
pub fn random_forest(n: usize, delta: usize, rng: &mut impl Rng) -> Graph {
    let mut deg = vec![0usize; n];
    let mut e = Vec::new();
    for i in 1..n {
        if delta == 0 || !rng.random_bool(0.95) {
            continue;
        }
        let open: Vec<usize> = (0..i).filter(|&j| deg[j] < delta).collect();
        if let Some(&j) = open.choose(rng) {
            deg[i] += 1;
            deg[j] += 1;
            e.push((j, i));
        }
    }
    relabel(n, &e, rng)
}

fn relabel(n: usize, edges: &[(usize, usize)], rng: &mut impl Rng) -> Graph {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let e: Vec<_> = edges.iter().map(|&(u, v)| (perm[u].min(perm[v]), perm[u].max(perm[v]))).collect();
    graph(n, &e)
}

/// Pairing model, restarting on loops or repeated pairs.
pub fn random_regular(n: usize, delta: usize, rng: &mut impl Rng) -> Result<Graph, GenError> {
    const ATTEMPTS: usize = 1000;
    if (n * delta) % 2 == 1 || (n > 0 && delta >= n) {
        return Err(GenError::Infeasible(format!("no {delta}-regular graph on {n} vertices")));
    }
    'attempt: for _ in 0..ATTEMPTS {
        let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, delta)).collect();
        points.shuffle(rng);
        let mut seen = std::collections::HashSet::new();
        let mut e = Vec::with_capacity(points.len() / 2);
        for pair in points.chunks(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'attempt;
            }
            e.push((u, v));
        }
        return Ok(graph(n, &e));
    }
    Err(GenError::Collisions(ATTEMPTS))
}

/// Disjoint cycles with lengths uniform in `[min_len, max_len]`; fewer than
/// `min_len` leftover vertices stay isolated.
pub fn cycle_union(n: usize, min_len: usize, max_len: usize, rng: &mut impl Rng) -> Result<Graph, GenError> {
    if min_len < 3 || max_len < min_len {
        return Err(GenError::Infeasible(format!("cycle lengths [{min_len}, {max_len}]")));
    }
    let mut e = Vec::new();
    let mut at = 0;
    while n - at >= min_len {
        let mut len = rng.random_range(min_len..=max_len).min(n - at);
        if n - at - len < min_len && n - at <= max_len {
            len = n - at;
        }
        for i in 0..len {
            let (u, v) = (at + i, at + (i + 1) % len);
            e.push((u.min(v), u.max(v)));
        }
        at += len;
    }
    Ok(graph(n, &e))
}

/// `G(n, p)` with edges dropped, in random order, once an endpoint is full.
pub fn erdos_renyi_capped(n: usize, delta: usize, p: f64, src: RandomSource) -> Result<Graph, GenError> {
    let g = sample_gnp(n, p, src.child(0)).map_err(|e| GenError::Infeasible(e.to_string()))?;
    let mut edges: Vec<(usize, usize)> = g.edges().collect();
    edges.shuffle(&mut src.child(1).rng());
    let mut deg = vec![0usize; n];
    let mut kept: Vec<(usize, usize)> = edges
        .into_iter()
        .filter(|&(u, v)| {
            let ok = deg[u] < delta && deg[v] < delta;
            if ok {
                deg[u] += 1;
                deg[v] += 1;
            }
            ok
        })
        .collect();
    kept.sort_unstable();
    Ok(graph(n, &kept))
}

/// `K_{Δ+1}`-factor on the first `⌊share·n⌋` vertices (rounded down to a
/// multiple of `Δ+1`), cycles of length 5 to 12 on the rest.
pub fn clique_cycles(n: usize, delta: usize, share: f64, rng: &mut impl Rng) -> Result<Graph, GenError> {
    if !(0.0..=1.0).contains(&share) || delta < 2 {
        return Err(GenError::Infeasible(format!("share {share}, Δ = {delta}")));
    }
    let k = delta + 1;
    let count = ((share * n as f64).floor() as usize) / k;
    let mut e = Vec::new();
    cliques(count, k, 0, &mut e);
    let rest = cycle_union(n - count * k, 5, 12, rng)?;
    e.extend(rest.edges().map(|(u, v)| (u + count * k, v + count * k)));
    Ok(graph(n, &e))
}

pub fn generate_test_graph(family: &TargetSpec, n: usize, delta: usize, src: RandomSource) -> Result<Graph, GenError> {
    let mut rng = src.rng();
    match *family {
        TargetSpec::CliqueFactor => Ok(clique_factor(n, delta)),
        TargetSpec::PowerPath { d } => {
            if 2 * d > delta {
                return Err(GenError::Infeasible(format!("P^{d} has degree {} > Δ = {delta}", 2 * d)));
            }
            Ok(power_path(n, d))
        }
        TargetSpec::RandomForest => Ok(random_forest(n, delta, &mut rng)),
        TargetSpec::RandomRegular => random_regular(n, delta, &mut rng),
        TargetSpec::CycleUnion { min_len, max_len } => {
            if delta < 2 {
                return Err(GenError::Infeasible("cycles need Δ >= 2".into()));
            }
            cycle_union(n, min_len, max_len, &mut rng)
        }
        TargetSpec::ErdosRenyiCapped { p } => erdos_renyi_capped(n, delta, p, src),
        TargetSpec::CliqueCycles { share } => clique_cycles(n, delta, share, &mut rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_k4s() {
        let g = clique_factor(12, 3);
        assert_eq!(g.edge_count(), 18);
        assert!((0..12).all(|v| g.degree(v) == 3));
        assert!(g.has_edge(4, 7) && !g.has_edge(3, 4));
    }

    #[test]
    fn square_of_p6() {
        let g = power_path(6, 2);
        assert_eq!(g.edge_count(), 5 + 4);
        assert_eq!(g.max_degree(), 4);
        assert_eq!((0..6).map(|v| g.degree(v)).collect::<Vec<_>>(), vec![2, 3, 4, 4, 3, 2]);
    }

    #[test]
    fn regular_is_regular() {
        let g = random_regular(100, 3, &mut RandomSource::new(1, 0).rng()).unwrap();
        assert!((0..100).all(|v| g.degree(v) == 3));
        assert!(matches!(random_regular(5, 3, &mut RandomSource::new(1, 0).rng()), Err(GenError::Infeasible(_))));
    }

    #[test]
    fn families_respect_delta() {
        let specs = [
            TargetSpec::RandomForest,
            TargetSpec::CycleUnion { min_len: 5, max_len: 12 },
            TargetSpec::ErdosRenyiCapped { p: 0.05 },
            TargetSpec::CliqueCycles { share: 0.75 },
        ];
        for (i, s) in specs.iter().enumerate() {
            let g = generate_test_graph(s, 200, 3, RandomSource::new(i as u64, 0)).unwrap();
            assert_eq!(g.n(), 200);
            assert!(g.max_degree() <= 3, "{s:?}");
        }
    }

    #[test]
    fn cycles_cover_and_forest_is_acyclic() {
        let g = cycle_union(100, 5, 12, &mut RandomSource::new(3, 0).rng()).unwrap();
        assert!((0..100).all(|v| g.degree(v) == 2));
        let f = random_forest(300, 3, &mut RandomSource::new(4, 0).rng());
        let comps = f.components_within(&{
            let mut b = fixedbitset::FixedBitSet::with_capacity(300);
            b.insert_range(..);
            b
        });
        assert_eq!(f.edge_count() + comps.len(), 300);
    }
}
