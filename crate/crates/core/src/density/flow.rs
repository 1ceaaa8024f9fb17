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

//! Densest subgraph by parametric min cut. For `λ = p/q` the closure
//! network (source -> edge node with capacity `q`, edge node -> endpoints
//! unbounded, vertex -> sink with capacity `p`) yields a set maximizing
//! `q·e(T) - p·|T|`. Newton (Dinkelbach) steps on `λ` reach the optimum
//! exactly in integer arithmetic.

use std::collections::VecDeque;

use super::{better, DensityError, DensityValue};
use crate::graph::{Graph, VertexSubset};

const INF: i64 = i64::MAX / 4;

struct Dinic {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl Dinic {
    fn new(n: usize) -> Self {
        Dinic { head: vec![Vec::new(); n], to: Vec::new(), cap: Vec::new(), level: vec![0; n], iter: vec![0; n] }
    }

    fn add(&mut self, u: usize, v: usize, c: i64) {
        self.head[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(c);
        self.head[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0);
    }

    fn bfs(&mut self, s: usize) {
        self.level.fill(-1);
        self.level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &e in &self.head[u] {
                let v = self.to[e];
                if self.cap[e] > 0 && self.level[v] < 0 {
                    self.level[v] = self.level[u] + 1;
                    q.push_back(v);
                }
            }
        }
    }

    fn dfs(&mut self, u: usize, t: usize, f: i64) -> i64 {
        if u == t {
            return f;
        }
        while self.iter[u] < self.head[u].len() {
            let e = self.head[u][self.iter[u]];
            let v = self.to[e];
            if self.cap[e] > 0 && self.level[v] == self.level[u] + 1 {
                let d = self.dfs(v, t, f.min(self.cap[e]));
                if d > 0 {
                    self.cap[e] -= d;
                    self.cap[e ^ 1] += d;
                    return d;
                }
            }
            self.iter[u] += 1;
        }
        0
    }

    fn run(&mut self, s: usize, t: usize) {
        loop {
            self.bfs(s);
            if self.level[t] < 0 {
                return;
            }
            self.iter.fill(0);
            while self.dfs(s, t, INF) > 0 {}
        }
    }

    /// Source side of the minimum cut found by [`Dinic::run`].
    fn source_side(&mut self, s: usize) -> Vec<bool> {
        self.bfs(s);
        self.level.iter().map(|&l| l >= 0).collect()
    }
}

struct Instance<'a> {
    g: &'a Graph,
    offset: usize,
    allowed: Vec<bool>,
    edges: Vec<(usize, usize)>,
}

impl Instance<'_> {
    fn edges_in(&self, set: &[bool]) -> u64 {
        self.edges.iter().filter(|&&(u, v)| set[u] && set[v]).count() as u64
    }

    /// Set maximizing `q·e(T) - p·|T|` among allowed supersets of `forced`.
    fn closure(&self, p: u64, q: u64, forced: &[bool]) -> Vec<bool> {
        let n = self.g.n();
        let m = self.edges.len();
        let (s, t) = (n + m, n + m + 1);
        let mut net = Dinic::new(n + m + 2);
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            net.add(s, n + i, q as i64);
            net.add(n + i, u, INF);
            net.add(n + i, v, INF);
        }
        for v in (0..n).filter(|&v| self.allowed[v]) {
            net.add(v, t, p as i64);
            if forced[v] {
                net.add(s, v, INF);
            }
        }
        net.run(s, t);
        let side = net.source_side(s);
        (0..n).map(|v| self.allowed[v] && side[v]).collect()
    }

    /// Newton iteration on `λ` for supersets of `forced`, which must satisfy
    /// `|forced| > offset`, or `|forced| == offset` with no edges inside.
    fn newton(&self, forced: &[bool]) -> Option<(u64, u64, Vec<usize>)> {
        let c = self.offset as u64;
        let mut cur: Vec<bool> = self.allowed.clone();
        let mut size = cur.iter().filter(|&&b| b).count() as u64;
        if size <= c {
            return None;
        }
        let mut e = self.edges_in(&cur);
        loop {
            let (p, q) = (e, size - c);
            let next = self.closure(p, q, forced);
            let ns = next.iter().filter(|&&b| b).count() as u64;
            let ne = self.edges_in(&next);
            // Improvement iff q·e(T) - p·(|T| - c) > 0.
            let gain = i128::from(q) * i128::from(ne) - i128::from(p) * (i128::from(ns) - i128::from(c));
            if gain <= 0 {
                break;
            }
            cur = next;
            size = ns;
            e = ne;
        }
        (e > 0).then(|| (e, size - c, (0..cur.len()).filter(|&v| cur[v]).collect()))
    }

    /// Enumerates extra forced vertices (ascending, so each set once) until
    /// the forced set can no longer be a spurious optimum.
    fn search(&self, forced: &mut Vec<bool>, count: usize, last: usize, best: &mut Option<(u64, u64, Vec<usize>)>) {
        if count > self.offset || (count == self.offset && self.edges_in(forced) == 0) {
            if let Some(found) = self.newton(forced) {
                if best.as_ref().is_none_or(|b| better((found.0, found.1, &found.2), (b.0, b.1, &b.2))) {
                    *best = Some(found);
                }
            }
            return;
        }
        for v in last..self.g.n() {
            if self.allowed[v] && !forced[v] {
                forced[v] = true;
                self.search(forced, count + 1, v + 1, best);
                forced[v] = false;
            }
        }
    }
}

/// Maximizes `e(F') / (v(F') - offset)` over subgraphs containing `forced`,
/// avoiding `forbidden`, with at least one edge and a positive denominator.
pub fn densest_subgraph_flow(
    f: &Graph,
    offset: usize,
    forced: &VertexSubset,
    forbidden: &VertexSubset,
) -> Result<DensityValue, DensityError> {
    let n = f.n();
    for v in forced.iter().chain(forbidden.iter()) {
        f.check_vertex(v)?;
    }
    if let Some(v) = forced.iter().find(|&v| forbidden.contains(v)) {
        return Err(DensityError::Overlap { v });
    }
    let mut allowed = vec![true; n];
    for v in forbidden.iter() {
        allowed[v] = false;
    }
    let edges = f.edges().filter(|&(u, v)| allowed[u] && allowed[v]).collect();
    let inst = Instance { g: f, offset, allowed, edges };
    let mut mark = vec![false; n];
    for v in forced.iter() {
        mark[v] = true;
    }
    let mut best = None;
    inst.search(&mut mark, forced.len(), 0, &mut best);
    let (e, den, witness) = best.ok_or(DensityError::NoAdmissible)?;
    Ok(DensityValue::from_parts(e, den, n, witness))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn forbidden_everything_fails() {
        let g = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let all = VertexSubset::full(3);
        assert!(matches!(
            densest_subgraph_flow(&g, 0, &VertexSubset::empty(3), &all),
            Err(DensityError::NoAdmissible)
        ));
    }

    #[test]
    fn overlap_rejected() {
        let g = Graph::new(3, &[(0, 1)]).unwrap();
        let s = VertexSubset::new(3, [1]).unwrap();
        assert!(matches!(densest_subgraph_flow(&g, 0, &s, &s), Err(DensityError::Overlap { v: 1 })));
    }

    #[test]
    fn forced_vertex_drags_value_down() {
        // Triangle 0-1-2 plus pendant path 2-3-4; forcing 4 must include 3.
        let g = Graph::new(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4)]).unwrap();
        let r = densest_subgraph_flow(&g, 0, &VertexSubset::new(5, [4]).unwrap(), &VertexSubset::empty(5)).unwrap();
        assert_eq!(r.value, BigRational::new(1.into(), 1.into()));
        assert!(r.witness.contains(4));
        assert_eq!(r.recompute(&g, 0), r.value);
    }

    #[test]
    fn offset_with_edge_inside_forced_set() {
        // X = {0, 1} adjacent: the edge alone would give 1/0; a third vertex is needed.
        let g = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let x = VertexSubset::new(3, [0, 1]).unwrap();
        let r = densest_subgraph_flow(&g, 2, &x, &VertexSubset::empty(3)).unwrap();
        assert_eq!(r.value, BigRational::new(2.into(), 1.into()));
    }
}
