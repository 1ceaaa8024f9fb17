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

//! Hopcroft-Karp on `left -> right` adjacency lists, with a Hall-violating
//! certificate when the left side is not saturated.

use std::collections::VecDeque;

const NIL: usize = usize::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteMatching {
    pub left_to_right: Vec<Option<usize>>,
    pub size: usize,
    /// Left vertices whose joint neighborhood is smaller than themselves;
    /// present iff some left vertex is unmatched.
    pub deficient: Option<Vec<usize>>,
}

impl BipartiteMatching {
    pub fn saturates_left(&self) -> bool {
        self.size == self.left_to_right.len()
    }
}

pub fn hopcroft_karp(adj: &[Vec<usize>], right: usize) -> BipartiteMatching {
    let left = adj.len();
    let mut ml = vec![NIL; left];
    let mut mr = vec![NIL; right];
    let mut dist = vec![0usize; left];
    let mut size = 0;
    loop {
        let mut queue = VecDeque::new();
        for l in 0..left {
            if ml[l] == NIL {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                let next = mr[r];
                if next == NIL {
                    found = true;
                } else if dist[next] == usize::MAX {
                    dist[next] = dist[l] + 1;
                    queue.push_back(next);
                }
            }
        }
        if !found {
            break;
        }
        for l in 0..left {
            if ml[l] == NIL && augment(l, adj, &mut ml, &mut mr, &mut dist) {
                size += 1;
            }
        }
    }
    let deficient = (size < left).then(|| hall_violator(adj, &ml, &mr));
    BipartiteMatching {
        left_to_right: ml.into_iter().map(|r| (r != NIL).then_some(r)).collect(),
        size,
        deficient,
    }
}

fn augment(l: usize, adj: &[Vec<usize>], ml: &mut [usize], mr: &mut [usize], dist: &mut [usize]) -> bool {
    for &r in &adj[l] {
        let next = mr[r];
        if next == NIL || (dist[next] == dist[l] + 1 && augment(next, adj, ml, mr, dist)) {
            ml[l] = r;
            mr[r] = l;
            return true;
        }
    }
    dist[l] = usize::MAX;
    false
}

/// Left vertices reachable from unmatched ones by alternating paths.
fn hall_violator(adj: &[Vec<usize>], ml: &[usize], mr: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; adj.len()];
    let mut queue: VecDeque<usize> = (0..adj.len()).filter(|&l| ml[l] == NIL).collect();
    for &l in &queue {
        seen[l] = true;
    }
    while let Some(l) = queue.pop_front() {
        for &r in &adj[l] {
            let next = mr[r];
            if next != NIL && !seen[next] {
                seen[next] = true;
                queue.push_back(next);
            }
        }
    }
    (0..adj.len()).filter(|&l| seen[l]).collect()
}
