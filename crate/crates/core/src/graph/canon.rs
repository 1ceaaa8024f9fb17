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

//! Canonical labeling of small rooted graphs by individualization and
//! refinement. The code is the lexicographically least adjacency string
//! over all leaves of the search tree.

use super::{Graph, GraphError};

pub const CANONICAL_CAP: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub code: Vec<u8>,
    /// `labeling[v]` is the canonical label of `v`; the root gets label 0.
    pub labeling: Vec<usize>,
}

pub fn canonical_rooted_form(h: &Graph, root: usize) -> Result<Vec<u8>, GraphError> {
    canonical_rooted_labeling(h, root).map(|c| c.code)
}

pub fn canonical_rooted_labeling(h: &Graph, root: usize) -> Result<CanonicalForm, GraphError> {
    let n = h.n();
    if n > CANONICAL_CAP {
        return Err(GraphError::CanonicalCap { n, cap: CANONICAL_CAP });
    }
    h.check_vertex(root)?;
    let adj: Vec<u32> = (0..n)
        .map(|v| h.neighbors(v).iter().fold(0u32, |m, &u| m | (1 << u)))
        .collect();
    let dist = h.distances_from(root);
    let keys: Vec<(bool, usize, usize)> =
        (0..n).map(|v| (v != root, dist[v], h.degree(v))).collect();
    let colors = compact(&keys);
    let mut best: Option<CanonicalForm> = None;
    search(&adj, refine(&adj, colors), &mut best);
    Ok(best.unwrap())
}

/// Maps keys to dense color ids in sorted key order.
fn compact<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter().map(|k| sorted.binary_search(k).unwrap()).collect()
}

fn cell_count(colors: &[usize]) -> usize {
    colors.iter().max().map_or(0, |m| m + 1)
}

fn refine(adj: &[u32], mut colors: Vec<usize>) -> Vec<usize> {
    loop {
        let before = cell_count(&colors);
        let keys: Vec<(usize, Vec<usize>)> = (0..adj.len())
            .map(|v| {
                let mut nb: Vec<usize> = ones(adj[v]).map(|u| colors[u]).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        colors = compact(&keys);
        if cell_count(&colors) == before {
            return colors;
        }
    }
}

fn ones(mut m: u32) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            b
        })
    })
}

fn search(adj: &[u32], colors: Vec<usize>, best: &mut Option<CanonicalForm>) {
    let n = adj.len();
    if cell_count(&colors) == n {
        let code = encode(adj, &colors);
        if best.as_ref().is_none_or(|b| code < b.code) {
            *best = Some(CanonicalForm { code, labeling: colors });
        }
        return;
    }
    let mut sizes = vec![0usize; n];
    for &c in &colors {
        sizes[c] += 1;
    }
    let target = (0..n).find(|&c| sizes[c] > 1).unwrap();
    for v in (0..n).filter(|&v| colors[v] == target) {
        let split: Vec<(usize, bool)> = (0..n).map(|u| (colors[u], u != v)).collect();
        search(adj, refine(adj, compact(&split)), best);
    }
}

fn encode(adj: &[u32], labeling: &[usize]) -> Vec<u8> {
    let n = adj.len();
    let mut inv = vec![0usize; n];
    for (v, &l) in labeling.iter().enumerate() {
        inv[l] = v;
    }
    let mut code = vec![n as u8];
    let mut byte = 0u8;
    let mut bit = 0;
    for i in 0..n {
        for j in i + 1..n {
            byte = (byte << 1) | u8::from(adj[inv[i]] >> inv[j] & 1 == 1);
            bit += 1;
            if bit == 8 {
                code.push(byte);
                byte = 0;
                bit = 0;
            }
        }
    }
    if bit > 0 {
        code.push(byte << (8 - bit));
    }
    code
}
