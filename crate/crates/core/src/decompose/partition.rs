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


use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::{DecomposeError, Decomposition};
use crate::graph::{distance_k_independent_set, Graph, VertexSubset};

/// Split of `R = V(H) \ ⋃ S_w` into `R_1`, `I` and `R_2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RPartition {
    pub r1: VertexSubset,
    pub i: VertexSubset,
    pub r2: VertexSubset,
    /// `|N(h) ∪ N²(h) \ {h}|` shared by all of `I`; 0 when `I` is empty.
    pub k_bucket: usize,
    pub t: usize,
}

/// Vertices of `R` at distance at least 5 from the pockets and from each
/// other, bucketed by second-neighborhood size. `I` takes
/// `min(⌊β₂t / 2k⌋, available)` vertices from the bucket maximizing that
/// count (smaller `k` on ties); `R_2` is the rest of their radius-2 balls.
pub fn partition_r(h: &Graph, dec: &Decomposition, beta2: f64, delta: usize) -> Result<RPartition, DecomposeError> {
    let n = h.n();
    let t = dec.pockets.len();
    let union = dec.pocket_union(n);
    let r: Vec<usize> = (0..n).filter(|&v| !union.contains(v)).collect();
    let empty = |r1: Vec<usize>| RPartition {
        r1: VertexSubset::new(n, r1).unwrap(),
        i: VertexSubset::empty(n),
        r2: VertexSubset::empty(n),
        k_bucket: 0,
        t,
    };
    if beta2 <= 0.0 || r.is_empty() {
        return Ok(empty(r));
    }
    let sources: Vec<usize> = union.ones().collect();
    let dist = h.distances_from_set(&sources);
    let far = VertexSubset::new(n, r.iter().copied().filter(|&v| dist[v] >= 5)).unwrap();
    let spaced = distance_k_independent_set(h, &far, 4);

    let mut buckets: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in spaced.iter() {
        let k = h.ball(v, 2).len() - 1;
        if k >= 1 {
            buckets.entry(k).or_default().push(v);
        }
    }
    if buckets.is_empty() {
        return Err(DecomposeError::NoEligible);
    }
    let target = |k: usize| ((beta2 * t as f64) / (2.0 * k as f64)).floor() as usize;
    let (&k, members) = buckets
        .iter()
        .max_by(|(ka, a), (kb, b)| target(**ka).min(a.len()).cmp(&target(**kb).min(b.len())).then(kb.cmp(ka)))
        .unwrap();
    let take = target(k).min(members.len());
    if take == 0 {
        return Ok(empty(r));
    }
    let i: Vec<usize> = members[..take].to_vec();
    let mut r2 = FixedBitSet::with_capacity(n);
    for &v in &i {
        r2.extend(h.ball(v, 2).into_iter().filter(|&u| u != v));
    }
    let i_set = VertexSubset::new(n, i).unwrap();
    let r1: Vec<usize> = r.into_iter().filter(|&v| !r2.contains(v) && !i_set.contains(v)).collect();
    let part = RPartition {
        r1: VertexSubset::new(n, r1).unwrap(),
        i: i_set,
        r2: VertexSubset::from_bits(&r2),
        k_bucket: k,
        t,
    };
    debug_assert!(check_partition(h, dec, &part, delta).is_ok());
    Ok(part)
}

/// Checks that the parts partition `R` and satisfy (a)-(c).
pub fn check_partition(h: &Graph, dec: &Decomposition, part: &RPartition, delta: usize) -> Result<(), String> {
    let n = h.n();
    let union = dec.pocket_union(n);
    let mut seen = FixedBitSet::with_capacity(n);
    for v in part.r1.iter().chain(part.i.iter()).chain(part.r2.iter()) {
        if union.contains(v) {
            return Err(format!("vertex {v} lies in a pocket"));
        }
        if seen.put(v) {
            return Err(format!("vertex {v} in two parts"));
        }
    }
    if seen.count_ones(..) + union.count_ones(..) != n {
        return Err("parts do not cover R".into());
    }
    if part.i.len() * delta * delta < part.r2.len() {
        return Err(format!("(a): |I| = {} but |R_2| = {}", part.i.len(), part.r2.len()));
    }
    let s = dec.s_set(n);
    let mut core = s.to_bits();
    core.grow(n);
    core.extend(part.r1.iter().chain(part.i.iter()));
    for v in part.i.iter() {
        if let Some(&u) = h.neighbors(v).iter().find(|&&u| core.contains(u)) {
            return Err(format!("(b): {v} in I is adjacent to {u}"));
        }
    }
    for v in part.r2.iter() {
        let c = h.degree_into(v, &core);
        if c + 1 > delta {
            return Err(format!("(c): {v} in R_2 has {c} neighbors in S ∪ R_1 ∪ I"));
        }
    }
    Ok(())
}
