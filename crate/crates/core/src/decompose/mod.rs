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


//! Anchor sets `D` with isomorphic rooted pockets `S_w`, and the split of
//! the remaining vertices used by the bounded-degree pipeline.

mod partition;

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{
    canonical_rooted_labeling, degeneracy_ordering_with_anchor, distance_k_independent_set, Graph, GraphError, VertexSubset,
};

pub use partition::{check_partition, partition_r, RPartition};

#[derive(Debug, Error)]
pub enum DecomposeError {
    #[error("vertex {v} has degree {degree} > Δ = {delta}")]
    MaxDegree { v: usize, degree: usize, delta: usize },
    #[error("graph is not {d}-degenerate")]
    NotDegenerate { d: usize },
    #[error("separation k = {k} is below the minimum {min}")]
    Separation { k: usize, min: usize },
    #[error("no anchors after bucketing; bucket sizes {histogram:?}")]
    EmptyD { histogram: Vec<usize> },
    #[error("pocket of anchor {anchor} reached {size} vertices after {steps} steps, caps {size_cap} / {step_cap}")]
    Cap { anchor: usize, size: usize, steps: usize, size_cap: usize, step_cap: usize },
    #[error("no vertex of R at distance >= 5 from the pockets")]
    NoEligible,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DecomposeMode {
    Degenerate { d: usize },
    Bounded { delta: usize },
}

impl DecomposeMode {
    /// Largest number of pocket neighbors allowed for an outside vertex.
    pub fn outside_bound(self) -> usize {
        match self {
            DecomposeMode::Degenerate { d } => d,
            DecomposeMode::Bounded { delta } => delta.saturating_sub(1),
        }
    }

    pub fn size_cap(self) -> usize {
        match self {
            DecomposeMode::Degenerate { d } => 3 * d * d,
            DecomposeMode::Bounded { delta } => 2 * delta,
        }
    }

    pub fn step_cap(self) -> usize {
        match self {
            DecomposeMode::Degenerate { d } => 2 * d * d,
            DecomposeMode::Bounded { delta } => delta.saturating_sub(1),
        }
    }

    /// Default anchor separation: `20 d²` or `4Δ + 5`.
    pub fn default_separation(self) -> usize {
        match self {
            DecomposeMode::Degenerate { d } => 20 * d * d,
            DecomposeMode::Bounded { delta } => 4 * delta + 5,
        }
    }

    fn min_separation(self) -> usize {
        match self {
            DecomposeMode::Degenerate { d } => 2 * 3 * d * d + 2,
            DecomposeMode::Bounded { delta } => 4 * delta + 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pocket {
    pub anchor: usize,
    pub members: VertexSubset,
    /// `f_w(v)` for each member `v`, aligned with `members`.
    pub f_map: Vec<usize>,
    pub growth_steps: usize,
}

impl Pocket {
    pub fn f(&self, v: usize) -> Option<usize> {
        self.members.as_slice().binary_search(&v).ok().map(|i| self.f_map[i])
    }
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub mode: DecomposeMode,
    pub separation: usize,
    pub d_set: VertexSubset,
    /// One pocket per anchor, ascending by anchor.
    pub pockets: Vec<Pocket>,
    pub f_star: Graph,
    pub z_star: usize,
    pub k_effective: f64,
    /// Bucket sizes, largest first.
    pub histogram: Vec<usize>,
}

impl Decomposition {
    /// `S = ⋃ (S_w \ {w})`.
    pub fn s_set(&self, n: usize) -> VertexSubset {
        VertexSubset::new(n, self.pockets.iter().flat_map(|p| p.members.iter().filter(move |&v| v != p.anchor))).unwrap()
    }

    /// `⋃ S_w`.
    pub fn pocket_union(&self, n: usize) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(n);
        b.extend(self.pockets.iter().flat_map(|p| p.members.iter()));
        b
    }

    /// `F = F* \ z*`, relabeled so `F*` vertex `i + 1` becomes `i` (`z* = 0`).
    pub fn f_graph(&self) -> Graph {
        let rest: Vec<usize> = (1..self.f_star.n()).collect();
        self.f_star.induced(&rest)
    }

    /// `Γ = N_{F*}(z*)` in the labels of [`Decomposition::f_graph`].
    pub fn gamma(&self) -> VertexSubset {
        VertexSubset::new(self.f_star.n() - 1, self.f_star.neighbors(self.z_star).iter().map(|&v| v - 1)).unwrap()
    }

    /// Keeps the first `t` pockets.
    pub fn truncate(&mut self, t: usize) {
        self.pockets.truncate(t);
        let n = self.d_set.universe();
        self.d_set = VertexSubset::new(n, self.pockets.iter().map(|p| p.anchor)).unwrap();
        self.k_effective = if t == 0 { f64::INFINITY } else { n as f64 / t as f64 };
    }
}

fn check_max_degree(h: &Graph, delta: usize) -> Result<(), DecomposeError> {
    match (0..h.n()).find(|&v| h.degree(v) > delta) {
        Some(v) => Err(DecomposeError::MaxDegree { v, degree: h.degree(v), delta }),
        None => Ok(()),
    }
}

/// Grows `{w} ∪ N(w)` by the smallest vertex meeting `absorb`.
fn grow(h: &Graph, w: usize, absorb: impl Fn(usize, usize) -> bool) -> (Vec<usize>, usize) {
    let mut inside = FixedBitSet::with_capacity(h.n());
    inside.insert(w);
    inside.extend(h.neighbors(w).iter().copied());
    let mut steps = 0;
    loop {
        let mut frontier: Vec<usize> = inside.ones().flat_map(|u| h.neighbors(u).iter().copied()).filter(|&v| !inside.contains(v)).collect();
        frontier.sort_unstable();
        frontier.dedup();
        match frontier.into_iter().find(|&v| absorb(v, h.degree_into(v, &inside))) {
            Some(v) => {
                inside.insert(v);
                steps += 1;
            }
            None => return (inside.ones().collect(), steps),
        }
    }
}

fn decompose(h: &Graph, mode: DecomposeMode, k: usize, eligible: VertexSubset) -> Result<Decomposition, DecomposeError> {
    let min = mode.min_separation();
    if k < min {
        return Err(DecomposeError::Separation { k, min });
    }
    let anchors = distance_k_independent_set(h, &eligible, k);
    let mut buckets: BTreeMap<Vec<u8>, Vec<Pocket>> = BTreeMap::new();
    for w in anchors.iter() {
        let (members, steps) = match mode {
            DecomposeMode::Degenerate { d } => grow(h, w, |_, inside| inside > d),
            DecomposeMode::Bounded { delta } => grow(h, w, |_, inside| inside == delta),
        };
        if members.len() > mode.size_cap() || steps > mode.step_cap() {
            return Err(DecomposeError::Cap {
                anchor: w,
                size: members.len(),
                steps,
                size_cap: mode.size_cap(),
                step_cap: mode.step_cap(),
            });
        }
        let local = h.induced(&members);
        let root = members.binary_search(&w).unwrap();
        let form = canonical_rooted_labeling(&local, root)?;
        let pocket = Pocket {
            anchor: w,
            members: VertexSubset::new(h.n(), members).unwrap(),
            f_map: form.labeling,
            growth_steps: steps,
        };
        buckets.entry(form.code).or_default().push(pocket);
    }
    let mut histogram: Vec<usize> = buckets.values().map(Vec::len).collect();
    histogram.sort_unstable_by(|a, b| b.cmp(a));
    // Largest bucket; ties go to the bucket holding the smallest anchor.
    let best = buckets
        .into_values()
        .max_by(|a, b| a.len().cmp(&b.len()).then(b[0].anchor.cmp(&a[0].anchor)))
        .ok_or(DecomposeError::EmptyD { histogram: histogram.clone() })?;
    let first = &best[0];
    let size = first.members.len();
    let mut f_edges = Vec::new();
    for (i, u) in first.members.iter().enumerate() {
        for (j, v) in first.members.iter().enumerate().skip(i + 1) {
            if h.has_edge(u, v) {
                let (a, b) = (first.f_map[i], first.f_map[j]);
                f_edges.push((a.min(b), a.max(b)));
            }
        }
    }
    let f_star = Graph::new(size, &f_edges)?;
    let d_set = VertexSubset::new(h.n(), best.iter().map(|p| p.anchor)).unwrap();
    Ok(Decomposition {
        mode,
        separation: k,
        k_effective: h.n() as f64 / best.len() as f64,
        d_set,
        pockets: best,
        f_star,
        z_star: 0,
        histogram,
    })
}

/// Anchors among vertices of degree at most `2d`, pockets grown while some
/// outside vertex has more than `d` neighbors inside.
pub fn decompose_degenerate(h: &Graph, d: usize, delta: usize, k: usize) -> Result<Decomposition, DecomposeError> {
    check_max_degree(h, delta)?;
    degeneracy_ordering_with_anchor(h, &VertexSubset::empty(h.n()), d).map_err(|_| DecomposeError::NotDegenerate { d })?;
    let low = VertexSubset::new(h.n(), (0..h.n()).filter(|&v| h.degree(v) <= 2 * d)).unwrap();
    decompose(h, DecomposeMode::Degenerate { d }, k, low)
}

/// Anchors among all vertices, pockets grown by vertices with all `Δ`
/// neighbors inside.
pub fn decompose_bounded(h: &Graph, delta: usize, k: usize) -> Result<Decomposition, DecomposeError> {
    check_max_degree(h, delta)?;
    decompose(h, DecomposeMode::Bounded { delta }, k, VertexSubset::full(h.n()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ItemCheck {
    pub pass: bool,
    /// First offending vertex.
    pub vertex: Option<usize>,
    pub detail: String,
}

impl ItemCheck {
    fn ok() -> Self {
        ItemCheck { pass: true, vertex: None, detail: String::new() }
    }

    fn bad(vertex: usize, detail: impl Into<String>) -> Self {
        ItemCheck { pass: false, vertex: Some(vertex), detail: detail.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionReport {
    pub d1: ItemCheck,
    pub d2: ItemCheck,
    pub d3: ItemCheck,
    pub d4: ItemCheck,
    /// Pocket size and growth-step caps.
    pub caps: ItemCheck,
}

impl DecompositionReport {
    pub fn all_pass(&self) -> bool {
        self.d1.pass && self.d2.pass && self.d3.pass && self.d4.pass && self.caps.pass
    }
}

fn first_failure(mut it: impl Iterator<Item = ItemCheck>) -> ItemCheck {
    it.find(|c| !c.pass).unwrap_or_else(ItemCheck::ok)
}

pub fn verify_decomposition(h: &Graph, dec: &Decomposition, mode: DecomposeMode) -> DecompositionReport {
    let d1 = first_failure(dec.pockets.iter().map(|p| {
        let w = p.anchor;
        if !p.members.contains(w) {
            return ItemCheck::bad(w, "anchor outside its pocket");
        }
        if let Some(&u) = h.neighbors(w).iter().find(|&&u| !p.members.contains(u)) {
            return ItemCheck::bad(u, format!("neighbor of anchor {w} outside the pocket"));
        }
        if let DecomposeMode::Degenerate { d } = mode {
            if h.degree(w) > 2 * d {
                return ItemCheck::bad(w, format!("anchor degree {} > 2d", h.degree(w)));
            }
        }
        ItemCheck::ok()
    }));

    let d2 = first_failure(dec.pockets.iter().map(|p| {
        let fs = &dec.f_star;
        if p.members.len() != fs.n() || p.f_map.len() != fs.n() {
            return ItemCheck::bad(p.anchor, "pocket size differs from F*");
        }
        let mut seen = vec![false; fs.n()];
        for (&v, &img) in p.members.as_slice().iter().zip(&p.f_map) {
            if img >= fs.n() || std::mem::replace(&mut seen[img], true) {
                return ItemCheck::bad(v, "f_w is not a bijection");
            }
        }
        if p.f(p.anchor) != Some(dec.z_star) {
            return ItemCheck::bad(p.anchor, "f_w does not map the anchor to z*");
        }
        let m = p.members.as_slice();
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                if h.has_edge(m[i], m[j]) != fs.has_edge(p.f_map[i], p.f_map[j]) {
                    return ItemCheck::bad(m[i], format!("pair {}-{} not preserved by f_w", m[i], m[j]));
                }
            }
        }
        ItemCheck::ok()
    }));

    let mut owner = vec![usize::MAX; h.n()];
    let mut d3 = ItemCheck::ok();
    'outer: for (i, p) in dec.pockets.iter().enumerate() {
        for v in p.members.iter() {
            if owner[v] != usize::MAX {
                d3 = ItemCheck::bad(v, format!("shared by pockets of {} and {}", dec.pockets[owner[v]].anchor, p.anchor));
                break 'outer;
            }
            owner[v] = i;
        }
    }
    if d3.pass {
        d3 = first_failure(h.edges().map(|(u, v)| {
            if owner[u] != usize::MAX && owner[v] != usize::MAX && owner[u] != owner[v] {
                ItemCheck::bad(u, format!("edge {u}-{v} joins two pockets"))
            } else {
                ItemCheck::ok()
            }
        }));
    }

    let bound = mode.outside_bound();
    let union = dec.pocket_union(h.n());
    let d4 = first_failure((0..h.n()).filter(|&v| !union.contains(v)).map(|v| {
        let c = h.degree_into(v, &union);
        if c > bound {
            ItemCheck::bad(v, format!("{c} pocket neighbors > {bound}"))
        } else {
            ItemCheck::ok()
        }
    }));

    let caps = first_failure(dec.pockets.iter().map(|p| {
        if p.members.len() > mode.size_cap() || p.growth_steps > mode.step_cap() {
            ItemCheck::bad(p.anchor, format!("size {} steps {}", p.members.len(), p.growth_steps))
        } else {
            ItemCheck::ok()
        }
    }));
    DecompositionReport { d1, d2, d3, d4, caps }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        let mut e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        e.push((0, n - 1));
        Graph::new(n, &e).unwrap()
    }

    fn k4s(count: usize) -> Graph {
        let e: Vec<_> = (0..count)
            .flat_map(|c| (0..4).flat_map(move |i| (i + 1..4).map(move |j| (4 * c + i, 4 * c + j))))
            .collect();
        Graph::new(4 * count, &e).unwrap()
    }

    #[test]
    fn perfect_matching_gives_edges() {
        let h = Graph::new(8, &[(0, 1), (2, 3), (4, 5), (6, 7)]).unwrap();
        let dec = decompose_degenerate(&h, 1, 1, 20).unwrap();
        assert_eq!(dec.f_star.n(), 2);
        assert_eq!(dec.f_star.edge_count(), 1);
        assert_eq!(dec.d_set.as_slice(), &[0, 2, 4, 6]);
        assert!(verify_decomposition(&h, &dec, dec.mode).all_pass());
    }

    #[test]
    fn c12_pocket_is_rooted_p3() {
        let h = cycle(12);
        let dec = decompose_degenerate(&h, 2, 2, 80).unwrap();
        assert_eq!(dec.pockets.len(), 1);
        assert_eq!(dec.pockets[0].members.as_slice(), &[0, 1, 11]);
        assert_eq!(dec.f_star.degree(dec.z_star), 2);
        assert_eq!(dec.f_star.edge_count(), 2);
        assert!(verify_decomposition(&h, &dec, dec.mode).all_pass());
        let b = decompose_bounded(&h, 2, 13).unwrap();
        assert_eq!(b.pockets[0].members.len(), 3);
        assert!(verify_decomposition(&h, &b, b.mode).all_pass());
    }

    #[test]
    fn edgeless_single_vertex_pockets() {
        let h = Graph::empty(5);
        let dec = decompose_degenerate(&h, 1, 1, 20).unwrap();
        assert_eq!(dec.f_star.n(), 1);
        assert_eq!(dec.pockets.len(), 5);
        let b = decompose_bounded(&h, 3, 17).unwrap();
        assert_eq!(b.f_star.n(), 1);
    }

    #[test]
    fn k4_pockets_cover_components() {
        let h = k4s(5);
        let dec = decompose_bounded(&h, 3, 17).unwrap();
        assert_eq!(dec.pockets.len(), 5);
        assert_eq!(dec.f_star.edge_count(), 6);
        assert!(dec.pockets.iter().all(|p| p.members.len() == 4 && p.growth_steps == 0));
        assert_eq!(dec.f_graph().edge_count(), 3);
        assert_eq!(dec.gamma().len(), 3);
    }

    #[test]
    fn tampering_is_detected() {
        let h = k4s(3);
        let dec = decompose_bounded(&h, 3, 17).unwrap();
        let mode = dec.mode;

        let mut overlap = dec.clone();
        overlap.pockets[1].members = VertexSubset::new(12, [3, 4, 5, 6, 7]).unwrap();
        let r = verify_decomposition(&h, &overlap, mode);
        assert!(!r.d3.pass);
        assert_eq!(r.d3.vertex, Some(3));

        let mut moved = dec.clone();
        moved.pockets[0].f_map.swap(0, 1);
        assert!(!verify_decomposition(&h, &moved, mode).d2.pass);
    }

    #[test]
    fn preconditions() {
        let star = Graph::new(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert!(matches!(decompose_bounded(&star, 3, 17), Err(DecomposeError::MaxDegree { v: 0, .. })));
        assert!(matches!(decompose_degenerate(&k4s(1), 2, 3, 80), Err(DecomposeError::NotDegenerate { d: 2 })));
        assert!(matches!(decompose_degenerate(&cycle(6), 2, 2, 10), Err(DecomposeError::Separation { .. })));
    }
}
