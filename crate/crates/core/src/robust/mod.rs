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


//! Bipartite templates robust to the choice of a `Y`-subset, their
//! degree-3 splitting and path subdivision, and host realizations.

mod absorber;

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::index::sample;
use serde::Serialize;
use thiserror::Error;

use crate::matching::hopcroft_karp;
use crate::random::RandomSource;

pub use absorber::{
    absorber_aux, absorber_footprint, realize_absorber, verify_absorber, Absorber, AbsorberError, AbsorberPhase,
};

/// Largest `C(|Y|, |Z| - |X|)` checked exhaustively by [`RobustMode::Auto`].
pub const EXHAUSTIVE_SUBSET_CAP: u64 = 200_000;

#[derive(Debug, Error)]
pub enum RobustError {
    #[error("need |X| < |Z| < |X| + |Y|, got |Z| = {z}, |X| = {x}, |Y| = {y}")]
    Sizes { z: usize, x: usize, y: usize },
    #[error("infeasible template: {0}")]
    Infeasible(String),
    #[error("subdivision length {0} must be odd and at least 3")]
    Length(usize),
    #[error("template parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Right-side vertex: `X(i)` or `Y(j)`. `X` sorts before `Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Right {
    X(usize),
    Y(usize),
}

/// Internal vertices of the path replacing template edge `z - v`:
/// `z, xs[0], zs[0], xs[1], zs[1], ..., xs[h-1], zs[h-1], v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathMap {
    pub z: usize,
    pub v: Right,
    pub xs: Vec<usize>,
    pub zs: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Provenance {
    Base,
    Split { steps: usize },
    /// Left ids `>= z_base` form `Z'`, `X` ids `>= x_base` form `X'`.
    Subdivided { length: usize, z_base: usize, x_base: usize, paths: Vec<PathMap> },
}

/// Bipartite graph with left side `Z` (ids `0..z`) and right side `X ∪ Y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BipartiteTemplate {
    x: usize,
    y: usize,
    /// Sorted right neighbors per left vertex.
    adj: Vec<Vec<Right>>,
    pub provenance: Provenance,
}

impl BipartiteTemplate {
    pub fn new(x: usize, y: usize, adj: Vec<Vec<Right>>) -> Result<Self, RobustError> {
        for (z, list) in adj.iter().enumerate() {
            for r in list {
                let ok = match *r {
                    Right::X(i) => i < x,
                    Right::Y(j) => j < y,
                };
                if !ok {
                    return Err(RobustError::Infeasible(format!("left {z} has out-of-range neighbor {r:?}")));
                }
            }
        }
        let adj = adj
            .into_iter()
            .map(|mut l| {
                l.sort_unstable();
                l.dedup();
                l
            })
            .collect();
        Ok(BipartiteTemplate { x, y, adj, provenance: Provenance::Base })
    }

    pub fn z_count(&self) -> usize {
        self.adj.len()
    }

    pub fn x_count(&self) -> usize {
        self.x
    }

    pub fn y_count(&self) -> usize {
        self.y
    }

    pub fn neighbors(&self, z: usize) -> &[Right] {
        &self.adj[z]
    }

    pub fn degree(&self, z: usize) -> usize {
        self.adj[z].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, Right)> + '_ {
        self.adj.iter().enumerate().flat_map(|(z, l)| l.iter().map(move |&r| (z, r)))
    }

    /// Flat right index: `X` first, then `Y`.
    pub fn flat(&self, r: Right) -> usize {
        match r {
            Right::X(i) => i,
            Right::Y(j) => self.x + j,
        }
    }

    pub fn unflat(&self, v: usize) -> Right {
        if v < self.x {
            Right::X(v)
        } else {
            Right::Y(v - self.x)
        }
    }

    /// Right degree of every flat right vertex.
    pub fn right_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.x + self.y];
        for (_, r) in self.edges() {
            deg[self.flat(r)] += 1;
        }
        deg
    }

    fn check_sizes(&self) -> Result<(), RobustError> {
        let (z, x, y) = (self.z_count(), self.x, self.y);
        if x < z && z < x + y {
            Ok(())
        } else {
            Err(RobustError::Sizes { z, x, y })
        }
    }

    /// Text form: header `Z X Y`, then one `z v` line per edge with `v` flat.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.z_count(), self.x, self.y);
        for (z, r) in self.edges() {
            writeln!(s, "{z} {}", self.flat(r)).unwrap();
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, RobustError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
        let err = |line: usize, msg: &str| RobustError::Parse { line: line + 1, msg: msg.to_string() };
        let (hl, header) = lines.next().ok_or_else(|| err(0, "missing header"))?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| err(hl, "header must be three integers")))
            .collect::<Result<_, _>>()?;
        let [z, x, y] = nums[..] else {
            return Err(err(hl, "header must be three integers"));
        };
        let mut adj = vec![Vec::new(); z];
        for (ln, line) in lines {
            let pair: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| err(ln, "edge must be two integers")))
                .collect::<Result<_, _>>()?;
            let [a, v] = pair[..] else {
                return Err(err(ln, "edge must be two integers"));
            };
            if a >= z || v >= x + y {
                return Err(err(ln, "edge endpoint out of range"));
            }
            adj[a].push(if v < x { Right::X(v) } else { Right::Y(v - x) });
        }
        BipartiteTemplate::new(x, y, adj)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, RobustError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), RobustError> {
        Ok(std::fs::write(path, self.to_text())?)
    }
}

/// Random template with `|Z| = 3m`, `|X| = |Y| = 2m`, every left degree
/// exactly `z_degree` and every right degree at most `z_degree`.
/// Robustness is not guaranteed.
pub fn make_base_template(m: usize, z_degree: usize, src: RandomSource) -> Result<BipartiteTemplate, RobustError> {
    const ATTEMPTS: u64 = 200;
    if m == 0 {
        return Err(RobustError::Infeasible("m must be at least 1".into()));
    }
    let (zc, right) = (3 * m, 4 * m);
    if z_degree > right {
        return Err(RobustError::Infeasible(format!("z_degree {z_degree} exceeds |X| + |Y| = {right}")));
    }
    for attempt in 0..ATTEMPTS {
        let mut rng = src.child(attempt).rng();
        let mut load = vec![0usize; right];
        let mut adj = Vec::with_capacity(zc);
        let mut stuck = false;
        for _ in 0..zc {
            let open: Vec<usize> = (0..right).filter(|&r| load[r] < z_degree).collect();
            if open.len() < z_degree {
                stuck = true;
                break;
            }
            let picks: Vec<usize> = sample(&mut rng, open.len(), z_degree).into_iter().map(|i| open[i]).collect();
            for &r in &picks {
                load[r] += 1;
            }
            adj.push(picks.into_iter().map(|r| if r < 2 * m { Right::X(r) } else { Right::Y(r - 2 * m) }).collect());
        }
        if !stuck {
            return BipartiteTemplate::new(2 * m, 2 * m, adj);
        }
    }
    Err(RobustError::Infeasible(format!("no degree-{z_degree} template found for m = {m}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RobustMode {
    Exhaustive,
    Sampled { trials: usize, seed: u64 },
    /// Exhaustive up to [`EXHAUSTIVE_SUBSET_CAP`] subsets, else 2000 samples.
    Auto,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum RobustVerdict {
    Robust { checked: u64 },
    /// First `Y'` (indices into `Y`) without a perfect matching, with the
    /// Hall-violating left set.
    Counterexample { y_prime: Vec<usize>, deficient: Vec<usize> },
}

impl RobustVerdict {
    pub fn is_robust(&self) -> bool {
        matches!(self, RobustVerdict::Robust { .. })
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Perfect matching check of `Z` into `X ∪ Y'`.
fn matches_into(b: &BipartiteTemplate, y_prime: &[usize]) -> Option<Vec<usize>> {
    let mut slot = vec![usize::MAX; b.y];
    for (i, &j) in y_prime.iter().enumerate() {
        slot[j] = b.x + i;
    }
    let adj: Vec<Vec<usize>> = b
        .adj
        .iter()
        .map(|l| {
            l.iter()
                .filter_map(|&r| match r {
                    Right::X(i) => Some(i),
                    Right::Y(j) => (slot[j] != usize::MAX).then_some(slot[j]),
                })
                .collect()
        })
        .collect();
    let m = hopcroft_karp(&adj, b.x + y_prime.len());
    m.deficient
}

pub fn verify_y_robust(b: &BipartiteTemplate, mode: RobustMode) -> Result<RobustVerdict, RobustError> {
    b.check_sizes()?;
    let k = b.z_count() - b.x;
    let total = binomial(b.y, k);
    let exhaustive = match mode {
        RobustMode::Exhaustive => true,
        RobustMode::Sampled { .. } => false,
        RobustMode::Auto => total <= EXHAUSTIVE_SUBSET_CAP,
    };
    if exhaustive {
        let mut comb: Vec<usize> = (0..k).collect();
        let mut checked = 0;
        loop {
            checked += 1;
            if let Some(deficient) = matches_into(b, &comb) {
                return Ok(RobustVerdict::Counterexample { y_prime: comb, deficient });
            }
            // Next combination in lexicographic order.
            let mut i = k;
            while i > 0 && comb[i - 1] == b.y - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                return Ok(RobustVerdict::Robust { checked });
            }
            comb[i - 1] += 1;
            for j in i..k {
                comb[j] = comb[j - 1] + 1;
            }
        }
    }
    let (trials, seed) = match mode {
        RobustMode::Sampled { trials, seed } => (trials, seed),
        _ => (2000, 0),
    };
    let mut rng = RandomSource::new(seed, 0).rng();
    for _ in 0..trials {
        let mut pick = sample(&mut rng, b.y, k).into_vec();
        pick.sort_unstable();
        if let Some(deficient) = matches_into(b, &pick) {
            return Ok(RobustVerdict::Counterexample { y_prime: pick, deficient });
        }
    }
    Ok(RobustVerdict::Robust { checked: trials as u64 })
}

/// Samples base templates until one verifies robust.
pub fn sample_robust_template(
    m: usize,
    z_degree: usize,
    src: RandomSource,
    attempts: usize,
) -> Result<BipartiteTemplate, RobustError> {
    for a in 0..attempts as u64 {
        let b = make_base_template(m, z_degree, src.child(a))?;
        if verify_y_robust(&b, RobustMode::Auto)?.is_robust() {
            return Ok(b);
        }
    }
    Err(RobustError::Infeasible(format!("no robust template in {attempts} samples (m = {m}, z_degree = {z_degree})")))
}

/// Splits every left vertex of degree at least 4: the two largest neighbors
/// `N_2` move to a new left vertex together with a new `X` vertex `u`, and
/// the old vertex keeps the rest plus `u`. Each step adds one vertex to
/// each of `Z` and `X`.
pub fn split_high_degree(b: &BipartiteTemplate) -> BipartiteTemplate {
    let mut adj = b.adj.clone();
    let mut x = b.x;
    let mut steps = 0;
    let mut v = 0;
    while v < adj.len() {
        while adj[v].len() >= 4 {
            let keep = adj[v].len() - 2;
            let n2 = adj[v].split_off(keep);
            let u = Right::X(x);
            x += 1;
            adj[v].push(u);
            adj[v].sort_unstable();
            let mut other = n2;
            other.push(u);
            other.sort_unstable();
            adj.push(other);
            steps += 1;
        }
        v += 1;
    }
    let prior = match b.provenance {
        Provenance::Split { steps } => steps,
        _ => 0,
    };
    BipartiteTemplate { x, y: b.y, adj, provenance: Provenance::Split { steps: prior + steps } }
}

/// Replaces each edge `z - v` by a path of odd length `length`; the
/// `length - 1` internal vertices alternate `X'`, `Z'` starting next to `z`.
pub fn subdivide(b: &BipartiteTemplate, length: usize) -> Result<BipartiteTemplate, RobustError> {
    if length < 3 || length.is_multiple_of(2) {
        return Err(RobustError::Length(length));
    }
    let h = (length - 1) / 2;
    let z_base = b.z_count();
    let x_base = b.x;
    let mut adj: Vec<Vec<Right>> = vec![Vec::new(); z_base];
    let mut x = x_base;
    let mut paths = Vec::with_capacity(b.edge_count());
    for (z, v) in b.edges() {
        let xs: Vec<usize> = (x..x + h).collect();
        x += h;
        let zs: Vec<usize> = (adj.len()..adj.len() + h).collect();
        adj.resize(adj.len() + h, Vec::new());
        adj[z].push(Right::X(xs[0]));
        for i in 0..h {
            adj[zs[i]].push(Right::X(xs[i]));
            adj[zs[i]].push(if i + 1 < h { Right::X(xs[i + 1]) } else { v });
        }
        paths.push(PathMap { z, v, xs, zs });
    }
    let mut out = BipartiteTemplate::new(x, b.y, adj)?;
    out.provenance = Provenance::Subdivided { length, z_base, x_base, paths };
    Ok(out)
}

/// Convenience: robust base, split to degree 3, then subdivide.
pub fn build_absorber_template(
    m: usize,
    z_degree: usize,
    length: usize,
    src: RandomSource,
    attempts: usize,
) -> Result<BipartiteTemplate, RobustError> {
    let base = sample_robust_template(m, z_degree, src, attempts)?;
    subdivide(&split_high_degree(&base), length)
}

/// `|Z ∪ Z'|` of [`build_absorber_template`] for the given parameters:
/// `3m (δ - 2)` left vertices of degree 3 after splitting (`δ >= 3`),
/// each edge then adding `(L - 1) / 2` left vertices.
pub fn absorber_left_size(m: usize, z_degree: usize, length: usize) -> usize {
    let z = 3 * m * z_degree.saturating_sub(2).max(1);
    let edges = if z_degree >= 3 { 3 * z } else { 3 * m * z_degree };
    z + edges * (length - 1) / 2
}
