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

//! Seeded `G(n,p)` sampling and multiple exposure.

mod expansion;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, DEFAULT_BITSET_CAP};

pub use expansion::{check_expansion, ExpansionParams, FamilyExpansion, Regime};

/// Below this edge probability sampling skips geometrically over pairs.
pub const GEOMETRIC_CROSSOVER: f64 = 0.2;

#[derive(Debug, Error)]
pub enum RandomError {
    #[error("probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("exposure count must be at least 1")]
    ZeroRounds,
    #[error("set {index} of a family has {got} vertices, expected {want}")]
    SetSize { index: usize, got: usize, want: usize },
    #[error("vertex {v} appears in two sets of one family")]
    Overlap { v: usize },
    #[error("vertex {v} outside [0, {n})")]
    Vertex { v: usize, n: usize },
}

/// `(seed, stream)` pair naming one ChaCha8 keystream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomSource {
    pub seed: u64,
    pub stream: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RandomSource {
    pub fn new(seed: u64, stream: u64) -> Self {
        RandomSource { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Independent source keyed by this one and `tag`.
    pub fn child(&self, tag: u64) -> RandomSource {
        RandomSource { seed: splitmix64(self.seed ^ splitmix64(self.stream)), stream: tag }
    }
}

fn check_p(p: f64) -> Result<(), RandomError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(RandomError::Probability(p))
    }
}

pub fn sample_gnp(n: usize, p: f64, src: RandomSource) -> Result<Graph, RandomError> {
    check_p(p)?;
    let mut rng = src.rng();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    if p == 0.0 || n < 2 {
        // nothing to sample
    } else if p < GEOMETRIC_CROSSOVER {
        let geo = Geometric::new(p).map_err(|_| RandomError::Probability(p))?;
        let (mut u, mut v) = (0usize, 0u64);
        'outer: loop {
            v = v.saturating_add(geo.sample(&mut rng)).saturating_add(1);
            while v >= n as u64 {
                u += 1;
                if u + 1 >= n {
                    break 'outer;
                }
                v = v - n as u64 + u as u64 + 1;
            }
            adj[u].push(v as usize);
            adj[v as usize].push(u);
        }
    } else {
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < p {
                    adj[u].push(v);
                    adj[v].push(u);
                }
            }
        }
    }
    Ok(Graph::from_adjacency(adj, DEFAULT_BITSET_CAP))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExposureSplit {
    pub p: f64,
    pub r: usize,
    pub q: f64,
    /// Set when `p = 1` forces `q = 1`.
    pub saturated: bool,
}

/// Per-round probability `q` with `(1 - q)^r = 1 - p`.
pub fn split_exposure(p: f64, r: usize) -> Result<ExposureSplit, RandomError> {
    check_p(p)?;
    if r == 0 {
        return Err(RandomError::ZeroRounds);
    }
    if p == 1.0 {
        if r > 1 {
            log::warn!("p = 1 split into {r} rounds: every round is complete");
        }
        return Ok(ExposureSplit { p, r, q: 1.0, saturated: true });
    }
    let q = if r == 1 { p } else { -((-p).ln_1p() / r as f64).exp_m1() };
    Ok(ExposureSplit { p, r, q, saturated: false })
}

pub fn sample_exposures(n: usize, p: f64, r: usize, src: RandomSource) -> Result<Vec<Graph>, RandomError> {
    let split = split_exposure(p, r)?;
    (0..r as u64).map(|i| sample_gnp(n, split.q, src.child(i))).collect()
}

/// Splits a given host, assumed to be a `G(n,p)` sample, into `r` rounds
/// distributed as independent `G(n,q)` samples: each host edge joins a
/// nonempty random set of rounds drawn with the conditional law.
pub fn split_host(g: &Graph, p: f64, r: usize, src: RandomSource) -> Result<Vec<Graph>, RandomError> {
    let split = split_exposure(p, r)?;
    let mut rng = src.rng();
    let mut rounds: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); g.n()]; r];
    for (u, v) in g.edges() {
        let mask: Vec<bool> = loop {
            let m: Vec<bool> = (0..r).map(|_| rng.random::<f64>() < split.q).collect();
            if m.iter().any(|&b| b) {
                break m;
            }
        };
        for (i, _) in mask.iter().enumerate().filter(|(_, &b)| b) {
            rounds[i][u].push(v);
            rounds[i][v].push(u);
        }
    }
    Ok(rounds.into_iter().map(|adj| Graph::from_adjacency(adj, DEFAULT_BITSET_CAP)).collect())
}
