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


//! Full spanning pipelines over independent exposures `G_1, G_2[, G_3]`.
//!
//! Degenerate: copies of `F` for the pockets, a layered S-embedding of the
//! rest avoiding `X`, then a matching of the anchors onto the leftovers.
//! Bounded degree: an absorber over a robust template, Phases 2.a-2.c with
//! the matching-removal embedding, then the robust matching.

use std::fmt;

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::delta::delta_s_embed;
use super::search::{find_f_matching, SearchParams};
use super::sembed::{s_embed_ordered, Reservoir, StepTrace};
use super::{aux_bipartite, max_matching, verify_embedding, PartialEmbedding, Scope, Verdict};
use crate::decompose::{decompose_bounded, decompose_degenerate, partition_r, DecomposeError, Decomposition};
use crate::graph::{degeneracy_ordering_with_anchor, Graph, VertexSubset};
use crate::random::RandomSource;
use crate::robust::{absorber_left_size, build_absorber_template, realize_absorber, Absorber, BipartiteTemplate};

/// How phases read the exposures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExposureMode {
    /// Phase `j` sees only `G_j`.
    Split,
    /// Phase `j` sees `G_1 ∪ ... ∪ G_j`.
    Cumulative,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbedConfig {
    /// Capacity slack for the S-embedding steps.
    pub gamma: f64,
    /// Extra full attempts with fresh streams after a failure.
    pub retries: usize,
    pub exposure: ExposureMode,
    /// Reservoir `W` as a fraction of `n` where the pipeline picks it.
    pub reservoir_fraction: f64,
    /// Right degree of the base template.
    pub z_degree: usize,
    /// Subdivision length `L` of the absorber template.
    pub path_length: usize,
    /// Base templates sampled before giving up on robustness.
    pub template_attempts: usize,
    /// Anchor separation; `None` takes the mode default.
    pub separation: Option<usize>,
    pub search: SearchParams,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        EmbedConfig {
            gamma: 0.05,
            retries: 5,
            exposure: ExposureMode::Split,
            reservoir_fraction: 0.1,
            z_degree: 3,
            path_length: 11,
            template_attempts: 50,
            separation: None,
            search: SearchParams::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Phase {
    Decompose,
    Absorber,
    /// Copies of `F` for the pockets.
    Phase1,
    PartitionR,
    Phase2a,
    Phase2b,
    Phase2c,
    Matching,
    Verify,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Error)]
#[error("{phase} failed after {attempts} attempt(s): {detail}")]
pub struct PipelineError {
    pub phase: Phase,
    pub detail: String,
    pub attempts: usize,
    /// Left indices violating Hall's condition when the final matching fails.
    pub hall: Option<Vec<usize>>,
}

fn fail(phase: Phase, detail: impl ToString) -> PipelineError {
    PipelineError { phase, detail: detail.to_string(), attempts: 1, hall: None }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceEvent {
    Note { attempt: usize, phase: Phase, message: String },
    Steps { attempt: usize, phase: Phase, steps: Vec<StepTrace>, occupancy: Vec<usize> },
    Matching { attempt: usize, phase: Phase, pairs: Vec<(usize, usize)> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Degenerate,
    Bounded,
    Direct,
}

#[derive(Clone, Debug)]
pub struct EmbedOutcome {
    pub phi: PartialEmbedding,
    pub route: Route,
    /// Set when the requested route fell back to a direct embedding.
    pub degraded: Option<String>,
    /// `|D|` actually used (0 on the direct route).
    pub t: usize,
    pub attempts: usize,
    pub trace: Vec<TraceEvent>,
}

fn union_of(graphs: &[Graph]) -> Graph {
    graphs[1..].iter().fold(graphs[0].clone(), |acc, g| acc.union(g))
}

/// Host used by phase `j` (1-based).
fn phase_host(exposures: &[Graph], j: usize, mode: ExposureMode) -> Graph {
    match mode {
        ExposureMode::Split => exposures[j - 1].clone(),
        ExposureMode::Cumulative => union_of(&exposures[..j]),
    }
}

fn check_inputs(exposures: &[Graph], want: usize, h: &Graph, delta: usize) -> Result<usize, PipelineError> {
    if exposures.len() != want {
        return Err(fail(Phase::Decompose, format!("expected {want} exposures, got {}", exposures.len())));
    }
    let n = exposures[0].n();
    if exposures.iter().any(|g| g.n() != n) {
        return Err(fail(Phase::Decompose, "exposures differ in vertex count"));
    }
    if h.n() > n {
        return Err(fail(Phase::Decompose, format!("target has {} vertices, host {n}", h.n())));
    }
    if let Some(v) = (0..h.n()).find(|&v| h.degree(v) > delta) {
        return Err(fail(Phase::Decompose, format!("vertex {v} has degree {} > Δ = {delta}", h.degree(v))));
    }
    Ok(n)
}

/// `γ` no larger than `slack / n`, shaded so the floor in the capacity
/// checks keeps exactly `slack` spare vertices.
fn slack_gamma(gamma: f64, slack: usize, n: usize) -> f64 {
    gamma.min((slack as f64 - 0.5).max(0.0) / n as f64)
}

/// `count` vertices of `pool` drawn uniformly, sorted.
fn draw(n: usize, pool: impl IntoIterator<Item = usize>, count: usize, src: RandomSource) -> VertexSubset {
    let mut v: Vec<usize> = pool.into_iter().collect();
    v.shuffle(&mut src.rng());
    v.truncate(count);
    VertexSubset::new(n, v).unwrap()
}

fn reservoir_size(n: usize, cfg: &EmbedConfig) -> usize {
    (cfg.reservoir_fraction * n as f64).floor() as usize
}

/// Restriction of `phi` to `verts`, relabeled by position.
fn restrict(phi: &PartialEmbedding, verts: &[usize]) -> PartialEmbedding {
    let pairs = verts.iter().enumerate().filter_map(|(i, &v)| phi.get(v).map(|g| (i, g)));
    PartialEmbedding::from_pairs(verts.len(), phi.host_n(), pairs).expect("restriction of an injective map")
}

/// Copies new assignments of `sub` (labels of `verts`) back into `phi`.
fn lift(phi: &mut PartialEmbedding, verts: &[usize], sub: &PartialEmbedding) -> Result<(), String> {
    for (i, g) in sub.pairs() {
        let v = verts[i];
        match phi.get(v) {
            Some(old) if old == g => {}
            Some(old) => return Err(format!("vertex {v} moved from {old} to {g}")),
            None => phi.assign(v, g).map_err(|e| e.to_string())?,
        }
    }
    Ok(())
}

fn positions(verts: &[usize], subset: impl IntoIterator<Item = usize>) -> VertexSubset {
    VertexSubset::new(verts.len(), subset.into_iter().map(|v| verts.binary_search(&v).expect("vertex in list"))).unwrap()
}

/// Maps `vertices` (ascending) to the lowest free host vertices not in `avoid`.
fn assign_ascending(phi: &mut PartialEmbedding, vertices: &[usize], avoid: &FixedBitSet) -> Result<Vec<(usize, usize)>, String> {
    let free: Vec<usize> = phi.free().filter(|&g| !avoid.contains(g)).take(vertices.len()).collect();
    if free.len() < vertices.len() {
        return Err(format!("{} vertices to place, {} free", vertices.len(), free.len()));
    }
    let pairs: Vec<(usize, usize)> = vertices.iter().copied().zip(free).collect();
    for &(v, g) in &pairs {
        phi.assign(v, g).map_err(|e| e.to_string())?;
    }
    Ok(pairs)
}

fn isolated(h: &Graph) -> Vec<usize> {
    (0..h.n()).filter(|&v| h.degree(v) == 0).collect()
}

fn verify(host: &Graph, h: &Graph, phi: &PartialEmbedding) -> Result<(), PipelineError> {
    match verify_embedding(host, h, phi, &Scope::Full) {
        Verdict::Pass => Ok(()),
        v => Err(fail(Phase::Verify, format!("{v:?}"))),
    }
}

/// Runs `attempt` with fresh child streams until it succeeds or the retry
/// budget runs out.
fn with_retries<T>(
    retries: usize,
    src: RandomSource,
    trace: &mut Vec<TraceEvent>,
    mut attempt: impl FnMut(usize, RandomSource, &mut Vec<TraceEvent>) -> Result<T, PipelineError>,
) -> Result<(T, usize), PipelineError> {
    let mut last = None;
    for a in 0..=retries {
        match attempt(a, src.child(a as u64), trace) {
            Ok(v) => return Ok((v, a + 1)),
            Err(e) => {
                trace.push(TraceEvent::Note { attempt: a, phase: e.phase, message: e.detail.clone() });
                last = Some(e);
            }
        }
    }
    let mut e = last.expect("at least one attempt");
    e.attempts = retries + 1;
    Err(e)
}

#[derive(Clone, Copy)]
enum DirectRule {
    /// Matching removal plus back-degree `Δ - 1`.
    Delta(usize),
    /// Plain S-embedding with back-degree `d`.
    Degenerate(usize),
}

/// Embeds the non-isolated part of `h` into `host` with no anchors, then
/// places the isolated vertices on the lowest leftovers.
fn direct_attempt(
    host: &Graph,
    h: &Graph,
    rule: DirectRule,
    cfg: &EmbedConfig,
    attempt: usize,
    src: RandomSource,
    trace: &mut Vec<TraceEvent>,
) -> Result<PartialEmbedding, PipelineError> {
    let n = host.n();
    let fillers = isolated(h);
    let core: Vec<usize> = (0..h.n()).filter(|&v| h.degree(v) > 0).collect();
    let hc = h.induced(&core);
    let slack = n - core.len();
    let w = draw(n, 0..n, reservoir_size(n, cfg).min(2 * slack), src.child(0));
    let gamma = slack_gamma(cfg.gamma, slack, n);
    let none = VertexSubset::empty(n);
    let sub = match rule {
        DirectRule::Delta(delta) => {
            let out = delta_s_embed(
                host,
                &hc,
                &VertexSubset::empty(hc.n()),
                PartialEmbedding::new(hc.n(), n),
                &none,
                &w,
                delta,
                gamma,
                src.child(1),
                cfg.search,
            )
            .map_err(|e| fail(Phase::Phase2a, e))?;
            trace.push(TraceEvent::Steps {
                attempt,
                phase: Phase::Phase2a,
                steps: out.sembed.trace,
                occupancy: out.sembed.occupancy,
            });
            out.phi
        }
        DirectRule::Degenerate(d) => {
            let empty = VertexSubset::empty(hc.n());
            let ordering = degeneracy_ordering_with_anchor(&hc, &empty, d).map_err(|e| fail(Phase::Phase2a, e))?;
            let mut res = Reservoir::new(n, &w);
            let out = s_embed_ordered(host, &hc, &empty, PartialEmbedding::new(hc.n(), n), &none, &mut res, &ordering.order, gamma, src.child(1))
                .map_err(|e| fail(Phase::Phase2a, e))?;
            trace.push(TraceEvent::Steps { attempt, phase: Phase::Phase2a, steps: out.trace, occupancy: out.occupancy });
            out.phi
        }
    };
    let mut phi = PartialEmbedding::new(h.n(), n);
    lift(&mut phi, &core, &sub).map_err(|e| fail(Phase::Phase2a, e))?;
    assign_ascending(&mut phi, &fillers, &FixedBitSet::with_capacity(n)).map_err(|e| fail(Phase::Phase2b, e))?;
    verify(host, h, &phi)?;
    Ok(phi)
}

/// Direct embedding into the union of the exposures: the matching-removal
/// S-embedding with `S = ∅`, isolated vertices placed last.
pub fn embed_direct(exposures: &[Graph], h: &Graph, delta: usize, cfg: &EmbedConfig, src: RandomSource) -> Result<EmbedOutcome, PipelineError> {
    if exposures.is_empty() {
        return Err(fail(Phase::Decompose, "no exposures"));
    }
    check_inputs(exposures, exposures.len(), h, delta)?;
    let host = union_of(exposures);
    let rule = if delta >= 2 { DirectRule::Delta(delta) } else { DirectRule::Degenerate(delta.max(1)) };
    let mut trace = Vec::new();
    let (phi, attempts) = with_retries(cfg.retries, src, &mut trace, |a, s, tr| direct_attempt(&host, h, rule, cfg, a, s, tr))?;
    Ok(EmbedOutcome { phi, route: Route::Direct, degraded: None, t: 0, attempts, trace })
}

/// Pocket vertices mapped onto the copies: `v ∈ S_w \ {w}` goes to
/// `copies[i][f_w(v) - 1]` for the `i`-th anchor.
fn phase1_map(dec: &Decomposition, copies: &[Vec<usize>], phi: &mut PartialEmbedding) -> Result<(), String> {
    for (pocket, copy) in dec.pockets.iter().zip(copies) {
        for (&v, &label) in pocket.members.as_slice().iter().zip(&pocket.f_map) {
            if v != pocket.anchor {
                phi.assign(v, copy[label - 1]).map_err(|e| e.to_string())?;
            }
        }
    }
    Ok(())
}

/// Anchors onto `right` through `B(Γ-images, right)` in `host`.
fn final_matching(
    host: &Graph,
    dec: &Decomposition,
    gamma_images: &[Vec<usize>],
    right: &VertexSubset,
    phi: &mut PartialEmbedding,
) -> Result<Vec<(usize, usize)>, PipelineError> {
    let family: Vec<(usize, Vec<usize>)> = dec.pockets.iter().zip(gamma_images).map(|(p, g)| (p.anchor, g.clone())).collect();
    let aux = aux_bipartite(host, &family, right).map_err(|e| fail(Phase::Matching, e))?;
    let m = max_matching(&aux);
    if !m.saturates_left() {
        let mut e = fail(Phase::Matching, format!("matched {} of {} anchors", m.size, family.len()));
        e.hall = m.deficient;
        return Err(e);
    }
    let pairs: Vec<(usize, usize)> = family.iter().zip(&m.assignment).map(|((w, _), g)| (*w, g.unwrap())).collect();
    for &(w, g) in &pairs {
        phi.assign(w, g).map_err(|e| fail(Phase::Matching, e))?;
    }
    Ok(pairs)
}

/// Anchors whose pocket is a single vertex: embed everything else, then
/// put the anchors on the leftovers.
#[allow(clippy::too_many_arguments)]
fn trivial_pocket_attempt(
    exposures: &[Graph],
    h: &Graph,
    dec: &Decomposition,
    rule: DirectRule,
    cfg: &EmbedConfig,
    attempt: usize,
    src: RandomSource,
    trace: &mut Vec<TraceEvent>,
) -> Result<PartialEmbedding, PipelineError> {
    let host = union_of(exposures);
    let host2 = phase_host(exposures, 2, cfg.exposure);
    let n = host.n();
    let rest: Vec<usize> = (0..h.n()).filter(|&v| !dec.d_set.contains(v)).collect();
    let hr = h.induced(&rest);
    let sub = direct_attempt(&host2, &hr, rule, cfg, attempt, src, trace)?;
    let mut phi = PartialEmbedding::new(h.n(), n);
    lift(&mut phi, &rest, &sub).map_err(|e| fail(Phase::Phase2a, e))?;
    let d: Vec<usize> = dec.d_set.iter().collect();
    let pairs = assign_ascending(&mut phi, &d, &FixedBitSet::with_capacity(n)).map_err(|e| fail(Phase::Matching, e))?;
    trace.push(TraceEvent::Matching { attempt, phase: Phase::Matching, pairs });
    verify(&host, h, &phi)?;
    Ok(phi)
}

#[allow(clippy::too_many_arguments)]
fn degenerate_attempt(
    exposures: &[Graph],
    h: &Graph,
    dec: &Decomposition,
    d: usize,
    cfg: &EmbedConfig,
    attempt: usize,
    src: RandomSource,
    trace: &mut Vec<TraceEvent>,
) -> Result<PartialEmbedding, PipelineError> {
    let n = exposures[0].n();
    let t = dec.pockets.len();
    let f = dec.f_graph();

    // Phase 1: t disjoint copies of F in G_1.
    let copies = find_f_matching(&exposures[0], &f, t, &VertexSubset::full(n), src.child(0), cfg.search)
        .map_err(|(e, _)| fail(Phase::Phase1, e))?;
    let copies: Vec<Vec<usize>> = copies.iter().map(PartialEmbedding::to_vec).collect();
    let gamma = dec.gamma();
    let gamma_images: Vec<Vec<usize>> = copies.iter().map(|c| gamma.iter().map(|i| c[i]).collect()).collect();
    let mut phi = PartialEmbedding::new(h.n(), n);
    phase1_map(dec, &copies, &mut phi).map_err(|e| fail(Phase::Phase1, e))?;

    // Phase 2: X of size 3t/4, W = everything else still free.
    let x = draw(n, phi.free(), 3 * t / 4, src.child(1));
    let w = VertexSubset::new(n, phi.free().filter(|&g| !x.contains(g))).unwrap();
    let mut res = Reservoir::new(n, &w);
    let s = dec.s_set(h.n());
    let keep: Vec<(usize, usize)> = h.edges().filter(|&(a, b)| !dec.d_set.contains(a) && !dec.d_set.contains(b)).collect();
    let h_no_d = Graph::new(h.n(), &keep).expect("subgraph");
    let ordering = degeneracy_ordering_with_anchor(&h_no_d, &s, 2 * d).map_err(|e| fail(Phase::Phase2a, e))?;
    let order: Vec<usize> = ordering.order.into_iter().filter(|&v| !dec.d_set.contains(v)).collect();
    let gamma_eff = slack_gamma(cfg.gamma, t - x.len(), n);
    let host2 = phase_host(exposures, 2, cfg.exposure);
    let out = s_embed_ordered(&host2, h, &s, phi, &x, &mut res, &order, gamma_eff, src.child(2))
        .map_err(|e| fail(Phase::Phase2a, e))?;
    trace.push(TraceEvent::Steps { attempt, phase: Phase::Phase2a, steps: out.trace, occupancy: out.occupancy });
    let mut phi = out.phi;
    if let Some(g) = x.iter().find(|&g| !phi.is_free(g)) {
        return Err(fail(Phase::Phase2a, format!("X vertex {g} used")));
    }

    // Phase 3: anchors onto the t leftovers.
    let right = VertexSubset::new(n, phi.free()).unwrap();
    let host3 = phase_host(exposures, 3, cfg.exposure);
    let pairs = final_matching(&host3, dec, &gamma_images, &right, &mut phi)?;
    trace.push(TraceEvent::Matching { attempt, phase: Phase::Matching, pairs });
    verify(&union_of(exposures), h, &phi)?;
    Ok(phi)
}

/// Spanning embedding of a `d`-degenerate `h` with maximum degree `Δ` into
/// `G_1 ∪ G_2 ∪ G_3`.
pub fn embed_degenerate(
    exposures: &[Graph],
    h: &Graph,
    d: usize,
    delta: usize,
    cfg: &EmbedConfig,
    src: RandomSource,
) -> Result<EmbedOutcome, PipelineError> {
    check_inputs(exposures, 3, h, delta)?;
    let h = &h.with_isolated(exposures[0].n() - h.n());
    let k = cfg.separation.unwrap_or(20 * d * d);
    let mut trace = Vec::new();
    let dec = match decompose_degenerate(h, d, delta, k) {
        Ok(dec) => dec,
        Err(DecomposeError::EmptyD { .. }) => return degrade(exposures, h, DirectRule::Degenerate((2 * d).min(delta)), cfg, src, "empty D"),
        Err(e) => return Err(fail(Phase::Decompose, e)),
    };
    let t = dec.pockets.len();
    trace.push(TraceEvent::Note {
        attempt: 0,
        phase: Phase::Decompose,
        message: format!("|D| = {t}, |F*| = {}, buckets {:?}", dec.f_star.n(), dec.histogram),
    });
    let (phi, attempts) = if dec.gamma().is_empty() {
        let rule = DirectRule::Degenerate((2 * d).min(delta).max(1));
        with_retries(cfg.retries, src, &mut trace, |a, s, tr| trivial_pocket_attempt(exposures, h, &dec, rule, cfg, a, s, tr))?
    } else {
        with_retries(cfg.retries, src, &mut trace, |a, s, tr| degenerate_attempt(exposures, h, &dec, d, cfg, a, s, tr))?
    };
    Ok(EmbedOutcome { phi, route: Route::Degenerate, degraded: None, t, attempts, trace })
}

fn degrade(
    exposures: &[Graph],
    h: &Graph,
    rule: DirectRule,
    cfg: &EmbedConfig,
    src: RandomSource,
    why: &str,
) -> Result<EmbedOutcome, PipelineError> {
    let host = union_of(exposures);
    let mut trace = vec![TraceEvent::Note { attempt: 0, phase: Phase::Decompose, message: format!("direct fallback: {why}") }];
    let (phi, attempts) = with_retries(cfg.retries, src, &mut trace, |a, s, tr| direct_attempt(&host, h, rule, cfg, a, s, tr))?;
    Ok(EmbedOutcome { phi, route: Route::Direct, degraded: Some(why.to_string()), t: 0, attempts, trace })
}

/// Largest `m` whose absorber needs at most `available` anchors and for
/// which a robust base template turns up, with that template.
fn absorber_template(available: usize, cfg: &EmbedConfig, src: &RandomSource) -> Option<(usize, BipartiteTemplate)> {
    let mut m = 0;
    while absorber_left_size(m + 1, cfg.z_degree, cfg.path_length) <= available {
        m += 1;
    }
    (1..=m).rev().find_map(|m| {
        build_absorber_template(m, cfg.z_degree, cfg.path_length, src.child(TEMPLATE_STREAM + m as u64), cfg.template_attempts)
            .ok()
            .map(|tpl| (m, tpl))
    })
}

/// Child streams below this are used by the attempts.
const TEMPLATE_STREAM: u64 = 1 << 32;

struct BoundedPlan {
    dec: Decomposition,
    template: BipartiteTemplate,
    delta: usize,
}

fn bounded_attempt(
    exposures: &[Graph],
    h: &Graph,
    plan: &BoundedPlan,
    cfg: &EmbedConfig,
    attempt: usize,
    src: RandomSource,
    trace: &mut Vec<TraceEvent>,
) -> Result<PartialEmbedding, PipelineError> {
    let BoundedPlan { dec, template, delta } = plan;
    let delta = *delta;
    let n = exposures[0].n();
    let t = dec.pockets.len();
    let f = dec.f_graph();
    let gamma = dec.gamma();
    let g1 = &exposures[0];

    // Absorber in G_1, then Phase 1 onto its copies.
    let absorber: Absorber =
        realize_absorber(g1, template, &f, &gamma, delta, src.child(1), cfg.search).map_err(|e| fail(Phase::Absorber, e))?;
    debug_assert_eq!(absorber.copies.len(), t);
    let mut phi = PartialEmbedding::new(h.n(), n);
    phase1_map(dec, &absorber.copies, &mut phi).map_err(|e| fail(Phase::Phase1, e))?;

    // Partition of R; |R_2| is bounded by the part of Y not kept for Phase 3.
    let y_keep = t - absorber.x_images.len();
    let r2_max = absorber.y_images.len() - y_keep;
    let beta2 = 2.0 * r2_max as f64 / t as f64;
    let part = partition_r(h, dec, beta2, delta).map_err(|e| fail(Phase::PartitionR, e))?;
    trace.push(TraceEvent::Note {
        attempt,
        phase: Phase::PartitionR,
        message: format!("|R_1| = {}, |I| = {}, |R_2| = {}, k = {}", part.r1.len(), part.i.len(), part.r2.len(), part.k_bucket),
    });

    // Phase 2.a: S ∪ R_1 (isolated vertices of R_1 held back) avoiding X' = X ∪ X''.
    let mut y_sorted = absorber.y_images.clone();
    y_sorted.sort_unstable();
    let x2 = VertexSubset::new(n, y_sorted.iter().copied().take(y_keep + part.r2.len())).unwrap();
    let x_abs = VertexSubset::new(n, absorber.x_images.iter().copied()).unwrap();
    let x_prime = VertexSubset::new(n, x_abs.iter().chain(x2.iter())).unwrap();
    let x_prime_bits = x_prime.to_bits();
    let s = dec.s_set(h.n());
    let (fillers, r1_core): (Vec<usize>, Vec<usize>) = part.r1.iter().partition(|&v| h.degree(v) == 0);
    let mut verts_a: Vec<usize> = s.iter().chain(r1_core.iter().copied()).collect();
    verts_a.sort_unstable();
    let h_a = h.induced(&verts_a);
    let s_a = positions(&verts_a, s.iter());
    let slack = n - x_prime.len() - verts_a.len();
    // The edge-pool half of W_1 stays free through the S-embedding, so it may
    // not exceed the slack or the reinserted edges run out of W'.
    let w1 = draw(n, phi.free().filter(|&g| !x_prime_bits.contains(g)), reservoir_size(n, cfg).min(2 * slack), src.child(2));
    let host2 = phase_host(exposures, 2, cfg.exposure);
    let out = delta_s_embed(
        &host2,
        &h_a,
        &s_a,
        restrict(&phi, &verts_a),
        &x_prime,
        &w1,
        delta,
        slack_gamma(cfg.gamma, slack, n),
        src.child(3),
        cfg.search,
    )
    .map_err(|e| fail(Phase::Phase2a, e))?;
    trace.push(TraceEvent::Steps { attempt, phase: Phase::Phase2a, steps: out.sembed.trace, occupancy: out.sembed.occupancy });
    lift(&mut phi, &verts_a, &out.phi).map_err(|e| fail(Phase::Phase2a, e))?;

    // Phase 2.b: I and the held-back isolated vertices onto U.
    let mut loose: Vec<usize> = part.i.iter().chain(fillers).collect();
    loose.sort_unstable();
    let unused = phi.free().filter(|&g| !x_prime_bits.contains(g)).count();
    if unused != loose.len() {
        return Err(fail(Phase::Phase2b, format!("|U| = {unused} but {} vertices to place", loose.len())));
    }
    assign_ascending(&mut phi, &loose, &x_prime_bits).map_err(|e| fail(Phase::Phase2b, e))?;

    // Phase 2.c: R_2 with the pool X'', avoiding X.
    if !part.r2.is_empty() {
        let mut verts_c: Vec<usize> = (0..h.n()).filter(|&v| phi.get(v).is_some() || part.r2.contains(v)).collect();
        verts_c.sort_unstable();
        let mapped: Vec<usize> = verts_c.iter().copied().filter(|&v| phi.get(v).is_some()).collect();
        let out = delta_s_embed(
            &host2,
            &h.induced(&verts_c),
            &positions(&verts_c, mapped),
            restrict(&phi, &verts_c),
            &x_abs,
            &x2,
            delta,
            0.0,
            src.child(4),
            cfg.search,
        )
        .map_err(|e| fail(Phase::Phase2c, e))?;
        trace.push(TraceEvent::Steps { attempt, phase: Phase::Phase2c, steps: out.sembed.trace, occupancy: out.sembed.occupancy });
        lift(&mut phi, &verts_c, &out.phi).map_err(|e| fail(Phase::Phase2c, e))?;
    }

    // Entering Phase 3: V \ (X ∪ Y) fully used, X untouched.
    let y_bits = VertexSubset::new(n, absorber.y_images.iter().copied()).unwrap().to_bits();
    if let Some(g) = phi.free().find(|&g| !x_abs.contains(g) && !y_bits.contains(g)) {
        return Err(fail(Phase::Phase2c, format!("host vertex {g} outside X ∪ Y left unused")));
    }
    if let Some(g) = x_abs.iter().find(|&g| !phi.is_free(g)) {
        return Err(fail(Phase::Phase2c, format!("X vertex {g} used")));
    }

    // Phase 3: robust matching of D onto X ∪ Y'.
    let right = VertexSubset::new(n, phi.free()).unwrap();
    let host3 = match cfg.exposure {
        ExposureMode::Split => g1.clone(),
        ExposureMode::Cumulative => union_of(exposures),
    };
    let pairs = final_matching(&host3, dec, &absorber.gamma_images, &right, &mut phi)?;
    trace.push(TraceEvent::Matching { attempt, phase: Phase::Matching, pairs });
    verify(&union_of(exposures), h, &phi)?;
    Ok(phi)
}

/// Spanning embedding of `h` with maximum degree `Δ >= 3` into `G_1 ∪ G_2`.
pub fn embed_bounded(exposures: &[Graph], h: &Graph, delta: usize, cfg: &EmbedConfig, src: RandomSource) -> Result<EmbedOutcome, PipelineError> {
    check_inputs(exposures, 2, h, delta)?;
    if delta < 3 {
        return Err(fail(Phase::Decompose, format!("Δ = {delta} < 3")));
    }
    let h = &h.with_isolated(exposures[0].n() - h.n());
    let k = cfg.separation.unwrap_or(4 * delta + 5);
    let mut dec = match decompose_bounded(h, delta, k) {
        Ok(dec) => dec,
        Err(DecomposeError::EmptyD { .. }) => return degrade(exposures, h, DirectRule::Delta(delta), cfg, src, "empty D"),
        Err(e) => return Err(fail(Phase::Decompose, e)),
    };
    let mut trace = vec![TraceEvent::Note {
        attempt: 0,
        phase: Phase::Decompose,
        message: format!("|D| = {}, |F*| = {}, buckets {:?}", dec.pockets.len(), dec.f_star.n(), dec.histogram),
    }];
    if dec.gamma().is_empty() {
        let t = dec.pockets.len();
        let (phi, attempts) = with_retries(cfg.retries, src, &mut trace, |a, s, tr| {
            trivial_pocket_attempt(exposures, h, &dec, DirectRule::Delta(delta), cfg, a, s, tr)
        })?;
        return Ok(EmbedOutcome { phi, route: Route::Bounded, degraded: None, t, attempts, trace });
    }
    let Some((m, template)) = absorber_template(dec.pockets.len(), cfg, &src) else {
        let why = format!("no robust absorber template for |D| = {}", dec.pockets.len());
        return degrade(exposures, h, DirectRule::Delta(delta), cfg, src, &why);
    };
    dec.truncate(absorber_left_size(m, cfg.z_degree, cfg.path_length));
    let t = dec.pockets.len();
    trace.push(TraceEvent::Note { attempt: 0, phase: Phase::Absorber, message: format!("m = {m}, t = {t}") });
    let plan = BoundedPlan { dec, template, delta };
    let result = with_retries(cfg.retries, src, &mut trace, |a, s, tr| bounded_attempt(exposures, h, &plan, cfg, a, s, tr));
    match result {
        Ok((phi, attempts)) => Ok(EmbedOutcome { phi, route: Route::Bounded, degraded: None, t, attempts, trace }),
        Err(e) if e.phase == Phase::PartitionR => degrade(exposures, h, DirectRule::Delta(delta), cfg, src, "no eligible I"),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{sample_exposures, sample_gnp};

    fn complete(n: usize) -> Graph {
        sample_gnp(n, 1.0, RandomSource::new(0, 0)).unwrap()
    }

    fn k4_factor(copies: usize) -> Graph {
        let e: Vec<_> = (0..copies)
            .flat_map(|c| {
                let b = 4 * c;
                [(b, b + 1), (b, b + 2), (b, b + 3), (b + 1, b + 2), (b + 1, b + 3), (b + 2, b + 3)]
            })
            .collect();
        Graph::new(4 * copies, &e).unwrap()
    }

    fn path(n: usize) -> Graph {
        Graph::new(n, &(1..n).map(|i| (i - 1, i)).collect::<Vec<_>>()).unwrap()
    }

    fn passes(host: &Graph, h: &Graph, out: &EmbedOutcome) -> bool {
        verify_embedding(host, &h.with_isolated(host.n() - h.n()), &out.phi, &Scope::Full).is_pass()
    }

    #[test]
    fn edgeless_target_into_empty_host() {
        let ex = vec![Graph::empty(30), Graph::empty(30)];
        let out = embed_direct(&ex, &Graph::empty(30), 3, &EmbedConfig::default(), RandomSource::new(1, 0)).unwrap();
        assert!(out.phi.is_total());
        assert_eq!(out.route, Route::Direct);
    }

    #[test]
    fn degree_above_delta_rejected() {
        let star = Graph::new(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let ex = vec![complete(20), complete(20)];
        let err = embed_bounded(&ex, &star, 3, &EmbedConfig::default(), RandomSource::new(1, 0)).unwrap_err();
        assert_eq!(err.phase, Phase::Decompose);
    }

    #[test]
    fn wrong_exposure_count_rejected() {
        let ex = vec![complete(10)];
        let err = embed_degenerate(&ex, &path(10), 1, 2, &EmbedConfig::default(), RandomSource::new(1, 0)).unwrap_err();
        assert_eq!(err.phase, Phase::Decompose);
    }

    #[test]
    fn bounded_k4_factor_on_complete_host() {
        let h = k4_factor(200);
        let ex = vec![complete(800), complete(800)];
        let out = embed_bounded(&ex, &h, 3, &EmbedConfig::default(), RandomSource::new(3, 0)).unwrap();
        assert_eq!(out.route, Route::Bounded);
        assert!(out.degraded.is_none() && out.t > 0);
        assert!(passes(&ex[0], &h, &out));
    }

    #[test]
    fn bounded_on_random_host_is_deterministic() {
        let h = k4_factor(90);
        let ex = sample_exposures(400, 0.7, 2, RandomSource::new(5, 0)).unwrap();
        let cfg = EmbedConfig::default();
        let a = embed_bounded(&ex, &h, 3, &cfg, RandomSource::new(5, 1)).unwrap();
        let b = embed_bounded(&ex, &h, 3, &cfg, RandomSource::new(5, 1)).unwrap();
        assert_eq!(a.phi, b.phi);
        assert!(passes(&union_of(&ex), &h, &a));
    }

    #[test]
    fn degenerate_path_square_with_slack() {
        let n = 300;
        let e: Vec<_> = (1..270).flat_map(|i| [(i - 1, i)].into_iter().chain((i >= 2).then(|| (i - 2, i)))).collect();
        let h = Graph::new(270, &e).unwrap();
        let ex = sample_exposures(n, 0.7, 3, RandomSource::new(9, 0)).unwrap();
        let out = embed_degenerate(&ex, &h, 2, 4, &EmbedConfig::default(), RandomSource::new(9, 1)).unwrap();
        assert!(passes(&union_of(&ex), &h, &out));
    }

    #[test]
    fn failure_names_a_phase() {
        let ex = vec![Graph::empty(40), Graph::empty(40)];
        let cfg = EmbedConfig { retries: 1, ..EmbedConfig::default() };
        let err = embed_bounded(&ex, &k4_factor(10), 3, &cfg, RandomSource::new(1, 0)).unwrap_err();
        assert_eq!(err.attempts, 2);
    }

    #[test]
    fn slack_gamma_caps() {
        assert_eq!(slack_gamma(0.05, 100, 1000), 0.05);
        assert!((slack_gamma(0.05, 10, 1000) - 0.0095).abs() < 1e-12);
    }
}
