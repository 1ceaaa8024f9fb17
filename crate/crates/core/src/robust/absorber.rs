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


use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use serde::Serialize;
use thiserror::Error;

use super::{BipartiteTemplate, Provenance, Right};
use crate::density::{attach_outside, path_gadget, GadgetSpec};
use crate::embed::search::{anchored_maps, find_copy};
use crate::embed::{aux_bipartite, AuxBipartite, SearchParams};
use crate::graph::{Graph, VertexSubset};
use crate::random::RandomSource;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AbsorberPhase {
    /// Template or gadget preconditions.
    Template,
    /// Copies of `F_Γ⁺` for the base left vertices.
    PlusMatching,
    /// Placing `X ∪ Y`.
    Placement,
    /// Anchored `F_Γ`-paths.
    Paths,
}

#[derive(Debug, Error)]
#[error("absorber {phase:?}: {detail}")]
pub struct AbsorberError {
    pub phase: AbsorberPhase,
    pub detail: String,
    /// Host anchors `(w_z, w)` of the first path that could not be placed.
    pub anchor: Option<(usize, usize)>,
}

fn fail(phase: AbsorberPhase, detail: impl Into<String>) -> AbsorberError {
    AbsorberError { phase, detail: detail.into(), anchor: None }
}

/// Host realization of a subdivided template: one copy of `F` per left
/// vertex, with `Γ_z ⊆ N(γ(v))` for every template edge `z - v`.
#[derive(Clone, Debug)]
pub struct Absorber {
    pub template: BipartiteTemplate,
    pub f: Graph,
    pub gamma: VertexSubset,
    /// Host image of each `F` vertex, per left vertex.
    pub copies: Vec<Vec<usize>>,
    /// Sorted host images of `Γ`, per left vertex.
    pub gamma_images: Vec<Vec<usize>>,
    /// Host image per `X` id (`X ∪ X'`).
    pub x_images: Vec<usize>,
    pub y_images: Vec<usize>,
    pub t: usize,
    pub beta1: f64,
    pub beta2: f64,
}

impl Absorber {
    pub fn image(&self, r: Right) -> usize {
        match r {
            Right::X(i) => self.x_images[i],
            Right::Y(j) => self.y_images[j],
        }
    }

    /// Every host vertex the absorber occupies.
    pub fn occupied(&self, n: usize) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(n);
        b.extend(self.copies.iter().flatten().copied());
        b.extend(self.x_images.iter().copied());
        b.extend(self.y_images.iter().copied());
        b
    }

    pub fn host_vertices(&self) -> usize {
        self.copies.iter().map(Vec::len).sum::<usize>() + self.x_images.len() + self.y_images.len()
    }
}

/// Host vertices needed to realize `template` with copies of `F`.
pub fn absorber_footprint(template: &BipartiteTemplate, f_vertices: usize) -> usize {
    template.z_count() * f_vertices + template.x_count() + template.y_count()
}

pub fn realize_absorber(
    host: &Graph,
    template: &BipartiteTemplate,
    f: &Graph,
    gamma: &VertexSubset,
    delta: usize,
    src: RandomSource,
    params: SearchParams,
) -> Result<Absorber, AbsorberError> {
    use AbsorberPhase::*;
    let Provenance::Subdivided { length, z_base, x_base, paths } = &template.provenance else {
        return Err(fail(Template, "template is not subdivided"));
    };
    if gamma.is_empty() {
        return Err(fail(Template, "Γ is empty"));
    }
    let layout = GadgetSpec::new(f.clone(), gamma.clone(), length - 1, delta).map_err(|e| fail(Template, e.to_string()))?;
    let gadget = path_gadget(&layout);
    let need = absorber_footprint(template, f.n());
    if need > host.n() {
        return Err(fail(Template, format!("absorber needs {need} host vertices, host has {}", host.n())));
    }
    let vf = f.n();
    let h = (length - 1) / 2;
    let mut by_z: Vec<Vec<usize>> = vec![Vec::new(); *z_base];
    for (i, p) in paths.iter().enumerate() {
        by_z[p.z].push(i);
    }

    let mut copies = vec![Vec::new(); template.z_count()];
    let mut x_images = vec![usize::MAX; template.x_count()];
    let mut used = FixedBitSet::with_capacity(host.n());
    let plus_src = src.child(0);
    let mut placed = false;
    let mut best = 0;
    for attempt in 0..=params.retries as u64 {
        let mut rng = plus_src.child(attempt).rng();
        used.clear();
        let mut done = 0;
        for (z, path_ids) in by_z.iter().enumerate() {
            let plus = attach_outside(f, gamma, path_ids.len()).map_err(|e| fail(Template, e.to_string()))?;
            let mut pool = used.clone();
            pool.toggle_range(..);
            let Some(map) = find_copy(host, &plus, &[], &pool, &mut rng, params.node_budget) else {
                break;
            };
            used.extend(map.iter().copied());
            copies[z] = map[..vf].to_vec();
            for (j, &pi) in path_ids.iter().enumerate() {
                x_images[paths[pi].xs[0]] = map[vf + j];
            }
            done += 1;
        }
        best = best.max(done);
        if done == *z_base {
            placed = true;
            break;
        }
    }
    if !placed {
        return Err(fail(PlusMatching, format!("found {best} of {z_base} copies of F_Γ⁺")));
    }

    let mut free: Vec<usize> = (0..host.n()).filter(|&g| !used.contains(g)).collect();
    free.shuffle(&mut src.child(1).rng());
    let fixed_right = x_base + template.y_count();
    let internal = paths.len() * (h * vf + h - 1);
    if free.len() < fixed_right + internal {
        return Err(fail(Placement, format!("{} free vertices, need {}", free.len(), fixed_right + internal)));
    }
    for (i, &g) in free[..*x_base].iter().enumerate() {
        x_images[i] = g;
    }
    let y_images: Vec<usize> = free[*x_base..fixed_right].to_vec();
    used.extend(free[..fixed_right].iter().copied());

    let image = |r: Right, x_images: &[usize]| match r {
        Right::X(i) => x_images[i],
        Right::Y(j) => y_images[j],
    };
    let tuples: Vec<Vec<usize>> = paths.iter().map(|p| vec![x_images[p.xs[0]], image(p.v, &x_images)]).collect();
    let mut pool = used.clone();
    pool.toggle_range(..);
    let w = VertexSubset::from_bits(&pool);
    let (e0, e1) = gadget.endpoints;
    let maps = anchored_maps(host, &gadget.graph, &[e0, e1], &tuples, &w, src.child(2), params).map_err(|e| {
        let index = match e {
            crate::embed::EmbedError::Anchored { index } => index,
            _ => 0,
        };
        AbsorberError {
            phase: Paths,
            detail: e.to_string(),
            anchor: tuples.get(index).map(|t| (t[0], t[1])),
        }
    })?;
    for (p, map) in paths.iter().zip(&maps) {
        for j in 0..h {
            let off = gadget.copy_offsets[j];
            copies[p.zs[j]] = map[off..off + vf].to_vec();
            if j + 1 < h {
                x_images[p.xs[j + 1]] = map[gadget.outside[j + 1]];
            }
        }
    }

    let gamma_images: Vec<Vec<usize>> = copies
        .iter()
        .map(|c| {
            let mut g: Vec<usize> = gamma.iter().map(|v| c[v]).collect();
            g.sort_unstable();
            g
        })
        .collect();
    let t = template.z_count();
    let beta1 = 1.0 - template.x_count() as f64 / t as f64;
    let beta2 = template.y_count() as f64 / t as f64 - beta1;
    let a = Absorber {
        template: template.clone(),
        f: f.clone(),
        gamma: gamma.clone(),
        copies,
        gamma_images,
        x_images,
        y_images,
        t,
        beta1,
        beta2,
    };
    verify_absorber(&a, host).map_err(|e| fail(Paths, format!("realization failed verification: {e}")))?;
    Ok(a)
}

/// Checks copies, disjointness and every template containment.
pub fn verify_absorber(a: &Absorber, host: &Graph) -> Result<(), String> {
    let mut seen = FixedBitSet::with_capacity(host.n());
    let all = a.copies.iter().flatten().chain(&a.x_images).chain(&a.y_images);
    for &g in all {
        if g >= host.n() {
            return Err(format!("host vertex {g} out of range"));
        }
        if seen.put(g) {
            return Err(format!("host vertex {g} used twice"));
        }
    }
    for (z, c) in a.copies.iter().enumerate() {
        if c.len() != a.f.n() {
            return Err(format!("left vertex {z} has no copy"));
        }
        if let Some((u, v)) = a.f.edges().find(|&(u, v)| !host.has_edge(c[u], c[v])) {
            return Err(format!("copy {z} misses edge {u}-{v}"));
        }
    }
    for (z, r) in a.template.edges() {
        let g = a.image(r);
        if let Some(&s) = a.gamma_images[z].iter().find(|&&s| !host.has_edge(s, g)) {
            return Err(format!("template edge {z}-{r:?}: {s} not adjacent to {g}"));
        }
    }
    Ok(())
}

/// `B_G({Γ_z}, X ∪ Y)`; owners are template left ids.
pub fn absorber_aux(a: &Absorber, host: &Graph) -> AuxBipartite {
    let family: Vec<(usize, Vec<usize>)> = a.gamma_images.iter().cloned().enumerate().collect();
    let right = VertexSubset::new(host.n(), a.x_images.iter().chain(&a.y_images).copied()).expect("absorber images are distinct");
    aux_bipartite(host, &family, &right).expect("Γ is nonempty")
}
