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


//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! FAIL. Runs without the libtest harness so the report is never captured.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use spanning_embed::decompose::{decompose_bounded, decompose_degenerate, verify_decomposition, DecomposeMode};
use spanning_embed::density::{
    build_f_gamma_path, build_f_gamma_plus, m1_density_with, m_density_with, rooted_density_with, Backend, DensityValue,
    GadgetSpec,
};
use spanning_embed::embed::{verify_embedding, EmbedConfig, Route, Scope};
use spanning_embed::graph::{canonical_rooted_form, Graph, VertexSubset};
use spanning_embed::harness::{
    clique_factor, csv_string, cycle_union, generate_target, power_path, random_forest, random_regular, run_pipeline,
    sweep, trial_source, ExperimentConfig, TargetSpec,
};
use spanning_embed::random::{sample_exposures, sample_gnp, RandomSource};
use spanning_embed::robust::{make_base_template, split_high_degree, subdivide, verify_y_robust, RobustMode, RobustVerdict};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn half_below(delta: usize) -> BigRational {
    BigRational::new(BigInt::from(2 * delta - 1), BigInt::from(2))
}

fn random_graph(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let e: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let e: Vec<_> = e.into_iter().filter(|_| rng.random_bool(p)).collect();
    Graph::new(n, &e).unwrap()
}

fn connected(g: &Graph) -> bool {
    g.n() == 0 || g.distances_from(0).iter().all(|&d| d != usize::MAX)
}

fn relabel(g: &Graph, rng: &mut impl Rng) -> Graph {
    let mut perm: Vec<usize> = (0..g.n()).collect();
    perm.shuffle(rng);
    let e: Vec<_> = g.edges().map(|(u, v)| (perm[u].min(perm[v]), perm[u].max(perm[v]))).collect();
    Graph::new(g.n(), &e).unwrap()
}

/// Same error kind, or equal values with witnesses that recompute to them.
fn agree(a: &Result<DensityValue, impl std::fmt::Display>, b: &Result<DensityValue, impl std::fmt::Display>, g: &Graph, offset: impl Fn(&DensityValue) -> usize) -> bool {
    match (a, b) {
        (Ok(a), Ok(b)) => a.value == b.value && a.recompute(g, offset(a)) == a.value && b.recompute(g, offset(b)) == b.value,
        (Err(a), Err(b)) => a.to_string() == b.to_string(),
        _ => false,
    }
}

fn criterion_1() -> Outcome {
    let disagreements: Vec<u64> = (0..500u64)
        .into_par_iter()
        .filter(|&seed| {
            let mut rng = RandomSource::new(seed, 1).rng();
            let n = rng.random_range(1..=8);
            let g = random_graph(n, rng.random_range(0.2..0.9), &mut rng);
            let x: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.3)).collect();
            let x = VertexSubset::new(n, x).unwrap();
            let rooted_offset = |v: &DensityValue| x.iter().filter(|&u| v.witness.contains(u)).count().max(1);
            let ok_m = agree(&m_density_with(&g, Backend::Exhaustive), &m_density_with(&g, Backend::Flow), &g, |_| 0);
            let ok_m1 = agree(&m1_density_with(&g, Backend::Exhaustive), &m1_density_with(&g, Backend::Flow), &g, |_| 1);
            let ok_r = agree(
                &rooted_density_with(&g, &x, Backend::Exhaustive),
                &rooted_density_with(&g, &x, Backend::Flow),
                &g,
                rooted_offset,
            );
            !(ok_m && ok_m1 && ok_r)
        })
        .collect();
    outcome(disagreements.is_empty(), format!("500 graphs, disagreements at seeds {disagreements:?}"))
}

/// One representative per isomorphism class of connected graphs on `n`
/// vertices with maximum degree at most `delta`.
fn connected_classes(n: usize, delta: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut seen = std::collections::BTreeMap::new();
    for mask in 0u32..1 << pairs.len() {
        let e: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
        let g = Graph::new(n, &e).unwrap();
        if g.max_degree() > delta || !connected(&g) {
            continue;
        }
        let code = (0..n).map(|r| canonical_rooted_form(&g, r).unwrap()).min().unwrap();
        seen.entry(code).or_insert(g);
    }
    seen.into_values().collect()
}

fn subsets_up_to(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n).map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect::<Vec<_>>()).filter(|s| s.len() <= k).collect()
}

fn criterion_2() -> Outcome {
    let mut checked = 0usize;
    let mut violations = Vec::new();
    for delta in [3usize, 4] {
        let classes: Vec<Graph> = (1..=6).flat_map(|n| connected_classes(n, delta)).collect();
        let results: Vec<(usize, Vec<String>)> = classes
            .par_iter()
            .map(|f| {
                let mut bad = Vec::new();
                let gammas = subsets_up_to(f.n(), delta);
                for gamma in &gammas {
                    let g = VertexSubset::new(f.n(), gamma.iter().copied()).unwrap();
                    let plus = build_f_gamma_plus(f, &g).unwrap();
                    match m1_density_with(&plus, Backend::Exhaustive) {
                        Ok(v) if v.value <= half_below(delta) => {}
                        Ok(v) => bad.push(format!("Δ={delta} F={:?} Γ={gamma:?} m1={}", f.edges().collect::<Vec<_>>(), v.value)),
                        Err(_) if plus.edge_count() == 0 => {}
                        Err(e) => bad.push(format!("Δ={delta} Γ={gamma:?}: {e}")),
                    }
                }
                (gammas.len(), bad)
            })
            .collect();
        for (c, b) in results {
            checked += c;
            violations.extend(b);
        }
    }
    outcome(violations.is_empty(), format!("{checked} (F, Γ) pairs, violations {:?}", &violations[..violations.len().min(3)]))
}

fn criterion_3() -> Outcome {
    let mut violations = Vec::new();
    let mut sampled = 0;
    let mut seed = 0u64;
    while sampled < 200 {
        seed += 1;
        let mut rng = RandomSource::new(seed, 3).rng();
        let delta = rng.random_range(3..=4);
        let n = rng.random_range(1..=6);
        let f = random_graph(n, rng.random_range(0.2..0.9), &mut rng);
        if f.max_degree() > delta {
            continue;
        }
        let size = rng.random_range(1..=delta.min(n));
        let mut verts: Vec<usize> = (0..n).collect();
        verts.shuffle(&mut rng);
        let gamma = VertexSubset::new(n, verts.into_iter().take(size)).unwrap();
        let Ok(layout) = GadgetSpec::new(f, gamma, 10, delta) else {
            continue;
        };
        sampled += 1;
        let (h, (w, w2)) = build_f_gamma_path(&layout);
        let x = VertexSubset::new(h.n(), [w, w2]).unwrap();
        match rooted_density_with(&h, &x, Backend::Flow) {
            Ok(v) if v.value <= half_below(delta) => {}
            Ok(v) => violations.push(format!("seed {seed}: {}", v.value)),
            Err(e) => violations.push(format!("seed {seed}: {e}")),
        }
    }
    let k3 = Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
    let layout = GadgetSpec::new(k3, VertexSubset::full(3), 10, 3).unwrap();
    let (h, _) = build_f_gamma_path(&layout);
    let (e, v) = (h.edge_count(), h.n());
    let count_ok = e == 45 && v == 21 && 2 * e <= (v - 6) * (3 + 3);
    outcome(
        violations.is_empty() && count_ok,
        format!("200 gadgets, violations {violations:?}; K3 gadget e = {e}, v = {v}, bound {}", (v - 6) * 6 / 2),
    )
}

fn criterion_4() -> Outcome {
    let results: Vec<Result<u64, String>> = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let m = 2 + (i % 3) as usize;
            let z = 4 + ((i / 3) % 3) as usize;
            let base = (0..1000u64)
                .map(|a| make_base_template(m, z, RandomSource::new(i, 4).child(a)).unwrap())
                .find(|b| verify_y_robust(b, RobustMode::Exhaustive).unwrap().is_robust())
                .ok_or(format!("template {i}: no robust base (m = {m}, z = {z})"))?;
            let split = split_high_degree(&base);
            let mut outputs = vec![("split", split.clone())];
            for l in [3, 11] {
                outputs.push((if l == 3 { "L=3" } else { "L=11" }, subdivide(&split, l).map_err(|e| e.to_string())?));
            }
            let mut checked = 0;
            for (name, t) in outputs {
                match verify_y_robust(&t, RobustMode::Exhaustive).map_err(|e| e.to_string())? {
                    RobustVerdict::Robust { checked: c } => checked += c,
                    v => return Err(format!("template {i} ({name}) lost robustness: {v:?}")),
                }
            }
            Ok(checked)
        })
        .collect();
    let checked: u64 = results.iter().filter_map(|r| r.as_ref().ok()).sum();
    let errors: Vec<String> = results.into_iter().filter_map(Result::err).collect();
    outcome(errors.is_empty(), format!("100 templates x 3 outputs, {checked} Y-subsets checked, errors {errors:?}"))
}

fn criterion_5() -> Outcome {
    let n = 240;
    type Family = (&'static str, fn(usize, &mut rand_chacha::ChaCha8Rng) -> Graph, usize, usize);
    let families: [Family; 5] = [
        ("forest", |n, r| random_forest(n, 3, r), 1, 3),
        ("cycles", |n, r| cycle_union(n, 5, 12, r).unwrap(), 2, 2),
        ("k4-factor", |n, r| relabel(&clique_factor(n, 3), r), 3, 3),
        ("3-regular", |n, r| random_regular(n, 3, r).unwrap(), 3, 3),
        ("path-square", |n, r| relabel(&power_path(n, 2), r), 2, 4),
    ];
    let mut errors = Vec::new();
    for (name, gen, d, delta) in families {
        let bad: Vec<String> = (0..200u64)
            .into_par_iter()
            .filter_map(|seed| {
                let mut rng = RandomSource::new(seed, 5).rng();
                let h = gen(n, &mut rng);
                let degenerate = decompose_degenerate(&h, d, delta, 20 * d * d).map_err(|e| e.to_string()).and_then(|dec| {
                    let r = verify_decomposition(&h, &dec, DecomposeMode::Degenerate { d });
                    r.all_pass().then_some(()).ok_or(format!("{r:?}"))
                });
                let bounded = decompose_bounded(&h, delta.max(3), 4 * delta.max(3) + 5).map_err(|e| e.to_string()).and_then(|dec| {
                    let r = verify_decomposition(&h, &dec, DecomposeMode::Bounded { delta: delta.max(3) });
                    r.all_pass().then_some(()).ok_or(format!("{r:?}"))
                });
                match (degenerate, bounded) {
                    (Ok(()), Ok(())) => None,
                    (a, b) => Some(format!("{name} seed {seed}: {a:?} {b:?}")),
                }
            })
            .collect();
        errors.extend(bad);
    }
    outcome(errors.is_empty(), format!("5 families x 200 seeds x 2 modes, errors {:?}", &errors[..errors.len().min(2)]))
}

fn pipeline_config(n: usize, mode: Route, d: usize, delta: usize, target: TargetSpec, p_grid: Vec<f64>, trials: usize) -> ExperimentConfig {
    ExperimentConfig {
        n,
        mode,
        d,
        delta,
        p_grid,
        trials,
        seed: 2024,
        target,
        coverage: 0.9,
        timing: false,
        embed: EmbedConfig::default(),
    }
}

fn bounded_config() -> ExperimentConfig {
    pipeline_config(600, Route::Bounded, 1, 3, TargetSpec::CliqueCycles { share: 0.75 }, vec![0.6], 20)
}

fn degenerate_config() -> ExperimentConfig {
    pipeline_config(400, Route::Degenerate, 2, 4, TargetSpec::PowerPath { d: 2 }, vec![0.65], 20)
}

fn sweep_config() -> ExperimentConfig {
    let grid = vec![0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
    pipeline_config(400, Route::Bounded, 1, 3, TargetSpec::CliqueCycles { share: 0.75 }, grid, 30)
}

/// Reruns every trial of a single-point config and checks each success
/// against the host independently; failures must carry a phase.
fn end_to_end(cfg: &ExperimentConfig, need: usize) -> Outcome {
    let p = cfg.p_grid[0];
    let results: Vec<Result<bool, String>> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|stream| {
            let src = trial_source(cfg, p, stream);
            let target = generate_target(cfg, src.child(0)).map_err(|e| e.to_string())?;
            let exposures = sample_exposures(cfg.n, p, cfg.rounds(), src.child(1)).map_err(|e| e.to_string())?;
            match run_pipeline(cfg, &exposures, &target, src.child(2)) {
                Ok(out) => {
                    let host = exposures[1..].iter().fold(exposures[0].clone(), |a, g| a.union(g));
                    let padded = target.with_isolated(cfg.n - target.n());
                    let verdict = verify_embedding(&host, &padded, &out.phi, &Scope::Full);
                    verdict.is_pass().then_some(true).ok_or(format!("stream {stream}: {verdict:?}"))
                }
                Err(_) => Ok(false),
            }
        })
        .collect();
    let errors: Vec<&String> = results.iter().filter_map(|r| r.as_ref().err()).collect();
    let successes = results.iter().filter(|r| matches!(r, Ok(true))).count();
    let rows = sweep(cfg).unwrap();
    let unattributed = rows[0].trials - rows[0].successes
        - rows[0].fail_decompose
        - rows[0].fail_absorber
        - rows[0].fail_phase2
        - rows[0].fail_matching;
    outcome(
        successes >= need && errors.is_empty() && rows[0].successes == successes && unattributed == 0,
        format!("{successes}/{} successes (need {need}), verification errors {errors:?}", cfg.trials),
    )
}

fn criterion_8() -> Outcome {
    let rows = sweep(&sweep_config()).unwrap();
    let rates: Vec<f64> = rows.iter().map(|r| r.rate()).collect();
    let sigma = |r: f64, t: usize| (r * (1.0 - r) / t as f64).sqrt();
    let rise = rates[rates.len() - 1] - rates[0];
    let drops: Vec<(f64, f64)> = rows
        .windows(2)
        .filter_map(|w| {
            let drop = w[0].rate() - w[1].rate();
            let band = 2.0 * (sigma(w[0].rate(), w[0].trials).powi(2) + sigma(w[1].rate(), w[1].trials).powi(2)).sqrt();
            (drop > band).then_some((w[1].p, drop))
        })
        .collect();
    let curve: Vec<String> = rows.iter().map(|r| format!("{}:{}/{}", r.p, r.successes, r.trials)).collect();
    outcome(rise >= 0.5 && drops.is_empty(), format!("rise {rise:.2}, drops beyond 2σ {drops:?}, curve [{}]", curve.join(" ")))
}

fn criterion_9() -> Outcome {
    let mut same = Vec::new();
    for cfg in [bounded_config(), degenerate_config(), sweep_config()] {
        let a = csv_string(&sweep(&cfg).unwrap()).unwrap();
        let b = csv_string(&sweep(&cfg).unwrap()).unwrap();
        same.push(a == b);
    }
    outcome(same.iter().all(|&s| s), format!("identical CSV for bounded, degenerate, sweep: {same:?}"))
}

fn main() {
    // Sanity: the host sampler is usable at all before anything expensive.
    assert_eq!(sample_gnp(4, 1.0, RandomSource::new(0, 0)).unwrap().edge_count(), 6);

    type Criterion = (u32, &'static str, Option<Duration>, fn() -> Outcome);
    let minute = |m: u64| Some(Duration::from_secs(60 * m));
    let criteria: [Criterion; 9] = [
        (1, "density oracle equivalence", minute(1), criterion_1),
        (2, "m1 of F_Γ⁺ at most Δ - 1/2", minute(10), criterion_2),
        (3, "rooted density of F_Γ paths", minute(5), criterion_3),
        (4, "robustness under split and subdivide", minute(5), criterion_4),
        (5, "decomposition validity", minute(2), criterion_5),
        (6, "bounded pipeline n = 600, p = 0.6", minute(10), || end_to_end(&bounded_config(), 18)),
        (7, "degenerate pipeline n = 400, p = 0.65", minute(10), || end_to_end(&degenerate_config(), 16)),
        (8, "success curve sanity", minute(20), criterion_8),
        (9, "byte-identical CSV on rerun", None, criterion_9),
    ];
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let pass = out.pass && limit.is_none_or(|l| took <= l);
        failed += usize::from(!pass);
        eprintln!(
            "criterion {id} {}: {name} ({:.1}s, limit {}) {}",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            limit.map_or("none".to_string(), |l| format!("{}s", l.as_secs())),
            out.detail
        );
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
