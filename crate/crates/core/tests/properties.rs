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


//! Invariants checked on random inputs.

use proptest::prelude::*;
use proptest::test_runner::FileFailurePersistence;

use spanning_embed::decompose::{check_partition, decompose_bounded, decompose_degenerate, partition_r, verify_decomposition, DecomposeMode};
use spanning_embed::density::{m1_density, m_density, rooted_density};
use spanning_embed::embed::{s_embed, verify_embedding, PartialEmbedding, Reservoir, Scope};
use spanning_embed::graph::{
    bfs_distance, bfs_layer_ordering, degeneracy_ordering_with_anchor, distance_k_independent_set, Graph, VertexSubset,
};
use spanning_embed::harness::{random_forest, sweep, ExperimentConfig, TargetSpec};
use spanning_embed::embed::{EmbedConfig, Route};
use spanning_embed::random::{sample_gnp, split_exposure, RandomSource};
use spanning_embed::robust::{make_base_template, split_high_degree, subdivide, Right};

fn graph_from_bits(n: usize, bits: &[bool]) -> Graph {
    let e: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let e: Vec<_> = e.into_iter().zip(bits).filter(|(_, &b)| b).map(|(e, _)| e).collect();
    Graph::new(n, &e).unwrap()
}

fn small_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |b| graph_from_bits(n, &b)))
}

fn subset_of(n: usize, mask: u64) -> VertexSubset {
    VertexSubset::new(n, (0..n).filter(|&v| mask >> v & 1 == 1)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: Some(Box::new(FileFailurePersistence::WithSource("regressions"))),
        ..ProptestConfig::default()
    })]

    #[test]
    fn distance_independent_sets_are_spread(g in small_graph(12), mask in any::<u64>(), k in 1usize..4) {
        let s = subset_of(g.n(), mask);
        let out = distance_k_independent_set(&g, &s, k);
        let kept = out.as_slice();
        for (i, &u) in kept.iter().enumerate() {
            prop_assert!(s.contains(u));
            for &v in &kept[i + 1..] {
                prop_assert!(bfs_distance(&g, u, v).unwrap().is_none_or(|d| d > k));
            }
        }
        let delta = g.max_degree();
        if delta >= 2 && !s.is_empty() {
            let bound = s.len().div_ceil(delta.pow(k as u32 + 1));
            prop_assert!(kept.len() >= bound);
        }
    }

    #[test]
    fn degeneracy_ordering_replays(g in small_graph(10), mask in any::<u64>(), d in 0usize..4) {
        let s = subset_of(g.n(), mask);
        match degeneracy_ordering_with_anchor(&g, &s, d) {
            Ok(ord) => {
                prop_assert_eq!(ord.order.len(), g.n() - s.len());
                prop_assert!(ord.back_degrees(&g, &s).iter().all(|&b| b <= d));
            }
            Err(inf) => {
                let w = inf.witness.to_bits();
                for v in inf.witness.iter() {
                    let inside = g.neighbors(v).iter().filter(|&&u| w.contains(u) || s.contains(u)).count();
                    prop_assert!(inside > d);
                }
            }
        }
    }

    #[test]
    fn layer_ordering_has_later_neighbors(g in small_graph(10), seeds in any::<u64>()) {
        let s = VertexSubset::empty(g.n());
        let seeds = subset_of(g.n(), seeds | 1);
        if let Ok(ord) = bfs_layer_ordering(&g, &s, &seeds) {
            let pos: std::collections::HashMap<usize, usize> = ord.order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            for (i, &v) in ord.order.iter().enumerate() {
                if !seeds.contains(v) {
                    prop_assert!(g.neighbors(v).iter().any(|u| pos.get(u).is_some_and(|&j| j > i)));
                }
            }
        }
    }

    #[test]
    fn density_witnesses_recompute(g in small_graph(9), mask in any::<u64>()) {
        if let Ok(v) = m_density(&g) {
            prop_assert_eq!(v.recompute(&g, 0), v.value);
        }
        if let Ok(v) = m1_density(&g) {
            prop_assert_eq!(v.recompute(&g, 1), v.value);
        }
        let x = subset_of(g.n(), mask);
        if let Ok(v) = rooted_density(&g, &x) {
            let offset = x.iter().filter(|&u| v.witness.contains(u)).count().max(1);
            prop_assert_eq!(v.recompute(&g, offset), v.value);
        }
    }

    #[test]
    fn exposure_split_round_trips(p in 0.001f64..0.999, r in 1usize..6) {
        let s = split_exposure(p, r).unwrap();
        prop_assert!((1.0 - (1.0 - s.q).powi(r as i32) - p).abs() < 1e-12);
    }

    #[test]
    fn sampling_is_deterministic(n in 1usize..60, p in 0.0f64..1.0, seed in any::<u64>(), stream in any::<u64>()) {
        let a = sample_gnp(n, p, RandomSource::new(seed, stream)).unwrap();
        let b = sample_gnp(n, p, RandomSource::new(seed, stream)).unwrap();
        prop_assert_eq!(a.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());
    }

    #[test]
    fn split_and_subdivide_bookkeeping(m in 1usize..4, z in 3usize..8, seed in any::<u64>(), half in 1usize..6) {
        prop_assume!(z <= 4 * m);
        let base = make_base_template(m, z, RandomSource::new(seed, 0)).unwrap();
        let split = split_high_degree(&base);
        prop_assert!((0..split.z_count()).all(|v| split.degree(v) <= 3));
        prop_assert_eq!(split.z_count() - base.z_count(), split.x_count() - base.x_count());
        prop_assert_eq!(split.y_count(), base.y_count());
        let sub = subdivide(&split, 2 * half + 1).unwrap();
        prop_assert_eq!(sub.z_count() - split.z_count(), sub.x_count() - split.x_count());
        prop_assert_eq!(sub.edge_count(), split.edge_count() * (2 * half + 1));
        // Every Y vertex keeps its degree; new paths only touch X'.
        let y_deg = |t: &spanning_embed::robust::BipartiteTemplate| {
            let mut d = vec![0; t.y_count()];
            for (_, r) in t.edges() {
                if let Right::Y(j) = r {
                    d[j] += 1;
                }
            }
            d
        };
        prop_assert_eq!(y_deg(&sub), y_deg(&split));
    }

    #[test]
    fn decompositions_verify_on_forests(seed in any::<u64>(), n in 20usize..160) {
        let mut rng = RandomSource::new(seed, 0).rng();
        let h = random_forest(n, 3, &mut rng);
        let dec = decompose_degenerate(&h, 1, 3, 20).unwrap();
        let report = verify_decomposition(&h, &dec, DecomposeMode::Degenerate { d: 1 });
        prop_assert!(report.all_pass(), "{:?}", report);
        let dec = decompose_bounded(&h, 3, 17).unwrap();
        let report = verify_decomposition(&h, &dec, DecomposeMode::Bounded { delta: 3 });
        prop_assert!(report.all_pass(), "{:?}", report);
        if let Ok(part) = partition_r(&h, &dec, 0.5, 3) {
            prop_assert_eq!(check_partition(&h, &dec, &part, 3), Ok(()));
        }
    }

    #[test]
    fn s_embedding_avoids_x(seed in any::<u64>()) {
        let host = sample_gnp(200, 0.5, RandomSource::new(seed, 0)).unwrap();
        let mut rng = RandomSource::new(seed, 1).rng();
        let h = random_forest(150, 3, &mut rng);
        let x = VertexSubset::new(200, 0..20).unwrap();
        let w = VertexSubset::new(200, 160..200).unwrap();
        let mut res = Reservoir::new(200, &w);
        let s = VertexSubset::empty(150);
        if let Ok(out) = s_embed(&host, &h, &s, PartialEmbedding::new(150, 200), &x, &mut res, 1, 0.05, RandomSource::new(seed, 2)) {
            prop_assert!(out.phi.pairs().all(|(_, g)| !x.contains(g)));
            prop_assert!(verify_embedding(&host, &h, &out.phi, &Scope::Full).is_pass());
        }
    }
}

#[test]
fn failures_are_accounted_once() {
    let cfg = ExperimentConfig {
        n: 120,
        mode: Route::Bounded,
        d: 1,
        delta: 3,
        p_grid: vec![0.2, 0.5, 0.9],
        trials: 6,
        seed: 11,
        target: TargetSpec::CliqueCycles { share: 0.75 },
        coverage: 0.9,
        timing: false,
        embed: EmbedConfig { retries: 1, ..EmbedConfig::default() },
    };
    for row in sweep(&cfg).unwrap() {
        let failed = row.fail_decompose + row.fail_absorber + row.fail_phase2 + row.fail_matching;
        assert_eq!(row.successes + failed, row.trials, "{row:?}");
    }
}
