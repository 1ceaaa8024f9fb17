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

//! Expansion diagnostics for families of disjoint `d`-sets. Reporting only.

use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::RandomError;
use crate::graph::{Graph, VertexSubset};

#[derive(Clone, Copy, Debug)]
pub struct ExpansionParams {
    pub d: usize,
    pub p: f64,
    pub lambda: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `|L| <= 1/p^d`: expect `|N| >= |L||U|p^d / 2`.
    Small,
    /// `|L| >= ln n / p^d`: expect `|N| >= (1 - λ)|U|`.
    Large,
    /// Between the two thresholds; no bound applies.
    Intermediate,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyExpansion {
    pub family_size: usize,
    pub neighborhood: usize,
    pub regime: Regime,
    pub small_bound: Option<f64>,
    pub large_bound: Option<f64>,
    pub pass: bool,
    /// Whether some family member lies in `U`.
    pub touches_u: bool,
}

/// `|N(L)|` in the auxiliary bipartite graph `B_G(L, U \ members)` for each
/// family, compared with the bound of its regime.
pub fn check_expansion(
    g: &Graph,
    u: &VertexSubset,
    params: ExpansionParams,
    families: &[Vec<Vec<usize>>],
) -> Result<Vec<FamilyExpansion>, RandomError> {
    let n = g.n();
    let ubits = u.to_bits();
    let pd = params.p.powi(params.d as i32);
    families
        .iter()
        .map(|family| {
            let mut used = FixedBitSet::with_capacity(n);
            let mut hit = FixedBitSet::with_capacity(n);
            let mut touches_u = false;
            for (index, set) in family.iter().enumerate() {
                if set.len() != params.d {
                    return Err(RandomError::SetSize { index, got: set.len(), want: params.d });
                }
                for &v in set {
                    if v >= n {
                        return Err(RandomError::Vertex { v, n });
                    }
                    if used.put(v) {
                        return Err(RandomError::Overlap { v });
                    }
                    touches_u |= ubits.contains(v);
                }
                let mut cn = g.common_neighbors(set);
                cn.intersect_with(&ubits);
                hit.union_with(&cn);
            }
            // Family members are never counted as their own neighbors.
            hit.difference_with(&used);
            let size = family.len() as f64;
            let un = u.len() as f64;
            let small = (size <= 1.0 / pd).then(|| size * un * pd / 2.0);
            let large = (size >= (n as f64).ln() / pd).then_some((1.0 - params.lambda) * un);
            let neighborhood = hit.count_ones(..);
            let regime = match (small, large) {
                (Some(_), _) => Regime::Small,
                (None, Some(_)) => Regime::Large,
                _ => Regime::Intermediate,
            };
            let pass = [small, large].iter().flatten().all(|&b| neighborhood as f64 >= b);
            Ok(FamilyExpansion { family_size: family.len(), neighborhood, regime, small_bound: small, large_bound: large, pass, touches_u })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{sample_gnp, RandomSource};

    fn complete(n: usize) -> Graph {
        let e: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph::new(n, &e).unwrap()
    }

    #[test]
    fn singleton_is_degree() {
        let g = sample_gnp(60, 0.3, RandomSource::new(2, 0)).unwrap();
        let all = VertexSubset::full(60);
        let params = ExpansionParams { d: 1, p: 0.3, lambda: 0.1 };
        let r = check_expansion(&g, &all, params, &[vec![vec![5]]]).unwrap();
        assert_eq!(r[0].neighborhood, g.degree(5));
    }

    #[test]
    fn complete_graph_misses_only_members() {
        let g = complete(12);
        let u = VertexSubset::new(12, [0, 1, 2, 3, 4, 5]).unwrap();
        let fam = vec![vec![0, 7], vec![1, 8]];
        let params = ExpansionParams { d: 2, p: 1.0, lambda: 0.1 };
        let r = check_expansion(&g, &u, params, &[fam]).unwrap();
        assert_eq!(r[0].neighborhood, 4);
        assert!(r[0].touches_u);
    }

    #[test]
    fn sampled_pairs_against_small_bound() {
        let g = sample_gnp(2000, 0.3, RandomSource::new(9, 0)).unwrap();
        let u = VertexSubset::full(2000);
        let fam: Vec<Vec<usize>> = (0..10).map(|i| vec![2 * i, 2 * i + 1]).collect();
        let params = ExpansionParams { d: 2, p: 0.3, lambda: 0.1 };
        let r = check_expansion(&g, &u, params, &[fam]).unwrap();
        assert_eq!(r[0].regime, Regime::Small);
        let bound = 10.0 * 2000.0 * 0.09 / 2.0;
        assert_eq!(r[0].small_bound, Some(bound));
        assert!(r[0].pass, "{} < {bound}", r[0].neighborhood);
    }

    #[test]
    fn rejects_overlap_and_size() {
        let g = complete(5);
        let u = VertexSubset::full(5);
        let params = ExpansionParams { d: 2, p: 0.5, lambda: 0.1 };
        assert!(matches!(
            check_expansion(&g, &u, params, &[vec![vec![0, 1], vec![1, 2]]]),
            Err(RandomError::Overlap { v: 1 })
        ));
        assert!(matches!(
            check_expansion(&g, &u, params, &[vec![vec![0]]]),
            Err(RandomError::SetSize { .. })
        ));
    }
}
