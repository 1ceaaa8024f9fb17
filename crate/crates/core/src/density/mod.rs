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

//! Exact density oracles: `m(H) = max e/v`, `m1(F) = max e/(v-1)` and the
//! rooted `m(F, X)`, each with an exhaustive and a min-cut back end.

mod exhaustive;
mod flow;
pub mod gadget;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::graph::{Graph, GraphError, VertexSubset};

pub use flow::densest_subgraph_flow;
pub use gadget::{
    attach_outside, build_f_gamma_path, build_f_gamma_plus, path_gadget, GadgetSpec, PathGadget,
};

/// Largest vertex count the exhaustive back end accepts.
pub const EXHAUSTIVE_LIMIT: usize = 20;

#[derive(Debug, Error)]
pub enum DensityError {
    #[error("graph has no edges")]
    Edgeless,
    #[error("graph needs at least {need} vertices, has {got}")]
    TooSmall { need: usize, got: usize },
    #[error("no admissible subgraph with positive denominator and at least one edge")]
    NoAdmissible,
    #[error("exhaustive back end limited to {EXHAUSTIVE_LIMIT} vertices, got {n}")]
    TooLarge { n: usize },
    #[error("forced and forbidden sets share vertex {v}")]
    Overlap { v: usize },
    #[error("gadget: {0}")]
    Gadget(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Backend {
    /// Exhaustive up to [`EXHAUSTIVE_LIMIT`] vertices, flow above.
    #[default]
    Auto,
    Exhaustive,
    Flow,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityValue {
    pub value: BigRational,
    pub witness: VertexSubset,
}

impl DensityValue {
    pub(crate) fn from_parts(num: u64, den: u64, universe: usize, witness: Vec<usize>) -> Self {
        DensityValue {
            value: BigRational::new(BigInt::from(num), BigInt::from(den)),
            witness: VertexSubset::new(universe, witness).expect("witness within range"),
        }
    }

    /// `e(witness) / (|witness| - offset)` recomputed from scratch.
    pub fn recompute(&self, g: &Graph, offset: usize) -> BigRational {
        let w = self.witness.as_slice();
        let e = g.induced(w).edge_count();
        BigRational::new(BigInt::from(e), BigInt::from(w.len() - offset))
    }
}

/// Denominator rule shared by the back ends.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Rule {
    /// `v`, over nonempty sets.
    Plain,
    /// `v - 1`, over sets with `v >= 2`.
    MinusOne,
    /// `v - max(1, |V ∩ X|)`, over sets containing all of X or none of it.
    Rooted { x: u32 },
}

/// Exact comparison of `a.0/a.1` with `b.0/b.1`, lexicographically smaller
/// sorted witness winning ties.
pub(crate) fn better(a: (u64, u64, &[usize]), b: (u64, u64, &[usize])) -> bool {
    let lhs = a.0 as u128 * b.1 as u128;
    let rhs = b.0 as u128 * a.1 as u128;
    lhs > rhs || (lhs == rhs && a.2 < b.2)
}

fn pick_backend(n: usize, backend: Backend) -> Result<bool, DensityError> {
    match backend {
        Backend::Auto => Ok(n <= EXHAUSTIVE_LIMIT),
        Backend::Exhaustive if n > EXHAUSTIVE_LIMIT => Err(DensityError::TooLarge { n }),
        Backend::Exhaustive => Ok(true),
        Backend::Flow => Ok(false),
    }
}

pub fn m_density(h: &Graph) -> Result<DensityValue, DensityError> {
    m_density_with(h, Backend::Auto)
}

pub fn m_density_with(h: &Graph, backend: Backend) -> Result<DensityValue, DensityError> {
    if h.edge_count() == 0 {
        return Err(DensityError::Edgeless);
    }
    if pick_backend(h.n(), backend)? {
        exhaustive::maximize(h, Rule::Plain)
    } else {
        densest_subgraph_flow(h, 0, &VertexSubset::empty(h.n()), &VertexSubset::empty(h.n()))
    }
}

pub fn m1_density(f: &Graph) -> Result<DensityValue, DensityError> {
    m1_density_with(f, Backend::Auto)
}

pub fn m1_density_with(f: &Graph, backend: Backend) -> Result<DensityValue, DensityError> {
    if f.n() < 2 {
        return Err(DensityError::TooSmall { need: 2, got: f.n() });
    }
    if f.edge_count() == 0 {
        return Err(DensityError::Edgeless);
    }
    if pick_backend(f.n(), backend)? {
        exhaustive::maximize(f, Rule::MinusOne)
    } else {
        densest_subgraph_flow(f, 1, &VertexSubset::empty(f.n()), &VertexSubset::empty(f.n()))
    }
}

pub fn rooted_density(f: &Graph, x: &VertexSubset) -> Result<DensityValue, DensityError> {
    rooted_density_with(f, x, Backend::Auto)
}

pub fn rooted_density_with(
    f: &Graph,
    x: &VertexSubset,
    backend: Backend,
) -> Result<DensityValue, DensityError> {
    if let Some(v) = x.iter().find(|&v| v >= f.n()) {
        return Err(GraphError::VertexOutOfRange { v, n: f.n() }.into());
    }
    let x = VertexSubset::new(f.n(), x.iter())?;
    if f.edge_count() == 0 {
        return Err(DensityError::Edgeless);
    }
    if pick_backend(f.n(), backend)? {
        let xm = x.iter().fold(0u32, |m, v| m | 1 << v);
        return exhaustive::maximize(f, Rule::Rooted { x: xm });
    }
    let empty = VertexSubset::empty(f.n());
    let containing = if x.is_empty() {
        densest_subgraph_flow(f, 1, &empty, &empty)
    } else {
        densest_subgraph_flow(f, x.len(), &x, &empty)
    };
    let disjoint = densest_subgraph_flow(f, 1, &empty, &x);
    let pick = |r: Result<DensityValue, DensityError>| match r {
        Ok(v) => Ok(Some(v)),
        Err(DensityError::NoAdmissible) => Ok(None),
        Err(e) => Err(e),
    };
    match (pick(containing)?, pick(disjoint)?) {
        (None, None) => Err(DensityError::NoAdmissible),
        (Some(a), None) | (None, Some(a)) => Ok(a),
        (Some(a), Some(b)) => {
            let ord = a.value.cmp(&b.value);
            if ord.is_gt() || (ord.is_eq() && a.witness.as_slice() <= b.witness.as_slice()) {
                Ok(a)
            } else {
                Ok(b)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn k(n: usize) -> Graph {
        let e: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph::new(n, &e).unwrap()
    }

    #[test]
    fn m_examples_both_backends() {
        for b in [Backend::Exhaustive, Backend::Flow] {
            assert_eq!(m_density_with(&k(4), b).unwrap().value, ratio(3, 2));
            assert_eq!(m_density_with(&k(2), b).unwrap().value, ratio(1, 2));
            let tri_pendant = Graph::new(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
            let r = m_density_with(&tri_pendant, b).unwrap();
            assert_eq!(r.value, ratio(1, 1));
            if b == Backend::Exhaustive {
                assert_eq!(r.witness.as_slice(), &[0, 1, 2]);
            }
        }
        assert!(matches!(m_density(&Graph::empty(3)), Err(DensityError::Edgeless)));
    }

    #[test]
    fn m1_examples() {
        for b in [Backend::Exhaustive, Backend::Flow] {
            assert_eq!(m1_density_with(&k(2), b).unwrap().value, ratio(1, 1));
            assert_eq!(m1_density_with(&k(3), b).unwrap().value, ratio(3, 2));
            let plus = build_f_gamma_plus(&k(3), &VertexSubset::full(3)).unwrap();
            let r = m1_density_with(&plus, b).unwrap();
            assert_eq!(r.value, ratio(12, 5));
            assert_eq!(r.witness, VertexSubset::full(6));
        }
        assert!(matches!(m1_density(&Graph::empty(1)), Err(DensityError::TooSmall { .. })));
    }

    #[test]
    fn rooted_examples() {
        let star = Graph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let leaves = VertexSubset::new(4, [1, 2, 3]).unwrap();
        for b in [Backend::Exhaustive, Backend::Flow] {
            let r = rooted_density_with(&star, &leaves, b).unwrap();
            assert_eq!(r.value, ratio(3, 1));
            assert_eq!(r.witness, VertexSubset::full(4));
            let edge = k(2);
            let r = rooted_density_with(&edge, &VertexSubset::new(2, [0]).unwrap(), b).unwrap();
            assert_eq!(r.value, ratio(1, 1));
        }
    }

    #[test]
    fn witnesses_recompute() {
        let g = Graph::new(6, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5), (2, 4)]).unwrap();
        let r = m_density(&g).unwrap();
        assert_eq!(r.recompute(&g, 0), r.value);
        let r = m1_density(&g).unwrap();
        assert_eq!(r.recompute(&g, 1), r.value);
    }

    #[test]
    fn exhaustive_refuses_large() {
        assert!(matches!(
            m_density_with(&k(21), Backend::Exhaustive),
            Err(DensityError::TooLarge { n: 21 })
        ));
        assert_eq!(m_density(&k(21)).unwrap().value, ratio(10, 1));
    }
}
