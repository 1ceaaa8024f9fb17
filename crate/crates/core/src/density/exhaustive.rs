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

//! Gray-code enumeration of all vertex subsets with incremental edge counts.

use super::{DensityError, DensityValue, Rule, EXHAUSTIVE_LIMIT};
use crate::graph::Graph;

/// True when the sorted vertex list of `a` precedes that of `b`.
fn mask_lex_less(a: u32, b: u32) -> bool {
    let diff = a ^ b;
    if diff == 0 {
        return false;
    }
    let low = diff & diff.wrapping_neg();
    let above = !(low | (low - 1));
    if a & low != 0 {
        b & above != 0
    } else {
        a & above == 0
    }
}

fn denominator(rule: Rule, mask: u32, size: u64) -> Option<u64> {
    match rule {
        Rule::Plain => Some(size),
        Rule::MinusOne => size.checked_sub(1),
        Rule::Rooted { x } => {
            let inside = mask & x;
            if inside != 0 && inside != x {
                return None;
            }
            size.checked_sub(u64::from(inside.count_ones().max(1)))
        }
    }
}

pub(super) fn maximize(g: &Graph, rule: Rule) -> Result<DensityValue, DensityError> {
    let n = g.n();
    if n > EXHAUSTIVE_LIMIT {
        return Err(DensityError::TooLarge { n });
    }
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u))
        .collect();
    let mut best: Option<(u64, u64, u32)> = None;
    let mut mask = 0u32;
    let mut edges = 0u64;
    for i in 1u32..(1 << n) {
        let bit = i.trailing_zeros() as usize;
        if mask >> bit & 1 == 1 {
            mask &= !(1 << bit);
            edges -= u64::from((adj[bit] & mask).count_ones());
        } else {
            edges += u64::from((adj[bit] & mask).count_ones());
            mask |= 1 << bit;
        }
        if edges == 0 {
            continue;
        }
        let Some(den) = denominator(rule, mask, u64::from(mask.count_ones())).filter(|&d| d > 0)
        else {
            continue;
        };
        let wins = match best {
            None => true,
            Some((be, bd, bm)) => {
                let lhs = u128::from(edges) * u128::from(bd);
                let rhs = u128::from(be) * u128::from(den);
                lhs > rhs || (lhs == rhs && mask_lex_less(mask, bm))
            }
        };
        if wins {
            best = Some((edges, den, mask));
        }
    }
    let (e, den, m) = best.ok_or(DensityError::NoAdmissible)?;
    let witness = (0..n).filter(|&v| m >> v & 1 == 1).collect();
    Ok(DensityValue::from_parts(e, den, n, witness))
}
