use super::multi_index::{factorial, MultiIndex};
use num_bigint::BigInt;
use std::collections::BTreeMap;

/// Multiset of nonzero multi-indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VectorPartition {
    pub multiplicity: BTreeMap<MultiIndex, u32>,
}

impl VectorPartition {
    /// |π|, the number of parts counted with multiplicity.
    pub fn cardinality(&self) -> u32 {
        self.multiplicity.values().sum()
    }

    /// Σ multiplicity(β)·β
    pub fn total(&self, len: usize) -> MultiIndex {
        let mut acc = MultiIndex::zeros(len);
        for (b, &m) in &self.multiplicity {
            for _ in 0..m {
                acc = acc.add(b);
            }
        }
        acc
    }

    /// Π multiplicity(β)!
    pub fn multiplicity_factorial(&self) -> BigInt {
        self.multiplicity.values().map(|&m| factorial(m)).product()
    }
}

/// All partitions of `alpha` into exactly `k` nonzero parts.
pub fn enumerate_vector_partitions(alpha: &MultiIndex, k: u32) -> Vec<VectorPartition> {
    let d = alpha.len();
    // all nonzero β ≤ α, descending
    let mut cands = Vec::new();
    let mut cur = vec![0u32; d];
    fn boxes(alpha: &MultiIndex, i: usize, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if i == cur.len() {
            let m = MultiIndex(cur.clone());
            if !m.is_zero() {
                out.push(m);
            }
            return;
        }
        for e in 0..=alpha.0[i] {
            cur[i] = e;
            boxes(alpha, i + 1, cur, out);
        }
    }
    boxes(alpha, 0, &mut cur, &mut cands);
    cands.sort();
    cands.reverse();

    let mut out = Vec::new();
    let mut parts: Vec<usize> = Vec::new();
    fn rec(
        rem: &MultiIndex,
        k_left: u32,
        start: usize,
        cands: &[MultiIndex],
        parts: &mut Vec<usize>,
        out: &mut Vec<VectorPartition>,
    ) {
        if k_left == 0 {
            if rem.is_zero() {
                let mut mult = BTreeMap::new();
                for &p in parts.iter() {
                    *mult.entry(cands[p].clone()).or_insert(0) += 1;
                }
                out.push(VectorPartition { multiplicity: mult });
            }
            return;
        }
        if rem.order() < k_left {
            return;
        }
        for j in start..cands.len() {
            if let Some(next) = rem.checked_sub(&cands[j]) {
                parts.push(j);
                rec(&next, k_left - 1, j, cands, parts, out);
                parts.pop();
            }
        }
    }
    if k == 0 || alpha.is_zero() {
        return out;
    }
    rec(alpha, k, 0, &cands, &mut parts, &mut out);
    out
}
