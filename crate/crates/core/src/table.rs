//! Boolean tables over the configuration space of an ordered variable set.
//!
//! A [`BoolTable`] stores one Boolean value per configuration of its
//! variables. Entries are laid out in row-major order over the ascending
//! variable indices, with the last variable varying fastest. Tables are the
//! message and marginal payloads of the sum-product engine; every semiring
//! operation performed on them is tallied in an [`OpCount`].

use serde::Serialize;

/// 1-based index of a source message variable.
pub type VarIndex = u32;

/// A symbol of the alphabet, encoded as `0..q-1`.
pub type Symbol = u32;

/// Tally of Boolean semiring operations.
///
/// `and_ops` counts pairwise table products, `or_ops` counts binary ORs
/// spent in marginalization, and `cmp_ops` counts the comparisons of
/// support-extraction scans. Support scans and ORs are the same machine
/// operation with different outputs, so reports may fold `cmp_ops` into
/// `or_ops` for headline totals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OpCount {
    pub and_ops: u64,
    pub or_ops: u64,
    pub cmp_ops: u64,
}

impl OpCount {
    pub fn total(&self) -> u64 {
        self.and_ops + self.or_ops + self.cmp_ops
    }

    pub fn add(&mut self, other: OpCount) {
        self.and_ops += other.and_ops;
        self.or_ops += other.or_ops;
        self.cmp_ops += other.cmp_ops;
    }
}

/// Boolean-valued table over the configuration space of `vars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoolTable {
    /// Ordered (ascending) variable indices the table ranges over.
    vars: Vec<VarIndex>,
    /// Alphabet size each variable ranges over.
    q: u32,
    /// `q^|vars|` entries, row-major, last variable fastest.
    bits: Vec<bool>,
    /// True iff every entry is 1.
    trivial: bool,
}

/// Number of configurations of `n` q-ary variables.
pub fn config_count(q: u32, n: usize) -> usize {
    (q as usize).pow(n as u32)
}

impl BoolTable {
    /// All-ones table; the multiplicative identity for products.
    pub fn all_ones(q: u32, vars: &[VarIndex]) -> Self {
        debug_assert!(is_sorted_distinct(vars));
        let len = config_count(q, vars.len());
        BoolTable {
            vars: vars.to_vec(),
            q,
            bits: vec![true; len],
            trivial: true,
        }
    }

    /// Build a table by evaluating `f` on every configuration in row-major order.
    pub fn from_fn(q: u32, vars: &[VarIndex], mut f: impl FnMut(&[Symbol]) -> bool) -> Self {
        debug_assert!(is_sorted_distinct(vars));
        let len = config_count(q, vars.len());
        let mut bits = Vec::with_capacity(len);
        let mut tuple = vec![0; vars.len()];
        for idx in 0..len {
            decode_index(q, idx, &mut tuple);
            bits.push(f(&tuple));
        }
        Self::from_bits(q, vars.to_vec(), bits)
    }

    pub fn from_bits(q: u32, vars: Vec<VarIndex>, bits: Vec<bool>) -> Self {
        debug_assert!(is_sorted_distinct(&vars));
        assert_eq!(bits.len(), config_count(q, vars.len()), "table length must be q^|vars|");
        let trivial = bits.iter().all(|&b| b);
        BoolTable { vars, q, bits, trivial }
    }

    pub fn vars(&self) -> &[VarIndex] {
        &self.vars
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// True iff the table is identically 1.
    pub fn is_trivial(&self) -> bool {
        self.trivial
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, tuple: &[Symbol]) -> bool {
        self.bits[encode_index(self.q, tuple)]
    }

    /// Reindex onto a superset of variables. Pure index arithmetic, no
    /// semiring operations are charged.
    pub fn extend(&self, to_vars: &[VarIndex]) -> BoolTable {
        debug_assert!(is_sorted_distinct(to_vars));
        if self.vars == to_vars {
            return self.clone();
        }
        debug_assert!(self.vars.iter().all(|v| to_vars.contains(v)));
        let positions: Vec<usize> = self
            .vars
            .iter()
            .map(|v| to_vars.iter().position(|t| t == v).unwrap())
            .collect();
        let len = config_count(self.q, to_vars.len());
        let mut bits = Vec::with_capacity(len);
        let mut tuple = vec![0; to_vars.len()];
        let mut restricted = vec![0; self.vars.len()];
        for idx in 0..len {
            decode_index(self.q, idx, &mut tuple);
            for (i, &p) in positions.iter().enumerate() {
                restricted[i] = tuple[p];
            }
            bits.push(self.bits[encode_index(self.q, &restricted)]);
        }
        BoolTable {
            vars: to_vars.to_vec(),
            q: self.q,
            bits,
            trivial: self.trivial,
        }
    }

    /// Pointwise AND with `other`, which must range over the same variables.
    /// Charges one AND per entry.
    pub fn and_with(&mut self, other: &BoolTable, ops: &mut OpCount) {
        assert_eq!(self.vars, other.vars, "product operands must share a domain");
        ops.and_ops += self.bits.len() as u64;
        for (a, b) in self.bits.iter_mut().zip(other.bits.iter()) {
            *a = *a && *b;
        }
        self.trivial = self.bits.iter().all(|&b| b);
    }

    /// OR-marginalize onto `target` ⊆ `vars`. Charges `(#configs summed − 1)`
    /// ORs per output entry unless the table is trivial or no variable is
    /// dropped.
    pub fn marginalize_onto(&self, target: &[VarIndex], ops: &mut OpCount) -> BoolTable {
        debug_assert!(is_sorted_distinct(target));
        debug_assert!(target.iter().all(|v| self.vars.contains(v)));
        if target == self.vars {
            return self.clone();
        }
        if self.trivial {
            return BoolTable::all_ones(self.q, target);
        }
        let dropped = self.vars.len() - target.len();
        let out_len = config_count(self.q, target.len());
        let summed = config_count(self.q, dropped);
        ops.or_ops += (out_len * (summed - 1)) as u64;

        let positions: Vec<usize> = target
            .iter()
            .map(|v| self.vars.iter().position(|t| t == v).unwrap())
            .collect();
        let mut out = vec![false; out_len];
        let mut tuple = vec![0; self.vars.len()];
        let mut projected = vec![0; target.len()];
        for idx in 0..self.bits.len() {
            if self.bits[idx] {
                decode_index(self.q, idx, &mut tuple);
                for (i, &p) in positions.iter().enumerate() {
                    projected[i] = tuple[p];
                }
                out[encode_index(self.q, &projected)] = true;
            }
        }
        BoolTable::from_bits(self.q, target.to_vec(), out)
    }

    /// All configurations mapped to 1, in row-major order.
    /// Charges `len − 1` comparisons: a full scan, no early exit.
    pub fn support(&self, ops: &mut OpCount) -> Vec<Vec<Symbol>> {
        if !self.bits.is_empty() {
            ops.cmp_ops += (self.bits.len() - 1) as u64;
        }
        let mut hits = Vec::new();
        for (idx, &b) in self.bits.iter().enumerate() {
            if b {
                let mut tuple = vec![0; self.vars.len()];
                decode_index(self.q, idx, &mut tuple);
                hits.push(tuple);
            }
        }
        hits
    }

    /// Support projected onto `restrict` ⊆ `vars`, deduplicated, order of
    /// first appearance. Same comparison cost as [`support`](Self::support):
    /// the scan is independent of the restriction.
    pub fn support_restricted(
        &self,
        restrict: &[VarIndex],
        ops: &mut OpCount,
    ) -> Vec<Vec<Symbol>> {
        debug_assert!(restrict.iter().all(|v| self.vars.contains(v)));
        let positions: Vec<usize> = restrict
            .iter()
            .map(|v| self.vars.iter().position(|t| t == v).unwrap())
            .collect();
        let full = self.support(ops);
        let mut seen = Vec::new();
        for tuple in full {
            let proj: Vec<Symbol> = positions.iter().map(|&p| tuple[p]).collect();
            if !seen.contains(&proj) {
                seen.push(proj);
            }
        }
        seen
    }

    /// First configuration mapped to 1 in row-major order, scanning with
    /// early exit. Charges one comparison per entry ORed in before the hit,
    /// i.e. the 0-based index of the hit (full `len − 1` when absent).
    pub fn first_support(&self, ops: &mut OpCount) -> Option<Vec<Symbol>> {
        for (idx, &b) in self.bits.iter().enumerate() {
            if b {
                ops.cmp_ops += idx as u64;
                let mut tuple = vec![0; self.vars.len()];
                decode_index(self.q, idx, &mut tuple);
                return Some(tuple);
            }
        }
        if !self.bits.is_empty() {
            ops.cmp_ops += (self.bits.len() - 1) as u64;
        }
        None
    }
}

/// Product of `tables` extended to a common `domain`, skipping trivial
/// operands. Charges `q^|domain|` ANDs per pairwise product of non-trivial
/// tables; the empty product is the all-ones table.
pub fn product_at<'a>(
    q: u32,
    domain: &[VarIndex],
    tables: impl IntoIterator<Item = &'a BoolTable>,
    ops: &mut OpCount,
) -> BoolTable {
    let mut acc: Option<BoolTable> = None;
    for t in tables {
        if t.is_trivial() {
            continue;
        }
        let extended = t.extend(domain);
        match acc.as_mut() {
            None => acc = Some(extended),
            Some(a) => a.and_with(&extended, ops),
        }
    }
    acc.unwrap_or_else(|| BoolTable::all_ones(q, domain))
}

pub fn encode_index(q: u32, tuple: &[Symbol]) -> usize {
    let mut idx = 0usize;
    for &s in tuple {
        debug_assert!(s < q);
        idx = idx * q as usize + s as usize;
    }
    idx
}

pub fn decode_index(q: u32, mut idx: usize, tuple: &mut [Symbol]) {
    for slot in tuple.iter_mut().rev() {
        *slot = (idx % q as usize) as Symbol;
        idx /= q as usize;
    }
}

fn is_sorted_distinct(vars: &[VarIndex]) -> bool {
    vars.windows(2).all(|w| w[0] < w[1])
}

/// Sorted union of two ascending variable lists.
pub fn union_vars(a: &[VarIndex], b: &[VarIndex]) -> Vec<VarIndex> {
    let mut out = a.to_vec();
    for &v in b {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out.sort_unstable();
    out
}

/// Sorted intersection of two ascending variable lists.
pub fn intersect_vars(a: &[VarIndex], b: &[VarIndex]) -> Vec<VarIndex> {
    a.iter().copied().filter(|v| b.contains(v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_last_index_fastest() {
        // vars (1,2), q=3: index of (a,b) is 3a+b.
        let t = BoolTable::from_fn(3, &[1, 2], |s| s[0] == 1 && s[1] == 2);
        assert_eq!(t.bits().iter().position(|&b| b), Some(3 + 2));
        assert_eq!(encode_index(3, &[1, 2]), 5);
        let mut tuple = [0, 0];
        decode_index(3, 5, &mut tuple);
        assert_eq!(tuple, [1, 2]);
    }

    #[test]
    fn trivial_flag_tracks_contents() {
        let t = BoolTable::all_ones(2, &[1]);
        assert!(t.is_trivial());
        let t = BoolTable::from_bits(2, vec![1], vec![true, false]);
        assert!(!t.is_trivial());
        let t = BoolTable::from_bits(2, vec![1], vec![true, true]);
        assert!(t.is_trivial());
    }

    #[test]
    fn extend_is_free_and_consistent() {
        let mut ops = OpCount::default();
        let t = BoolTable::from_fn(2, &[2], |s| s[0] == 1);
        let e = t.extend(&[1, 2, 3]);
        assert_eq!(ops, OpCount::default());
        for idx in 0..e.len() {
            let mut tuple = [0, 0, 0];
            decode_index(2, idx, &mut tuple);
            assert_eq!(e.bits()[idx], tuple[1] == 1);
        }
        let _ = ops;
    }

    #[test]
    fn marginalize_counts_and_values() {
        // δ(x1+x2 = 1) over GF(2), marginalized onto {1}: all-ones, 2 ORs.
        let t = BoolTable::from_fn(2, &[1, 2], |s| (s[0] + s[1]) % 2 == 1);
        let mut ops = OpCount::default();
        let m = t.marginalize_onto(&[1], &mut ops);
        assert_eq!(ops.or_ops, 2);
        assert!(m.is_trivial());
    }

    #[test]
    fn marginalize_trivial_is_free() {
        let t = BoolTable::all_ones(3, &[1, 2]);
        let mut ops = OpCount::default();
        let m = t.marginalize_onto(&[2], &mut ops);
        assert_eq!(ops.or_ops, 0);
        assert!(m.is_trivial());
    }

    #[test]
    fn product_skips_trivial_operands() {
        let mut ops = OpCount::default();
        let a = BoolTable::all_ones(2, &[1]);
        let b = BoolTable::from_fn(2, &[1, 2], |s| s[0] == s[1]);
        let p = product_at(2, &[1, 2], [&a, &b], &mut ops);
        assert_eq!(ops.and_ops, 0);
        assert_eq!(p, b);
        let c = BoolTable::from_fn(2, &[2], |s| s[0] == 0);
        let p2 = product_at(2, &[1, 2], [&b, &c], &mut ops);
        assert_eq!(ops.and_ops, 4);
        assert_eq!(p2.support(&mut OpCount::default()), vec![vec![0, 0]]);
    }

    #[test]
    fn support_scan_costs_len_minus_one() {
        let t = BoolTable::from_fn(2, &[1, 2], |s| s[0] == s[1]);
        let mut ops = OpCount::default();
        let s = t.support(&mut ops);
        assert_eq!(s, vec![vec![0, 0], vec![1, 1]]);
        assert_eq!(ops.cmp_ops, 3);
    }

    #[test]
    fn restricted_support_dedups_and_projects() {
        let t = BoolTable::from_fn(2, &[1, 2], |s| s[0] == s[1]);
        let mut ops = OpCount::default();
        let s = t.support_restricted(&[1], &mut ops);
        assert_eq!(s, vec![vec![0], vec![1]]);
        assert_eq!(ops.cmp_ops, 3);
    }

    #[test]
    fn first_support_early_exit_cost() {
        let t = BoolTable::from_bits(2, vec![1, 2], vec![false, false, true, true]);
        let mut ops = OpCount::default();
        assert_eq!(t.first_support(&mut ops), Some(vec![1, 0]));
        assert_eq!(ops.cmp_ops, 2);
    }
}
