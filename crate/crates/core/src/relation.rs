//! Binary relations as bit matrices.
//!
//! Row `a` holds the successors of `a`, packed into `u64` words with column
//! `b` at bit `b % 64` of word `b / 64`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryRelation {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BinaryRelation {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        BinaryRelation {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    /// The identity relation Δ.
    pub fn diagonal(n: usize) -> Self {
        let mut r = Self::empty(n);
        for a in 0..n {
            r.insert(a, a);
        }
        r
    }

    pub fn full(n: usize) -> Self {
        let mut r = Self::empty(n);
        for a in 0..n {
            for b in 0..n {
                r.insert(a, b);
            }
        }
        r
    }

    pub fn from_pairs<I>(n: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut r = Self::empty(n);
        for (a, b) in pairs {
            for e in [a, b] {
                if e >= n {
                    return Err(Error::ElementOutOfRange {
                        element: e,
                        size: n,
                    });
                }
            }
            r.insert(a, b);
        }
        Ok(r)
    }

    pub fn carrier_size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.bits[a * self.words + b / 64] >> (b % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, a: usize, b: usize) {
        self.bits[a * self.words + b / 64] |= 1 << (b % 64);
    }

    pub fn remove(&mut self, a: usize, b: usize) {
        self.bits[a * self.words + b / 64] &= !(1 << (b % 64));
    }

    #[inline]
    pub fn row(&self, a: usize) -> &[u64] {
        &self.bits[a * self.words..(a + 1) * self.words]
    }

    /// Successors of `a` in increasing order.
    pub fn successors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(a).iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let bit = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + bit)
            })
        })
    }

    /// Pairs in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |a| self.successors(a).map(move |b| (a, b)))
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    fn same_carrier(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::CarrierMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.same_carrier(other)?;
        let mut out = self.clone();
        out.union_with(other);
        Ok(out)
    }

    /// In-place union; returns whether anything was added.
    pub(crate) fn union_with(&mut self, other: &Self) -> bool {
        let mut changed = false;
        for (x, &y) in self.bits.iter_mut().zip(&other.bits) {
            let before = *x;
            *x |= y;
            changed |= *x != before;
        }
        changed
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.same_carrier(other)?;
        let mut out = self.clone();
        for (x, &y) in out.bits.iter_mut().zip(&other.bits) {
            *x &= y;
        }
        Ok(out)
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.n == other.n
            && self
                .bits
                .iter()
                .zip(&other.bits)
                .all(|(&x, &y)| x & !y == 0)
    }

    /// First pair of `self` missing from `other`, row-major.
    pub fn first_missing_from(&self, other: &Self) -> Option<(usize, usize)> {
        self.pairs().find(|&(a, b)| !other.contains(a, b))
    }

    /// `R ∘ S = {(a,c) | ∃b: aRb ∧ bSc}`: OR of the rows of `S` selected by each row of `R`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_carrier(other)?;
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &Self) -> Self {
        let mut out = Self::empty(self.n);
        let w = self.words;
        for a in 0..self.n {
            let (lo, hi) = (a * w, (a + 1) * w);
            for b in self.successors(a) {
                let src = other.row(b);
                for (dst, &s) in out.bits[lo..hi].iter_mut().zip(src) {
                    *dst |= s;
                }
            }
        }
        out
    }

    /// `R ∘ S ∘ R ∘ ..` with `n` factors.
    pub fn compose_n(&self, other: &Self, n: usize) -> Result<Self> {
        self.same_carrier(other)?;
        if n == 0 {
            return Err(Error::InvalidArgument(
                "alternating composition needs at least one factor".into(),
            ));
        }
        let mut acc = self.clone();
        for k in 1..n {
            acc = acc.compose_unchecked(if k % 2 == 1 { other } else { self });
        }
        Ok(acc)
    }

    /// `R^0 = Δ`, `R^n = R ∘ .. ∘ R`.
    pub fn power(&self, n: usize) -> Self {
        let mut acc = Self::diagonal(self.n);
        for _ in 0..n {
            acc = acc.compose_unchecked(self);
        }
        acc
    }

    pub fn converse(&self) -> Self {
        let mut out = Self::empty(self.n);
        for (a, b) in self.pairs() {
            out.insert(b, a);
        }
        out
    }

    /// Least transitive superset (Warshall over bit rows).
    pub fn transitive_closure(&self) -> Self {
        let mut out = self.clone();
        let w = self.words;
        for k in 0..self.n {
            let pivot: Vec<u64> = out.row(k).to_vec();
            for i in 0..self.n {
                if out.contains(i, k) {
                    for (dst, &s) in out.bits[i * w..(i + 1) * w].iter_mut().zip(&pivot) {
                        *dst |= s;
                    }
                }
            }
        }
        out
    }

    /// `Δ ∪ R*`.
    pub fn reflexive_transitive_closure(&self) -> Self {
        let mut out = self.transitive_closure();
        out.union_with(&Self::diagonal(self.n));
        out
    }

    /// Relational sum `R + S`, the union of `R ∘_n S` over all `n ≥ 1`.
    ///
    /// Alternating words starting with `R` are `R(SR)^j` and `R(SR)^j S`,
    /// so the sum is `R∘T ∪ R∘T∘S` with `T` the reflexive-transitive closure
    /// of `S∘R`.
    pub fn rel_sum(&self, other: &Self) -> Result<Self> {
        self.same_carrier(other)?;
        let t = other.compose_unchecked(self).reflexive_transitive_closure();
        let mut out = self.compose_unchecked(&t);
        let tail = out.compose_unchecked(other);
        out.union_with(&tail);
        Ok(out)
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.n).all(|a| self.contains(a, a))
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs().all(|(a, b)| self.contains(b, a))
    }

    pub fn is_transitive(&self) -> bool {
        self.compose_unchecked(self).is_subset_of(self)
    }

    /// Multi-line 0/1 matrix.
    pub fn to_matrix_string(&self) -> String {
        let mut out = String::new();
        for a in 0..self.n {
            for b in 0..self.n {
                out.push(if self.contains(a, b) { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    pub fn to_pair_vec(&self) -> Vec<[usize; 2]> {
        self.pairs().map(|(a, b)| [a, b]).collect()
    }
}

/// Lexicographic on the row-major bit sequence (absent < present).
impl Ord for BinaryRelation {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| {
            for (&x, &y) in self.bits.iter().zip(&other.bits) {
                if x != y {
                    return x.reverse_bits().cmp(&y.reverse_bits());
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for BinaryRelation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for BinaryRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryRelation(n={}, {})", self.n, self)
    }
}

impl fmt::Display for BinaryRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (a, b)) in self.pairs().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "[{a},{b}]")?;
        }
        f.write_str("]")
    }
}

impl Serialize for BinaryRelation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_pair_vec().serialize(s)
    }
}
