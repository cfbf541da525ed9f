//! Bit-packed linear algebra over F₂.
//!
//! Vectors are packed 64 coordinates per word. Matrices are lists of row
//! vectors; elimination works in place on rows.

use std::fmt;

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.flip(i);
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the lowest set coordinate.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * WORD + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * WORD + t)
                }
            })
        })
    }

    /// Concatenation `self ‖ other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        for i in self.ones() {
            out.set(i, true);
        }
        for i in other.ones() {
            out.set(self.len + i, true);
        }
        out
    }

    pub fn slice(&self, start: usize, end: usize) -> BitVec {
        BitVec::from_indices(
            end - start,
            self.ones().filter(|&i| i >= start && i < end).map(|i| i - start),
        )
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Rank of the span of `rows`. The rows are reduced in place.
pub fn rank(rows: &mut [BitVec]) -> usize {
    let mut rank = 0;
    let ncols = rows.first().map_or(0, BitVec::len);
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Incrementally built subspace in reduced echelon form.
#[derive(Clone, Debug)]
pub struct Subspace {
    len: usize,
    // (pivot column, row); each pivot column is zero in every other row
    rows: Vec<(usize, BitVec)>,
}

impl Subspace {
    pub fn new(len: usize) -> Self {
        Subspace { len, rows: Vec::new() }
    }

    pub fn spanned_by<'a>(len: usize, vectors: impl IntoIterator<Item = &'a BitVec>) -> Self {
        let mut s = Self::new(len);
        for v in vectors {
            s.insert(v.clone());
        }
        s
    }

    pub fn ambient_len(&self) -> usize {
        self.len
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> impl Iterator<Item = &BitVec> {
        self.rows.iter().map(|(_, r)| r)
    }

    /// Reduces `v` modulo the subspace.
    pub fn reduce(&self, mut v: BitVec) -> BitVec {
        for (p, row) in &self.rows {
            if v.get(*p) {
                v.xor_assign(row);
            }
        }
        v
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v.clone()).is_zero()
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, v: BitVec) -> bool {
        assert_eq!(v.len(), self.len, "vector length mismatch");
        let v = self.reduce(v);
        let Some(p) = v.first_one() else {
            return false;
        };
        for (_, row) in self.rows.iter_mut() {
            if row.get(p) {
                row.xor_assign(&v);
            }
        }
        self.rows.push((p, v));
        true
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis().all(|v| other.contains(v))
    }

    pub fn same_as(&self, other: &Subspace) -> bool {
        self.dim() == other.dim() && self.is_subspace_of(other)
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut s = self.clone();
        for v in other.basis() {
            s.insert(v.clone());
        }
        s
    }

    pub fn intersection_dim(&self, other: &Subspace) -> usize {
        self.dim() + other.dim() - self.sum(other).dim()
    }
}

/// Kernel of the linear map sending the `j`-th basis vector of an
/// `images.len()`-dimensional space to `images[j]`.
///
/// Returns a basis of the kernel as vectors of length `images.len()`.
pub fn kernel(images: &[BitVec], target_len: usize) -> Vec<BitVec> {
    let n = images.len();
    let mut rows: Vec<BitVec> = images
        .iter()
        .enumerate()
        .map(|(j, img)| {
            debug_assert_eq!(img.len(), target_len);
            img.concat(&BitVec::from_indices(n, [j]))
        })
        .collect();
    let mut r = 0;
    for col in 0..target_len {
        let Some(p) = (r..rows.len()).find(|&k| rows[k].get(col)) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for row in rows.iter_mut().skip(r + 1) {
            if row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        r += 1;
    }
    rows.into_iter()
        .skip(r)
        .map(|row| row.slice(target_len, target_len + n))
        .collect()
}

/// Rank of the linear map with the given column images.
pub fn rank_of_images(images: &[BitVec]) -> usize {
    let mut rows = images.to_vec();
    rank(&mut rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(bits: &str) -> BitVec {
        BitVec::from_indices(
            bits.len(),
            bits.chars().enumerate().filter(|(_, c)| *c == '1').map(|(i, _)| i),
        )
    }

    #[test]
    fn rank_small() {
        let mut rows = vec![bv("110"), bv("011"), bv("101")];
        assert_eq!(rank(&mut rows), 2);
        let mut rows = vec![bv("100"), bv("010"), bv("001")];
        assert_eq!(rank(&mut rows), 3);
        let mut empty: Vec<BitVec> = vec![];
        assert_eq!(rank(&mut empty), 0);
    }

    #[test]
    fn rank_across_word_boundary() {
        let len = 130;
        let rows: Vec<BitVec> = (0..len).map(|i| BitVec::from_indices(len, [i, (i + 1) % len])).collect();
        // cycle graph incidence: rank n - 1
        assert_eq!(rank(&mut rows.clone()), len - 1);
    }

    #[test]
    fn kernel_matches_rank_nullity() {
        let images = vec![bv("110"), bv("011"), bv("101"), bv("000")];
        let k = kernel(&images, 3);
        assert_eq!(k.len(), 4 - rank_of_images(&images));
        for v in &k {
            let mut acc = BitVec::zeros(3);
            for j in v.ones() {
                acc.xor_assign(&images[j]);
            }
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn subspace_ops() {
        let a = Subspace::spanned_by(4, &[bv("1100"), bv("0110")]);
        let b = Subspace::spanned_by(4, &[bv("1010"), bv("0001")]);
        assert_eq!(a.dim(), 2);
        assert!(a.contains(&bv("1010")));
        assert_eq!(a.intersection_dim(&b), 1);
        assert_eq!(a.sum(&b).dim(), 3);
        assert!(!a.same_as(&b));
    }
}
