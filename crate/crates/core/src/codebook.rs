//! Fully enumerated codebooks over small alphabets, packed one codeword per `u64`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::binomial;

/// Every codeword of a code over an alphabet of `2^bits` symbols.
///
/// Symbol `j` of a word occupies bits `bits*j .. bits*(j+1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codebook {
    n: usize,
    bits: u32,
    words: Vec<u64>,
    low: u64,
}

impl Codebook {
    pub fn new(n: usize, bits: u32, words: Vec<u64>) -> Result<Self> {
        if bits == 0 || n * bits as usize > 64 {
            return Err(Error::Dimension(format!(
                "{n} symbols of {bits} bits do not fit a 64-bit word"
            )));
        }
        let low = (0..n).fold(0, |m, j| m | 1 << (bits as usize * j));
        Ok(Codebook {
            n,
            bits,
            words,
            low,
        })
    }

    pub fn pack(bits: u32, symbols: &[u8]) -> u64 {
        symbols
            .iter()
            .enumerate()
            .fold(0, |w, (j, &s)| w | (s as u64) << (bits as usize * j))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn size(&self) -> usize {
        self.words.len()
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn symbol(&self, word: u64, j: usize) -> u8 {
        ((word >> (self.bits as usize * j)) & self.symbol_mask()) as u8
    }

    pub fn unpack(&self, word: u64) -> Vec<u8> {
        (0..self.n).map(|j| self.symbol(word, j)).collect()
    }

    fn symbol_mask(&self) -> u64 {
        (1u64 << self.bits) - 1
    }

    /// Bit mask selecting the listed coordinates.
    pub fn coordinate_mask(&self, coords: impl IntoIterator<Item = usize>) -> u64 {
        coords
            .into_iter()
            .fold(0, |m, j| m | self.symbol_mask() << (self.bits as usize * j))
    }

    /// Number of coordinates in which two packed words differ.
    #[inline]
    pub fn distance(&self, a: u64, b: u64) -> usize {
        let mut diff = a ^ b;
        let mut fold = diff;
        for _ in 1..self.bits {
            diff >>= 1;
            fold |= diff;
        }
        (fold & self.low).count_ones() as usize
    }

    pub fn distinct_count(&self) -> usize {
        let mut sorted = self.words.clone();
        sorted.par_sort_unstable();
        sorted.dedup();
        sorted.len()
    }

    /// Minimum distance by comparing every pair of codewords.
    pub fn min_distance_pairwise(&self) -> Option<usize> {
        let words = &self.words;
        (0..words.len())
            .into_par_iter()
            .filter_map(|i| {
                words[i + 1..]
                    .iter()
                    .map(|&w| self.distance(words[i], w))
                    .min()
            })
            .min()
    }

    /// Minimum distance via projections: the distance is the smallest `t`
    /// such that two codewords agree on some `n - t` coordinates, i.e. some
    /// projection onto `n - t` coordinates is not injective.
    pub fn min_distance_projection(&self) -> Option<usize> {
        if self.words.len() < 2 {
            return None;
        }
        (0..=self.n).find(|&t| self.collides_without(t))
    }

    /// Whether some two codewords agree after deleting some `t` coordinates.
    pub fn collides_without(&self, t: usize) -> bool {
        let keep = self.n - t.min(self.n);
        let subsets: Vec<Vec<usize>> =
            itertools::Itertools::combinations(0..self.n, keep).collect();
        subsets.par_iter().any(|coords| {
            let mask = self.coordinate_mask(coords.iter().copied());
            let mut proj: Vec<u64> = self.words.iter().map(|&w| w & mask).collect();
            proj.sort_unstable();
            proj.windows(2).any(|p| p[0] == p[1])
        })
    }

    /// Operation estimate of [`Codebook::min_distance_projection`] up to distance `t`.
    pub fn projection_cost(&self, t: usize) -> u128 {
        let size = self.words.len() as u128;
        let log = (128 - size.leading_zeros()) as u128;
        (0..=t.min(self.n))
            .map(|s| binomial(self.n, s) * size * log.max(1))
            .sum()
    }

    /// Whether `coords` functionally determine coordinate `target` across the codebook.
    pub fn determines(&self, coords: &[usize], target: usize) -> bool {
        let mask = self.coordinate_mask(coords.iter().copied());
        let mut seen: std::collections::HashMap<u64, u8> =
            std::collections::HashMap::with_capacity(self.words.len());
        self.words.iter().all(|&w| {
            let y = self.symbol(w, target);
            *seen.entry(w & mask).or_insert(y) == y
        })
    }

    /// Lookup table from the projection onto `coords` to the symbol at `target`.
    pub fn repair_table(
        &self,
        coords: &[usize],
        target: usize,
    ) -> Option<std::collections::HashMap<u64, u8>> {
        let mask = self.coordinate_mask(coords.iter().copied());
        let mut table = std::collections::HashMap::new();
        for &w in &self.words {
            let y = self.symbol(w, target);
            if *table.entry(w & mask).or_insert(y) != y {
                return None;
            }
        }
        Some(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn packing_round_trip() {
        let w = Codebook::pack(2, &[1, 2, 3, 0]);
        let cb = Codebook::new(4, 2, vec![w]).unwrap();
        assert_eq!(cb.unpack(w), vec![1, 2, 3, 0]);
        assert_eq!(cb.distance(w, Codebook::pack(2, &[1, 1, 3, 3])), 2);
    }

    #[test]
    fn repetition_code_distance() {
        let words: Vec<u64> = (0..4u8).map(|a| Codebook::pack(2, &[a; 5])).collect();
        let cb = Codebook::new(5, 2, words).unwrap();
        assert_eq!(cb.min_distance_pairwise(), Some(5));
        assert_eq!(cb.min_distance_projection(), Some(5));
        assert!(cb.determines(&[0], 3));
    }

    proptest! {
        #[test]
        fn projection_matches_pairwise(raw in proptest::collection::vec(proptest::collection::vec(0u8..4, 6), 2..40)) {
            let words: Vec<u64> = raw.iter().map(|s| Codebook::pack(2, s)).collect();
            let cb = Codebook::new(6, 2, words).unwrap();
            prop_assert_eq!(cb.min_distance_pairwise(), cb.min_distance_projection());
        }
    }
}
