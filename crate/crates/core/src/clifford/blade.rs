use std::fmt;

use serde::{Deserialize, Serialize};

use super::form::QuadraticForm;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A basis blade `e_{i₁}⋯e_{i_k}` with `i₁ < ⋯ < i_k`, stored as a bitmask
/// (bit `i` set means `e_{i+1}` occurs).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Blade(u32);

impl Blade {
    pub const SCALAR: Blade = Blade(0);

    pub fn from_mask(mask: u32) -> Self {
        Blade(mask)
    }

    /// Blade from 0-based generator indices; order and repetition are ignored
    /// only when the indices are already distinct and increasing.
    pub fn from_indices(indices: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        let mut last = None;
        for &i in indices {
            if i >= super::form::MAX_DIM {
                return Err(Error::SizeCap(format!("generator index {i}")));
            }
            if last.is_some_and(|l| l >= i) {
                return Err(Error::Parse(format!(
                    "blade indices must be strictly increasing: {indices:?}"
                )));
            }
            mask |= 1 << i;
            last = Some(i);
        }
        Ok(Blade(mask))
    }

    /// The generator `e_{i+1}` (0-based `i`).
    pub fn generator(i: usize) -> Self {
        Blade(1 << i)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn grade(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_even(self) -> bool {
        self.grade().is_multiple_of(2)
    }

    /// 0-based generator indices in increasing order.
    pub fn indices(self) -> Vec<usize> {
        (0..32).filter(|i| self.0 & (1 << i) != 0).collect()
    }

    /// Highest generator index + 1, i.e. the smallest dimension holding the blade.
    pub fn min_dim(self) -> usize {
        32 - self.0.leading_zeros() as usize
    }

    pub fn fits(self, dim: usize) -> bool {
        self.min_dim() <= dim
    }

    /// Sign of reversing the generator order: `(−1)^{k(k−1)/2}`.
    pub fn reversal_negates(self) -> bool {
        let k = self.grade();
        (k * k.saturating_sub(1) / 2) % 2 == 1
    }
}

impl fmt::Display for Blade {
    /// `1` for the scalar blade, otherwise `e` followed by 1-based indices
    /// (`e13`); indices above 9 are comma separated (`e1,10`).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        let idx: Vec<String> = self.indices().iter().map(|i| (i + 1).to_string()).collect();
        if self.min_dim() <= 9 {
            write!(f, "e{}", idx.concat())
        } else {
            write!(f, "e{}", idx.join(","))
        }
    }
}

impl fmt::Debug for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// 1-based index list, the JSON representation.
impl Serialize for Blade {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let idx: Vec<usize> = self.indices().iter().map(|i| i + 1).collect();
        idx.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Blade {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let idx = Vec::<usize>::deserialize(d)?;
        if idx.contains(&0) {
            return Err(serde::de::Error::custom("blade indices are 1-based"));
        }
        let zero_based: Vec<usize> = idx.iter().map(|i| i - 1).collect();
        Blade::from_indices(&zero_based).map_err(serde::de::Error::custom)
    }
}

/// Sign and blade of `a·b`, with `true` meaning the product is negated.
///
/// The sign counts the transpositions needed to merge the two index lists and
/// adds one factor `eᵢ² = −q(eᵢ)` per shared generator.
#[inline]
pub(crate) fn product_sign(a: Blade, b: Blade, negative_squares: u32) -> (bool, Blade) {
    let mut swaps = 0u32;
    let mut rest = a.0 >> 1;
    while rest != 0 {
        swaps += (rest & b.0).count_ones();
        rest >>= 1;
    }
    swaps += (a.0 & b.0 & negative_squares).count_ones();
    (swaps % 2 == 1, Blade(a.0 ^ b.0))
}

/// Product of two basis blades: a sign `±1` and the canonical blade.
pub fn blade_product(a: Blade, b: Blade, q: &QuadraticForm) -> Result<(Scalar, Blade)> {
    if !a.fits(q.dim()) || !b.fits(q.dim()) {
        return Err(Error::DimensionMismatch(format!(
            "blades {a} and {b} do not fit dimension {}",
            q.dim()
        )));
    }
    let (neg, blade) = product_sign(a, b, q.negative_square_mask());
    Ok((Scalar::int(if neg { -1 } else { 1 }), blade))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(idx: &[usize]) -> Blade {
        Blade::from_indices(&idx.iter().map(|i| i - 1).collect::<Vec<_>>()).unwrap()
    }

    /// Reduces a word of generators by adjacent swaps and cancellations only,
    /// applying `eᵢeⱼ = −eⱼeᵢ` and `eᵢ² = −signs[i]` one step at a time.
    fn reduce_word(mut word: Vec<usize>, signs: &[i8]) -> (i64, Vec<usize>) {
        let mut sign = 1i64;
        loop {
            let mut changed = false;
            let mut k = 0;
            while k + 1 < word.len() {
                if word[k] > word[k + 1] {
                    word.swap(k, k + 1);
                    sign = -sign;
                    changed = true;
                } else if word[k] == word[k + 1] {
                    sign *= -(signs[word[k]] as i64);
                    word.drain(k..k + 2);
                    changed = true;
                    continue;
                }
                k += 1;
            }
            if !changed {
                return (sign, word);
            }
        }
    }

    #[test]
    fn generator_squares_to_minus_one() {
        let q = QuadraticForm::euclidean(3).unwrap();
        assert_eq!(
            blade_product(e(&[1]), e(&[1]), &q).unwrap(),
            (Scalar::int(-1), Blade::SCALAR)
        );
    }

    #[test]
    fn generators_anticommute() {
        let q = QuadraticForm::euclidean(2).unwrap();
        assert_eq!(
            blade_product(e(&[1]), e(&[2]), &q).unwrap(),
            (Scalar::int(1), e(&[1, 2]))
        );
        assert_eq!(
            blade_product(e(&[2]), e(&[1]), &q).unwrap(),
            (Scalar::int(-1), e(&[1, 2]))
        );
    }

    #[test]
    fn bivector_square_matches_word_reduction() {
        let q = QuadraticForm::euclidean(2).unwrap();
        let (sign, word) = reduce_word(vec![0, 1, 0, 1], q.signs());
        assert_eq!((sign, word.len()), (-1, 0));
        assert_eq!(
            blade_product(e(&[1, 2]), e(&[1, 2]), &q).unwrap(),
            (Scalar::int(-1), Blade::SCALAR)
        );
    }

    #[test]
    fn all_blade_pairs_match_word_reduction() {
        for signs in [vec![1, 1, 1, 1], vec![1, -1, 1, -1], vec![-1, -1, 1, 1]] {
            let q = QuadraticForm::new(signs.clone()).unwrap();
            for a in 0..16u32 {
                for b in 0..16u32 {
                    let (a, b) = (Blade::from_mask(a), Blade::from_mask(b));
                    let mut word = a.indices();
                    word.extend(b.indices());
                    let (sign, reduced) = reduce_word(word, &signs);
                    let (s, blade) = blade_product(a, b, &q).unwrap();
                    assert_eq!(s, Scalar::int(sign), "{a} * {b} with {signs:?}");
                    assert_eq!(blade.indices(), reduced);
                }
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let q = QuadraticForm::euclidean(2).unwrap();
        assert!(blade_product(e(&[3]), e(&[1]), &q).is_err());
    }

    #[test]
    fn names() {
        assert_eq!(e(&[1, 3]).to_string(), "e13");
        assert_eq!(Blade::SCALAR.to_string(), "1");
        assert_eq!(e(&[1, 10]).to_string(), "e1,10");
    }

    #[test]
    fn rejects_unsorted_indices() {
        assert!(Blade::from_indices(&[2, 1]).is_err());
        assert!(Blade::from_indices(&[1, 1]).is_err());
    }
}
