use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported number of generators; blades are `u32` bitmasks and
/// `2¹⁶` basis elements is the memory bound we accept.
pub const MAX_DIM: usize = 16;

/// A diagonal quadratic form `q = Σ signs[i]·xᵢ²` in a fixed orthonormal basis.
///
/// Generators satisfy `eᵢ² = −q(eᵢ) = −signs[i]`, so the all-plus form gives
/// the algebras with `eᵢ² = −1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct QuadraticForm {
    signs: Vec<i8>,
}

impl QuadraticForm {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.len() > MAX_DIM {
            return Err(Error::SizeCap(format!(
                "dimension {} exceeds {MAX_DIM}",
                signs.len()
            )));
        }
        if let Some(bad) = signs.iter().find(|s| **s != 1 && **s != -1) {
            return Err(Error::InvalidForm(format!("sign {bad} is not ±1")));
        }
        Ok(QuadraticForm { signs })
    }

    /// The positive definite form of dimension `n`.
    pub fn euclidean(n: usize) -> Result<Self> {
        Self::new(vec![1; n])
    }

    /// `plus` entries `+1` followed by `minus` entries `−1`.
    pub fn with_signature(plus: usize, minus: usize) -> Result<Self> {
        let mut signs = vec![1; plus];
        signs.extend(std::iter::repeat_n(-1, minus));
        Self::new(signs)
    }

    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn sign(&self, i: usize) -> i8 {
        self.signs[i]
    }

    /// Bitmask of the generators with `q(eᵢ) = +1`, i.e. `eᵢ² = −1`.
    pub(crate) fn negative_square_mask(&self) -> u32 {
        self.signs
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == 1)
            .fold(0, |acc, (i, _)| acc | (1 << i))
    }

    pub fn blade_count(&self) -> usize {
        1 << self.dim()
    }

    /// The same signs with the last generator removed.
    pub fn drop_last(&self) -> Result<Self> {
        if self.signs.is_empty() {
            return Err(Error::DimensionMismatch(
                "cannot drop a generator from dimension 0".into(),
            ));
        }
        Self::new(self.signs[..self.dim() - 1].to_vec())
    }
}

impl TryFrom<Vec<i8>> for QuadraticForm {
    type Error = Error;
    fn try_from(signs: Vec<i8>) -> Result<Self> {
        Self::new(signs)
    }
}

impl From<QuadraticForm> for Vec<i8> {
    fn from(q: QuadraticForm) -> Self {
        q.signs
    }
}
