//! Identification of Clifford algebras with matrix algebras.

use serde::{Deserialize, Serialize};

use super::blade::{product_sign, Blade};
use super::form::QuadraticForm;
use crate::error::{Error, Result};
use crate::matrix::ExactMatrix;
use crate::spinor::{odd_irreps, spinor_module, CliffordModule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DivisionAlgebra {
    R,
    C,
    H,
}

impl DivisionAlgebra {
    fn real_dim(self) -> usize {
        match self {
            DivisionAlgebra::R => 1,
            DivisionAlgebra::C => 2,
            DivisionAlgebra::H => 4,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            DivisionAlgebra::R => "ℝ",
            DivisionAlgebra::C => "ℂ",
            DivisionAlgebra::H => "ℍ",
        }
    }
}

/// A sum of one or two full matrix algebras `M(size, D)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgebraType {
    pub factors: Vec<(DivisionAlgebra, usize)>,
}

impl AlgebraType {
    fn simple(d: DivisionAlgebra, size: usize) -> Self {
        AlgebraType { factors: vec![(d, size)] }
    }

    fn double(d: DivisionAlgebra, size: usize) -> Self {
        AlgebraType { factors: vec![(d, size), (d, size)] }
    }

    /// Dimension over the real numbers.
    pub fn real_dim(&self) -> usize {
        self.factors.iter().map(|(d, s)| d.real_dim() * s * s).sum()
    }
}

impl std::fmt::Display for AlgebraType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(d, s)| format!("M({s},{})", d.symbol()))
            .collect();
        f.write_str(&parts.join("⊕"))
    }
}

/// Rank of the span of the represented basis blades.
fn blade_image_rank(module: &CliffordModule) -> Result<usize> {
    let k = module.clifford_dim();
    let rows = (0..1u32 << k)
        .map(|mask| {
            let factors: Vec<ExactMatrix> = Blade::from_mask(mask)
                .indices()
                .into_iter()
                .map(|i| module.generators()[i].clone())
                .collect();
            let image = factors
                .iter()
                .try_fold(ExactMatrix::identity(module.dim()), |acc, g| acc.try_mul(g))?;
            Ok(image.entries().to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(crate::linsolve::rank(rows))
}

/// The complex algebra `ℂℓ_n`, checked against the explicit spinor
/// representation: the `2ⁿ` blade images must be linearly independent, which
/// makes the representation onto `M(2^{n/2}, ℂ)` (even `n`) or onto the
/// block-diagonal `M ⊕ M` (odd `n`).
pub fn classify_complex(n: usize) -> Result<AlgebraType> {
    let half = n / 2;
    let (module, claimed) = if n.is_multiple_of(2) {
        let s = spinor_module(n)?;
        (s.ungraded().clone(), AlgebraType::simple(DivisionAlgebra::C, 1 << half))
    } else {
        let (plus, minus) = odd_irreps(n)?;
        (plus.direct_sum(&minus)?, AlgebraType::double(DivisionAlgebra::C, 1 << half))
    };
    let rank = blade_image_rank(&module)?;
    if rank != 1 << n || claimed.real_dim() != 2 << n {
        return Err(Error::VerificationFailed(format!(
            "blade images of ℂℓ_{n} span {rank} dimensions"
        )));
    }
    Ok(claimed)
}

/// The real algebra with `plus` generators of `q = +1` (`eᵢ² = −1`) and
/// `minus` generators of `q = −1` (`eᵢ² = +1`).
///
/// The centre is spanned by the blades commuting with every generator. A
/// two-dimensional centre is `ℂ` or `ℝ ⊕ ℝ`-like depending on the square of the
/// central blade. `ℝ` and `ℍ` are told apart by the signature of the trace
/// form `⟨x, y⟩ = scalar part of xy`, which is `+m` on `M(m, ℝ)`, `−2m` on
/// `M(m, ℍ)` and zero on `M(m, ℂ)`.
pub fn classify_real(plus: usize, minus: usize) -> Result<AlgebraType> {
    let form = QuadraticForm::with_signature(plus, minus)?;
    let n = form.dim();
    let neg = form.negative_square_mask();
    let square_sign = |b: Blade| if product_sign(b, b, neg).0 { -1i64 } else { 1 };
    let commutes = |a: Blade, b: Blade| product_sign(a, b, neg).0 == product_sign(b, a, neg).0;

    let centre: Vec<Blade> = (0..1u32 << n)
        .map(Blade::from_mask)
        .filter(|&b| (0..n).all(|i| commutes(b, Blade::generator(i))))
        .collect();
    let signature: i64 = (0..1u32 << n).map(|m| square_sign(Blade::from_mask(m))).sum();
    let total = 1usize << n;

    let size_for = |d: DivisionAlgebra, copies: usize| -> Result<usize> {
        let cells = total / (copies * d.real_dim());
        let s = (cells as f64).sqrt().round() as usize;
        if s * s * copies * d.real_dim() != total {
            return Err(Error::VerificationFailed(format!(
                "dimension {total} does not fit {copies} copies over {}",
                d.symbol()
            )));
        }
        Ok(s)
    };

    let (d, copies) = match centre.len() {
        1 if signature > 0 => (DivisionAlgebra::R, 1),
        1 if signature < 0 => (DivisionAlgebra::H, 1),
        2 => {
            let z = centre[1];
            if square_sign(z) < 0 {
                (DivisionAlgebra::C, 1)
            } else if signature > 0 {
                (DivisionAlgebra::R, 2)
            } else {
                (DivisionAlgebra::H, 2)
            }
        }
        c => {
            return Err(Error::VerificationFailed(format!(
                "centre of dimension {c} with trace signature {signature}"
            )))
        }
    };
    let size = size_for(d, copies)?;
    let expected_signature = match d {
        DivisionAlgebra::R => (copies * size) as i64,
        DivisionAlgebra::H => -2 * (copies * size) as i64,
        DivisionAlgebra::C => 0,
    };
    if expected_signature != signature {
        return Err(Error::VerificationFailed(format!(
            "trace signature {signature} disagrees with {copies} x M({size},{})",
            d.symbol()
        )));
    }
    Ok(if copies == 1 {
        AlgebraType::simple(d, size)
    } else {
        AlgebraType::double(d, size)
    })
}
