//! Spin and Spin^c groups inside the Clifford algebra.
//!
//! The Clifford group acts on `V` by the twisted conjugation
//! `v ↦ x·v·α(x)⁻¹`. Norm-one even elements form `Spin(V, q)`, which covers
//! `SO(V, q)` two to one.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::{Multivector, QuadraticForm};
use crate::error::{Error, Result};
use crate::linsolve;
use crate::scalar::{rational_sign, Coefficient, Scalar};

/// Tolerance for floating spin elements built from angles.
pub const FLOAT_TOL: f64 = 1e-12;

/// `x·v·α(x)⁻¹`.
pub fn twisted_conjugation<T: Coefficient>(
    x: &Multivector<T>,
    v: &Multivector<T>,
) -> Result<Multivector<T>> {
    let inv = x.grade_involution().inverse()?;
    x.multiply(v)?.multiply(&inv)
}

/// `N(x) = rev(α(x))·x`, which must be a scalar on the Clifford group.
pub fn spin_norm<T: Coefficient>(x: &Multivector<T>) -> Result<T> {
    let n = x.grade_involution().reversal().multiply(x)?;
    let scalar = n.scalar_part();
    let rest = n.try_sub(&Multivector::scalar(x.form(), scalar.clone()))?;
    if rest.max_magnitude() > if T::EXACT { 0.0 } else { FLOAT_TOL } {
        return Err(Error::NotInCliffordGroup(format!("N(x) = {n} is not a scalar")));
    }
    Ok(scalar)
}

/// A linear map of `V` in the generator basis; column `j` is the image of
/// `e_{j+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationMatrix<T = Scalar> {
    form: QuadraticForm,
    matrix: Vec<Vec<T>>,
}

/// Nested row arrays.
impl<T: Serialize> Serialize for RotationMatrix<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.matrix.serialize(s)
    }
}

impl<T: Coefficient> RotationMatrix<T> {
    fn from_columns(form: &QuadraticForm, columns: Vec<Vec<T>>) -> Self {
        let n = form.dim();
        let matrix = (0..n)
            .map(|i| (0..n).map(|j| columns[j][i].clone()).collect())
            .collect();
        RotationMatrix {
            form: form.clone(),
            matrix,
        }
    }

    pub fn identity(form: &QuadraticForm) -> Self {
        let n = form.dim();
        let matrix = (0..n)
            .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
            .collect();
        RotationMatrix {
            form: form.clone(),
            matrix,
        }
    }

    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.matrix[i][j]
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.matrix
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.form != other.form {
            return Err(Error::FormMismatch);
        }
        let n = self.dim();
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n).fold(T::zero(), |acc, k| {
                            acc + self.get(i, k).clone() * other.get(k, j).clone()
                        })
                    })
                    .collect()
            })
            .collect();
        Ok(RotationMatrix {
            form: self.form.clone(),
            matrix,
        })
    }

    /// `MᵀQM = Q` with `Q = diag(signs)`; exact for exact fields.
    pub fn preserves_form(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|a| {
            (0..n).all(|b| {
                let g = (0..n).fold(T::zero(), |acc, i| {
                    acc + T::from_i64(self.form.sign(i) as i64)
                        * self.get(i, a).clone()
                        * self.get(i, b).clone()
                });
                let want = if a == b {
                    T::from_i64(self.form.sign(a) as i64)
                } else {
                    T::zero()
                };
                g.approx_eq(&want, tol)
            })
        })
    }

    pub fn determinant(&self) -> T {
        linsolve::determinant(self.matrix.clone())
    }

    pub fn is_rotation(&self, tol: f64) -> bool {
        self.preserves_form(tol) && self.determinant().approx_eq(&T::one(), tol)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.form == other.form
            && self
                .matrix
                .iter()
                .flatten()
                .zip(other.matrix.iter().flatten())
                .all(|(a, b)| a.approx_eq(b, tol))
    }
}

/// The linear map `v ↦ x·v·α(x)⁻¹` on `V`; errors when some generator is not
/// sent to a 1-vector.
pub fn vector_action<T: Coefficient>(x: &Multivector<T>) -> Result<RotationMatrix<T>> {
    let form = x.form().clone();
    let inv = x.grade_involution().inverse()?;
    let tol = if T::EXACT { 0.0 } else { FLOAT_TOL };
    let columns = (0..form.dim())
        .map(|i| {
            let image = x.multiply(&Multivector::generator(&form, i)?)?.multiply(&inv)?;
            let vector = Multivector::vector(&form, &image.vector_part())?;
            if image.try_sub(&vector)?.max_magnitude() > tol * image.max_magnitude().max(1.0) {
                return Err(Error::NotInCliffordGroup(format!(
                    "e{} is not sent to a vector",
                    i + 1
                )));
            }
            Ok(image.vector_part())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RotationMatrix::from_columns(&form, columns))
}

/// Outcome of [`is_in_spin`]: membership, or the first test that failed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum SpinCheck {
    InSpin,
    NotReal,
    NotEven,
    NormNotOne { norm: String },
    DoesNotPreserveVectors,
    OrientationReversing,
}

impl SpinCheck {
    pub fn passed(&self) -> bool {
        *self == SpinCheck::InSpin
    }
}

/// Membership in `Spin(V, q)`: real coefficients, even, `rev(x)·x = 1`,
/// `V` preserved by twisted conjugation, determinant `+1`.
pub fn is_in_spin<T: Coefficient>(x: &Multivector<T>) -> SpinCheck {
    let tol = if T::EXACT { 0.0 } else { FLOAT_TOL };
    if x.terms().any(|(_, c)| !c.is_real()) {
        return SpinCheck::NotReal;
    }
    if x.grade_decompose().1.max_magnitude() > tol {
        return SpinCheck::NotEven;
    }
    let norm = match x.reversal().multiply(x) {
        Ok(n) => n,
        Err(_) => return SpinCheck::DoesNotPreserveVectors,
    };
    if !norm.approx_eq(&Multivector::one(x.form()), tol) {
        return SpinCheck::NormNotOne {
            norm: norm.to_string(),
        };
    }
    let det_tol = if T::EXACT { 0.0 } else { 1e-10 };
    match vector_action(x) {
        Ok(m) if m.determinant().approx_eq(&T::one(), det_tol) => SpinCheck::InSpin,
        Ok(_) => SpinCheck::OrientationReversing,
        Err(_) => SpinCheck::DoesNotPreserveVectors,
    }
}

/// An element certified to lie in `Spin(V, q)`.
#[derive(Clone, PartialEq)]
pub struct SpinElement<T = Scalar> {
    value: Multivector<T>,
}

impl<T: Coefficient> std::fmt::Debug for SpinElement<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SpinElement({})", self.value)
    }
}

impl<T: Coefficient> Serialize for SpinElement<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.value.serialize(s)
    }
}

impl<T: Coefficient> SpinElement<T> {
    pub fn new(value: Multivector<T>) -> Result<Self> {
        match is_in_spin(&value) {
            SpinCheck::InSpin => Ok(SpinElement { value }),
            failure => Err(Error::NotInSpin(format!("{failure:?}"))),
        }
    }

    pub fn one(form: &QuadraticForm) -> Self {
        SpinElement {
            value: Multivector::one(form),
        }
    }

    pub fn value(&self) -> &Multivector<T> {
        &self.value
    }

    pub fn form(&self) -> &QuadraticForm {
        self.value.form()
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        Ok(SpinElement {
            value: self.value.multiply(&other.value)?,
        })
    }

    /// For spin elements `x⁻¹ = rev(x)`.
    pub fn inverse(&self) -> Self {
        SpinElement {
            value: self.value.reversal(),
        }
    }
}

impl<T: Coefficient> std::ops::Neg for &SpinElement<T> {
    type Output = SpinElement<T>;
    fn neg(self) -> SpinElement<T> {
        SpinElement { value: -&self.value }
    }
}

impl<'de> Deserialize<'de> for SpinElement<Scalar> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let value = Multivector::<Scalar>::deserialize(d)?;
        SpinElement::new(value).map_err(serde::de::Error::custom)
    }
}

/// The rotation covered by `u`.
pub fn covering_map<T: Coefficient>(u: &SpinElement<T>) -> Result<RotationMatrix<T>> {
    vector_action(&u.value)
}

/// `cos(θ/2) + sin(θ/2)·eᵢeⱼ` in the positive definite algebra of dimension
/// `n` (0-based axes). It covers the rotation `eᵢ ↦ cos θ·eᵢ + sin θ·eⱼ`,
/// `eⱼ ↦ −sin θ·eᵢ + cos θ·eⱼ`.
pub fn lift_rotation(n: usize, i: usize, j: usize, theta: f64) -> Result<SpinElement<f64>> {
    if i == j || i >= n || j >= n {
        return Err(Error::DimensionMismatch(format!(
            "axes {i}, {j} do not span a plane in dimension {n}"
        )));
    }
    let form = QuadraticForm::euclidean(n)?;
    let plane = Multivector::<f64>::generator(&form, i)?.multiply(&Multivector::generator(&form, j)?)?;
    let half = theta / 2.0;
    let value = Multivector::scalar(&form, half.cos()).try_add(&plane.scale(&half.sin()))?;
    SpinElement::new(value)
}

/// The rotation by `θ` in the `(i, j)` plane, in floating point.
pub fn plane_rotation(n: usize, i: usize, j: usize, theta: f64) -> Result<RotationMatrix<f64>> {
    let form = QuadraticForm::euclidean(n)?;
    let mut columns: Vec<Vec<f64>> = (0..n)
        .map(|c| (0..n).map(|r| if r == c { 1.0 } else { 0.0 }).collect())
        .collect();
    let (c, s) = (theta.cos(), theta.sin());
    columns[i][i] = c;
    columns[i][j] = s;
    columns[j][i] = -s;
    columns[j][j] = c;
    Ok(RotationMatrix::from_columns(&form, columns))
}

/// An element of `Spin^c = Spin ×_{ℤ₂} U(1)` in canonical form: the phase
/// lies in the closed upper half circle and is `+1` rather than `−1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinCElement {
    spin: SpinElement<Scalar>,
    phase: Scalar,
}

impl SpinCElement {
    pub fn spin(&self) -> &SpinElement<Scalar> {
        &self.spin
    }

    pub fn phase(&self) -> &Scalar {
        &self.phase
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        spinc_canonicalize(self.spin.multiply(&other.spin)?, &self.phase * &other.phase)
    }
}

/// Canonical representative of the class of `(u, z)` modulo `(−1, −1)`.
pub fn spinc_canonicalize(u: SpinElement<Scalar>, z: Scalar) -> Result<SpinCElement> {
    if z.norm_sqr() != BigRational::one() {
        return Err(Error::NotInSpin(format!("phase {z} is not of modulus one")));
    }
    let flip = match rational_sign(&z.im) {
        s if s < 0 => true,
        0 => rational_sign(&z.re) < 0,
        _ => false,
    };
    Ok(if flip {
        SpinCElement { spin: -&u, phase: -z }
    } else {
        SpinCElement { spin: u, phase: z }
    })
}

/// A uniformly scattered point of `S^{n−1}` with rational coordinates, by
/// inverse stereographic projection of a small rational point.
pub fn random_rational_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Scalar> {
    assert!(n >= 1, "dimension must be positive");
    let t: Vec<BigRational> = (0..n - 1)
        .map(|_| BigRational::new(rng.random_range(-6i64..=6).into(), rng.random_range(1i64..=5).into()))
        .collect();
    let t2: BigRational = t.iter().map(|x| x * x).fold(BigRational::zero(), |a, b| a + b);
    let denom = &t2 + BigRational::one();
    let two = BigRational::from_integer(2.into());
    let mut v: Vec<Scalar> = t.iter().map(|x| Scalar::real(&two * x / &denom)).collect();
    v.push(Scalar::real((&t2 - BigRational::one()) / &denom));
    let shift = rng.random_range(0..n);
    v.rotate_left(shift);
    v
}

/// Product of `factors` random rational unit vectors in the positive definite
/// algebra; an element of `Spin` when `factors` is even.
pub fn random_unit_vector_product<R: Rng + ?Sized>(
    form: &QuadraticForm,
    factors: usize,
    rng: &mut R,
) -> Result<Multivector<Scalar>> {
    (0..factors).try_fold(Multivector::one(form), |acc, _| {
        let v = Multivector::vector(form, &random_rational_unit_vector(form.dim(), rng))?;
        acc.multiply(&v)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn e(form: &QuadraticForm, i: usize) -> Multivector {
        Multivector::generator(form, i).unwrap()
    }

    #[test]
    fn twisted_conjugation_reflects() {
        let form = QuadraticForm::euclidean(3).unwrap();
        let one = Multivector::one(&form);
        let v = e(&form, 1);
        assert_eq!(twisted_conjugation(&one, &v).unwrap(), v);
        // x·v·α(x)⁻¹ for a unit vector x is the reflection in x^⊥:
        // e₁·e₁·(−e₁)⁻¹ = −e₁ and e₁·e₂·(−e₁)⁻¹ = e₂.
        let x = e(&form, 0);
        assert_eq!(twisted_conjugation(&x, &x).unwrap(), -&x);
        assert_eq!(twisted_conjugation(&x, &v).unwrap(), v);
        let zero_divisor = one.try_add(&e(&form, 0).multiply(&e(&form, 1)).unwrap().scale(&Scalar::i())).unwrap();
        assert!(matches!(twisted_conjugation(&zero_divisor, &v), Err(Error::NotInvertible)));
    }

    #[test]
    fn covering_examples() {
        let form = QuadraticForm::euclidean(4).unwrap();
        let one = SpinElement::<Scalar>::one(&form);
        assert_eq!(covering_map(&one).unwrap(), RotationMatrix::identity(&form));
        let u = SpinElement::new(e(&form, 0).multiply(&e(&form, 1)).unwrap()).unwrap();
        let m = covering_map(&u).unwrap();
        let diag: Vec<i64> = (0..4).map(|i| m.get(i, i).to_i64().unwrap()).collect();
        assert_eq!(diag, vec![-1, -1, 1, 1]);
        assert!(m.is_rotation(0.0));
        assert_eq!(covering_map(&-&u).unwrap(), m);
    }

    #[test]
    fn lift_orientation_and_period() {
        let u = lift_rotation(3, 0, 1, PI / 2.0).unwrap();
        let m = covering_map(&u).unwrap();
        assert!(m.approx_eq(&plane_rotation(3, 0, 1, PI / 2.0).unwrap(), 1e-12));
        // e₁ ↦ e₂ for a quarter turn.
        assert!((m.get(1, 0) - 1.0).abs() < 1e-12);
        let zero = lift_rotation(3, 0, 1, 0.0).unwrap();
        assert!(zero.value().approx_eq(&Multivector::one(zero.form()), 1e-12));
        let full = lift_rotation(3, 0, 1, 2.0 * PI).unwrap();
        assert!(full.value().approx_eq(&Multivector::scalar(full.form(), -1.0), 1e-12));
        assert!(covering_map(&full).unwrap().approx_eq(&RotationMatrix::identity(full.form()), 1e-12));
        let half = lift_rotation(3, 0, 1, PI).unwrap();
        let plane = Multivector::<f64>::generator(half.form(), 0)
            .unwrap()
            .multiply(&Multivector::generator(half.form(), 1).unwrap())
            .unwrap();
        assert!(half.value().approx_eq(&plane, 1e-12));
        for theta in [0.3, 1.7, -2.9] {
            let a = lift_rotation(4, 2, 1, theta).unwrap();
            let b = lift_rotation(4, 2, 1, theta + 2.0 * PI).unwrap();
            assert!(b.value().approx_eq(&-a.value(), 1e-12));
            assert!(covering_map(&a)
                .unwrap()
                .approx_eq(&plane_rotation(4, 2, 1, theta).unwrap(), 1e-12));
        }
        assert!(lift_rotation(3, 1, 1, 0.5).is_err());
    }

    #[test]
    fn norm_examples() {
        let form = QuadraticForm::new(vec![1, -1, 1]).unwrap();
        assert_eq!(spin_norm(&Multivector::<Scalar>::one(&form)).unwrap(), Scalar::one());
        let v = Multivector::vector(&form, &[Scalar::int(3), Scalar::int(1), Scalar::int(2)]).unwrap();
        // q(v) = 9 − 1 + 4.
        assert_eq!(spin_norm(&v).unwrap(), Scalar::int(12));
        let w = Multivector::vector(&form, &[Scalar::int(0), Scalar::int(2), Scalar::int(1)]).unwrap();
        assert_eq!(spin_norm(&v.multiply(&w).unwrap()).unwrap(), Scalar::int(12 * -3));
        let e123 = Multivector::blade(&form, crate::clifford::Blade::from_mask(0b111), Scalar::one()).unwrap();
        let not_group = Multivector::one(&form).try_add(&e123).unwrap();
        assert!(matches!(spin_norm(&not_group), Err(Error::NotInCliffordGroup(_))));
    }

    #[test]
    fn membership_certificates() {
        let form = QuadraticForm::euclidean(3).unwrap();
        let e12 = e(&form, 0).multiply(&e(&form, 1)).unwrap();
        assert_eq!(is_in_spin(&e12), SpinCheck::InSpin);
        assert_eq!(is_in_spin(&e(&form, 0)), SpinCheck::NotEven);
        assert!(matches!(is_in_spin(&e12.scale(&Scalar::int(2))), SpinCheck::NormNotOne { .. }));
        assert_eq!(is_in_spin(&e12.scale(&Scalar::i())), SpinCheck::NotReal);
        // Even, norm one, but mixes vectors with trivectors.
        let mixed = Multivector::one(&form)
            .scale(&Scalar::ratio(3, 5))
            .try_add(&e12.multiply(&e(&form, 2)).unwrap().multiply(&e(&form, 0)).unwrap())
            .unwrap();
        assert!(!is_in_spin(&mixed).passed());
    }

    #[test]
    fn spinc_canonical_form() {
        let form = QuadraticForm::euclidean(2).unwrap();
        let one = SpinElement::<Scalar>::one(&form);
        let e12 = SpinElement::new(e(&form, 0).multiply(&e(&form, 1)).unwrap()).unwrap();
        let z: Scalar = "3/5-4/5i".parse().unwrap();
        let a = spinc_canonicalize(e12.clone(), z.clone()).unwrap();
        let b = spinc_canonicalize(-&e12, -z).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.phase().im, BigRational::new(4.into(), 5.into()));
        let id = spinc_canonicalize(one.clone(), Scalar::one()).unwrap();
        assert_eq!(id.spin(), &one);
        let x = spinc_canonicalize(e12, Scalar::i()).unwrap();
        let sq = x.multiply(&x).unwrap();
        assert_eq!(sq, id);
        assert!(spinc_canonicalize(one, Scalar::int(2)).is_err());
    }

    #[test]
    fn rational_unit_vectors_are_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for n in 1..=5 {
            for _ in 0..20 {
                let v = random_rational_unit_vector(n, &mut rng);
                let sum = v.iter().fold(Scalar::zero(), |acc, x| &acc + &(x * x));
                assert_eq!(sum, Scalar::one());
            }
        }
    }
}
