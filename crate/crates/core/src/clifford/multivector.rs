use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::blade::{product_sign, Blade};
use super::form::QuadraticForm;
use crate::error::{Error, Result};
use crate::linsolve;
use crate::scalar::{Coefficient, Scalar};

/// An element of `Cℓ(V, q)`: a finite sum of basis blades with non-zero
/// coefficients.
#[derive(Clone, PartialEq)]
pub struct Multivector<T = Scalar> {
    form: QuadraticForm,
    terms: BTreeMap<Blade, T>,
}

impl<T: Coefficient> Multivector<T> {
    pub fn zero(form: &QuadraticForm) -> Self {
        Multivector {
            form: form.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(form: &QuadraticForm, value: T) -> Self {
        Self::blade(form, Blade::SCALAR, value).expect("scalar blade always fits")
    }

    pub fn one(form: &QuadraticForm) -> Self {
        Self::scalar(form, T::one())
    }

    /// `value · blade`.
    pub fn blade(form: &QuadraticForm, blade: Blade, value: T) -> Result<Self> {
        Self::from_terms(form, [(blade, value)])
    }

    /// The generator `e_{i+1}`.
    pub fn generator(form: &QuadraticForm, i: usize) -> Result<Self> {
        Self::blade(form, Blade::generator(i), T::one())
    }

    /// The 1-vector `Σ coeffs[i]·e_{i+1}`.
    pub fn vector(form: &QuadraticForm, coeffs: &[T]) -> Result<Self> {
        if coeffs.len() != form.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} vector coefficients for dimension {}",
                coeffs.len(),
                form.dim()
            )));
        }
        Self::from_terms(
            form,
            coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (Blade::generator(i), c.clone())),
        )
    }

    /// Sums repeated blades and drops zero coefficients.
    pub fn from_terms(
        form: &QuadraticForm,
        terms: impl IntoIterator<Item = (Blade, T)>,
    ) -> Result<Self> {
        let mut out = Self::zero(form);
        for (blade, value) in terms {
            if !blade.fits(form.dim()) {
                return Err(Error::DimensionMismatch(format!(
                    "blade {blade} does not fit dimension {}",
                    form.dim()
                )));
            }
            out.accumulate(blade, value);
        }
        Ok(out)
    }

    fn accumulate(&mut self, blade: Blade, value: T) {
        if value.is_zero() {
            return;
        }
        match self.terms.entry(blade) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(value);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                let sum = slot.get().add_ref(&value);
                if sum.is_zero() {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    pub fn form(&self) -> &QuadraticForm {
        &self.form
    }

    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Blade, &T)> {
        self.terms.iter().map(|(b, c)| (*b, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, blade: Blade) -> T {
        self.terms.get(&blade).cloned().unwrap_or_else(T::zero)
    }

    pub fn scalar_part(&self) -> T {
        self.coefficient(Blade::SCALAR)
    }

    /// True if only the scalar blade can be non-zero.
    pub fn is_scalar(&self) -> bool {
        self.terms.keys().all(|b| *b == Blade::SCALAR)
    }

    /// True if every term has grade 1.
    pub fn is_vector(&self) -> bool {
        self.terms.keys().all(|b| b.grade() == 1)
    }

    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|b| b.is_even())
    }

    pub fn is_odd(&self) -> bool {
        self.terms.keys().all(|b| !b.is_even())
    }

    /// Coefficients of the grade-1 part, indexed by generator.
    pub fn vector_part(&self) -> Vec<T> {
        (0..self.dim())
            .map(|i| self.coefficient(Blade::generator(i)))
            .collect()
    }

    fn check_form(&self, other: &Self) -> Result<()> {
        if self.form != other.form {
            Err(Error::FormMismatch)
        } else {
            Ok(())
        }
    }

    fn map_terms(&self, f: impl Fn(Blade, &T) -> T) -> Self {
        let mut out = Self::zero(&self.form);
        for (b, c) in &self.terms {
            out.accumulate(*b, f(*b, c));
        }
        out
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_form(other)?;
        let mut out = self.clone();
        for (b, c) in &other.terms {
            out.accumulate(*b, c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_form(other)?;
        let mut out = self.clone();
        for (b, c) in &other.terms {
            out.accumulate(*b, -c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, factor: &T) -> Self {
        self.map_terms(|_, c| c.clone() * factor.clone())
    }

    /// The Clifford product.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_form(other)?;
        let negative_squares = self.form.negative_square_mask();
        let mut out = Self::zero(&self.form);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let (neg, blade) = product_sign(*a, *b, negative_squares);
                let value = x.mul_ref(y);
                out.accumulate(blade, if neg { -value } else { value });
            }
        }
        Ok(out)
    }

    /// The grade involution `α`, which negates odd blades.
    pub fn grade_involution(&self) -> Self {
        self.map_terms(|b, c| if b.is_even() { c.clone() } else { -c.clone() })
    }

    /// The reversal anti-automorphism `e_{i₁}⋯e_{i_k} ↦ e_{i_k}⋯e_{i₁}`.
    pub fn reversal(&self) -> Self {
        self.map_terms(|b, c| {
            if b.reversal_negates() {
                -c.clone()
            } else {
                c.clone()
            }
        })
    }

    /// Componentwise complex conjugation of the coefficients.
    pub fn conjugate_coefficients(&self) -> Self {
        self.map_terms(|_, c| c.conjugate())
    }

    /// Split into the `+1` and `−1` eigenspaces of `α`.
    pub fn grade_decompose(&self) -> (Self, Self) {
        let mut even = Self::zero(&self.form);
        let mut odd = Self::zero(&self.form);
        for (b, c) in &self.terms {
            if b.is_even() {
                even.terms.insert(*b, c.clone());
            } else {
                odd.terms.insert(*b, c.clone());
            }
        }
        (even, odd)
    }

    /// Projection onto blades of grade `k`.
    pub fn grade(&self, k: u32) -> Self {
        Multivector {
            form: self.form.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(b, _)| b.grade() == k)
                .map(|(b, c)| (*b, c.clone()))
                .collect(),
        }
    }

    /// Image under `Cℓ_{n−1} → Cℓ⁰_n`, `eᵢ ↦ eᵢ eₙ`.
    ///
    /// `target` must extend this form by one generator with `q(eₙ) = +1`;
    /// otherwise the images of the generators do not square correctly.
    pub fn embed_lower(&self, target: &QuadraticForm) -> Result<Self> {
        let n = target.dim();
        if n != self.dim() + 1 || target.signs()[..self.dim()] != *self.form.signs() {
            return Err(Error::DimensionMismatch(format!(
                "cannot embed dimension {} into {:?}",
                self.dim(),
                target.signs()
            )));
        }
        if target.sign(n - 1) != 1 {
            return Err(Error::InvalidForm(
                "the added generator must satisfy q(eₙ) = +1".into(),
            ));
        }
        let last = Multivector::<T>::generator(target, n - 1)?;
        let images: Vec<Self> = (0..self.dim())
            .map(|i| Multivector::<T>::generator(target, i)?.multiply(&last))
            .collect::<Result<_>>()?;
        let mut out = Self::zero(target);
        for (blade, c) in &self.terms {
            let mut term = Self::scalar(target, c.clone());
            for i in blade.indices() {
                term = term.multiply(&images[i])?;
            }
            for (b, v) in term.terms {
                out.accumulate(b, v);
            }
        }
        Ok(out)
    }

    /// Matrix of left multiplication by `self` in the blade basis
    /// (column `j` is `self · blade_j`), row-major.
    pub fn left_multiplication_matrix(&self) -> Vec<Vec<T>> {
        let size = self.form.blade_count();
        let negative_squares = self.form.negative_square_mask();
        let mut m = vec![vec![T::zero(); size]; size];
        for (a, x) in &self.terms {
            for col in 0..size {
                let (neg, blade) = product_sign(*a, Blade::from_mask(col as u32), negative_squares);
                let row = blade.mask() as usize;
                let v = if neg { -x.clone() } else { x.clone() };
                m[row][col] = m[row][col].clone() + v;
            }
        }
        m
    }

    /// Two-sided inverse.
    ///
    /// Elements of the Clifford group are inverted through the scalar
    /// `rev(α(x))·x`; anything else goes through a linear solve against the
    /// left regular representation.
    pub fn inverse(&self) -> Result<Self> {
        let conj = self.grade_involution().reversal();
        let norm = conj.multiply(self)?;
        if norm.is_scalar() {
            let s = norm.scalar_part();
            let inv = s.inverse().ok_or(Error::NotInvertible)?;
            let candidate = conj.scale(&inv);
            if self.multiply(&candidate)?.approx_one(1e-12) {
                return Ok(candidate);
            }
        }
        let size = self.form.blade_count();
        let matrix = self.left_multiplication_matrix();
        let mut rhs = vec![T::zero(); size];
        rhs[0] = T::one();
        let solution = linsolve::solve(matrix, rhs).ok_or(Error::NotInvertible)?;
        let inv = Self::from_terms(
            &self.form,
            solution
                .into_iter()
                .enumerate()
                .map(|(i, c)| (Blade::from_mask(i as u32), c)),
        )?;
        // In a finite-dimensional algebra a right inverse is two-sided.
        Ok(inv)
    }

    fn approx_one(&self, tol: f64) -> bool {
        self.approx_eq(&Self::one(&self.form), tol)
    }

    /// Equality up to `tol` per coefficient (exact for exact fields).
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.form != other.form {
            return false;
        }
        if T::EXACT {
            return self.terms == other.terms;
        }
        let blades: std::collections::BTreeSet<Blade> =
            self.terms.keys().chain(other.terms.keys()).copied().collect();
        blades
            .into_iter()
            .all(|b| self.coefficient(b).approx_eq(&other.coefficient(b), tol))
    }

    /// Largest coefficient magnitude.
    pub fn max_magnitude(&self) -> f64 {
        self.terms.values().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    pub fn map_coefficients<U: Coefficient>(&self, f: impl Fn(&T) -> U) -> Multivector<U> {
        let mut out = Multivector::<U>::zero(&self.form);
        for (b, c) in &self.terms {
            out.accumulate(*b, f(c));
        }
        out
    }
}

impl Multivector<Scalar> {
    /// Floating-point copy of the real parts; errors on complex coefficients.
    pub fn to_f64(&self) -> Result<Multivector<f64>> {
        if self.terms.values().any(|c| !c.is_real()) {
            return Err(Error::Parse("complex coefficient in a real context".into()));
        }
        Ok(self.map_coefficients(|c| c.to_complex().re))
    }
}

impl<T: Coefficient> fmt::Display for Multivector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (b, c)) in self.terms.iter().enumerate() {
            let (re, im) = c.format_parts();
            let coeff = if im == "0" {
                re
            } else if re == "0" {
                format!("({im}i)")
            } else {
                format!("({re}+{im}i)")
            };
            if k > 0 {
                write!(f, " + ")?;
            }
            if *b == Blade::SCALAR {
                write!(f, "{coeff}")?;
            } else if coeff == "1" {
                write!(f, "{b}")?;
            } else {
                write!(f, "{coeff}·{b}")?;
            }
        }
        Ok(())
    }
}

impl<T: Coefficient> fmt::Debug for Multivector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multivector({:?}: {self})", self.form.signs())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        /// Panics if the forms differ; use the `try_`/`multiply` methods to
        /// handle that case.
        impl<'a, T: Coefficient> $trait<&'a Multivector<T>> for &'a Multivector<T> {
            type Output = Multivector<T>;
            fn $method(self, rhs: &'a Multivector<T>) -> Multivector<T> {
                self.$inner(rhs).expect("multivectors over different forms")
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, multiply);

impl<T: Coefficient> Neg for &Multivector<T> {
    type Output = Multivector<T>;
    fn neg(self) -> Multivector<T> {
        self.map_terms(|_, c| -c.clone())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    blade: Blade,
    re: String,
    im: String,
}

#[derive(Serialize, Deserialize)]
struct MultivectorJson {
    dim: usize,
    signs: Vec<i8>,
    terms: Vec<TermJson>,
}

impl<T: Coefficient> Serialize for Multivector<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MultivectorJson {
            dim: self.dim(),
            signs: self.form.signs().to_vec(),
            terms: self
                .terms
                .iter()
                .map(|(b, c)| {
                    let (re, im) = c.format_parts();
                    TermJson { blade: *b, re, im }
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de, T: Coefficient> Deserialize<'de> for Multivector<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = MultivectorJson::deserialize(d)?;
        if raw.signs.len() != raw.dim {
            return Err(D::Error::custom("length of signs must equal dim"));
        }
        let form = QuadraticForm::new(raw.signs).map_err(D::Error::custom)?;
        let terms = raw
            .terms
            .into_iter()
            .map(|t| Ok((t.blade, T::parse_parts(&t.re, &t.im)?)))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Multivector::from_terms(&form, terms).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eucl(n: usize) -> QuadraticForm {
        QuadraticForm::euclidean(n).unwrap()
    }

    fn e(q: &QuadraticForm, idx: &[usize]) -> Multivector {
        let zero_based: Vec<usize> = idx.iter().map(|i| i - 1).collect();
        Multivector::blade(q, Blade::from_indices(&zero_based).unwrap(), Scalar::int(1)).unwrap()
    }

    fn s(q: &QuadraticForm, v: i64) -> Multivector {
        Multivector::scalar(q, Scalar::int(v))
    }

    #[test]
    fn one_plus_e1_times_one_minus_e1() {
        let q = eucl(1);
        let x = &s(&q, 1) + &e(&q, &[1]);
        let y = &s(&q, 1) - &e(&q, &[1]);
        // (1 + e₁)(1 − e₁) = 1 − e₁² = 2, expanded term by term.
        let expanded = &(&(&s(&q, 1) - &e(&q, &[1])) + &e(&q, &[1])) - &(&e(&q, &[1]) * &e(&q, &[1]));
        assert_eq!(&x * &y, expanded);
        assert_eq!(&x * &y, s(&q, 2));
    }

    #[test]
    fn unit_law() {
        let q = eucl(3);
        let x = &(&e(&q, &[1, 3]) + &s(&q, 5)) - &e(&q, &[2]);
        assert_eq!(&x * &Multivector::one(&q), x);
        assert_eq!(&Multivector::one(&q) * &x, x);
    }

    #[test]
    fn vector_square_is_minus_quadratic_form() {
        let q = eucl(2);
        let v = Multivector::vector(&q, &[Scalar::int(3), Scalar::int(4)]).unwrap();
        assert_eq!(&v * &v, s(&q, -25));
        let mixed = QuadraticForm::new(vec![1, -1]).unwrap();
        let w = Multivector::vector(&mixed, &[Scalar::int(3), Scalar::int(4)]).unwrap();
        // q(w) = 9 − 16
        assert_eq!(&w * &w, s(&mixed, 7));
    }

    #[test]
    fn grade_involution_examples() {
        let q = eucl(3);
        assert_eq!(e(&q, &[1]).grade_involution(), -&e(&q, &[1]));
        let x = &s(&q, 1) + &e(&q, &[1, 2]);
        assert_eq!(x.grade_involution(), x);
        let y = &e(&q, &[1]) + &e(&q, &[1, 2, 3]);
        assert_eq!(y.grade_involution(), -&y);
    }

    #[test]
    fn reversal_examples() {
        let q = eucl(3);
        assert_eq!(e(&q, &[1, 2]).reversal(), -&e(&q, &[1, 2]));
        assert_eq!(&e(&q, &[2]) * &e(&q, &[1]), -&e(&q, &[1, 2]));
        assert_eq!(e(&q, &[2]).reversal(), e(&q, &[2]));
        let e321 = &(&e(&q, &[3]) * &e(&q, &[2])) * &e(&q, &[1]);
        assert_eq!(e(&q, &[1, 2, 3]).reversal(), e321);
        assert_eq!(e321, -&e(&q, &[1, 2, 3]));
    }

    #[test]
    fn grade_decompose_examples() {
        let q = eucl(3);
        let x = &s(&q, 1) + &e(&q, &[1]);
        assert_eq!(x.grade_decompose(), (s(&q, 1), e(&q, &[1])));
        let y = &e(&q, &[1, 2]) + &e(&q, &[3]);
        assert_eq!(y.grade_decompose(), (e(&q, &[1, 2]), e(&q, &[3])));
        let p = &e(&q, &[1]) * &e(&q, &[2]);
        assert_eq!(p.grade_decompose(), (e(&q, &[1, 2]), Multivector::zero(&q)));
    }

    #[test]
    fn embed_lower_examples() {
        let q1 = eucl(1);
        let q2 = eucl(2);
        assert_eq!(e(&q1, &[1]).embed_lower(&q2).unwrap(), e(&q2, &[1, 2]));
        assert_eq!(s(&q1, 1).embed_lower(&q2).unwrap(), s(&q2, 1));
        let q3 = eucl(3);
        let img = e(&q2, &[1, 2]).embed_lower(&q3).unwrap();
        let oracle = &(&e(&q3, &[1, 3]) * &e(&q3, &[2, 3])) * &s(&q3, 1);
        assert_eq!(img, oracle);
        assert_eq!(img, e(&q3, &[1, 2]));
    }

    #[test]
    fn embed_lower_rejects_bad_targets() {
        let q1 = eucl(1);
        assert!(e(&q1, &[1]).embed_lower(&eucl(3)).is_err());
        let bad = QuadraticForm::new(vec![1, -1]).unwrap();
        assert!(e(&q1, &[1]).embed_lower(&bad).is_err());
    }

    #[test]
    fn form_mismatch() {
        assert_eq!(
            e(&eucl(1), &[1]).multiply(&e(&eucl(2), &[1])),
            Err(Error::FormMismatch)
        );
    }

    #[test]
    fn general_inverse() {
        let q = eucl(2);
        // 1 + e₁ + e₁₂ is not a versor; its inverse needs the linear solve.
        let x = &(&s(&q, 1) + &e(&q, &[1])) + &e(&q, &[1, 2]);
        let inv = x.inverse().unwrap();
        assert_eq!(&x * &inv, s(&q, 1));
        assert_eq!(&inv * &x, s(&q, 1));
        // (i·e₁₂)² = 1, so (1 + i·e₁₂)(1 − i·e₁₂) = 0.
        let zero_divisor =
            &s(&q, 1) + &Multivector::blade(&q, Blade::from_mask(0b11), Scalar::i()).unwrap();
        assert_eq!(zero_divisor.inverse(), Err(Error::NotInvertible));
    }

    #[test]
    fn json_round_trip() {
        let q = QuadraticForm::new(vec![1, -1, 1]).unwrap();
        let x = &Multivector::blade(&q, Blade::from_mask(0b101), Scalar::ratio(-3, 4)).unwrap()
            + &Multivector::scalar(&q, Scalar::gaussian(1, 2));
        let text = serde_json::to_string(&x).unwrap();
        assert_eq!(
            text,
            r#"{"dim":3,"signs":[1,-1,1],"terms":[{"blade":[],"re":"1","im":"2"},{"blade":[1,3],"re":"-3/4","im":"0"}]}"#
        );
        let back: Multivector = serde_json::from_str(&text).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn json_rejects_malformed() {
        assert!(serde_json::from_str::<Multivector>(r#"{"dim":2,"signs":[1],"terms":[]}"#).is_err());
        assert!(serde_json::from_str::<Multivector>(
            r#"{"dim":1,"signs":[1],"terms":[{"blade":[2],"re":"1","im":"0"}]}"#
        )
        .is_err());
    }
}
