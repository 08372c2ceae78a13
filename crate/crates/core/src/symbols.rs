//! Principal symbols, ellipticity, clutching classes and the ABS bookkeeping.
//!
//! Symbols follow `σ(P)(ξ) = Σ_{|α|=k} a_α (iξ)^α`. With this convention
//! `−Σ∂ᵢ²` has symbol `|ξ|²` and `Σγᵢ∂ᵢ` has symbol `i·cℓ(ξ)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::ExactMatrix;
use crate::scalar::{Coefficient, Scalar};
use crate::spinor::{graded_irreps, spinor_module, CliffordModule, GradedModule, IrrepLabel};

/// A constant-coefficient differential operator `Σ a_α ∂^α`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OperatorSpec {
    base_dim: usize,
    order: usize,
    terms: Vec<(Vec<usize>, ExactMatrix)>,
}

impl OperatorSpec {
    pub fn new(base_dim: usize, order: usize, terms: Vec<(Vec<usize>, ExactMatrix)>) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::InvalidOperator("no terms".into()));
        };
        let shape = (first.rows(), first.cols());
        for (alpha, a) in &terms {
            if alpha.len() != base_dim {
                return Err(Error::InvalidOperator(format!(
                    "multi-index {alpha:?} has length {} for base dimension {base_dim}",
                    alpha.len()
                )));
            }
            if alpha.iter().sum::<usize>() > order {
                return Err(Error::InvalidOperator(format!("multi-index {alpha:?} exceeds order {order}")));
            }
            if (a.rows(), a.cols()) != shape {
                return Err(Error::InvalidOperator("coefficient shapes differ".into()));
            }
        }
        Ok(OperatorSpec { base_dim, order, terms })
    }

    /// `Δ = −Σ ∂ᵢ²`.
    pub fn laplacian(n: usize) -> Result<Self> {
        let terms = (0..n)
            .map(|i| (unit_index(n, i, 2), ExactMatrix::identity(1).scale(&Scalar::int(-1))))
            .collect();
        Self::new(n, 2, terms)
    }

    /// `∂_t² − Σ ∂_{xᵢ}²` with `t` the first coordinate.
    pub fn dalembertian(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidOperator("needs a time and a space coordinate".into()));
        }
        let terms = (0..n)
            .map(|i| {
                let sign = if i == 0 { 1 } else { -1 };
                (unit_index(n, i, 2), ExactMatrix::identity(1).scale(&Scalar::int(sign)))
            })
            .collect();
        Self::new(n, 2, terms)
    }

    /// `D = Σ γᵢ ∂ᵢ` for the generators of `module`.
    pub fn dirac(module: &CliffordModule) -> Result<Self> {
        let n = module.clifford_dim();
        let terms = module
            .generators()
            .iter()
            .enumerate()
            .map(|(i, g)| (unit_index(n, i, 1), g.clone()))
            .collect();
        Self::new(n, 1, terms)
    }

    /// The Dirac operator on the standard spinor module of `Cl_n`.
    pub fn standard_dirac(n: usize) -> Result<Self> {
        Self::dirac(spinor_module(n)?.ungraded())
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> &[(Vec<usize>, ExactMatrix)] {
        &self.terms
    }
}

fn unit_index(n: usize, i: usize, power: usize) -> Vec<usize> {
    let mut alpha = vec![0; n];
    alpha[i] = power;
    alpha
}

/// The homogeneous top-order part of an operator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymbolPolynomial {
    base_dim: usize,
    order: usize,
    rows: usize,
    cols: usize,
    #[serde(serialize_with = "terms_as_list")]
    terms: BTreeMap<Vec<usize>, ExactMatrix>,
}

/// JSON object keys must be strings, so terms go out as `[α, a_α]` pairs.
fn terms_as_list<S: serde::Serializer>(
    terms: &BTreeMap<Vec<usize>, ExactMatrix>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(terms.iter())
}

/// Keeps the terms with `|α|` equal to the order.
pub fn principal_symbol(op: &OperatorSpec) -> Result<SymbolPolynomial> {
    let (rows, cols) = (op.terms[0].1.rows(), op.terms[0].1.cols());
    let mut terms: BTreeMap<Vec<usize>, ExactMatrix> = BTreeMap::new();
    for (alpha, a) in &op.terms {
        if alpha.iter().sum::<usize>() != op.order {
            continue;
        }
        let entry = terms
            .entry(alpha.clone())
            .or_insert_with(|| ExactMatrix::zeros(rows, cols));
        *entry = entry.try_add(a)?;
    }
    terms.retain(|_, a| !a.is_zero());
    if terms.is_empty() {
        return Err(Error::InvalidOperator(format!("no non-zero terms of order {}", op.order)));
    }
    Ok(SymbolPolynomial {
        base_dim: op.base_dim,
        order: op.order,
        rows,
        cols,
        terms,
    })
}

impl SymbolPolynomial {
    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, ExactMatrix> {
        &self.terms
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.base_dim {
            return Err(Error::DimensionMismatch(format!(
                "covector of length {n} for base dimension {}",
                self.base_dim
            )));
        }
        Ok(())
    }

    /// Exact `σ(ξ)`.
    pub fn evaluate(&self, xi: &[Scalar]) -> Result<ExactMatrix> {
        self.check_len(xi.len())?;
        let phase = Scalar::i_pow(self.order as i64);
        let mut out = ExactMatrix::zeros(self.rows, self.cols);
        for (alpha, a) in &self.terms {
            let mut monomial = phase.clone();
            for (x, &p) in xi.iter().zip(alpha) {
                for _ in 0..p {
                    monomial = &monomial * x;
                }
            }
            if !monomial.is_zero() {
                out = out.try_add(&a.scale(&monomial))?;
            }
        }
        Ok(out)
    }

    /// Floating `σ(ξ)`.
    pub fn evaluate_f64(&self, xi: &[f64]) -> Result<DMatrix<Complex64>> {
        self.check_len(xi.len())?;
        let phase = Scalar::i_pow(self.order as i64).to_complex();
        let mut out = DMatrix::zeros(self.rows, self.cols);
        for (alpha, a) in &self.terms {
            let monomial: f64 = xi.iter().zip(alpha).map(|(x, &p)| x.powi(p as i32)).product();
            if monomial != 0.0 {
                out += a.to_complex() * (phase * monomial);
            }
        }
        Ok(out)
    }
}

/// Result of an ellipticity check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ellipticity {
    pub elliptic: bool,
    /// A unit direction where the symbol is singular.
    pub witness: Option<Vec<f64>>,
    /// Whether the witness was confirmed in exact arithmetic.
    pub witness_exact: bool,
    pub samples: usize,
}

/// Sphere sampling for [`is_elliptic`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Sampling {
    /// Number of low-discrepancy points; `None` means `4^dim`.
    pub points: Option<usize>,
}

/// Relative singular-value cutoff below which a sampled symbol counts as
/// singular.
const SINGULAR_REL_TOL: f64 = 1e-10;
const MAX_SAMPLES: usize = 1 << 16;
const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as f64;
    let mut inv = 1.0 / b;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base as u64) as f64 * inv;
        i /= base as u64;
        inv /= b;
    }
    out
}

/// Halton points of `[−1, 1]^n` pushed radially onto the unit sphere.
fn halton_sphere(n: usize, count: usize) -> Vec<Vec<f64>> {
    (1..)
        .map(|i| {
            (0..n)
                .map(|d| 2.0 * radical_inverse(i as u64, PRIMES[d % PRIMES.len()]) - 1.0)
                .collect::<Vec<f64>>()
        })
        .filter_map(|p| {
            let r = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            (r > 1e-3).then(|| p.iter().map(|x| x / r).collect())
        })
        .take(count)
        .collect()
}

fn normalize(v: &[f64]) -> Vec<f64> {
    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / r).collect()
}

/// Whether `σ(ξ)` is numerically singular relative to `scale`, a bound for
/// the symbol on the unit sphere.
fn numerically_singular(m: &DMatrix<Complex64>, scale: f64) -> bool {
    if m.nrows() != m.ncols() {
        return true;
    }
    m.clone().singular_values().min() <= SINGULAR_REL_TOL * scale
}

/// Checks invertibility of `σ(ξ)` on the unit sphere.
///
/// Exact rational directions (axes and `eᵢ ± eⱼ`) come first so that
/// algebraic cones through them yield exact witnesses. Then a low-discrepancy
/// sample is tested numerically; when the determinant is real along the
/// sample, a sign change between two points is bisected to a zero.
pub fn is_elliptic(sym: &SymbolPolynomial, sampling: Sampling) -> Result<Ellipticity> {
    let n = sym.base_dim;
    if n == 0 {
        return Err(Error::InvalidOperator("base dimension 0".into()));
    }
    let mut exact_dirs: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| (i == j) as i64).collect())
        .collect();
    for i in 0..n {
        for j in i + 1..n {
            for s in [1, -1] {
                let mut v = vec![0; n];
                v[i] = 1;
                v[j] = s;
                exact_dirs.push(v);
            }
        }
    }
    let square = sym.rows == sym.cols;
    let scale: f64 = sym.terms.values().map(|a| a.to_complex().norm()).sum();
    for dir in &exact_dirs {
        let xi: Vec<Scalar> = dir.iter().map(|&x| Scalar::int(x)).collect();
        let value = sym.evaluate(&xi)?;
        if !square || value.determinant()?.is_zero() {
            return Ok(Ellipticity {
                elliptic: false,
                witness: Some(normalize(&dir.iter().map(|&x| x as f64).collect::<Vec<_>>())),
                witness_exact: true,
                samples: exact_dirs.len(),
            });
        }
    }

    let count = sampling
        .points
        .unwrap_or_else(|| 4usize.saturating_pow(n as u32))
        .min(MAX_SAMPLES);
    let points = halton_sphere(n, count);
    let evaluated: Vec<DMatrix<Complex64>> = points
        .par_iter()
        .map(|p| sym.evaluate_f64(p))
        .collect::<Result<_>>()?;
    let samples = exact_dirs.len() + points.len();
    let singular = points
        .par_iter()
        .zip(&evaluated)
        .find_first(|(_, m)| numerically_singular(m, scale))
        .map(|(p, _)| p.clone());
    if let Some(w) = singular {
        return Ok(Ellipticity {
            elliptic: false,
            witness: Some(w),
            witness_exact: false,
            samples,
        });
    }

    let dets: Vec<Complex64> = evaluated.iter().map(|m| m.determinant()).collect();
    let real = dets.iter().all(|d| d.im.abs() <= 1e-9 * d.norm());
    if real {
        if let Some(j) = (1..dets.len()).find(|&j| dets[j].re.signum() != dets[0].re.signum()) {
            let w = bisect_zero(sym, &points[0], &points[j], dets[0].re.signum())?;
            let m = sym.evaluate_f64(&w)?;
            if numerically_singular(&m, scale) {
                return Ok(Ellipticity {
                    elliptic: false,
                    witness: Some(w),
                    witness_exact: false,
                    samples,
                });
            }
            return Err(Error::NonConvergence(
                "determinant changes sign without a located zero".into(),
            ));
        }
    }
    Ok(Ellipticity {
        elliptic: true,
        witness: None,
        witness_exact: false,
        samples,
    })
}

/// Bisects the real determinant along the chord from `a` to `b` (projected to
/// the sphere), where `sign_a` is the sign at `a`.
fn bisect_zero(sym: &SymbolPolynomial, a: &[f64], b: &[f64], sign_a: f64) -> Result<Vec<f64>> {
    let point = |t: f64| -> Vec<f64> {
        normalize(&a.iter().zip(b).map(|(x, y)| (1.0 - t) * x + t * y).collect::<Vec<_>>())
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let d = sym.evaluate_f64(&point(mid))?.determinant().re;
        if d == 0.0 {
            return Ok(point(mid));
        }
        if d.signum() == sign_a {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(point(0.5 * (lo + hi)))
}

/// A clutching class `[E, F, σ]` over `S^{k−1}` with affine clutching
/// `σ(v) = C₀ + Σ vᵢCᵢ` from `E` to `F`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymbolClass {
    k: usize,
    rank_e: usize,
    rank_f: usize,
    constant: ExactMatrix,
    linear: Vec<ExactMatrix>,
}

impl SymbolClass {
    pub fn new(constant: ExactMatrix, linear: Vec<ExactMatrix>) -> Result<Self> {
        let shape = (constant.rows(), constant.cols());
        if linear.iter().any(|m| (m.rows(), m.cols()) != shape) {
            return Err(Error::DimensionMismatch("clutching coefficients differ in shape".into()));
        }
        Ok(SymbolClass {
            k: linear.len(),
            rank_e: shape.1,
            rank_f: shape.0,
            constant,
            linear,
        })
    }

    /// The constant clutching `σ(v) = m` over `S^{k−1}`.
    pub fn constant(k: usize, m: ExactMatrix) -> Self {
        let zero = ExactMatrix::zeros(m.rows(), m.cols());
        SymbolClass {
            k,
            rank_e: m.cols(),
            rank_f: m.rows(),
            linear: vec![zero; k],
            constant: m,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ranks(&self) -> (usize, usize) {
        (self.rank_e, self.rank_f)
    }

    pub fn evaluate(&self, v: &[f64]) -> Result<DMatrix<Complex64>> {
        if v.len() != self.k {
            return Err(Error::DimensionMismatch(format!("point of length {} on S^{}", v.len(), self.k as i64 - 1)));
        }
        let mut out = self.constant.to_complex();
        for (x, m) in v.iter().zip(&self.linear) {
            if *x != 0.0 {
                out += m.to_complex() * Complex64::new(*x, 0.0);
            }
        }
        Ok(out)
    }

    pub fn evaluate_exact(&self, v: &[Scalar]) -> Result<ExactMatrix> {
        if v.len() != self.k {
            return Err(Error::DimensionMismatch("point dimension".into()));
        }
        v.iter()
            .zip(&self.linear)
            .try_fold(self.constant.clone(), |acc, (x, m)| acc.try_add(&m.scale(x)))
    }

    /// Block-diagonal sum of clutchings.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.k != other.k {
            return Err(Error::DimensionMismatch("classes over different spheres".into()));
        }
        SymbolClass::new(
            self.constant.direct_sum(&other.constant),
            self.linear
                .iter()
                .zip(&other.linear)
                .map(|(a, b)| a.direct_sum(b))
                .collect(),
        )
    }
}

/// `[W⁰, W¹, cℓ(·)]`: Clifford multiplication from the `ε = +1` part to the
/// `ε = −1` part, written in bases of the two eigenspaces.
pub fn abs_class(w: &GradedModule) -> Result<SymbolClass> {
    let even = w.eigenspace_basis(true);
    let odd = w.eigenspace_basis(false);
    let linear = w
        .generators()
        .iter()
        .map(|g| odd.solve_left(&g.try_mul(&even)?))
        .collect::<Result<Vec<_>>>()?;
    SymbolClass::new(ExactMatrix::zeros(odd.cols(), even.cols()), linear)
}

/// Winding of `det σ` around `S¹`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Winding {
    pub k: usize,
    pub winding: i64,
    pub samples: usize,
    /// Distance between the phase sum (in turns) and the reported integer.
    #[serde(skip)]
    pub deviation: f64,
}

pub const WINDING_GRID: usize = 4096;
pub const WINDING_TOL: f64 = 1e-6;
const WINDING_MAX_GRID: usize = 1 << 20;

/// Sums the phase increments of `det σ(cos θ, sin θ)` over a uniform grid,
/// doubling the grid while an increment exceeds a quarter turn or the total is
/// not within [`WINDING_TOL`] of an integer.
pub fn winding_number(sc: &SymbolClass) -> Result<Winding> {
    if sc.k != 2 {
        return Err(Error::DimensionMismatch(format!("winding needs k = 2, got {}", sc.k)));
    }
    if sc.rank_e != sc.rank_f {
        return Err(Error::SingularClutching(format!(
            "ranks {} and {} differ",
            sc.rank_e, sc.rank_f
        )));
    }
    let scale = std::iter::once(&sc.constant)
        .chain(&sc.linear)
        .flat_map(|m| m.entries().iter().map(|x| x.magnitude()))
        .fold(0.0, f64::max)
        .max(1.0);
    let floor = 1e-12 * scale.powi(sc.rank_e as i32);
    let mut grid = WINDING_GRID;
    loop {
        let dets: Vec<Complex64> = (0..grid)
            .into_par_iter()
            .map(|j| {
                let t = 2.0 * PI * j as f64 / grid as f64;
                let d = sc.evaluate(&[t.cos(), t.sin()])?.determinant();
                if d.norm() <= floor {
                    return Err(Error::SingularClutching(format!("θ = {t}")));
                }
                Ok(d)
            })
            .collect::<Result<_>>()?;
        let increments: Vec<f64> = (0..grid).map(|j| (dets[(j + 1) % grid] / dets[j]).arg()).collect();
        let turns = increments.iter().sum::<f64>() / (2.0 * PI);
        let nearest = turns.round();
        let deviation = (turns - nearest).abs();
        let coarse = increments.iter().any(|d| d.abs() > PI / 2.0);
        if !coarse && deviation < WINDING_TOL {
            return Ok(Winding {
                k: 2,
                winding: nearest as i64,
                samples: grid,
                deviation,
            });
        }
        if grid >= WINDING_MAX_GRID {
            return Err(Error::NonConvergence(format!(
                "winding sum {turns} at {grid} points"
            )));
        }
        grid *= 2;
    }
}

/// `M̂_k / i*M̂_{k+1}` as an abstract abelian group.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AbsGroup {
    pub k: usize,
    /// `"Z"`, `"0"`, or a general form such as `"Z^2+Z/2"`.
    pub group: String,
    pub free_rank: usize,
    pub torsion: Vec<i64>,
    /// Label of an irreducible graded module whose class generates the free
    /// part, when the free part is `ℤ`.
    pub generator_label: Option<IrrepLabel>,
    #[serde(skip)]
    pub generator: Option<GradedModule>,
}

fn group_name(free_rank: usize, torsion: &[i64]) -> String {
    let mut parts = Vec::new();
    match free_rank {
        0 => {}
        1 => parts.push("Z".to_string()),
        r => parts.push(format!("Z^{r}")),
    }
    parts.extend(torsion.iter().map(|d| format!("Z/{d}")));
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join("+")
    }
}

/// Smith normal form of an integer matrix: returns the diagonal and the
/// unimodular column transform `V` with `U·A·V = D`.
pub fn smith_normal_form(a: &[Vec<i64>], cols: usize) -> (Vec<i64>, Vec<Vec<i64>>) {
    let rows = a.len();
    let mut m: Vec<Vec<i64>> = a.to_vec();
    let mut v: Vec<Vec<i64>> = (0..cols).map(|i| (0..cols).map(|j| (i == j) as i64).collect()).collect();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let pivot = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| m[i][j] != 0)
            .min_by_key(|&(i, j)| m[i][j].abs());
        let Some((pi, pj)) = pivot else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        for row in v.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = true;
        for i in t + 1..rows {
            let q = m[i][t] / m[t][t];
            if q != 0 {
                for j in 0..cols {
                    m[i][j] -= q * m[t][j];
                }
            }
            clean &= m[i][t] == 0;
        }
        for j in t + 1..cols {
            let q = m[t][j] / m[t][t];
            if q != 0 {
                for row in m.iter_mut() {
                    row[j] -= q * row[t];
                }
                for row in v.iter_mut() {
                    row[j] -= q * row[t];
                }
            }
            clean &= m[t][j] == 0;
        }
        if !clean {
            continue;
        }
        // Divisibility of the remaining block by the pivot.
        let p = m[t][t];
        if let Some(i) = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| m[i][j] % p != 0)) {
            for j in 0..cols {
                m[t][j] += m[i][j];
            }
            continue;
        }
        if p < 0 {
            for j in 0..cols {
                m[t][j] = -m[t][j];
            }
        }
        diag.push(m[t][t]);
        t += 1;
    }
    (diag, v)
}

/// Computes `M̂_k / i*M̂_{k+1}` from the irreducible graded modules: the
/// restrictions of the `Cl_{k+1}` irreps span a sublattice of the free group on
/// the `Cl_k` irreps, and the quotient is read off a Smith normal form.
pub fn abs_group(k: usize) -> Result<AbsGroup> {
    let irreps = graded_irreps(k)?;
    let labels: Vec<IrrepLabel> = irreps.iter().map(|(l, _)| *l).collect();
    let images: Vec<Vec<i64>> = graded_irreps(k + 1)?
        .iter()
        .map(|(_, m)| {
            let d = m.restrict()?.decompose()?;
            let total: usize = d.multiplicities.values().sum();
            let row: Vec<i64> = labels.iter().map(|l| d.multiplicity(*l) as i64).collect();
            if row.iter().sum::<i64>() as usize != total {
                return Err(Error::VerificationFailed("restriction left the irrep list".into()));
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let r = labels.len();
    let (diag, v) = smith_normal_form(&images, r);
    let torsion: Vec<i64> = diag.iter().copied().filter(|&d| d > 1).collect();
    let free_rank = r - diag.len();
    let (generator_label, generator) = if free_rank == 1 {
        let col = diag.len();
        let found = (0..r).find(|&i| v[i][col].abs() == 1);
        match found {
            Some(i) => (Some(labels[i]), Some(irreps[i].1.clone())),
            None => (None, None),
        }
    } else {
        (None, None)
    };
    Ok(AbsGroup {
        k,
        group: group_name(free_rank, &torsion),
        free_rank,
        torsion,
        generator_label,
        generator,
    })
}

/// `Λ*ℂⁿ` graded by parity, as a `Cl_{2n}` module: with real coordinates
/// `(x₁, y₁, …, xₙ, yₙ)`, `x_j` acts by `e_j∧ − ι_{e_j}` and `y_j` by
/// `i(e_j∧ + ι_{e_j})`, so `v` acts by `v∧ − v*⌟`.
pub fn exterior_module(n: usize) -> Result<GradedModule> {
    let dim = 1usize << n;
    let wedge = |j: usize| {
        ExactMatrix::from_fn(dim, dim, |row, col| {
            let (r, c) = (row as u32, col as u32);
            if c & (1 << j) == 0 && r == c | (1 << j) {
                let below = (c & ((1 << j) - 1)).count_ones();
                Scalar::int(if below.is_multiple_of(2) { 1 } else { -1 })
            } else {
                Scalar::zero()
            }
        })
    };
    let mut generators = Vec::with_capacity(2 * n);
    for j in 0..n {
        let w = wedge(j);
        let contract = w.adjoint();
        generators.push(w.try_sub(&contract)?);
        generators.push(w.try_add(&contract)?.scale(&Scalar::i()));
    }
    let grading = ExactMatrix::diagonal(
        &(0..dim)
            .map(|s| Scalar::int(if (s as u32).count_ones().is_multiple_of(2) { 1 } else { -1 }))
            .collect::<Vec<_>>(),
    );
    GradedModule::new(generators, grading)
}

/// The Thom class `[Λ^even ℂⁿ, Λ^odd ℂⁿ, v∧ − v*⌟]` on a single fibre.
pub fn thom_class_complex(n: usize) -> Result<SymbolClass> {
    abs_class(&exterior_module(n)?)
}

/// `‖σ(v)⁻¹‖·|v|`, which is 1 for Clifford clutchings.
pub fn inverse_norm_ratio(sc: &SymbolClass, v: &[f64]) -> Result<f64> {
    let m = sc.evaluate(v)?;
    let inv = m
        .try_inverse()
        .ok_or_else(|| Error::SingularClutching(format!("{v:?}")))?;
    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(inv.singular_values().max() * r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s2() -> GradedModule {
        spinor_module(2).unwrap()
    }

    #[test]
    fn symbol_conventions() {
        let lap = principal_symbol(&OperatorSpec::laplacian(3).unwrap()).unwrap();
        let xi = [Scalar::int(1), Scalar::int(2), Scalar::int(-2)];
        assert_eq!(lap.evaluate(&xi).unwrap(), ExactMatrix::identity(1).scale(&Scalar::int(9)));

        let wave = principal_symbol(&OperatorSpec::dalembertian(3).unwrap()).unwrap();
        // Symbol −τ² + |ξ|², the negative of τ² − |ξ|².
        let p = [Scalar::int(3), Scalar::int(1), Scalar::int(1)];
        assert_eq!(wave.evaluate(&p).unwrap(), ExactMatrix::identity(1).scale(&Scalar::int(-7)));

        let module = s2();
        let dirac = principal_symbol(&OperatorSpec::dirac(module.ungraded()).unwrap()).unwrap();
        let v = [Scalar::int(2), Scalar::ratio(-1, 3)];
        let expect = module.ungraded().clifford_matrix(&v).unwrap().scale(&Scalar::i());
        assert_eq!(dirac.evaluate(&v).unwrap(), expect);
        let sq = &expect * &expect;
        let n2 = &(&v[0] * &v[0]) + &(&v[1] * &v[1]);
        assert_eq!(sq, ExactMatrix::identity(2).scale(&n2));
    }

    #[test]
    fn lower_order_terms_are_dropped() {
        let one = ExactMatrix::identity(1);
        let op = OperatorSpec::new(2, 2, vec![(vec![1, 1], one.clone()), (vec![1, 0], one.clone()), (vec![0, 0], one)]).unwrap();
        let s = principal_symbol(&op).unwrap();
        assert_eq!(s.terms().len(), 1);
        assert!(OperatorSpec::new(2, 1, vec![]).is_err());
        assert!(OperatorSpec::new(2, 1, vec![(vec![2, 0], ExactMatrix::identity(1))]).is_err());
    }

    #[test]
    fn ellipticity_examples() {
        let lap = principal_symbol(&OperatorSpec::laplacian(3).unwrap()).unwrap();
        assert!(is_elliptic(&lap, Sampling::default()).unwrap().elliptic);
        let wave = principal_symbol(&OperatorSpec::dalembertian(2).unwrap()).unwrap();
        let e = is_elliptic(&wave, Sampling::default()).unwrap();
        assert!(!e.elliptic && e.witness_exact);
        let w = e.witness.unwrap();
        assert!((w[0].abs() - w[1].abs()).abs() < 1e-12);
        let dirac = principal_symbol(&OperatorSpec::standard_dirac(4).unwrap()).unwrap();
        assert!(is_elliptic(&dirac, Sampling::default()).unwrap().elliptic);
    }

    #[test]
    fn irrational_cone_found_by_bisection() {
        // τ² − 2|ξ|² vanishes only off the rational test directions.
        let one = ExactMatrix::identity(1);
        let op = OperatorSpec::new(
            2,
            2,
            vec![(vec![2, 0], one.scale(&Scalar::int(-1))), (vec![0, 2], one.scale(&Scalar::int(2)))],
        )
        .unwrap();
        let e = is_elliptic(&principal_symbol(&op).unwrap(), Sampling::default()).unwrap();
        assert!(!e.elliptic && !e.witness_exact);
        let w = e.witness.unwrap();
        assert!((w[0] * w[0] - 2.0 * w[1] * w[1]).abs() < 1e-9);
    }

    #[test]
    fn abs_class_of_s2() {
        let c = abs_class(&s2()).unwrap();
        assert_eq!(c.ranks(), (1, 1));
        let w = winding_number(&c).unwrap();
        assert_eq!(w.winding, 1);
        assert!(w.deviation < WINDING_TOL);
        let doubled = abs_class(&s2().direct_sum(&s2()).unwrap()).unwrap();
        assert_eq!(winding_number(&doubled).unwrap().winding, 2);
        assert_eq!(winding_number(&abs_class(&s2().flip_grading()).unwrap()).unwrap().winding, -1);
        let empty = abs_class(&GradedModule::zero(2)).unwrap();
        assert_eq!(empty.ranks(), (0, 0));
        assert_eq!(winding_number(&empty).unwrap().winding, 0);
        let constant = SymbolClass::constant(2, ExactMatrix::from_gaussian(&[&[(2, 1)]]));
        assert_eq!(winding_number(&constant).unwrap().winding, 0);
    }

    #[test]
    fn singular_clutching_is_an_error() {
        let c = SymbolClass::new(
            ExactMatrix::zeros(1, 1),
            vec![ExactMatrix::identity(1), ExactMatrix::zeros(1, 1)],
        )
        .unwrap();
        assert!(matches!(winding_number(&c), Err(Error::SingularClutching(_))));
    }

    #[test]
    fn thom_class_matches_spinor_class() {
        let t = thom_class_complex(1).unwrap();
        assert_eq!(t.ranks(), (1, 1));
        let wt = winding_number(&t).unwrap().winding;
        let ws = winding_number(&abs_class(&s2()).unwrap()).unwrap().winding;
        assert_eq!(wt, 1);
        assert_eq!(wt.abs(), ws.abs());
        for n in 1..=3 {
            let m = exterior_module(n).unwrap();
            assert_eq!(m.graded_dims(), (1 << (n - 1), 1 << (n - 1)));
        }
    }

    #[test]
    fn inverse_norm_is_reciprocal_length() {
        for module in [s2(), spinor_module(4).unwrap(), exterior_module(2).unwrap()] {
            let c = abs_class(&module).unwrap();
            let v: Vec<f64> = (0..c.k()).map(|i| 0.7 - 0.4 * i as f64).collect();
            assert!((inverse_norm_ratio(&c, &v).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn periodicity() {
        for k in 0..=6 {
            let g = abs_group(k).unwrap();
            assert_eq!(g.group, if k % 2 == 0 { "Z" } else { "0" }, "k = {k}");
            assert_eq!(g.generator.is_some(), k % 2 == 0);
        }
        let g4 = abs_group(4).unwrap();
        assert_eq!(g4.generator.unwrap().dim(), 4);
    }

    #[test]
    fn smith_form_examples() {
        let (d, _) = smith_normal_form(&[vec![2, 4], vec![6, 8]], 2);
        assert_eq!(d, vec![2, 4]);
        let (d, v) = smith_normal_form(&[vec![1, 1]], 2);
        assert_eq!(d, vec![1]);
        assert_eq!(v[0][1].abs() + v[1][1].abs(), 2);
        let (d, _) = smith_normal_form(&[vec![0, 0]], 2);
        assert!(d.is_empty());
    }
}
