//! Complex Clifford modules as explicit matrices.
//!
//! Generators act by matrices `γᵢ` with `γᵢγⱼ + γⱼγᵢ = −2δᵢⱼ·I`. Graded
//! modules carry an involution `ε` anticommuting with every `γᵢ`. All entries
//! are exact Gaussian rationals; the standard modules only use `0, ±1, ±i`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ExactMatrix;
use crate::scalar::{Coefficient, Scalar};

/// Largest Clifford dimension for which the standard modules are built
/// (spinor dimension `2⁶ = 64`).
pub const MAX_SPINOR_K: usize = 12;

/// Labels of the complex irreducible modules.
///
/// Ungraded `Cl_k`: one irrep for even `k`, two for odd `k`, told apart by the
/// represented volume element (`plus-odd` has `e₁⋯e_k = +i^⌈k/2⌉`). Graded
/// `Cl_k` irreps carry the label of the ungraded `Cl_{k−1}` irrep they
/// correspond to; for `k = 0` the label is the sign of `ε` on `ℂ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IrrepLabel {
    UniqueEven,
    PlusOdd,
    MinusOdd,
}

impl std::fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            IrrepLabel::UniqueEven => "unique-even",
            IrrepLabel::PlusOdd => "plus-odd",
            IrrepLabel::MinusOdd => "minus-odd",
        })
    }
}

/// Irrep multiplicities; labels with multiplicity zero are not stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleDecomposition {
    pub multiplicities: BTreeMap<IrrepLabel, usize>,
}

impl ModuleDecomposition {
    fn from_counts(counts: &[(IrrepLabel, usize)]) -> Self {
        ModuleDecomposition {
            multiplicities: counts.iter().filter(|(_, m)| *m > 0).copied().collect(),
        }
    }

    pub fn multiplicity(&self, label: IrrepLabel) -> usize {
        self.multiplicities.get(&label).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.multiplicities.is_empty()
    }
}

fn check_square(m: &ExactMatrix, dim: usize, what: &str) -> Result<()> {
    if m.rows() != dim || m.cols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{what} is {}x{}, module dimension is {dim}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

fn check_relations(dim: usize, gens: &[ExactMatrix]) -> Result<()> {
    let minus_two = ExactMatrix::identity(dim).scale(&Scalar::int(-2));
    for (i, g) in gens.iter().enumerate() {
        check_square(g, dim, &format!("generator {}", i + 1))?;
    }
    for i in 0..gens.len() {
        for j in i..gens.len() {
            let ac = gens[i].anticommutator(&gens[j])?;
            let ok = if i == j { ac == minus_two } else { ac.is_zero() };
            if !ok {
                return Err(Error::RelationViolated(format!(
                    "generators {} and {}",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(())
}

fn divide_exact(value: i64, by: usize, what: &str) -> Result<usize> {
    if value < 0 || value % by as i64 != 0 {
        return Err(Error::VerificationFailed(format!(
            "{what}: {value} is not a non-negative multiple of {by}"
        )));
    }
    Ok((value / by as i64) as usize)
}

fn integer_trace(m: &ExactMatrix) -> Result<i64> {
    m.trace()
        .to_i64()
        .ok_or_else(|| Error::VerificationFailed(format!("trace {} is not an integer", m.trace())))
}

fn product(dim: usize, mats: &[ExactMatrix]) -> Result<ExactMatrix> {
    mats.iter()
        .try_fold(ExactMatrix::identity(dim), |acc, g| acc.try_mul(g))
}

/// An ungraded complex `Cl_k` module.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModuleData", into = "ModuleData")]
pub struct CliffordModule {
    dim: usize,
    generators: Vec<ExactMatrix>,
}

#[derive(Serialize, Deserialize)]
struct ModuleData {
    clifford_dim: usize,
    dim: usize,
    generator_actions: Vec<ExactMatrix>,
}

impl TryFrom<ModuleData> for CliffordModule {
    type Error = Error;
    fn try_from(d: ModuleData) -> Result<Self> {
        if d.generator_actions.len() != d.clifford_dim {
            return Err(Error::DimensionMismatch("clifford_dim vs generator count".into()));
        }
        CliffordModule::new(d.dim, d.generator_actions)
    }
}

impl From<CliffordModule> for ModuleData {
    fn from(m: CliffordModule) -> Self {
        ModuleData {
            clifford_dim: m.generators.len(),
            dim: m.dim,
            generator_actions: m.generators,
        }
    }
}

impl CliffordModule {
    /// Validates the Clifford relations.
    pub fn new(dim: usize, generators: Vec<ExactMatrix>) -> Result<Self> {
        check_relations(dim, &generators)?;
        Ok(CliffordModule { dim, generators })
    }

    pub fn zero(k: usize) -> Self {
        CliffordModule {
            dim: 0,
            generators: vec![ExactMatrix::zeros(0, 0); k],
        }
    }

    pub fn clifford_dim(&self) -> usize {
        self.generators.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[ExactMatrix] {
        &self.generators
    }

    /// `cℓ(v) = Σ vᵢγᵢ`.
    pub fn clifford_matrix(&self, v: &[Scalar]) -> Result<ExactMatrix> {
        if v.len() != self.clifford_dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for Cl_{}",
                v.len(),
                self.clifford_dim()
            )));
        }
        let mut out = ExactMatrix::zeros(self.dim, self.dim);
        for (c, g) in v.iter().zip(&self.generators) {
            if !c.is_zero() {
                out = out.try_add(&g.scale(c))?;
            }
        }
        Ok(out)
    }

    /// Floating `cℓ(v)·s`.
    pub fn act(&self, v: &[f64], s: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.clifford_dim() || s.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "vector {} / spinor {} for a Cl_{} module of dimension {}",
                v.len(),
                s.len(),
                self.clifford_dim(),
                self.dim
            )));
        }
        let mut out = vec![Complex64::zero(); self.dim];
        for (c, g) in v.iter().zip(&self.generators) {
            if *c == 0.0 {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                for (j, x) in s.iter().enumerate() {
                    let gij = g.get(i, j);
                    if !gij.is_zero() {
                        *o += gij.to_complex() * x * *c;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `γ₁⋯γ_k` (the identity for `k = 0`).
    pub fn volume_element(&self) -> Result<ExactMatrix> {
        product(self.dim, &self.generators)
    }

    /// Drops the last generator.
    pub fn restrict(&self) -> Result<Self> {
        if self.generators.is_empty() {
            return Err(Error::DimensionMismatch("cannot restrict a Cl_0 module".into()));
        }
        Ok(CliffordModule {
            dim: self.dim,
            generators: self.generators[..self.generators.len() - 1].to_vec(),
        })
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.clifford_dim() != other.clifford_dim() {
            return Err(Error::DimensionMismatch("modules over different algebras".into()));
        }
        Ok(CliffordModule {
            dim: self.dim + other.dim,
            generators: self
                .generators
                .iter()
                .zip(&other.generators)
                .map(|(a, b)| a.direct_sum(b))
                .collect(),
        })
    }

    /// The isomorphic module `P γᵢ P⁻¹`.
    pub fn conjugate(&self, p: &ExactMatrix) -> Result<Self> {
        check_square(p, self.dim, "change of basis")?;
        let inv = p.inverse()?;
        let generators = self
            .generators
            .iter()
            .map(|g| p.try_mul(g)?.try_mul(&inv))
            .collect::<Result<Vec<_>>>()?;
        Ok(CliffordModule { dim: self.dim, generators })
    }

    /// Multiplicities of the ungraded irreps.
    pub fn decompose(&self) -> Result<ModuleDecomposition> {
        let k = self.clifford_dim();
        if k.is_multiple_of(2) {
            let m = divide_exact(self.dim as i64, 1 << (k / 2), "module dimension")?;
            return Ok(ModuleDecomposition::from_counts(&[(IrrepLabel::UniqueEven, m)]));
        }
        let n = (k - 1) / 2;
        let central = self.volume_element()?.scale(&Scalar::i_pow(-(n as i64 + 1)));
        let t = integer_trace(&central)?;
        let d = self.dim as i64;
        let plus = divide_exact((d + t) / 2, 1 << n, "plus eigenspace")?;
        let minus = divide_exact((d - t) / 2, 1 << n, "minus eigenspace")?;
        if plus + minus != self.dim >> n || (d + t) % 2 != 0 {
            return Err(Error::VerificationFailed("volume element is not central".into()));
        }
        Ok(ModuleDecomposition::from_counts(&[
            (IrrepLabel::PlusOdd, plus),
            (IrrepLabel::MinusOdd, minus),
        ]))
    }

    /// The graded `Cl_{k+1}` module `N ⊕ N` with `ε = diag(I, −I)`,
    /// `γᵢ = [[0, ρᵢ], [ρᵢ, 0]]` and `γ_{k+1} = [[0, −I], [I, 0]]`.
    pub fn to_graded(&self) -> GradedModule {
        let d = self.dim;
        let id = ExactMatrix::identity(d);
        let off = |upper: &ExactMatrix, lower: &ExactMatrix| {
            ExactMatrix::from_fn(2 * d, 2 * d, |i, j| match (i < d, j < d) {
                (true, false) => upper.get(i, j - d).clone(),
                (false, true) => lower.get(i - d, j).clone(),
                _ => Scalar::zero(),
            })
        };
        let mut generators: Vec<ExactMatrix> = self.generators.iter().map(|g| off(g, g)).collect();
        generators.push(off(&-&id, &id));
        let grading = id.direct_sum(&(-&id));
        GradedModule {
            module: CliffordModule { dim: 2 * d, generators },
            grading,
        }
    }
}

/// A `ℤ₂`-graded complex `Cl_k` module: generators plus a grading `ε`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GradedData", into = "GradedData")]
pub struct GradedModule {
    module: CliffordModule,
    grading: ExactMatrix,
}

#[derive(Serialize, Deserialize)]
struct GradedData {
    clifford_dim: usize,
    dim: usize,
    generator_actions: Vec<ExactMatrix>,
    grading: ExactMatrix,
}

impl TryFrom<GradedData> for GradedModule {
    type Error = Error;
    fn try_from(d: GradedData) -> Result<Self> {
        if d.generator_actions.len() != d.clifford_dim || d.grading.rows() != d.dim {
            return Err(Error::DimensionMismatch("header fields disagree with matrices".into()));
        }
        GradedModule::new(d.generator_actions, d.grading)
    }
}

impl From<GradedModule> for GradedData {
    fn from(m: GradedModule) -> Self {
        GradedData {
            clifford_dim: m.module.generators.len(),
            dim: m.module.dim,
            generator_actions: m.module.generators,
            grading: m.grading,
        }
    }
}

impl GradedModule {
    /// Validates the relations, `ε² = I` and `γᵢε = −εγᵢ`.
    pub fn new(generators: Vec<ExactMatrix>, grading: ExactMatrix) -> Result<Self> {
        let dim = grading.rows();
        check_square(&grading, dim, "grading")?;
        let module = CliffordModule::new(dim, generators)?;
        if !grading.try_mul(&grading)?.is_identity() {
            return Err(Error::RelationViolated("grading does not square to I".into()));
        }
        for (i, g) in module.generators.iter().enumerate() {
            if !g.anticommutator(&grading)?.is_zero() {
                return Err(Error::RelationViolated(format!(
                    "generator {} does not anticommute with the grading",
                    i + 1
                )));
            }
        }
        Ok(GradedModule { module, grading })
    }

    pub fn zero(k: usize) -> Self {
        GradedModule {
            module: CliffordModule::zero(k),
            grading: ExactMatrix::zeros(0, 0),
        }
    }

    pub fn clifford_dim(&self) -> usize {
        self.module.clifford_dim()
    }

    pub fn dim(&self) -> usize {
        self.module.dim
    }

    pub fn generators(&self) -> &[ExactMatrix] {
        &self.module.generators
    }

    pub fn grading(&self) -> &ExactMatrix {
        &self.grading
    }

    /// The underlying module with the grading forgotten.
    pub fn ungraded(&self) -> &CliffordModule {
        &self.module
    }

    /// The same module with `ε ↦ −ε`.
    pub fn flip_grading(&self) -> Self {
        GradedModule {
            module: self.module.clone(),
            grading: -&self.grading,
        }
    }

    /// Basis of the `ε = +1` (even) or `ε = −1` (odd) subspace, as columns.
    pub fn eigenspace_basis(&self, even: bool) -> ExactMatrix {
        let id = ExactMatrix::identity(self.dim());
        let proj = if even { &id + &self.grading } else { &id - &self.grading };
        proj.column_space()
    }

    /// Dimensions of the even and odd parts.
    pub fn graded_dims(&self) -> (usize, usize) {
        let t = integer_trace(&self.grading).expect("ε has integer trace");
        let d = self.dim() as i64;
        (((d + t) / 2) as usize, ((d - t) / 2) as usize)
    }

    pub fn restrict(&self) -> Result<Self> {
        Ok(GradedModule {
            module: self.module.restrict()?,
            grading: self.grading.clone(),
        })
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        Ok(GradedModule {
            module: self.module.direct_sum(&other.module)?,
            grading: self.grading.direct_sum(&other.grading),
        })
    }

    pub fn conjugate(&self, p: &ExactMatrix) -> Result<Self> {
        let module = self.module.conjugate(p)?;
        let grading = p.try_mul(&self.grading)?.try_mul(&p.inverse()?)?;
        Ok(GradedModule { module, grading })
    }

    /// Multiplicities of the graded irreps.
    pub fn decompose(&self) -> Result<ModuleDecomposition> {
        let k = self.clifford_dim();
        let d = self.dim() as i64;
        if k % 2 == 1 {
            let m = divide_exact(d, 1 << k.div_ceil(2), "module dimension")?;
            return Ok(ModuleDecomposition::from_counts(&[(IrrepLabel::UniqueEven, m)]));
        }
        // Plus-odd exactly where ε = (−1)^n·ω.
        let n = k / 2;
        let omega = chirality_operator(&self.module)?;
        let sign = Scalar::int(if n.is_multiple_of(2) { 1 } else { -1 });
        let c = self.grading.try_mul(&omega)?.scale(&sign);
        let t = integer_trace(&c)?;
        let plus = divide_exact((d + t) / 2, 1 << n, "plus part")?;
        let minus = divide_exact((d - t) / 2, 1 << n, "minus part")?;
        Ok(ModuleDecomposition::from_counts(&[
            (IrrepLabel::PlusOdd, plus),
            (IrrepLabel::MinusOdd, minus),
        ]))
    }

    /// The ungraded `Cl_{k−1}` module on `M⁰` with `eᵢ` acting as `γᵢγ_k`.
    pub fn to_ungraded(&self) -> Result<CliffordModule> {
        let k = self.clifford_dim();
        if k == 0 {
            return Err(Error::DimensionMismatch("graded Cl_0 module has no ungraded partner".into()));
        }
        let basis = self.eigenspace_basis(true);
        let last = &self.module.generators[k - 1];
        let generators = self.module.generators[..k - 1]
            .iter()
            .map(|g| basis.solve_left(&g.try_mul(last)?.try_mul(&basis)?))
            .collect::<Result<Vec<_>>>()?;
        CliffordModule::new(basis.cols(), generators)
    }
}

/// Standard modules produced by [`build_gamma_matrices`].
#[derive(Clone, Debug, PartialEq)]
pub enum GammaSystem {
    /// `𝕊_{2n}` graded by its chirality operator.
    Even(GradedModule),
    /// The two ungraded irreps of `Cl_{2n+1}` and the graded irrep.
    Odd {
        plus: CliffordModule,
        minus: CliffordModule,
        graded: GradedModule,
    },
}

fn pauli_step(gens: &[ExactMatrix], size: usize) -> Vec<ExactMatrix> {
    let sigma3 = ExactMatrix::from_gaussian(&[&[(1, 0), (0, 0)], &[(0, 0), (-1, 0)]]);
    let i_sigma1 = ExactMatrix::from_gaussian(&[&[(0, 0), (0, 1)], &[(0, 1), (0, 0)]]);
    let i_sigma2 = ExactMatrix::from_gaussian(&[&[(0, 0), (1, 0)], &[(-1, 0), (0, 0)]]);
    let id = ExactMatrix::identity(size);
    let mut out: Vec<ExactMatrix> = gens.iter().map(|g| g.kron(&sigma3)).collect();
    out.push(id.kron(&i_sigma1));
    out.push(id.kron(&i_sigma2));
    out
}

fn check_cap(k: usize) -> Result<()> {
    if k > MAX_SPINOR_K {
        return Err(Error::SizeCap(format!("Cl_{k} exceeds the spinor cap {MAX_SPINOR_K}")));
    }
    Ok(())
}

/// Generators of `𝕊_{2n}`, built by repeated tensoring with Pauli matrices.
fn even_generators(n: usize) -> Vec<ExactMatrix> {
    (0..n).fold(Vec::new(), |gens, step| pauli_step(&gens, 1 << step))
}

/// `ω = i^{k/2}·γ₁⋯γ_k` for a module over `Cl_k`, `k` even.
pub fn chirality_operator(module: &CliffordModule) -> Result<ExactMatrix> {
    let k = module.clifford_dim();
    if !k.is_multiple_of(2) {
        return Err(Error::DimensionMismatch(format!("chirality needs even k, got {k}")));
    }
    Ok(module.volume_element()?.scale(&Scalar::i_pow((k / 2) as i64)))
}

fn spinor_even(n: usize) -> GradedModule {
    let module = CliffordModule {
        dim: 1 << n,
        generators: even_generators(n),
    };
    let grading = chirality_operator(&module).expect("even k");
    GradedModule { module, grading }
}

/// The two ungraded irreps of `Cl_{2n+1}`: plus-odd, then minus-odd.
pub fn odd_irreps(k: usize) -> Result<(CliffordModule, CliffordModule)> {
    check_cap(k)?;
    if k.is_multiple_of(2) {
        return Err(Error::DimensionMismatch(format!("odd irreps need odd k, got {k}")));
    }
    let n = k / 2;
    let base = spinor_even(n);
    let s = if n.is_multiple_of(2) { Scalar::i() } else { -Scalar::i() };
    let make = |sign: &Scalar| {
        let mut generators = base.module.generators.clone();
        generators.push(base.grading.scale(&(&s * sign)));
        CliffordModule { dim: 1 << n, generators }
    };
    Ok((make(&Scalar::one()), make(&Scalar::int(-1))))
}

/// The standard irreducible graded `Cl_k` module: `𝕊_k` graded by `ω` for
/// even `k`, and the restriction of `𝕊_{k+1}` for odd `k`.
pub fn spinor_module(k: usize) -> Result<GradedModule> {
    check_cap(k)?;
    if k.is_multiple_of(2) {
        Ok(spinor_even(k / 2))
    } else {
        check_cap(k + 1)?;
        spinor_even(k.div_ceil(2)).restrict()
    }
}

/// Standard spinor modules of `Cl_k`.
pub fn build_gamma_matrices(k: usize) -> Result<GammaSystem> {
    if k.is_multiple_of(2) {
        return Ok(GammaSystem::Even(spinor_module(k)?));
    }
    let (plus, minus) = odd_irreps(k)?;
    Ok(GammaSystem::Odd {
        plus,
        minus,
        graded: spinor_module(k)?,
    })
}

/// Every ungraded irrep of `Cl_k` with its label.
pub fn ungraded_irreps(k: usize) -> Result<Vec<(IrrepLabel, CliffordModule)>> {
    if k.is_multiple_of(2) {
        Ok(vec![(IrrepLabel::UniqueEven, spinor_module(k)?.module)])
    } else {
        let (plus, minus) = odd_irreps(k)?;
        Ok(vec![(IrrepLabel::PlusOdd, plus), (IrrepLabel::MinusOdd, minus)])
    }
}

/// Every graded irrep of `Cl_k` with its label.
pub fn graded_irreps(k: usize) -> Result<Vec<(IrrepLabel, GradedModule)>> {
    let s = spinor_module(k)?;
    if k % 2 == 1 {
        return Ok(vec![(IrrepLabel::UniqueEven, s)]);
    }
    // spinor_module grades by ω, which is plus-odd iff (−1)^{k/2} = 1.
    let flipped = s.flip_grading();
    if (k / 2).is_multiple_of(2) {
        Ok(vec![(IrrepLabel::PlusOdd, s), (IrrepLabel::MinusOdd, flipped)])
    } else {
        Ok(vec![(IrrepLabel::PlusOdd, flipped), (IrrepLabel::MinusOdd, s)])
    }
}

/// `cℓ(v)·s` in the module.
pub fn clifford_action(v: &[f64], module: &CliffordModule, s: &[Complex64]) -> Result<Vec<Complex64>> {
    module.act(v, s)
}

pub fn restrict_module(m: &GradedModule) -> Result<GradedModule> {
    m.restrict()
}

/// Graded or ungraded decomposition of a graded module.
pub fn decompose_module(m: &GradedModule, graded: bool) -> Result<ModuleDecomposition> {
    if graded {
        m.decompose()
    } else {
        m.ungraded().decompose()
    }
}

pub fn graded_to_ungraded(m: &GradedModule) -> Result<CliffordModule> {
    m.to_ungraded()
}

pub fn ungraded_to_graded(m: &CliffordModule) -> GradedModule {
    m.to_graded()
}
