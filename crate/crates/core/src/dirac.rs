//! Lattice Dirac operators on the flat 2-torus twisted by a flux-`d` line
//! bundle, and numerically certified Fredholm indices.
//!
//! The Wilson–Dirac operator `D_W = Σ σ_μ ∇_μ + W` (symmetric covariant
//! differences plus the Wilson term `W = (r/2) Σ (2 − T_μ − T_μ†)`) is free of
//! doublers but has no exact chiral structure, so its off-diagonal blocks do not
//! carry the index. We use instead the Hermitian kernel `H = ω(D_W − m)` with
//! `ω = σ₃` and its sign `ε = sign(H)`. The Ginsparg–Wilson operator
//! `1 + ωε` sends the `ε = +1` eigenspace into the `ω = +1` spinor components,
//! and `D⁺` is that map written in an orthonormal eigenbasis:
//!
//! ```text
//! D⁺ : ker(ε − 1) ──▶ {ω = +1},   D⁺ = P_{ω=+1} restricted to ker(ε − 1)
//! ```
//!
//! Its index `#{ε = +1} − N²` equals the flux `d`. The kernel of `D⁺` consists
//! of exact zero modes with `ω = −1`, the cokernel of those with `ω = +1`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::symbols::{principal_symbol, OperatorSpec, SymbolPolynomial};

/// A flux-`d` line bundle on an `N × N` periodic lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FluxBundleSpec {
    #[serde(rename = "N")]
    pub lattice_size: usize,
    pub flux: i64,
}

impl FluxBundleSpec {
    /// Requires `N ≥ 4` and `|d| ≤ N²/4`; larger fluxes alias on the lattice.
    pub fn new(lattice_size: usize, flux: i64) -> Result<Self> {
        if lattice_size < 4 {
            return Err(Error::InvalidLattice(format!("N = {lattice_size} is below 4")));
        }
        let sites = (lattice_size * lattice_size) as i64;
        if 4 * flux.abs() > sites {
            return Err(Error::InvalidLattice(format!(
                "flux {flux} exceeds N²/4 = {} and is unreliable",
                sites as f64 / 4.0
            )));
        }
        Ok(FluxBundleSpec { lattice_size, flux })
    }

    pub fn sites(&self) -> usize {
        self.lattice_size * self.lattice_size
    }

    /// Uniform plaquette angle `2πd/N²`.
    pub fn plaquette_angle(&self) -> f64 {
        2.0 * PI * self.flux as f64 / self.sites() as f64
    }
}

/// `U(1)` link variables `U_μ(x)` on the periodic lattice; site `(x, y)` has
/// index `x + N·y` and `μ = 0, 1` are the `x`, `y` directions.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeField {
    n: usize,
    links: [Vec<Complex64>; 2],
}

impl GaugeField {
    /// The uniform-curvature field: `U_y(x, y) = e^{iBx}`, and on the last
    /// column `U_x(N−1, y) = e^{−iBNy}` closes the transition, `B = 2πd/N²`.
    pub fn flux(spec: &FluxBundleSpec) -> Self {
        let n = spec.lattice_size;
        let b = spec.plaquette_angle();
        let mut ux = vec![Complex64::new(1.0, 0.0); n * n];
        let mut uy = vec![Complex64::new(1.0, 0.0); n * n];
        for y in 0..n {
            for x in 0..n {
                uy[x + n * y] = Complex64::from_polar(1.0, b * x as f64);
                if x == n - 1 {
                    ux[x + n * y] = Complex64::from_polar(1.0, -b * (n * y) as f64);
                }
            }
        }
        GaugeField { n, links: [ux, uy] }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    fn site(&self, x: usize, y: usize) -> usize {
        (x % self.n) + self.n * (y % self.n)
    }

    pub fn link(&self, mu: usize, x: usize, y: usize) -> Complex64 {
        self.links[mu][self.site(x, y)]
    }

    /// `U_x(x,y)·U_y(x+1,y)·U_x(x,y+1)*·U_y(x,y)*`.
    pub fn plaquette(&self, x: usize, y: usize) -> Complex64 {
        self.link(0, x, y) * self.link(1, x + 1, y) * self.link(0, x, y + 1).conj() * self.link(1, x, y).conj()
    }

    /// `U_μ(x) ↦ g(x)·U_μ(x)·g(x+μ)*` with `g = e^{iφ}`.
    pub fn gauge_transform(&self, phases: &[f64]) -> Result<Self> {
        let n = self.n;
        if phases.len() != n * n {
            return Err(Error::DimensionMismatch(format!("{} phases for {} sites", phases.len(), n * n)));
        }
        let g = |x: usize, y: usize| Complex64::from_polar(1.0, phases[self.site(x, y)]);
        let mut out = self.clone();
        for y in 0..n {
            for x in 0..n {
                let s = self.site(x, y);
                out.links[0][s] = g(x, y) * self.links[0][s] * g(x + 1, y).conj();
                out.links[1][s] = g(x, y) * self.links[1][s] * g(x, y + 1).conj();
            }
        }
        Ok(out)
    }

    /// Covariant forward shift `(T_μψ)(x) = U_μ(x)·ψ(x+μ)`.
    fn shift(&self, mu: usize) -> DMatrix<Complex64> {
        let n = self.n;
        let mut t = DMatrix::zeros(n * n, n * n);
        for y in 0..n {
            for x in 0..n {
                let (tx, ty) = if mu == 0 { (x + 1, y) } else { (x, y + 1) };
                t[(self.site(x, y), self.site(tx, ty))] = self.link(mu, x, y);
            }
        }
        t
    }
}

/// Wilson parameter `r` and the mass `m ∈ (0, 2)` of the kernel `H`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WilsonParams {
    pub r: f64,
    pub mass: f64,
}

impl Default for WilsonParams {
    fn default() -> Self {
        WilsonParams { r: 1.0, mass: 1.0 }
    }
}

fn kron2(a: [[Complex64; 2]; 2], b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let v = b.nrows();
    let mut out = DMatrix::zeros(2 * v, 2 * v);
    for (i, row) in a.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c != Complex64::new(0.0, 0.0) {
                out.view_mut((i * v, j * v), (v, v)).copy_from(&(b * c));
            }
        }
    }
    out
}

/// `H(m) = ω(D_W − m)`, Hermitian, on spinor-major layout (`ω = +1` block
/// first).
pub fn wilson_kernel(field: &GaugeField, params: WilsonParams) -> DMatrix<Complex64> {
    let v = field.n * field.n;
    let (o, one, i) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0));
    let sigma = [[[o, one], [one, o]], [[o, -i], [i, o]]];
    let id = DMatrix::<Complex64>::identity(v, v);
    let mut d = DMatrix::zeros(2 * v, 2 * v);
    for (mu, s) in sigma.iter().enumerate() {
        let t = field.shift(mu);
        let td = t.adjoint();
        d += kron2(*s, &((&t - &td) * Complex64::new(0.5, 0.0)));
        let wilson = (&id * Complex64::new(2.0, 0.0) - &t - &td) * Complex64::new(params.r / 2.0, 0.0);
        d += kron2([[one, o], [o, one]], &wilson);
    }
    d -= DMatrix::<Complex64>::identity(2 * v, 2 * v) * Complex64::new(params.mass, 0.0);
    for r in v..2 * v {
        for c in 0..2 * v {
            d[(r, c)] = -d[(r, c)];
        }
    }
    d
}

/// A graded operator `[[0, D⁻], [D⁺, 0]]` with `D⁻ = D⁺†`, on
/// `E⁺ ⊕ E⁻` where `E⁺ = ker(ε − 1)` and `E⁻` is the `ω = +1` site space.
#[derive(Clone, Debug)]
pub struct LatticeOperator {
    specs: Vec<FluxBundleSpec>,
    d_plus: DMatrix<Complex64>,
    /// Smallest `|λ|` of the kernel `H`, relative to `‖H‖`.
    kernel_gap: f64,
}

/// Relative `|λ(H)|` below which `sign(H)` is not trusted.
const KERNEL_GAP_MIN: f64 = 1e-8;

/// Builds the operator for a gauge field.
pub fn build_dirac_from_field(field: &GaugeField, params: WilsonParams) -> Result<LatticeOperator> {
    if !(params.mass > 0.0 && params.mass < 2.0) {
        return Err(Error::InvalidLattice(format!("mass {} is outside (0, 2)", params.mass)));
    }
    let v = field.n * field.n;
    let h = wilson_kernel(field, params);
    let eig = h.symmetric_eigen();
    let norm = eig.eigenvalues.amax();
    let gap = eig.eigenvalues.iter().map(|l| l.abs()).fold(f64::INFINITY, f64::min) / norm;
    if gap < KERNEL_GAP_MIN {
        return Err(Error::AmbiguousKernel(format!("kernel H is nearly singular (gap {gap:e})")));
    }
    let positive: Vec<usize> = (0..2 * v).filter(|&k| eig.eigenvalues[k] > 0.0).collect();
    let d_plus = DMatrix::from_fn(v, positive.len(), |r, c| eig.eigenvectors[(r, positive[c])]);
    Ok(LatticeOperator {
        specs: Vec::new(),
        d_plus,
        kernel_gap: gap,
    })
}

/// The twisted lattice Dirac operator of a flux bundle.
pub fn build_torus_dirac(spec: &FluxBundleSpec) -> Result<LatticeOperator> {
    let mut op = build_dirac_from_field(&GaugeField::flux(spec), WilsonParams::default())?;
    op.specs.push(*spec);
    Ok(op)
}

impl LatticeOperator {
    pub fn specs(&self) -> &[FluxBundleSpec] {
        &self.specs
    }

    pub fn d_plus(&self) -> &DMatrix<Complex64> {
        &self.d_plus
    }

    pub fn d_minus(&self) -> DMatrix<Complex64> {
        self.d_plus.adjoint()
    }

    pub fn kernel_gap(&self) -> f64 {
        self.kernel_gap
    }

    /// `(dim E⁺, dim E⁻)`.
    pub fn graded_dims(&self) -> (usize, usize) {
        (self.d_plus.ncols(), self.d_plus.nrows())
    }

    pub fn size(&self) -> usize {
        self.d_plus.ncols() + self.d_plus.nrows()
    }

    /// The grading `diag(I, −I)`.
    pub fn grading(&self) -> Vec<f64> {
        let (p, m) = self.graded_dims();
        std::iter::repeat_n(1.0, p).chain(std::iter::repeat_n(-1.0, m)).collect()
    }

    /// The assembled Hermitian matrix `[[0, D⁻], [D⁺, 0]]`.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let (p, m) = self.graded_dims();
        let mut out = DMatrix::zeros(p + m, p + m);
        out.view_mut((p, 0), (m, p)).copy_from(&self.d_plus);
        out.view_mut((0, p), (p, m)).copy_from(&self.d_minus());
        out
    }

    /// Block direct sum, modelling the disjoint union of two tori.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (p1, m1) = self.graded_dims();
        let (p2, m2) = other.graded_dims();
        let mut d = DMatrix::zeros(m1 + m2, p1 + p2);
        d.view_mut((0, 0), (m1, p1)).copy_from(&self.d_plus);
        d.view_mut((m1, p1), (m2, p2)).copy_from(&other.d_plus);
        LatticeOperator {
            specs: self.specs.iter().chain(&other.specs).copied().collect(),
            d_plus: d,
            kernel_gap: self.kernel_gap.min(other.kernel_gap),
        }
    }

    /// Non-zero entries of the assembled matrix as `row col re im` lines.
    pub fn to_triplets(&self) -> String {
        let m = self.matrix();
        let mut out = String::new();
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                let z = m[(r, c)];
                if z.norm() > 0.0 {
                    out.push_str(&format!("{r} {c} {:e} {:e}\n", z.re, z.im));
                }
            }
        }
        out
    }
}

/// Kernel dimension with the evidence for it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelCertificate {
    pub dim: usize,
    pub largest_zero: f64,
    pub smallest_nonzero: f64,
    pub gap_ratio: f64,
}

/// Required separation between accepted zero modes and the rest.
pub const KERNEL_GAP_RATIO: f64 = 1e3;

/// Counts singular values below `√ε·‖A‖` (plus the `cols − rows` structural
/// kernel of a wide matrix) and certifies that the next singular value is at
/// least [`KERNEL_GAP_RATIO`] times larger.
pub fn kernel_dimension(a: &DMatrix<Complex64>) -> Result<KernelCertificate> {
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return Ok(KernelCertificate {
            dim: cols,
            largest_zero: 0.0,
            smallest_nonzero: f64::INFINITY,
            gap_ratio: f64::INFINITY,
        });
    }
    let sv = a.clone().singular_values();
    let norm = sv.max();
    let threshold = f64::EPSILON.sqrt() * norm;
    let structural = cols.saturating_sub(rows);
    let zeros: Vec<f64> = sv.iter().copied().filter(|&s| s <= threshold).collect();
    let largest_zero = zeros.iter().copied().fold(0.0, f64::max);
    let smallest_nonzero = sv
        .iter()
        .copied()
        .filter(|&s| s > threshold)
        .fold(f64::INFINITY, f64::min);
    let floor = (f64::EPSILON * norm).max(f64::MIN_POSITIVE);
    let gap_ratio = smallest_nonzero / largest_zero.max(floor);
    if gap_ratio < KERNEL_GAP_RATIO {
        return Err(Error::AmbiguousKernel(format!(
            "zero modes up to {largest_zero:e}, next singular value {smallest_nonzero:e}"
        )));
    }
    Ok(KernelCertificate {
        dim: zeros.len() + structural,
        largest_zero,
        smallest_nonzero,
        gap_ratio,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndexResult {
    #[serde(rename = "N")]
    pub lattice_size: Option<usize>,
    pub d: Option<i64>,
    pub dim_ker_plus: usize,
    pub dim_ker_minus: usize,
    pub index: i64,
    /// Smallest non-zero singular value of `D⁺`.
    pub gap: f64,
}

/// `dim ker D⁺ − dim ker D⁻`, each gap-certified.
pub fn index(op: &LatticeOperator) -> Result<IndexResult> {
    let plus = kernel_dimension(&op.d_plus)?;
    let minus = kernel_dimension(&op.d_minus())?;
    let single = (op.specs.len() == 1).then(|| op.specs[0]);
    Ok(IndexResult {
        lattice_size: single.map(|s| s.lattice_size),
        d: single.map(|s| s.flux),
        dim_ker_plus: plus.dim,
        dim_ker_minus: minus.dim,
        index: plus.dim as i64 - minus.dim as i64,
        gap: plus.smallest_nonzero.min(minus.smallest_nonzero),
    })
}

/// Continuum principal symbol of the lattice operator: the naive difference
/// term tends to the Dirac operator of the 2-dimensional spinor module, and the
/// Wilson term is of lower order after rescaling.
pub fn symbol_of_lattice_operator(spec: &FluxBundleSpec) -> Result<SymbolPolynomial> {
    FluxBundleSpec::new(spec.lattice_size, spec.flux)?;
    principal_symbol(&OperatorSpec::standard_dirac(2)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{is_elliptic, Sampling};

    #[test]
    fn spec_validation() {
        assert!(FluxBundleSpec::new(3, 0).is_err());
        assert!(FluxBundleSpec::new(8, 16).is_ok());
        assert!(matches!(FluxBundleSpec::new(8, 17), Err(Error::InvalidLattice(_))));
    }

    #[test]
    fn plaquettes_are_uniform() {
        for (n, d) in [(6, 1), (8, -3), (5, 2)] {
            let spec = FluxBundleSpec::new(n, d).unwrap();
            let field = GaugeField::flux(&spec);
            let want = Complex64::from_polar(1.0, spec.plaquette_angle());
            for y in 0..n {
                for x in 0..n {
                    assert!((field.plaquette(x, y) - want).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn kernel_is_hermitian_and_doubler_free() {
        let spec = FluxBundleSpec::new(6, 0).unwrap();
        let h = wilson_kernel(&GaugeField::flux(&spec), WilsonParams::default());
        assert!((&h - h.adjoint()).camax() < 1e-14);
        // No near-zero modes for the free field at m = 1.
        let eig = h.symmetric_eigen();
        assert!(eig.eigenvalues.iter().all(|l| l.abs() > 0.5));
    }

    #[test]
    fn graded_structure() {
        let op = build_torus_dirac(&FluxBundleSpec::new(6, 1).unwrap()).unwrap();
        let m = op.matrix();
        assert!((&m - m.adjoint()).camax() < 1e-14);
        let g = op.grading();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                // Odd: entries only between opposite grades.
                if g[r] == g[c] {
                    assert_eq!(m[(r, c)], Complex64::new(0.0, 0.0));
                }
            }
        }
        assert_eq!(op.graded_dims().1, 36);
    }

    #[test]
    fn untwisted_size_and_index() {
        let op = build_torus_dirac(&FluxBundleSpec::new(8, 0).unwrap()).unwrap();
        assert_eq!(op.size(), 128);
        let r = index(&op).unwrap();
        assert_eq!(r.index, 0);
        assert_eq!(r.lattice_size, Some(8));
    }

    #[test]
    fn kernel_dimension_examples() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
        ]));
        assert_eq!(kernel_dimension(&d).unwrap().dim, 1);
        let m = DMatrix::from_fn(4, 4, |r, c| Complex64::new(if r == c { 3.0 } else { 0.5 }, (r as f64 - c as f64) * 0.1));
        assert_eq!(kernel_dimension(&m).unwrap().dim, 0);
        let wide = DMatrix::from_fn(2, 3, |r, c| Complex64::new((r == c) as u8 as f64, 0.0));
        assert_eq!(kernel_dimension(&wide).unwrap().dim, 1);
        let fuzzy = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(1e-9, 0.0),
            Complex64::new(1e-7, 0.0),
            Complex64::new(1.0, 0.0),
        ]));
        assert!(matches!(kernel_dimension(&fuzzy), Err(Error::AmbiguousKernel(_))));
    }

    #[test]
    fn small_flux_indices() {
        for d in [-2, -1, 1, 2] {
            let r = index(&build_torus_dirac(&FluxBundleSpec::new(8, d).unwrap()).unwrap()).unwrap();
            assert_eq!(r.index, d);
        }
    }

    #[test]
    fn direct_sum_adds_indices() {
        let a = build_torus_dirac(&FluxBundleSpec::new(6, 1).unwrap()).unwrap();
        let b = build_torus_dirac(&FluxBundleSpec::new(6, -2).unwrap()).unwrap();
        let r = index(&a.direct_sum(&b)).unwrap();
        assert_eq!(r.index, -1);
        assert_eq!(r.d, None);
    }

    #[test]
    fn triplets_round_trip_count() {
        let op = build_torus_dirac(&FluxBundleSpec::new(4, 0).unwrap()).unwrap();
        let text = op.to_triplets();
        let m = op.matrix();
        let nnz = m.iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(text.lines().count(), nnz);
        let first: Vec<&str> = text.lines().next().unwrap().split(' ').collect();
        assert_eq!(first.len(), 4);
    }

    #[test]
    fn continuum_symbol() {
        let s = symbol_of_lattice_operator(&FluxBundleSpec::new(8, 1).unwrap()).unwrap();
        assert!(is_elliptic(&s, Sampling::default()).unwrap().elliptic);
        let v = s.evaluate_f64(&[0.6, -0.8]).unwrap();
        assert!((&v * &v - DMatrix::identity(2, 2)).camax() < 1e-12);
    }
}
