//! The end-to-end acceptance suite, shared by the `acceptance` test target and
//! the command-line tool.

use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::clifford::{classify_complex, Blade, DivisionAlgebra, Multivector, QuadraticForm};
use crate::dirac::{build_dirac_from_field, build_torus_dirac, index, FluxBundleSpec, GaugeField, WilsonParams};
use crate::error::Result;
use crate::flow::{spectral_flow, FamilyKind, HermitianFamily};
use crate::scalar::Scalar;
use crate::spin::{covering_map, random_unit_vector_product, RotationMatrix, SpinElement};
use crate::spinor::spinor_module;
use crate::symbols::{
    abs_class, abs_group, is_elliptic, principal_symbol, thom_class_complex, winding_number, OperatorSpec,
    Sampling, WINDING_TOL,
};

pub const ASSOCIATIVITY_TRIPLES: usize = 1000;
pub const ASSOCIATIVITY_MAX_SECS: f64 = 10.0;
pub const COVERING_SAMPLES: usize = 500;
pub const COVERING_MAX_SECS: f64 = 30.0;
pub const INDEX_MAX_SECS: f64 = 120.0;
pub const GAUGE_TRIALS: usize = 20;
pub const GAUGE_SV_TOL: f64 = 1e-10;
/// Light-cone residual `|−τ² + |ξ|²|` allowed for the d'Alembertian witness.
pub const LIGHT_CONE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AcceptanceReport {
    pub seed: u64,
    pub criteria: Vec<CriterionResult>,
}

impl AcceptanceReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }
}

impl std::fmt::Display for AcceptanceReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.criteria {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {} ({:.2}s): {}", c.name, c.seconds, c.detail)?;
        }
        let passed = self.criteria.iter().filter(|c| c.passed).count();
        write!(f, "{passed}/{} criteria passed", self.criteria.len())
    }
}

type Check = fn(&mut ChaCha8Rng) -> Result<(bool, String)>;

pub const CRITERIA: [(&str, Check); 11] = [
    ("clifford-relations-associativity", relations_and_associativity),
    ("complex-classification", complex_classification),
    ("even-subalgebra-isomorphism", even_subalgebra),
    ("covering-map", covering),
    ("abs-periodicity", abs_periodicity),
    ("abs-generator-winding", abs_winding),
    ("thom-class-agreement", thom_agreement),
    ("ellipticity", ellipticity),
    ("torus-index", torus_index),
    ("spectral-flow", flow_examples),
    ("gauge-invariance", gauge_invariance),
];

/// Runs every criterion; `only` restricts to names containing the filter.
pub fn run_acceptance(seed: u64, only: Option<&str>) -> AcceptanceReport {
    let criteria = CRITERIA
        .iter()
        .filter(|(name, _)| only.is_none_or(|f| name.contains(f)))
        .map(|(name, check)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let start = Instant::now();
            let outcome = check(&mut rng);
            let seconds = start.elapsed().as_secs_f64();
            let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
            CriterionResult { name: name.to_string(), passed, detail, seconds }
        })
        .collect();
    AcceptanceReport { seed, criteria }
}

fn random_multivector(form: &QuadraticForm, rng: &mut ChaCha8Rng) -> Result<Multivector> {
    let mut terms = Vec::new();
    for m in 0..form.blade_count() as u32 {
        if rng.random_bool(0.5) {
            let c = Scalar::gaussian(rng.random_range(-3..=3), rng.random_range(-3..=3));
            terms.push((Blade::from_mask(m), c));
        }
    }
    Multivector::from_terms(form, terms)
}

fn relations_and_associativity(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let start = Instant::now();
    let mut failures = 0;
    for n in 0..=6 {
        let signs: Vec<i8> = (0..n).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
        for form in [QuadraticForm::euclidean(n)?, QuadraticForm::new(signs)?] {
            for _ in 0..ASSOCIATIVITY_TRIPLES {
                let (x, y, z) = (
                    random_multivector(&form, rng)?,
                    random_multivector(&form, rng)?,
                    random_multivector(&form, rng)?,
                );
                if x.multiply(&y)?.multiply(&z)? != x.multiply(&y.multiply(&z)?)? {
                    failures += 1;
                }
                let coeffs: Vec<Scalar> = (0..n).map(|_| Scalar::ratio(rng.random_range(-9..=9), rng.random_range(1..=4))).collect();
                let q = coeffs
                    .iter()
                    .enumerate()
                    .fold(Scalar::zero(), |acc, (i, c)| acc + Scalar::int(form.sign(i) as i64) * c.clone() * c.clone());
                let v = Multivector::vector(&form, &coeffs)?;
                if v.multiply(&v)? != Multivector::scalar(&form, -q) {
                    failures += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        failures == 0 && secs < ASSOCIATIVITY_MAX_SECS,
        format!("{failures} failures over n = 0..6, two signatures each, {secs:.1}s (limit {ASSOCIATIVITY_MAX_SECS}s)"),
    ))
}

fn complex_classification(_: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut bad = Vec::new();
    for n in 0..=6 {
        let size = 1usize << (n / 2);
        let want = if n % 2 == 0 {
            vec![(DivisionAlgebra::C, size)]
        } else {
            vec![(DivisionAlgebra::C, size), (DivisionAlgebra::C, size)]
        };
        let got = classify_complex(n)?;
        if got.factors != want {
            bad.push(format!("n={n}: {got}"));
        }
    }
    Ok((bad.is_empty(), if bad.is_empty() { "n = 0..6 verified".into() } else { bad.join(", ") }))
}

fn even_subalgebra(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut problems = Vec::new();
    for n in 1..=6 {
        let lower = QuadraticForm::euclidean(n - 1)?;
        let upper = QuadraticForm::euclidean(n)?;
        let images: Vec<Multivector> = (0..1u32 << (n - 1))
            .map(|m| Multivector::blade(&lower, Blade::from_mask(m), Scalar::one())?.embed_lower(&upper))
            .collect::<Result<_>>()?;
        if images.iter().any(|x| !x.is_even()) {
            problems.push(format!("n={n}: image not even"));
        }
        let rows: Vec<Vec<Scalar>> = images
            .iter()
            .map(|x| (0..1u32 << n).map(|m| x.coefficient(Blade::from_mask(m))).collect())
            .collect();
        let rank = crate::linsolve::rank(rows);
        if rank != 1 << (n - 1) {
            problems.push(format!("n={n}: image rank {rank}"));
        }
        for _ in 0..50 {
            let x = random_multivector(&lower, rng)?;
            let y = random_multivector(&lower, rng)?;
            if x.multiply(&y)?.embed_lower(&upper)? != x.embed_lower(&upper)?.multiply(&y.embed_lower(&upper)?)? {
                problems.push(format!("n={n}: not multiplicative"));
                break;
            }
        }
        if Multivector::<Scalar>::one(&lower).embed_lower(&upper)? != Multivector::one(&upper) {
            problems.push(format!("n={n}: unit not preserved"));
        }
    }
    Ok((
        problems.is_empty(),
        if problems.is_empty() {
            "injective unital homomorphism onto the even part for n = 1..6".into()
        } else {
            problems.join(", ")
        },
    ))
}

/// Laplace expansion, independent of the library's elimination.
fn laplace_det(m: &[Vec<Scalar>]) -> Scalar {
    if m.is_empty() {
        return Scalar::one();
    }
    (0..m.len()).fold(Scalar::zero(), |acc, j| {
        let minor: Vec<Vec<Scalar>> = m[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = m[0][j].clone() * laplace_det(&minor);
        if j % 2 == 0 { acc + term } else { acc - term }
    })
}

fn exact_special_orthogonal(r: &RotationMatrix) -> bool {
    let m = r.rows();
    let n = m.len();
    let orthogonal = (0..n).all(|a| {
        (0..n).all(|b| {
            let dot = (0..n).fold(Scalar::zero(), |acc, i| acc + m[i][a].clone() * m[i][b].clone());
            dot == if a == b { Scalar::one() } else { Scalar::zero() }
        })
    });
    orthogonal && laplace_det(m) == Scalar::one()
}

fn covering(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let start = Instant::now();
    let mut failures = 0;
    let per_dim = COVERING_SAMPLES;
    for n in 2..=5 {
        let form = QuadraticForm::euclidean(n)?;
        for _ in 0..per_dim {
            let factors = if rng.random_bool(0.5) { 2 } else { 4 };
            let u = SpinElement::new(random_unit_vector_product(&form, factors, rng)?)?;
            let r = covering_map(&u)?;
            if !exact_special_orthogonal(&r) || covering_map(&-&u)? != r {
                failures += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        failures == 0 && secs < COVERING_MAX_SECS,
        format!("{failures} failures over {per_dim} samples for each n = 2..5, {secs:.1}s (limit {COVERING_MAX_SECS}s)"),
    ))
}

fn abs_periodicity(_: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut got = Vec::new();
    let mut ok = true;
    for k in 0..=6 {
        let g = abs_group(k)?;
        ok &= g.group == if k % 2 == 0 { "Z" } else { "0" };
        got.push(format!("k={k}:{}", g.group));
    }
    Ok((ok, got.join(" ")))
}

fn abs_winding(_: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let sc = abs_class(&spinor_module(2)?)?;
    let w = winding_number(&sc)?;
    let doubled = winding_number(&sc.direct_sum(&sc)?)?;
    let ok = w.winding.abs() == 1 && w.deviation < WINDING_TOL && doubled.winding == 2 * w.winding;
    Ok((ok, format!("winding {} (deviation {:.1e}), doubled {}", w.winding, w.deviation, doubled.winding)))
}

fn thom_agreement(_: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let thom = winding_number(&thom_class_complex(1)?)?;
    let abs = winding_number(&abs_class(&spinor_module(2)?)?)?;
    let ok = thom.winding.abs() == abs.winding.abs() && thom.winding != 0 && thom.deviation < WINDING_TOL;
    Ok((ok, format!("Thom winding {}, spinor winding {}", thom.winding, abs.winding)))
}

fn ellipticity(_: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut notes = Vec::new();
    let mut ok = true;
    for n in [2, 3, 4] {
        let lap = is_elliptic(&principal_symbol(&OperatorSpec::laplacian(n)?)?, Sampling::default())?;
        let dirac = is_elliptic(&principal_symbol(&OperatorSpec::standard_dirac(n)?)?, Sampling::default())?;
        ok &= lap.elliptic && dirac.elliptic;
        notes.push(format!("n={n}: laplacian {} dirac {}", lap.elliptic, dirac.elliptic));
    }
    for n in [2, 4] {
        let wave = is_elliptic(&principal_symbol(&OperatorSpec::dalembertian(n)?)?, Sampling::default())?;
        let on_cone = wave.witness.as_ref().is_some_and(|xi| {
            let spatial: f64 = xi[1..].iter().map(|x| x * x).sum();
            (spatial - xi[0] * xi[0]).abs() <= LIGHT_CONE_TOL * (spatial + xi[0] * xi[0])
        });
        ok &= !wave.elliptic && on_cone;
        notes.push(format!("n={n}: dalembertian {} witness on cone {on_cone}", wave.elliptic));
    }
    Ok((ok, notes.join("; ")))
}

fn torus_index(_: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut min_gap = f64::INFINITY;
    for n in [12, 14, 16] {
        for d in -3..=3 {
            match build_torus_dirac(&FluxBundleSpec::new(n, d)?).and_then(|op| index(&op)) {
                Ok(r) if r.index == d => min_gap = min_gap.min(r.gap),
                Ok(r) => bad.push(format!("N={n} d={d}: index {}", r.index)),
                Err(e) => bad.push(format!("N={n} d={d}: {e}")),
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = bad.is_empty() && secs < INDEX_MAX_SECS;
    let detail = if bad.is_empty() {
        format!("21 cases certified, smallest gap {min_gap:.3}, {secs:.1}s (limit {INDEX_MAX_SECS}s)")
    } else {
        bad.join(", ")
    };
    Ok((ok, detail))
}

fn flow_examples(_: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let one = spectral_flow(&HermitianFamily::shift(0.5, 1.5))?.flow;
    let two = spectral_flow(&HermitianFamily::shift(0.5, 2.5))?.flow;
    let constant = HermitianFamily {
        kind: FamilyKind::Constant(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(2.0, 0.0),
        ]))),
        t0: 0.0,
        t1: 1.0,
    };
    let zero = spectral_flow(&constant)?.flow;
    Ok((one == 1 && two == 2 && zero == 0, format!("one period {one}, two periods {two}, constant {zero}")))
}

fn sorted_singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(f64::total_cmp);
    s
}

fn gauge_invariance(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    let mut changed = 0;
    for _ in 0..GAUGE_TRIALS {
        let spec = FluxBundleSpec::new(8, rng.random_range(-3..=3))?;
        let field = GaugeField::flux(&spec);
        let phases: Vec<f64> = (0..spec.sites()).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        let a = build_dirac_from_field(&field, WilsonParams::default())?;
        let b = build_dirac_from_field(&field.gauge_transform(&phases)?, WilsonParams::default())?;
        let (sa, sb) = (sorted_singular_values(a.d_plus()), sorted_singular_values(b.d_plus()));
        if sa.len() != sb.len() {
            worst = f64::INFINITY;
        } else {
            worst = sa.iter().zip(&sb).map(|(x, y)| (x - y).abs()).fold(worst, f64::max);
        }
        if index(&a)?.index != index(&b)?.index {
            changed += 1;
        }
    }
    Ok((
        worst <= GAUGE_SV_TOL && changed == 0,
        format!("{GAUGE_TRIALS} trials at N = 8, max singular value change {worst:.1e}, index changes {changed}"),
    ))
}
