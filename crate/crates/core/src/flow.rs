//! Spectral flow of one-parameter families of Hermitian matrices.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dirac::{wilson_kernel, FluxBundleSpec, GaugeField, WilsonParams};
use crate::error::{Error, Result};

/// Relative size `|λ|/max(1, ‖H‖)` below which an endpoint is singular.
pub const ENDPOINT_TOL: f64 = 1e-8;
pub const INITIAL_STEPS: usize = 64;
pub const MAX_STEPS: usize = 1 << 16;

type Builder = Arc<dyn Fn(f64) -> DMatrix<Complex64> + Send + Sync>;

#[derive(Clone)]
pub enum FamilyKind {
    /// `diag(n + t)` for `|n| ≤ modes`: the circle operator `−i d/dθ + t`
    /// truncated to Fourier modes.
    Shift { modes: usize },
    /// A fixed matrix.
    Constant(DMatrix<Complex64>),
    /// `ω(D_W − t)` on a flux bundle; `t` is the Wilson mass.
    WilsonMass(FluxBundleSpec),
    Custom(Builder),
}

impl fmt::Debug for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyKind::Shift { modes } => write!(f, "Shift {{ modes: {modes} }}"),
            FamilyKind::Constant(m) => write!(f, "Constant({}x{})", m.nrows(), m.ncols()),
            FamilyKind::WilsonMass(s) => write!(f, "WilsonMass({s:?})"),
            FamilyKind::Custom(_) => f.write_str("Custom"),
        }
    }
}

/// A path `t ↦ H(t)` from `t0` to `t1`.
#[derive(Clone, Debug)]
pub struct HermitianFamily {
    pub kind: FamilyKind,
    pub t0: f64,
    pub t1: f64,
}

impl HermitianFamily {
    pub fn shift(t0: f64, t1: f64) -> Self {
        HermitianFamily { kind: FamilyKind::Shift { modes: 32 }, t0, t1 }
    }

    pub fn reversed(&self) -> Self {
        HermitianFamily { kind: self.kind.clone(), t0: self.t1, t1: self.t0 }
    }

    pub fn operator(&self, t: f64) -> DMatrix<Complex64> {
        match &self.kind {
            FamilyKind::Shift { modes } => {
                let m = *modes as i64;
                let diag: Vec<Complex64> = (-m..=m).map(|n| Complex64::new(n as f64 + t, 0.0)).collect();
                DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag))
            }
            FamilyKind::Constant(m) => m.clone(),
            FamilyKind::WilsonMass(spec) => wilson_kernel(
                &GaugeField::flux(spec),
                WilsonParams { r: 1.0, mass: t },
            ),
            FamilyKind::Custom(f) => f(t),
        }
    }

    fn eigenvalues(&self, t: f64) -> Result<Vec<f64>> {
        let h = self.operator(t);
        if !h.is_square() || (&h - h.adjoint()).camax() > 1e-10 * h.camax().max(1.0) {
            return Err(Error::InvalidOperator(format!("family is not Hermitian at t = {t}")));
        }
        let mut ev: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectralFlow {
    pub flow: i64,
    pub steps: usize,
}

/// Net number of eigenvalues crossing zero from negative to positive.
///
/// Sorted eigenvalues are tracked on a uniform grid; the grid is doubled from
/// [`INITIAL_STEPS`] until two successive counts agree.
pub fn spectral_flow(family: &HermitianFamily) -> Result<SpectralFlow> {
    for t in [family.t0, family.t1] {
        let ev = family.eigenvalues(t)?;
        let scale = ev.iter().fold(1.0f64, |a, l| a.max(l.abs()));
        if ev.iter().any(|l| l.abs() <= ENDPOINT_TOL * scale) {
            return Err(Error::EndpointNotInvertible(format!("H({t}) has a zero eigenvalue")));
        }
    }
    let mut previous = None;
    let mut steps = INITIAL_STEPS;
    while steps <= MAX_STEPS {
        let flow = count_crossings(family, steps)?;
        if previous == Some(flow) {
            return Ok(SpectralFlow { flow, steps });
        }
        previous = Some(flow);
        steps *= 2;
    }
    Err(Error::NonConvergence(format!("spectral flow unstable up to {MAX_STEPS} steps")))
}

fn count_crossings(family: &HermitianFamily, steps: usize) -> Result<i64> {
    let spectra = (0..=steps)
        .into_par_iter()
        .map(|i| family.eigenvalues(family.t0 + (family.t1 - family.t0) * i as f64 / steps as f64))
        .collect::<Result<Vec<_>>>()?;
    let mut flow = 0i64;
    for pair in spectra.windows(2) {
        if pair[0].len() != pair[1].len() {
            return Err(Error::InvalidOperator("family changes size".into()));
        }
        for (a, b) in pair[0].iter().zip(&pair[1]) {
            match (*a < 0.0, *b < 0.0) {
                (true, false) => flow += 1,
                (false, true) => flow -= 1,
                _ => {}
            }
        }
    }
    Ok(flow)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_family() {
        assert_eq!(spectral_flow(&HermitianFamily::shift(0.5, 1.5)).unwrap().flow, 1);
        assert_eq!(spectral_flow(&HermitianFamily::shift(0.5, 2.5)).unwrap().flow, 2);
        assert_eq!(spectral_flow(&HermitianFamily::shift(0.5, 0.7)).unwrap().flow, 0);
        assert_eq!(spectral_flow(&HermitianFamily::shift(0.5, 2.5).reversed()).unwrap().flow, -2);
    }

    #[test]
    fn constant_family() {
        let m = DMatrix::from_fn(3, 3, |r, c| Complex64::new(if r == c { r as f64 - 1.5 } else { 0.0 }, 0.0));
        let f = HermitianFamily { kind: FamilyKind::Constant(m), t0: 0.0, t1: 1.0 };
        assert_eq!(spectral_flow(&f).unwrap().flow, 0);
    }

    #[test]
    fn singular_endpoint() {
        assert!(matches!(
            spectral_flow(&HermitianFamily::shift(0.0, 1.5)),
            Err(Error::EndpointNotInvertible(_))
        ));
    }

    #[test]
    fn wilson_mass_flow_matches_flux() {
        let spec = FluxBundleSpec::new(6, 1).unwrap();
        let f = HermitianFamily { kind: FamilyKind::WilsonMass(spec), t0: -0.5, t1: 1.0 };
        assert_eq!(spectral_flow(&f).unwrap().flow, 1);
    }
}
