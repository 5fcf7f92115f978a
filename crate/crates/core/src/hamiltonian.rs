//! Hamiltonian 2-forms and their correspondence with Killing tensors.
//!
//! A J-invariant 2-form `φ` is Hamiltonian when
//! `∇_X φ = ½ (dσ ∧ (JX)^♭ − d^cσ ∧ X^♭)` with `σ = tr_ω φ`.

use crate::error::{Error, Result};
use crate::field::{dc_covector, partials, wedge, EndoField, KahlerForm, ScalarField, TwoFormField};
use crate::geometry::{cov_deriv_form_generic, Chart, Local};
use crate::killing::{cyclic_killing_residual, potential_frame, MuField};
use crate::linalg::Mat;
use crate::real::{fabs, Real};
use alloc::vec::Vec;

/// `φ = (τ − c) dτ ∧ d^cτ / Q`, extended by zero where `Q = 0`.
#[derive(Clone, Copy, Debug)]
pub struct SpecialHamiltonianForm<F> {
    pub potential: F,
    pub c: f64,
}

impl<F: ScalarField> TwoFormField for SpecialHamiltonianForm<F> {
    fn eval<T: Real, C: Chart>(&self, chart: &C, x: &[T]) -> Mat<T> {
        let fr = potential_frame(&self.potential, chart, x);
        if fr.q.value() == 0.0 {
            return Mat::zeros(x.len());
        }
        let j = chart.complex_structure(x);
        let dc = dc_covector(&j, &fr.dtau);
        let coef = (self.potential.eval(chart, x) - self.c) / fr.q;
        wedge(&fr.dtau, &dc).scale(coef)
    }
}

/// `tr_ω φ = ½ tr(g⁻¹ φ J)`, normalized so that `tr_ω ω = n`.
pub fn trace_sigma_generic<T: Real>(g_inv: &Mat<T>, j: &Mat<T>, phi: &Mat<T>) -> T {
    (&(g_inv * phi) * j).trace() * 0.5
}

pub fn trace_sigma<C: Chart, P: TwoFormField>(chart: &C, phi: &P, p: &[f64]) -> Result<f64> {
    let local = Local::at(chart, p)?;
    Ok(trace_sigma_generic(&local.ginv, &local.j, &phi.eval(chart, p)))
}

/// `σ = tr_ω φ` as a scalar field.
#[derive(Clone, Copy, Debug)]
pub struct TraceSigma<P>(pub P);

impl<P: TwoFormField> ScalarField for TraceSigma<P> {
    fn eval<T: Real, C: Chart>(&self, chart: &C, x: &[T]) -> T {
        let g = chart.metric(x);
        let ginv = g.inverse().expect("metric must be invertible");
        trace_sigma_generic(&ginv, &chart.complex_structure(x), &self.0.eval(chart, x))
    }
}

/// `‖φ(J·, J·) − φ‖`.
pub fn j_invariance_residual(phi: &Mat<f64>, j: &Mat<f64>) -> f64 {
    (&(&(&j.transpose() * phi) * j) - phi).max_abs()
}

/// The two-form `½ (dσ ∧ (JX)^♭ − d^cσ ∧ X^♭)` at a point.
pub fn hamiltonian_rhs(local: &Local<f64>, dsigma: &[f64], x: &[f64]) -> Mat<f64> {
    let jx_flat = local.lower(&local.apply_j(x));
    let x_flat = local.lower(x);
    let dc = dc_covector(&local.j, dsigma);
    (&wedge(dsigma, &jx_flat) - &wedge(&dc, &x_flat)).scale(0.5)
}

/// `∇_X φ − ½ (dσ ∧ (JX)^♭ − d^cσ ∧ X^♭)` as a two-form.
pub fn hamiltonian_defect<C: Chart, P: TwoFormField>(chart: &C, phi: &P, local: &Local<f64>, x: &[f64]) -> Mat<f64> {
    let lhs = cov_deriv_form_generic(chart, phi, x, local);
    let dsigma = partials(&TraceSigma(phi), chart, &local.x);
    &lhs - &hamiltonian_rhs(local, &dsigma, x)
}

/// The Hamiltonian defect evaluated on `(Y, Z)`.
pub fn hamiltonian_residual<C: Chart, P: TwoFormField>(
    chart: &C,
    phi: &P,
    local: &Local<f64>,
    x: &[f64],
    y: &[f64],
    z: &[f64],
) -> f64 {
    hamiltonian_defect(chart, phi, local, x).bilinear(y, z)
}

/// `𝔖 ∇_X φ(Y, JZ) − 𝔖 dσ(X) g(Y, Z)` over cyclic permutations of `(X, Y, Z)`.
pub fn cyclic_consequence_residual<C: Chart, P: TwoFormField>(
    chart: &C,
    phi: &P,
    local: &Local<f64>,
    x: &[f64],
    y: &[f64],
    z: &[f64],
) -> f64 {
    let dsigma = partials(&TraceSigma(phi), chart, &local.x);
    let term = |a: &[f64], b: &[f64], c: &[f64]| {
        let nabla = cov_deriv_form_generic(chart, phi, a, local);
        nabla.bilinear(b, &local.apply_j(c)) - crate::linalg::dot(&dsigma, a) * local.inner(b, c)
    };
    term(x, y, z) + term(z, x, y) + term(y, z, x)
}

/// `S` with `g(SX, Y) = φ(X, JY) − σ g(X, Y)`.
#[derive(Clone, Copy, Debug)]
pub struct SFromPhi<P>(pub P);

impl<P: TwoFormField> EndoField for SFromPhi<P> {
    fn eval<T: Real, C: Chart>(&self, chart: &C, x: &[T]) -> Mat<T> {
        let g = chart.metric(x);
        let ginv = g.inverse().expect("metric must be invertible");
        let j = chart.complex_structure(x);
        let phi = self.0.eval(chart, x);
        let sigma = trace_sigma_generic(&ginv, &j, &phi);
        let b = &(&phi * &j) - &g.scale(sigma);
        &ginv * &b.transpose()
    }
}

/// `φ(X, Y) = S(JX, Y) − (μ + λ) ω(X, Y)` for `S` with eigenvalues `λ`
/// (multiplicity 2) and `μ`.
#[derive(Clone, Copy, Debug)]
pub struct PhiFromS<S> {
    pub s: S,
    pub lambda: f64,
}

impl<S: EndoField> TwoFormField for PhiFromS<S> {
    fn eval<T: Real, C: Chart>(&self, chart: &C, x: &[T]) -> Mat<T> {
        let g = chart.metric(x);
        let j = chart.complex_structure(x);
        let s = self.s.eval(chart, x);
        let mu = MuField { s: &self.s, lambda: self.lambda }.eval(chart, x);
        let s_bil = &s.transpose() * &g;
        let omega = KahlerForm.eval(chart, x);
        &(&j.transpose() * &s_bil) - &omega.scale(mu + self.lambda)
    }
}

pub fn s_from_phi<P: TwoFormField>(phi: P) -> SFromPhi<P> {
    SFromPhi(phi)
}

pub fn phi_from_s<S: EndoField>(s: S, lambda: f64) -> PhiFromS<S> {
    PhiFromS { s, lambda }
}

/// Sample directions for a checked conversion: `(p, X, Y, Z)`.
pub type Probe = (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>);

/// [`s_from_phi`] after confirming the Hamiltonian condition on the probes.
pub fn s_from_phi_checked<C: Chart, P: TwoFormField>(chart: &C, phi: P, probes: &[Probe], tol: f64) -> Result<SFromPhi<P>> {
    let mut worst: f64 = 0.0;
    for (p, x, y, z) in probes {
        let local = Local::at(chart, p)?;
        worst = worst.max(fabs(hamiltonian_residual(chart, &phi, &local, x, y, z)));
    }
    if !(worst <= tol) {
        return Err(Error::NotHamiltonian { residual: worst });
    }
    Ok(SFromPhi(phi))
}

/// [`phi_from_s`] after confirming the Killing condition on the probes.
pub fn phi_from_s_checked<C: Chart, S: EndoField>(
    chart: &C,
    s: S,
    lambda: f64,
    probes: &[Probe],
    tol: f64,
) -> Result<PhiFromS<S>> {
    let mut worst: f64 = 0.0;
    for (p, x, y, z) in probes {
        let local = Local::at(chart, p)?;
        worst = worst.max(fabs(cyclic_killing_residual(chart, &s, &local, x, y, z)));
    }
    if !(worst <= tol) {
        return Err(Error::NotKilling { residual: worst });
    }
    Ok(PhiFromS { s, lambda })
}

/// Parallel shift `S' − S = k·I` after a round trip, and the deviation of
/// `S' − S` from a multiple of the identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoundTrip {
    pub shift: f64,
    pub non_scalar: f64,
}

pub fn round_trip<C: Chart, S: EndoField>(chart: &C, s: &S, lambda: f64, p: &[f64]) -> RoundTrip {
    let back = SFromPhi(PhiFromS { s, lambda }).eval(chart, p);
    let diff = &back - &s.eval(chart, p);
    let n = p.len();
    let shift = diff.trace() / n as f64;
    let non_scalar = (&diff - &Mat::identity(n).scale(shift)).max_abs();
    RoundTrip { shift, non_scalar }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::FlatChart;

    #[test]
    fn kahler_form_has_trace_n() {
        let chart = FlatChart::new(6, 1.0);
        let s = trace_sigma(&chart, &KahlerForm, &[0.0; 6]).unwrap();
        assert!((s - 3.0).abs() < 1e-15);
    }

    #[test]
    fn kahler_form_is_hamiltonian_with_constant_sigma() {
        let chart = FlatChart::new(4, 1.0);
        let local = Local::at(&chart, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        let r = hamiltonian_residual(&chart, &KahlerForm, &local, &[1.0, 0.0, 0.5, 0.0], &[0.0, 1.0, 0.0, 0.0], &[0.3, 0.0, 0.0, 1.0]);
        assert_eq!(r, 0.0);
    }

    #[test]
    fn s_from_omega_is_scalar() {
        // φ(X, JY) − n g = g(JX, JY) − n g = (1 − n) g
        let chart = FlatChart::new(6, 1.0);
        let s = SFromPhi(KahlerForm).eval(&chart, &[0.1; 6]);
        assert!((&s - &Mat::identity(6).scale(-2.0)).max_abs() < 1e-15);
    }
}
