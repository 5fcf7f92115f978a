//! Killing tensors: residuals, eigenstructure and the first-order identities
//! satisfied by their eigenvalues and eigendistributions.
//!
//! A symmetric `(1,1)` tensor `S` is Killing when the cyclic sum
//! `g((∇_X S)Y, Z) + g((∇_Z S)X, Y) + g((∇_Y S)Z, X)` vanishes identically.
//! Throughout, the candidates have two eigenvalues: a constant `λ` of
//! multiplicity 2 (the vertical distribution `𝒱`) and a function `μ` of
//! multiplicity `2n − 2` (the horizontal distribution `ℋ`).

use crate::error::{Error, Result};
use crate::field::{
    d_scalar, partials, EndoField, Gradient, JGradient, ScalarField, VectorField,
};
use crate::geometry::{
    cov_deriv_endo_generic, cov_deriv_vector_generic, geodesic, Chart, Local, Trajectory,
};
use crate::linalg::{cholesky, dot, max_abs_vec, symmetric_eigen, Mat};
use crate::real::{fabs, Real};
use alloc::vec::Vec;

/// Relative spectral gap below which the two eigenvalue clusters are treated
/// as merged.
pub const GAP_TOL_REL: f64 = 1e-6;

pub fn gap_tol(s_op_norm: f64) -> f64 {
    GAP_TOL_REL * (1.0 + s_op_norm)
}

/// `SX = 0` on `𝒱 = span{∇τ, J∇τ}`, `SX = (τ − c)X` on `ℋ = 𝒱^⊥`.
///
/// In closed form `S = (τ − c)(I − P_𝒱)` with
/// `P_𝒱 = (∇τ ⊗ dτ + J∇τ ⊗ (J∇τ)^♭) / Q`, `Q = g(∇τ, ∇τ)`; `S = 0` where `Q = 0`.
#[derive(Clone, Copy, Debug)]
pub struct SpecialKillingTensor<F> {
    pub potential: F,
    pub c: f64,
}

/// Orthogonal projector onto `span{∇τ, J∇τ}` plus the data used to build it.
pub(crate) struct PotentialFrame<T> {
    pub g: Mat<T>,
    pub grad: Vec<T>,
    pub dtau: Vec<T>,
    pub q: T,
}

pub(crate) fn potential_frame<T: Real, C: Chart, F: ScalarField>(potential: &F, chart: &C, x: &[T]) -> PotentialFrame<T> {
    let g = chart.metric(x);
    let dtau = partials(potential, chart, x);
    let ginv = g.inverse().expect("metric must be invertible");
    let grad = ginv.mat_vec(&dtau);
    let q = dot(&dtau, &grad);
    PotentialFrame { g, grad, dtau, q }
}

/// `P_𝒱` at a point from the potential, or `None` where `dτ = 0`.
pub fn vertical_projector_from_potential<T: Real, C: Chart, F: ScalarField>(
    potential: &F,
    chart: &C,
    x: &[T],
) -> Option<Mat<T>> {
    let fr = potential_frame(potential, chart, x);
    if fr.q.value() == 0.0 {
        return None;
    }
    let j = chart.complex_structure(x);
    let xi = j.mat_vec(&fr.grad);
    let xi_flat = fr.g.mat_vec(&xi);
    let n = x.len();
    Some(Mat::from_fn(n, |a, b| (fr.grad[a] * fr.dtau[b] + xi[a] * xi_flat[b]) / fr.q))
}

impl<F: ScalarField> EndoField for SpecialKillingTensor<F> {
    fn eval<T: Real, C: Chart>(&self, chart: &C, x: &[T]) -> Mat<T> {
        let n = x.len();
        let shifted = self.potential.eval(chart, x) - self.c;
        match vertical_projector_from_potential(&self.potential, chart, x) {
            Some(pv) => (&Mat::identity(n) - &pv).scale(shifted),
            None => Mat::zeros(n),
        }
    }
}

/// `S − λ·I`.
#[derive(Clone, Copy, Debug)]
pub struct Shifted<S> {
    pub inner: S,
    pub lambda: f64,
}

impl<S: EndoField> EndoField for Shifted<S> {
    fn eval<T: Real, C: Chart>(&self, chart: &C, x: &[T]) -> Mat<T> {
        let s = self.inner.eval(chart, x);
        &s - &Mat::identity(x.len()).scale(T::cst(self.lambda))
    }
}

/// The nonconstant eigenvalue `μ = (tr S − 2λ) / (2n − 2)`.
#[derive(Clone, Copy, Debug)]
pub struct MuField<S> {
    pub s: S,
    pub lambda: f64,
}

impl<S: EndoField> ScalarField for MuField<S> {
    fn eval<T: Real, C: Chart>(&self, chart: &C, x: &[T]) -> T {
        let n = x.len() as f64;
        (self.s.eval(chart, x).trace() - 2.0 * self.lambda) / (n - 2.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Vertical,
    Horizontal,
}

/// Spectral projector field of `S` for the two-eigenvalue case:
/// `P_ℋ = (S − λI)/(μ − λ)`, `P_𝒱 = I − P_ℋ`. Smooth wherever `μ ≠ λ`.
#[derive(Clone, Copy, Debug)]
pub struct EigenProjector<S> {
    pub s: S,
    pub lambda: f64,
    pub part: Part,
}

impl<S: EndoField> EndoField for EigenProjector<S> {
    fn eval<T: Real, C: Chart>(&self, chart: &C, x: &[T]) -> Mat<T> {
        let n = x.len();
        let s = self.s.eval(chart, x);
        let mu = (s.trace() - 2.0 * self.lambda) / (n as f64 - 2.0);
        let id = Mat::identity(n);
        let ph = (&s - &id.scale(T::cst(self.lambda))).scale((mu - self.lambda).recip());
        match self.part {
            Part::Horizontal => ph,
            Part::Vertical => &id - &ph,
        }
    }
}

/// Section extension `X̃ = P(x)·v` of a tangent vector `v`.
#[derive(Clone, Debug)]
pub struct ProjectedVector<S> {
    pub projector: EigenProjector<S>,
    pub v: Vec<f64>,
}

impl<S: EndoField> VectorField for ProjectedVector<S> {
    fn eval<T: Real, C: Chart>(&self, chart: &C, x: &[T]) -> Vec<T> {
        let v: Vec<T> = self.v.iter().map(|&c| T::cst(c)).collect();
        self.projector.eval(chart, x).mat_vec(&v)
    }
}

/// A candidate Killing tensor with eigenvalue `λ` (multiplicity 2) and `μ`
/// (multiplicity `2n − 2`).
#[derive(Clone, Copy, Debug)]
pub struct KillingCandidate<S> {
    pub s: S,
    pub lambda: f64,
}

impl<S: EndoField> KillingCandidate<S> {
    pub fn new(s: S, lambda: f64) -> Self {
        Self { s, lambda }
    }

    pub fn mu(&self) -> MuField<&S> {
        MuField { s: &self.s, lambda: self.lambda }
    }

    pub fn projector(&self, part: Part) -> EigenProjector<&S> {
        EigenProjector { s: &self.s, lambda: self.lambda, part }
    }

    pub fn extend(&self, part: Part, v: &[f64]) -> ProjectedVector<&S> {
        ProjectedVector { projector: self.projector(part), v: v.to_vec() }
    }

    /// `(‖gS − (gS)ᵀ‖, ‖JS − SJ‖)` at `p`: g-symmetry and J-invariance.
    pub fn structure_residuals<C: Chart>(&self, chart: &C, local: &Local<f64>) -> (f64, f64) {
        let s = self.s.eval(chart, &local.x);
        let b = local.endo_to_bilinear(&s);
        let sym = (&b - &b.transpose()).max_abs();
        let comm = (&(&local.j * &s) - &(&s * &local.j)).max_abs();
        (sym, comm)
    }
}

/// Shifts the spectrum by a constant: `S' = S − λ·I`.
pub fn shift_spectrum<S: EndoField>(candidate: KillingCandidate<S>, lambda: f64) -> KillingCandidate<Shifted<S>> {
    KillingCandidate { s: Shifted { inner: candidate.s, lambda }, lambda: candidate.lambda - lambda }
}

/// `T(X, Y, Z) = g((∇_X S)Y, Z)`.
fn nabla_s_form<C: Chart, S: EndoField>(chart: &C, s: &S, local: &Local<f64>, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
    let ds = cov_deriv_endo_generic(chart, s, x, local);
    local.inner(&ds.mat_vec(y), z)
}

/// Cyclic Killing sum `g(∇S(X,Y),Z) + g(∇S(Z,X),Y) + g(∇S(Y,Z),X)`.
pub fn cyclic_killing_residual<C: Chart, S: EndoField>(
    chart: &C,
    s: &S,
    local: &Local<f64>,
    x: &[f64],
    y: &[f64],
    z: &[f64],
) -> f64 {
    nabla_s_form(chart, s, local, x, y, z)
        + nabla_s_form(chart, s, local, z, x, y)
        + nabla_s_form(chart, s, local, y, z, x)
}

/// `g(∇S(X, X), X)`.
pub fn diag_killing_residual<C: Chart, S: EndoField>(chart: &C, s: &S, local: &Local<f64>, x: &[f64]) -> f64 {
    nabla_s_form(chart, s, local, x, x, x)
}

/// Recovers the cyclic residual from diagonal values over the eight sign
/// patterns: `C(X,Y,Z) = (1/16) Σ ε₁ε₂ε₃ D(ε₁X + ε₂Y + ε₃Z)`.
pub fn cyclic_from_diagonal<C: Chart, S: EndoField>(
    chart: &C,
    s: &S,
    local: &Local<f64>,
    x: &[f64],
    y: &[f64],
    z: &[f64],
) -> f64 {
    let mut acc = 0.0;
    for mask in 0..8u32 {
        let e = |bit: u32| if mask & (1 << bit) == 0 { 1.0 } else { -1.0 };
        let (e1, e2, e3) = (e(0), e(1), e(2));
        let v: Vec<f64> = (0..x.len()).map(|i| e1 * x[i] + e2 * y[i] + e3 * z[i]).collect();
        acc += e1 * e2 * e3 * diag_killing_residual(chart, s, local, &v);
    }
    acc / 16.0
}

/// Pointwise eigenstructure of a two-eigenvalue candidate.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSplit {
    pub vertical_basis: Vec<Vec<f64>>,
    pub horizontal_basis: Vec<Vec<f64>>,
    pub vertical_eigenvalues: Vec<f64>,
    pub horizontal_eigenvalues: Vec<f64>,
    /// `|mean(horizontal) − λ|`.
    pub gap: f64,
    /// Largest spread inside either cluster.
    pub spread: f64,
}

impl EigenSplit {
    /// `P_𝒱 = Σ v vᵀ g` over the vertical basis.
    pub fn vertical_projector(&self, local: &Local<f64>) -> Mat<f64> {
        let n = local.dim();
        let mut p = Mat::zeros(n);
        for v in &self.vertical_basis {
            let vf = local.lower(v);
            for a in 0..n {
                for b in 0..n {
                    p[(a, b)] += v[a] * vf[b];
                }
            }
        }
        p
    }

    pub fn horizontal_eigenvalue(&self) -> f64 {
        self.horizontal_eigenvalues.iter().sum::<f64>() / self.horizontal_eigenvalues.len() as f64
    }
}

/// Splits `T_pM` into the 2-dimensional `λ`-eigenspace and its complement.
///
/// The matrix is symmetrized in a g-orthonormal frame `E = L^{-T}`
/// (`g = L Lᵀ`), diagonalized by Jacobi rotations, and the two eigenpairs
/// closest to `λ` are taken as vertical.
pub fn eigensplit<C: Chart, S: EndoField>(chart: &C, s: &S, lambda: f64, local: &Local<f64>) -> Result<EigenSplit> {
    let n = local.dim();
    let smat = s.eval(chart, &local.x);
    let l = cholesky(&local.g).ok_or(Error::SingularMetric { min_eigenvalue: 0.0 })?;
    let lt = l.transpose();
    let lt_inv = lt.inverse().ok_or(Error::SingularMetric { min_eigenvalue: 0.0 })?;
    let m = &(&lt * &smat) * &lt_inv;
    let m = Mat::from_fn(n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    let (vals, vecs) = symmetric_eigen(&m);
    let op_norm = vals.iter().fold(0.0, |acc: f64, v| acc.max(fabs(*v)));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| fabs(vals[a] - lambda).total_cmp(&fabs(vals[b] - lambda)).then(a.cmp(&b)));
    let coord = |col: usize| -> Vec<f64> {
        let e: Vec<f64> = (0..n).map(|k| vecs[(k, col)]).collect();
        lt_inv.mat_vec(&e)
    };
    let (vert_idx, horiz_idx) = order.split_at(2);
    let mut vert_idx = vert_idx.to_vec();
    let mut horiz_idx = horiz_idx.to_vec();
    vert_idx.sort_unstable();
    horiz_idx.sort_unstable();
    let vertical_eigenvalues: Vec<f64> = vert_idx.iter().map(|&i| vals[i]).collect();
    let horizontal_eigenvalues: Vec<f64> = horiz_idx.iter().map(|&i| vals[i]).collect();
    let spread_of = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    };
    let mean_h = horizontal_eigenvalues.iter().sum::<f64>() / horizontal_eigenvalues.len() as f64;
    let gap = fabs(mean_h - lambda);
    let threshold = gap_tol(op_norm);
    if !(gap > threshold) {
        return Err(Error::DegenerateSpectrum { gap, threshold });
    }
    let spread = f64::max(spread_of(&vertical_eigenvalues), spread_of(&horizontal_eigenvalues));
    if spread > 0.5 * gap {
        return Err(Error::DegenerateSpectrum { gap: gap - spread, threshold });
    }
    Ok(EigenSplit {
        vertical_basis: vert_idx.iter().map(|&i| coord(i)).collect(),
        horizontal_basis: horiz_idx.iter().map(|&i| coord(i)).collect(),
        vertical_eigenvalues,
        horizontal_eigenvalues,
        gap,
        spread,
    })
}

/// Residual of `∇S(X, X) = −½ ∇λ_i ‖X‖²` and of `dλ_i(X) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialIdentity {
    pub residual: Vec<f64>,
    pub kernel: f64,
}

/// Eigenvalue `λ_i` of the requested part as a derivative-capable value.
fn eigen_d<C: Chart, S: EndoField>(chart: &C, cand: &KillingCandidate<S>, part: Part, p: &[f64], v: &[f64]) -> f64 {
    match part {
        Part::Vertical => 0.0,
        Part::Horizontal => d_scalar(&cand.mu(), chart, p, v),
    }
}

fn eigen_value<C: Chart, S: EndoField>(chart: &C, cand: &KillingCandidate<S>, part: Part, p: &[f64]) -> f64 {
    match part {
        Part::Vertical => cand.lambda,
        Part::Horizontal => cand.mu().eval(chart, p),
    }
}

pub fn prop11_radial_identity<C: Chart, S: EndoField>(
    chart: &C,
    cand: &KillingCandidate<S>,
    local: &Local<f64>,
    x: &[f64],
    part: Part,
) -> RadialIdentity {
    let ds = cov_deriv_endo_generic(chart, &cand.s, x, local);
    let lhs = ds.mat_vec(x);
    let norm2 = local.inner(x, x);
    let grad_lambda = match part {
        Part::Vertical => alloc::vec![0.0; x.len()],
        Part::Horizontal => local.raise(&partials(&cand.mu(), chart, &local.x)),
    };
    let residual = lhs.iter().zip(&grad_lambda).map(|(&a, &b)| a + 0.5 * b * norm2).collect();
    RadialIdentity { residual, kernel: eigen_d(chart, cand, part, &local.x, x) }
}

/// `g(∇_X X̃, Y) − ½ (Yλ_i)/(λ_j − λ_i) ‖X‖²` with `X ∈ D_i`, `Y ∈ D_j`.
pub fn prop11_mixed_identity<C: Chart, S: EndoField>(
    chart: &C,
    cand: &KillingCandidate<S>,
    local: &Local<f64>,
    x: &[f64],
    part_x: Part,
    y: &[f64],
) -> Result<f64> {
    let part_y = match part_x {
        Part::Vertical => Part::Horizontal,
        Part::Horizontal => Part::Vertical,
    };
    let li = eigen_value(chart, cand, part_x, &local.x);
    let lj = eigen_value(chart, cand, part_y, &local.x);
    let s_norm = cand.s.eval(chart, &local.x).max_abs();
    let threshold = gap_tol(s_norm);
    if !(fabs(lj - li) > threshold) {
        return Err(Error::DegenerateSpectrum { gap: fabs(lj - li), threshold });
    }
    let ext = cand.extend(part_x, x);
    let nabla = cov_deriv_vector_generic(chart, &ext, x, local);
    let lhs = local.inner(&nabla, y);
    let rhs = 0.5 * eigen_d(chart, cand, part_x, &local.x, y) / (lj - li) * local.inner(x, x);
    Ok(lhs - rhs)
}

/// Vertical part of `∇_X X̃` for horizontal `X` minus `−‖X‖² ∇μ / (2μ)`,
/// the specialization of the mixed identity to `λ = 0`.
pub fn horizontal_mean_curvature_residual<C: Chart, S: EndoField>(
    chart: &C,
    cand: &KillingCandidate<S>,
    local: &Local<f64>,
    x: &[f64],
) -> Result<Vec<f64>> {
    let mu = cand.mu().eval(chart, &local.x);
    if !(fabs(mu) > gap_tol(fabs(mu))) {
        return Err(Error::MuVanishes { mu });
    }
    let ext = cand.extend(Part::Horizontal, x);
    let nabla = cov_deriv_vector_generic(chart, &ext, x, local);
    let pv = cand.projector(Part::Vertical).eval(chart, &local.x);
    let vert = pv.mat_vec(&nabla);
    let grad_mu = local.raise(&partials(&cand.mu(), chart, &local.x));
    let norm2 = local.inner(x, x);
    Ok(vert.iter().zip(&grad_mu).map(|(&a, &b)| a + norm2 * b / (2.0 * (mu - cand.lambda))).collect())
}

/// Drift of `T(ċ, ċ) = g(Sċ, ċ)` and of `g(ċ, ċ)` along a geodesic.
#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicDrift {
    pub drift: f64,
    pub energy_drift: f64,
    pub truncated: bool,
    pub t_reached: f64,
}

pub fn drift_along<C: Chart, S: EndoField>(chart: &C, s: &S, traj: &Trajectory) -> GeodesicDrift {
    let quad = |x: &[f64], v: &[f64]| -> (f64, f64) {
        let g = chart.metric(x);
        let sm = s.eval(chart, x);
        (g.bilinear(&sm.mat_vec(v), v), g.bilinear(v, v))
    };
    let (t0, e0) = quad(&traj.points[0], &traj.velocities[0]);
    let mut drift: f64 = 0.0;
    let mut energy_drift: f64 = 0.0;
    for (x, v) in traj.points.iter().zip(&traj.velocities) {
        let (t, e) = quad(x, v);
        drift = drift.max(fabs(t - t0));
        energy_drift = energy_drift.max(fabs(e - e0));
    }
    GeodesicDrift {
        drift,
        energy_drift,
        truncated: traj.truncated,
        t_reached: traj.times.last().copied().unwrap_or(0.0),
    }
}

/// `max_t |T(ċ,ċ)(t) − T(ċ,ċ)(0)|` along the geodesic from `(p, v)`.
pub fn geodesic_invariant<C: Chart, S: EndoField>(
    chart: &C,
    s: &S,
    p: &[f64],
    v: &[f64],
    t_end: f64,
    steps: usize,
) -> Result<GeodesicDrift> {
    let traj = geodesic(chart, p, v, t_end, steps)?;
    Ok(drift_along(chart, s, &traj))
}

/// `‖(I − P_𝒱) J P_𝒱‖`: J-invariance of the vertical eigenspace.
pub fn vertical_j_invariance(split: &EigenSplit, local: &Local<f64>) -> f64 {
    let pv = split.vertical_projector(local);
    let comp = &Mat::identity(local.dim()) - &pv;
    (&(&comp * &local.j) * &pv).max_abs()
}

/// Largest `‖S v − λ_v v‖` over the basis vectors of a split.
pub fn split_eigen_residual<C: Chart, S: EndoField>(chart: &C, s: &S, split: &EigenSplit, local: &Local<f64>) -> f64 {
    let smat = s.eval(chart, &local.x);
    let mut worst: f64 = 0.0;
    let pairs = split
        .vertical_basis
        .iter()
        .zip(&split.vertical_eigenvalues)
        .chain(split.horizontal_basis.iter().zip(&split.horizontal_eigenvalues));
    for (v, &ev) in pairs {
        let r: Vec<f64> = smat.mat_vec(v).iter().zip(v).map(|(&a, &b)| a - ev * b).collect();
        worst = worst.max(max_abs_vec(&r));
    }
    worst
}

/// Convenience re-exports of potential-derived vector fields.
pub fn gradient_field<F: ScalarField>(f: F) -> Gradient<F> {
    Gradient(f)
}

pub fn killing_potential_field<F: ScalarField>(f: F) -> JGradient<F> {
    JGradient(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ConstantEndo, Coordinate, ScaledIdentity};
    use crate::geometry::FlatChart;
    use crate::models::spec_by_id;

    fn vecs() -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        (vec![0.3, -0.7, 0.2, 0.5], vec![-0.1, 0.4, 0.9, -0.6], vec![0.8, 0.1, -0.3, 0.2])
    }

    #[test]
    fn scalar_multiple_of_identity_is_killing() {
        let m = spec_by_id("cp2-radial").unwrap().build().unwrap();
        let local = Local::at(&m, &[0.4, -0.2, 0.1, 0.3]).unwrap();
        let s = ConstantEndo(Mat::identity(4).scale(2.5));
        let (x, y, z) = vecs();
        assert_eq!(cyclic_killing_residual(&m, &s, &local, &x, &y, &z), 0.0);
    }

    #[test]
    fn scaled_identity_matches_closed_form() {
        // ∇(f·I)(X, Y) = df(X) Y, so the cyclic sum is the symmetrized df ⊗ g
        let chart = FlatChart::new(4, 1.0);
        let local = Local::at(&chart, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        let s = ScaledIdentity(Coordinate(0));
        let (x, y, z) = vecs();
        let dot = crate::linalg::dot;
        let expected = x[0] * dot(&y, &z) + z[0] * dot(&x, &y) + y[0] * dot(&z, &x);
        assert!((cyclic_killing_residual(&chart, &s, &local, &x, &y, &z) - expected).abs() < 1e-14);
        assert!((diag_killing_residual(&chart, &s, &local, &x) - x[0] * dot(&x, &x)).abs() < 1e-14);
        let recovered = cyclic_from_diagonal(&chart, &s, &local, &x, &y, &z);
        assert!((recovered - expected).abs() < 1e-14);
    }

    #[test]
    fn identity_has_degenerate_spectrum() {
        let chart = FlatChart::new(4, 1.0);
        let local = Local::at(&chart, &[0.0; 4]).unwrap();
        let r = eigensplit(&chart, &ConstantEndo(Mat::identity(4)), 1.0, &local);
        assert!(matches!(r, Err(Error::DegenerateSpectrum { .. })));
    }

    #[test]
    fn product_split_is_the_first_factor() {
        let m = spec_by_id("product-1x1").unwrap().build().unwrap();
        let cand = m.candidate();
        let local = Local::at(&m, &[0.3, 0.1, -0.4, 0.2]).unwrap();
        let split = eigensplit(&m, &cand.s, 0.0, &local).unwrap();
        assert!(split.vertical_eigenvalues.iter().all(|v| v.abs() < 1e-14));
        assert!((split.horizontal_eigenvalue() - 1.0).abs() < 1e-14);
        let pv = split.vertical_projector(&local);
        let expected = Mat::from_fn(4, |i, j| if i == j && i < 2 { 1.0 } else { 0.0 });
        assert!((&pv - &expected).max_abs() < 1e-12);
    }

    #[test]
    fn shifting_moves_eigenvalues_and_keeps_residual() {
        let m = spec_by_id("cp2-radial").unwrap().build().unwrap();
        let local = Local::at(&m, &[0.5, 0.2, -0.3, 0.4]).unwrap();
        let cand = m.candidate();
        let (x, y, z) = vecs();
        let before = cyclic_killing_residual(&m, &cand.s, &local, &x, &y, &z);
        let shifted = shift_spectrum(cand, 3.0);
        assert_eq!(shifted.lambda, -3.0);
        let after = cyclic_killing_residual(&m, &shifted.s, &local, &x, &y, &z);
        assert!((before - after).abs() < 1e-14);
        let split = eigensplit(&m, &shifted.s, shifted.lambda, &local).unwrap();
        assert!(split.vertical_eigenvalues.iter().all(|v| (v + 3.0).abs() < 1e-12));
    }

    #[test]
    fn identity_drift_is_energy_drift() {
        let m = spec_by_id("cp2-radial").unwrap().build().unwrap();
        let d = geodesic_invariant(&m, &ConstantEndo(Mat::identity(4)), &[0.2, 0.1, -0.3, 0.0], &[0.5, -0.2, 0.1, 0.7], 1.0, 512)
            .unwrap();
        assert!(!d.truncated);
        assert!((d.drift - d.energy_drift).abs() < 1e-15);
        assert!(d.energy_drift < 1e-8);
    }
}
