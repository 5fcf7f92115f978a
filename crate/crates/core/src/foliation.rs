//! Foliation properties of a distribution given by a projector field.
//!
//! A distribution `D` is represented by the smooth field `P_D` of
//! g-orthogonal projectors onto it; tangent vectors are extended to local
//! sections by `X̃(x) = P_D(x)·X`.

use crate::error::{Error, Result};
use crate::field::{partials, EndoField, ScalarField, VectorField};
use crate::geometry::{cov_deriv_vector_generic, lie_bracket, metric_norm, Chart, Local};
use crate::killing::{eigensplit, gap_tol, KillingCandidate, Part};
use crate::linalg::{dot, sub_vec, unit, Mat};
use crate::real::{fabs, Real};
use alloc::vec::Vec;

/// Section `x ↦ P(x)·v`.
#[derive(Clone, Debug)]
pub struct Extension<P> {
    pub projector: P,
    pub v: Vec<f64>,
}

impl<P: EndoField> VectorField for Extension<P> {
    fn eval<T: Real, C: Chart>(&self, chart: &C, x: &[T]) -> Vec<T> {
        let v: Vec<T> = self.v.iter().map(|&c| T::cst(c)).collect();
        self.projector.eval(chart, x).mat_vec(&v)
    }
}

pub fn extend<P: EndoField>(projector: P, v: &[f64]) -> Extension<P> {
    Extension { projector, v: v.to_vec() }
}

/// `(I − P)(p)·v`.
fn normal_part<C: Chart, P: EndoField>(chart: &C, proj: &P, p: &[f64], v: &[f64]) -> Vec<f64> {
    sub_vec(v, &proj.eval(chart, p).mat_vec(v))
}

/// `θ = d ln|μ| = dμ / μ` as a covector field.
#[derive(Clone, Copy, Debug)]
pub struct LogDifferential<F>(pub F);

impl<F: ScalarField> VectorField for LogDifferential<F> {
    fn eval<T: Real, C: Chart>(&self, chart: &C, x: &[T]) -> Vec<T> {
        let mu = self.0.eval(chart, x);
        partials(&self.0, chart, x).into_iter().map(|d| d / mu).collect()
    }
}

/// `(dα)_ij = ∂_i α_j − ∂_j α_i` for a covector field stored componentwise.
pub fn exterior_derivative_1form<C: Chart, A: VectorField>(chart: &C, alpha: &A, p: &[f64]) -> Mat<f64> {
    let n = p.len();
    let rows: Vec<Vec<f64>> = (0..n).map(|i| crate::field::d_vector(alpha, chart, p, &unit(n, i))).collect();
    Mat::from_fn(n, |i, j| rows[i][j] - rows[j][i])
}

fn theta_at<C: Chart, F: ScalarField>(chart: &C, mu: &F, p: &[f64]) -> Result<Vec<f64>> {
    let m = mu.eval(chart, p);
    if !(fabs(m) > gap_tol(fabs(m))) {
        return Err(Error::MuVanishes { mu: m });
    }
    Ok(LogDifferential(mu).eval(chart, p))
}

/// `‖(I − P)∇_X X̃‖` for `X ∈ D`.
pub fn totally_geodesic_residual<C: Chart, P: EndoField>(chart: &C, proj: &P, local: &Local<f64>, x: &[f64]) -> f64 {
    let ext = extend(proj, x);
    let nabla = cov_deriv_vector_generic(chart, &ext, x, local);
    metric_norm(local, &normal_part(chart, proj, &local.x, &nabla))
}

/// Umbilical identity `2(∇_X Ỹ)^⊥ = g(X,Y)ξ + ω(X,Y)Jξ` for a 2-dimensional
/// J-invariant `D`; `ξ` is the trace of `(∇ẽ_a ẽ_a)^⊥` over the orthonormal
/// frame `{e, Je}` built from `X`.
#[derive(Clone, Debug, PartialEq)]
pub struct Umbilical {
    pub residual: Vec<f64>,
    pub xi: Vec<f64>,
}

pub fn umbilical_identity_residual<C: Chart, P: EndoField>(
    chart: &C,
    proj: &P,
    local: &Local<f64>,
    x: &[f64],
    y: &[f64],
) -> Result<Umbilical> {
    let pm = proj.eval(chart, &local.x);
    let rank = pm.trace();
    if fabs(rank - 2.0) > 1e-6 {
        return Err(Error::DimensionMismatch { expected: 2, actual: libm::round(rank) as usize });
    }
    let norm = local.norm(x);
    if !(norm > 0.0) {
        return Err(Error::DegenerateSample("zero vector in umbilical test"));
    }
    let e1: Vec<f64> = x.iter().map(|v| v / norm).collect();
    let e2 = local.apply_j(&e1);
    let second = |a: &[f64], b: &[f64]| -> Vec<f64> {
        let nabla = cov_deriv_vector_generic(chart, &extend(proj, b), a, local);
        normal_part(chart, proj, &local.x, &nabla)
    };
    let s1 = second(&e1, &e1);
    let s2 = second(&e2, &e2);
    let xi: Vec<f64> = s1.iter().zip(&s2).map(|(a, b)| a + b).collect();
    let jxi = local.apply_j(&xi);
    let gxy = local.inner(x, y);
    let wxy = local.omega().bilinear(x, y);
    let lhs = second(x, y);
    let residual = (0..x.len()).map(|k| 2.0 * lhs[k] - gxy * xi[k] - wxy * jxi[k]).collect();
    Ok(Umbilical { residual, xi })
}

/// `‖(I − P)[Ẽ₁, Ẽ₂]‖`.
pub fn integrability_residual<C: Chart, P: EndoField>(chart: &C, proj: &P, local: &Local<f64>, e1: &[f64], e2: &[f64]) -> f64 {
    let br = lie_bracket(chart, &extend(proj, e1), &extend(proj, e2), &local.x);
    metric_norm(local, &normal_part(chart, proj, &local.x, &br))
}

/// `(L_Ṽ g)(X, Y) − θ(V) g(X, Y)` with `θ = d ln|μ|`.
pub fn conformal_residual<C: Chart, P: EndoField, F: ScalarField>(
    chart: &C,
    proj: &P,
    mu: &F,
    local: &Local<f64>,
    v: &[f64],
    x: &[f64],
    y: &[f64],
) -> Result<f64> {
    let theta = theta_at(chart, mu, &local.x)?;
    let ext = extend(proj, v);
    let lie_g = local.inner(&cov_deriv_vector_generic(chart, &ext, x, local), y)
        + local.inner(x, &cov_deriv_vector_generic(chart, &ext, y, local));
    Ok(lie_g - dot(&theta, v) * local.inner(x, y))
}

/// `‖dθ‖` for `θ = d ln|μ|`.
pub fn homothetic_residual<C: Chart, F: ScalarField>(chart: &C, mu: &F, p: &[f64]) -> Result<f64> {
    theta_at(chart, mu, p)?;
    Ok(exterior_derivative_1form(chart, &LogDifferential(mu), p).max_abs())
}

/// `‖(I − P)(∇_{JX}Ṽ − J∇_X Ṽ)‖` for `V ∈ D`.
pub fn holomorphic_foliation_residual<C: Chart, P: EndoField>(
    chart: &C,
    proj: &P,
    local: &Local<f64>,
    x: &[f64],
    v: &[f64],
) -> f64 {
    let ext = extend(proj, v);
    let jx = local.apply_j(x);
    let a = cov_deriv_vector_generic(chart, &ext, &jx, local);
    let b = local.apply_j(&cov_deriv_vector_generic(chart, &ext, x, local));
    metric_norm(local, &normal_part(chart, proj, &local.x, &sub_vec(&a, &b)))
}

/// `2(∇_X Ỹ)_𝒱 + g(X,Y)θ^♯ + ω(X,Y)Jθ^♯` for horizontal `X`, `Y`, where `Ỹ`
/// is extended by `I − P_𝒱`.
pub fn structure_identity_residual<C: Chart, P: EndoField, F: ScalarField>(
    chart: &C,
    vertical: &P,
    mu: &F,
    local: &Local<f64>,
    x: &[f64],
    y: &[f64],
) -> Result<Vec<f64>> {
    let theta = theta_at(chart, mu, &local.x)?;
    let theta_sharp = local.raise(&theta);
    let j_theta = local.apply_j(&theta_sharp);
    let horizontal = Complement(vertical);
    let nabla = cov_deriv_vector_generic(chart, &extend(&horizontal, y), x, local);
    let vert = vertical.eval(chart, &local.x).mat_vec(&nabla);
    let gxy = local.inner(x, y);
    let wxy = local.omega().bilinear(x, y);
    Ok((0..x.len()).map(|k| 2.0 * vert[k] + gxy * theta_sharp[k] + wxy * j_theta[k]).collect())
}

/// Coefficient `α(X, Y)` in `[X̃, Ỹ]_𝒱 = α(X, Y) Jθ^♯`, together with the part
/// of `[X̃, Ỹ]_𝒱` not along `Jθ^♯`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlphaRecovery {
    pub alpha: f64,
    pub omega: f64,
    pub off_axis: f64,
}

impl AlphaRecovery {
    /// `|α + ω|` combined with the off-axis part.
    pub fn residual(&self) -> f64 {
        fabs(self.alpha + self.omega).max(self.off_axis)
    }
}

pub fn alpha_recovery<C: Chart, P: EndoField, F: ScalarField>(
    chart: &C,
    vertical: &P,
    mu: &F,
    local: &Local<f64>,
    x: &[f64],
    y: &[f64],
) -> Result<AlphaRecovery> {
    let theta = theta_at(chart, mu, &local.x)?;
    let j_theta = local.apply_j(&local.raise(&theta));
    let horizontal = Complement(vertical);
    let br = lie_bracket(chart, &extend(&horizontal, x), &extend(&horizontal, y), &local.x);
    let vert = vertical.eval(chart, &local.x).mat_vec(&br);
    let nn = local.inner(&j_theta, &j_theta);
    if !(nn > 0.0) {
        return Err(Error::DegenerateSample("theta vanishes"));
    }
    let alpha = local.inner(&vert, &j_theta) / nn;
    let rest: Vec<f64> = vert.iter().zip(&j_theta).map(|(v, t)| v - alpha * t).collect();
    Ok(AlphaRecovery { alpha, omega: local.omega().bilinear(x, y), off_axis: metric_norm(local, &rest) })
}

/// `I − P`.
#[derive(Clone, Copy, Debug)]
pub struct Complement<P>(pub P);

impl<P: EndoField> EndoField for Complement<P> {
    fn eval<T: Real, C: Chart>(&self, chart: &C, x: &[T]) -> Mat<T> {
        &Mat::identity(x.len()) - &self.0.eval(chart, x)
    }
}

/// Frames and `θ` of the vertical distribution at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct DistributionSample {
    pub p: Vec<f64>,
    pub vertical: Vec<Vec<f64>>,
    pub horizontal: Vec<Vec<f64>>,
    /// `θ = d ln|μ|` as a covector; zero when `μ` is constant.
    pub theta: Vec<f64>,
    /// Mean-curvature vector of `ℋ`, `−θ^♯`.
    pub xi: Vec<f64>,
}

impl DistributionSample {
    /// `max |θ(h)|` over the horizontal frame.
    pub fn theta_horizontal_support(&self) -> f64 {
        self.horizontal.iter().map(|h| fabs(dot(&self.theta, h))).fold(0.0, f64::max)
    }
}

pub fn distribution_sample<C: Chart, S: EndoField>(
    chart: &C,
    cand: &KillingCandidate<S>,
    local: &Local<f64>,
) -> Result<DistributionSample> {
    let split = eigensplit(chart, &cand.s, cand.lambda, local)?;
    let mu = cand.mu();
    let theta = if partials(&mu, chart, &local.x).iter().all(|d| *d == 0.0) {
        alloc::vec![0.0; local.dim()]
    } else {
        theta_at(chart, &mu, &local.x)?
    };
    let xi = local.raise(&theta).into_iter().map(|v| -v).collect();
    Ok(DistributionSample {
        p: local.x.clone(),
        vertical: split.vertical_basis,
        horizontal: split.horizontal_basis,
        theta,
        xi,
    })
}

/// Projector field onto one eigendistribution of a candidate.
pub fn projector_of<S: EndoField>(cand: &KillingCandidate<S>, part: Part) -> crate::killing::EigenProjector<&S> {
    cand.projector(part)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ConstantEndo;
    use crate::geometry::FlatChart;

    fn plane(n: usize, axes: &[usize]) -> ConstantEndo {
        ConstantEndo(Mat::from_fn(n, |i, j| if i == j && axes.contains(&i) { 1.0 } else { 0.0 }))
    }

    #[test]
    fn coordinate_plane_is_totally_geodesic_and_integrable() {
        let chart = FlatChart::new(4, 1.0);
        let local = Local::at(&chart, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        let p = plane(4, &[0, 1]);
        assert_eq!(totally_geodesic_residual(&chart, &p, &local, &[1.0, 2.0, 0.0, 0.0]), 0.0);
        assert_eq!(integrability_residual(&chart, &p, &local, &unit(4, 0), &unit(4, 1)), 0.0);
        let u = umbilical_identity_residual(&chart, &p, &local, &unit(4, 0), &unit(4, 1)).unwrap();
        assert!(u.residual.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn three_plane_rejected_by_umbilical_test() {
        let chart = FlatChart::new(4, 1.0);
        let local = Local::at(&chart, &[0.0; 4]).unwrap();
        let r = umbilical_identity_residual(&chart, &plane(4, &[0, 1, 2]), &local, &unit(4, 0), &unit(4, 1));
        assert_eq!(r, Err(Error::DimensionMismatch { expected: 2, actual: 3 }));
    }
}
