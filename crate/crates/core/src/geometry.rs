//! Chart-based Riemannian calculus.
//!
//! Everything is computed in a single coordinate chart. Metric derivatives
//! come from forward-mode AD; the `fd_*` functions form an independent
//! central-difference oracle that never touches dual numbers.

use crate::dual::lift_axis;
use crate::error::{Error, Result};
use crate::field::{d_endo, d_two_form, d_vector, partials, EndoField, ScalarField, TwoFormField, VectorField};
use crate::linalg::{dot, symmetric_eigen, Mat};
use crate::real::{fabs, fsqrt, Real};
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

/// Minimum admissible eigenvalue of the metric.
pub const PD_THRESHOLD: f64 = 1e-10;
/// Default finite-difference step for the oracle.
pub const DEFAULT_FD_STEP: f64 = 1e-4;
/// Default geodesic integration steps per unit time.
pub const DEFAULT_GEODESIC_STEPS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, v: f64, margin: f64) -> bool {
        v > self.lo + margin && v < self.hi - margin
    }
}

/// A coordinate box carrying a metric and an almost complex structure.
pub trait Chart {
    fn dim(&self) -> usize;

    fn bounds(&self) -> &[Interval];

    /// `g_ij(x)`, symmetric positive definite.
    fn metric<T: Real>(&self, x: &[T]) -> Mat<T>;

    /// `J^i_j(x)`.
    fn complex_structure<T: Real>(&self, x: &[T]) -> Mat<T>;

    fn contains(&self, x: &[f64], margin: f64) -> bool {
        x.len() == self.dim() && self.bounds().iter().zip(x).all(|(b, &v)| b.contains(v, margin))
    }
}

/// Flat `ℝ^{2n}` with the standard complex structure on `(x₁, y₁, x₂, y₂, …)`.
#[derive(Clone, Debug)]
pub struct FlatChart {
    bounds: Vec<Interval>,
}

impl FlatChart {
    pub fn new(dim: usize, half_width: f64) -> Self {
        Self { bounds: vec![Interval::new(-half_width, half_width); dim] }
    }
}

impl Chart for FlatChart {
    fn dim(&self) -> usize {
        self.bounds.len()
    }

    fn bounds(&self) -> &[Interval] {
        &self.bounds
    }

    fn metric<T: Real>(&self, x: &[T]) -> Mat<T> {
        Mat::identity(x.len())
    }

    fn complex_structure<T: Real>(&self, x: &[T]) -> Mat<T> {
        standard_complex_structure(x.len())
    }
}

/// Block-diagonal `J` with `J ∂x_k = ∂y_k`.
pub fn standard_complex_structure<T: Real>(dim: usize) -> Mat<T> {
    Mat::from_fn(dim, |i, j| {
        if i / 2 != j / 2 {
            T::zero()
        } else if i == j + 1 && j % 2 == 0 {
            T::one()
        } else if j == i + 1 && i % 2 == 0 {
            -T::one()
        } else {
            T::zero()
        }
    })
}

/// Levi-Civita symbols `Γ^k_ij`, stored `[k][i][j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> Christoffel<T> {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> T {
        self.data[(k * self.n + i) * self.n + j]
    }

    /// `(Γ_X)^k_j = X^i Γ^k_ij`, the connection matrix along `X`.
    pub fn along(&self, x: &[T]) -> Mat<T> {
        let n = self.n;
        Mat::from_fn(n, |k, j| (0..n).fold(T::zero(), |acc, i| acc + x[i] * self.get(k, i, j)))
    }

    /// `Γ^k_ij u^i v^j`.
    pub fn contract(&self, u: &[T], v: &[T]) -> Vec<T> {
        self.along(u).mat_vec(v)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| f64::max(m, fabs(v.value())))
    }

    fn from_metric_partials(ginv: &Mat<T>, dg: &[Mat<T>]) -> Self {
        let n = ginv.dim();
        let mut data = vec![T::zero(); n * n * n];
        for i in 0..n {
            for j in i..n {
                // lowered Γ_{l,ij} = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
                let lowered: Vec<T> =
                    (0..n).map(|l| (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]) * 0.5).collect();
                for k in 0..n {
                    let v = (0..n).fold(T::zero(), |acc, l| acc + ginv[(k, l)] * lowered[l]);
                    data[(k * n + i) * n + j] = v;
                    data[(k * n + j) * n + i] = v;
                }
            }
        }
        Self { n, data }
    }

    pub fn map_f64(&self) -> Christoffel<f64> {
        Christoffel { n: self.n, data: self.data.iter().map(|v| v.value()).collect() }
    }
}

/// Metric, inverse, connection and complex structure at one point.
#[derive(Clone, Debug)]
pub struct Local<T> {
    pub x: Vec<T>,
    pub g: Mat<T>,
    pub ginv: Mat<T>,
    pub gamma: Christoffel<T>,
    pub j: Mat<T>,
}

impl<T: Real> Local<T> {
    /// Generic constructor; only fails if the metric is not invertible.
    pub fn try_at<C: Chart>(chart: &C, x: &[T]) -> Option<Self> {
        let g = chart.metric(x);
        let ginv = g.inverse()?;
        let gamma = christoffel_generic(chart, x, &ginv);
        let j = chart.complex_structure(x);
        Some(Self { x: x.to_vec(), g, ginv, gamma, j })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn inner(&self, u: &[T], v: &[T]) -> T {
        self.g.bilinear(u, v)
    }

    pub fn norm(&self, v: &[T]) -> T {
        self.inner(v, v).sqrt()
    }

    pub fn lower(&self, v: &[T]) -> Vec<T> {
        self.g.mat_vec(v)
    }

    pub fn raise(&self, alpha: &[T]) -> Vec<T> {
        self.ginv.mat_vec(alpha)
    }

    pub fn apply_j(&self, v: &[T]) -> Vec<T> {
        self.j.mat_vec(v)
    }

    pub fn omega(&self) -> Mat<T> {
        crate::field::kahler_form_matrix(&self.g, &self.j)
    }

    /// `∇_X V` given the coordinate derivative `X(V^k)`.
    pub fn cov_vector(&self, x: &[T], v: &[T], dv: &[T]) -> Vec<T> {
        let gv = self.gamma.contract(x, v);
        dv.iter().zip(gv).map(|(&a, b)| a + b).collect()
    }

    /// `∇_X S = X(S) + Γ_X S − S Γ_X`.
    pub fn cov_endo(&self, x: &[T], s: &Mat<T>, ds: &Mat<T>) -> Mat<T> {
        let gx = self.gamma.along(x);
        &(ds + &(&gx * s)) - &(s * &gx)
    }

    /// `∇_X φ = X(φ) − Γ_Xᵀ φ − φ Γ_X`.
    pub fn cov_bilinear(&self, x: &[T], phi: &Mat<T>, dphi: &Mat<T>) -> Mat<T> {
        let gx = self.gamma.along(x);
        &(dphi - &(&gx.transpose() * phi)) - &(phi * &gx)
    }

    /// Bilinear form `g(S·, ·)` of an endomorphism.
    pub fn endo_to_bilinear(&self, s: &Mat<T>) -> Mat<T> {
        &s.transpose() * &self.g
    }

    /// Endomorphism `S` with `g(SX, Y) = B(X, Y)`.
    pub fn bilinear_to_endo(&self, b: &Mat<T>) -> Mat<T> {
        &self.ginv * &b.transpose()
    }

    /// Trace of a bilinear form with respect to `g`.
    pub fn metric_trace(&self, b: &Mat<T>) -> T {
        (&self.ginv * b).trace()
    }
}

impl Local<f64> {
    /// Checked constructor at a real point: rejects metrics with an
    /// eigenvalue below [`PD_THRESHOLD`].
    pub fn at<C: Chart>(chart: &C, p: &[f64]) -> Result<Self> {
        let g = chart.metric(p);
        let (vals, _) = symmetric_eigen(&g);
        let min = vals.first().copied().unwrap_or(0.0);
        if !(min >= PD_THRESHOLD) {
            return Err(Error::SingularMetric { min_eigenvalue: min });
        }
        Self::try_at(chart, p).ok_or(Error::SingularMetric { min_eigenvalue: min })
    }
}

fn christoffel_generic<T: Real, C: Chart>(chart: &C, x: &[T], ginv: &Mat<T>) -> Christoffel<T> {
    let dg: Vec<Mat<T>> =
        (0..x.len()).map(|k| chart.metric(&lift_axis(x, k)).map(|d| d.eps)).collect();
    Christoffel::from_metric_partials(ginv, &dg)
}

pub fn christoffel<C: Chart>(chart: &C, p: &[f64]) -> Result<Christoffel<f64>> {
    Ok(Local::at(chart, p)?.gamma)
}

pub fn grad_scalar<C: Chart, F: ScalarField>(chart: &C, f: &F, p: &[f64]) -> Result<Vec<f64>> {
    let local = Local::at(chart, p)?;
    Ok(local.raise(&partials(f, chart, p)))
}

/// `∇df` at a generic point: `∂_i∂_j f − Γ^k_ij ∂_k f`.
pub fn hessian_generic<T: Real, C: Chart, F: ScalarField>(
    chart: &C,
    f: &F,
    local: &Local<T>,
) -> Mat<T> {
    let n = local.dim();
    let df = partials(f, chart, &local.x);
    let rows: Vec<Vec<T>> =
        (0..n).map(|i| partials(f, chart, &lift_axis(&local.x, i)).iter().map(|d| d.eps).collect()).collect();
    Mat::from_fn(n, |i, j| {
        let sym = (rows[i][j] + rows[j][i]) * 0.5;
        (0..n).fold(sym, |acc, k| acc - local.gamma.get(k, i, j) * df[k])
    })
}

pub fn hessian_scalar<C: Chart, F: ScalarField>(chart: &C, f: &F, p: &[f64]) -> Result<Mat<f64>> {
    let local = Local::at(chart, p)?;
    Ok(hessian_generic(chart, f, &local))
}

pub fn cov_deriv_vector_generic<T: Real, C: Chart, F: VectorField>(
    chart: &C,
    v: &F,
    x: &[T],
    local: &Local<T>,
) -> Vec<T> {
    let val = v.eval(chart, &local.x);
    let dv = d_vector(v, chart, &local.x, x);
    local.cov_vector(x, &val, &dv)
}

pub fn cov_deriv_endo_generic<T: Real, C: Chart, F: EndoField>(
    chart: &C,
    s: &F,
    x: &[T],
    local: &Local<T>,
) -> Mat<T> {
    let val = s.eval(chart, &local.x);
    let ds = d_endo(s, chart, &local.x, x);
    local.cov_endo(x, &val, &ds)
}

pub fn cov_deriv_form_generic<T: Real, C: Chart, F: TwoFormField>(
    chart: &C,
    phi: &F,
    x: &[T],
    local: &Local<T>,
) -> Mat<T> {
    let val = phi.eval(chart, &local.x);
    let dphi = d_two_form(phi, chart, &local.x, x);
    local.cov_bilinear(x, &val, &dphi)
}

pub fn cov_deriv_vector<C: Chart, F: VectorField>(chart: &C, v: &F, x: &[f64], p: &[f64]) -> Result<Vec<f64>> {
    Ok(cov_deriv_vector_generic(chart, v, x, &Local::at(chart, p)?))
}

pub fn cov_deriv_endo<C: Chart, F: EndoField>(chart: &C, s: &F, x: &[f64], p: &[f64]) -> Result<Mat<f64>> {
    Ok(cov_deriv_endo_generic(chart, s, x, &Local::at(chart, p)?))
}

pub fn cov_deriv_2form<C: Chart, F: TwoFormField>(chart: &C, phi: &F, x: &[f64], p: &[f64]) -> Result<Mat<f64>> {
    Ok(cov_deriv_form_generic(chart, phi, x, &Local::at(chart, p)?))
}

/// Ricci tensor `R_ij = ∂_kΓ^k_ij − ∂_jΓ^k_ik + Γ^k_kl Γ^l_ij − Γ^k_jl Γ^l_ik`.
pub fn ricci_generic<T: Real, C: Chart>(chart: &C, x: &[T]) -> Option<Mat<T>> {
    let n = x.len();
    let local = Local::try_at(chart, x)?;
    let gamma = &local.gamma;
    let mut dgamma = Vec::with_capacity(n);
    for k in 0..n {
        let lifted = Local::try_at(chart, &lift_axis(x, k))?;
        dgamma.push(lifted.gamma);
    }
    let dg = |m: usize, k: usize, i: usize, j: usize| dgamma[m].get(k, i, j).eps;
    Some(Mat::from_fn(n, |i, j| {
        let mut r = T::zero();
        for k in 0..n {
            r += dg(k, k, i, j) - dg(j, k, i, k);
            for l in 0..n {
                r += gamma.get(k, k, l) * gamma.get(l, i, j) - gamma.get(k, j, l) * gamma.get(l, i, k);
            }
        }
        r
    }))
}

pub fn ricci<C: Chart>(chart: &C, p: &[f64]) -> Result<Mat<f64>> {
    Local::at(chart, p)?;
    let r = ricci_generic(chart, p).ok_or(Error::SingularMetric { min_eigenvalue: 0.0 })?;
    Ok(Mat::from_fn(p.len(), |i, j| 0.5 * (r[(i, j)] + r[(j, i)])))
}

/// Coordinate Lie bracket `[X, Y]^k = X(Y^k) − Y(X^k)`.
pub fn lie_bracket<T: Real, C: Chart, X: VectorField, Y: VectorField>(chart: &C, xf: &X, yf: &Y, p: &[T]) -> Vec<T> {
    let xv = xf.eval(chart, p);
    let yv = yf.eval(chart, p);
    let dy = d_vector(yf, chart, p, &xv);
    let dx = d_vector(xf, chart, p, &yv);
    dy.iter().zip(&dx).map(|(&a, &b)| a - b).collect()
}

/// Geodesic integration output.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
    /// Set when integration stopped because the next stage left the chart.
    pub truncated: bool,
}

impl Trajectory {
    pub fn require_complete(&self) -> Result<&Self> {
        if self.truncated {
            Err(Error::LeftChartDomain { t: self.times.last().copied().unwrap_or(0.0) })
        } else {
            Ok(self)
        }
    }
}

fn geodesic_rhs<C: Chart>(chart: &C, x: &[f64], v: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let local = Local::try_at(chart, x).ok_or(Error::SingularMetric { min_eigenvalue: 0.0 })?;
    let acc = local.gamma.contract(v, v).into_iter().map(|a| -a).collect();
    Ok((v.to_vec(), acc))
}

/// Integrates `ẍ^k + Γ^k_ij ẋ^i ẋ^j = 0` with classical fixed-step RK4.
pub fn geodesic<C: Chart>(chart: &C, p: &[f64], v: &[f64], t_end: f64, steps: usize) -> Result<Trajectory> {
    Local::at(chart, p)?;
    let h = t_end / steps as f64;
    let mut x = p.to_vec();
    let mut u = v.to_vec();
    let mut traj = Trajectory {
        times: vec![0.0],
        points: vec![x.clone()],
        velocities: vec![u.clone()],
        truncated: false,
    };
    let shift = |a: &[f64], b: &[f64], s: f64| -> Vec<f64> { a.iter().zip(b).map(|(&p, &q)| p + s * q).collect() };
    for step in 0..steps {
        let (k1x, k1v) = geodesic_rhs(chart, &x, &u)?;
        let x2 = shift(&x, &k1x, 0.5 * h);
        if !chart.contains(&x2, 0.0) {
            traj.truncated = true;
            break;
        }
        let (k2x, k2v) = geodesic_rhs(chart, &x2, &shift(&u, &k1v, 0.5 * h))?;
        let x3 = shift(&x, &k2x, 0.5 * h);
        if !chart.contains(&x3, 0.0) {
            traj.truncated = true;
            break;
        }
        let (k3x, k3v) = geodesic_rhs(chart, &x3, &shift(&u, &k2v, 0.5 * h))?;
        let x4 = shift(&x, &k3x, h);
        if !chart.contains(&x4, 0.0) {
            traj.truncated = true;
            break;
        }
        let (k4x, k4v) = geodesic_rhs(chart, &x4, &shift(&u, &k3v, h))?;
        let nx: Vec<f64> = (0..x.len()).map(|i| x[i] + h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i])).collect();
        if !chart.contains(&nx, 0.0) {
            traj.truncated = true;
            break;
        }
        u = (0..x.len()).map(|i| u[i] + h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i])).collect();
        x = nx;
        traj.times.push((step + 1) as f64 * h);
        traj.points.push(x.clone());
        traj.velocities.push(u.clone());
    }
    Ok(traj)
}

// ---------------------------------------------------------------------------
// Finite-difference oracle
// ---------------------------------------------------------------------------

fn check_fd_step(h: f64) -> Result<()> {
    if !(1e-6..=1e-3).contains(&h) {
        return Err(Error::BadParameters("finite-difference step must lie in [1e-6, 1e-3]"));
    }
    Ok(())
}

fn offset(p: &[f64], dir: &[f64], s: f64) -> Vec<f64> {
    p.iter().zip(dir).map(|(&a, &b)| a + s * b).collect()
}

fn central_matrix(p: &[f64], dir: &[f64], h: f64, f: impl Fn(&[f64]) -> Mat<f64>) -> Mat<f64> {
    let plus = f(&offset(p, dir, h));
    let minus = f(&offset(p, dir, -h));
    (&plus - &minus).scale(0.5 / h)
}

/// Christoffel symbols from central differences of the metric.
pub fn fd_christoffel<C: Chart>(chart: &C, p: &[f64], h: f64) -> Result<Christoffel<f64>> {
    check_fd_step(h)?;
    let n = p.len();
    let ginv = Local::at(chart, p)?.ginv;
    let dg: Vec<Mat<f64>> = (0..n)
        .map(|k| central_matrix(p, &crate::linalg::unit(n, k), h, |q| chart.metric(q)))
        .collect();
    Ok(Christoffel::from_metric_partials(&ginv, &dg))
}

/// Which covariant-derivative formula the oracle applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TensorKind {
    Endomorphism,
    Bilinear,
}

fn fd_cov_deriv_once(
    chart: &impl Chart,
    kind: TensorKind,
    field: &dyn Fn(&[f64]) -> Mat<f64>,
    x: &[f64],
    p: &[f64],
    h: f64,
) -> Result<Mat<f64>> {
    let gamma = fd_christoffel(chart, p, h)?;
    let val = field(p);
    let d = central_matrix(p, x, h, field);
    let gx = gamma.along(x);
    Ok(match kind {
        TensorKind::Endomorphism => &(&d + &(&gx * &val)) - &(&val * &gx),
        TensorKind::Bilinear => &(&d - &(&gx.transpose() * &val)) - &(&val * &gx),
    })
}

/// Central-difference `∇_X` of a matrix-valued tensor field, with the
/// connection also taken from finite differences.
///
/// The result at `h` is accepted only if the sequence `h, h/2, h/4` shows
/// quadratic convergence (successive-difference ratio within `4·2^{±0.2}`)
/// or the differences are already at round-off level.
pub fn fd_oracle_cov_deriv<C: Chart>(
    chart: &C,
    kind: TensorKind,
    field: &dyn Fn(&[f64]) -> Mat<f64>,
    x: &[f64],
    p: &[f64],
    h: f64,
) -> Result<Mat<f64>> {
    Ok(fd_oracle_levels(chart, kind, field, x, p, h)?.0)
}

/// Richardson-extrapolated oracle `(4 D(h/2) − D(h)) / 3`, accurate to `O(h⁴)`.
pub fn fd_oracle_extrapolated<C: Chart>(
    chart: &C,
    kind: TensorKind,
    field: &dyn Fn(&[f64]) -> Mat<f64>,
    x: &[f64],
    p: &[f64],
    h: f64,
) -> Result<Mat<f64>> {
    let (f1, f2) = fd_oracle_levels(chart, kind, field, x, p, h)?;
    Ok((&f2.scale(4.0) - &f1).scale(1.0 / 3.0))
}

fn fd_oracle_levels<C: Chart>(
    chart: &C,
    kind: TensorKind,
    field: &dyn Fn(&[f64]) -> Mat<f64>,
    x: &[f64],
    p: &[f64],
    h: f64,
) -> Result<(Mat<f64>, Mat<f64>)> {
    check_fd_step(h)?;
    if !chart.contains(p, 2.0 * h * (1.0 + crate::linalg::max_abs_vec(x))) {
        return Err(Error::BadParameters("oracle point too close to the chart boundary"));
    }
    let f1 = fd_cov_deriv_once(chart, kind, field, x, p, h)?;
    let f2 = fd_cov_deriv_once(chart, kind, field, x, p, h / 2.0)?;
    let f4 = fd_cov_deriv_once(chart, kind, field, x, p, h / 4.0)?;
    let d1 = (&f1 - &f2).max_abs();
    let d2 = (&f2 - &f4).max_abs();
    let noise = 1e3 * f64::EPSILON * (1.0 + field(p).max_abs()) / h;
    if d2 > noise {
        let ratio = d1 / d2;
        let (lo, hi) = (libm::exp2(1.8), libm::exp2(2.2));
        if !(lo..=hi).contains(&ratio) {
            return Err(Error::StepTooLarge { h, ratio });
        }
    }
    Ok((f1, f2))
}

/// Observed convergence order from errors at successive halvings of `h`.
pub fn richardson_slopes(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| libm::log2(w[0] / w[1])).collect()
}

/// `max_k |v_k|` helper for residual vectors measured in the metric.
pub fn metric_norm(local: &Local<f64>, v: &[f64]) -> f64 {
    fsqrt(f64::max(dot(v, &local.lower(v)), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ConstantEndo, Coordinate, ScaledIdentity};

    #[test]
    fn flat_christoffel_vanishes() {
        let chart = FlatChart::new(4, 1.0);
        let gamma = christoffel(&chart, &[0.1, 0.2, -0.3, 0.4]).unwrap();
        assert_eq!(gamma.max_abs(), 0.0);
    }

    #[test]
    fn flat_gradient_of_coordinate() {
        let chart = FlatChart::new(4, 1.0);
        let g = grad_scalar(&chart, &Coordinate(0), &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(g, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn flat_hessian_of_linear_function_vanishes() {
        let chart = FlatChart::new(4, 1.0);
        let h = hessian_scalar(&chart, &Coordinate(2), &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(h.max_abs(), 0.0);
    }

    #[test]
    fn parallel_endo_has_zero_derivative() {
        let chart = FlatChart::new(4, 1.0);
        let s = ConstantEndo(Mat::identity(4).scale(3.0));
        let d = cov_deriv_endo(&chart, &s, &[1.0, 0.5, 0.0, 0.0], &[0.1, 0.1, 0.1, 0.1]).unwrap();
        assert_eq!(d.max_abs(), 0.0);
    }

    #[test]
    fn flat_geodesic_is_a_straight_line() {
        let chart = FlatChart::new(4, 5.0);
        let p = [0.1, 0.2, 0.3, 0.4];
        let v = [0.5, -0.25, 0.125, 1.0];
        let traj = geodesic(&chart, &p, &v, 1.0, 64).unwrap();
        assert!(!traj.truncated);
        let end = traj.points.last().unwrap();
        for i in 0..4 {
            assert!((end[i] - (p[i] + v[i])).abs() < 1e-14);
        }
    }

    #[test]
    fn geodesic_truncates_at_boundary() {
        let chart = FlatChart::new(2, 1.0);
        let traj = geodesic(&chart, &[0.0, 0.0], &[3.0, 0.0], 1.0, 100).unwrap();
        assert!(traj.truncated);
        assert!(traj.require_complete().is_err());
    }

    #[test]
    fn singular_metric_is_rejected() {
        struct Degenerate;
        impl Chart for Degenerate {
            fn dim(&self) -> usize {
                2
            }
            fn bounds(&self) -> &[Interval] {
                const B: [Interval; 2] = [Interval::new(-1.0, 1.0), Interval::new(-1.0, 1.0)];
                &B
            }
            fn metric<T: Real>(&self, _x: &[T]) -> Mat<T> {
                Mat::from_fn(2, |i, j| if i == 0 && j == 0 { T::one() } else { T::zero() })
            }
            fn complex_structure<T: Real>(&self, _x: &[T]) -> Mat<T> {
                standard_complex_structure(2)
            }
        }
        assert!(matches!(christoffel(&Degenerate, &[0.0, 0.0]), Err(Error::SingularMetric { .. })));
    }

    #[test]
    fn fd_step_range_enforced() {
        let chart = FlatChart::new(2, 1.0);
        let f = |_: &[f64]| Mat::identity(2);
        assert!(fd_oracle_cov_deriv(&chart, TensorKind::Endomorphism, &f, &[1.0, 0.0], &[0.0, 0.0], 1e-2).is_err());
        let s = ScaledIdentity(Coordinate(0));
        let g = |q: &[f64]| s.eval(&chart, q);
        let d = fd_oracle_cov_deriv(&chart, TensorKind::Endomorphism, &g, &[1.0, 0.0], &[0.0, 0.0], 1e-4).unwrap();
        assert!((&d - &Mat::identity(2)).max_abs() < 1e-10);
    }

    use crate::field::EndoField;
}
