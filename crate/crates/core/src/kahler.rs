//! Kähler structure checks and the vector-field tests built on `J`.

use crate::error::{Error, Result};
use crate::field::{d_endo, d_two_form, d_vector, dc_covector, partials, ComplexStructure, KahlerForm, ScalarField, VectorField};
use crate::geometry::{cov_deriv_vector_generic, Chart, Local};
use crate::linalg::{determinant, unit, Mat};
use crate::real::fabs;
use alloc::vec::Vec;

/// Pointwise Kähler residuals.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KahlerResiduals {
    /// `‖J² + I‖`.
    pub j_squared: f64,
    /// `‖Jᵀ g J − g‖`.
    pub metric_invariance: f64,
    /// `max_k ‖∇_{∂k} J‖`.
    pub nabla_j: f64,
    /// `max |dω_ijk|`.
    pub d_omega: f64,
    /// `|det ω|`; equals `det g` on a Kähler chart.
    pub omega_det: f64,
}

impl KahlerResiduals {
    pub fn max_residual(&self) -> f64 {
        self.j_squared.max(self.metric_invariance).max(self.nabla_j).max(self.d_omega)
    }

    fn merge(&mut self, other: &Self) {
        self.j_squared = self.j_squared.max(other.j_squared);
        self.metric_invariance = self.metric_invariance.max(other.metric_invariance);
        self.nabla_j = self.nabla_j.max(other.nabla_j);
        self.d_omega = self.d_omega.max(other.d_omega);
        self.omega_det = self.omega_det.min(other.omega_det);
    }
}

pub fn kahler_residuals<C: Chart>(chart: &C, local: &Local<f64>) -> KahlerResiduals {
    let n = local.dim();
    let j = &local.j;
    let id = Mat::identity(n);
    let j_squared = (&(j * j) + &id).max_abs();
    let metric_invariance = (&(&(&j.transpose() * &local.g) * j) - &local.g).max_abs();
    let mut nabla_j: f64 = 0.0;
    let mut domega = Vec::with_capacity(n);
    for k in 0..n {
        let e = unit(n, k);
        let dj = d_endo(&ComplexStructure, chart, &local.x, &e);
        nabla_j = nabla_j.max(local.cov_endo(&e, j, &dj).max_abs());
        domega.push(d_two_form(&KahlerForm, chart, &local.x, &e));
    }
    let mut d_omega: f64 = 0.0;
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let v = domega[a][(b, c)] + domega[b][(c, a)] + domega[c][(a, b)];
                d_omega = d_omega.max(fabs(v));
            }
        }
    }
    let omega_det = fabs(determinant(&local.omega()));
    KahlerResiduals { j_squared, metric_invariance, nabla_j, d_omega, omega_det }
}

/// Worst residuals over a set of points.
pub fn check_kahler<C: Chart>(chart: &C, points: &[Vec<f64>]) -> Result<KahlerResiduals> {
    let mut acc = KahlerResiduals { omega_det: f64::INFINITY, ..Default::default() };
    for p in points {
        let local = Local::at(chart, p)?;
        acc.merge(&kahler_residuals(chart, &local));
    }
    Ok(acc)
}

/// [`check_kahler`], failing with the first residual above `tol`.
pub fn require_kahler<C: Chart>(chart: &C, points: &[Vec<f64>], tol: f64) -> Result<KahlerResiduals> {
    let r = check_kahler(chart, points)?;
    let checks = [
        ("J^2 + I", r.j_squared),
        ("J-invariance of g", r.metric_invariance),
        ("nabla J", r.nabla_j),
        ("d omega", r.d_omega),
    ];
    for (check, residual) in checks {
        if !(residual <= tol) {
            return Err(Error::NotKahler { check, residual });
        }
    }
    if !(r.omega_det > 0.0) {
        return Err(Error::NotKahler { check: "omega nondegenerate", residual: r.omega_det });
    }
    Ok(r)
}

/// `d^c f = −df ∘ J`.
pub fn dc_scalar<C: Chart, F: ScalarField>(chart: &C, f: &F, p: &[f64]) -> Vec<f64> {
    let j = chart.complex_structure(p);
    dc_covector(&j, &partials(f, chart, p))
}

/// `g(∇_X ξ, Y) + g(∇_Y ξ, X)`.
pub fn killing_field_residual<C: Chart, V: VectorField>(chart: &C, xi: &V, local: &Local<f64>, x: &[f64], y: &[f64]) -> f64 {
    let nx = cov_deriv_vector_generic(chart, xi, x, local);
    let ny = cov_deriv_vector_generic(chart, xi, y, local);
    local.inner(&nx, y) + local.inner(&ny, x)
}

/// `L_ξ J` in coordinates:
/// `ξ^i ∂_i J^k_j − J^i_j ∂_i ξ^k + J^k_i ∂_j ξ^i`.
pub fn lie_derivative_j<C: Chart, V: VectorField>(chart: &C, xi: &V, p: &[f64]) -> Mat<f64> {
    let n = p.len();
    let xv = xi.eval(chart, p);
    let j = chart.complex_structure(p);
    let dj = d_endo(&ComplexStructure, chart, p, &xv);
    // dxi[i][k] = ∂_i ξ^k
    let dxi: Vec<Vec<f64>> = (0..n).map(|i| d_vector(xi, chart, p, &unit(n, i))).collect();
    Mat::from_fn(n, |k, jj| {
        let mut v = dj[(k, jj)];
        for i in 0..n {
            v += -j[(i, jj)] * dxi[i][k] + j[(k, i)] * dxi[jj][i];
        }
        v
    })
}

/// `‖L_ξ J‖` (max-entry norm).
pub fn holomorphic_field_residual<C: Chart, V: VectorField>(chart: &C, xi: &V, p: &[f64]) -> f64 {
    lie_derivative_j(chart, xi, p).max_abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ConstantVector, Coordinate};
    use crate::geometry::{FlatChart, Interval};
    use crate::real::Real;

    #[test]
    fn flat_chart_is_kahler() {
        let chart = FlatChart::new(4, 1.0);
        let r = require_kahler(&chart, &[alloc::vec![0.1, 0.2, 0.3, 0.4]], 0.0).unwrap();
        assert_eq!(r.max_residual(), 0.0);
        assert_eq!(r.omega_det, 1.0);
    }

    struct Rotation;
    impl VectorField for Rotation {
        fn eval<T: Real, C: Chart>(&self, _chart: &C, x: &[T]) -> Vec<T> {
            alloc::vec![-x[1], x[0]]
        }
    }

    #[test]
    fn rotation_is_killing_and_holomorphic() {
        let chart = FlatChart::new(2, 1.0);
        let local = Local::at(&chart, &[0.3, -0.2]).unwrap();
        assert_eq!(killing_field_residual(&chart, &Rotation, &local, &[1.0, 0.5], &[-0.25, 2.0]), 0.0);
        assert_eq!(holomorphic_field_residual(&chart, &Rotation, &[0.3, -0.2]), 0.0);
        assert_eq!(holomorphic_field_residual(&chart, &ConstantVector(alloc::vec![1.0, 2.0]), &[0.3, -0.2]), 0.0);
    }

    struct Quadratic;
    impl VectorField for Quadratic {
        fn eval<T: Real, C: Chart>(&self, _chart: &C, x: &[T]) -> Vec<T> {
            alloc::vec![x[0] * x[1], x[1] * x[1]]
        }
    }

    #[test]
    fn generic_field_is_not_holomorphic() {
        let chart = FlatChart::new(2, 1.0);
        assert!(holomorphic_field_residual(&chart, &Quadratic, &[0.3, -0.2]) > 0.1);
    }

    #[test]
    fn dc_of_coordinate() {
        // d^c x = −dx ∘ J, and J ∂y = −∂x, so d^c x = dy
        let chart = FlatChart::new(2, 1.0);
        assert_eq!(dc_scalar(&chart, &Coordinate(0), &[0.0, 0.0]), alloc::vec![0.0, 1.0]);
    }

    struct Tilted {
        eps: f64,
        bounds: [Interval; 2],
    }
    impl Chart for Tilted {
        fn dim(&self) -> usize {
            2
        }
        fn bounds(&self) -> &[Interval] {
            &self.bounds
        }
        fn metric<T: Real>(&self, _x: &[T]) -> Mat<T> {
            Mat::from_fn(2, |i, j| if i == j && i == 0 { T::cst(1.0 + self.eps) } else if i == j { T::one() } else { T::zero() })
        }
        fn complex_structure<T: Real>(&self, _x: &[T]) -> Mat<T> {
            crate::geometry::standard_complex_structure(2)
        }
    }

    #[test]
    fn non_hermitian_metric_detected() {
        let eps = 1e-3;
        let chart = Tilted { eps, bounds: [Interval::new(-1.0, 1.0); 2] };
        let r = check_kahler(&chart, &[alloc::vec![0.0, 0.0]]).unwrap();
        assert!((r.metric_invariance - eps).abs() < 1e-15);
        assert!(matches!(
            require_kahler(&chart, &[alloc::vec![0.0, 0.0]], 1e-9),
            Err(Error::NotKahler { check: "J-invariance of g", .. })
        ));
    }
}
