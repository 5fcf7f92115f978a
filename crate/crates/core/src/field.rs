//! Tensor fields on a chart and their coordinate derivatives.
//!
//! A field is any type that can be evaluated at a point with coordinates of
//! an arbitrary [`Real`] type. Evaluating at [`Dual`] coordinates yields exact
//! directional derivatives, which is how every derivative in the crate is
//! obtained.
//!
//! Storage conventions: endomorphisms are `S^i_j` (column `j` is `S e_j`),
//! bilinear and two-forms are `B_ij = B(e_i, e_j)`, covectors are arrays of
//! components `α_i = α(e_i)`.

use crate::dual::{lift, lift_axis, Dual};
use crate::geometry::Chart;
use crate::linalg::Mat;
use crate::real::Real;
use alloc::vec::Vec;

pub trait ScalarField {
    fn eval<T: Real, C: Chart>(&self, chart: &C, x: &[T]) -> T;
}

pub trait VectorField {
    fn eval<T: Real, C: Chart>(&self, chart: &C, x: &[T]) -> Vec<T>;
}

/// A `(1,1)` tensor field `S^i_j`.
pub trait EndoField {
    fn eval<T: Real, C: Chart>(&self, chart: &C, x: &[T]) -> Mat<T>;
}

/// An antisymmetric bilinear form field `φ_ij`.
pub trait TwoFormField {
    fn eval<T: Real, C: Chart>(&self, chart: &C, x: &[T]) -> Mat<T>;
}

impl<F: ScalarField> ScalarField for &F {
    fn eval<T: Real, C: Chart>(&self, chart: &C, x: &[T]) -> T {
        (**self).eval(chart, x)
    }
}

impl<F: VectorField> VectorField for &F {
    fn eval<T: Real, C: Chart>(&self, chart: &C, x: &[T]) -> Vec<T> {
        (**self).eval(chart, x)
    }
}

impl<F: EndoField> EndoField for &F {
    fn eval<T: Real, C: Chart>(&self, chart: &C, x: &[T]) -> Mat<T> {
        (**self).eval(chart, x)
    }
}

impl<F: TwoFormField> TwoFormField for &F {
    fn eval<T: Real, C: Chart>(&self, chart: &C, x: &[T]) -> Mat<T> {
        (**self).eval(chart, x)
    }
}

/// Directional derivative `v(f)` of a scalar field.
pub fn d_scalar<T: Real, C: Chart, F: ScalarField>(f: &F, chart: &C, x: &[T], v: &[T]) -> T {
    f.eval(chart, &lift(x, v)).eps
}

/// Coordinate differential `∂_i f`.
pub fn partials<T: Real, C: Chart, F: ScalarField>(f: &F, chart: &C, x: &[T]) -> Vec<T> {
    (0..x.len()).map(|k| f.eval(chart, &lift_axis(x, k)).eps).collect()
}

/// Componentwise directional derivative `v(Y^k)` of a vector field.
pub fn d_vector<T: Real, C: Chart, F: VectorField>(f: &F, chart: &C, x: &[T], v: &[T]) -> Vec<T> {
    f.eval(chart, &lift(x, v)).iter().map(|d| d.eps).collect()
}

/// Entrywise directional derivative of a matrix-valued map.
pub fn d_matrix<T: Real>(x: &[T], v: &[T], f: impl FnOnce(&[Dual<T>]) -> Mat<Dual<T>>) -> Mat<T> {
    f(&lift(x, v)).map(|d| d.eps)
}

pub fn d_endo<T: Real, C: Chart, F: EndoField>(f: &F, chart: &C, x: &[T], v: &[T]) -> Mat<T> {
    d_matrix(x, v, |y| f.eval(chart, y))
}

pub fn d_two_form<T: Real, C: Chart, F: TwoFormField>(f: &F, chart: &C, x: &[T], v: &[T]) -> Mat<T> {
    d_matrix(x, v, |y| f.eval(chart, y))
}

/// Gradient `∇f = g⁻¹ df`.
#[derive(Clone, Copy, Debug)]
pub struct Gradient<F>(pub F);

impl<F: ScalarField> VectorField for Gradient<F> {
    fn eval<T: Real, C: Chart>(&self, chart: &C, x: &[T]) -> Vec<T> {
        let df = partials(&self.0, chart, x);
        let ginv = chart.metric(x).inverse().expect("metric must be invertible");
        ginv.mat_vec(&df)
    }
}

/// `J∇f`, the Hamiltonian vector field of a Killing potential.
#[derive(Clone, Copy, Debug)]
pub struct JGradient<F>(pub F);

impl<F: ScalarField> VectorField for JGradient<F> {
    fn eval<T: Real, C: Chart>(&self, chart: &C, x: &[T]) -> Vec<T> {
        let grad = Gradient(&self.0).eval(chart, x);
        chart.complex_structure(x).mat_vec(&grad)
    }
}

/// `g(∇f, ∇f)`.
#[derive(Clone, Copy, Debug)]
pub struct GradNormSquared<F>(pub F);

impl<F: ScalarField> ScalarField for GradNormSquared<F> {
    fn eval<T: Real, C: Chart>(&self, chart: &C, x: &[T]) -> T {
        let df = partials(&self.0, chart, x);
        let ginv = chart.metric(x).inverse().expect("metric must be invertible");
        ginv.bilinear(&df, &df)
    }
}

/// A single coordinate function `x^k`.
#[derive(Clone, Copy, Debug)]
pub struct Coordinate(pub usize);

impl ScalarField for Coordinate {
    fn eval<T: Real, C: Chart>(&self, _chart: &C, x: &[T]) -> T {
        x[self.0]
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ConstantScalar(pub f64);

impl ScalarField for ConstantScalar {
    fn eval<T: Real, C: Chart>(&self, _chart: &C, _x: &[T]) -> T {
        T::cst(self.0)
    }
}

/// Constant-coefficient vector field `Σ v^k ∂_k`.
#[derive(Clone, Debug)]
pub struct ConstantVector(pub Vec<f64>);

impl VectorField for ConstantVector {
    fn eval<T: Real, C: Chart>(&self, _chart: &C, _x: &[T]) -> Vec<T> {
        self.0.iter().map(|&v| T::cst(v)).collect()
    }
}

/// Constant-coefficient endomorphism.
#[derive(Clone, Debug)]
pub struct ConstantEndo(pub Mat<f64>);

impl EndoField for ConstantEndo {
    fn eval<T: Real, C: Chart>(&self, _chart: &C, _x: &[T]) -> Mat<T> {
        Mat::from_f64(&self.0)
    }
}

/// `f · Id`.
#[derive(Clone, Copy, Debug)]
pub struct ScaledIdentity<F>(pub F);

impl<F: ScalarField> EndoField for ScaledIdentity<F> {
    fn eval<T: Real, C: Chart>(&self, chart: &C, x: &[T]) -> Mat<T> {
        Mat::identity(x.len()).scale(self.0.eval(chart, x))
    }
}

/// The complex structure `J` as an endomorphism field.
#[derive(Clone, Copy, Debug)]
pub struct ComplexStructure;

impl EndoField for ComplexStructure {
    fn eval<T: Real, C: Chart>(&self, chart: &C, x: &[T]) -> Mat<T> {
        chart.complex_structure(x)
    }
}

/// The Kähler form `ω(X, Y) = g(JX, Y)`.
#[derive(Clone, Copy, Debug)]
pub struct KahlerForm;

impl TwoFormField for KahlerForm {
    fn eval<T: Real, C: Chart>(&self, chart: &C, x: &[T]) -> Mat<T> {
        kahler_form_matrix(&chart.metric(x), &chart.complex_structure(x))
    }
}

/// `ω = Jᵀ g`.
pub fn kahler_form_matrix<T: Real>(g: &Mat<T>, j: &Mat<T>) -> Mat<T> {
    &j.transpose() * g
}

/// `(α ∧ β)(X, Y) = α(X)β(Y) − α(Y)β(X)`.
pub fn wedge<T: Real>(alpha: &[T], beta: &[T]) -> Mat<T> {
    Mat::from_fn(alpha.len(), |i, j| alpha[i] * beta[j] - alpha[j] * beta[i])
}

/// `d^c f (X) = −df(JX)`, i.e. `−Jᵀ df`.
pub fn dc_covector<T: Real>(j: &Mat<T>, df: &[T]) -> Vec<T> {
    j.transpose().mat_vec(df).into_iter().map(|v| -v).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{standard_complex_structure, FlatChart};

    #[test]
    fn wedge_is_antisymmetric() {
        let a = [1.0, 2.0, -1.0, 0.5];
        let b = [0.3, -0.2, 0.7, 1.1];
        let w = wedge(&a, &b);
        assert_eq!(w, wedge(&b, &a).scale(-1.0));
        assert_eq!(w[(0, 1)], 1.0 * -0.2 - 2.0 * 0.3);
        assert!(wedge(&a, &a).max_abs() == 0.0);
    }

    #[test]
    fn dc_is_minus_df_of_j() {
        let j: Mat<f64> = standard_complex_structure(4);
        let df = [0.2, -1.0, 0.4, 0.9];
        let dc = dc_covector(&j, &df);
        for (k, dck) in dc.iter().enumerate() {
            let e: Vec<f64> = (0..4).map(|i| if i == k { 1.0 } else { 0.0 }).collect();
            let je = j.mat_vec(&e);
            assert_eq!(*dck, -crate::linalg::dot(&df, &je));
        }
        // applying d^c twice gives −df, since J² = −1
        let twice = dc_covector(&j, &dc);
        assert_eq!(twice, df.iter().map(|v| -v).collect::<Vec<_>>());
    }

    #[test]
    fn flat_kahler_form_is_standard() {
        let chart = FlatChart::new(2, 1.0);
        let w = KahlerForm.eval(&chart, &[0.0, 0.0]);
        // ω(∂x, ∂y) = g(J∂x, ∂y) = 1
        assert_eq!(w[(0, 1)], 1.0);
        assert_eq!(w[(1, 0)], -1.0);
    }

    #[test]
    fn gradient_norm_of_coordinate() {
        let chart = FlatChart::new(4, 1.0);
        assert_eq!(GradNormSquared(Coordinate(2)).eval(&chart, &[0.1, 0.2, 0.3, 0.4]), 1.0);
        let jg = JGradient(Coordinate(0)).eval(&chart, &[0.0; 4]);
        assert_eq!(jg, vec![0.0, 1.0, 0.0, 0.0]);
    }
}
