//! Fubini–Study metric on the standard affine chart of `ℂPᵐ`.
//!
//! Coordinates are interleaved `(x₁, y₁, …, x_m, y_m)` with `z_j = x_j + i y_j`.
//! The Hermitian metric is `h_{jk̄} = ∂_j∂_k̄ log(1 + |z|²)` and the real metric
//! is `scale · Re h`, so `J` is the standard multiplication by `i`.

use crate::linalg::Mat;
use crate::real::Real;
use alloc::vec::Vec;

/// `scale · Re h` evaluated at `x`.
pub fn fs_metric<T: Real>(x: &[T], scale: f64) -> Mat<T> {
    let dim = x.len();
    let m = dim / 2;
    let u = x.iter().fold(T::zero(), |acc, &v| acc + v * v);
    let w = (u + 1.0).recip();
    let w2 = w * w;
    let mut g = Mat::zeros(dim);
    for j in 0..m {
        let (xj, yj) = (x[2 * j], x[2 * j + 1]);
        for k in 0..m {
            let (xk, yk) = (x[2 * k], x[2 * k + 1]);
            let delta = if j == k { w } else { T::zero() };
            let h_re = delta - (xj * xk + yj * yk) * w2;
            let h_im = -(xj * yk - yj * xk) * w2;
            g[(2 * j, 2 * k)] = h_re * scale;
            g[(2 * j + 1, 2 * k + 1)] = h_re * scale;
            g[(2 * j, 2 * k + 1)] = h_im * scale;
            g[(2 * j + 1, 2 * k)] = -h_im * scale;
        }
    }
    g
}

/// `|z|² / (1 + |z|²)`, the moment map of the diagonal circle action.
pub fn fs_moment<T: Real>(x: &[T]) -> T {
    let u = x.iter().fold(T::zero(), |acc, &v| acc + v * v);
    u / (u + 1.0)
}

/// Connection 1-form `A` on the chart with `dA = ω` for `ω` the Kähler form
/// of `scale · Re h`: `A = (scale/2) Σ (x_j dy_j − y_j dx_j) / (1 + |z|²)`.
pub fn fs_connection_form<T: Real>(x: &[T], scale: f64) -> Vec<T> {
    let u = x.iter().fold(T::zero(), |acc, &v| acc + v * v);
    let w = (u + 1.0).recip() * (0.5 * scale);
    let mut a = Vec::with_capacity(x.len());
    for j in 0..x.len() / 2 {
        a.push(-x[2 * j + 1] * w);
        a.push(x[2 * j] * w);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::standard_complex_structure;

    #[test]
    fn identity_at_origin() {
        let g = fs_metric(&[0.0; 4], 1.0);
        assert_eq!(g, Mat::identity(4));
    }

    #[test]
    fn symmetric_and_hermitian() {
        let x = [0.3, -0.2, 0.5, 0.1];
        let g = fs_metric(&x, 2.0);
        assert!((&g - &g.transpose()).max_abs() < 1e-15);
        let j = standard_complex_structure::<f64>(4);
        let gj = &(&j.transpose() * &g) * &j;
        assert!((&gj - &g).max_abs() < 1e-15);
    }

    #[test]
    fn radial_norm_matches_closed_form() {
        // g(z, z) = |z|² / (1 + |z|²)² for the position vector
        let x = [0.3, -0.2, 0.5, 0.1];
        let u: f64 = x.iter().map(|v| v * v).sum();
        let g = fs_metric(&x, 1.0);
        let val = g.bilinear(&x, &x);
        assert!((val - u / (1.0 + u).powi(2)).abs() < 1e-15);
    }
}
