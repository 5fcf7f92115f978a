//! Small dense linear algebra over [`Real`].
//!
//! Matrices here are at most a few dozen entries, and they must work for
//! nested dual numbers, so everything is hand-rolled on a row-major `Vec`.

use crate::real::{fabs, fsqrt, Real};
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

/// Square `n × n` matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_f64(m: &Mat<f64>) -> Self {
        m.map(T::cst)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn map<U: Real>(&self, f: impl Fn(T) -> U) -> Mat<U> {
        Mat { n: self.n, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn mat_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| (0..self.n).fold(T::zero(), |acc, j| acc + self[(i, j)] * v[j]))
            .collect()
    }

    /// `xᵀ M y`.
    pub fn bilinear(&self, x: &[T], y: &[T]) -> T {
        let my = self.mat_vec(y);
        dot(x, &my)
    }

    pub fn antisymmetric_part(&self) -> Self {
        Self::from_fn(self.n, |i, j| (self[(i, j)] - self[(j, i)]) * 0.5)
    }

    /// Largest absolute entry of the primal values.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| f64::max(m, fabs(v.value())))
    }

    /// Gauss–Jordan inverse with partial pivoting on primal values.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let mut piv = col;
            let mut best = fabs(a[(col, col)].value());
            for r in col + 1..n {
                let v = fabs(a[(r, col)].value());
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return None;
            }
            if piv != col {
                for j in 0..n {
                    a.data.swap(col * n + j, piv * n + j);
                    inv.data.swap(col * n + j, piv * n + j);
                }
            }
            let p = a[(col, col)].recip();
            for j in 0..n {
                a[(col, j)] *= p;
                inv[(col, j)] *= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                // no shortcut on a zero primal: the dual parts may not vanish
                let f = a[(r, col)];
                for j in 0..n {
                    let ac = a[(col, j)];
                    let ic = inv[(col, j)];
                    a[(r, j)] -= f * ac;
                    inv[(r, j)] -= f * ic;
                }
            }
        }
        Some(inv)
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

impl<T: Real> Add for &Mat<T> {
    type Output = Mat<T>;
    fn add(self, o: &Mat<T>) -> Mat<T> {
        Mat { n: self.n, data: self.data.iter().zip(&o.data).map(|(&a, &b)| a + b).collect() }
    }
}

impl<T: Real> Sub for &Mat<T> {
    type Output = Mat<T>;
    fn sub(self, o: &Mat<T>) -> Mat<T> {
        Mat { n: self.n, data: self.data.iter().zip(&o.data).map(|(&a, &b)| a - b).collect() }
    }
}

impl<T: Real> Mul for &Mat<T> {
    type Output = Mat<T>;
    fn mul(self, o: &Mat<T>) -> Mat<T> {
        let n = self.n;
        Mat::from_fn(n, |i, j| (0..n).fold(T::zero(), |acc, k| acc + self[(i, k)] * o[(k, j)]))
    }
}

pub fn dot<T: Real>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
}

pub fn axpy<T: Real>(a: T, x: &[T], y: &[T]) -> Vec<T> {
    x.iter().zip(y).map(|(&xi, &yi)| a * xi + yi).collect()
}

pub fn sub_vec<T: Real>(x: &[T], y: &[T]) -> Vec<T> {
    x.iter().zip(y).map(|(&a, &b)| a - b).collect()
}

pub fn scale_vec<T: Real>(a: T, x: &[T]) -> Vec<T> {
    x.iter().map(|&v| a * v).collect()
}

pub fn max_abs_vec<T: Real>(x: &[T]) -> f64 {
    x.iter().fold(0.0, |m, v| f64::max(m, fabs(v.value())))
}

pub fn unit(n: usize, k: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[k] = 1.0;
    e
}

/// Lower-triangular `L` with `A = L Lᵀ`, or `None` if `A` is not positive definite.
pub fn cholesky(a: &Mat<f64>) -> Option<Mat<f64>> {
    let n = a.dim();
    let mut l = Mat::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return None;
                }
                l[(i, i)] = fsqrt(s);
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    Some(l)
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(a: &Mat<f64>) -> f64 {
    let n = a.dim();
    let mut m = a.clone();
    let mut det = 1.0;
    for col in 0..n {
        let piv = (col..n).max_by(|&r, &s| fabs(m[(r, col)]).total_cmp(&fabs(m[(s, col)]))).unwrap_or(col);
        if m[(piv, col)] == 0.0 {
            return 0.0;
        }
        if piv != col {
            for j in 0..n {
                let t = m[(col, j)];
                m[(col, j)] = m[(piv, j)];
                m[(piv, j)] = t;
            }
            det = -det;
        }
        det *= m[(col, col)];
        for r in col + 1..n {
            let f = m[(r, col)] / m[(col, col)];
            for j in col..n {
                let v = m[(col, j)];
                m[(r, j)] -= f * v;
            }
        }
    }
    det
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as columns. Each eigenvector's first non-negligible component
/// is made positive so the output is reproducible.
pub fn symmetric_eigen(a: &Mat<f64>) -> (Vec<f64>, Mat<f64>) {
    let n = a.dim();
    let mut m = a.clone();
    let mut v = Mat::<f64>::identity(n);
    let scale = f64::max(m.max_abs(), f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if fsqrt(off) <= 1e-16 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (fabs(theta) + fsqrt(theta * theta + 1.0));
                let c = 1.0 / fsqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Mat::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        let sign = (0..n)
            .map(|k| v[(k, src)])
            .find(|x| fabs(*x) > 1e-12)
            .map_or(1.0, |x| x.signum());
        for k in 0..n {
            vectors[(k, col)] = sign * v[(k, src)];
        }
    }
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Mat<f64> {
        Mat::from_fn(4, |i, j| {
            let (a, b) = (i as f64, j as f64);
            if i == j {
                4.0 + a
            } else {
                1.0 / (1.0 + a + b)
            }
        })
    }

    #[test]
    fn inverse_roundtrip() {
        let a = sample();
        let inv = a.inverse().unwrap();
        let prod = &a * &inv;
        assert!((&prod - &Mat::identity(4)).max_abs() < 1e-14);
    }

    #[test]
    fn singular_has_no_inverse() {
        let a = Mat::from_fn(3, |i, _| i as f64);
        assert!(a.inverse().is_none());
    }

    #[test]
    fn cholesky_reconstructs() {
        let a = sample();
        let l = cholesky(&a).unwrap();
        assert!((&(&l * &l.transpose()) - &a).max_abs() < 1e-14);
        assert!(cholesky(&a.scale(-1.0)).is_none());
    }

    #[test]
    fn jacobi_diagonalizes() {
        let a = sample();
        let (vals, vecs) = symmetric_eigen(&a);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let d = Mat::from_fn(4, |i, j| if i == j { vals[i] } else { 0.0 });
        let back = &(&vecs * &d) * &vecs.transpose();
        assert!((&back - &a).max_abs() < 1e-13);
        let ortho = &vecs.transpose() * &vecs;
        assert!((&ortho - &Mat::identity(4)).max_abs() < 1e-13);
    }

    #[test]
    fn jacobi_repeated_eigenvalues() {
        let a = Mat::from_fn(4, |i, j| if i == j { if i < 2 { 0.0 } else { 3.0 } } else { 0.0 });
        let (vals, _) = symmetric_eigen(&a);
        assert_eq!(vals, vec![0.0, 0.0, 3.0, 3.0]);
    }

    #[test]
    fn inverse_derivative_with_zero_primal_entry() {
        use crate::dual::Dual;
        // A(t) = [[2, t], [t, 1]] at t = 0: d(A⁻¹)/dt = −A⁻¹ A' A⁻¹ = −[[0, 1/2], [1/2, 0]]
        let t = Dual::variable(0.0);
        let a = Mat::from_fn(2, |i, j| match (i, j) {
            (0, 0) => Dual::constant(2.0),
            (1, 1) => Dual::constant(1.0),
            _ => t,
        });
        let d = a.inverse().unwrap().map(|v| v.eps);
        assert_eq!(d, Mat::from_fn(2, |i, j| if i == j { 0.0 } else { -0.5 }));
    }
}
