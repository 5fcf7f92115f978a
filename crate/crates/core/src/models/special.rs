//! Pointwise relations satisfied by a special Kähler potential `τ`.

use super::profile::Profile;
use super::Model;
use crate::error::{Error, Result};
use crate::field::{partials, GradNormSquared, JGradient, ScalarField, VectorField};
use crate::foliation::LogDifferential;
use crate::geometry::{hessian_generic, metric_norm, ricci, Local};
use crate::kahler::holomorphic_field_residual;
use crate::killing::vertical_projector_from_potential;
use crate::linalg::Mat;
use crate::real::{fabs, fsqrt};
use alloc::vec::Vec;

/// `Q` below which a sample carries no usable vertical direction.
pub const Q_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct Relations {
    pub tau: f64,
    pub q: f64,
    /// `|g(∇τ, ∇τ) − Q(τ)|` against the model's profile.
    pub q_consistency: f64,
    /// Eigenvalue of `∇dτ` on `ℋ`.
    pub theta: f64,
    /// Eigenvalue of `∇dτ` on `𝒱`, `H^τ(∇τ, ∇τ) / Q`.
    pub lambda: f64,
    /// `max |H^τ(h_a, h_b) − Θ δ_ab|` over a horizontal orthonormal frame.
    pub horizontal_spread: f64,
    /// `|H^τ(∇τ, J∇τ)| / Q` and `|H^τ(∇τ, h)|`-type leakage between `𝒱` and `ℋ`.
    pub mixed_block: f64,
    /// `Q/Θ − 2(τ − c)`.
    pub q_over_theta: f64,
    /// `max_k |∂_k Q − 2Λ ∂_k τ|`.
    pub dq: f64,
    /// `max_k |2(Θ/Q)∂_k τ − ∂_k ln|τ − c||`.
    pub theta_form: f64,
    /// `max_k |∂_k ln|μ| − ∂_k ln|τ − c||` with `μ` the Killing tensor's eigenvalue.
    pub theta_mu: f64,
}

/// g-orthonormal basis of the range of `p` by Gram–Schmidt on its columns.
pub(crate) fn orthonormal_range(local: &Local<f64>, p: &Mat<f64>, rank: usize) -> Vec<Vec<f64>> {
    let n = local.dim();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(rank);
    for k in 0..n {
        if basis.len() == rank {
            break;
        }
        let mut v: Vec<f64> = (0..n).map(|i| p[(i, k)]).collect();
        for _ in 0..2 {
            for b in &basis {
                let c = local.inner(&v, b);
                for i in 0..n {
                    v[i] -= c * b[i];
                }
            }
        }
        let norm = local.norm(&v);
        if norm > 1e-6 {
            basis.push(v.iter().map(|x| x / norm).collect());
        }
    }
    basis
}

pub fn relations_at(model: &Model, p: &[f64]) -> Result<Relations> {
    let potential = model.potential().ok_or(Error::BadParameters("model has no special potential"))?;
    let profile = model.profile().ok_or(Error::BadParameters("model has no momentum profile"))?;
    let c = model.c().unwrap_or(0.0);
    let local = Local::at(model, p)?;
    let n = local.dim();
    let tau = potential.eval(model, p);
    let dtau = partials(&potential, model, p);
    let grad = local.raise(&dtau);
    let q = crate::linalg::dot(&dtau, &grad);
    if !(q > Q_THRESHOLD) {
        return Err(Error::DegenerateSample("Q below threshold"));
    }
    let hess = hessian_generic(model, &potential, &local);
    let pv = vertical_projector_from_potential(&potential, model, p).ok_or(Error::DegenerateSample("dtau vanishes"))?;
    let ph = &Mat::identity(n) - &pv;
    let frame = orthonormal_range(&local, &ph, n - 2);
    let m = frame.len();
    let mut theta = 0.0;
    for h in &frame {
        theta += hess.bilinear(h, h);
    }
    theta /= m as f64;
    let mut horizontal_spread: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            let target = if a == b { theta } else { 0.0 };
            horizontal_spread = horizontal_spread.max(fabs(hess.bilinear(&frame[a], &frame[b]) - target));
        }
    }
    let lambda = hess.bilinear(&grad, &grad) / q;
    let xi = local.apply_j(&grad);
    let unit_grad: Vec<f64> = grad.iter().map(|v| v / fsqrt(q)).collect();
    let unit_xi: Vec<f64> = xi.iter().map(|v| v / fsqrt(q)).collect();
    let mut mixed_block = fabs(hess.bilinear(&unit_grad, &unit_xi));
    for h in &frame {
        mixed_block = mixed_block.max(fabs(hess.bilinear(&unit_grad, h))).max(fabs(hess.bilinear(&unit_xi, h)));
    }
    let dq_vec = partials(&GradNormSquared(potential), model, p);
    let dq = (0..n).map(|k| fabs(dq_vec[k] - 2.0 * lambda * dtau[k])).fold(0.0, f64::max);
    let shifted = ShiftedPotential { potential, c };
    let log_tau = LogDifferential(shifted).eval(model, p);
    let theta_form = (0..n).map(|k| fabs(2.0 * theta / q * dtau[k] - log_tau[k])).fold(0.0, f64::max);
    let log_mu = LogDifferential(model.candidate().mu()).eval(model, p);
    let theta_mu = (0..n).map(|k| fabs(log_mu[k] - log_tau[k])).fold(0.0, f64::max);
    Ok(Relations {
        tau,
        q,
        q_consistency: fabs(q - profile.q(tau)),
        theta,
        lambda,
        horizontal_spread,
        mixed_block,
        q_over_theta: q / theta - 2.0 * (tau - c),
        dq,
        theta_form,
        theta_mu,
    })
}

/// `τ − c`.
#[derive(Clone, Copy, Debug)]
pub struct ShiftedPotential<F> {
    pub potential: F,
    pub c: f64,
}

impl<F: ScalarField> ScalarField for ShiftedPotential<F> {
    fn eval<T: crate::real::Real, C: crate::geometry::Chart>(&self, chart: &C, x: &[T]) -> T {
        self.potential.eval(chart, x) - self.c
    }
}

/// `‖Ric(∇τ)^♯ − ρ∇τ‖ / ‖∇τ‖` with `ρ = Ric(∇τ, ∇τ) / Q`.
pub fn ricci_eigenfield_residual(model: &Model, p: &[f64]) -> Result<(f64, f64)> {
    let potential = model.potential().ok_or(Error::BadParameters("model has no special potential"))?;
    let local = Local::at(model, p)?;
    let grad = local.raise(&partials(&potential, model, p));
    let q = local.inner(&grad, &grad);
    let ric = ricci(model, p)?;
    let image = local.raise(&ric.mat_vec(&grad));
    let rho = crate::linalg::dot(&ric.mat_vec(&grad), &grad) / q;
    let rest: Vec<f64> = image.iter().zip(&grad).map(|(a, b)| a - rho * b).collect();
    Ok((metric_norm(&local, &rest) / fsqrt(q), rho))
}

/// `‖L_{J∇τ} J‖`.
pub fn potential_holomorphic_residual(model: &Model, p: &[f64]) -> Result<f64> {
    let potential = model.potential().ok_or(Error::BadParameters("model has no special potential"))?;
    Ok(holomorphic_field_residual(model, &JGradient(potential), p))
}

/// `(τ − c)/Q` and its relative deviation from `1/(2a)`.
pub fn boundedness_ratio(model: &Model, p: &[f64]) -> Result<(f64, f64)> {
    let potential = model.potential().ok_or(Error::BadParameters("model has no special potential"))?;
    let profile = model.profile().ok_or(Error::BadParameters("model has no momentum profile"))?;
    let tau = potential.eval(model, p);
    let q = GradNormSquared(potential).eval(model, p);
    if !(q > 0.0) {
        return Err(Error::DegenerateSample("Q vanishes"));
    }
    let ratio = (tau - model.c().unwrap_or(0.0)) / q;
    let limit = 1.0 / (2.0 * profile.a());
    Ok((ratio, fabs(ratio / limit - 1.0)))
}
