//! Momentum profiles `Q(τ)`: positive on `(τ_min, τ_max)`, vanishing at both
//! ends with slopes `+2a` and `−2a`.

use crate::dual::Dual;
use crate::error::{Error, Result};
use crate::real::{fabs, Real};
use serde::{Deserialize, Serialize};

pub trait Profile {
    fn q<T: Real>(&self, tau: T) -> T;
    fn a(&self) -> f64;
    fn tau_min(&self) -> f64;
    fn tau_max(&self) -> f64;

    fn dq(&self, tau: f64) -> f64 {
        self.q(Dual::variable(tau)).eps
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileShape {
    Quadratic,
    Sine,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentumProfile {
    pub shape: ProfileShape,
    pub a: f64,
    pub tau_min: f64,
    pub tau_max: f64,
}

impl MomentumProfile {
    pub fn new(shape: ProfileShape, a: f64, tau_min: f64, tau_max: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::BadParameters("profile slope parameter a must be positive"));
        }
        if !(tau_min < tau_max) || !tau_min.is_finite() || !tau_max.is_finite() {
            return Err(Error::BadParameters("profile needs tau_min < tau_max"));
        }
        Ok(Self { shape, a, tau_min, tau_max })
    }

    fn width(&self) -> f64 {
        self.tau_max - self.tau_min
    }
}

impl Profile for MomentumProfile {
    fn q<T: Real>(&self, tau: T) -> T {
        let l = self.width();
        match self.shape {
            // 2a (τ − τ_min)(τ_max − τ) / L
            ProfileShape::Quadratic => (tau - self.tau_min) * (-tau + self.tau_max) * (2.0 * self.a / l),
            // (2aL/π) sin(π (τ − τ_min) / L)
            ProfileShape::Sine => {
                let pi = core::f64::consts::PI;
                ((tau - self.tau_min) * (pi / l)).sin() * (2.0 * self.a * l / pi)
            }
        }
    }

    fn a(&self) -> f64 {
        self.a
    }

    fn tau_min(&self) -> f64 {
        self.tau_min
    }

    fn tau_max(&self) -> f64 {
        self.tau_max
    }
}

/// Outcome of [`profile_endpoint_check`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndpointReport {
    pub q_at_min: f64,
    pub q_at_max: f64,
    pub slope_at_min: f64,
    pub slope_at_max: f64,
    /// Largest of `|Q(τ_min)|`, `|Q(τ_max)|`.
    pub endpoint_value_residual: f64,
    /// Largest of `|Q'(τ_min) − 2a|`, `|Q'(τ_max) + 2a|`.
    pub slope_residual: f64,
    pub min_interior_q: f64,
}

pub const ENDPOINT_VALUE_TOL: f64 = 1e-12;
pub const ENDPOINT_SLOPE_TOL: f64 = 1e-10;
const INTERIOR_SAMPLES: usize = 1000;

/// Checks the boundary behaviour of a profile and positivity on a uniform
/// interior grid. Fails with the first violated clause.
pub fn profile_endpoint_check<P: Profile>(profile: &P) -> Result<EndpointReport> {
    let (lo, hi, a) = (profile.tau_min(), profile.tau_max(), profile.a());
    let q_at_min = profile.q(lo);
    let q_at_max = profile.q(hi);
    let slope_at_min = profile.dq(lo);
    let slope_at_max = profile.dq(hi);
    let endpoint_value_residual = f64::max(fabs(q_at_min), fabs(q_at_max));
    let slope_residual = f64::max(fabs(slope_at_min - 2.0 * a), fabs(slope_at_max + 2.0 * a));
    let min_interior_q = (1..=INTERIOR_SAMPLES)
        .map(|k| lo + (hi - lo) * k as f64 / (INTERIOR_SAMPLES + 1) as f64)
        .map(|t| profile.q(t))
        .fold(f64::INFINITY, f64::min);
    if !(endpoint_value_residual <= ENDPOINT_VALUE_TOL) {
        return Err(Error::ProfileInvalid("Q does not vanish at the endpoints"));
    }
    if !(slope_residual <= ENDPOINT_SLOPE_TOL) {
        return Err(Error::ProfileInvalid("endpoint slopes are not +2a and -2a"));
    }
    if !(min_interior_q > 0.0) {
        return Err(Error::ProfileInvalid("Q is not positive on the open interval"));
    }
    Ok(EndpointReport {
        q_at_min,
        q_at_max,
        slope_at_min,
        slope_at_max,
        endpoint_value_residual,
        slope_residual,
        min_interior_q,
    })
}
