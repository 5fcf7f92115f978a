//! Model charts: Fubini–Study `ℂPⁿ` with a radial potential, products of
//! projective charts with a block Killing tensor, and a local Calabi chart.

pub mod fubini_study;
pub mod profile;
pub mod special;

use crate::error::{Error, Result};
use crate::field::{ConstantEndo, EndoField, ScalarField};
use crate::geometry::{standard_complex_structure, Chart, Interval};
use crate::hamiltonian::SpecialHamiltonianForm;
use crate::kahler::require_kahler;
use crate::killing::{KillingCandidate, SpecialKillingTensor};
use crate::linalg::Mat;
use crate::real::{fabs, Real};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use fubini_study::{fs_connection_form, fs_metric, fs_moment};
use profile::{profile_endpoint_check, MomentumProfile, Profile, ProfileShape};
use serde::{Deserialize, Serialize};

/// Tolerance for the structural checks run at construction.
pub const CONSTRUCTION_TOL: f64 = 1e-9;
/// Radius of the ball around the critical point excluded from gap-sensitive
/// sampling on the radial model.
pub const CRITICAL_EXCLUSION_RADIUS: f64 = 0.02;
const FLAT_HALF_WIDTH: f64 = 1.5;
const FIBER_HALF_WIDTH: f64 = 4.0;
const BASE_HALF_WIDTH: f64 = 1.0;

/// A Fubini–Study factor `ℂP^m` on its affine chart, metric scaled by `scale`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorSpec {
    pub m: usize,
    pub scale: f64,
}

impl FactorSpec {
    pub const fn cp(m: usize) -> Self {
        Self { m, scale: 1.0 }
    }

    fn dim(&self) -> usize {
        2 * self.m
    }

    fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::BadParameters("factor dimension must be at least 1"));
        }
        if !(self.scale > 0.0) || !self.scale.is_finite() {
            return Err(Error::BadParameters("factor scale must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    /// `ℂPⁿ` with `τ = c + scale·|z|²/(1 + |z|²)`.
    FubiniStudyRadial { n: usize, scale: f64, c: f64 },
    /// `Σ × N` with `S = 0 ⊕ μ·Id`.
    Product { sigma: FactorSpec, base: FactorSpec, mu: f64 },
    /// `(τ−c) g_N + dτ²/Q(τ) + Q(τ) η²` over a projective base.
    CalabiLocal { base: FactorSpec, profile: MomentumProfile, c: f64 },
}

impl ModelSpec {
    pub fn family(&self) -> &'static str {
        match self {
            Self::FubiniStudyRadial { .. } => "cpn-radial",
            Self::Product { .. } => "product",
            Self::CalabiLocal { .. } => "calabi",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::FubiniStudyRadial { n, .. } => 2 * n,
            Self::Product { sigma, base, .. } => sigma.dim() + base.dim(),
            Self::CalabiLocal { base, .. } => 2 + base.dim(),
        }
    }

    /// Overrides one named parameter.
    pub fn set_param(&mut self, key: &str, value: &str) -> Result<()> {
        let num = || value.trim().parse::<f64>().map_err(|_| Error::BadParameters("parameter value is not a number"));
        let int = || value.trim().parse::<usize>().map_err(|_| Error::BadParameters("parameter value is not an integer"));
        match (self, key) {
            (Self::FubiniStudyRadial { n, .. }, "n") => *n = int()?,
            (Self::FubiniStudyRadial { scale, .. }, "scale") => *scale = num()?,
            (Self::FubiniStudyRadial { c, .. }, "c") => *c = num()?,
            (Self::Product { mu, .. }, "mu") => *mu = num()?,
            (Self::Product { sigma, .. }, "sigma_scale") => sigma.scale = num()?,
            (Self::Product { base, .. }, "base_n") => base.m = int()?,
            (Self::Product { base, .. }, "base_scale") => base.scale = num()?,
            (Self::CalabiLocal { base, .. }, "base_n") => base.m = int()?,
            (Self::CalabiLocal { base, .. }, "base_scale") => base.scale = num()?,
            (Self::CalabiLocal { profile, .. }, "a") => profile.a = num()?,
            (Self::CalabiLocal { profile, .. }, "tau_min") => profile.tau_min = num()?,
            (Self::CalabiLocal { profile, .. }, "tau_max") => profile.tau_max = num()?,
            (Self::CalabiLocal { profile, .. }, "profile") => {
                profile.shape = match value.trim() {
                    "quadratic" => ProfileShape::Quadratic,
                    "sine" => ProfileShape::Sine,
                    _ => return Err(Error::BadParameters("profile must be quadratic or sine")),
                }
            }
            (Self::CalabiLocal { c, .. }, "c") => *c = num()?,
            _ => return Err(Error::BadParameters("unknown model parameter")),
        }
        Ok(())
    }

    /// Parameter names accepted by [`ModelSpec::set_param`].
    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            Self::FubiniStudyRadial { .. } => &["n", "scale", "c"],
            Self::Product { .. } => &["mu", "sigma_scale", "base_n", "base_scale"],
            Self::CalabiLocal { .. } => &["base_n", "base_scale", "a", "tau_min", "tau_max", "profile", "c"],
        }
    }

    pub fn build(&self) -> Result<Model> {
        match *self {
            Self::FubiniStudyRadial { n, scale, c } => make_fubini_study_radial(n, scale, c),
            Self::Product { sigma, base, mu } => make_product(sigma, base, mu),
            Self::CalabiLocal { base, profile, c } => make_calabi_local(base, profile.a, profile.tau_min, profile.tau_max, c, profile.shape),
        }
    }
}

/// The special Kähler potential of a model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Potential {
    /// `c + s·|z|²/(1 + |z|²)`.
    Radial { c: f64, s: f64 },
    /// A coordinate function.
    Coordinate(usize),
}

impl ScalarField for Potential {
    fn eval<T: Real, C: Chart>(&self, _chart: &C, x: &[T]) -> T {
        match *self {
            Self::Radial { c, s } => fs_moment(x) * s + c,
            Self::Coordinate(k) => x[k],
        }
    }
}

/// The Killing tensor attached to a model.
#[derive(Clone, Debug)]
pub enum ModelKillingTensor {
    Special(SpecialKillingTensor<Potential>),
    Block(ConstantEndo),
}

impl EndoField for ModelKillingTensor {
    fn eval<T: Real, C: Chart>(&self, chart: &C, x: &[T]) -> Mat<T> {
        match self {
            Self::Special(s) => s.eval(chart, x),
            Self::Block(s) => s.eval(chart, x),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Model {
    spec: ModelSpec,
    bounds: Vec<Interval>,
}

impl Chart for Model {
    fn dim(&self) -> usize {
        self.bounds.len()
    }

    fn bounds(&self) -> &[Interval] {
        &self.bounds
    }

    fn metric<T: Real>(&self, x: &[T]) -> Mat<T> {
        match self.spec {
            ModelSpec::FubiniStudyRadial { .. } => fs_metric(x, 1.0),
            ModelSpec::Product { sigma, base, .. } => {
                let k = sigma.dim();
                let g1 = fs_metric(&x[..k], sigma.scale);
                let g2 = fs_metric(&x[k..], base.scale);
                Mat::from_fn(x.len(), |i, j| match (i < k, j < k) {
                    (true, true) => g1[(i, j)],
                    (false, false) => g2[(i - k, j - k)],
                    _ => T::zero(),
                })
            }
            ModelSpec::CalabiLocal { base, profile, c } => {
                let tau = x[0];
                let q = profile.q(tau);
                let y = &x[2..];
                let gn = fs_metric(y, base.scale);
                let a = fs_connection_form(y, base.scale);
                let r = tau - c;
                Mat::from_fn(x.len(), |i, j| match (i, j) {
                    (0, 0) => q.recip(),
                    (0, _) | (_, 0) => T::zero(),
                    (1, 1) => q,
                    (1, b) => q * a[b - 2],
                    (b, 1) => q * a[b - 2],
                    (b, d) => q * a[b - 2] * a[d - 2] + r * gn[(b - 2, d - 2)],
                })
            }
        }
    }

    fn complex_structure<T: Real>(&self, x: &[T]) -> Mat<T> {
        match self.spec {
            ModelSpec::FubiniStudyRadial { .. } | ModelSpec::Product { .. } => standard_complex_structure(x.len()),
            ModelSpec::CalabiLocal { base, profile, .. } => {
                let q = profile.q(x[0]);
                let y = &x[2..];
                let a = fs_connection_form(y, base.scale);
                let jn = standard_complex_structure::<T>(y.len());
                let n = x.len();
                let mut j = Mat::zeros(n);
                j[(1, 0)] = q.recip();
                j[(0, 1)] = -q;
                for col in 2..n {
                    let ac = col - 2;
                    let mut t_row = T::zero();
                    for b in 0..y.len() {
                        j[(b + 2, col)] = jn[(b, ac)];
                        t_row -= jn[(b, ac)] * a[b];
                    }
                    j[(1, col)] = t_row;
                    j[(0, col)] = -q * a[ac];
                }
                j
            }
        }
    }
}

impl Model {
    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn family(&self) -> &'static str {
        self.spec.family()
    }

    /// Complex dimension `n`.
    pub fn complex_dim(&self) -> usize {
        self.dim() / 2
    }

    pub fn potential(&self) -> Option<Potential> {
        match self.spec {
            ModelSpec::FubiniStudyRadial { scale, c, .. } => Some(Potential::Radial { c, s: scale }),
            ModelSpec::Product { .. } => None,
            ModelSpec::CalabiLocal { .. } => Some(Potential::Coordinate(0)),
        }
    }

    /// The constant `c` with `μ = τ − c`.
    pub fn c(&self) -> Option<f64> {
        match self.spec {
            ModelSpec::FubiniStudyRadial { c, .. } | ModelSpec::CalabiLocal { c, .. } => Some(c),
            ModelSpec::Product { .. } => None,
        }
    }

    /// Constant nonzero eigenvalue on product models.
    pub fn constant_mu(&self) -> Option<f64> {
        match self.spec {
            ModelSpec::Product { mu, .. } => Some(mu),
            _ => None,
        }
    }

    pub fn killing_tensor(&self) -> ModelKillingTensor {
        match self.spec {
            ModelSpec::Product { sigma, mu, .. } => {
                let k = sigma.dim();
                let n = self.dim();
                ModelKillingTensor::Block(ConstantEndo(Mat::from_fn(n, |i, j| if i == j && i >= k { mu } else { 0.0 })))
            }
            _ => {
                let potential = self.potential().expect("potential exists on non-product models");
                ModelKillingTensor::Special(SpecialKillingTensor { potential, c: self.c().unwrap_or(0.0) })
            }
        }
    }

    /// The Killing tensor with its constant eigenvalue `λ = 0`.
    pub fn candidate(&self) -> KillingCandidate<ModelKillingTensor> {
        KillingCandidate::new(self.killing_tensor(), 0.0)
    }

    /// `(τ − c) dτ ∧ d^cτ / Q` where a potential exists.
    pub fn hamiltonian_form(&self) -> Option<SpecialHamiltonianForm<Potential>> {
        Some(SpecialHamiltonianForm { potential: self.potential()?, c: self.c()? })
    }

    /// The momentum profile `Q(τ)`.
    pub fn profile(&self) -> Option<MomentumProfile> {
        match self.spec {
            // |∇(u/(1+u))|² = 4f(1 − f) for the unit metric, so Q = 4(τ − c)(c + s − τ).
            ModelSpec::FubiniStudyRadial { scale, c, .. } => Some(MomentumProfile {
                shape: ProfileShape::Quadratic,
                a: 2.0 * scale,
                tau_min: c,
                tau_max: c + scale,
            }),
            ModelSpec::CalabiLocal { profile, .. } => Some(profile),
            ModelSpec::Product { .. } => None,
        }
    }

    /// Point where `μ = λ`, if it lies in the chart.
    pub fn critical_point(&self) -> Option<Vec<f64>> {
        match self.spec {
            ModelSpec::FubiniStudyRadial { .. } => Some(vec![0.0; self.dim()]),
            _ => None,
        }
    }

    /// Sampling predicate for suites that need a spectral gap.
    pub fn away_from_critical(&self, p: &[f64]) -> bool {
        match self.critical_point() {
            Some(x0) => {
                let r2: f64 = p.iter().zip(&x0).map(|(a, b)| (a - b) * (a - b)).sum();
                r2 > CRITICAL_EXCLUSION_RADIUS * CRITICAL_EXCLUSION_RADIUS
            }
            None => true,
        }
    }

    /// Names of the fields a model carries.
    pub fn field_names(&self) -> Vec<&'static str> {
        let mut names = vec!["g", "J", "omega", "S", "mu"];
        if self.potential().is_some() {
            names.extend(["tau", "Q", "grad_tau", "J_grad_tau", "phi", "sigma"]);
        }
        names
    }

    /// Evaluates a named scalar field.
    pub fn named_scalar(&self, name: &str, p: &[f64]) -> Option<f64> {
        use crate::field::GradNormSquared;
        use crate::hamiltonian::TraceSigma;
        match name {
            "mu" => Some(self.candidate().mu().eval(self, p)),
            "tau" => Some(self.potential()?.eval(self, p)),
            "Q" => Some(GradNormSquared(self.potential()?).eval(self, p)),
            "sigma" => Some(TraceSigma(self.hamiltonian_form()?).eval(self, p)),
            _ => None,
        }
    }

    /// A short human-readable label with the parameters.
    pub fn describe(&self) -> String {
        use core::fmt::Write;
        let mut s = String::new();
        let _ = match self.spec {
            ModelSpec::FubiniStudyRadial { n, scale, c } => write!(s, "CP^{n} radial, scale={scale}, c={c}"),
            ModelSpec::Product { sigma, base, mu } => write!(s, "CP^{} x CP^{}, mu={mu}", sigma.m, base.m),
            ModelSpec::CalabiLocal { base, profile, c } => write!(
                s,
                "Calabi over CP^{}, {:?} profile, a={}, tau in ({}, {}), c={c}",
                base.m, profile.shape, profile.a, profile.tau_min, profile.tau_max
            ),
        };
        s
    }

    /// Deterministic probe points: the box centre and two off-centre points.
    fn probes(&self) -> Vec<Vec<f64>> {
        let fracs = [0.5, 0.3, 0.7];
        fracs
            .iter()
            .enumerate()
            .map(|(k, &f)| {
                self.bounds
                    .iter()
                    .enumerate()
                    .map(|(i, b)| {
                        let t = if (i + k) % 2 == 0 { f } else { 1.0 - f };
                        b.lo + (b.hi - b.lo) * (0.5 + 0.8 * (t - 0.5))
                    })
                    .collect()
            })
            .collect()
    }
}

pub fn make_fubini_study_radial(n: usize, scale: f64, c: f64) -> Result<Model> {
    if n < 2 {
        return Err(Error::BadParameters("radial model needs n >= 2"));
    }
    if !(scale > 0.0) || !scale.is_finite() || !c.is_finite() {
        return Err(Error::BadParameters("radial model needs scale > 0 and finite c"));
    }
    let model = Model {
        spec: ModelSpec::FubiniStudyRadial { n, scale, c },
        bounds: vec![Interval::new(-FLAT_HALF_WIDTH, FLAT_HALF_WIDTH); 2 * n],
    };
    require_kahler(&model, &model.probes(), CONSTRUCTION_TOL)?;
    Ok(model)
}

pub fn make_product(sigma: FactorSpec, base: FactorSpec, mu: f64) -> Result<Model> {
    sigma.validate()?;
    base.validate()?;
    if sigma.m != 1 {
        return Err(Error::BadParameters("the first product factor must be a complex curve"));
    }
    if !mu.is_finite() {
        return Err(Error::BadParameters("mu must be finite"));
    }
    let model = Model {
        spec: ModelSpec::Product { sigma, base, mu },
        bounds: vec![Interval::new(-FLAT_HALF_WIDTH, FLAT_HALF_WIDTH); sigma.dim() + base.dim()],
    };
    require_kahler(&model, &model.probes(), CONSTRUCTION_TOL)?;
    Ok(model)
}

pub fn make_calabi_local(base: FactorSpec, a: f64, tau_min: f64, tau_max: f64, c: f64, shape: ProfileShape) -> Result<Model> {
    base.validate()?;
    let profile = MomentumProfile::new(shape, a, tau_min, tau_max)?;
    if !(tau_min > c) {
        return Err(Error::BadParameters("Calabi model needs tau_min > c"));
    }
    profile_endpoint_check(&profile)?;
    let l = tau_max - tau_min;
    let mut bounds = vec![
        Interval::new(tau_min + 0.1 * l, tau_max - 0.1 * l),
        Interval::new(-FIBER_HALF_WIDTH, FIBER_HALF_WIDTH),
    ];
    bounds.extend(core::iter::repeat_n(Interval::new(-BASE_HALF_WIDTH, BASE_HALF_WIDTH), base.dim()));
    let model = Model { spec: ModelSpec::CalabiLocal { base, profile, c }, bounds };
    let probes = model.probes();
    require_kahler(&model, &probes, CONSTRUCTION_TOL)?;
    for p in &probes {
        let r = special::relations_at(&model, p)?;
        if !(r.q_consistency <= CONSTRUCTION_TOL) {
            return Err(Error::NotKahler { check: "Q = |grad tau|^2", residual: r.q_consistency });
        }
        if !(fabs(r.q_over_theta) <= CONSTRUCTION_TOL) {
            return Err(Error::NotKahler { check: "Q/Theta = 2(tau - c)", residual: r.q_over_theta });
        }
        if !(r.dq <= CONSTRUCTION_TOL) {
            return Err(Error::NotKahler { check: "dQ = 2 Lambda dtau", residual: r.dq });
        }
    }
    Ok(model)
}

/// Default instances, by id.
pub const DEFAULT_MODEL_IDS: [&str; 7] =
    ["cp2-radial", "cp3-radial", "product-1x1", "product-1x2", "calabi-cp1", "calabi-cp2", "calabi-cp1-sine"];

fn calabi_default(m: usize, shape: ProfileShape) -> ModelSpec {
    ModelSpec::CalabiLocal {
        base: FactorSpec::cp(m),
        profile: MomentumProfile { shape, a: 1.0, tau_min: 1.0, tau_max: 2.0 },
        c: 0.0,
    }
}

/// Spec for a catalog id. Family ids (`cpn-radial`, `product`, `calabi`)
/// resolve to their smallest default instance.
pub fn spec_by_id(id: &str) -> Option<ModelSpec> {
    let radial = |n| ModelSpec::FubiniStudyRadial { n, scale: 1.0, c: 0.0 };
    let product = |m| ModelSpec::Product { sigma: FactorSpec::cp(1), base: FactorSpec::cp(m), mu: 1.0 };
    Some(match id {
        "cp2-radial" | "cpn-radial" => radial(2),
        "cp3-radial" => radial(3),
        "product-1x1" | "product" => product(1),
        "product-1x2" => product(2),
        "calabi-cp1" | "calabi" => calabi_default(1, ProfileShape::Quadratic),
        "calabi-cp2" => calabi_default(2, ProfileShape::Quadratic),
        "calabi-cp1-sine" => calabi_default(1, ProfileShape::Sine),
        _ => return None,
    })
}

/// Model families with their parameter names.
pub fn families() -> [(&'static str, &'static str, &'static [&'static str]); 3] {
    [
        ("cpn-radial", "Fubini-Study CP^n with the radial special potential", &["n", "scale", "c"]),
        ("product", "CP^1 x CP^m with S = 0 + mu Id", &["mu", "sigma_scale", "base_n", "base_scale"]),
        ("calabi", "local Calabi chart over CP^m", &["base_n", "base_scale", "a", "tau_min", "tau_max", "profile", "c"]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Local;
    use crate::kahler::check_kahler;

    #[test]
    fn all_defaults_build() {
        for id in DEFAULT_MODEL_IDS {
            let m = spec_by_id(id).unwrap().build().unwrap_or_else(|e| panic!("{id}: {e}"));
            assert_eq!(m.dim(), spec_by_id(id).unwrap().dim());
        }
    }

    #[test]
    fn calabi_chart_is_kahler() {
        let m = spec_by_id("calabi-cp2").unwrap().build().unwrap();
        let r = check_kahler(&m, &[vec![1.3, 0.7, 0.2, -0.4, 0.5, 0.1]]).unwrap();
        assert!(r.max_residual() < 1e-12, "{r:?}");
    }

    #[test]
    fn calabi_potential_gradient_norm_is_profile() {
        let m = spec_by_id("calabi-cp1").unwrap().build().unwrap();
        let p = [1.4, 0.3, 0.2, -0.6];
        let q = m.named_scalar("Q", &p).unwrap();
        assert!((q - 2.0 * 0.4 * 0.6).abs() < 1e-14);
        let _ = Local::at(&m, &p).unwrap();
    }

    #[test]
    fn set_param_rejects_unknown_keys() {
        let mut s = spec_by_id("product").unwrap();
        s.set_param("mu", "0").unwrap();
        assert_eq!(s, ModelSpec::Product { sigma: FactorSpec::cp(1), base: FactorSpec::cp(1), mu: 0.0 });
        assert!(s.set_param("tau_min", "1").is_err());
        assert!(s.set_param("mu", "x").is_err());
    }

    #[test]
    fn bad_calabi_parameters() {
        let base = FactorSpec::cp(1);
        assert_eq!(
            make_calabi_local(base, 1.0, 1.0, 2.0, 1.5, ProfileShape::Quadratic).unwrap_err(),
            Error::BadParameters("Calabi model needs tau_min > c")
        );
        assert!(make_fubini_study_radial(1, 1.0, 0.0).is_err());
    }
}
