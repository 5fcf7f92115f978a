use kahler_core::dual::Dual;
use kahler_core::field::{wedge, EndoField, ScaledIdentity, TwoFormField};
use kahler_core::geometry::{Chart, Local};
use kahler_core::hamiltonian::{hamiltonian_residual, j_invariance_residual};
use kahler_core::kahler::kahler_residuals;
use kahler_core::killing::{cyclic_from_diagonal, cyclic_killing_residual, Shifted};
use kahler_core::models::{spec_by_id, Model, DEFAULT_MODEL_IDS};
use kahler_core::real::Real;
use kahler_core::report::Stats;
use kahler_core::sampling::{uniform_in_box, Sampler};
use proptest::prelude::*;
use std::sync::OnceLock;

fn models() -> &'static Vec<Model> {
    static MODELS: OnceLock<Vec<Model>> = OnceLock::new();
    MODELS.get_or_init(|| DEFAULT_MODEL_IDS.iter().map(|id| spec_by_id(id).unwrap().build().unwrap()).collect())
}

/// Model index, a point in its box (from unit coordinates) and three vectors.
fn sample() -> impl Strategy<Value = (usize, Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
    let unit = prop::collection::vec(0.0..1.0f64, 6);
    let v = || prop::collection::vec(-1.0..1.0f64, 6);
    (0..DEFAULT_MODEL_IDS.len(), unit, v(), v(), v()).prop_map(|(k, u, x, y, z)| {
        let m = &models()[k];
        let n = m.dim();
        let p = m.bounds().iter().zip(&u).map(|(b, t)| b.lo + 0.01 + (b.hi - b.lo - 0.02) * t).collect();
        (k, p, x[..n].to_vec(), y[..n].to_vec(), z[..n].to_vec())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_model_is_kahler((k, p, ..) in sample()) {
        let m = &models()[k];
        let local = Local::at(m, &p).unwrap();
        let r = kahler_residuals(m, &local);
        prop_assert!(r.max_residual() < 1e-9, "{r:?}");
        prop_assert!(r.omega_det > 0.0);
    }

    #[test]
    fn killing_tensors_are_killing_symmetric_and_j_invariant((k, p, x, y, z) in sample()) {
        let m = &models()[k];
        prop_assume!(m.away_from_critical(&p));
        let local = Local::at(m, &p).unwrap();
        let cand = m.candidate();
        prop_assert!(cyclic_killing_residual(m, &cand.s, &local, &x, &y, &z).abs() < 1e-8);
        let (sym, comm) = cand.structure_residuals(m, &local);
        prop_assert!(sym < 1e-10 && comm < 1e-10);
    }

    #[test]
    fn constant_shift_leaves_cyclic_residual((k, p, x, y, z) in sample(), shift in -10.0..10.0f64) {
        let m = &models()[k];
        let local = Local::at(m, &p).unwrap();
        let control = ScaledIdentity(kahler_core::field::Coordinate(0));
        let a = cyclic_killing_residual(m, &control, &local, &x, &y, &z);
        let b = cyclic_killing_residual(m, &Shifted { inner: &control, lambda: shift }, &local, &x, &y, &z);
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn polarization_recovers_cyclic_sum((k, p, x, y, z) in sample()) {
        let m = &models()[k];
        let local = Local::at(m, &p).unwrap();
        let control = ScaledIdentity(kahler_core::field::Coordinate(1));
        let c = cyclic_killing_residual(m, &control, &local, &x, &y, &z);
        let d = cyclic_from_diagonal(m, &control, &local, &x, &y, &z);
        prop_assert!((c - d).abs() <= 1e-12 * (1.0 + c.abs()));
    }

    #[test]
    fn special_hamiltonian_forms_satisfy_the_identity((k, p, x, y, z) in sample()) {
        let m = &models()[k];
        prop_assume!(m.away_from_critical(&p));
        if let Some(phi) = m.hamiltonian_form() {
            let local = Local::at(m, &p).unwrap();
            prop_assert!(hamiltonian_residual(m, &phi, &local, &x, &y, &z).abs() < 1e-8);
            prop_assert!(j_invariance_residual(&phi.eval(m, &p[..]), &local.j) < 1e-10);
        }
    }

    #[test]
    fn s_commutes_with_j_on_every_model((k, p, ..) in sample()) {
        let m = &models()[k];
        let s = m.killing_tensor().eval(m, &p[..]);
        let j = m.complex_structure(&p[..]);
        prop_assert!((&(&j * &s) - &(&s * &j)).max_abs() < 1e-10);
    }

    #[test]
    fn wedge_is_bilinear_and_antisymmetric(
        a in prop::collection::vec(-1.0..1.0f64, 4),
        b in prop::collection::vec(-1.0..1.0f64, 4),
        c in prop::collection::vec(-1.0..1.0f64, 4),
        t in -2.0..2.0f64,
    ) {
        let ab = wedge(&a, &b);
        prop_assert_eq!(&ab, &wedge(&b, &a).scale(-1.0));
        let sum: Vec<f64> = a.iter().zip(&c).map(|(u, v)| u + t * v).collect();
        let lhs = wedge(&sum, &b);
        let rhs = &ab + &wedge(&c, &b).scale(t);
        prop_assert!((&lhs - &rhs).max_abs() < 1e-14);
    }

    #[test]
    fn dual_derivative_matches_calculus(x in -2.0..2.0f64) {
        // f(x) = sin(x) eˣ / (1 + x²)
        let f = |v: Dual<f64>| v.sin() * v.exp() / (v * v + 1.0);
        let d = f(Dual::variable(x)).eps;
        let expected = ((x.cos() + x.sin()) * (1.0 + x * x) - 2.0 * x * x.sin()) * x.exp() / ((1.0 + x * x) * (1.0 + x * x));
        prop_assert!((d - expected).abs() < 1e-13 * (1.0 + expected.abs()));
    }

    #[test]
    fn stats_are_ordered(values in prop::collection::vec(0.0..1e3f64, 1..200)) {
        let s = Stats::of(&values);
        prop_assert!(s.min <= s.mean && s.mean <= s.max * (1.0 + 1e-15));
        prop_assert!(s.min <= s.p95 && s.p95 <= s.max);
    }

    #[test]
    fn sampling_is_a_function_of_the_index(seed in any::<u64>(), stream in 0u64..16, index in 0u64..1000) {
        let m = &models()[0];
        let s = Sampler::new(seed, stream);
        let a = uniform_in_box(&mut s.rng(index), m, 0.0);
        let b = uniform_in_box(&mut s.rng(index), m, 0.0);
        prop_assert_eq!(&a, &b);
        prop_assert!(m.contains(&a, 0.0));
    }
}
