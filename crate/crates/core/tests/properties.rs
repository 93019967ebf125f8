mod common;

use std::f64::consts::PI;

use dogforge_core::bench::{
    toy_model_fidelities, AxisKind, FidelitySweep, GateKind, NoiseKind, Scenario, SweepSeries,
};
use dogforge_core::curvekit::{frenet, tantrix_deviation, uniform_grid, SpaceCurve};
use dogforge_core::dogsynth::frenet_field_consistency;
use dogforge_core::holonomy::to_branch;
use dogforge_core::numerics::wrap_angle;
use dogforge_core::qdyn::{error_curve, gate_fidelity, propagate, NoiseModel, Unitary2};
use dogforge_core::Vec3;
use nalgebra::Matrix2;
use num_complex::Complex64;
use proptest::prelude::*;

fn vec3() -> impl Strategy<Value = Vec3> {
    (-4.0..4.0f64, -4.0..4.0f64, -4.0..4.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn unitary() -> impl Strategy<Value = Unitary2> {
    (vec3(), -PI..PI).prop_map(|(b, g)| Unitary2::exp_pauli(b).scale(Complex64::from_polar(1.0, g)))
}

proptest! {
    #[test]
    fn exp_pauli_is_special_unitary(b in vec3()) {
        let u = Unitary2::exp_pauli(b);
        prop_assert!(u.unitarity_error() < 1e-12);
        prop_assert!((u.det() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn exp_pauli_matches_a_generic_exponential(b in vec3()) {
        let i = Complex64::new(0.0, 1.0);
        let h = Matrix2::new(
            Complex64::from(b.z), Complex64::new(b.x, -b.y),
            Complex64::new(b.x, b.y), Complex64::from(-b.z),
        );
        let m = (h * -i).exp();
        let u = Unitary2::exp_pauli(b);
        for k in 0..4 {
            prop_assert!((u.0[k] - m[(k / 2, k % 2)]).norm() < 1e-10);
        }
    }

    #[test]
    fn fidelity_is_bounded_and_phase_blind(u in unitary(), v in unitary(), g in -PI..PI) {
        let f = gate_fidelity(&u, &v);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
        prop_assert!((gate_fidelity(&u, &u) - 1.0).abs() < 1e-12);
        let w = v.scale(Complex64::from_polar(1.0, g));
        prop_assert!((gate_fidelity(&u, &w) - f).abs() < 1e-12);
        prop_assert!((gate_fidelity(&v, &u) - f).abs() < 1e-12);
    }

    #[test]
    fn heisenberg_picture_is_a_rotation(u in unitary(), v in vec3()) {
        let w = u.heisenberg(v);
        prop_assert!((w.norm() - v.norm()).abs() < 1e-10 * (1.0 + v.norm()));
    }

    #[test]
    fn branch_is_a_two_pi_shift(x in -40.0..40.0f64) {
        let b = to_branch(x);
        prop_assert!(b > -2.0 * PI && b <= 2.0 * PI);
        prop_assert!(wrap_angle(b - x).abs() < 1e-9);
    }

    #[test]
    fn perpendicular_toy_gates_are_tied(phi in 0.05..PI, e in -0.5..0.5f64) {
        let s = |gate| Scenario { noise: NoiseKind::Perpendicular, gate };
        let hg = toy_model_fidelities(phi, e, s(GateKind::Hg)).unwrap();
        let nhg = toy_model_fidelities(phi, e, s(GateKind::Nhg)).unwrap();
        prop_assert!((hg.f_simulated - nhg.f_simulated).abs() < 1e-12);
        prop_assert!((hg.f_simulated - (2.0 + (2.0 * e).cos()) / 3.0).abs() < 1e-8);
    }

    #[test]
    fn exact_toy_forms_hold_everywhere(phi in 0.05..PI, e in -0.5..0.5f64) {
        for s in Scenario::ALL.into_iter().filter(|s| s.exact()) {
            let r = toy_model_fidelities(phi, e, s).unwrap();
            prop_assert!((r.f_closed_form - r.f_simulated).abs() < 1e-8, "{:?}", r);
        }
    }

    #[test]
    fn sweep_rejects_unsorted_axes(mut xs in prop::collection::vec(1e-4..1.0f64, 2..8)) {
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let series = |n| vec![SweepSeries { label: "a".into(), fidelities: vec![0.5; n] }];
        prop_assert!(FidelitySweep::new(AxisKind::AmplitudeRate, xs.clone(), series(xs.len())).is_ok());
        let mut rev = xs.clone();
        rev.reverse();
        if rev.len() > 1 {
            prop_assert!(FidelitySweep::new(AxisKind::AmplitudeRate, rev, series(xs.len())).is_err());
        }
        prop_assert!(FidelitySweep::new(AxisKind::AmplitudeRate, xs.clone(), series(xs.len() + 1)).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn helix_has_constant_curvature_and_torsion(a in 0.3..2.0f64, b in -1.5..1.5f64) {
        let c = a.hypot(b);
        let n = 2001;
        let t = uniform_grid(0.0, 10.0, n);
        let pts = t.iter().map(|s| Vec3::new(a * (s / c).cos(), a * (s / c).sin(), b * s / c)).collect();
        let curve = SpaceCurve::new(t, pts).unwrap();
        let fr = frenet(&curve).unwrap();
        let (k_ref, t_ref) = (a / (c * c), b / (c * c));
        for i in 0..n {
            prop_assert!((fr.curvature[i] - k_ref).abs() < 1e-6);
            if b.abs() > 1e-3 {
                prop_assert!((fr.torsion[i].unwrap() - t_ref).abs() < 1e-5);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn smooth_fields_obey_the_curvature_torsion_identity(seed in any::<u64>()) {
        let f = common::random_smooth_fields(seed, 8001, 12.0);
        let rec = propagate(&f, &NoiseModel::default()).unwrap();
        prop_assert!(rec.max_unitarity_error() < 1e-10);
        let c = error_curve(&f).unwrap();
        prop_assert!(tantrix_deviation(&c).unwrap() < 1e-6);
        let r = frenet_field_consistency(&c, &f).unwrap();
        prop_assert!(r.kappa_rel_rms < 1e-4 && r.tau_rms < 1e-3, "{:?}", r);
    }

    #[test]
    fn unperturbed_sweep_point_is_exact(seed in any::<u64>()) {
        let f = common::random_smooth_fields(seed, 2001, 6.0);
        let t = dogforge_core::bench::SweepTarget::new("r", f).unwrap();
        prop_assert_eq!(t.fidelity(AxisKind::DetuningRate, 0.0).unwrap(), 1.0);
        prop_assert_eq!(t.fidelity(AxisKind::AmplitudeRate, 0.0).unwrap(), 1.0);
    }
}
