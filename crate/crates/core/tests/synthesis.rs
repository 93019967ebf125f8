mod common;

use std::f64::consts::PI;

use common::{orange, twisted, XI_COARSE, XI_FINE};
use dogforge_core::curvekit::{frenet, uniform_grid, SpaceCurve};
use dogforge_core::dogsynth::{
    audit, frenet_field_consistency, interpolate_xi, lobe_reports, orange_slice_2d, phase_vs_twist,
    rebase_start_point, synthesize, twisted_3d, OrangeSliceOptions, RebaseOptions, TwistOptions,
};
use dogforge_core::holonomy::bloch_path_from_evolution;
use dogforge_core::numerics::{rms, wrap_angle};
use dogforge_core::qdyn::{
    error_curve, gate_fidelity, propagate, ControlFields, NoiseModel, Unitary2,
};
use dogforge_core::{Error, Tolerances, Vec3};

/// Best rotation angle about z taking `a` onto `b`, and the RMS residual.
fn align_about_z(a: &SpaceCurve, b: &SpaceCurve) -> (f64, f64) {
    let (mut s, mut c) = (0.0, 0.0);
    for (p, q) in a.points.iter().zip(&b.points) {
        s += p.x * q.y - p.y * q.x;
        c += p.x * q.x + p.y * q.y;
    }
    let ang = s.atan2(c);
    let (sn, cs) = ang.sin_cos();
    let res = rms(a.points.iter().zip(&b.points).map(|(p, q)| {
        let r = Vec3::new(cs * p.x - sn * p.y, sn * p.x + cs * p.y, p.z);
        (r - *q).norm()
    }));
    (ang, res)
}

#[test]
fn twisted_designs_pass_every_audit_check() {
    for xi in [0.0, XI_COARSE, XI_FINE] {
        let a = audit(twisted(xi)).unwrap();
        for c in &a.checks {
            assert!(
                c.passed,
                "xi={xi}: {} = {:e} (limit {:e})",
                c.name, c.value, c.limit
            );
        }
    }
}

#[test]
fn orange_slice_designs_pass_every_audit_check() {
    for p in [PI / 4.0, PI / 2.0, 3.0 * PI / 4.0] {
        let a = audit(orange(p)).unwrap();
        for c in &a.checks {
            assert!(
                c.passed,
                "phi0={p}: {} = {:e} (limit {:e})",
                c.name, c.value, c.limit
            );
        }
    }
}

#[test]
fn coarse_twist_gives_the_reported_gate() {
    let d = twisted(XI_COARSE);
    let target = Unitary2::phase_gate(-0.41 * PI);
    assert!(gate_fidelity(&target, &d.gate) > 0.9995);
    assert!(wrap_angle(d.beta_g_propagated + 0.41 * PI).abs() < 0.01 * PI);
}

#[test]
fn path_phase_matches_propagated_phase() {
    for d in [twisted(XI_COARSE), twisted(XI_FINE), orange(PI / 2.0)] {
        assert!(
            d.beta_discrepancy.abs() < 1e-4,
            "{}: {:e}",
            d.label,
            d.beta_discrepancy
        );
    }
}

#[test]
fn zero_twist_is_two_planar_pi_pulses() {
    let d = twisted(0.0);
    assert!(d.fields.delta.iter().all(|v| v.abs() < 1e-9));
    assert!(d.error_curve.points.iter().all(|p| p.x.abs() < 1e-9));
    // two pi rotations about the same axis: U = -1
    let minus_one = Unitary2::IDENTITY.scale((-1.0).into());
    assert!(gate_fidelity(&minus_one, &d.gate) > 1.0 - 1e-9);
    let half = (d.fields.len() - 1) / 2;
    assert!((d.fields.pulse_area(0, half) - PI).abs() < 1e-6);
}

#[test]
fn twisted_fields_have_sech_like_envelopes() {
    let d = twisted(XI_COARSE);
    let n = d.fields.len();
    let peak = |v: &[f64]| v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let om = peak(&d.fields.omega);
    let de = peak(&d.fields.delta);
    assert!(om > 0.5 && de > 0.1);
    // both fields fade at the ends and at the junction of the two arcs
    for i in [3, n / 2, n - 4] {
        assert!(d.fields.omega[i].abs() < 1e-2 * om, "omega at {i}");
    }
}

#[test]
fn resynthesis_reproduces_the_error_curve_up_to_z_rotation() {
    for d in [twisted(XI_COARSE), orange(PI / 4.0)] {
        let c = error_curve(&d.fields).unwrap();
        let (_, res) = align_about_z(&c, &d.error_curve);
        assert!(
            res < 1e-6 * d.error_curve.duration(),
            "{}: {res:e}",
            d.label
        );
    }
}

#[test]
fn round_trip_through_the_error_curve_keeps_the_gate() {
    let tol = Tolerances::default();
    for d in [twisted(XI_COARSE), twisted(XI_FINE), orange(3.0 * PI / 4.0)] {
        let c = error_curve(&d.fields).unwrap();
        let again = synthesize(&c, &tol).unwrap();
        let f = gate_fidelity(&d.gate, &again.gate);
        assert!(f > 1.0 - 1e-6, "{}: 1-F = {:e}", d.label, 1.0 - f);
    }
}

#[test]
fn equal_drive_and_torsion_give_equal_curves_but_different_paths() {
    let n = 4001;
    let t = uniform_grid(0.0, 8.0, n);
    let omega: Vec<f64> = t.iter().map(|s| 1.0 + 0.3 * (0.7 * s).sin()).collect();
    let phi_a: Vec<f64> = t.iter().map(|s| 0.2 * s).collect();
    let delta_a = vec![0.0; n];
    // Delta_b = 0.5 cos(s); Phi_b = Phi_a + integral Delta_b keeps Phi' - Delta
    let delta_b: Vec<f64> = t.iter().map(|s| 0.5 * s.cos()).collect();
    let phi_b: Vec<f64> = t
        .iter()
        .zip(&phi_a)
        .map(|(s, p)| p + 0.5 * s.sin())
        .collect();
    let a = ControlFields::new(t.clone(), omega.clone(), phi_a, delta_a).unwrap();
    let b = ControlFields::new(t, omega, phi_b, delta_b).unwrap();
    let ca = error_curve(&a).unwrap();
    let cb = error_curve(&b).unwrap();
    let d = rms(ca
        .points
        .iter()
        .zip(&cb.points)
        .map(|(p, q)| (*p - *q).norm()));
    assert!(d < 1e-8, "curve rms {d:e}");
    let pa = bloch_path_from_evolution(&propagate(&a, &NoiseModel::default()).unwrap());
    let pb = bloch_path_from_evolution(&propagate(&b, &NoiseModel::default()).unwrap());
    let dphi = pa
        .phi
        .iter()
        .zip(&pb.phi)
        .map(|(x, y)| wrap_angle(x - y).abs())
        .fold(0.0, f64::max);
    assert!(dphi > 0.1, "paths coincide: {dphi:e}");
    assert!(pa
        .theta
        .iter()
        .zip(&pb.theta)
        .all(|(x, y)| (x - y).abs() < 1e-9));
}

#[test]
fn rebase_by_half_shifts_curvature_and_keeps_the_trace() {
    let d = twisted(XI_COARSE);
    let n = d.error_curve.len();
    let s = (n - 1) / 2;
    let r = rebase_start_point(d, s, &RebaseOptions::default()).unwrap();
    let k0 = frenet(&d.error_curve).unwrap().curvature;
    let k1 = frenet(&r.error_curve).unwrap().curvature;
    let period = n - 1;
    let diff = rms((10..n - 10)
        .filter(|i| (i + s) % period > 10 && (i + s) % period < period - 10)
        .map(|i| k1[i] - k0[(i + s) % period]));
    assert!(diff < 1e-6, "curvature shift rms {diff:e}");
    assert!((r.gate.trace() - d.gate.trace()).norm() < 1e-4);
}

#[test]
fn rebase_at_peak_curvature_rejects_zero_amplitude_demand() {
    let d = twisted(XI_COARSE);
    let n = d.error_curve.len();
    let opts = RebaseOptions {
        require_zero_amplitude: true,
        zero_amplitude_tol: 1e-3,
    };
    assert!(matches!(
        rebase_start_point(d, n / 4, &opts),
        Err(Error::StartCurvature { .. })
    ));
    assert!(rebase_start_point(d, (n - 1) / 2, &opts).is_ok());
}

#[test]
fn lobes_are_planar_pi_rotations() {
    let tol = Tolerances::default();
    for p in [PI / 4.0, PI / 2.0, 3.0 * PI / 4.0] {
        let d = orange(p);
        let half_len = d.error_curve.duration() / 2.0;
        for l in lobe_reports(d) {
            assert!((l.area - PI).abs() < 1e-3);
            assert!(l.plane_rms < 1e-4 * l.size);
            assert!(l.endpoint_gap < tol.closure_tol(half_len));
        }
    }
}

#[test]
fn identity_angle_has_coplanar_lobes() {
    let d = orange(0.0);
    let [a, b]: [_; 2] = lobe_reports(d).try_into().unwrap();
    assert!(a.plane_rms < 1e-4 * a.size && b.plane_rms < 1e-4 * b.size);
    // all points share the single plane x = 0
    assert!(d
        .error_curve
        .points
        .iter()
        .all(|p| p.x.abs() < 1e-6 * a.size));
    // the gate is diagonal with U00 = -1: a global phase
    assert!(gate_fidelity(&Unitary2::IDENTITY, &d.gate) > 1.0 - 1e-9);
}

#[test]
fn verbatim_pulse_table_leaves_the_curve_open() {
    let r = orange_slice_2d(
        PI / 2.0,
        1.0,
        &OrangeSliceOptions::verbatim(),
        &Tolerances::default(),
    );
    assert!(matches!(r, Err(Error::OpenCurve { .. })), "{r:?}");
}

#[test]
fn out_of_range_parameters_are_rejected() {
    let tol = Tolerances::default();
    assert!(matches!(
        orange_slice_2d(-PI, 1.0, &OrangeSliceOptions::default(), &tol),
        Err(Error::OutOfRange(_))
    ));
    assert!(matches!(
        twisted_3d(PI / 400.0, 1.0, &TwistOptions::default(), &tol),
        Err(Error::OutOfRange(_))
    ));
}

#[test]
fn curvature_and_torsion_match_the_fields_for_both_families() {
    for d in [twisted(XI_COARSE), orange(PI / 2.0)] {
        let r = frenet_field_consistency(&d.error_curve, &d.fields).unwrap();
        assert!(r.passed(), "{}: {r:?}", d.label);
    }
}

#[test]
fn corrupted_detuning_fails_the_torsion_check() {
    let d = twisted(XI_COARSE);
    let mut f = d.fields.clone();
    for v in &mut f.delta {
        *v += 0.05;
    }
    let r = frenet_field_consistency(&d.error_curve, &f).unwrap();
    assert!(r.tau_rms > 1e-2);
}

#[test]
fn interpolated_twist_hits_a_target_phase() {
    let tol = Tolerances::default();
    let opts = TwistOptions::default();
    let xs: Vec<f64> = (0..5)
        .map(|k| XI_FINE + k as f64 * (PI / 1500.0 - XI_FINE) / 4.0)
        .collect();
    let table = phase_vs_twist(&xs, 1.0, &opts, &tol).unwrap();
    // -pi/2 on the branch the table lives on
    let target = -0.5 * PI - 2.0 * PI;
    let xi = interpolate_xi(&table, target).unwrap();
    let d = twisted_3d(xi.min(PI / 500.0), 1.0, &opts, &tol).unwrap();
    assert!(
        wrap_angle(d.beta_g - target).abs() < 0.005 * PI,
        "xi={xi:e} beta={}",
        d.beta_g / PI
    );
}
