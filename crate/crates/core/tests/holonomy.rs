use std::f64::consts::PI;

use dogforge_core::curvekit::uniform_grid;
use dogforge_core::holonomy::{
    aa_geometric_phase, aa_phase_robustness, bloch_path_from_evolution, dynamical_phase,
    fields_from_path, to_branch, BlochPath, PhaseFrame, TwoLevelToy,
};
use dogforge_core::numerics::{loglog_slope, logspace, wrap_angle};
use dogforge_core::qdyn::{propagate, ControlFields, NoiseModel};
use dogforge_core::{Error, Tolerances};

/// A parallel-transported excursion from the north pole and back.
fn transported_loop(n: usize) -> BlochPath {
    let t = uniform_grid(0.0, 10.0, n);
    let theta: Vec<f64> = t
        .iter()
        .map(|s| 1.2 * (PI * s / 10.0).sin().powi(2))
        .collect();
    let phi: Vec<f64> = t
        .iter()
        .map(|s| 0.3 + 0.25 * s + 0.1 * (0.4 * s).sin())
        .collect();
    let dphi: Vec<f64> = t.iter().map(|s| 0.25 + 0.04 * (0.4 * s).cos()).collect();
    let h = t[1] - t[0];
    let mut alpha = vec![0.0; n];
    for i in 1..n {
        // midpoint weights on the analytic rate
        let w = |k: usize| -0.5 * (1.0 - theta[k].cos()) * dphi[k];
        alpha[i] = alpha[i - 1] + 0.5 * h * (w(i - 1) + w(i));
    }
    BlochPath {
        t,
        theta,
        phi,
        alpha,
        flagged: vec![false; n],
    }
}

#[test]
fn fields_from_a_transported_path_drive_along_it() {
    let path = transported_loop(20001);
    let tol = Tolerances::default();
    let f = fields_from_path(&path, &tol).unwrap();
    let rec = propagate(&f, &NoiseModel::default()).unwrap();
    let back = bloch_path_from_evolution(&rec);
    let n = path.len();
    for i in (0..n).step_by(97) {
        assert!((back.theta[i] - path.theta[i]).abs() < 1e-6, "theta at {i}");
    }
    let beta = aa_geometric_phase(&back, 1e-4).unwrap();
    let beta_ref = aa_geometric_phase(&path, 1e-4).unwrap();
    assert!(wrap_angle(beta - beta_ref).abs() < 1e-5);
    assert!(wrap_angle(back.alpha[n - 1] - path.alpha[n - 1]).abs() < 1e-5);
}

#[test]
fn untransported_path_is_rejected() {
    let mut path = transported_loop(2001);
    for a in &mut path.alpha {
        *a *= 1.5;
    }
    let r = fields_from_path(&path, &Tolerances::default());
    assert!(matches!(r, Err(Error::NotParallelTransported { .. })));
}

/// Constant-drive Rabi cycle `H = Omega/2 sx + Delta/2 sz` over one period.
fn rabi(omega: f64, delta: f64, n: usize) -> (ControlFields, f64) {
    let w = omega.hypot(delta);
    let period = 2.0 * PI / w;
    let t = uniform_grid(0.0, period, n);
    (
        ControlFields::new(t, vec![omega; n], vec![0.0; n], vec![delta; n]).unwrap(),
        period,
    )
}

#[test]
fn lab_frame_rabi_cycle_encloses_the_precession_cone() {
    let (om, de) = (1.0, 0.5);
    let (f, _) = rabi(om, de, 8001);
    let rec = propagate(&f, &NoiseModel::default()).unwrap();
    let r = dynamical_phase(&rec, &f, PhaseFrame::Lab).unwrap();
    let w = om.hypot(de);
    // cone half-angle about the axis (Omega, 0, Delta)
    let expected = -PI * (1.0 - de / w);
    assert!(wrap_angle(r.beta_geometric - expected).abs() < 1e-9);
    // <H> = (W/2)(Delta/W) is constant, so beta_d = -<H> T
    assert!(wrap_angle(r.beta_dynamical + PI * de / w).abs() < 1e-9);
}

#[test]
fn rotating_frame_shifts_dynamical_phase_by_the_detuning_integral() {
    let (om, de) = (1.0, 0.5);
    let (f, period) = rabi(om, de, 8001);
    let rec = propagate(&f, &NoiseModel::default()).unwrap();
    let lab = dynamical_phase(&rec, &f, PhaseFrame::Lab).unwrap();
    let rot = dynamical_phase(&rec, &f, PhaseFrame::DetuningRotating).unwrap();
    // <sz>(t) = (Delta^2 + Omega^2 cos Wt) / W^2 averages to Delta^2 / W^2
    let w2 = om * om + de * de;
    let shift = 0.5 * de * de * de / w2 * period;
    assert!(wrap_angle(rot.beta_dynamical - lab.beta_dynamical - shift).abs() < 1e-9);
    // the geometric parts differ by integral Delta sin^2(theta/2)
    let geo_shift = 0.5 * de * om * om / w2 * period;
    assert!(wrap_angle(rot.beta_geometric - lab.beta_geometric - geo_shift).abs() < 1e-9);
}

#[test]
fn toy_geometric_phase_error_is_cubic() {
    let eps = logspace(1e-3, 1e-1, 21);
    for b_sq in [0.25, 0.75] {
        let m = TwoLevelToy {
            e_n: 1.7,
            e_m: 0.2,
            b_sq,
        };
        let p0 = aa_phase_robustness(&m, 0.0).unwrap();
        let dg: Vec<f64> = eps
            .iter()
            .map(|e| aa_phase_robustness(&m, *e).unwrap().geometric - p0.geometric)
            .collect();
        let dd: Vec<f64> = eps
            .iter()
            .map(|e| aa_phase_robustness(&m, *e).unwrap().dynamical - p0.dynamical)
            .collect();
        let sg = loglog_slope(&eps, &dg);
        let sd = loglog_slope(&eps, &dd);
        assert!((sg - 3.0).abs() < 0.1, "b^2={b_sq}: geometric slope {sg}");
        assert!((sd - 1.0).abs() < 0.05, "b^2={b_sq}: dynamical slope {sd}");
    }
}

#[test]
fn toy_phases_match_the_unperturbed_closed_form() {
    for b_sq in [0.0, 0.25, 0.5, 1.0] {
        let m = TwoLevelToy {
            e_n: 2.0,
            e_m: -0.5,
            b_sq,
        };
        let p = aa_phase_robustness(&m, 0.0).unwrap();
        assert!(wrap_angle(p.geometric + 2.0 * PI * b_sq).abs() < 1e-12);
        let gap: f64 = 2.5;
        let dyn_ref = -2.0 * PI / gap * ((1.0 - b_sq) * 2.0 + b_sq * -0.5);
        assert!((p.dynamical - dyn_ref).abs() < 1e-12);
    }
}

#[test]
fn branch_covers_two_turns() {
    for x in [-7.0, -2.0 * PI, -3.0, 0.0, 3.0, 2.0 * PI, 7.5, 20.0] {
        let b = to_branch(x);
        assert!(b > -2.0 * PI && b <= 2.0 * PI, "{x} -> {b}");
        let k = (x - b) / (2.0 * PI);
        assert!((k - k.round()).abs() < 1e-12);
    }
}
