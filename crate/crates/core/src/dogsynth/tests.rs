use super::*;
use crate::curvekit::uniform_grid;
use core::f64::consts::PI;

#[test]
fn detuning_is_plain_ratio_away_from_equator() {
    let zd = [0.9, 0.5, -0.3, 0.7];
    let cross = [0.18, 0.1, 0.03, -0.07];
    let (d, filled) = detuning(&cross, &zd);
    for i in 0..4 {
        assert_eq!(d[i], cross[i] / zd[i]);
        assert!(!filled[i]);
    }
}

#[test]
fn equator_window_recovers_smooth_ratio() {
    // cross = D(s) * z'(s) with smooth D: the fill should reproduce D.
    let n = 201;
    let s = uniform_grid(-1.0, 1.0, n);
    let zd: Vec<f64> = s.iter().map(|x| 0.2 * x).collect();
    let dd: Vec<f64> = s.iter().map(|x| 1.0 + 0.3 * x - 0.2 * x * x).collect();
    let cross: Vec<f64> = zd.iter().zip(&dd).map(|(z, d)| z * d).collect();
    let (d, filled) = detuning(&cross, &zd);
    assert!(filled.iter().any(|f| *f));
    for i in 0..n {
        assert!((d[i] - dd[i]).abs() < 1e-12, "sample {i}");
    }
}

#[test]
fn equator_pole_is_bridged_symmetrically() {
    // A pure 1/z' pole with smooth background: the filled window carries
    // only the background, so the odd part integrates to zero.
    let n = 401;
    let s = uniform_grid(-1.0, 1.0, n);
    let zd: Vec<f64> = s.iter().map(|x| 0.3 * x + 1e-9).collect();
    let cross: Vec<f64> = zd.iter().map(|z| 2.0 * z + 1e-3).collect();
    let (d, filled) = detuning(&cross, &zd);
    let mid = n / 2;
    assert!(filled[mid]);
    assert!((d[mid] - 2.0).abs() < 0.05);
    let lo = (0..n).position(|i| filled[i]).unwrap();
    let hi = (0..n).rposition(|i| filled[i]).unwrap();
    assert!(lo < mid && hi > mid);
    assert!(d.iter().all(|v| v.is_finite()));
}

#[test]
fn straight_segment_is_not_closed() {
    let n = 101;
    let t = uniform_grid(0.0, 1.0, n);
    let pts = t.iter().map(|s| Vec3::new(0.0, 0.0, *s)).collect();
    let c = SpaceCurve::new(t, pts).unwrap();
    assert!(matches!(
        synthesize(&c, &Tolerances::default()),
        Err(Error::OpenCurve { .. })
    ));
}

#[test]
fn coarse_curve_is_rejected() {
    let t = uniform_grid(0.0, 1.0, 5);
    let pts = t.iter().map(|s| Vec3::new(0.0, 0.0, *s)).collect();
    let c = SpaceCurve::new(t, pts).unwrap();
    assert!(matches!(
        synthesize(&c, &Tolerances::default()),
        Err(Error::TooFewSamples { .. })
    ));
}

#[test]
fn non_unit_speed_is_rejected() {
    let n = 101;
    let t = uniform_grid(0.0, 1.0, n);
    let pts = t.iter().map(|s| Vec3::new(0.0, 0.0, 2.0 * s)).collect();
    let c = SpaceCurve::new(t, pts).unwrap();
    assert!(matches!(
        synthesize(&c, &Tolerances::default()),
        Err(Error::NotUnitSpeed(_))
    ));
}

#[test]
fn rebase_rejects_bad_index() {
    let d = small_circle_design();
    let n = d.error_curve.len();
    assert!(matches!(
        rebase_start_point(&d, n - 1, &RebaseOptions::default()),
        Err(Error::OutOfRange(_))
    ));
    assert_eq!(
        rebase_start_point(&d, 0, &RebaseOptions::default()).unwrap(),
        d
    );
}

/// Two pi pulses about x: the error curve is a closed figure of two
/// semicircles in the yz plane.
fn small_circle_design() -> DogDesign {
    let n = 4001;
    let t = uniform_grid(0.0, 2.0 * PI, n);
    let tan: Vec<Vec3> = t.iter().map(|s| Vec3::new(0.0, s.sin(), s.cos())).collect();
    let pts: Vec<Vec3> = t
        .iter()
        .map(|s| Vec3::new(0.0, 1.0 - s.cos(), s.sin()))
        .collect();
    let c = SpaceCurve::new(t, pts).unwrap().with_tangents(tan).unwrap();
    synthesize(&c, &Tolerances::default()).unwrap()
}

#[test]
fn full_circle_is_a_two_pi_rotation() {
    let d = small_circle_design();
    assert!(d.fields.delta.iter().all(|v| v.abs() < 1e-9));
    assert!(d.fields.omega.iter().all(|v| (v - 1.0).abs() < 1e-6));
    // exp(-i pi sx) = -1
    assert!((d.gate.0[0].re + 1.0).abs() < 1e-9);
    assert!(
        d.beta_discrepancy.abs() < 1e-6,
        "{} {}",
        d.beta_g,
        d.beta_g_propagated
    );
}
