use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use num_traits::Float;

use super::{derivatives, uniform_grid, SpaceCurve};
use crate::numerics::{cumhermite, fd_derivative_vec, hermite, locate};
use crate::{Error, Result, Vec3};

/// Twist a planar yz curve about the line `y = pi/2` parallel to z:
/// `(-(y - pi/2) sin(xi z^3), (y - pi/2) cos(xi z^3), z)`.
///
/// The result keeps the input parameter and is not arc-length
/// parameterized. Cached tangents are carried through the chain rule.
pub fn twist(planar: &SpaceCurve, xi: f64) -> Result<SpaceCurve> {
    let scale = planar.points.iter().map(|p| p.norm()).fold(1.0, f64::max);
    let off = planar.points.iter().map(|p| p.x.abs()).fold(0.0, f64::max);
    if off > 1e-9 * scale {
        return Err(Error::NotPlanar(off));
    }
    let d1 = derivatives(planar, 1)?;
    let mut pts = Vec::with_capacity(planar.len());
    let mut tan = Vec::with_capacity(planar.len());
    for (p, d) in planar.points.iter().zip(&d1) {
        let yy = p.y - FRAC_PI_2;
        let a = xi * p.z * p.z * p.z;
        let da = 3.0 * xi * p.z * p.z * d.z;
        let (s, c) = a.sin_cos();
        pts.push(Vec3::new(-yy * s, yy * c, p.z));
        tan.push(Vec3::new(
            -d.y * s - yy * c * da,
            d.y * c - yy * s * da,
            d.z,
        ));
    }
    Ok(SpaceCurve::new(planar.t.clone(), pts)?
        .with_tangents(tan)?
        .with_label(planar.label.clone()))
}

/// Resample a curve by arc length on a grid with the same number of samples.
pub fn arc_length_reparameterize(curve: &SpaceCurve) -> Result<SpaceCurve> {
    arc_length_reparameterize_to(curve, curve.len())
}

/// Resample a curve by arc length on a uniform grid of `n_out` samples.
///
/// The arc length `t(w)` is integrated with the corrected trapezoid rule,
/// inverted by a monotone cubic that uses the exact slope `dw/dt = 1/|r'|`,
/// and positions and tangents are evaluated by cubic Hermite interpolation.
/// Output tangents are exactly unit.
pub fn arc_length_reparameterize_to(curve: &SpaceCurve, n_out: usize) -> Result<SpaceCurve> {
    let hw = curve.grid_spacing()?;
    let d1 = derivatives(curve, 1)?;
    let d2 = fd_derivative_vec(&d1, hw, 1);
    let speed: Vec<f64> = d1.iter().map(|v| v.norm()).collect();
    let smax = speed.iter().copied().fold(0.0, f64::max);
    if let Some(i) = speed.iter().position(|&s| !(s > 1e-12 * smax.max(1e-300))) {
        return Err(Error::ZeroSpeed(i));
    }
    let dspeed: Vec<f64> = d1
        .iter()
        .zip(&d2)
        .zip(&speed)
        .map(|((a, b), s)| a.dot(*b) / s)
        .collect();
    let tw = cumhermite(&speed, &dspeed, hw);
    for (i, w) in tw.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::ZeroSpeed(i));
        }
    }
    let total = *tw.last().unwrap();
    let grid = uniform_grid(0.0, total, n_out);
    let mut pts = Vec::with_capacity(n_out);
    let mut tan = Vec::with_capacity(n_out);
    let mut hint = 0;
    for &tq in &grid {
        let (i, s) = locate(&tw, tq, hint);
        hint = i;
        let dt = tw[i + 1] - tw[i];
        // monotone-limited Hermite for w(t)
        let sec = hw / dt;
        let mut m0 = 1.0 / speed[i];
        let mut m1 = 1.0 / speed[i + 1];
        let (a, b) = (m0 / sec, m1 / sec);
        let q = a * a + b * b;
        if q > 9.0 {
            let k = 3.0 / q.sqrt();
            m0 *= k;
            m1 *= k;
        }
        let w_local = hermite(0.0, hw, m0 * dt, m1 * dt, s);
        let u = (w_local / hw).clamp(0.0, 1.0);
        let interp = |p0: Vec3, p1: Vec3, v0: Vec3, v1: Vec3| -> Vec3 {
            Vec3::new(
                hermite(p0.x, p1.x, v0.x * hw, v1.x * hw, u),
                hermite(p0.y, p1.y, v0.y * hw, v1.y * hw, u),
                hermite(p0.z, p1.z, v0.z * hw, v1.z * hw, u),
            )
        };
        pts.push(interp(
            curve.points[i],
            curve.points[i + 1],
            d1[i],
            d1[i + 1],
        ));
        tan.push(interp(d1[i], d1[i + 1], d2[i], d2[i + 1]).normalized());
    }
    Ok(SpaceCurve::new(grid, pts)?
        .with_tangents(tan)?
        .with_label(curve.label.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvekit::{tantrix_deviation, uniform_grid};
    use core::f64::consts::PI;

    #[test]
    fn speed_two_circle_becomes_unit_speed() {
        let w = uniform_grid(0.0, PI, 2001);
        let p = w
            .iter()
            .map(|&s| Vec3::new((2.0 * s).cos(), (2.0 * s).sin(), 0.0))
            .collect();
        let c = SpaceCurve::new(w, p).unwrap();
        let r = arc_length_reparameterize(&c).unwrap();
        assert!((r.duration() - 2.0 * PI).abs() < 1e-10);
        assert!(tantrix_deviation(&r).unwrap() < 1e-12);
        for (t, p) in r.t.iter().zip(&r.points) {
            assert!((*p - Vec3::new(t.cos(), t.sin(), 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn zero_speed_is_rejected() {
        let w = uniform_grid(-1.0, 1.0, 101);
        let p = w.iter().map(|&s| Vec3::new(0.0, 0.0, s * s * s)).collect();
        let c = SpaceCurve::new(w, p).unwrap();
        assert!(matches!(
            arc_length_reparameterize(&c),
            Err(Error::ZeroSpeed(_))
        ));
    }

    #[test]
    fn twist_rejects_nonplanar_input() {
        let w = uniform_grid(0.0, 1.0, 11);
        let p = w.iter().map(|&s| Vec3::new(0.1, s, s)).collect();
        let c = SpaceCurve::new(w, p).unwrap();
        assert!(matches!(twist(&c, 0.1), Err(Error::NotPlanar(_))));
    }
}
