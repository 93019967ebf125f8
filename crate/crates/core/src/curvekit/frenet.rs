use alloc::vec::Vec;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::{derivatives, SpaceCurve};
use crate::numerics::{fd_derivative, hermite, uniform_spacing};
use crate::{Error, Result, Tolerances, Vec3};

/// Curvature and torsion samples. Torsion is `None` where the curve is
/// locally straight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrenetData {
    pub curvature: Vec<f64>,
    pub torsion: Vec<Option<f64>>,
}

impl FrenetData {
    /// Length of the longest run of samples with undefined torsion.
    pub fn longest_straight_run(&self) -> usize {
        let mut best = 0;
        let mut run = 0;
        for t in &self.torsion {
            if t.is_none() {
                run += 1;
                best = best.max(run);
            } else {
                run = 0;
            }
        }
        best
    }
}

/// Orthonormal (tangent, normal, binormal) triad.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub t: Vec3,
    pub n: Vec3,
    pub b: Vec3,
}

impl Frame {
    /// Frame with tangent `z`, normal `y`, binormal `-x`.
    pub const Z_UP: Frame = Frame {
        t: Vec3::Z,
        n: Vec3::Y,
        b: Vec3::new(-1.0, 0.0, 0.0),
    };

    /// Largest deviation from orthonormality (right-handedness included).
    pub fn orthonormality_error(&self) -> f64 {
        let e = [
            (self.t.norm() - 1.0).abs(),
            (self.n.norm() - 1.0).abs(),
            (self.b.norm() - 1.0).abs(),
            self.t.dot(self.n).abs(),
            self.t.dot(self.b).abs(),
            self.n.dot(self.b).abs(),
            (self.t.cross(self.n) - self.b).norm(),
        ];
        e.into_iter().fold(0.0, f64::max)
    }

    fn reorthonormalized(self) -> Frame {
        let t = self.t.normalized();
        let n = (self.n - t * t.dot(self.n)).normalized();
        Frame {
            t,
            n,
            b: t.cross(n),
        }
    }
}

/// Curvature `|r''|` and torsion `((r' x r'') . r''') / |r' x r''|^2`.
pub fn frenet(curve: &SpaceCurve) -> Result<FrenetData> {
    frenet_with(curve, &Tolerances::default())
}

fn frenet_with(curve: &SpaceCurve, tol: &Tolerances) -> Result<FrenetData> {
    let d1 = derivatives(curve, 1)?;
    let d2 = derivatives(curve, 2)?;
    let d3 = derivatives(curve, 3)?;
    let mut curvature = Vec::with_capacity(d1.len());
    let mut torsion = Vec::with_capacity(d1.len());
    for i in 0..d1.len() {
        curvature.push(d2[i].norm());
        let c = d1[i].cross(d2[i]);
        let c2 = c.norm_sq();
        if c2.sqrt() > tol.kappa_floor {
            torsion.push(Some(c.dot(d3[i]) / c2));
        } else {
            torsion.push(None);
        }
    }
    Ok(FrenetData { curvature, torsion })
}

/// Like [`frenet`] but fails when a straight run exceeds `straight_run_max`.
pub fn frenet_strict(curve: &SpaceCurve, tol: &Tolerances) -> Result<FrenetData> {
    let data = frenet_with(curve, tol)?;
    let run = data.longest_straight_run();
    if run > tol.straight_run_max {
        return Err(Error::StraightRun {
            len: run,
            max: tol.straight_run_max,
        });
    }
    Ok(data)
}

/// Integrate the Frenet-Serret equations from `frame` at `r = 0`.
///
/// The frame is advanced with a two-point Gauss-Legendre Magnus step (the
/// Darboux vector is interpolated by cubic Hermite between samples) and is
/// re-orthonormalized after every step. Positions use the corrected
/// trapezoid rule with `T' = kappa N`.
pub fn integrate_frenet(t: &[f64], kappa: &[f64], tau: &[f64], frame: Frame) -> Result<SpaceCurve> {
    let n = t.len();
    if kappa.len() != n || tau.len() != n {
        return Err(Error::LengthMismatch(alloc::format!(
            "grid {n}, kappa {}, tau {}",
            kappa.len(),
            tau.len()
        )));
    }
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let err = frame.orthonormality_error();
    if err > 1e-10 {
        return Err(Error::NonOrthonormalFrame(err));
    }
    if kappa.iter().chain(tau).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("curvature or torsion"));
    }
    let h = uniform_spacing(t)?;
    let (dk, dt) = if n >= 5 {
        (fd_derivative(kappa, h, 1), fd_derivative(tau, h, 1))
    } else {
        let slope = |f: &[f64]| -> Vec<f64> {
            (0..n)
                .map(|i| {
                    let (a, b) = if i + 1 < n { (i, i + 1) } else { (i - 1, i) };
                    (f[b] - f[a]) / h
                })
                .collect()
        };
        (slope(kappa), slope(tau))
    };
    let g = 3f64.sqrt() / 6.0;
    let mut fr = frame;
    let mut r = Vec3::ZERO;
    let mut points = Vec::with_capacity(n);
    let mut tangents = Vec::with_capacity(n);
    points.push(r);
    tangents.push(fr.t);
    for i in 0..n - 1 {
        let at = |s: f64| {
            let k = hermite(kappa[i], kappa[i + 1], h * dk[i], h * dk[i + 1], s);
            let tq = hermite(tau[i], tau[i + 1], h * dt[i], h * dt[i + 1], s);
            // Darboux vector in body coordinates (T, N, B)
            Vec3::new(tq, 0.0, k)
        };
        let w1 = at(0.5 - g);
        let w2 = at(0.5 + g);
        let theta = (w1 + w2) * (0.5 * h) + w1.cross(w2) * (3f64.sqrt() / 12.0 * h * h);
        let angle = theta.norm();
        let body = |e: Vec3| {
            if angle > 0.0 {
                e.rotate(theta / angle, angle)
            } else {
                e
            }
        };
        let to_world = |v: Vec3| fr.t * v.x + fr.n * v.y + fr.b * v.z;
        let next = Frame {
            t: to_world(body(Vec3::X)),
            n: to_world(body(Vec3::Y)),
            b: to_world(body(Vec3::Z)),
        }
        .reorthonormalized();
        let d0 = fr.n * kappa[i];
        let d1 = next.n * kappa[i + 1];
        r += (fr.t + next.t) * (0.5 * h) + (d0 - d1) * (h * h / 12.0);
        fr = next;
        points.push(r);
        tangents.push(fr.t);
    }
    SpaceCurve::new(t.to_vec(), points)?.with_tangents(tangents)
}
