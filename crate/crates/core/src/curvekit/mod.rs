//! Differential geometry of sampled 3D space curves.

mod frenet;
mod reparam;

use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::numerics::{fd_derivative_vec, uniform_spacing};
use crate::vec3::Rot3;
use crate::{Error, Result, Vec3};

pub use frenet::{frenet, frenet_strict, integrate_frenet, Frame, FrenetData};
pub use reparam::{arc_length_reparameterize, arc_length_reparameterize_to, twist};

/// Minimum sample count for third derivatives with 4th-order stencils.
pub const MIN_SAMPLES: usize = 7;

/// A sampled 3D curve on a uniform parameter grid.
///
/// `tangents`, when present, holds the exact first derivative `dr/dt` at each
/// sample. Higher derivatives are then taken by differencing the tangents
/// instead of the points, which removes one order of roundoff amplification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceCurve {
    pub t: Vec<f64>,
    pub points: Vec<Vec3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tangents: Option<Vec<Vec3>>,
    #[serde(default)]
    pub label: String,
}

impl SpaceCurve {
    pub fn new(t: Vec<f64>, points: Vec<Vec3>) -> Result<Self> {
        if t.len() != points.len() {
            return Err(Error::LengthMismatch(alloc::format!(
                "{} times vs {} points",
                t.len(),
                points.len()
            )));
        }
        Ok(Self {
            t,
            points,
            tangents: None,
            label: String::new(),
        })
    }

    pub fn with_tangents(mut self, tangents: Vec<Vec3>) -> Result<Self> {
        if tangents.len() != self.points.len() {
            return Err(Error::LengthMismatch(alloc::format!(
                "{} tangents vs {} points",
                tangents.len(),
                self.points.len()
            )));
        }
        self.tangents = Some(tangents);
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Parameter spacing; errors when the grid is not uniform.
    pub fn grid_spacing(&self) -> Result<f64> {
        uniform_spacing(&self.t)
    }

    /// Parameter span `t_end - t_start`, which is the length for arc-length curves.
    pub fn duration(&self) -> f64 {
        match (self.t.first(), self.t.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    /// Length of the sample polyline.
    pub fn polyline_length(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    /// Shift every point so the curve starts at the origin.
    pub fn translated_to_origin(mut self) -> Self {
        if let Some(&p0) = self.points.first() {
            for p in &mut self.points {
                *p -= p0;
            }
        }
        self
    }

    /// Apply a rigid rotation to points and cached tangents.
    pub fn rotated(mut self, rot: &Rot3) -> Self {
        for p in &mut self.points {
            *p = rot.apply(*p);
        }
        if let Some(tan) = &mut self.tangents {
            for v in tan.iter_mut() {
                *v = rot.apply(*v);
            }
        }
        self
    }
}

/// Unit tangent samples of a curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tantrix {
    pub t: Vec<f64>,
    pub vectors: Vec<Vec3>,
}

impl Tantrix {
    /// Largest deviation of `|v|` from one.
    pub fn max_norm_deviation(&self) -> f64 {
        self.vectors
            .iter()
            .map(|v| (v.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Gap metrics for closure of an error curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub endpoint_gap: f64,
    pub tangent_gap: f64,
    pub tangent_vs_zhat: f64,
}

impl ClosureReport {
    pub fn is_closed(&self, tol: f64) -> bool {
        self.endpoint_gap < tol && self.tangent_gap < tol
    }
}

/// Derivatives of order 1..=3 by 4th-order finite differences.
///
/// When the curve carries exact tangents, order `k` is obtained as the
/// `(k-1)`-th difference of the tangents.
pub fn derivatives(curve: &SpaceCurve, order: usize) -> Result<Vec<Vec3>> {
    if !(1..=3).contains(&order) {
        return Err(Error::OutOfRange(alloc::format!(
            "derivative order {order}"
        )));
    }
    if curve.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_SAMPLES,
            got: curve.len(),
        });
    }
    let h = curve.grid_spacing()?;
    match (&curve.tangents, order) {
        (Some(tan), 1) => Ok(tan.clone()),
        (Some(tan), k) => Ok(fd_derivative_vec(tan, h, k - 1)),
        (None, k) => Ok(fd_derivative_vec(&curve.points, h, k)),
    }
}

/// Normalized first derivative.
pub fn tantrix(curve: &SpaceCurve) -> Result<Tantrix> {
    let d1 = derivatives(curve, 1)?;
    Ok(Tantrix {
        t: curve.t.clone(),
        vectors: d1.into_iter().map(Vec3::normalized).collect(),
    })
}

/// Endpoint and tangent gaps of a curve.
pub fn closure_report(curve: &SpaceCurve) -> Result<ClosureReport> {
    let tan = tantrix(curve)?.vectors;
    let n = curve.len();
    let t0 = tan[0];
    let t1 = tan[n - 1];
    Ok(ClosureReport {
        endpoint_gap: (curve.points[n - 1] - curve.points[0]).norm(),
        tangent_gap: (t1 - t0).norm(),
        tangent_vs_zhat: t0.cross(Vec3::Z).norm().atan2(t0.z),
    })
}

/// Largest relative deviation of the tangent norm from one over interior samples.
pub fn tantrix_deviation(curve: &SpaceCurve) -> Result<f64> {
    let d1 = derivatives(curve, 1)?;
    let n = d1.len();
    Ok(d1[1..n - 1]
        .iter()
        .map(|v| (v.norm() - 1.0).abs())
        .fold(0.0, f64::max))
}

/// Uniform grid of `n` samples on `[a, b]`.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { b } else { a + h * i as f64 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::PI;

    fn circle(n: usize) -> SpaceCurve {
        let t = uniform_grid(0.0, 2.0 * PI, n);
        let p = t
            .iter()
            .map(|&s| Vec3::new(s.cos(), s.sin(), 0.0))
            .collect();
        SpaceCurve::new(t, p).unwrap()
    }

    #[test]
    fn line_first_derivative_is_constant() {
        let t = uniform_grid(0.0, 1.0, 11);
        let p = t.iter().map(|&s| Vec3::new(0.0, 0.0, s)).collect();
        let c = SpaceCurve::new(t, p).unwrap();
        for d in derivatives(&c, 1).unwrap() {
            assert!((d - Vec3::Z).norm() < 1e-13);
        }
    }

    #[test]
    fn circle_second_derivative_points_inward() {
        let c = circle(2001);
        let d2 = derivatives(&c, 2).unwrap();
        let err = d2
            .iter()
            .zip(&c.points)
            .map(|(a, p)| (*a + *p).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn too_few_samples_and_nonuniform_grid_are_rejected() {
        let c = SpaceCurve::new(vec![0.0, 1.0, 2.0], vec![Vec3::ZERO; 3]).unwrap();
        assert!(matches!(
            derivatives(&c, 1),
            Err(Error::TooFewSamples { .. })
        ));
        let t = vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.5];
        let c = SpaceCurve::new(t, vec![Vec3::ZERO; 7]).unwrap();
        assert!(matches!(
            derivatives(&c, 1),
            Err(Error::NonUniformGrid { .. })
        ));
    }

    #[test]
    fn closed_circle_reports_small_gaps() {
        let r = closure_report(&circle(4001)).unwrap();
        assert!(r.endpoint_gap < 1e-12);
        assert!(r.tangent_gap < 1e-9);
        assert!((r.tangent_vs_zhat - PI / 2.0).abs() < 1e-9);
    }
}
