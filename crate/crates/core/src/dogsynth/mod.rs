//! DoG synthesis: closed error curve in, holonomic control fields out.
//!
//! Given a closed arc-length curve whose tantrix starts and ends at z, the
//! fields are read off the curve geometry:
//!
//! * `Omega = |r''|`
//! * `Delta = (x'y'' - y'x'') / z'`
//! * `Phi' = tau + Delta`
//! * `theta = acos z'`, `phi' = (x'y'' - y'x'') / (z'(1 - z'^2))`
//! * `beta_g = -1/2 integral (x'y'' - y'x'') / (z'(1 + z'))`

mod audit;
mod families;

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::curvekit::{closure_report, derivatives, tantrix_deviation, SpaceCurve, MIN_SAMPLES};
use crate::holonomy::BlochPath;
use crate::numerics::{cumhermite, fd_derivative, quadratic_fit_eval, wrap_angle};
use crate::qdyn::{propagate, ControlFields, NoiseModel, Unitary2};
use crate::vec3::Rot3;
use crate::{Error, Result, Tolerances, Vec3};

pub use audit::{
    audit, frenet_field_consistency, lobe_reports, AuditReport, Check, FrenetFieldReport,
    LobeReport,
};
pub use families::{
    interpolate_xi, orange_slice_2d, orange_slice_2d_fields, orange_slice_constants,
    phase_vs_twist, planar_double_sech, twisted_3d, OrangeSliceOptions, PhasePoint, SechSequence,
    TwistOptions,
};

/// `|z'|` below which `Delta` and `phi'` are filled from a local fit.
const EQUATOR_TOL: f64 = 2e-2;
/// Samples on each side of an equator window used by the fit.
const FIT_SPAN: usize = 8;
/// `|z'|` above which a half-turn of the tantrix azimuth is a pole passage.
const POLE_PASS_Z: f64 = 0.9;
/// `|(x', y')|` below which the tantrix azimuth is undefined.
const POLE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    OrangeSlice2d,
    Twisted3d,
    Custom,
}

/// Construction parameters recorded with a design.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DesignParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    pub omega0: f64,
    pub window: f64,
    pub grid_points: usize,
}

/// A synthesized gate: error curve, fields, Bloch path and phases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DogDesign {
    pub family: Family,
    pub params: DesignParams,
    pub error_curve: SpaceCurve,
    pub fields: ControlFields,
    pub path: BlochPath,
    /// Geometric phase from the path integral.
    pub beta_g: f64,
    /// `arg U00(T)` of the propagated fields.
    pub beta_g_propagated: f64,
    /// `beta_g_propagated - beta_g` wrapped to `(-pi, pi]`.
    pub beta_discrepancy: f64,
    /// Propagated gate `U(T)`.
    pub gate: Unitary2,
    /// Rigid rotation applied to the input curve before synthesis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pre_rotation: Option<Rot3>,
    pub tolerances: Tolerances,
    #[serde(default)]
    pub label: String,
}

impl DogDesign {
    /// The ideal gate `diag(e^{i beta_g}, e^{-i beta_g})`.
    pub fn ideal_gate(&self) -> Unitary2 {
        Unitary2::phase_gate(self.beta_g)
    }

    fn finish(
        family: Family,
        params: DesignParams,
        error_curve: SpaceCurve,
        fields: ControlFields,
        path: BlochPath,
        beta_g: f64,
        pre_rotation: Option<Rot3>,
        tol: &Tolerances,
    ) -> Result<Self> {
        let rec = propagate(&fields, &NoiseModel::default())?;
        let gate = rec.final_unitary();
        let beta_p = gate.0[0].arg();
        Ok(Self {
            family,
            params,
            error_curve,
            fields,
            path,
            beta_g,
            beta_g_propagated: beta_p,
            beta_discrepancy: wrap_angle(beta_p - beta_g),
            gate,
            pre_rotation,
            tolerances: *tol,
            label: String::new(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

/// Synthesize holonomic fields from a closed error curve.
pub fn synthesize(curve: &SpaceCurve, tol: &Tolerances) -> Result<DogDesign> {
    synthesize_as(
        curve,
        tol,
        Family::Custom,
        DesignParams {
            grid_points: curve.len(),
            ..Default::default()
        },
    )
}

pub(crate) fn synthesize_as(
    curve: &SpaceCurve,
    tol: &Tolerances,
    family: Family,
    params: DesignParams,
) -> Result<DogDesign> {
    let n = curve.len();
    if n < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_SAMPLES,
            got: n,
        });
    }
    let h = curve.grid_spacing()?;
    let dev = tantrix_deviation(curve)?;
    if dev > tol.tantrix_tol {
        return Err(Error::NotUnitSpeed(dev));
    }

    let start = derivatives(curve, 1)?[0].normalized();
    let mut pre_rotation = None;
    let mut curve = curve.clone().translated_to_origin();
    if start.cross(Vec3::Z).norm().atan2(start.z) > tol.angle_tol {
        let rot = Rot3::aligning(start, Vec3::Z);
        curve = curve.rotated(&rot);
        pre_rotation = Some(rot);
    }
    let closure_tol = tol.closure_tol(curve.duration());
    let cr = closure_report(&curve)?;
    if cr.endpoint_gap >= closure_tol {
        return Err(Error::OpenCurve {
            gap: cr.endpoint_gap,
            tol: closure_tol,
        });
    }
    let d1 = derivatives(&curve, 1)?;
    let end = d1[n - 1].normalized();
    let end_angle = end.cross(Vec3::Z).norm().atan2(end.z);
    if cr.tangent_gap >= closure_tol || end_angle >= closure_tol {
        return Err(Error::TangentNotZ(end_angle.max(cr.tangent_gap)));
    }

    let d2 = derivatives(&curve, 2)?;
    let tan: Vec<Vec3> = d1.iter().map(|v| v.normalized()).collect();
    let omega: Vec<f64> = d2.iter().map(|v| v.norm()).collect();
    let cross: Vec<f64> = tan
        .iter()
        .zip(&d2)
        .map(|(t, a)| t.x * a.y - t.y * a.x)
        .collect();
    let zd: Vec<f64> = tan.iter().map(|t| t.z).collect();

    let (delta, filled) = detuning(&cross, &zd);
    let phi_field = drive_phase(&tan, &d2, &delta, h, tol.kappa_floor);
    let mut path = bloch_path(&curve, &tan, &delta, h);
    for (f, w) in path.flagged.iter_mut().zip(&filled) {
        *f |= *w;
    }
    let beta_g = path.alpha[n - 1];

    let t0 = curve.t[0];
    let t: Vec<f64> = curve.t.iter().map(|s| s - t0).collect();
    let fields = ControlFields::new(t, omega, phi_field, delta)?;
    DogDesign::finish(
        family,
        params,
        curve,
        fields,
        path,
        beta_g,
        pre_rotation,
        tol,
    )
}

/// `cross / z'` with equator windows replaced by a quadratic fit; the
/// second vector marks the filled samples.
///
/// A tantrix that crosses the equator off a meridian has `cross != 0` there
/// and no bounded holonomic detuning exists; the fit then bridges a simple
/// pole whose principal value integrates to zero across the window.
fn detuning(cross: &[f64], zd: &[f64]) -> (Vec<f64>, Vec<bool>) {
    let n = cross.len();
    let mut out: Vec<f64> = cross.iter().zip(zd).map(|(c, z)| c / z).collect();
    let masked: Vec<bool> = zd.iter().map(|z| z.abs() < EQUATOR_TOL).collect();
    let mut i = 0;
    while i < n {
        if !masked[i] {
            i += 1;
            continue;
        }
        let a = i;
        while i < n && masked[i] {
            i += 1;
        }
        let b = i; // window is a..b
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for k in a.saturating_sub(FIT_SPAN)..a {
            if !masked[k] {
                xs.push(k as f64);
                ys.push(out[k]);
            }
        }
        for k in b..(b + FIT_SPAN).min(n) {
            if !masked[k] {
                xs.push(k as f64);
                ys.push(out[k]);
            }
        }
        let q: Vec<f64> = (a..b).map(|k| k as f64).collect();
        let fit = if xs.len() >= 3 {
            quadratic_fit_eval(&xs, &ys, &q)
        } else {
            alloc::vec![0.0; b - a]
        };
        out[a..b].copy_from_slice(&fit);
    }
    (out, masked)
}

/// `Phi` from the binormal rotation angle plus the integrated detuning.
fn drive_phase(tan: &[Vec3], d2: &[Vec3], delta: &[f64], h: f64, floor: f64) -> Vec<f64> {
    let n = tan.len();
    let bin: Vec<Option<Vec3>> = tan
        .iter()
        .zip(d2)
        .map(|(t, a)| {
            let b = t.cross(*a);
            (b.norm() > floor).then(|| b.normalized())
        })
        .collect();
    let k0 = bin.iter().position(Option::is_some).unwrap_or(0);
    let mut phi = alloc::vec![0.0; n];
    phi[k0] = (-d2[k0].x).atan2(d2[k0].y);
    for k in 0..k0 {
        phi[k] = phi[k0];
    }
    let int_delta = cumhermite(delta, &fd_derivative(delta, h, 1), h);
    let mut last = bin[k0];
    for k in k0..n - 1 {
        let mut step = int_delta[k + 1] - int_delta[k];
        if let (Some(b0), Some(b1)) = (last, bin[k + 1]) {
            let tm = (tan[k] + tan[k + 1]).normalized();
            step += b0.cross(b1).dot(tm).atan2(b0.dot(b1));
        }
        if bin[k + 1].is_some() {
            last = bin[k + 1];
        }
        phi[k + 1] = phi[k] + step;
    }
    phi
}

/// `theta`, `phi` and the transported phase `alpha` from the tantrix.
///
/// `phi` increments use the tantrix azimuth `chi`, `dphi = dchi / z'_mid`,
/// which stays finite through the poles; in equator windows the rate
/// `Delta / (1 - z'^2)` is integrated instead.
fn bloch_path(curve: &SpaceCurve, tan: &[Vec3], delta: &[f64], h: f64) -> BlochPath {
    let n = tan.len();
    let theta: Vec<f64> = tan.iter().map(|t| t.x.hypot(t.y).atan2(t.z)).collect();
    let chi: Vec<Option<f64>> = tan
        .iter()
        .map(|t| (t.x.hypot(t.y) > POLE_EPS).then(|| (-t.y).atan2(-t.x)))
        .collect();
    let valid: Vec<usize> = (0..n).filter(|&i| chi[i].is_some()).collect();
    let mut phi = alloc::vec![0.0; n];
    let mut alpha = alloc::vec![0.0; n];
    let mut flagged = alloc::vec![false; n];
    if valid.is_empty() {
        return BlochPath {
            t: curve.t.clone(),
            theta,
            phi,
            alpha,
            flagged: alloc::vec![true; n],
        };
    }
    let rate = |k: usize| delta[k] / (1.0 - tan[k].z * tan[k].z);
    let first = valid[0];
    for k in 0..=first {
        phi[k] = chi[first].unwrap();
        flagged[k] = k != first;
    }
    for w in valid.windows(2) {
        let (j, k) = (w[0], w[1]);
        let mut zmid = 0.5 * (tan[j].z + tan[k].z);
        let dchi = wrap_angle(chi[k].unwrap() - chi[j].unwrap());
        if zmid.abs() > POLE_PASS_Z && dchi.abs() > 0.5 * PI {
            // the step passes over a pole: the azimuth jump sits at z = +-1
            zmid = zmid.signum();
        }
        let dphi = if zmid.abs() < EQUATOR_TOL {
            (j..k).map(|i| 0.5 * h * (rate(i) + rate(i + 1))).sum()
        } else {
            dchi / zmid
        };
        let dalpha = -0.5 * (1.0 - zmid) * dphi;
        for i in j + 1..=k {
            let s = (i - j) as f64 / (k - j) as f64;
            phi[i] = phi[j] + s * dphi;
            alpha[i] = alpha[j] + s * dalpha;
            flagged[i] = i != k;
        }
    }
    let last = *valid.last().unwrap();
    for k in last + 1..n {
        phi[k] = phi[last];
        alpha[k] = alpha[last];
        flagged[k] = true;
    }
    let t0 = curve.t[0];
    BlochPath {
        t: curve.t.iter().map(|s| s - t0).collect(),
        theta,
        phi,
        alpha,
        flagged,
    }
}

/// Options for moving the start point along a closed curve.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RebaseOptions {
    /// Demand that the pulse start from zero amplitude, i.e. that the new
    /// start point has vanishing curvature.
    pub require_zero_amplitude: bool,
    /// Curvature accepted as zero when the above is set.
    pub zero_amplitude_tol: f64,
}

/// Re-index a closed design so that sample `start` becomes the origin, rotate
/// its tangent onto z and re-synthesize.
pub fn rebase_start_point(
    design: &DogDesign,
    start: usize,
    opts: &RebaseOptions,
) -> Result<DogDesign> {
    let c = &design.error_curve;
    let n = c.len();
    if start >= n - 1 {
        return Err(Error::OutOfRange(alloc::format!(
            "start index {start} of {n}"
        )));
    }
    if start == 0 {
        return Ok(design.clone());
    }
    if opts.require_zero_amplitude {
        let kappa = derivatives(c, 2)?[start].norm();
        if kappa > opts.zero_amplitude_tol {
            return Err(Error::StartCurvature {
                index: start,
                kappa,
            });
        }
    }
    let period = n - 1;
    let p0 = c.points[start];
    let points = (0..n)
        .map(|i| c.points[(start + i) % period] - p0)
        .collect();
    let mut curve = SpaceCurve::new(c.t.clone(), points)?.with_label(c.label.clone());
    if let Some(tan) = &c.tangents {
        curve = curve.with_tangents((0..n).map(|i| tan[(start + i) % period]).collect())?;
    }
    let mut out = synthesize_as(&curve, &design.tolerances, design.family, design.params)?;
    out.label = design.label.clone();
    Ok(out)
}

#[cfg(test)]
mod tests;
