use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::DogDesign;
use crate::curvekit::{closure_report, derivatives, frenet, SpaceCurve};
use crate::holonomy::transport_defect;
use crate::numerics::{fd_derivative, rms};
use crate::qdyn::{propagate, ControlFields, NoiseModel};
use crate::{Error, Result, Vec3};

/// Relative RMS allowed between curvature and `|Omega|`.
pub const KAPPA_RMS_TOL: f64 = 1e-4;
/// RMS allowed between torsion and `Phi' - Delta`.
pub const TAU_RMS_TOL: f64 = 1e-3;
/// Samples excluded on either side of a field jump or sign change.
const JUMP_GUARD: usize = 3;
/// Curvature below this fraction of its peak counts as near straight; the
/// binormal can turn faster there than the grid resolves.
pub const NEAR_STRAIGHT_REL: f64 = 1e-3;

/// One named pass/fail check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    fn below(name: &str, value: f64, limit: f64) -> Self {
        Check {
            name: name.to_string(),
            value,
            limit,
            passed: value < limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub checks: Vec<Check>,
}

impl AuditReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Curvature and torsion of a curve compared with the fields that claim to
/// generate it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrenetFieldReport {
    /// `rms(kappa - |Omega|) / rms(Omega)`.
    pub kappa_rel_rms: f64,
    /// `rms(tau - (Phi' - Delta))` over samples with defined torsion.
    pub tau_rms: f64,
    pub kappa_samples: usize,
    pub tau_samples: usize,
}

impl FrenetFieldReport {
    pub fn passed(&self) -> bool {
        self.kappa_rel_rms < KAPPA_RMS_TOL && self.tau_rms < TAU_RMS_TOL
    }
}

/// Compare `frenet(curve)` with `(|Omega|, Phi' - Delta)`.
///
/// Excludes the three samples at each end and samples within three of a jump
/// marker or an Omega sign change. Torsion is compared where it is defined
/// and the curve is not near straight.
pub fn frenet_field_consistency(
    curve: &SpaceCurve,
    fields: &ControlFields,
) -> Result<FrenetFieldReport> {
    let n = curve.len();
    if fields.len() != n {
        return Err(Error::LengthMismatch(alloc::format!(
            "curve {n}, fields {}",
            fields.len()
        )));
    }
    let fr = frenet(curve)?;
    let pos = fields.with_nonnegative_omega();
    let h = fields.h();

    let mut keep = alloc::vec![true; n];
    let mut block = |c: usize| {
        for k in c.saturating_sub(JUMP_GUARD)..(c + JUMP_GUARD + 1).min(n) {
            keep[k] = false;
        }
    };
    for j in &fields.jumps {
        block(j.index);
    }
    for i in 0..n - 1 {
        if fields.omega[i].signum() != fields.omega[i + 1].signum() && fields.omega[i] != 0.0 {
            block(i);
        }
    }
    for k in 0..JUMP_GUARD.min(n) {
        keep[k] = false;
        keep[n - 1 - k] = false;
    }

    let mut dphi = alloc::vec![0.0; n];
    for seg in pos.segments() {
        if seg.len() >= 5 {
            let d = fd_derivative(&pos.phi[seg.clone()], h, 1);
            dphi[seg].copy_from_slice(&d);
        }
    }

    let idx: Vec<usize> = (0..n).filter(|&i| keep[i]).collect();
    let kres = rms(idx.iter().map(|&i| fr.curvature[i] - pos.omega[i]));
    let kref = rms(idx.iter().map(|&i| pos.omega[i]));
    let kmax = fr.curvature.iter().copied().fold(0.0, f64::max);
    let tau_idx: Vec<usize> = idx
        .iter()
        .copied()
        .filter(|&i| fr.torsion[i].is_some() && fr.curvature[i] >= NEAR_STRAIGHT_REL * kmax)
        .collect();
    let tres = rms(tau_idx
        .iter()
        .map(|&i| fr.torsion[i].unwrap() - (dphi[i] - pos.delta[i])));
    Ok(FrenetFieldReport {
        kappa_rel_rms: if kref > 0.0 { kres / kref } else { kres },
        tau_rms: tres,
        kappa_samples: idx.len(),
        tau_samples: tau_idx.len(),
    })
}

/// Re-run every design invariant on stored data.
pub fn audit(design: &DogDesign) -> Result<AuditReport> {
    let tol = &design.tolerances;
    let curve = &design.error_curve;
    let closure_tol = tol.closure_tol(curve.duration());
    let cr = closure_report(curve)?;
    let n = curve.len();
    let end = derivatives(curve, 1)?[n - 1].normalized();
    let end_angle = end.cross(Vec3::Z).norm().atan2(end.z);

    let mut checks = alloc::vec![
        Check::below("endpoint_gap", cr.endpoint_gap, closure_tol),
        Check::below("tangent_gap", cr.tangent_gap, closure_tol),
        Check::below("start_tangent_vs_z", cr.tangent_vs_zhat, closure_tol),
        Check::below("end_tangent_vs_z", end_angle, closure_tol),
    ];

    let path = &design.path;
    let m = path.len();
    checks.push(Check::below(
        "path_transport_residual",
        path.max_transport_residual(),
        tol.pt_tol,
    ));
    checks.push(Check::below(
        "path_pole_return",
        path.theta[0].abs().max(path.theta[m - 1].abs()),
        tol.pole_return_tol,
    ));

    let eq = frenet_field_consistency(curve, &design.fields)?;
    checks.push(Check::below(
        "kappa_vs_omega",
        eq.kappa_rel_rms,
        KAPPA_RMS_TOL,
    ));
    checks.push(Check::below("tau_vs_phase_rate", eq.tau_rms, TAU_RMS_TOL));

    let rec = propagate(&design.fields, &NoiseModel::default())?;
    let u = rec.final_unitary();
    checks.push(Check::below(
        "gate_offdiagonal",
        u.0[1].norm().max(u.0[2].norm()),
        tol.offdiag_tol,
    ));
    let obar = design.fields.mean_abs_omega();
    let defect = transport_defect(&rec, &design.fields)
        .into_iter()
        .enumerate()
        .filter(|(i, _)| !path.near_flagged(*i))
        .fold(0.0, |a: f64, (_, e)| a.max(e.abs()));
    checks.push(Check::below("dynamical_transport", defect, 1e-6 * obar));
    Ok(AuditReport { checks })
}

/// Geometry of one planar lobe of a two-lobe design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LobeReport {
    /// Net rotation angle of the half sequence.
    pub area: f64,
    /// RMS distance from the best plane through the lobe.
    pub plane_rms: f64,
    /// Largest distance of a lobe point from its start.
    pub size: f64,
    pub endpoint_gap: f64,
}

/// Split a two-half design at its middle sample and measure each lobe.
pub fn lobe_reports(design: &DogDesign) -> Vec<LobeReport> {
    let n = design.error_curve.len();
    let mid = (n - 1) / 2;
    [(0, mid), (mid, n - 1)]
        .iter()
        .map(|&(a, b)| {
            let pts = &design.error_curve.points[a..=b];
            let c = pts.iter().fold(Vec3::ZERO, |s, p| s + *p) / pts.len() as f64;
            // vector area is normal to the plane of a closed planar loop
            let mut area = Vec3::ZERO;
            for w in pts.windows(2) {
                area += (w[0] - c).cross(w[1] - c);
            }
            let normal = area.normalized();
            LobeReport {
                area: design.fields.pulse_area(a, b),
                plane_rms: rms(pts.iter().map(|p| (*p - c).dot(normal))),
                size: pts.iter().map(|p| (*p - pts[0]).norm()).fold(0.0, f64::max),
                endpoint_gap: (pts[pts.len() - 1] - pts[0]).norm(),
            }
        })
        .collect()
}
