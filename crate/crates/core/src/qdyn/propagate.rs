use alloc::vec::Vec;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::{ControlFields, NoiseModel, Unitary2};
use crate::curvekit::SpaceCurve;
use crate::numerics::{fd_derivative, fd_derivative_vec, hermite};
use crate::{Error, Result, Vec3};

/// Propagated unitaries on the field grid; `u[0]` is the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionRecord {
    pub t: Vec<f64>,
    pub u: Vec<Unitary2>,
}

impl EvolutionRecord {
    pub fn final_unitary(&self) -> Unitary2 {
        *self.u.last().expect("empty evolution record")
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// Largest unitarity error over all samples.
    pub fn max_unitarity_error(&self) -> f64 {
        self.u
            .iter()
            .map(Unitary2::unitarity_error)
            .fold(0.0, f64::max)
    }
}

/// Per-step integrator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Exact exponential of the averaged endpoint Hamiltonian (2nd order).
    Midpoint,
    /// Two-point Gauss-Legendre Magnus step on Hermite-interpolated fields
    /// (4th order).
    #[default]
    Magnus4,
}

/// Time-ordered product of exact per-step 2x2 exponentials.
pub fn propagate(fields: &ControlFields, noise: &NoiseModel) -> Result<EvolutionRecord> {
    propagate_with(fields, noise, Scheme::default())
}

pub fn propagate_with(
    fields: &ControlFields,
    noise: &NoiseModel,
    scheme: Scheme,
) -> Result<EvolutionRecord> {
    fields.validate()?;
    if !(noise.delta_z.is_finite() && noise.epsilon.is_finite()) {
        return Err(Error::NonFinite("noise model"));
    }
    let rate = fields.step_rate(noise);
    if rate >= 0.1 {
        return Err(Error::StepSize(rate));
    }
    let n = fields.len();
    let h = fields.h();
    let mut u = Vec::with_capacity(n);
    let mut cur = Unitary2::IDENTITY;
    u.push(cur);
    match scheme {
        Scheme::Midpoint => {
            for i in 0..n.saturating_sub(1) {
                let a0 = fields.sample(i).hamiltonian(noise);
                let a1 = fields.left_sample(i + 1).hamiltonian(noise);
                cur = Unitary2::exp_pauli((a0 + a1) * (0.5 * h)) * cur;
                u.push(cur);
            }
        }
        Scheme::Magnus4 => {
            let g = 3f64.sqrt() / 6.0;
            let c = 3f64.sqrt() / 6.0 * h * h;
            for (vals, slopes, start) in segment_tracks(fields, noise) {
                for k in 0..vals.len() - 1 {
                    let at = |s: f64| {
                        let (p0, p1, m0, m1) =
                            (vals[k], vals[k + 1], slopes[k] * h, slopes[k + 1] * h);
                        Vec3::new(
                            hermite(p0.x, p1.x, m0.x, m1.x, s),
                            hermite(p0.y, p1.y, m0.y, m1.y, s),
                            hermite(p0.z, p1.z, m0.z, m1.z, s),
                        )
                    };
                    let a1 = at(0.5 - g);
                    let a2 = at(0.5 + g);
                    let b = (a1 + a2) * (0.5 * h) + a2.cross(a1) * c;
                    cur = Unitary2::exp_pauli(b) * cur;
                    u.push(cur);
                    debug_assert!(start + k + 1 == u.len() - 1);
                }
            }
        }
    }
    Ok(EvolutionRecord {
        t: fields.t.clone(),
        u,
    })
}

/// Hamiltonian vectors and their time derivatives on each continuous
/// stretch. A stretch ending at a jump carries the left value as its last
/// entry, so consecutive stretches cover every step exactly once.
fn segment_tracks(
    fields: &ControlFields,
    noise: &NoiseModel,
) -> Vec<(Vec<Vec3>, Vec<Vec3>, usize)> {
    let n = fields.len();
    let h = fields.h();
    let mut out = Vec::new();
    let segs = fields.segments();
    for (si, seg) in segs.iter().enumerate() {
        let end = if si + 1 < segs.len() { seg.end } else { n - 1 };
        if end <= seg.start {
            continue;
        }
        let mut vals: Vec<Vec3> = (seg.start..end)
            .map(|i| fields.sample(i).hamiltonian(noise))
            .collect();
        vals.push(fields.left_sample(end).hamiltonian(noise));
        let slopes = if vals.len() >= 5 {
            fd_derivative_vec(&vals, h, 1)
        } else {
            let m = vals.len();
            (0..m)
                .map(|i| {
                    let (a, b) = if i + 1 < m { (i, i + 1) } else { (i - 1, i) };
                    (vals[b] - vals[a]) / h
                })
                .collect()
        };
        out.push((vals, slopes, seg.start));
    }
    out
}

/// Error curve `r(t) = integral of U^dagger sz U`, arc-length parameterized
/// with the exact tantrix cached.
pub fn error_curve(fields: &ControlFields) -> Result<SpaceCurve> {
    let rec = propagate(fields, &NoiseModel::default())?;
    error_curve_from_record(fields, &rec)
}

/// Error curve from an existing noiseless record of `fields`.
pub fn error_curve_from_record(
    fields: &ControlFields,
    rec: &EvolutionRecord,
) -> Result<SpaceCurve> {
    let n = rec.len();
    let h = fields.h();
    let zero = NoiseModel::default();
    let rate = |a: Vec3| Vec3::new(-2.0 * a.y, 2.0 * a.x, 0.0);
    let tan: Vec<Vec3> = rec.u.iter().map(|u| u.heisenberg(Vec3::Z)).collect();
    for v in &tan {
        if !v.is_finite() || (v.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::NonFinite("tantrix"));
        }
    }
    let mut pts = Vec::with_capacity(n);
    let mut r = Vec3::ZERO;
    pts.push(r);
    for i in 0..n.saturating_sub(1) {
        let d0 = rec.u[i].heisenberg(rate(fields.sample(i).hamiltonian(&zero)));
        let d1 = rec.u[i + 1].heisenberg(rate(fields.left_sample(i + 1).hamiltonian(&zero)));
        r += (tan[i] + tan[i + 1]) * (0.5 * h) + (d0 - d1) * (h * h / 12.0);
        pts.push(r);
    }
    SpaceCurve::new(fields.t.clone(), pts)?.with_tangents(tan)
}

/// Endpoint `r(T)` of the error curve, the first Magnus term `A1 = r.sigma`.
pub fn magnus_a1(fields: &ControlFields) -> Result<Vec3> {
    let c = error_curve(fields)?;
    Ok(*c.points.last().unwrap_or(&Vec3::ZERO))
}

/// `F = Tr(Ur^dagger Ur)/6 + |Tr(Ui^dagger Ur)|^2 / 6`.
pub fn gate_fidelity(ideal: &Unitary2, real: &Unitary2) -> f64 {
    let a = (real.adjoint() * *real).trace().re;
    let b = (ideal.adjoint() * *real).trace().norm_sqr();
    (a + b) / 6.0
}

/// Remove the detuning by moving to the frame `exp(-i int Delta/2 sz)`:
/// returns fields with `Delta = 0` and `Phi~ = Phi - int Delta`.
pub fn interaction_frame_transform(fields: &ControlFields) -> Result<ControlFields> {
    fields.validate()?;
    let n = fields.len();
    let h = fields.h();
    let mut acc = Vec::with_capacity(n);
    acc.push(0.0);
    let segs = fields.segments();
    let mut total = 0.0;
    for (si, seg) in segs.iter().enumerate() {
        let end = if si + 1 < segs.len() { seg.end } else { n - 1 };
        if end <= seg.start {
            continue;
        }
        let mut d: Vec<f64> = fields.delta[seg.start..end].to_vec();
        d.push(fields.left_sample(end).delta);
        let dd = if d.len() >= 5 {
            fd_derivative(&d, h, 1)
        } else {
            alloc::vec![0.0; d.len()]
        };
        for k in 0..d.len() - 1 {
            total += 0.5 * h * (d[k] + d[k + 1]) + h * h / 12.0 * (dd[k] - dd[k + 1]);
            acc.push(total);
        }
    }
    let mut out = fields.clone();
    for i in 0..n {
        out.phi[i] -= acc[i];
        out.delta[i] = 0.0;
    }
    for j in &mut out.jumps {
        j.left.phi -= acc[j.index];
        j.left.delta = 0.0;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvekit::uniform_grid;
    use alloc::vec;
    use core::f64::consts::PI;

    fn square(area: f64, n: usize) -> ControlFields {
        let t = uniform_grid(0.0, area, n);
        ControlFields::new(t, vec![1.0; n], vec![0.0; n], vec![0.0; n]).unwrap()
    }

    #[test]
    fn pi_pulse_is_minus_i_sigma_x() {
        for scheme in [Scheme::Midpoint, Scheme::Magnus4] {
            let rec = propagate_with(&square(PI, 1001), &NoiseModel::default(), scheme).unwrap();
            assert!(
                rec.final_unitary()
                    .max_abs_diff(&Unitary2::minus_i_sigma_x())
                    < 1e-13
            );
        }
    }

    #[test]
    fn zero_fields_give_identity_and_straight_curve() {
        let n = 101;
        let t = uniform_grid(0.0, 2.0, n);
        let f = ControlFields::new(t, vec![0.0; n], vec![0.0; n], vec![0.0; n]).unwrap();
        let rec = propagate(&f, &NoiseModel::default()).unwrap();
        assert!(rec.final_unitary().max_abs_diff(&Unitary2::IDENTITY) < 1e-15);
        assert!((magnus_a1(&f).unwrap() - Vec3::new(0.0, 0.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn step_size_violation_is_reported() {
        let f = square(PI, 11);
        assert!(matches!(
            propagate(&f, &NoiseModel::default()),
            Err(Error::StepSize(_))
        ));
    }

    #[test]
    fn fidelity_reference_values() {
        let id = Unitary2::IDENTITY;
        assert!((gate_fidelity(&id, &id) - 1.0).abs() < 1e-15);
        let x = Unitary2::minus_i_sigma_x();
        assert!((gate_fidelity(&id, &x) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn constant_detuning_frame_phase_is_linear() {
        let n = 201;
        let t = uniform_grid(0.0, 4.0, n);
        let f = ControlFields::new(t.clone(), vec![0.3; n], vec![0.0; n], vec![0.7; n]).unwrap();
        let g = interaction_frame_transform(&f).unwrap();
        for (p, s) in g.phi.iter().zip(&t) {
            assert!((p + 0.7 * s).abs() < 1e-13);
        }
        assert!(g.delta.iter().all(|d| *d == 0.0));
    }
}
