//! Bloch-sphere holonomy: the path/field map, parallel transport and
//! Aharonov-Anandan phases.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::numerics::{fd_derivative, unwrap, wrap_angle};
use crate::qdyn::{ControlFields, EvolutionRecord, NoiseModel, Unitary2};
use crate::{Error, Result, Tolerances, Vec3};

/// Below this value of `|U00|` or `|U10|` the azimuth is treated as undefined.
const POLE_EPS: f64 = 1e-8;
/// `sin(theta)` below which the azimuth is too ill-conditioned to difference.
const POLE_GUARD: f64 = 1e-2;
/// Half-width of the finite-difference stencils.
const STENCIL_GUARD: usize = 3;

/// Trajectory `(theta, phi)` of the first column of `U(t)` plus its phase `alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochPath {
    pub t: Vec<f64>,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub alpha: Vec<f64>,
    /// Samples whose azimuth was continued by interpolation.
    #[serde(default)]
    pub flagged: Vec<bool>,
}

impl BlochPath {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    fn h(&self) -> f64 {
        (self.t[self.len() - 1] - self.t[0]) / (self.len() - 1) as f64
    }

    fn is_flagged(&self, i: usize) -> bool {
        self.flagged.get(i).copied().unwrap_or(false)
    }

    /// `alpha' + (1 - cos theta) phi' / 2` at every sample (finite differences).
    pub fn transport_residuals(&self) -> Vec<f64> {
        let h = self.h();
        let da = fd_derivative(&self.alpha, h, 1);
        let dp = fd_derivative(&self.phi, h, 1);
        (0..self.len())
            .map(|i| da[i] + 0.5 * (1.0 - self.theta[i].cos()) * dp[i])
            .collect()
    }

    /// Largest residual over interior samples whose stencil stays clear of
    /// flagged samples and of the poles.
    pub fn max_transport_residual(&self) -> f64 {
        let r = self.transport_residuals();
        let n = self.len();
        let mut worst: f64 = 0.0;
        for i in STENCIL_GUARD..n.saturating_sub(STENCIL_GUARD) {
            let clear = (i - STENCIL_GUARD..=i + STENCIL_GUARD)
                .all(|k| !self.is_flagged(k) && self.theta[k].sin() >= POLE_GUARD);
            if clear {
                worst = worst.max(r[i].abs());
            }
        }
        worst
    }

    /// Samples within a stencil half-width of a flagged sample.
    pub fn near_flagged(&self, i: usize) -> bool {
        let n = self.len();
        (i.saturating_sub(STENCIL_GUARD)..(i + STENCIL_GUARD + 1).min(n))
            .any(|k| self.is_flagged(k))
    }

    pub fn is_holonomic(&self, tol: &Tolerances) -> bool {
        self.max_transport_residual() < tol.pt_tol
    }

    /// Start and end on the same Bloch point.
    pub fn is_cyclic(&self, tol: f64) -> bool {
        let n = self.len();
        if (self.theta[n - 1] - self.theta[0]).abs() >= tol {
            return false;
        }
        if self.theta[0].sin() < tol {
            return true;
        }
        wrap_angle(self.phi[n - 1] - self.phi[0]).abs() < tol
    }
}

/// Total, dynamical and geometric phase of a cyclic evolution in one frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub beta_total: f64,
    pub beta_dynamical: f64,
    pub beta_geometric: f64,
    pub frame: PhaseFrame,
}

/// Reference frame for dynamical phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseFrame {
    Lab,
    DetuningRotating,
}

/// Control fields that drive a parallel-transported path.
pub fn fields_from_path(path: &BlochPath, tol: &Tolerances) -> Result<ControlFields> {
    let residual = path.max_transport_residual();
    if residual > tol.pt_tol {
        return Err(Error::NotParallelTransported {
            residual,
            tol: tol.pt_tol,
        });
    }
    let h = path.h();
    let dth = fd_derivative(&path.theta, h, 1);
    let dph = fd_derivative(&path.phi, h, 1);
    let n = path.len();
    let mut omega = Vec::with_capacity(n);
    let mut phi = Vec::with_capacity(n);
    let mut delta = Vec::with_capacity(n);
    for i in 0..n {
        let (st, ct) = path.theta[i].sin_cos();
        let (sp, cp) = path.phi[i].sin_cos();
        let w = dph[i] * st * ct;
        omega.push((dth[i] * dth[i] + w * w).sqrt());
        let re = -(dth[i] * sp + w * cp);
        let im = dth[i] * cp - w * sp;
        phi.push(im.atan2(re));
        delta.push(st * st * dph[i]);
    }
    unwrap(&mut phi);
    ControlFields::new(path.t.clone(), omega, phi, delta)
}

/// Read `(theta, phi, alpha)` off the first column of each propagator.
pub fn bloch_path_from_evolution(rec: &EvolutionRecord) -> BlochPath {
    let n = rec.len();
    let mut theta = Vec::with_capacity(n);
    let mut alpha = Vec::with_capacity(n);
    let mut lambda = Vec::with_capacity(n);
    let mut ok_a = Vec::with_capacity(n);
    let mut ok_l = Vec::with_capacity(n);
    for u in &rec.u {
        let (c, s) = (u.0[0], u.0[2]);
        theta.push(2.0 * s.norm().atan2(c.norm()));
        ok_a.push(c.norm() > POLE_EPS);
        ok_l.push(s.norm() > POLE_EPS);
        alpha.push(c.arg());
        lambda.push(s.arg());
    }
    fill_and_unwrap(&mut alpha, &ok_a);
    fill_and_unwrap(&mut lambda, &ok_l);
    let phi = lambda.iter().zip(&alpha).map(|(l, a)| l - a).collect();
    let flagged = ok_a.iter().zip(&ok_l).map(|(a, l)| !(a & l)).collect();
    BlochPath {
        t: rec.t.clone(),
        theta,
        phi,
        alpha,
        flagged,
    }
}

/// Unwrap the valid samples and linearly interpolate across invalid runs.
fn fill_and_unwrap(v: &mut [f64], ok: &[bool]) {
    let idx: Vec<usize> = (0..v.len()).filter(|&i| ok[i]).collect();
    if idx.is_empty() {
        v.iter_mut().for_each(|x| *x = 0.0);
        return;
    }
    let mut vals: Vec<f64> = idx.iter().map(|&i| v[i]).collect();
    unwrap(&mut vals);
    for (k, &i) in idx.iter().enumerate() {
        v[i] = vals[k];
    }
    for i in 0..idx[0] {
        v[i] = vals[0];
    }
    for w in 0..idx.len() - 1 {
        let (a, b) = (idx[w], idx[w + 1]);
        for i in a + 1..b {
            let s = (i - a) as f64 / (b - a) as f64;
            v[i] = vals[w] + s * (vals[w + 1] - vals[w]);
        }
    }
    let last = *idx.last().unwrap();
    for x in v.iter_mut().skip(last + 1) {
        *x = vals[vals.len() - 1];
    }
}

/// `-1/2 integral (1 - cos theta) dphi` by the trapezoid rule on the unwrapped azimuth.
pub fn aa_geometric_phase(path: &BlochPath, angle_tol: f64) -> Result<f64> {
    if !path.is_cyclic(angle_tol) {
        let n = path.len();
        return Err(Error::NotCyclic(alloc::format!(
            "theta {:.3e} -> {:.3e}",
            path.theta[0],
            path.theta[n - 1]
        )));
    }
    let mut acc = 0.0;
    for i in 0..path.len() - 1 {
        let w = 0.5 * ((1.0 - path.theta[i].cos()) + (1.0 - path.theta[i + 1].cos()));
        acc += -0.5 * w * (path.phi[i + 1] - path.phi[i]);
    }
    Ok(acc)
}

/// Expectation `<psi0|H_c|psi0>` at every sample (zero under parallel transport).
pub fn transport_defect(rec: &EvolutionRecord, fields: &ControlFields) -> Vec<f64> {
    let zero = NoiseModel::default();
    rec.u
        .iter()
        .enumerate()
        .map(|(i, u)| expectation(u, fields.sample(i).hamiltonian(&zero)))
        .collect()
}

fn expectation(u: &Unitary2, a: Vec3) -> f64 {
    // <psi0|a.sigma|psi0> with psi0 the first column
    u.heisenberg(a).z
}

/// Map a phase into `(-2pi, 2pi]` with the smallest shift.
pub fn to_branch(mut x: f64) -> f64 {
    while x > 2.0 * PI {
        x -= 2.0 * PI;
    }
    while x <= -2.0 * PI {
        x += 2.0 * PI;
    }
    x
}

/// Total, dynamical and geometric phase of `|psi0(t)>` in the chosen frame.
///
/// The rotating frame is `R(t) = exp(-i gamma(t) sz)` with
/// `gamma = integral Delta/2`, states `R^dagger psi` and
/// `H_eff = R^dagger H R - Delta/2 sz`.
pub fn dynamical_phase(
    rec: &EvolutionRecord,
    fields: &ControlFields,
    frame: PhaseFrame,
) -> Result<PhaseReport> {
    let n = rec.len();
    if n != fields.len() {
        return Err(Error::LengthMismatch(alloc::format!(
            "record {n}, fields {}",
            fields.len()
        )));
    }
    let h = fields.h();
    let zero = NoiseModel::default();
    let gamma = match frame {
        PhaseFrame::Lab => alloc::vec![0.0; n],
        PhaseFrame::DetuningRotating => {
            if fields.delta.is_empty() {
                return Err(Error::FrameMismatch);
            }
            let tr = crate::qdyn::interaction_frame_transform(fields)?;
            // Phi~ = Phi - 2 gamma
            (0..n).map(|i| 0.5 * (fields.phi[i] - tr.phi[i])).collect()
        }
    };
    let energy = |i: usize, left: bool| -> f64 {
        let s = if left {
            fields.left_sample(i)
        } else {
            fields.sample(i)
        };
        let mut a = s.hamiltonian(&zero);
        if frame == PhaseFrame::DetuningRotating {
            a.z -= 0.5 * s.delta;
        }
        // R commutes with sz, so <psi_I|H_eff|psi_I> = <psi|H - Delta/2 sz|psi>
        expectation(&rec.u[i], a)
    };
    let mut beta_d = 0.0;
    for i in 0..n - 1 {
        beta_d -= 0.5 * h * (energy(i, false) + energy(i + 1, true));
    }
    let psi0 = |i: usize| -> (Complex64, Complex64) {
        let u = &rec.u[i];
        let r = Complex64::from_polar(1.0, gamma[i]);
        (u.0[0] * r, u.0[2] * r.conj())
    };
    let (a0, b0) = psi0(0);
    let (a1, b1) = psi0(n - 1);
    let overlap = a0.conj() * a1 + b0.conj() * b1;
    let beta_total = overlap.arg();
    Ok(PhaseReport {
        beta_total,
        beta_dynamical: to_branch(beta_d),
        beta_geometric: to_branch(beta_total - beta_d),
        frame,
    })
}

/// Two-level model of an energy perturbation on a superposition
/// `a|n> + b|m>` evolved for one period `2pi/(E_n - E_m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelToy {
    pub e_n: f64,
    pub e_m: f64,
    /// `|b|^2`, the weight of level `m`.
    pub b_sq: f64,
}

/// Geometric, total and dynamical phase of the perturbed toy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AaPhases {
    pub geometric: f64,
    pub total: f64,
    pub dynamical: f64,
}

impl TwoLevelToy {
    /// Perturbed energies for a fractional gap error `eps`:
    /// `E_n' = E_n - eps (E_n - E_m)`, `E_m' = E_m`.
    pub fn perturbed(&self, eps: f64) -> (f64, f64) {
        (self.e_n - eps * (self.e_n - self.e_m), self.e_m)
    }
}

/// Closed-form phases of the toy after one unperturbed period.
pub fn aa_phase_robustness(model: &TwoLevelToy, eps: f64) -> Result<AaPhases> {
    let gap = model.e_n - model.e_m;
    if gap == 0.0 {
        return Err(Error::DegenerateLevels);
    }
    if !(eps.abs() < 0.3) {
        return Err(Error::OutOfRange(alloc::format!("eps = {eps}")));
    }
    if !(0.0..=1.0).contains(&model.b_sq) {
        return Err(Error::OutOfRange(alloc::format!("|b|^2 = {}", model.b_sq)));
    }
    let b2 = model.b_sq;
    let a2 = 1.0 - b2;
    let (en, em) = model.perturbed(eps);
    let arg = 2.0 * PI * (1.0 - eps);
    let total = -2.0 * PI * en / gap + (b2 * arg.sin()).atan2(b2 * arg.cos() + a2);
    let dynamical = -(2.0 * PI / gap) * (a2 * en + b2 * em);
    Ok(AaPhases {
        geometric: total - dynamical,
        total,
        dynamical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvekit::uniform_grid;
    use crate::qdyn::propagate;
    use alloc::vec;

    fn latitude_loop(theta0: f64, n: usize) -> BlochPath {
        let t = uniform_grid(0.0, 1.0, n);
        let phi: Vec<f64> = t.iter().map(|s| 2.0 * PI * s).collect();
        let alpha = phi
            .iter()
            .map(|p| -0.5 * (1.0 - theta0.cos()) * p)
            .collect();
        BlochPath {
            t,
            theta: vec![theta0; n],
            phi,
            alpha,
            flagged: vec![false; n],
        }
    }

    #[test]
    fn latitude_loop_encloses_cap_area() {
        for th in [0.3, 1.0, PI / 2.0, 2.5] {
            let p = latitude_loop(th, 501);
            let b = aa_geometric_phase(&p, 1e-6).unwrap();
            assert!((b + PI * (1.0 - th.cos())).abs() < 1e-12);
            assert!(p.max_transport_residual() < 1e-12);
        }
    }

    #[test]
    fn open_path_is_rejected() {
        let mut p = latitude_loop(1.0, 101);
        p.theta[100] = 1.1;
        assert!(matches!(
            aa_geometric_phase(&p, 1e-6),
            Err(Error::NotCyclic(_))
        ));
    }

    #[test]
    fn identity_record_has_trivial_path() {
        let rec = EvolutionRecord {
            t: uniform_grid(0.0, 1.0, 11),
            u: vec![Unitary2::IDENTITY; 11],
        };
        let p = bloch_path_from_evolution(&rec);
        assert!(p.theta.iter().all(|v| *v == 0.0));
        assert!(p.alpha.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn unperturbed_toy_gives_area_phase() {
        let m = TwoLevelToy {
            e_n: 1.3,
            e_m: 0.4,
            b_sq: 0.3,
        };
        let p = aa_phase_robustness(&m, 0.0).unwrap();
        assert!((p.geometric + 2.0 * PI * 0.3).abs() < 1e-12);
        let m = TwoLevelToy {
            e_n: 1.0,
            e_m: 1.0,
            b_sq: 0.3,
        };
        assert_eq!(aa_phase_robustness(&m, 0.0), Err(Error::DegenerateLevels));
    }

    #[test]
    fn x_pulse_expectation_vanishes() {
        let n = 1001;
        let t = uniform_grid(0.0, PI, n);
        let f = ControlFields::new(t, vec![1.0; n], vec![0.0; n], vec![0.0; n]).unwrap();
        let rec = propagate(&f, &NoiseModel::default()).unwrap();
        assert!(transport_defect(&rec, &f).iter().all(|e| e.abs() < 1e-12));
    }
}
