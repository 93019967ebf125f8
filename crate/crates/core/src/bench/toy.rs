//! Square-pulse toy models comparing the orange-slice holonomic gate (HG)
//! with a direct z rotation (NHG) under three kinds of pulse error.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::numerics::bisect;
use crate::qdyn::{gate_fidelity, Unitary2};
use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// Over-rotation along the ideal path.
    Parallel,
    /// An extra rotation appended transverse to the path.
    Perpendicular,
    /// Fractional amplitude error on every pulse.
    Omega,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    Hg,
    Nhg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub noise: NoiseKind,
    pub gate: GateKind,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario {
            noise: NoiseKind::Parallel,
            gate: GateKind::Hg,
        },
        Scenario {
            noise: NoiseKind::Parallel,
            gate: GateKind::Nhg,
        },
        Scenario {
            noise: NoiseKind::Perpendicular,
            gate: GateKind::Hg,
        },
        Scenario {
            noise: NoiseKind::Perpendicular,
            gate: GateKind::Nhg,
        },
        Scenario {
            noise: NoiseKind::Omega,
            gate: GateKind::Hg,
        },
        Scenario {
            noise: NoiseKind::Omega,
            gate: GateKind::Nhg,
        },
    ];

    /// The closed form is exact except for the Omega-noise expansions.
    pub fn exact(&self) -> bool {
        self.noise != NoiseKind::Omega
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToyModelResult {
    pub scenario: Scenario,
    pub phi: f64,
    pub epsilon: f64,
    pub f_closed_form: f64,
    pub f_simulated: f64,
}

impl ToyModelResult {
    /// Allowed gap between the closed form and the simulation.
    pub fn tolerance(&self) -> f64 {
        if self.scenario.exact() {
            1e-8
        } else {
            5.0 * self.epsilon.abs().powi(3)
        }
    }

    pub fn agrees(&self) -> bool {
        (self.f_closed_form - self.f_simulated).abs() <= self.tolerance()
    }
}

/// Piecewise-constant Hamiltonian `(a, duration)` with `H = a.sigma`, for
/// unit drive strength.
fn segments(s: Scenario, phi: f64, eps: f64) -> Vec<(Vec3, f64)> {
    let n = Vec3::new(phi.cos(), phi.sin(), 0.0);
    let g = 1.0 + eps;
    match (s.noise, s.gate) {
        (NoiseKind::Parallel, GateKind::Hg) => {
            alloc::vec![(Vec3::X * 0.5, PI), (n * (0.5 * g), PI)]
        }
        (NoiseKind::Parallel, GateKind::Nhg) => alloc::vec![(Vec3::Z * (0.5 * g), 2.0 * phi)],
        (NoiseKind::Perpendicular, GateKind::Hg) => {
            alloc::vec![
                (Vec3::X * 0.5, PI),
                (n * 0.5, PI),
                (Vec3::Z * (eps / PI), PI)
            ]
        }
        (NoiseKind::Perpendicular, GateKind::Nhg) => {
            alloc::vec![(Vec3::Z * 0.5, 2.0 * phi), (Vec3::X * (eps / PI), PI)]
        }
        (NoiseKind::Omega, GateKind::Hg) => {
            alloc::vec![(Vec3::X * (0.5 * g), PI), (n * (0.5 * g), PI)]
        }
        (NoiseKind::Omega, GateKind::Nhg) => alloc::vec![(Vec3::Z * (0.5 * g), 2.0 * phi)],
    }
}

/// Exact propagator of a toy Hamiltonian, one SU(2) exponential per segment.
pub fn toy_unitary(s: Scenario, phi: f64, eps: f64) -> Unitary2 {
    segments(s, phi, eps)
        .into_iter()
        .fold(Unitary2::IDENTITY, |u, (a, dt)| {
            Unitary2::exp_pauli(a * dt) * u
        })
}

fn closed_form(s: Scenario, phi: f64, eps: f64) -> f64 {
    match (s.noise, s.gate) {
        (NoiseKind::Parallel, GateKind::Hg) => (2.0 + (PI * eps).cos()) / 3.0,
        (NoiseKind::Parallel, GateKind::Nhg) => (2.0 + (2.0 * phi * eps).cos()) / 3.0,
        (NoiseKind::Perpendicular, _) => (2.0 + (2.0 * eps).cos()) / 3.0,
        (NoiseKind::Omega, GateKind::Hg) => (3.0 - PI * PI * eps * eps * (1.0 + phi.cos())) / 3.0,
        (NoiseKind::Omega, GateKind::Nhg) => 1.0 - 2.0 / 3.0 * phi * phi * eps * eps,
    }
}

/// Closed-form and simulated fidelity of one toy scenario.
pub fn toy_model_fidelities(phi: f64, eps: f64, scenario: Scenario) -> Result<ToyModelResult> {
    if !(eps.abs() <= 0.5) {
        return Err(Error::OutOfRange(alloc::format!(
            "|epsilon| = {} exceeds 0.5",
            eps.abs()
        )));
    }
    if !phi.is_finite() {
        return Err(Error::NonFinite("gate angle"));
    }
    let ideal = toy_unitary(scenario, phi, 0.0);
    let real = toy_unitary(scenario, phi, eps);
    Ok(ToyModelResult {
        scenario,
        phi,
        epsilon: eps,
        f_closed_form: closed_form(scenario, phi, eps),
        f_simulated: gate_fidelity(&ideal, &real),
    })
}

/// Gate angle in `(pi/2, pi)` where simulated HG and NHG fidelities under
/// Omega noise of size `eps` are equal.
pub fn omega_noise_crossover(eps: f64) -> Result<f64> {
    let diff = |phi: f64| -> f64 {
        let f = |gate| {
            let s = Scenario {
                noise: NoiseKind::Omega,
                gate,
            };
            gate_fidelity(&toy_unitary(s, phi, 0.0), &toy_unitary(s, phi, eps))
        };
        f(GateKind::Hg) - f(GateKind::Nhg)
    };
    bisect(diff, 0.5 * PI, PI, 1e-12)
}
