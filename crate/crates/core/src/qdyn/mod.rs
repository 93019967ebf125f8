//! Qubit dynamics under the three-field Hamiltonian
//! `H = Omega/2 (cos Phi sx + sin Phi sy) + Delta/2 sz + dz sz`.

mod propagate;
mod unitary;

use alloc::vec::Vec;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::numerics::uniform_spacing;
use crate::{Error, Result, Vec3};

pub use propagate::{
    error_curve, error_curve_from_record, gate_fidelity, interaction_frame_transform, magnus_a1,
    propagate, propagate_with, EvolutionRecord, Scheme,
};
pub use unitary::Unitary2;

/// One sample of the drive triple.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FieldSample {
    pub omega: f64,
    pub phi: f64,
    pub delta: f64,
}

impl FieldSample {
    /// Pauli vector `a` of `H = a.sigma` including noise.
    pub fn hamiltonian(&self, noise: &NoiseModel) -> Vec3 {
        let w = 0.5 * self.omega * (1.0 + noise.epsilon);
        let (s, c) = self.phi.sin_cos();
        Vec3::new(w * c, w * s, 0.5 * self.delta + noise.delta_z)
    }
}

/// A jump between samples `index - 1` and `index`. The step ending at
/// `index` uses `left`; sample `index` itself stores the value after the jump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discontinuity {
    pub index: usize,
    pub left: FieldSample,
}

/// Sampled control fields on a uniform time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlFields {
    pub t: Vec<f64>,
    pub omega: Vec<f64>,
    pub phi: Vec<f64>,
    pub delta: Vec<f64>,
    #[serde(default)]
    pub jumps: Vec<Discontinuity>,
}

/// Quasistatic detuning offset and fractional amplitude error.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseModel {
    pub delta_z: f64,
    pub epsilon: f64,
}

impl NoiseModel {
    pub fn detuning(delta_z: f64) -> Self {
        Self {
            delta_z,
            epsilon: 0.0,
        }
    }

    pub fn amplitude(epsilon: f64) -> Self {
        Self {
            delta_z: 0.0,
            epsilon,
        }
    }
}

impl ControlFields {
    pub fn new(t: Vec<f64>, omega: Vec<f64>, phi: Vec<f64>, delta: Vec<f64>) -> Result<Self> {
        let f = Self {
            t,
            omega,
            phi,
            delta,
            jumps: Vec::new(),
        };
        f.validate()?;
        Ok(f)
    }

    pub fn with_jumps(mut self, mut jumps: Vec<Discontinuity>) -> Result<Self> {
        jumps.sort_by_key(|j| j.index);
        self.jumps = jumps;
        self.validate()?;
        Ok(self)
    }

    /// Check lengths, grid uniformity, finiteness and marker positions.
    pub fn validate(&self) -> Result<()> {
        let n = self.t.len();
        if self.omega.len() != n || self.phi.len() != n || self.delta.len() != n {
            return Err(Error::LengthMismatch(alloc::format!(
                "t {n}, omega {}, phi {}, delta {}",
                self.omega.len(),
                self.phi.len(),
                self.delta.len()
            )));
        }
        uniform_spacing(&self.t)?;
        if self
            .omega
            .iter()
            .chain(&self.phi)
            .chain(&self.delta)
            .any(|v| !v.is_finite())
        {
            return Err(Error::NonFinite("field sample"));
        }
        for j in &self.jumps {
            if j.index == 0 || j.index >= n {
                return Err(Error::OutOfRange(alloc::format!("jump index {}", j.index)));
            }
            if !(j.left.omega.is_finite() && j.left.phi.is_finite() && j.left.delta.is_finite()) {
                return Err(Error::NonFinite("jump marker"));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn h(&self) -> f64 {
        if self.t.len() < 2 {
            0.0
        } else {
            (self.t[self.t.len() - 1] - self.t[0]) / (self.t.len() - 1) as f64
        }
    }

    pub fn duration(&self) -> f64 {
        self.t.last().copied().unwrap_or(0.0) - self.t.first().copied().unwrap_or(0.0)
    }

    pub fn sample(&self, i: usize) -> FieldSample {
        FieldSample {
            omega: self.omega[i],
            phi: self.phi[i],
            delta: self.delta[i],
        }
    }

    /// Value approached from the left at sample `i`.
    pub fn left_sample(&self, i: usize) -> FieldSample {
        match self.jumps.binary_search_by_key(&i, |j| j.index) {
            Ok(k) => self.jumps[k].left,
            Err(_) => self.sample(i),
        }
    }

    pub fn has_jump_at(&self, i: usize) -> bool {
        self.jumps.binary_search_by_key(&i, |j| j.index).is_ok()
    }

    /// Half-open sample ranges between jump markers; adjacent ranges share
    /// no samples and each jump starts a new range.
    pub fn segments(&self) -> Vec<core::ops::Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for j in &self.jumps {
            out.push(start..j.index);
            start = j.index;
        }
        out.push(start..self.len());
        out
    }

    /// Time average of `|Omega|`.
    pub fn mean_abs_omega(&self) -> f64 {
        let h = self.h();
        let n = self.len();
        if n < 2 {
            return 0.0;
        }
        let mut acc = 0.0;
        for i in 0..n - 1 {
            acc += 0.5 * h * (self.omega[i].abs() + self.left_sample(i + 1).omega.abs());
        }
        acc / self.duration()
    }

    /// Net rotation angle `integral of Omega dt` between two samples.
    pub fn pulse_area(&self, from: usize, to: usize) -> f64 {
        let h = self.h();
        (from..to)
            .map(|i| 0.5 * h * (self.omega[i] + self.left_sample(i + 1).omega))
            .sum()
    }

    /// Largest `h * rate` over the grid for a noise model.
    pub fn step_rate(&self, noise: &NoiseModel) -> f64 {
        let h = self.h();
        let mut m: f64 = 0.0;
        for i in 0..self.len() {
            m = m.max((self.omega[i] * (1.0 + noise.epsilon)).abs());
            m = m.max(self.delta[i].abs() + noise.delta_z.abs());
        }
        for j in &self.jumps {
            m = m.max((j.left.omega * (1.0 + noise.epsilon)).abs());
            m = m.max(j.left.delta.abs() + noise.delta_z.abs());
        }
        h * m
    }

    /// Copy with Omega made nonnegative and the sign folded into Phi as a
    /// pi shift, then unwrapped within each segment.
    pub fn with_nonnegative_omega(&self) -> ControlFields {
        let mut out = self.clone();
        for i in 0..out.len() {
            if out.omega[i] < 0.0 {
                out.omega[i] = -out.omega[i];
                out.phi[i] += core::f64::consts::PI;
            }
        }
        for j in &mut out.jumps {
            if j.left.omega < 0.0 {
                j.left.omega = -j.left.omega;
                j.left.phi += core::f64::consts::PI;
            }
        }
        for seg in out.segments() {
            crate::numerics::unwrap(&mut out.phi[seg]);
        }
        out
    }
}
