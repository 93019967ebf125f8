//! Fidelity sweeps under quasistatic detuning and amplitude errors, the
//! standard orange-slice baseline, and closed-form toy models.

mod toy;

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::curvekit::uniform_grid;
use crate::dogsynth::DogDesign;
use crate::numerics::{loglog_slope, logspace};
use crate::qdyn::{
    gate_fidelity, propagate, ControlFields, Discontinuity, FieldSample, NoiseModel, Unitary2,
};
use crate::{Error, Result};

pub use toy::{
    omega_noise_crossover, toy_model_fidelities, toy_unitary, GateKind, NoiseKind, Scenario,
    ToyModelResult,
};

/// Rates per sweep axis when none are given.
pub const DEFAULT_RATE_COUNT: usize = 41;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisKind {
    /// `delta_z / Omega_bar`.
    DetuningRate,
    /// `epsilon` in `Omega (1 + epsilon)`.
    AmplitudeRate,
}

impl AxisKind {
    pub fn name(self) -> &'static str {
        match self {
            AxisKind::DetuningRate => "detuning_rate",
            AxisKind::AmplitudeRate => "amplitude_rate",
        }
    }

    /// Noise model at axis value `x` for fields with mean drive `omega_bar`.
    pub fn noise(self, x: f64, omega_bar: f64) -> NoiseModel {
        match self {
            AxisKind::DetuningRate => NoiseModel::detuning(x * omega_bar),
            AxisKind::AmplitudeRate => NoiseModel::amplitude(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSeries {
    pub label: String,
    pub fidelities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelitySweep {
    pub axis_kind: AxisKind,
    pub axis_values: Vec<f64>,
    pub series: Vec<SweepSeries>,
}

impl FidelitySweep {
    /// Assemble from per-series columns, checking the sweep invariants.
    pub fn new(
        axis_kind: AxisKind,
        axis_values: Vec<f64>,
        series: Vec<SweepSeries>,
    ) -> Result<Self> {
        check_axis(&axis_values)?;
        for s in &series {
            if s.fidelities.len() != axis_values.len() {
                return Err(Error::LengthMismatch(alloc::format!(
                    "series {} has {} values for {} rates",
                    s.label,
                    s.fidelities.len(),
                    axis_values.len()
                )));
            }
            if s.fidelities.iter().any(|f| !(0.0..=1.0).contains(f)) {
                return Err(Error::OutOfRange(alloc::format!(
                    "fidelity outside [0, 1] in {}",
                    s.label
                )));
            }
        }
        Ok(Self {
            axis_kind,
            axis_values,
            series,
        })
    }

    pub fn get(&self, label: &str) -> Option<&SweepSeries> {
        self.series.iter().find(|s| s.label == label)
    }

    /// Log-log slope of `1 - F` against the axis over `[lo, hi]`.
    pub fn infidelity_slope(&self, label: &str, lo: f64, hi: f64) -> Option<f64> {
        let s = self.get(label)?;
        let (x, y): (Vec<f64>, Vec<f64>) = self
            .axis_values
            .iter()
            .zip(&s.fidelities)
            .filter(|(x, f)| **x >= lo && **x <= hi && **f < 1.0)
            .map(|(x, f)| (*x, 1.0 - f))
            .unzip();
        (x.len() >= 2).then(|| loglog_slope(&x, &y))
    }
}

fn check_axis(v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::Empty("sweep axis"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("sweep axis"));
    }
    if v.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::OutOfRange(
            "sweep axis must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Logarithmically spaced rates on `[lo, hi]`.
pub fn default_rates(lo: f64, hi: f64) -> Vec<f64> {
    logspace(lo, hi, DEFAULT_RATE_COUNT)
}

/// Labelled fields to sweep, with the noiseless gate as reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTarget {
    pub label: String,
    pub fields: ControlFields,
    pub ideal: Unitary2,
}

impl SweepTarget {
    pub fn new(label: impl Into<String>, fields: ControlFields) -> Result<Self> {
        let ideal = propagate(&fields, &NoiseModel::default())?.final_unitary();
        Ok(Self {
            label: label.into(),
            fields,
            ideal,
        })
    }

    pub fn from_design(design: &DogDesign) -> Self {
        Self {
            label: design.label.clone(),
            fields: design.fields.clone(),
            ideal: design.gate,
        }
    }

    /// Fidelity at one axis value.
    pub fn fidelity(&self, axis: AxisKind, x: f64) -> Result<f64> {
        let noise = axis.noise(x, self.fields.mean_abs_omega());
        let real = propagate(&self.fields, &noise)?.final_unitary();
        if real == self.ideal {
            return Ok(1.0);
        }
        Ok(gate_fidelity(&self.ideal, &real).clamp(0.0, 1.0))
    }
}

/// Evaluate every target at every axis value, in order.
pub fn sweep(targets: &[SweepTarget], axis: AxisKind, values: &[f64]) -> Result<FidelitySweep> {
    if targets.is_empty() {
        return Err(Error::Empty("design list"));
    }
    check_axis(values)?;
    let mut series = Vec::with_capacity(targets.len());
    for t in targets {
        let f = values
            .iter()
            .map(|&x| t.fidelity(axis, x))
            .collect::<Result<Vec<_>>>()?;
        series.push(SweepSeries {
            label: t.label.clone(),
            fidelities: f,
        });
    }
    FidelitySweep::new(axis, values.to_vec(), series)
}

/// Fidelity against `delta_z = rate * Omega_bar` for each target.
pub fn detuning_sweep(targets: &[SweepTarget], rates: &[f64]) -> Result<FidelitySweep> {
    sweep(targets, AxisKind::DetuningRate, rates)
}

/// Fidelity against the fractional amplitude error for each target.
pub fn amplitude_sweep(targets: &[SweepTarget], rates: &[f64]) -> Result<FidelitySweep> {
    sweep(targets, AxisKind::AmplitudeRate, rates)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseShape {
    Square,
    Sech,
}

/// Half-width of each sech pulse in units of `Omega0 t`.
pub const SECH_WINDOW: f64 = 10.0;

/// Two pi pulses about `x` and about `(cos phi0, sin phi0, 0)`.
///
/// The sech pulses are truncated to `|Omega0 t| <= 10` and rescaled to area
/// pi. `grid_points` must be odd so the phase step lands on a sample.
pub fn standard_orange_slice(
    phi0: f64,
    shape: PulseShape,
    omega0: f64,
    grid_points: usize,
) -> Result<ControlFields> {
    if !(phi0 > -PI && phi0 <= PI) {
        return Err(Error::OutOfRange(alloc::format!(
            "phi0 = {phi0} outside (-pi, pi]"
        )));
    }
    if !(omega0 > 0.0 && omega0.is_finite()) {
        return Err(Error::OutOfRange(alloc::format!("omega0 = {omega0}")));
    }
    if grid_points < 9 || grid_points % 2 == 0 {
        return Err(Error::OutOfRange(alloc::format!(
            "grid_points = {grid_points} must be odd and >= 9"
        )));
    }
    let m = (grid_points - 1) / 2;
    let half = match shape {
        PulseShape::Square => PI / omega0,
        PulseShape::Sech => 2.0 * SECH_WINDOW / omega0,
    };
    let gain = PI / (4.0 * (0.5 * SECH_WINDOW).tanh().atan());
    let amp = |s: f64| match shape {
        PulseShape::Square => omega0,
        PulseShape::Sech => omega0 * gain / (omega0 * s - SECH_WINDOW).cosh(),
    };
    let t = uniform_grid(0.0, 2.0 * half, grid_points);
    let mut omega: Vec<f64> = t
        .iter()
        .map(|&x| amp(if x < half { x } else { x - half }))
        .collect();
    omega[m] = amp(0.0);
    let phi: Vec<f64> = (0..grid_points)
        .map(|i| if i < m { 0.0 } else { phi0 })
        .collect();
    let delta = alloc::vec![0.0; grid_points];
    let left = FieldSample {
        omega: amp(half),
        phi: 0.0,
        delta: 0.0,
    };
    ControlFields::new(t, omega, phi, delta)?
        .with_jumps(alloc::vec![Discontinuity { index: m, left }])
}
