use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::{synthesize_as, DesignParams, DogDesign, Family};
use crate::curvekit::{
    arc_length_reparameterize_to, integrate_frenet, twist, uniform_grid, Frame, SpaceCurve,
};
use crate::holonomy::{aa_geometric_phase, bloch_path_from_evolution};
use crate::numerics::bisect;
use crate::qdyn::{
    error_curve_from_record, propagate, ControlFields, Discontinuity, FieldSample, NoiseModel,
};
use crate::{Error, Result, Tolerances};

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

/// Gudermannian, the antiderivative of sech.
fn gd(x: f64) -> f64 {
    2.0 * (0.5 * x).tanh().atan()
}

// Window constants of the four-pulse half sequence, in units u = Omega0 t.
const U_EDGE: f64 = 25.6;
const U_SWITCH: f64 = 15.6;
const U_OUTER: f64 = 20.6;
const U_INNER: f64 = 10.6;
const OUTER_GAIN: f64 = -0.5;

/// Grid intervals must be a multiple of this so every switch lands on a sample.
const GRID_QUANTUM: usize = 256;

/// Inner-pulse offset and overall gain of the half sequence
/// `-g/2 sech(u+20.6), g sech(u+c), g sech(c-u), -g/2 sech(20.6-u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SechSequence {
    pub c: f64,
    pub amplitude: f64,
}

impl SechSequence {
    pub const VERBATIM: SechSequence = SechSequence {
        c: U_INNER,
        amplitude: 1.0,
    };

    /// Value of pulse `piece` (0..4, left to right) at `u`.
    fn piece(&self, piece: usize, u: f64) -> f64 {
        self.amplitude
            * match piece {
                0 => OUTER_GAIN * sech(u + U_OUTER),
                1 => sech(u + self.c),
                2 => sech(self.c - u),
                _ => OUTER_GAIN * sech(U_OUTER - u),
            }
    }

    /// Rotation angle accumulated from `-25.6` to `u`.
    pub fn area_to(&self, u: f64) -> f64 {
        let g = self.amplitude;
        let o = OUTER_GAIN * g;
        let a0 = o * (gd(u.min(-U_SWITCH) + U_OUTER) - gd(U_OUTER - U_EDGE));
        if u <= -U_SWITCH {
            return a0;
        }
        let a1 = g * (gd(u.min(0.0) + self.c) - gd(self.c - U_SWITCH));
        if u <= 0.0 {
            return a0 + a1;
        }
        let a2 = g * (gd(self.c) - gd(self.c - u.min(U_SWITCH)));
        if u <= U_SWITCH {
            return a0 + a1 + a2;
        }
        let a3 = o * (gd(U_OUTER - U_SWITCH) - gd(U_OUTER - u));
        a0 + a1 + a2 + a3
    }

    /// Net rotation of one half sequence.
    pub fn area(&self) -> f64 {
        self.area_to(U_EDGE)
    }

    /// `integral sin A(u) du` over the half window: the in-plane component of
    /// the lobe's endpoint gap orthogonal to z.
    pub fn transverse_gap(&self) -> f64 {
        gauss_integral(|u| self.area_to(u).sin())
    }

    /// `integral cos A(u) du`.
    pub fn axial_gap(&self) -> f64 {
        gauss_integral(|u| self.area_to(u).cos())
    }
}

/// Composite 3-point Gauss-Legendre over the half window, split at the switches.
fn gauss_integral(f: impl Fn(f64) -> f64) -> f64 {
    let nodes = [-(0.6f64).sqrt(), 0.0, (0.6f64).sqrt()];
    let weights = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    let cuts = [-U_EDGE, -U_SWITCH, 0.0, U_SWITCH, U_EDGE];
    let per = 4000;
    let mut acc = 0.0;
    for w in cuts.windows(2) {
        let h = (w[1] - w[0]) / per as f64;
        for k in 0..per {
            let mid = w[0] + (k as f64 + 0.5) * h;
            for (x, wt) in nodes.iter().zip(&weights) {
                acc += 0.5 * h * wt * f(mid + 0.5 * h * x);
            }
        }
    }
    acc
}

/// How the two free constants of the half sequence are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OrangeSliceOptions {
    /// Total samples; `grid_points - 1` must be a multiple of 256.
    pub grid_points: usize,
    /// Solve the inner offset `c` so each lobe closes.
    pub tune_offset: bool,
    /// Rescale the amplitude so each half rotates by exactly pi.
    pub renormalize: bool,
}

impl Default for OrangeSliceOptions {
    fn default() -> Self {
        Self {
            grid_points: 20481,
            tune_offset: true,
            renormalize: true,
        }
    }
}

impl OrangeSliceOptions {
    pub fn verbatim() -> Self {
        Self {
            tune_offset: false,
            renormalize: false,
            ..Self::default()
        }
    }
}

/// Constants of the half sequence under the chosen options.
pub fn orange_slice_constants(opts: &OrangeSliceOptions) -> Result<SechSequence> {
    let renorm = |c: f64| {
        let s = SechSequence { c, amplitude: 1.0 };
        if opts.renormalize {
            SechSequence {
                c,
                amplitude: PI / s.area(),
            }
        } else {
            s
        }
    };
    if !opts.tune_offset {
        return Ok(renorm(U_INNER));
    }
    let c = bisect(
        |c| renorm(c).transverse_gap(),
        U_INNER - 0.5,
        U_INNER + 0.5,
        1e-13,
    )?;
    Ok(renorm(c))
}

/// The eight-pulse field set: two half sequences, the second with drive
/// phase `phi0`. Returns the fields and the constants used.
pub fn orange_slice_2d_fields(
    phi0: f64,
    omega0: f64,
    opts: &OrangeSliceOptions,
) -> Result<(ControlFields, SechSequence)> {
    if !(phi0 > -PI && phi0 <= PI) {
        return Err(Error::OutOfRange(alloc::format!(
            "phi0 = {phi0} outside (-pi, pi]"
        )));
    }
    if !(omega0 > 0.0 && omega0.is_finite()) {
        return Err(Error::OutOfRange(alloc::format!("omega0 = {omega0}")));
    }
    let n = opts.grid_points;
    if n < 2 * GRID_QUANTUM + 1 || (n - 1) % GRID_QUANTUM != 0 {
        return Err(Error::OutOfRange(alloc::format!(
            "grid_points - 1 = {} must be a positive multiple of {GRID_QUANTUM}",
            n.saturating_sub(1)
        )));
    }
    let seq = orange_slice_constants(opts)?;
    let m = (n - 1) / 2;
    let k = m / (GRID_QUANTUM / 2);
    // switch indices within a half: u = -15.6, 0, 15.6
    let i1 = 25 * k;
    let i2 = 103 * k;
    let hu = 2.0 * U_EDGE / m as f64;
    let piece_at = |i: usize| -> usize {
        if i < i1 {
            0
        } else if i < m / 2 {
            1
        } else if i < i2 {
            2
        } else {
            3
        }
    };
    let t = uniform_grid(0.0, 4.0 * U_EDGE / omega0, n);
    let mut omega = Vec::with_capacity(n);
    let mut phi = Vec::with_capacity(n);
    for j in 0..n {
        let (half, i) = if j < m { (0, j) } else { (1, j - m) };
        let u = -U_EDGE + hu * i as f64;
        let p = if i == m { 3 } else { piece_at(i) };
        omega.push(omega0 * seq.piece(p, u));
        phi.push(if half == 0 { 0.0 } else { phi0 });
    }
    let delta = alloc::vec![0.0; n];
    let mut jumps = Vec::new();
    for (base, ph) in [(0usize, 0.0), (m, phi0)] {
        for (i, left_piece) in [(i1, 0usize), (i2, 2usize)] {
            let u = -U_EDGE + hu * i as f64;
            jumps.push(Discontinuity {
                index: base + i,
                left: FieldSample {
                    omega: omega0 * seq.piece(left_piece, u),
                    phi: ph,
                    delta: 0.0,
                },
            });
        }
    }
    jumps.push(Discontinuity {
        index: m,
        left: FieldSample {
            omega: omega0 * seq.piece(3, U_EDGE),
            phi: 0.0,
            delta: 0.0,
        },
    });
    let fields = ControlFields::new(t, omega, phi, delta)?.with_jumps(jumps)?;
    Ok((fields, seq))
}

/// Two-lobe planar DoG gate with opening angle `phi0`.
pub fn orange_slice_2d(
    phi0: f64,
    omega0: f64,
    opts: &OrangeSliceOptions,
    tol: &Tolerances,
) -> Result<DogDesign> {
    let (fields, _) = orange_slice_2d_fields(phi0, omega0, opts)?;
    let n = fields.len();
    let m = (n - 1) / 2;
    for (a, b) in [(0, m), (m, n - 1)] {
        let dev = fields.pulse_area(a, b) - PI;
        if dev.abs() > tol.area_tol {
            return Err(Error::AreaDeviation(dev));
        }
    }
    let rec = propagate(&fields, &NoiseModel::default())?;
    let curve = error_curve_from_record(&fields, &rec)?.with_label("orange_slice_2d");
    let closure_tol = tol.closure_tol(curve.duration());
    let gap = (curve.points[n - 1] - curve.points[0]).norm();
    if gap >= closure_tol {
        return Err(Error::OpenCurve {
            gap,
            tol: closure_tol,
        });
    }
    let path = bloch_path_from_evolution(&rec);
    let beta_g = aa_geometric_phase(&path, tol.pole_return_tol)?;
    let params = DesignParams {
        phi0: Some(phi0),
        xi: None,
        omega0,
        window: U_EDGE,
        grid_points: n,
    };
    DogDesign::finish(
        Family::OrangeSlice2d,
        params,
        curve,
        fields,
        path,
        beta_g,
        None,
        tol,
    )
}

/// Parameters of the twisted family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TwistOptions {
    /// Samples of the synthesized design.
    pub grid_points: usize,
    /// Half width of each sech window in units of `1/Omega0`.
    pub window: f64,
    /// Oversampling of the planar curve relative to the output grid.
    pub oversample: usize,
}

impl Default for TwistOptions {
    fn default() -> Self {
        Self {
            grid_points: 20001,
            window: 10.0,
            oversample: 2,
        }
    }
}

/// Largest twist the family is defined for.
pub const MAX_TWIST: f64 = PI / 500.0;

/// Planar yz curve with curvature `A sech` on two consecutive windows and no
/// torsion, in units `u = Omega0 t`. `A` makes each window turn the tangent
/// by exactly pi, so the curve closes.
pub fn planar_double_sech(samples: usize, window: f64) -> Result<SpaceCurve> {
    let gain = PI / (2.0 * window.sinh().atan());
    let w = uniform_grid(0.0, 4.0 * window, samples);
    let kappa: Vec<f64> = w
        .iter()
        .map(|&x| {
            let s = if x < 2.0 * window {
                x - window
            } else {
                x - 3.0 * window
            };
            gain * sech(s)
        })
        .collect();
    let tau = alloc::vec![0.0; samples];
    Ok(integrate_frenet(&w, &kappa, &tau, Frame::Z_UP)?.with_label("planar_double_sech"))
}

fn scaled(curve: SpaceCurve, s: f64) -> SpaceCurve {
    SpaceCurve {
        t: curve.t.iter().map(|t| t * s).collect(),
        points: curve.points.iter().map(|p| *p * s).collect(),
        tangents: curve.tangents,
        label: curve.label,
    }
}

/// Twisted three-dimensional DoG gate.
pub fn twisted_3d(
    xi: f64,
    omega0: f64,
    opts: &TwistOptions,
    tol: &Tolerances,
) -> Result<DogDesign> {
    if !(xi.abs() <= MAX_TWIST) {
        return Err(Error::OutOfRange(alloc::format!(
            "|xi| = {xi:e} exceeds pi/500"
        )));
    }
    if !(omega0 > 0.0 && omega0.is_finite()) {
        return Err(Error::OutOfRange(alloc::format!("omega0 = {omega0}")));
    }
    if opts.grid_points < 64 || opts.oversample == 0 {
        return Err(Error::OutOfRange(alloc::format!(
            "grid_points = {}",
            opts.grid_points
        )));
    }
    let n = opts.grid_points;
    let planar = planar_double_sech(opts.oversample * (n - 1) + 1, opts.window)?;
    let curve = twist(&planar, xi)?;
    let curve = arc_length_reparameterize_to(&curve, n)?;
    let curve = scaled(curve, 1.0 / omega0)
        .translated_to_origin()
        .with_label("twisted_3d");
    let params = DesignParams {
        phi0: None,
        xi: Some(xi),
        omega0,
        window: opts.window,
        grid_points: n,
    };
    synthesize_as(&curve, tol, Family::Twisted3d, params)
}

/// One row of the phase-versus-twist table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub xi: f64,
    pub beta_g: f64,
    pub beta_g_propagated: f64,
}

/// Geometric phase of the twisted family at each twist value.
pub fn phase_vs_twist(
    xis: &[f64],
    omega0: f64,
    opts: &TwistOptions,
    tol: &Tolerances,
) -> Result<Vec<PhasePoint>> {
    xis.iter()
        .map(|&xi| {
            let d = twisted_3d(xi, omega0, opts, tol)?;
            Ok(PhasePoint {
                xi,
                beta_g: d.beta_g,
                beta_g_propagated: d.beta_g_propagated,
            })
        })
        .collect()
}

/// Twist whose phase is `target`, by piecewise-linear inverse interpolation
/// of a table that is monotone in `beta_g`. Targets outside the table are
/// extrapolated from the nearest end segment.
pub fn interpolate_xi(table: &[PhasePoint], target: f64) -> Result<f64> {
    if table.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: table.len(),
        });
    }
    let mut pts: Vec<(f64, f64)> = table.iter().map(|p| (p.xi, p.beta_g)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let rising = pts[1].1 > pts[0].1;
    if pts
        .windows(2)
        .any(|w| (w[1].1 > w[0].1) != rising || w[1].1 == w[0].1)
    {
        return Err(Error::NoConvergence("phase table is not monotone"));
    }
    let m = pts.len();
    let seg = pts
        .windows(2)
        .position(|w| (target - w[0].1) * (target - w[1].1) <= 0.0)
        .unwrap_or(if (target < pts[0].1) == rising {
            0
        } else {
            m - 2
        });
    let (a, b) = (pts[seg], pts[seg + 1]);
    Ok(a.0 + (target - a.1) * (b.0 - a.0) / (b.1 - a.1))
}
