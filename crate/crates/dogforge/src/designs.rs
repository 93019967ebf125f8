//! Design specifications as written on the command line, and their builders.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use dogforge_core::bench::{standard_orange_slice, PulseShape, SweepTarget};
use dogforge_core::dogsynth::{
    orange_slice_2d, twisted_3d, DesignParams, DogDesign, Family, OrangeSliceOptions, TwistOptions,
};
use dogforge_core::holonomy::{aa_geometric_phase, bloch_path_from_evolution};
use dogforge_core::numerics::wrap_angle;
use dogforge_core::qdyn::{error_curve, propagate, ControlFields, NoiseModel};
use dogforge_core::Tolerances;

use crate::config::parse_angle;
use crate::error::{CliError, CliResult};

/// Grid for standard orange-slice baselines when none is given.
pub const STANDARD_GRID: usize = 20001;

#[derive(Debug, Clone, PartialEq)]
pub enum DesignSpec {
    Twisted { xi: f64 },
    Orange { phi0: f64 },
    Standard { phi0: f64, shape: PulseShape },
    Bundle(PathBuf),
}

/// Shared construction parameters; `None` means the family default.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Construction {
    pub omega0: Option<f64>,
    pub window: Option<f64>,
    pub grid_points: Option<usize>,
}

impl std::str::FromStr for DesignSpec {
    type Err = CliError;

    /// `twisted:XI`, `orange:PHI0`, `standard:PHI0`, `standard-sech:PHI0` or
    /// `bundle:PATH`.
    fn from_str(s: &str) -> CliResult<Self> {
        let (kind, arg) = s.split_once(':').ok_or_else(|| {
            CliError::usage(format!("design {s:?} is not of the form kind:value"))
        })?;
        let angle = || parse_angle(arg).map_err(CliError::usage);
        Ok(match kind.trim() {
            "twisted" => DesignSpec::Twisted { xi: angle()? },
            "orange" => DesignSpec::Orange { phi0: angle()? },
            "standard" => DesignSpec::Standard {
                phi0: angle()?,
                shape: PulseShape::Square,
            },
            "standard-sech" => DesignSpec::Standard {
                phi0: angle()?,
                shape: PulseShape::Sech,
            },
            "bundle" => DesignSpec::Bundle(PathBuf::from(arg)),
            k => return Err(CliError::usage(format!("unknown design kind {k:?}"))),
        })
    }
}

/// Parse a design list. An empty list, or the word `none`, is a usage error.
pub fn parse_design_list(items: &[String]) -> CliResult<Vec<DesignSpec>> {
    let items: Vec<&str> = items
        .iter()
        .flat_map(|s| s.split(','))
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if items.is_empty() || items.iter().any(|s| s.eq_ignore_ascii_case("none")) {
        return Err(CliError::usage("sweep needs at least one design"));
    }
    items.into_iter().map(str::parse).collect()
}

impl DesignSpec {
    pub fn label(&self) -> String {
        match self {
            DesignSpec::Twisted { xi } => format!("twisted xi={:.6}pi", xi / PI),
            DesignSpec::Orange { phi0 } => format!("orange phi0={:.6}pi", phi0 / PI),
            DesignSpec::Standard {
                phi0,
                shape: PulseShape::Square,
            } => format!("standard phi0={:.6}pi", phi0 / PI),
            DesignSpec::Standard {
                phi0,
                shape: PulseShape::Sech,
            } => {
                format!("standard-sech phi0={:.6}pi", phi0 / PI)
            }
            DesignSpec::Bundle(p) => format!("bundle {}", p.display()),
        }
    }

    /// Full design with path and phases. Standard slices are not DoG
    /// designs; their bundle carries the propagated path for inspection.
    pub fn build(&self, c: &Construction, tol: &Tolerances) -> CliResult<DogDesign> {
        let omega0 = c.omega0.unwrap_or(1.0);
        let d = match self {
            DesignSpec::Twisted { xi } => {
                let mut o = TwistOptions::default();
                if let Some(n) = c.grid_points {
                    o.grid_points = n;
                }
                if let Some(w) = c.window {
                    o.window = w;
                }
                twisted_3d(*xi, omega0, &o, tol)?
            }
            DesignSpec::Orange { phi0 } => {
                let mut o = OrangeSliceOptions::default();
                if let Some(n) = c.grid_points {
                    o.grid_points = n;
                }
                if c.window.is_some() {
                    return Err(CliError::precondition(
                        "the orange-slice family has a fixed pulse window",
                    ));
                }
                orange_slice_2d(*phi0, omega0, &o, tol)?
            }
            DesignSpec::Standard { phi0, shape } => {
                let n = c.grid_points.unwrap_or(STANDARD_GRID);
                let f = standard_orange_slice(*phi0, *shape, omega0, n)?;
                let params = DesignParams {
                    phi0: Some(*phi0),
                    xi: None,
                    omega0,
                    window: 0.0,
                    grid_points: n,
                };
                bundle_from_fields(f, params, tol)?
            }
            DesignSpec::Bundle(p) => read_bundle(p)?,
        };
        Ok(d.with_label(self.label()))
    }

    /// Fields and ideal gate for a sweep.
    pub fn target(&self, c: &Construction, tol: &Tolerances) -> CliResult<SweepTarget> {
        match self {
            DesignSpec::Standard { phi0, shape } => {
                let f = standard_orange_slice(
                    *phi0,
                    *shape,
                    c.omega0.unwrap_or(1.0),
                    c.grid_points.unwrap_or(STANDARD_GRID),
                )?;
                Ok(SweepTarget::new(self.label(), f)?)
            }
            _ => Ok(SweepTarget::from_design(&self.build(c, tol)?)),
        }
    }
}

/// Wrap arbitrary fields as a design record without synthesis checks.
pub fn bundle_from_fields(
    fields: ControlFields,
    params: DesignParams,
    tol: &Tolerances,
) -> CliResult<DogDesign> {
    let rec = propagate(&fields, &NoiseModel::default())?;
    let curve = error_curve(&fields)?;
    let path = bloch_path_from_evolution(&rec);
    let beta_g = aa_geometric_phase(&path, tol.angle_tol).unwrap_or(f64::NAN);
    let gate = rec.final_unitary();
    let beta_p = gate.0[0].arg();
    Ok(DogDesign {
        family: Family::Custom,
        params,
        error_curve: curve,
        fields,
        path,
        beta_g,
        beta_g_propagated: beta_p,
        beta_discrepancy: wrap_angle(beta_p - beta_g),
        gate,
        pre_rotation: None,
        tolerances: *tol,
        label: String::new(),
    })
}

pub fn read_bundle(path: &Path) -> CliResult<DogDesign> {
    let text = std::fs::read(path).map_err(|e| {
        CliError::precondition(format!("cannot read bundle {}: {e}", path.display()))
    })?;
    let d: DogDesign = serde_json::from_slice(&text)
        .map_err(|e| CliError::usage(format!("corrupt bundle {}: {e}", path.display())))?;
    d.fields.validate()?;
    if d.fields.len() != d.error_curve.len() || d.fields.len() != d.path.len() {
        return Err(CliError::usage(format!(
            "corrupt bundle {}: array lengths differ",
            path.display()
        )));
    }
    Ok(d)
}
