//! Run configuration: a TOML file whose values are overridden by flags.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use dogforge_core::Tolerances;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub output_dir: Option<PathBuf>,
    pub design: DesignSection,
    pub sweep: SweepSection,
    pub toy: ToySection,
    pub phase_map: PhaseMapSection,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DesignSection {
    pub family: Option<String>,
    pub xi: Option<Angle>,
    pub phi0: Option<Angle>,
    pub omega0: Option<f64>,
    pub window: Option<f64>,
    pub grid_points: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub axis: Option<String>,
    pub designs: Option<Vec<String>>,
    pub rate_min: Option<f64>,
    pub rate_max: Option<f64>,
    pub rate_count: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToySection {
    pub phi: Option<Vec<Angle>>,
    pub eps: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhaseMapSection {
    pub xi_min: Option<Angle>,
    pub xi_max: Option<Angle>,
    pub count: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::usage(format!("bad config: {e}")))
    }
}

/// An angle written as a number or with `pi`: `1.57`, `pi/2000`, `0.25pi`,
/// `-3pi/4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AngleRepr", into = "f64")]
pub struct Angle(pub f64);

#[derive(Deserialize)]
#[serde(untagged)]
enum AngleRepr {
    Num(f64),
    Text(String),
}

impl TryFrom<AngleRepr> for Angle {
    type Error = String;

    fn try_from(r: AngleRepr) -> Result<Self, String> {
        match r {
            AngleRepr::Num(v) => Ok(Angle(v)),
            AngleRepr::Text(s) => s.parse(),
        }
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

impl std::str::FromStr for Angle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_angle(s).map(Angle)
    }
}

pub fn parse_angle(s: &str) -> Result<f64, String> {
    let bad = || format!("cannot parse angle {s:?}");
    let t = s.trim().to_ascii_lowercase();
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), Some(b.trim().parse::<f64>().map_err(|_| bad())?)),
        None => (t.as_str(), None),
    };
    let value = if let Some(coef) = num.strip_suffix("pi") {
        let coef = coef.trim().trim_end_matches('*');
        let c = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|_| bad())?,
        };
        c * PI
    } else {
        num.parse::<f64>().map_err(|_| bad())?
    };
    let v = match den {
        Some(d) if d != 0.0 => value / d,
        Some(_) => return Err(bad()),
        None => value,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles_parse_with_and_without_pi() {
        assert_eq!(parse_angle("1.5").unwrap(), 1.5);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("-pi").unwrap(), -PI);
        assert_eq!(parse_angle("pi/2000").unwrap(), PI / 2000.0);
        assert_eq!(parse_angle("0.25pi").unwrap(), 0.25 * PI);
        assert_eq!(parse_angle("3*pi/4").unwrap(), 3.0 * PI / 4.0);
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("tau").is_err());
    }

    #[test]
    fn config_sections_accept_angle_strings() {
        let c = RunConfig::parse(
            r#"
            output_dir = "out"
            [design]
            family = "twisted"
            xi = "pi/2000"
            [toy]
            phi = [1.0, "0.5pi"]
            [tolerances]
            closure_rel = 2e-4
            "#,
        )
        .unwrap();
        assert_eq!(c.design.xi, Some(Angle(PI / 2000.0)));
        assert_eq!(c.toy.phi.unwrap()[1], Angle(0.5 * PI));
        assert_eq!(c.tolerances.closure_rel, 2e-4);
        assert_eq!(c.tolerances.pt_tol, Tolerances::default().pt_tol);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::parse("[design]\nfamly = \"x\"").is_err());
    }
}
