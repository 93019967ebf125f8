//! Command execution: resolve flags against the config, compute everything,
//! then write the outputs in one step.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use dogforge_core::bench::{
    omega_noise_crossover, toy_model_fidelities, AxisKind, Scenario, DEFAULT_RATE_COUNT,
};
use dogforge_core::curvekit::frenet;
use dogforge_core::dogsynth::{audit, twisted_3d, AuditReport, Check, PhasePoint, TwistOptions};
use dogforge_core::numerics::{linear_fit, logspace};
use dogforge_core::qdyn::error_curve;
use rayon::prelude::*;
use serde_json::json;

use crate::cli::{
    AxisArg, Cli, Command, ConstructionArgs, DesignArgs, FamilyArg, PhaseMapArgs, SweepArgs,
    ToyArgs,
};
use crate::config::{Angle, RunConfig};
use crate::designs::{parse_design_list, read_bundle, Construction, DesignSpec};
use crate::error::{CliError, CliResult};
use crate::output::{self, hash_input, Staged};
use crate::parallel::{par_sweep, thread_cap};

pub const DEFAULT_OUTPUT_DIR: &str = "dogforge-out";

/// What a successful command reports on stdout.
pub type Summary = serde_json::Value;

pub fn run(cli: Cli) -> CliResult<Summary> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(d) = &cli.output_dir {
        cfg.output_dir = Some(d.clone());
    }
    let out = cfg
        .output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    let mut inputs = Vec::new();
    if let Some(p) = &cli.config {
        inputs.push(hash_input(p)?);
    }
    let (name, staged, summary) = match &cli.command {
        Command::Synth(a) => {
            merge_design(&mut cfg, a);
            let spec = design_spec(&cfg)?;
            check_output_dir(&out)?;
            let (s, sum) = synth(&cfg, &spec)?;
            ("synth", s, sum)
        }
        Command::Curve(a) => {
            merge_design(&mut cfg, a);
            let spec = design_spec(&cfg)?;
            check_output_dir(&out)?;
            let (s, sum) = curve(&cfg, &spec)?;
            ("curve", s, sum)
        }
        Command::Sweep(a) => {
            merge_sweep(&mut cfg, a);
            let specs = parse_design_list(cfg.sweep.designs.as_deref().unwrap_or(&[]))?;
            for s in &specs {
                if let DesignSpec::Bundle(p) = s {
                    inputs.push(hash_input(p)?);
                }
            }
            check_output_dir(&out)?;
            let (s, sum) = sweep(&cfg, &specs)?;
            ("sweep", s, sum)
        }
        Command::Toy(a) => {
            merge_toy(&mut cfg, a);
            check_output_dir(&out)?;
            let (s, sum) = toy(&cfg)?;
            ("toy", s, sum)
        }
        Command::PhaseMap(a) => {
            merge_phase_map(&mut cfg, a);
            check_output_dir(&out)?;
            let (s, sum) = phase_map(&cfg)?;
            ("phase-map", s, sum)
        }
        Command::Validate(a) => return validate(&a.bundle),
    };
    let files: Vec<String> = staged.names().map(String::from).collect();
    let config = serde_json::to_value(&cfg).map_err(|e| CliError::numerical(e.to_string()))?;
    staged.commit(&out, name, config, inputs)?;
    let mut summary = summary;
    summary["output_dir"] = json!(out.display().to_string());
    summary["files"] = json!(files);
    Ok(summary)
}

fn check_output_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir)
        .and_then(|_| tempfile::tempfile_in(dir).map(drop))
        .map_err(|e| {
            CliError::precondition(format!(
                "output directory {} is not writable: {e}",
                dir.display()
            ))
        })
}

fn merge_construction(cfg: &mut RunConfig, c: &ConstructionArgs) {
    let d = &mut cfg.design;
    d.omega0 = c.omega0.or(d.omega0);
    d.window = c.window.or(d.window);
    d.grid_points = c.grid_points.or(d.grid_points);
}

fn merge_design(cfg: &mut RunConfig, a: &DesignArgs) {
    if let Some(f) = a.family {
        cfg.design.family = Some(f.name().to_string());
    }
    cfg.design.xi = a.xi.or(cfg.design.xi);
    cfg.design.phi0 = a.phi0.or(cfg.design.phi0);
    merge_construction(cfg, &a.construction);
}

fn merge_sweep(cfg: &mut RunConfig, a: &SweepArgs) {
    let s = &mut cfg.sweep;
    if let Some(ax) = a.axis {
        s.axis = Some(match ax {
            AxisArg::Detuning => "detuning".into(),
            AxisArg::Amplitude => "amplitude".into(),
        });
    }
    if !a.designs.is_empty() {
        s.designs = Some(a.designs.clone());
    }
    s.rate_min = a.rate_min.or(s.rate_min);
    s.rate_max = a.rate_max.or(s.rate_max);
    s.rate_count = a.rate_count.or(s.rate_count);
    merge_construction(cfg, &a.construction);
}

fn merge_toy(cfg: &mut RunConfig, a: &ToyArgs) {
    if !a.phi.is_empty() {
        cfg.toy.phi = Some(a.phi.clone());
    }
    if !a.eps.is_empty() {
        cfg.toy.eps = Some(a.eps.clone());
    }
}

fn merge_phase_map(cfg: &mut RunConfig, a: &PhaseMapArgs) {
    let p = &mut cfg.phase_map;
    p.xi_min = a.xi_min.or(p.xi_min);
    p.xi_max = a.xi_max.or(p.xi_max);
    p.count = a.count.or(p.count);
    merge_construction(cfg, &a.construction);
}

fn construction(cfg: &RunConfig) -> Construction {
    Construction {
        omega0: cfg.design.omega0,
        window: cfg.design.window,
        grid_points: cfg.design.grid_points,
    }
}

fn design_spec(cfg: &RunConfig) -> CliResult<DesignSpec> {
    let d = &cfg.design;
    let family = d
        .family
        .as_deref()
        .ok_or_else(|| CliError::usage("--family is required"))?;
    let need = |v: Option<Angle>, flag: &str| {
        v.map(|a| a.0)
            .ok_or_else(|| CliError::usage(format!("{family} needs {flag}")))
    };
    let spec = match family {
        "twisted" => DesignSpec::Twisted {
            xi: need(d.xi, "--xi")?,
        },
        "orange" => DesignSpec::Orange {
            phi0: need(d.phi0, "--phi0")?,
        },
        "standard" | "standard-sech" => format!("{family}:{}", need(d.phi0, "--phi0")?).parse()?,
        f => {
            let known: Vec<_> = [
                FamilyArg::Twisted,
                FamilyArg::Orange,
                FamilyArg::Standard,
                FamilyArg::StandardSech,
            ]
            .iter()
            .map(|f| f.name())
            .collect();
            return Err(CliError::usage(format!(
                "unknown family {f:?}; expected one of {known:?}"
            )));
        }
    };
    if let Some(w) = d.window {
        if !(w > 0.0 && w.is_finite()) {
            return Err(CliError::precondition(format!(
                "window = {w} must be positive"
            )));
        }
    }
    Ok(spec)
}

fn checks_json(r: &AuditReport) -> serde_json::Value {
    json!(r.checks)
}

fn synth(cfg: &RunConfig, spec: &DesignSpec) -> CliResult<(Staged, Summary)> {
    if matches!(spec, DesignSpec::Standard { .. }) {
        return Err(CliError::precondition(
            "standard slices are baselines, not DoG designs; use `curve`",
        ));
    }
    let d = spec.build(&construction(cfg), &cfg.tolerances)?;
    let report = audit(&d)?;
    if !report.all_passed() {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        return Err(CliError::numerical(format!("design fails {failed:?}")));
    }
    let fr = frenet(&d.error_curve)?;
    let mut s = Staged::default();
    s.add_json("design.json", &d)?;
    s.add("fields.csv", output::fields_csv(&d.fields));
    s.add("curve.csv", output::curve_csv(&d.error_curve));
    s.add("frenet.csv", output::frenet_csv(&d.error_curve.t, &fr));
    s.add("path.csv", output::path_csv(&d.path));
    s.add_json("audit.json", &report)?;
    let g = d.gate.0;
    let summary = json!({
        "command": "synth",
        "label": d.label,
        "beta_g": d.beta_g,
        "beta_g_propagated": d.beta_g_propagated,
        "beta_g_propagated_over_pi": d.beta_g_propagated / PI,
        "gate_diagonal": [[g[0].re, g[0].im], [g[3].re, g[3].im]],
        "audit": checks_json(&report),
    });
    Ok((s, summary))
}

fn curve(cfg: &RunConfig, spec: &DesignSpec) -> CliResult<(Staged, Summary)> {
    let c = construction(cfg);
    let (curve, fields) = match spec {
        DesignSpec::Standard { .. } => {
            let t = spec.target(&c, &cfg.tolerances)?;
            (error_curve(&t.fields)?, t.fields)
        }
        _ => {
            let d = spec.build(&c, &cfg.tolerances)?;
            (d.error_curve, d.fields)
        }
    };
    let fr = frenet(&curve)?;
    let gap = curve
        .points
        .last()
        .map(|p| (*p - curve.points[0]).norm())
        .unwrap_or(0.0);
    let mut s = Staged::default();
    s.add("curve.csv", output::curve_csv(&curve));
    s.add("frenet.csv", output::frenet_csv(&curve.t, &fr));
    s.add("fields.csv", output::fields_csv(&fields));
    let summary = json!({
        "command": "curve",
        "label": spec.label(),
        "length": curve.duration(),
        "endpoint_gap": gap,
        "closed": gap < cfg.tolerances.closure_tol(curve.duration()),
    });
    Ok((s, summary))
}

fn sweep(cfg: &RunConfig, specs: &[DesignSpec]) -> CliResult<(Staged, Summary)> {
    let axis = match cfg.sweep.axis.as_deref() {
        Some("detuning") | Some("detuning_rate") => AxisKind::DetuningRate,
        Some("amplitude") | Some("amplitude_rate") => AxisKind::AmplitudeRate,
        Some(a) => return Err(CliError::usage(format!("unknown axis {a:?}"))),
        None => return Err(CliError::usage("--axis is required")),
    };
    let lo = cfg.sweep.rate_min.unwrap_or(1e-3);
    let hi = cfg.sweep.rate_max.unwrap_or(1e-1);
    let n = cfg.sweep.rate_count.unwrap_or(DEFAULT_RATE_COUNT);
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || n == 0 || (n == 1 && hi != lo) {
        return Err(CliError::precondition(format!(
            "bad rate range [{lo}, {hi}] x {n}"
        )));
    }
    let threads = thread_cap()?;
    let c = construction(cfg);
    let targets = specs
        .iter()
        .map(|s| s.target(&c, &cfg.tolerances))
        .collect::<CliResult<Vec<_>>>()?;
    let rates = if n == 1 {
        vec![lo]
    } else {
        logspace(lo, hi, n)
    };
    let result = par_sweep(&targets, axis, &rates, threads)?;
    let slopes: Vec<_> = result
        .series
        .iter()
        .map(|s| json!({ "label": s.label, "infidelity_slope": result.infidelity_slope(&s.label, lo, hi.min(1e-2)) }))
        .collect();
    let mut st = Staged::default();
    st.add("sweep.csv", output::sweep_csv(&result));
    let summary =
        json!({ "command": "sweep", "axis": axis.name(), "rates": rates.len(), "series": slopes });
    Ok((st, summary))
}

fn toy(cfg: &RunConfig) -> CliResult<(Staged, Summary)> {
    let phis: Vec<f64> = match &cfg.toy.phi {
        Some(v) => v.iter().map(|a| a.0).collect(),
        None => vec![0.25 * PI, 0.5 * PI, 0.595 * PI, 0.75 * PI],
    };
    let eps = cfg
        .toy
        .eps
        .clone()
        .unwrap_or_else(|| vec![1e-3, 1e-2, 5e-2, 1e-1]);
    let mut rows = Vec::new();
    for &phi in &phis {
        for &e in &eps {
            for s in Scenario::ALL {
                rows.push(toy_model_fidelities(phi, e, s)?);
            }
        }
    }
    if let Some(r) = rows.iter().find(|r| !r.agrees()) {
        return Err(CliError::numerical(format!(
            "closed form disagrees with simulation: {r:?}"
        )));
    }
    let crossover = omega_noise_crossover(1e-3)?;
    let mut s = Staged::default();
    s.add("toy.csv", output::toy_csv(&rows));
    let summary = json!({
        "command": "toy",
        "rows": rows.len(),
        "omega_crossover": crossover,
        "omega_crossover_over_pi": crossover / PI,
    });
    s.add_json("toy_summary.json", &summary)?;
    Ok((s, summary))
}

fn phase_map(cfg: &RunConfig) -> CliResult<(Staged, Summary)> {
    let lo = cfg.phase_map.xi_min.map(|a| a.0).unwrap_or(PI / 20000.0);
    let hi = cfg.phase_map.xi_max.map(|a| a.0).unwrap_or(PI / 2000.0);
    let n = cfg.phase_map.count.unwrap_or(11);
    if !(hi >= lo) || n < 2 {
        return Err(CliError::precondition(format!(
            "bad twist range [{lo}, {hi}] x {n}"
        )));
    }
    let mut opts = TwistOptions::default();
    if let Some(g) = cfg.design.grid_points {
        opts.grid_points = g;
    }
    if let Some(w) = cfg.design.window {
        opts.window = w;
    }
    let omega0 = cfg.design.omega0.unwrap_or(1.0);
    let xs: Vec<f64> = (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect();
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = thread_cap()? {
        b = b.num_threads(t);
    }
    let pool = b
        .build()
        .map_err(|e| CliError::precondition(e.to_string()))?;
    let tol = cfg.tolerances;
    let rows: Vec<PhasePoint> = pool.install(|| {
        xs.par_iter()
            .map(|&xi| {
                let d = twisted_3d(xi, omega0, &opts, &tol)?;
                Ok(PhasePoint {
                    xi,
                    beta_g: d.beta_g,
                    beta_g_propagated: d.beta_g_propagated,
                })
            })
            .collect::<Result<Vec<_>, dogforge_core::Error>>()
    })?;
    let fit = linear_fit(&xs, &rows.iter().map(|p| p.beta_g).collect::<Vec<_>>());
    let mut s = Staged::default();
    s.add("phase_map.csv", output::phase_map_csv(&rows));
    let summary = json!({
        "command": "phase-map",
        "points": rows.len(),
        "slope": fit.slope,
        "intercept": fit.intercept,
        "r_squared": fit.r_squared,
    });
    Ok((s, summary))
}

/// Check a stored bundle. The error curve is also regenerated from the
/// stored fields so a bundle cannot vouch for itself.
pub fn validate(path: &Path) -> CliResult<Summary> {
    let d = read_bundle(path)?;
    let mut report = audit(&d)?;
    let regen = error_curve(&d.fields)?;
    let tol = &d.tolerances;
    let gap = (*regen.points.last().expect("nonempty") - regen.points[0]).norm();
    let closure = tol.closure_tol(regen.duration());
    report.checks.push(Check {
        name: "regenerated_endpoint_gap".into(),
        value: gap,
        limit: closure,
        passed: gap < closure,
    });
    let drift = regen
        .points
        .iter()
        .zip(&d.error_curve.points)
        .map(|(a, b)| (*a - *b).norm())
        .fold(0.0, f64::max);
    let drift_tol = 1e-3 * regen.duration();
    report.checks.push(Check {
        name: "stored_curve_matches_fields".into(),
        value: drift,
        limit: drift_tol,
        passed: drift < drift_tol,
    });
    let summary = json!({
        "command": "validate",
        "bundle": path.display().to_string(),
        "sha256": hash_input(path)?.sha256,
        "passed": report.all_passed(),
        "checks": checks_json(&report),
    });
    if report.all_passed() {
        Ok(summary)
    } else {
        Err(ValidationFailed(summary).into())
    }
}

/// A failed validation still prints its full report.
pub struct ValidationFailed(pub Summary);

impl From<ValidationFailed> for CliError {
    fn from(v: ValidationFailed) -> Self {
        let failed: Vec<String> = v.0["checks"]
            .as_array()
            .into_iter()
            .flatten()
            .filter(|c| c["passed"] == json!(false))
            .filter_map(|c| c["name"].as_str().map(String::from))
            .collect();
        CliError {
            report: Some(v.0),
            ..CliError::numerical(format!("invariants failed: {failed:?}"))
        }
    }
}
