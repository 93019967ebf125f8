//! CSV/JSON emission, content hashes and atomic writes.

use std::io::Write;
use std::path::{Path, PathBuf};

use dogforge_core::bench::{FidelitySweep, ToyModelResult};
use dogforge_core::curvekit::{FrenetData, SpaceCurve};
use dogforge_core::dogsynth::PhasePoint;
use dogforge_core::holonomy::BlochPath;
use dogforge_core::qdyn::ControlFields;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileHash {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Everything needed to rerun a command and check its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: serde_json::Value,
    pub inputs: Vec<FileHash>,
    pub outputs: Vec<FileHash>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

/// Output files held in memory until the whole command has succeeded.
#[derive(Debug, Default)]
pub struct Staged {
    files: Vec<(String, Vec<u8>)>,
}

impl Staged {
    pub fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    pub fn add_json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let mut bytes =
            serde_json::to_vec_pretty(value).map_err(|e| CliError::numerical(e.to_string()))?;
        bytes.push(b'\n');
        self.add(name, bytes);
        Ok(())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    /// Write every file, then the manifest, each by temp file and rename.
    pub fn commit(
        self,
        dir: &Path,
        command: &str,
        config: serde_json::Value,
        inputs: Vec<FileHash>,
    ) -> CliResult<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::precondition(format!("cannot create {}: {e}", dir.display())))?;
        let outputs = self
            .files
            .iter()
            .map(|(n, b)| FileHash {
                path: n.clone(),
                sha256: sha256_hex(b),
                bytes: b.len() as u64,
            })
            .collect();
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config,
            inputs,
            outputs,
        };
        let mut m =
            serde_json::to_vec_pretty(&manifest).map_err(|e| CliError::numerical(e.to_string()))?;
        m.push(b'\n');
        let mut written = Vec::new();
        for (name, bytes) in self
            .files
            .iter()
            .chain(std::iter::once(&(MANIFEST_NAME.to_string(), m)))
        {
            written.push(write_atomic(&dir.join(name), bytes)?);
        }
        Ok(written)
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<PathBuf> {
    let io =
        |e: std::io::Error| CliError::precondition(format!("cannot write {}: {e}", path.display()));
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(path.to_path_buf())
}

pub fn hash_input(path: &Path) -> CliResult<FileHash> {
    let b = std::fs::read(path)
        .map_err(|e| CliError::precondition(format!("cannot read {}: {e}", path.display())))?;
    Ok(FileHash {
        path: path.display().to_string(),
        sha256: sha256_hex(&b),
        bytes: b.len() as u64,
    })
}

fn table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn num(v: f64) -> String {
    format!("{v}")
}

pub fn curve_csv(c: &SpaceCurve) -> Vec<u8> {
    table(
        &["t", "x", "y", "z"],
        c.t.iter()
            .zip(&c.points)
            .map(|(t, p)| vec![num(*t), num(p.x), num(p.y), num(p.z)]),
    )
}

/// Torsion is left empty where it is undefined.
pub fn frenet_csv(t: &[f64], f: &FrenetData) -> Vec<u8> {
    table(
        &["t", "kappa", "tau"],
        t.iter()
            .zip(&f.curvature)
            .zip(&f.torsion)
            .map(|((t, k), tau)| vec![num(*t), num(*k), tau.map(num).unwrap_or_default()]),
    )
}

pub fn fields_csv(f: &ControlFields) -> Vec<u8> {
    table(
        &["t", "omega", "phi", "delta"],
        (0..f.len()).map(|i| vec![num(f.t[i]), num(f.omega[i]), num(f.phi[i]), num(f.delta[i])]),
    )
}

pub fn path_csv(p: &BlochPath) -> Vec<u8> {
    table(
        &["t", "theta", "phi", "alpha"],
        (0..p.len()).map(|i| vec![num(p.t[i]), num(p.theta[i]), num(p.phi[i]), num(p.alpha[i])]),
    )
}

/// `axis,label1,label2,...`
pub fn sweep_csv(s: &FidelitySweep) -> Vec<u8> {
    let mut header = vec![s.axis_kind.name()];
    header.extend(s.series.iter().map(|x| x.label.as_str()));
    table(
        &header,
        s.axis_values.iter().enumerate().map(|(k, x)| {
            std::iter::once(num(*x))
                .chain(s.series.iter().map(|r| num(r.fidelities[k])))
                .collect()
        }),
    )
}

pub fn toy_csv(rows: &[ToyModelResult]) -> Vec<u8> {
    table(
        &[
            "noise",
            "gate",
            "phi",
            "epsilon",
            "f_closed_form",
            "f_simulated",
            "agrees",
        ],
        rows.iter().map(|r| {
            vec![
                format!("{:?}", r.scenario.noise).to_lowercase(),
                format!("{:?}", r.scenario.gate).to_lowercase(),
                num(r.phi),
                num(r.epsilon),
                num(r.f_closed_form),
                num(r.f_simulated),
                r.agrees().to_string(),
            ]
        }),
    )
}

pub fn phase_map_csv(rows: &[PhasePoint]) -> Vec<u8> {
    table(
        &["xi", "beta_g", "beta_g_propagated"],
        rows.iter()
            .map(|p| vec![num(p.xi), num(p.beta_g), num(p.beta_g_propagated)]),
    )
}
