//! Resolving a run configuration, executing it and writing the manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use stochlab::RngStream;

use crate::experiments::{self, Experiment};
use crate::output::{merge_replicas, write_all, FileDigest};
use crate::params::{resolve, Params, Raw, Violation};

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid configuration:\n{}", list(.0))]
    Invalid(Vec<Violation>),
    #[error("cannot read {path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error(transparent)]
    Experiment(#[from] stochlab::Error),
    #[error("i/o error at {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("rerun differs from {manifest}:\n{}", .mismatches.join("\n"))]
    Mismatch { manifest: PathBuf, mismatches: Vec<String> },
}

impl RunError {
    /// Process exit status: 2 for bad input, 3 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Invalid(_) | RunError::Config { .. } => 2,
            _ => 3,
        }
    }
}

fn list(v: &[Violation]) -> String {
    v.iter().map(|x| format!("  {x}")).collect::<Vec<_>>().join("\n")
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io { path: path.to_path_buf(), source }
}

/// A fully resolved run: everything needed to reproduce the output files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub experiment: String,
    pub seed: u64,
    pub replicas: usize,
    pub params: Params,
}

/// What the user asked for before defaults and validation.
#[derive(Clone, Debug, Default)]
pub struct Request {
    pub experiment: String,
    pub seed: Option<u64>,
    pub replicas: Option<usize>,
    pub config_file: Option<PathBuf>,
    pub overrides: Vec<(String, Raw)>,
}

pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Default, Deserialize)]
struct ConfigFile {
    seed: Option<u64>,
    replicas: Option<usize>,
    #[serde(flatten)]
    sections: BTreeMap<String, toml::Table>,
}

fn read_config(path: &Path) -> Result<ConfigFile, RunError> {
    let text = fs::read_to_string(path).map_err(|e| RunError::Config { path: path.into(), message: e.to_string() })?;
    toml::from_str(&text).map_err(|e| RunError::Config { path: path.into(), message: e.to_string() })
}

fn toml_to_json(v: toml::Value) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

/// Layers defaults, the config file section for the experiment, then the
/// command-line overrides, and runs every check.
pub fn resolve_request(req: &Request) -> Result<(Experiment, RunConfig), RunError> {
    let Some(exp) = experiments::find(&req.experiment) else {
        return Err(RunError::Invalid(vec![Violation::new(
            "experiment",
            format!("unknown experiment {:?}; expected one of {}", req.experiment, experiments::NAMES.join(", ")),
        )]));
    };
    let mut violations = Vec::new();
    let mut layered: Vec<(String, Raw)> = Vec::new();
    let mut seed = DEFAULT_SEED;
    let mut replicas = None;
    if let Some(path) = &req.config_file {
        let file = read_config(path)?;
        seed = file.seed.unwrap_or(seed);
        replicas = file.replicas;
        for name in file.sections.keys() {
            if experiments::find(name).is_none() {
                violations.push(Violation::new(
                    format!("[{name}]"),
                    format!("unknown section; expected one of {}", experiments::NAMES.join(", ")),
                ));
            }
        }
        if let Some(section) = file.sections.get(exp.name) {
            layered.extend(section.iter().map(|(k, v)| (k.clone(), Raw::Json(toml_to_json(v.clone())))));
        }
    }
    seed = req.seed.unwrap_or(seed);
    replicas = req.replicas.or(replicas);
    if replicas == Some(0) {
        violations.push(Violation::new("replicas", "must be >= 1"));
    }
    if let (Some(r), Some(key)) = (replicas, exp.replica_key) {
        layered.push((key.to_string(), Raw::Text(r.to_string())));
    }
    layered.extend(req.overrides.iter().cloned());
    let (params, mut bad) = resolve(&exp.params, &layered);
    violations.append(&mut bad);
    if violations.is_empty() {
        violations = exp.check(&params);
    }
    if !violations.is_empty() {
        return Err(RunError::Invalid(violations));
    }
    let replicas = if exp.replica_key.is_some() { 1 } else { replicas.unwrap_or(1) };
    let config = RunConfig { experiment: exp.name.to_string(), seed, replicas, params };
    Ok((exp, config))
}

/// Output file record written beside the results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub started: String,
    pub finished: String,
    pub files: Vec<FileDigest>,
}

fn now() -> String {
    humantime::format_rfc3339_seconds(SystemTime::now()).to_string()
}

/// Runs `config`, writes its files and `manifest.json` into `out`.
pub fn execute(exp: &Experiment, config: &RunConfig, out: &Path) -> Result<Manifest, RunError> {
    let started = now();
    let runs = (0..config.replicas as u64)
        .into_par_iter()
        .map(|r| exp.run(&config.params, &RngStream::new(config.seed, r)))
        .collect::<stochlab::Result<Vec<_>>>()?;
    let artifacts = merge_replicas(runs);
    let files = write_all(out, &artifacts).map_err(io(out))?;
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        started,
        finished: now(),
        files,
    };
    let path = out.join(MANIFEST);
    let mut bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    bytes.push(b'\n');
    fs::write(&path, bytes).map_err(io(&path))?;
    Ok(manifest)
}

pub fn read_manifest(path: &Path) -> Result<Manifest, RunError> {
    let text = fs::read_to_string(path).map_err(io(path))?;
    serde_json::from_str(&text).map_err(|e| RunError::Config { path: path.into(), message: e.to_string() })
}

/// Re-executes the run recorded in `manifest_path` into `out` (default
/// `<manifest dir>/rerun`) and compares every file digest.
pub fn rerun(manifest_path: &Path, out: Option<&Path>) -> Result<Manifest, RunError> {
    let old = read_manifest(manifest_path)?;
    let req = Request {
        experiment: old.config.experiment.clone(),
        seed: Some(old.config.seed),
        replicas: None,
        config_file: None,
        overrides: old.config.params.0.iter().map(|(k, v)| (k.clone(), Raw::Json(serde_json::to_value(v).expect("value serializes")))).collect(),
    };
    let (exp, mut config) = resolve_request(&req)?;
    config.replicas = old.config.replicas;
    let out = match out {
        Some(p) => p.to_path_buf(),
        None => manifest_path.parent().unwrap_or(Path::new(".")).join("rerun"),
    };
    let new = execute(&exp, &config, &out)?;
    let mismatches = compare(&old.files, &new.files);
    if mismatches.is_empty() {
        Ok(new)
    } else {
        Err(RunError::Mismatch { manifest: manifest_path.into(), mismatches })
    }
}

fn compare(old: &[FileDigest], new: &[FileDigest]) -> Vec<String> {
    let mut out = Vec::new();
    for o in old {
        match new.iter().find(|n| n.path == o.path) {
            None => out.push(format!("  {}: missing", o.path)),
            Some(n) if n.sha256 != o.sha256 => out.push(format!("  {}: {} != {}", o.path, n.sha256, o.sha256)),
            Some(_) => {}
        }
    }
    for n in new.iter().filter(|n| !old.iter().any(|o| o.path == n.path)) {
        out.push(format!("  {}: unexpected", n.path));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(name: &str) -> Request {
        Request { experiment: name.into(), ..Default::default() }
    }

    #[test]
    fn unknown_experiment_lists_names() {
        let Err(RunError::Invalid(v)) = resolve_request(&req("nope")) else { panic!() };
        assert!(v[0].message.contains("interfere") && v[0].message.contains("clt"));
    }

    #[test]
    fn replicas_route_to_native_key() {
        let mut r = req("clt");
        r.replicas = Some(123);
        let (_, c) = resolve_request(&r).unwrap();
        assert_eq!(c.params.usize("replicas"), 123);
        assert_eq!(c.replicas, 1);
        let mut r = req("decay");
        r.replicas = Some(3);
        assert_eq!(resolve_request(&r).unwrap().1.replicas, 3);
    }

    #[test]
    fn command_line_beats_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        fs::write(&path, "seed = 9\n[decay]\natoms = 50\nrate = 2.0\n").unwrap();
        let mut r = req("decay");
        r.config_file = Some(path);
        r.overrides = vec![("atoms".into(), Raw::Text("70".into()))];
        let (_, c) = resolve_request(&r).unwrap();
        assert_eq!((c.seed, c.params.usize("atoms"), c.params.real("rate")), (9, 70, 2.0));
    }

    #[test]
    fn unknown_section_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        fs::write(&path, "[decya]\natoms = 5\n").unwrap();
        let mut r = req("decay");
        r.config_file = Some(path);
        let Err(RunError::Invalid(v)) = resolve_request(&r) else { panic!() };
        assert_eq!(v[0].key, "[decya]");
    }

    #[test]
    fn digest_comparison() {
        let d = |p: &str, h: &str| FileDigest { path: p.into(), sha256: h.into(), bytes: 1 };
        assert!(compare(&[d("a", "1")], &[d("a", "1")]).is_empty());
        assert_eq!(compare(&[d("a", "1"), d("b", "2")], &[d("a", "3"), d("c", "2")]).len(), 3);
    }
}
