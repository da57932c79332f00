//! Command implementations behind the `quasikernel` binary. Each command
//! returns a [`Report`]; the binary prints it and exits with status 0 iff
//! every check passed.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use quasikernel_core::checks::{lab_suite, run_suite, sort_results, LabTarget};
use quasikernel_core::surface::{
    elaborate_items, parse_extpoly_nf, parse_functor, parse_items, parse_poly_nf, ElabEnv, SurfaceError, TypeEntry,
};
use quasikernel_core::{CheckConfig, CheckResult, Fuel, Status, Suite};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot encode report: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReportConfig {
    pub fuel: u64,
    pub obs_depth: usize,
    pub chain_bound: usize,
    pub seed: u64,
}

impl From<&CheckConfig> for ReportConfig {
    fn from(c: &CheckConfig) -> Self {
        ReportConfig { fuel: c.fuel, obs_depth: c.obs_depth, chain_bound: c.chain_bound, seed: c.seed }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportCheck {
    pub name: String,
    pub status: String,
    pub detail: String,
}

impl From<CheckResult> for ReportCheck {
    fn from(c: CheckResult) -> Self {
        ReportCheck { name: c.name, status: c.status.as_str().to_string(), detail: c.detail }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub command: String,
    pub config: ReportConfig,
    pub checks: Vec<ReportCheck>,
    pub elapsed_ms: u64,
}

impl Report {
    fn new(command: String, cfg: &CheckConfig, mut checks: Vec<CheckResult>, start: Instant) -> Report {
        sort_results(&mut checks);
        Report {
            command,
            config: cfg.into(),
            checks: checks.into_iter().map(Into::into).collect(),
            elapsed_ms: start.elapsed().as_millis() as u64,
        }
    }

    pub fn success(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass.as_str())
    }

    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status.as_str()).count()
    }

    pub fn check(&self, name: &str) -> Option<&ReportCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.config;
        writeln!(f, "{}", self.command)?;
        writeln!(
            f,
            "fuel {} obs-depth {} chain-bound {} seed {}",
            c.fuel, c.obs_depth, c.chain_bound, c.seed
        )?;
        for check in &self.checks {
            writeln!(f, "{:<4} {}: {}", check.status, check.name, check.detail)?;
        }
        write!(
            f,
            "{} passed, {} failed, {} skipped in {} ms",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skip),
            self.elapsed_ms
        )
    }
}

fn read(file: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(file).map_err(|source| CliError::Io { path: file.to_path_buf(), source })
}

pub fn load_str(src: &str) -> Result<ElabEnv, SurfaceError> {
    elaborate_items(&parse_items(src)?)
}

/// The environment, or a failing `elaborate` check carrying the error.
fn load(file: &Path) -> Result<Result<ElabEnv, CheckResult>, CliError> {
    let src = read(file)?;
    Ok(load_str(&src).map_err(|e| CheckResult::fail("elaborate", e.to_string())))
}

/// Printed signature and normal form of one declared type, both read back.
fn describe(name: &str, entry: &TypeEntry) -> Vec<CheckResult> {
    let sig = entry.sig().to_string();
    let nf = entry.nf_string();
    let kind = match entry {
        TypeEntry::Free(_) => "free type",
        TypeEntry::Co(_) => "cotype",
    };
    let mut out = vec![CheckResult::pass(format!("elaborate/{name}"), format!("{kind}; F = {sig}; normal form {nf}"))];
    let sig_back = parse_functor(&sig).map(|s| &s == entry.sig());
    let nf_back = match entry {
        TypeEntry::Free(e) => parse_poly_nf(&nf).map(|n| n == e.nf),
        TypeEntry::Co(e) => parse_extpoly_nf(&nf).map(|n| n == e.nf),
    };
    out.push(match (sig_back, nf_back) {
        (Ok(true), Ok(true)) => CheckResult::pass(format!("roundtrip/{name}"), "signature and normal form re-parse"),
        (Ok(false), _) => CheckResult::fail(format!("roundtrip/{name}"), format!("`{sig}` re-parses differently")),
        (_, Ok(false)) => CheckResult::fail(format!("roundtrip/{name}"), format!("`{nf}` re-parses differently")),
        (Err(e), _) | (_, Err(e)) => CheckResult::fail(format!("roundtrip/{name}"), e.to_string()),
    });
    out
}

pub fn elaborate_checks(env: &ElabEnv) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for name in env.type_names() {
        if let Some(entry) = env.entry(name) {
            out.extend(describe(name, entry));
        }
    }
    for (name, body) in env.lets() {
        out.push(CheckResult::pass(format!("let/{name}"), body.to_string()));
    }
    out
}

pub fn cmd_elaborate(file: &Path, cfg: &CheckConfig) -> Result<Report, CliError> {
    let start = Instant::now();
    let checks = match load(file)? {
        Ok(env) => elaborate_checks(&env),
        Err(failure) => vec![failure],
    };
    Ok(Report::new(format!("elaborate {}", file.display()), cfg, checks, start))
}

pub fn cmd_eval(file: &Path, expr: &str, cfg: &CheckConfig) -> Result<Report, CliError> {
    let start = Instant::now();
    let checks = match load(file)? {
        Ok(env) => vec![match env.eval_show(expr, &mut Fuel::new(cfg.fuel)) {
            Ok(v) => CheckResult::pass("eval", v),
            Err(e) => CheckResult::fail("eval", e.to_string()),
        }],
        Err(failure) => vec![failure],
    };
    Ok(Report::new(format!("eval {} -e {expr}", file.display()), cfg, checks, start))
}

pub fn cmd_check(file: &Path, suite: Suite, cfg: &CheckConfig) -> Result<Report, CliError> {
    let start = Instant::now();
    let checks = match load(file)? {
        Ok(env) => run_suite(&env, suite, cfg),
        Err(failure) => vec![failure],
    };
    let suite = match suite {
        Suite::Initial => "initial",
        Suite::Final => "final",
        Suite::Cpo => "cpo",
        Suite::All => "all",
    };
    Ok(Report::new(format!("check {} --suite {suite}", file.display()), cfg, checks, start))
}

pub fn cmd_lab(which: LabTarget, cfg: &CheckConfig) -> Report {
    let start = Instant::now();
    let name = match which {
        LabTarget::Rere => "rere",
        LabTarget::Spap => "spap",
        LabTarget::Mtypes => "mtypes",
    };
    Report::new(format!("lab {name}"), cfg, lab_suite(which), start)
}
