//! Named property checks over elaborated declarations and the built-in
//! constructions, shared by the command-line front end and the tests.
//!
//! A failing check carries the first counterexample found; searches run in
//! increasing size, so that counterexample is a smallest one.

mod coinductive;
mod domains;
mod inductive;
mod lab;

use std::fmt;

use crate::surface::ElabEnv;

pub use coinductive::{coalgebra_checks, counter_stream_checks, final_suite, generic_coalgebra, tagged_labels};
pub use domains::{cpo_of, cpo_suite, domain_checks};
pub use inductive::{builtin_initial_checks, free_type_checks, initial_suite, tree_set, TreeNode, TreeSet};
pub use lab::{lab_suite, LabTarget};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

impl CheckResult {
    pub fn pass(name: impl Into<String>, detail: impl Into<String>) -> Self {
        CheckResult { name: name.into(), status: Status::Pass, detail: detail.into() }
    }

    pub fn fail(name: impl Into<String>, detail: impl Into<String>) -> Self {
        CheckResult { name: name.into(), status: Status::Fail, detail: detail.into() }
    }

    pub fn skip(name: impl Into<String>, detail: impl Into<String>) -> Self {
        CheckResult { name: name.into(), status: Status::Skip, detail: detail.into() }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Bounds shared by every check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckConfig {
    /// Evaluation steps per individual evaluation.
    pub fuel: u64,
    /// Tree depth and path length for bounded observations.
    pub obs_depth: usize,
    /// Iterations for chains and fixed points.
    pub chain_bound: usize,
    pub seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { fuel: 10_000, obs_depth: 4, chain_bound: 32, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Initial,
    Final,
    Cpo,
    All,
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "initial" => Ok(Suite::Initial),
            "final" => Ok(Suite::Final),
            "cpo" => Ok(Suite::Cpo),
            "all" => Ok(Suite::All),
            other => Err(format!("unknown suite `{other}`")),
        }
    }
}

/// Runs the selected suites; results are sorted by name.
pub fn run_suite(env: &ElabEnv, suite: Suite, cfg: &CheckConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    if matches!(suite, Suite::Initial | Suite::All) {
        out.extend(initial_suite(env, cfg));
    }
    if matches!(suite, Suite::Final | Suite::All) {
        out.extend(final_suite(env, cfg));
    }
    if matches!(suite, Suite::Cpo | Suite::All) {
        out.extend(cpo_suite(env, cfg));
    }
    sort_results(&mut out);
    out
}

pub fn sort_results(results: &mut [CheckResult]) {
    results.sort_by(|a, b| a.name.cmp(&b.name));
}

/// Outcome of a check body: `Ok(detail)` passes, `Err(counterexample)` fails.
type Outcome = Result<String, String>;

fn run(name: String, body: impl FnOnce() -> Result<Outcome, String>) -> CheckResult {
    match body() {
        Ok(Ok(detail)) => CheckResult::pass(name, detail),
        Ok(Err(cex)) => CheckResult::fail(name, cex),
        Err(e) => CheckResult::fail(name, format!("error: {e}")),
    }
}

fn err<E: fmt::Display>(e: E) -> String {
    e.to_string()
}
