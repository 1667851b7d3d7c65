use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cascade::movelog::MoveLog;
use crate::cascade::{pack_rainbow_bases, SolverParams, StopReason};
use crate::oracle::{brute_force_t, OracleBudget};
use crate::rainbow::{overlap_kappa, BoundParams, Collection};

use super::{theorem_bounds, BoundRecord, Instance, ReportError, WorkbenchError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// Solver reached a local optimum and every check passed.
    Ok,
    /// Solver stopped on its move or time budget; the collection is still valid.
    Budget,
    /// A check failed.
    Invalid,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Budget => "budget",
            Status::Invalid => "invalid",
        }
    }
}

/// Outcome of one solver run on one instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub instance_digest: String,
    pub n: usize,
    pub m: usize,
    pub family: String,
    pub kappa_actual: usize,
    pub beta_declared: Option<usize>,
    /// A number, `inf`, or `declared` when the girth was too expensive to compute.
    pub girth: String,
    pub eta: usize,
    pub solver_rbs: usize,
    pub signature: String,
    pub brute_t: Option<usize>,
    pub bound: Option<BoundRecord>,
    pub move_log: Option<String>,
    pub moves: usize,
    pub best_effort_moves: usize,
    pub elapsed_ms: u64,
    pub status: Status,
}

pub const CSV_HEADER: &str = "instance_digest,n,m,family,kappa_actual,beta_declared,girth,solver_rbs,brute_t,bound_thm,bound_applicable,moves,elapsed_ms,status";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

impl Report {
    pub fn validate(&self) -> Result<(), ReportError> {
        if self.instance_digest.len() != 64 || !self.instance_digest.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(ReportError::Invalid("instance_digest must be 64 hex digits".into()));
        }
        if let Some(t) = self.brute_t {
            if self.solver_rbs > t {
                return Err(ReportError::Invalid(format!(
                    "solver found {} rainbow bases but brute force allows only {t}",
                    self.solver_rbs
                )));
            }
        }
        if self.solver_rbs > self.eta {
            return Err(ReportError::Invalid(format!(
                "{} rainbow bases from {} slots",
                self.solver_rbs, self.eta
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialise")
    }

    pub fn csv_row(&self) -> String {
        [
            self.instance_digest.clone(),
            self.n.to_string(),
            self.m.to_string(),
            self.family.clone(),
            self.kappa_actual.to_string(),
            opt(self.beta_declared),
            self.girth.clone(),
            self.solver_rbs.to_string(),
            opt(self.brute_t),
            opt(self.bound.map(|b| b.value)),
            opt(self.bound.map(|b| b.applicable)),
            self.moves.to_string(),
            self.elapsed_ms.to_string(),
            self.status.name().to_string(),
        ]
        .join(",")
    }
}

/// Parses and validates a JSON report.
pub fn parse_report(text: &str) -> Result<Report, ReportError> {
    let report: Report = serde_json::from_str(text).map_err(|e| ReportError::Syntax {
        line: e.line(),
        reason: e.to_string(),
    })?;
    report.validate()?;
    Ok(report)
}

/// A solver run with its report and replayable log.
#[derive(Debug, Clone)]
pub struct Solved {
    pub report: Report,
    pub log: MoveLog,
    pub collection: Collection,
}

/// Validates the instance, runs the solver, replays its log and optionally computes the exact
/// `t(ℬ)` for comparison.
pub fn solve_instance(
    instance: &Instance,
    params: &SolverParams,
    brute: Option<&OracleBudget>,
) -> Result<Solved, WorkbenchError> {
    let universe = instance.validate()?;
    let start = Instant::now();
    let result = pack_rainbow_bases(&universe, params)?;
    let elapsed_ms = start.elapsed().as_millis() as u64;
    let n = universe.n();
    let mut status = match result.stop {
        StopReason::LocalOptimum => Status::Ok,
        StopReason::Budget => Status::Budget,
    };
    let replayed = result.log.replay(&universe);
    if replayed.as_ref().ok() != Some(&result.collection) {
        status = Status::Invalid;
    }
    let brute_t = brute.and_then(|b| brute_force_t(&universe, b).ok());
    let solver_rbs = result.rainbow_bases();
    if brute_t.is_some_and(|t| solver_rbs > t) {
        status = Status::Invalid;
    }
    let kappa_actual = overlap_kappa(&instance.bases);
    let girth = match universe.matroid().girth() {
        Ok(g) => g.to_string(),
        Err(_) => "declared".to_string(),
    };
    let beta = instance.declared.beta.or_else(|| {
        universe
            .matroid()
            .girth()
            .ok()
            .map(|g| BoundParams::beta_for_girth(n, g.finite()))
    });
    let bound = beta.map(|b| theorem_bounds(n, b, kappa_actual, kappa_actual <= 1));
    let report = Report {
        instance_digest: instance.digest(),
        n,
        m: instance.m(),
        family: instance.family().to_string(),
        kappa_actual,
        beta_declared: instance.declared.beta,
        girth,
        eta: result.log.eta,
        solver_rbs,
        signature: result.collection.signature().to_string(),
        brute_t,
        bound,
        move_log: None,
        moves: result.log.moves.len(),
        best_effort_moves: result.log.moves.iter().filter(|m| m.best_effort).count(),
        elapsed_ms,
        status,
    };
    Ok(Solved {
        report,
        log: result.log,
        collection: result.collection,
    })
}
