//! Suite orchestration: named checks run (optionally in parallel) into
//! order-stable reports.

use crate::checks_exact;
use crate::checks_oracle;
use crate::checks_props;
use crate::report::{CheckReport, CheckVerdict, SuiteReport, ARTIFACT_VERSION};
use rayon::prelude::*;
use rmx_core::skew::SpecConfig;
use std::panic::AssertUnwindSafe;
use std::time::Instant;

#[derive(Clone, Debug)]
pub struct SuiteParams {
    pub oracle: SpecConfig,
    pub workers: usize,
    pub timing: bool,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            oracle: SpecConfig::default(),
            workers: 1,
            timing: true,
        }
    }
}

pub struct Check {
    pub id: String,
    pub subject: String,
    pub run: Box<dyn Fn() -> CheckVerdict + Send + Sync>,
}

impl Check {
    pub fn new<F>(id: &str, subject: &str, run: F) -> Self
    where
        F: Fn() -> CheckVerdict + Send + Sync + 'static,
    {
        Check {
            id: id.to_string(),
            subject: subject.to_string(),
            run: Box::new(run),
        }
    }

    /// An exact check: Ok(()) is a pass, Err(detail) a failure.
    pub fn exact<F>(id: &str, subject: &str, run: F) -> Self
    where
        F: Fn() -> Result<(), String> + Send + Sync + 'static,
    {
        Check::new(id, subject, move || match run() {
            Ok(()) => CheckVerdict::Pass,
            Err(detail) => CheckVerdict::Fail {
                detail,
                witness: None,
            },
        })
    }
}

pub fn execute(suite: &str, params: &SuiteParams, checks: Vec<Check>) -> SuiteReport {
    let run_one = |c: &Check| -> CheckReport {
        let start = Instant::now();
        let verdict = match std::panic::catch_unwind(AssertUnwindSafe(|| (c.run)())) {
            Ok(v) => v,
            Err(e) => CheckVerdict::Error {
                detail: panic_text(e),
            },
        };
        CheckReport {
            id: c.id.clone(),
            subject: c.subject.clone(),
            verdict,
            wall_ms: Some(start.elapsed().as_millis() as u64),
        }
    };
    let mut reports: Vec<CheckReport> = if params.workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(params.workers)
            .build()
            .expect("thread pool");
        pool.install(|| checks.par_iter().map(run_one).collect())
    } else {
        checks.iter().map(run_one).collect()
    };
    reports.sort_by(|a, b| a.id.cmp(&b.id));
    SuiteReport {
        artifact_version: ARTIFACT_VERSION.to_string(),
        suite: suite.to_string(),
        seed: params.oracle.seed,
        oracle: params.oracle.clone(),
        checks: reports,
    }
}

fn panic_text(e: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = e.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = e.downcast_ref::<String>() {
        s.clone()
    } else {
        "panicked".to_string()
    }
}

pub const SUITE_NAMES: &[&str] = &[
    "formulas",
    "cluster-r",
    "braid",
    "tropical-y",
    "torus-identities",
    "oracle",
    "structure",
    "properties",
    "all",
];

pub fn run_suite(name: &str, params: &SuiteParams) -> Option<Vec<SuiteReport>> {
    match name {
        "formulas" => Some(vec![execute(
            "formulas",
            params,
            checks_exact::formulas(params),
        )]),
        "cluster-r" => Some(vec![execute(
            "cluster-r",
            params,
            checks_exact::cluster_r(params),
        )]),
        "braid" => Some(vec![execute("braid", params, checks_exact::braid(params))]),
        "tropical-y" => Some(vec![execute(
            "tropical-y",
            params,
            checks_exact::tropical_y(params),
        )]),
        "torus-identities" => Some(vec![execute(
            "torus-identities",
            params,
            checks_exact::torus_identities(params),
        )]),
        "oracle" => Some(vec![execute(
            "oracle",
            params,
            checks_oracle::oracle_suite(params),
        )]),
        "structure" => Some(vec![execute(
            "structure",
            params,
            checks_exact::structure(params),
        )]),
        "properties" => Some(vec![execute(
            "properties",
            params,
            checks_props::properties(params),
        )]),
        "all" => {
            let mut out = Vec::new();
            for s in SUITE_NAMES.iter().filter(|&&s| s != "all") {
                out.extend(run_suite(s, params).unwrap());
            }
            Some(out)
        }
        _ => None,
    }
}
