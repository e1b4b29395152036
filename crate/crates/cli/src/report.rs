//! Check reports and their serialization.

use rmx_core::skew::{SpecConfig, Witness};
use serde::{Deserialize, Serialize};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum CheckVerdict {
    /// Exact check passed.
    Pass,
    /// Randomized check passed on every trial.
    ProbablyPass { trials: u32, root_orders: Vec<u64> },
    /// Check failed; carries a replayable witness when the randomized oracle
    /// produced one.
    Fail {
        detail: String,
        witness: Option<Box<Witness>>,
    },
    /// The check could not be executed.
    Error { detail: String },
}

impl CheckVerdict {
    pub fn ok(&self) -> bool {
        matches!(self, CheckVerdict::Pass | CheckVerdict::ProbablyPass { .. })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    pub subject: String,
    pub verdict: CheckVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub artifact_version: String,
    pub suite: String,
    pub seed: u64,
    pub oracle: SpecConfig,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.verdict.ok())
    }

    /// Stable JSON rendering. Timing is stripped unless requested so that
    /// identical runs emit identical bytes.
    pub fn to_json(&self, with_timing: bool) -> String {
        let mut copy = self.clone();
        if !with_timing {
            for c in copy.checks.iter_mut() {
                c.wall_ms = None;
            }
        }
        serde_json::to_string_pretty(&copy).expect("report serialization")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "suite {} (artifact {}, seed {})\n",
            self.suite, ARTIFACT_VERSION, self.seed
        ));
        for c in &self.checks {
            let verdict = match &c.verdict {
                CheckVerdict::Pass => "PASS".to_string(),
                CheckVerdict::ProbablyPass { trials, root_orders } => {
                    format!("PROBABLY-PASS (T={}, L={:?})", trials, root_orders)
                }
                CheckVerdict::Fail { detail, .. } => format!("FAIL {}", detail),
                CheckVerdict::Error { detail } => format!("ERROR {}", detail),
            };
            let timing = c
                .wall_ms
                .map(|t| format!(" [{} ms]", t))
                .unwrap_or_default();
            out.push_str(&format!("{:<44} {}{}\n", c.id, verdict, timing));
        }
        let status = if self.all_ok() { "ok" } else { "FAILED" };
        out.push_str(&format!(
            "result: {} ({} checks)\n",
            status,
            self.checks.len()
        ));
        out
    }
}
