//! Machine-readable run records emitted by the CLI.

use serde::{Deserialize, Serialize};

use crate::kernel::KernelConfig;
use crate::master::{SolveResult, SolveStatus, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Benders,
    Kernel,
    Brute,
}

impl std::fmt::Display for Algo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Algo::Benders => write!(f, "benders"),
            Algo::Kernel => write!(f, "kernel"),
            Algo::Brute => write!(f, "brute"),
        }
    }
}

/// Snapshot of the configuration a run used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigSnapshot {
    pub solver: SolverConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelConfig>,
}

/// One solver run: identity, configuration, outcome, environment stamp.
/// Serializing and re-parsing yields an equal record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub algorithm: Algo,
    pub config: ConfigSnapshot,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    pub n_nodes: u64,
    pub n_cuts: u64,
    pub wall_time_s: f64,
    /// Indices of the open facilities in the incumbent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub open_facilities: Option<Vec<usize>>,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

pub fn status_name(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Optimal => "optimal",
        SolveStatus::GapLimit => "gap-limit",
        SolveStatus::TimeLimit => "time-limit",
        SolveStatus::Infeasible => "infeasible",
    }
}

impl RunRecord {
    pub fn from_solve(
        instance: String,
        algorithm: Algo,
        config: ConfigSnapshot,
        result: &SolveResult,
        seed: Option<u64>,
    ) -> Self {
        let finite = |v: f64| v.is_finite().then_some(v);
        RunRecord {
            instance,
            algorithm,
            config,
            status: status_name(result.status).to_string(),
            cost: finite(result.upper_bound),
            lower_bound: finite(result.lower_bound),
            gap: finite(result.gap),
            n_nodes: result.n_nodes,
            n_cuts: result.n_cuts,
            wall_time_s: result.wall_time,
            open_facilities: result
                .best_y
                .as_ref()
                .map(|y| (0..y.len()).filter(|&i| y[i]).collect()),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
        }
    }

    pub fn has_incumbent(&self) -> bool {
        self.open_facilities.is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::master::SolveResult;

    #[test]
    fn json_round_trip_is_identity() {
        let result = SolveResult {
            status: SolveStatus::Optimal,
            best_y: Some(vec![true, false, true]),
            upper_bound: 12.25,
            lower_bound: 12.25,
            gap: 0.0,
            n_nodes: 5,
            n_cuts: 9,
            wall_time: 0.031_25,
        };
        let rec = RunRecord::from_solve(
            "tiny.fl".into(),
            Algo::Benders,
            ConfigSnapshot {
                solver: SolverConfig::default(),
                kernel: None,
            },
            &result,
            Some(7),
        );
        let text = serde_json::to_string(&rec).unwrap();
        let back: RunRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(rec, back);
        assert_eq!(back.open_facilities, Some(vec![0, 2]));
    }

    #[test]
    fn infinite_bounds_become_absent_fields() {
        let result = SolveResult {
            status: SolveStatus::TimeLimit,
            best_y: None,
            upper_bound: f64::INFINITY,
            lower_bound: 3.0,
            gap: f64::INFINITY,
            n_nodes: 1,
            n_cuts: 0,
            wall_time: 1.0,
        };
        let rec = RunRecord::from_solve(
            "x".into(),
            Algo::Kernel,
            ConfigSnapshot {
                solver: SolverConfig::default(),
                kernel: Some(KernelConfig::default()),
            },
            &result,
            None,
        );
        assert_eq!(rec.cost, None);
        assert_eq!(rec.gap, None);
        assert_eq!(rec.lower_bound, Some(3.0));
        let text = serde_json::to_string(&rec).unwrap();
        let back: RunRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(rec, back);
    }
}
