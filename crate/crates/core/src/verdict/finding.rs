use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::eval::Assignment;
use crate::problem::Quadrant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Backend {
    Random,
    Smt,
}

/// What one backend learned about one quadrant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "camelCase")]
pub enum QuadrantStatus {
    /// Satisfiable. `witnesses` may be empty when a solver reported `sat` but its model
    /// could not be materialized.
    Sat { witnesses: Vec<Assignment> },
    Unsat,
    Unknown {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reason: Option<String>,
    },
}

impl QuadrantStatus {
    pub fn is_sat(&self) -> bool {
        matches!(self, QuadrantStatus::Sat { .. })
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, QuadrantStatus::Unsat)
    }
}

/// Status of an implication such as "S implies M".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "camelCase")]
pub enum Implication {
    /// Holds. `proved` is false when the only evidence is a random run without
    /// counterexamples.
    Valid { proved: bool },
    Refuted {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        witness: Option<Assignment>,
    },
    Unknown,
}

impl Implication {
    pub fn is_valid(&self) -> bool {
        matches!(self, Implication::Valid { .. })
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Implication::Refuted { .. })
    }
}

/// Everything one backend reports for one model/student pair.
///
/// `s_imp_m` is refuted exactly by an `nMS` witness (S holds, M fails) and `m_imp_s` by
/// an `MnS` witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BackendFinding {
    pub source: Backend,
    pub quadrants: BTreeMap<Quadrant, QuadrantStatus>,
    pub s_imp_m: Implication,
    pub m_imp_s: Implication,
    /// Decisive random trials behind this finding; zero for solver findings.
    pub decisive_trials: u64,
    /// SHA-256 of the solver scripts, for reproducing a solver answer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub script_hash: Option<String>,
}

impl BackendFinding {
    pub fn quadrant(&self, q: Quadrant) -> &QuadrantStatus {
        const UNKNOWN: &QuadrantStatus = &QuadrantStatus::Unknown { reason: None };
        self.quadrants.get(&q).unwrap_or(UNKNOWN)
    }
}
