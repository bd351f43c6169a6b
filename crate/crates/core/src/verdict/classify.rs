use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::finding::{Backend, BackendFinding, Implication, QuadrantStatus};
use crate::eval::Assignment;
use crate::problem::Quadrant;

/// Decisive random trials needed before the absence of counterexamples counts as an
/// (unproved) implication.
pub const DEFAULT_TRIALS_FLOOR: u64 = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "camelCase")]
pub struct VerdictConfig {
    pub trials_floor: u64,
}

impl Default for VerdictConfig {
    fn default() -> Self {
        VerdictConfig { trials_floor: DEFAULT_TRIALS_FLOOR }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum QuadState {
    Sat,
    Unsat,
    Unknown,
}

impl From<&QuadrantStatus> for QuadState {
    fn from(s: &QuadrantStatus) -> Self {
        match s {
            QuadrantStatus::Sat { .. } => QuadState::Sat,
            QuadrantStatus::Unsat => QuadState::Unsat,
            QuadrantStatus::Unknown { .. } => QuadState::Unknown,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FusedQuadrant {
    pub status: QuadState,
    /// Solver witnesses first, then random ones in trial order.
    pub witnesses: Vec<Assignment>,
    /// `witnesses` rendered as `name = literal` lists.
    pub rendered: Vec<String>,
    pub decided_by: Option<Backend>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fused {
    pub quadrants: BTreeMap<Quadrant, FusedQuadrant>,
    pub s_imp_m: Implication,
    pub m_imp_s: Implication,
    pub trace: BTreeMap<Backend, BTreeMap<Quadrant, QuadState>>,
}

/// A solver proved a quadrant empty that another backend has a witness for.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("backend conflict on quadrant {quadrant}: sat with witness {witness:?}, unsat by solver (script {script_hash:?})")]
pub struct BackendConflict {
    pub quadrant: Quadrant,
    pub witness: Option<Assignment>,
    pub script_hash: Option<String>,
}

/// Combines backend findings quadrant by quadrant: any `Sat` wins, then a solver
/// `Unsat`, otherwise `Unknown`.
pub fn fuse(findings: &[BackendFinding], cfg: &VerdictConfig) -> Result<Fused, BackendConflict> {
    let mut ordered: Vec<&BackendFinding> = findings.iter().collect();
    ordered.sort_by_key(|f| f.source != Backend::Smt);

    let mut quadrants = BTreeMap::new();
    for q in Quadrant::ALL {
        let mut witnesses = Vec::new();
        let mut sat_by = None;
        let mut unsat_by: Option<&BackendFinding> = None;
        for f in &ordered {
            match f.quadrant(q) {
                QuadrantStatus::Sat { witnesses: w } => {
                    sat_by.get_or_insert(f.source);
                    witnesses.extend(w.iter().cloned());
                }
                QuadrantStatus::Unsat if f.source == Backend::Smt => unsat_by = unsat_by.or(Some(f)),
                _ => {}
            }
        }
        if let (Some(_), Some(smt)) = (sat_by, unsat_by) {
            return Err(BackendConflict {
                quadrant: q,
                witness: witnesses.first().cloned(),
                script_hash: smt.script_hash.clone(),
            });
        }
        let (status, decided_by) = match (sat_by, unsat_by) {
            (Some(b), _) => (QuadState::Sat, Some(b)),
            (None, Some(_)) => (QuadState::Unsat, Some(Backend::Smt)),
            (None, None) => (QuadState::Unknown, None),
        };
        let rendered = witnesses.iter().map(|w| w.to_string()).collect();
        quadrants.insert(q, FusedQuadrant { status, witnesses, rendered, decided_by });
    }

    let implication = |q: Quadrant| {
        let fq = &quadrants[&q];
        match fq.status {
            QuadState::Sat => Implication::Refuted { witness: fq.witnesses.first().cloned() },
            QuadState::Unsat => Implication::Valid { proved: true },
            QuadState::Unknown => {
                let enough = findings
                    .iter()
                    .any(|f| f.source == Backend::Random && f.decisive_trials >= cfg.trials_floor);
                if enough {
                    Implication::Valid { proved: false }
                } else {
                    Implication::Unknown
                }
            }
        }
    };
    let s_imp_m = implication(Quadrant::NMS);
    let m_imp_s = implication(Quadrant::MnS);

    let mut trace: BTreeMap<Backend, BTreeMap<Quadrant, QuadState>> = BTreeMap::new();
    for f in findings {
        let row = trace.entry(f.source).or_default();
        for q in Quadrant::ALL {
            let s = QuadState::from(f.quadrant(q));
            let cell = row.entry(q).or_insert(s);
            if s != QuadState::Unknown {
                *cell = s;
            }
        }
    }
    Ok(Fused { quadrants, s_imp_m, m_imp_s, trace })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Status {
    Equivalent,
    /// The student's formula implies the model's but not conversely.
    TooStrong,
    /// The model's formula implies the student's but not conversely.
    TooWeak,
    /// Neither implies the other.
    Incomparable,
    /// One implication is refuted and the other is unresolved.
    NotEquivalent,
    Undetermined,
}

impl Status {
    pub fn is_refutation(self) -> bool {
        matches!(self, Status::TooStrong | Status::TooWeak | Status::Incomparable | Status::NotEquivalent)
    }
}

/// Verdict for the pre-conditions or for the post-conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SideVerdict {
    pub status: Status,
    /// Every implication the status rests on was proved by a solver.
    pub proved: bool,
    pub s_imp_m: Implication,
    pub m_imp_s: Implication,
    pub quadrants: BTreeMap<Quadrant, FusedQuadrant>,
    pub backend_trace: BTreeMap<Backend, BTreeMap<Quadrant, QuadState>>,
}

impl SideVerdict {
    pub fn quadrant(&self, q: Quadrant) -> &FusedQuadrant {
        &self.quadrants[&q]
    }

    pub fn is_sat(&self, q: Quadrant) -> bool {
        self.quadrant(q).status == QuadState::Sat
    }
}

pub fn classify(fused: Fused) -> SideVerdict {
    let proved = |i: &Implication| matches!(i, Implication::Valid { proved: true } | Implication::Refuted { .. });
    let (sm, ms) = (&fused.s_imp_m, &fused.m_imp_s);
    let status = match (sm.is_valid(), ms.is_valid(), sm.is_refuted(), ms.is_refuted()) {
        (true, true, ..) => Status::Equivalent,
        (true, _, _, true) => Status::TooStrong,
        (_, true, true, _) => Status::TooWeak,
        (_, _, true, true) => Status::Incomparable,
        (_, _, true, _) | (_, _, _, true) => Status::NotEquivalent,
        _ => Status::Undetermined,
    };
    let proved = match status {
        Status::Equivalent | Status::TooStrong | Status::TooWeak | Status::Incomparable => {
            proved(sm) && proved(ms)
        }
        Status::NotEquivalent => true,
        Status::Undetermined => false,
    };
    SideVerdict {
        status,
        proved,
        s_imp_m: fused.s_imp_m,
        m_imp_s: fused.m_imp_s,
        quadrants: fused.quadrants,
        backend_trace: fused.trace,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Overall {
    Equivalent,
    NotEquivalent,
    Undetermined,
}

/// Pre- and post-condition verdicts; the two sides are never merged into one score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Verdict {
    pub overall: Overall,
    pub pre: SideVerdict,
    pub post: SideVerdict,
}

impl Verdict {
    pub fn new(pre: SideVerdict, post: SideVerdict) -> Verdict {
        let overall = if pre.status.is_refutation() || post.status.is_refutation() {
            Overall::NotEquivalent
        } else if pre.status == Status::Equivalent && post.status == Status::Equivalent {
            Overall::Equivalent
        } else {
            Overall::Undetermined
        };
        Verdict { overall, pre, post }
    }

    pub fn side(&self, side: crate::problem::Side) -> &SideVerdict {
        match side {
            crate::problem::Side::Input => &self.pre,
            crate::problem::Side::Output => &self.post,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::Value;

    fn w(x: i64) -> Assignment {
        Assignment::new().with("x", Value::Int(x))
    }

    fn finding(source: Backend, qs: [(Quadrant, QuadrantStatus); 4], trials: u64) -> BackendFinding {
        BackendFinding {
            source,
            quadrants: qs.into_iter().collect(),
            s_imp_m: Implication::Unknown,
            m_imp_s: Implication::Unknown,
            decisive_trials: trials,
            script_hash: Some("abc".into()),
        }
    }

    fn sat(x: i64) -> QuadrantStatus {
        QuadrantStatus::Sat { witnesses: vec![w(x)] }
    }

    fn unknown() -> QuadrantStatus {
        QuadrantStatus::Unknown { reason: None }
    }

    use Quadrant::*;

    #[test]
    fn sat_beats_unknown_and_unsat_beats_unknown() {
        let random = finding(Backend::Random, [(MS, sat(1)), (MnS, unknown()), (NMS, sat(0)), (NMnS, sat(-1))], 10);
        let smt = finding(Backend::Smt, [(MS, unknown()), (MnS, QuadrantStatus::Unsat), (NMS, unknown()), (NMnS, unknown())], 0);
        let f = fuse(&[random, smt], &VerdictConfig::default()).unwrap();
        assert_eq!(f.quadrants[&NMS].status, QuadState::Sat);
        assert_eq!(f.quadrants[&NMS].decided_by, Some(Backend::Random));
        assert_eq!(f.quadrants[&MnS].status, QuadState::Unsat);
        let v = classify(f);
        assert_eq!(v.status, Status::TooWeak);
        assert!(v.proved);
        assert_eq!(v.quadrant(NMS).rendered, vec!["x = 0".to_string()]);
    }

    #[test]
    fn sat_against_solver_unsat_is_a_conflict() {
        let random = finding(Backend::Random, [(MS, sat(1)), (MnS, unknown()), (NMS, unknown()), (NMnS, unknown())], 10);
        let smt = finding(Backend::Smt, [(MS, QuadrantStatus::Unsat), (MnS, unknown()), (NMS, unknown()), (NMnS, unknown())], 0);
        let err = fuse(&[random, smt], &VerdictConfig::default()).unwrap_err();
        assert_eq!(err.quadrant, MS);
        assert_eq!(err.witness, Some(w(1)));
        assert_eq!(err.script_hash.as_deref(), Some("abc"));
    }

    #[test]
    fn random_evidence_needs_the_floor() {
        let qs = || [(MS, sat(1)), (MnS, unknown()), (NMS, unknown()), (NMnS, sat(0))];
        let few = classify(fuse(&[finding(Backend::Random, qs(), 1999)], &VerdictConfig::default()).unwrap());
        assert_eq!(few.status, Status::Undetermined);
        let many = classify(fuse(&[finding(Backend::Random, qs(), 2000)], &VerdictConfig::default()).unwrap());
        assert_eq!(many.status, Status::Equivalent);
        assert!(!many.proved);
    }

    #[test]
    fn all_classifications() {
        let cfg = VerdictConfig { trials_floor: 0 };
        let run = |mns: QuadrantStatus, nms: QuadrantStatus, trials: u64| {
            classify(fuse(&[finding(Backend::Random, [(MS, unknown()), (MnS, mns), (NMS, nms), (NMnS, unknown())], trials)], &cfg).unwrap())
                .status
        };
        assert_eq!(run(sat(1), sat(2), 5), Status::Incomparable);
        assert_eq!(run(sat(1), unknown(), 5), Status::TooStrong);
        let strict = VerdictConfig { trials_floor: 100 };
        let nf = |mns, nms| {
            classify(fuse(&[finding(Backend::Random, [(MS, unknown()), (MnS, mns), (NMS, nms), (NMnS, unknown())], 5)], &strict).unwrap())
                .status
        };
        assert_eq!(nf(sat(1), unknown()), Status::NotEquivalent);
        assert_eq!(nf(unknown(), unknown()), Status::Undetermined);
        let proof = finding(Backend::Smt, [(MS, sat(3)), (MnS, QuadrantStatus::Unsat), (NMS, QuadrantStatus::Unsat), (NMnS, sat(-3))], 0);
        let v = classify(fuse(&[proof], &strict).unwrap());
        assert_eq!(v.status, Status::Equivalent);
        assert!(v.proved);
    }

    #[test]
    fn overall_outcome() {
        let mk = |s| SideVerdict {
            status: s,
            proved: false,
            s_imp_m: Implication::Unknown,
            m_imp_s: Implication::Unknown,
            quadrants: BTreeMap::new(),
            backend_trace: BTreeMap::new(),
        };
        assert_eq!(Verdict::new(mk(Status::Equivalent), mk(Status::Equivalent)).overall, Overall::Equivalent);
        assert_eq!(Verdict::new(mk(Status::Equivalent), mk(Status::TooWeak)).overall, Overall::NotEquivalent);
        assert_eq!(Verdict::new(mk(Status::Undetermined), mk(Status::TooWeak)).overall, Overall::NotEquivalent);
        assert_eq!(Verdict::new(mk(Status::Equivalent), mk(Status::Undetermined)).overall, Overall::Undetermined);
    }
}
