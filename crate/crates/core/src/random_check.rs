//! Randomized comparison of a model and a student formula.
//!
//! Shared clauses are split off first and evaluated once per trial, then each trial
//! classifies one random assignment into a [`Quadrant`]. Random testing can observe a
//! quadrant but never rule one out.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::dsl::{conjoin, conjuncts, normalize, Expr};
use crate::eval::{evaluate, gen_assignment, Assignment, EvalConfig, EvalResult};
use crate::problem::{Problem, Quadrant};
use crate::verdict::{Backend, BackendFinding, Implication, QuadrantStatus};

pub const DEFAULT_TRIALS: u64 = 2000;
/// Witnesses kept per quadrant.
pub const WITNESS_CAP: usize = 4;
/// Attempts allowed per requested trial before giving up on filling the quota.
pub const RETRY_FACTOR: u64 = 50;

/// Result of [`eliminate_common_clauses`].
#[derive(Debug, Clone, PartialEq)]
pub struct ClauseSplit {
    /// Clauses present (up to normalization) on both sides.
    pub common: Vec<Expr>,
    pub m_rest: Vec<Expr>,
    pub s_rest: Vec<Expr>,
}

fn pieces(clauses: &[Expr]) -> Vec<(Expr, Expr)> {
    let mut out = Vec::new();
    for c in clauses {
        let parts = conjuncts(&normalize(c));
        if parts.len() == 1 {
            out.push((c.clone(), parts.into_iter().next().unwrap()));
        } else {
            out.extend(parts.into_iter().map(|p| (p.clone(), p)));
        }
    }
    out
}

/// Removes clause pairs that normalize to the same expression, matched greedily one to
/// one in order. Clauses that normalize to a conjunction are split first.
///
/// The model is equivalent to `common && m_rest` and the student to `common && s_rest`.
/// Comparing `m_rest` with `s_rest` alone is only valid where `common` holds; callers
/// keep `common` as a guard.
pub fn eliminate_common_clauses(m: &[Expr], s: &[Expr]) -> ClauseSplit {
    let mut s_left: Vec<Option<(Expr, Expr)>> = pieces(s).into_iter().map(Some).collect();
    let mut split = ClauseSplit { common: Vec::new(), m_rest: Vec::new(), s_rest: Vec::new() };
    for (orig, norm) in pieces(m) {
        let hit = s_left.iter_mut().find(|slot| matches!(slot, Some((_, n)) if *n == norm));
        match hit {
            Some(slot) => {
                slot.take();
                split.common.push(orig);
            }
            None => split.m_rest.push(orig),
        }
    }
    split.s_rest = s_left.into_iter().flatten().map(|(orig, _)| orig).collect();
    split
}

/// Equality ignores `elapsed`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RandomCheckReport {
    /// Requested number of decisive trials.
    pub trials: u64,
    /// Assignments generated, including rejected and undecided ones.
    pub attempts: u64,
    /// Trials where at least one side had a definite value.
    pub decisive: u64,
    /// Trials where both sides were undefined; these are not counted in any quadrant.
    pub undecided: u64,
    /// Assignments discarded because they violated the assumption.
    pub rejected: u64,
    pub counts: BTreeMap<Quadrant, u64>,
    pub witnesses: BTreeMap<Quadrant, Vec<Assignment>>,
    /// Decisive trials in which a quantifier was cut off.
    pub approx_trials: u64,
    pub eliminated_clauses: usize,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl PartialEq for RandomCheckReport {
    fn eq(&self, o: &Self) -> bool {
        (self.trials, self.attempts, self.decisive, self.undecided, self.rejected, self.approx_trials)
            == (o.trials, o.attempts, o.decisive, o.undecided, o.rejected, o.approx_trials)
            && self.eliminated_clauses == o.eliminated_clauses
            && self.counts == o.counts
            && self.witnesses == o.witnesses
    }
}

impl RandomCheckReport {
    pub fn count(&self, q: Quadrant) -> u64 {
        self.counts.get(&q).copied().unwrap_or(0)
    }

    /// No assignment distinguished the two formulas.
    pub fn no_counterexample(&self) -> bool {
        self.count(Quadrant::MnS) == 0 && self.count(Quadrant::NMS) == 0
    }

    pub fn to_finding(&self) -> BackendFinding {
        report_to_finding(self)
    }
}

/// Runs up to `trials` decisive trials. Trial attempt `i` uses the assignment generated
/// from `seed ^ i`; attempts stop after `RETRY_FACTOR * trials`.
pub fn run_random_check(problem: &Problem, cfg: &EvalConfig, trials: u64, seed: u64) -> RandomCheckReport {
    let started = Instant::now();
    let split = eliminate_common_clauses(&problem.model, &problem.student);
    let common = conjoin(&split.common);
    let m_rest = conjoin(&split.m_rest);
    let s_rest = conjoin(&split.s_rest);
    let with_retval = problem.with_retval();

    let mut report = RandomCheckReport {
        trials,
        attempts: 0,
        decisive: 0,
        undecided: 0,
        rejected: 0,
        counts: Quadrant::ALL.iter().map(|q| (*q, 0)).collect(),
        witnesses: BTreeMap::new(),
        approx_trials: 0,
        eliminated_clauses: split.common.len(),
        elapsed: Duration::ZERO,
    };
    let budget = trials.saturating_mul(RETRY_FACTOR);
    while report.decisive < trials && report.attempts < budget {
        let a = gen_assignment(&problem.signature, with_retval, cfg, seed ^ report.attempts);
        report.attempts += 1;
        if let Some(assume) = &problem.assume {
            if !evaluate(assume, &a, cfg).holds() {
                report.rejected += 1;
                continue;
            }
        }
        let c = evaluate(&common, &a, cfg);
        let (m, s) = if c == EvalResult::False {
            (c, c)
        } else {
            (c.and(evaluate(&m_rest, &a, cfg)), c.and(evaluate(&s_rest, &a, cfg)))
        };
        if m.is_undefined() && s.is_undefined() {
            report.undecided += 1;
            continue;
        }
        report.decisive += 1;
        if m.is_approx() || s.is_approx() {
            report.approx_trials += 1;
        }
        let q = Quadrant::of(m.holds(), s.holds());
        *report.counts.get_mut(&q).unwrap() += 1;
        let stored = report.witnesses.entry(q).or_default();
        if stored.len() < WITNESS_CAP {
            stored.push(a);
        }
    }
    report.elapsed = started.elapsed();
    tracing::debug!(
        side = ?problem.side,
        decisive = report.decisive,
        attempts = report.attempts,
        counts = ?report.counts,
        "random check finished"
    );
    report
}

/// Observed quadrants become `Sat` with the first stored witness; the rest stay
/// `Unknown`. Implications are only ever refuted here; proving them from the absence of
/// counterexamples is left to fusion, which knows the trial floor.
pub fn report_to_finding(r: &RandomCheckReport) -> BackendFinding {
    let quadrants = Quadrant::ALL
        .iter()
        .map(|&q| {
            let status = if r.count(q) > 0 {
                QuadrantStatus::Sat { witnesses: r.witnesses.get(&q).cloned().unwrap_or_default() }
            } else {
                QuadrantStatus::Unknown { reason: None }
            };
            (q, status)
        })
        .collect();
    let refute = |q: Quadrant| match r.witnesses.get(&q).and_then(|w| w.first()) {
        Some(w) => Implication::Refuted { witness: Some(w.clone()) },
        None => Implication::Unknown,
    };
    BackendFinding {
        source: Backend::Random,
        quadrants,
        s_imp_m: refute(Quadrant::NMS),
        m_imp_s: refute(Quadrant::MnS),
        decisive_trials: r.decisive,
        script_hash: None,
    }
}
