//! Solver backend: formulas become SMT-LIB v2 scripts that an external solver decides.
//!
//! Each query runs in its own solver process fed over stdin. The first response is the
//! status; on `sat` the model is read back with `(get-value ...)` and rebuilt into an
//! [`Assignment`].

mod encode;
mod model;
mod process;
pub mod sexpr;

use std::collections::BTreeMap;
use std::process::{Command, Stdio};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use encode::{encode, Bounds, EncodeError, EncodeOptions, Goal, SmtEncoding};

use crate::dsl::{conjoin, Expr, Signature};
use crate::eval::{evaluate, Assignment, EvalConfig, Value};
use crate::problem::{Problem, Quadrant};
use crate::random_check::eliminate_common_clauses;
use crate::verdict::{Backend, BackendFinding, Implication, QuadrantStatus};
use encode::Encoder;
use process::Session;

/// Config keys (section `[solver]`): `path`, `timeoutMs`, `extraArgs`, `lmax`,
/// `modelCap`, `bounds`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "camelCase")]
pub struct SolverConfig {
    pub path: String,
    /// Wall-clock limit per query, including model extraction.
    pub timeout_ms: u64,
    pub extra_args: Vec<String>,
    /// Upper bound on array lengths in encodings.
    pub lmax: u64,
    /// Most array elements materialized from one model.
    pub model_cap: usize,
    pub bounds: Option<Bounds>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            path: "z3".into(),
            timeout_ms: 5000,
            extra_args: vec!["-in".into()],
            lmax: 1_000_000,
            model_cap: 4096,
            bounds: None,
        }
    }
}

impl SolverConfig {
    pub fn encode_options(&self, real_eq_epsilon: f64) -> EncodeOptions {
        EncodeOptions { lmax: self.lmax, bounds: self.bounds.clone(), real_eq_epsilon }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum UnknownReason {
    Timeout,
    SolverUnknown,
    Unsupported,
    ProcessError,
}

impl UnknownReason {
    pub fn name(self) -> &'static str {
        match self {
            UnknownReason::Timeout => "timeout",
            UnknownReason::SolverUnknown => "solverUnknown",
            UnknownReason::Unsupported => "unsupported",
            UnknownReason::ProcessError => "processError",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SmtStatus {
    /// Satisfiable; the model is absent when it could not be materialized.
    Sat(Option<Assignment>),
    Unsat,
    Unknown(UnknownReason),
}

#[derive(Debug, thiserror::Error)]
pub enum SmtError {
    #[error("cannot start solver `{path}`: {source}")]
    Spawn { path: String, source: std::io::Error },
    #[error("solver protocol error: {0}")]
    Protocol(String),
    #[error("solver timed out")]
    Timeout,
    #[error(transparent)]
    Encode(#[from] EncodeError),
}

impl SmtError {
    pub fn reason(&self) -> UnknownReason {
        match self {
            SmtError::Timeout => UnknownReason::Timeout,
            SmtError::Encode(_) => UnknownReason::Unsupported,
            _ => UnknownReason::ProcessError,
        }
    }
}

/// Whether the configured solver binary can be started.
pub fn solver_available(cfg: &SolverConfig) -> bool {
    Command::new(&cfg.path)
        .arg("--version")
        .stdin(Stdio::null())
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .status()
        .map(|s| s.success())
        .unwrap_or(false)
}

/// Runs one script. Timeouts become `Unknown(Timeout)`; other failures are errors.
pub fn run_script(script: &str, vars: &[(String, crate::dsl::Type)], cfg: &SolverConfig) -> Result<SmtStatus, SmtError> {
    if cfg.timeout_ms == 0 {
        return Ok(SmtStatus::Unknown(UnknownReason::Timeout));
    }
    let mut sess = Session::start(cfg)?;
    let result = (|| {
        sess.send(script)?;
        let status = sess.read()?;
        match status.atom() {
            Some("unsat") => Ok(SmtStatus::Unsat),
            Some("unknown") => Ok(SmtStatus::Unknown(UnknownReason::SolverUnknown)),
            Some("sat") => Ok(SmtStatus::Sat(model::read_model(&mut sess, vars, cfg.model_cap)?)),
            _ => Err(SmtError::Protocol(format!("unexpected status {status}"))),
        }
    })();
    match result {
        Err(SmtError::Timeout) => Ok(SmtStatus::Unknown(UnknownReason::Timeout)),
        other => other,
    }
}

/// Decides the conjunction of `goals` over the variables of `sig`. Returns the status and
/// the script that was sent.
pub fn check_goals(
    goals: &[Goal],
    sig: &Signature,
    need_retval: bool,
    cfg: &SolverConfig,
    real_eq_epsilon: f64,
) -> Result<(SmtStatus, String), SmtError> {
    let opts = cfg.encode_options(real_eq_epsilon);
    let mut enc = Encoder::new(sig, need_retval, &opts);
    let script = enc.script(goals)?.script;
    let status = run_script(&script, enc.variables(), cfg)?;
    Ok((status, script))
}

/// Is there an assignment on which `e` evaluates to true?
pub fn check_sat(e: &Expr, sig: &Signature, need_retval: bool, cfg: &SolverConfig) -> Result<SmtStatus, SmtError> {
    let eps = EvalConfig::default().real_eq_epsilon;
    check_goals(&[Goal::Holds(e.clone())], sig, need_retval, cfg, eps).map(|(s, _)| s)
}

/// Searches for a counterexample to `p => q`: an assignment where `p` holds and `q`
/// does not (an undefined `q` counts as not holding). `Unsat` means the implication is
/// valid.
pub fn check_implication(p: &Expr, q: &Expr, sig: &Signature, need_retval: bool, cfg: &SolverConfig) -> Result<SmtStatus, SmtError> {
    let eps = EvalConfig::default().real_eq_epsilon;
    let goals = [Goal::Holds(p.clone()), Goal::NotHolds(q.clone())];
    check_goals(&goals, sig, need_retval, cfg, eps).map(|(s, _)| s)
}

/// Goals whose solutions are exactly the assignments falling into quadrant `q`, given
/// the clause split. Pairs on which both formulas are undefined belong to no quadrant.
pub fn quadrant_goals(problem: &Problem, q: Quadrant) -> Vec<Goal> {
    let split = eliminate_common_clauses(&problem.model, &problem.student);
    let mut goals: Vec<Goal> = problem.assume.iter().cloned().map(Goal::Holds).collect();
    let (common, m, s) = (conjoin(&split.common), conjoin(&split.m_rest), conjoin(&split.s_rest));
    match q {
        Quadrant::NMnS => {
            let (fm, fs) = (problem.model_expr(), problem.student_expr());
            goals.push(Goal::NotHolds(fm.clone()));
            goals.push(Goal::NotHolds(fs.clone()));
            goals.push(Goal::AnyFalse(vec![fm, fs]));
        }
        _ => {
            goals.push(Goal::Holds(common));
            goals.push(if q.m() { Goal::Holds(m) } else { Goal::NotHolds(m) });
            goals.push(if q.s() { Goal::Holds(s) } else { Goal::NotHolds(s) });
        }
    }
    goals
}

/// Whether `w` falls into quadrant `q` for `problem` under the evaluator.
pub fn witness_in_quadrant(problem: &Problem, q: Quadrant, w: &Assignment, cfg: &EvalConfig) -> bool {
    let cfg = EvalConfig { quant_bound: cfg.quant_bound.max(longest_array(w)), ..cfg.clone() };
    if w.check_shape(&problem.signature.variables(problem.with_retval())).is_err() {
        return false;
    }
    if let Some(a) = &problem.assume {
        if !evaluate(a, w, &cfg).holds() {
            return false;
        }
    }
    let m = evaluate(&problem.model_expr(), w, &cfg);
    let s = evaluate(&problem.student_expr(), w, &cfg);
    !(m.is_undefined() && s.is_undefined()) && Quadrant::of(m.holds(), s.holds()) == q
}

fn longest_array(a: &Assignment) -> usize {
    fn walk(v: &Value) -> usize {
        match v {
            Value::Array(items) => items.iter().map(walk).max().unwrap_or(0).max(items.len()),
            _ => 0,
        }
    }
    a.0.values().map(walk).max().unwrap_or(0)
}

/// Per-quadrant solver answers for one problem.
#[derive(Debug, Clone)]
pub struct SmtCheckReport {
    pub statuses: BTreeMap<Quadrant, SmtStatus>,
    pub scripts: BTreeMap<Quadrant, String>,
    pub finding: BackendFinding,
}

/// Asks the solver about all four quadrants concurrently and turns the answers into a
/// finding. Models that do not re-evaluate into their quadrant are dropped with a warning.
pub fn run_smt_check(problem: &Problem, cfg: &SolverConfig, eval: &EvalConfig) -> SmtCheckReport {
    let results: Vec<(Quadrant, SmtStatus, String)> = std::thread::scope(|scope| {
        let handles: Vec<_> = Quadrant::ALL
            .iter()
            .map(|&q| {
                scope.spawn(move || {
                    let goals = quadrant_goals(problem, q);
                    let (status, script) =
                        match check_goals(&goals, &problem.signature, problem.with_retval(), cfg, eval.real_eq_epsilon) {
                            Ok(r) => r,
                            Err(e) => {
                                tracing::warn!(quadrant = %q, error = %e, "solver query failed");
                                (SmtStatus::Unknown(e.reason()), String::new())
                            }
                        };
                    (q, status, script)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("solver thread panicked")).collect()
    });

    let mut hasher = Sha256::new();
    let mut statuses = BTreeMap::new();
    let mut scripts = BTreeMap::new();
    let mut quadrants = BTreeMap::new();
    for (q, status, script) in results {
        hasher.update(script.as_bytes());
        let qs = match &status {
            SmtStatus::Sat(model) => {
                let witnesses = match model {
                    Some(w) if witness_in_quadrant(problem, q, w, eval) => vec![w.clone()],
                    Some(w) => {
                        tracing::warn!(quadrant = %q, model = %w, "solver model does not re-evaluate into its quadrant");
                        Vec::new()
                    }
                    None => Vec::new(),
                };
                QuadrantStatus::Sat { witnesses }
            }
            SmtStatus::Unsat => QuadrantStatus::Unsat,
            SmtStatus::Unknown(r) => QuadrantStatus::Unknown { reason: Some(r.name().into()) },
        };
        quadrants.insert(q, qs);
        statuses.insert(q, status);
        scripts.insert(q, script);
    }
    let implication = |q: Quadrant| match &quadrants[&q] {
        QuadrantStatus::Sat { witnesses } => Implication::Refuted { witness: witnesses.first().cloned() },
        QuadrantStatus::Unsat => Implication::Valid { proved: true },
        QuadrantStatus::Unknown { .. } => Implication::Unknown,
    };
    let finding = BackendFinding {
        source: Backend::Smt,
        s_imp_m: implication(Quadrant::NMS),
        m_imp_s: implication(Quadrant::MnS),
        quadrants,
        decisive_trials: 0,
        script_hash: Some(hex::encode(hasher.finalize())),
    };
    SmtCheckReport { statuses, scripts, finding }
}
