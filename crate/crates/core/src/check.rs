//! End-to-end comparison of a model and a student specification.

use serde::{Deserialize, Serialize};

use crate::dsl::Specification;
use crate::eval::{EvalConfig, SplitMix64};
use crate::problem::{Problem, Side};
use crate::random_check::{run_random_check, DEFAULT_TRIALS};
use crate::smt::{run_smt_check, SolverConfig};
use crate::verdict::{classify, fuse, plan_blobs, BackendConflict, BlobPlan, PlanConfig, SideVerdict, Verdict, VerdictConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "camelCase")]
pub struct CheckConfig {
    pub trials: u64,
    pub seed: u64,
    pub eval: EvalConfig,
    /// The solver backend runs only when this is set.
    pub solver: Option<SolverConfig>,
    pub verdict: VerdictConfig,
    pub plan: PlanConfig,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            trials: DEFAULT_TRIALS,
            seed: 0,
            eval: EvalConfig::default(),
            solver: None,
            verdict: VerdictConfig::default(),
            plan: PlanConfig::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CheckError {
    #[error("student signature `{student}` does not match `{model}`")]
    SignatureMismatch { model: String, student: String },
    #[error("{side:?} side: {source}")]
    Conflict { side: Side, source: BackendConflict },
}

/// Everything `check` produces. Serializes deterministically for fixed inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckReport {
    pub seed: u64,
    pub trials: u64,
    pub solver_used: bool,
    pub verdict: Verdict,
    pub plan: BlobPlan,
}

/// Seeds for the pre check, the post check and the blob plan.
fn seeds(seed: u64) -> [u64; 3] {
    let mut rng = SplitMix64::new(seed);
    [seed, rng.next_u64(), rng.next_u64()]
}

pub fn check_side(problem: &Problem, cfg: &CheckConfig, seed: u64) -> Result<SideVerdict, BackendConflict> {
    let (random, smt) = std::thread::scope(|scope| {
        let smt = cfg.solver.as_ref().map(|s| scope.spawn(move || run_smt_check(problem, s, &cfg.eval)));
        let random = run_random_check(problem, &cfg.eval, cfg.trials, seed);
        (random, smt.map(|h| h.join().expect("solver thread panicked")))
    });
    let mut findings = vec![random.to_finding()];
    findings.extend(smt.map(|r| r.finding));
    Ok(classify(fuse(&findings, &cfg.verdict)?))
}

/// Compares pre-conditions and post-conditions separately (in parallel), then plans blobs.
pub fn check_specs(model: &Specification, student: &Specification, cfg: &CheckConfig) -> Result<CheckReport, CheckError> {
    if model.signature != student.signature {
        return Err(CheckError::SignatureMismatch {
            model: model.signature.to_string(),
            student: student.signature.to_string(),
        });
    }
    let [pre_seed, post_seed, plan_seed] = seeds(cfg.seed);
    let pre_problem = Problem::pre(model, student);
    let post_problem = Problem::post(model, student);
    let (pre, post) = std::thread::scope(|scope| {
        let pre = scope.spawn(|| check_side(&pre_problem, cfg, pre_seed));
        let post = check_side(&post_problem, cfg, post_seed);
        (pre.join().expect("check thread panicked"), post)
    });
    let pre = pre.map_err(|source| CheckError::Conflict { side: Side::Input, source })?;
    let post = post.map_err(|source| CheckError::Conflict { side: Side::Output, source })?;
    let plan = plan_blobs(&pre, &post, &cfg.plan, plan_seed);
    Ok(CheckReport {
        seed: cfg.seed,
        trials: cfg.trials,
        solver_used: cfg.solver.is_some(),
        verdict: Verdict::new(pre, post),
        plan,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_checked;
    use crate::verdict::Status;

    const GET_MAX: &str = "method getMax(a: int[]) -> int;
        pre(a != null);
        pre(a.length > 0);
        post(exists(a, i -> a[i] == retval));
        post(forall(a, i -> a[i] <= retval));";

    #[test]
    fn reflexive_and_deterministic() {
        let m = parse_checked(GET_MAX).unwrap();
        let cfg = CheckConfig { seed: 42, ..Default::default() };
        let r1 = check_specs(&m, &m, &cfg).unwrap();
        assert_eq!(r1.verdict.pre.status, Status::Equivalent);
        assert_eq!(r1.verdict.post.status, Status::Equivalent);
        let r2 = check_specs(&m, &m, &cfg).unwrap();
        assert_eq!(serde_json::to_string(&r1).unwrap(), serde_json::to_string(&r2).unwrap());
    }

    #[test]
    fn signature_mismatch() {
        let m = parse_checked(GET_MAX).unwrap();
        let s = parse_checked("method getMax(a: long[]) -> int;").unwrap();
        assert!(matches!(check_specs(&m, &s, &CheckConfig::default()), Err(CheckError::SignatureMismatch { .. })));
    }
}
