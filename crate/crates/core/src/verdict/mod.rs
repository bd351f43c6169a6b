//! Fusion of backend findings into per-side verdicts, and the blob plan derived from them.

mod blobs;
mod classify;
mod finding;

pub use blobs::{plan_blobs, BlobKind, BlobPlan, PlanConfig, PlanEntry};
pub use classify::{
    classify, fuse, BackendConflict, Fused, FusedQuadrant, Overall, QuadState, SideVerdict, Status, Verdict,
    VerdictConfig, DEFAULT_TRIALS_FLOOR,
};
pub use finding::{Backend, BackendFinding, Implication, QuadrantStatus};
