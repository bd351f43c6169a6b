use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::classify::{QuadState, SideVerdict};
use crate::eval::{Assignment, SplitMix64};
use crate::problem::{Quadrant, Side};

/// Blob flavour. Red blobs carry data the model rejects, marked blobs carry data the
/// student's scanner rejects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum BlobKind {
    RedUnmarked,
    BlueMarked,
    RedMarked,
    BlueUnmarked,
}

impl BlobKind {
    pub const ALL: [BlobKind; 4] = [BlobKind::RedUnmarked, BlobKind::BlueMarked, BlobKind::RedMarked, BlobKind::BlueUnmarked];

    pub fn of(q: Quadrant) -> BlobKind {
        match q {
            Quadrant::NMS => BlobKind::RedUnmarked,
            Quadrant::MnS => BlobKind::BlueMarked,
            Quadrant::NMnS => BlobKind::RedMarked,
            Quadrant::MS => BlobKind::BlueUnmarked,
        }
    }

    pub fn quadrant(self) -> Quadrant {
        match self {
            BlobKind::RedUnmarked => Quadrant::NMS,
            BlobKind::BlueMarked => Quadrant::MnS,
            BlobKind::RedMarked => Quadrant::NMnS,
            BlobKind::BlueUnmarked => Quadrant::MS,
        }
    }

    pub fn is_red(self) -> bool {
        !self.quadrant().m()
    }

    pub fn is_marked(self) -> bool {
        !self.quadrant().s()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PlanEntry {
    pub kind: BlobKind,
    pub side: Side,
    pub witness: Assignment,
    /// Required by the verdict rather than drawn as filler.
    pub mandatory: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BlobPlan {
    pub entries: Vec<PlanEntry>,
    pub mix: BTreeMap<BlobKind, u32>,
}

impl BlobPlan {
    pub fn has(&self, side: Side, kind: BlobKind) -> bool {
        self.entries.iter().any(|e| e.side == side && e.kind == kind)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "camelCase")]
pub struct PlanConfig {
    /// Filler blobs per lane, on top of the mandatory ones.
    pub fillers_per_side: usize,
    /// Relative weight of each kind when drawing fillers; kinds without a witness are
    /// skipped.
    pub mix: BTreeMap<BlobKind, u32>,
}

impl Default for PlanConfig {
    fn default() -> Self {
        PlanConfig {
            fillers_per_side: 6,
            mix: BTreeMap::from([
                (BlobKind::RedUnmarked, 1),
                (BlobKind::BlueMarked, 1),
                (BlobKind::RedMarked, 2),
                (BlobKind::BlueUnmarked, 2),
            ]),
        }
    }
}

/// Builds the spawn plan: one mandatory blob for each satisfiable discriminating quadrant
/// (`nMS` gives an unmarked red blob, `MnS` a marked blue one), then seeded fillers from
/// every quadrant that has witnesses.
///
/// A quadrant that is `Sat` without any witness cannot spawn a blob.
pub fn plan_blobs(pre: &SideVerdict, post: &SideVerdict, cfg: &PlanConfig, seed: u64) -> BlobPlan {
    let mut rng = SplitMix64::new(seed);
    let mut entries = Vec::new();
    for (side, v) in [(Side::Input, pre), (Side::Output, post)] {
        for q in [Quadrant::NMS, Quadrant::MnS] {
            let fq = v.quadrant(q);
            if fq.status == QuadState::Sat {
                if let Some(w) = fq.witnesses.first() {
                    entries.push(PlanEntry { kind: BlobKind::of(q), side, witness: w.clone(), mandatory: true });
                }
            }
        }
        let pools: Vec<(BlobKind, &[Assignment])> = BlobKind::ALL
            .iter()
            .map(|&k| {
                let fq = v.quadrant(k.quadrant());
                let ws: &[Assignment] = if fq.status == QuadState::Sat { &fq.witnesses } else { &[] };
                (k, ws)
            })
            .collect();
        let weights: Vec<u32> = pools
            .iter()
            .map(|(k, ws)| if ws.is_empty() { 0 } else { cfg.mix.get(k).copied().unwrap_or(0) })
            .collect();
        for _ in 0..cfg.fillers_per_side {
            let Some(i) = rng.weighted(&weights) else { break };
            let (kind, ws) = pools[i];
            let w = &ws[rng.below(ws.len() as u64) as usize];
            entries.push(PlanEntry { kind, side, witness: w.clone(), mandatory: false });
        }
    }
    BlobPlan { entries, mix: cfg.mix.clone() }
}
