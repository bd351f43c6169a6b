use std::cmp::Reverse;
use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::board::{cell_center, Board, BoardError, Cell};
use super::config::{GameConfig, TowerKind};
use crate::eval::SplitMix64;
use crate::problem::Side;
use crate::verdict::{BlobKind, BlobPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Phase {
    Building,
    Wave,
    Ended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Color {
    Red,
    Blue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Blob {
    pub id: u64,
    pub side: Side,
    pub color: Color,
    pub marked: bool,
    /// Whether the scanner marks this blob, fixed at spawn from its plan entry.
    pub will_mark: bool,
    /// Index of the plan entry carrying this blob's data.
    pub entry: usize,
    /// Path parameter in `[0, 1]`.
    pub position: f64,
    pub speed: f64,
    pub hp: i32,
    pub slow_factor: f64,
    pub slow_ticks: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Tower {
    pub id: u64,
    pub kind: TowerKind,
    pub cell: Cell,
    /// Ticks until the tower can fire again.
    pub ready_in: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Spawn {
    /// Wave tick on which the blob appears.
    pub at: u64,
    pub entry: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Outcomes {
    pub red_destroyed: u32,
    pub red_reached_end: u32,
    pub blue_destroyed: u32,
    pub blue_passed: u32,
    /// Blobs still queued or in flight when the game stopped early.
    pub unresolved: u32,
}

/// Everything needed to recreate a session from scratch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionInit {
    pub plan: BlobPlan,
    pub board: Board,
    pub config: GameConfig,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", content = "params", rename_all = "camelCase")]
pub enum Action {
    PlaceTower { kind: TowerKind, cell: Cell },
    StartWave,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub tick: u64,
    #[serde(flatten)]
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error, Serialize, Deserialize)]
#[serde(tag = "error", rename_all = "camelCase")]
pub enum GameError {
    #[error("tower costs {cost} but only {budget} is left")]
    InsufficientBudget { cost: u32, budget: u32 },
    #[error("cell {cell:?} already holds a tower")]
    CellOccupied { cell: Cell },
    #[error("cell {cell:?} is not buildable")]
    NotBuildable { cell: Cell },
    #[error("action not allowed in phase {phase:?}")]
    WrongPhase { phase: Phase },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScoreReport {
    pub score: i64,
    pub health: u32,
    pub initial_health: u32,
    pub budget: u32,
    pub ticks: u64,
    pub spawned: u32,
    pub outcomes: Outcomes,
    /// Score if every red blob were destroyed and every blue blob passed.
    pub ideal_score: i64,
    /// Best score the plan allows: unmarked red blobs can never be destroyed.
    pub max_attainable_score: i64,
    pub max_attainable_health: u32,
    pub ideal_attainable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BlobView {
    pub id: u64,
    pub side: Side,
    pub color: Color,
    pub marked: bool,
    pub position: f64,
    pub x: f64,
    pub y: f64,
    pub hp: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TowerView {
    pub id: u64,
    pub kind: TowerKind,
    pub cell: Cell,
    pub range: f64,
}

/// Render-relevant state: no formulas, no witness values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Snapshot {
    pub tick: u64,
    pub phase: Phase,
    pub budget: u32,
    pub health: u32,
    pub score: i64,
    pub queued: usize,
    pub board: Board,
    pub blobs: Vec<BlobView>,
    pub towers: Vec<TowerView>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameState {
    pub init: SessionInit,
    pub tick: u64,
    pub phase: Phase,
    pub budget: u32,
    pub health: u32,
    pub score: i64,
    pub blobs: Vec<Blob>,
    pub towers: Vec<Tower>,
    pub spawn_queue: VecDeque<Spawn>,
    pub outcomes: Outcomes,
    pub spawned: u32,
    pub log: Vec<LogEntry>,
    next_id: u64,
}

/// Spawn order: per lane, mandatory entries first in plan order, then the fillers in a
/// seeded shuffle; consecutive blobs of a lane are `spawn_spacing` ticks apart.
fn schedule(plan: &BlobPlan, cfg: &GameConfig, seed: u64) -> VecDeque<Spawn> {
    let mut rng = SplitMix64::new(seed);
    let mut all = Vec::new();
    for side in Side::BOTH {
        let of_side = |mandatory: bool| {
            plan.entries
                .iter()
                .enumerate()
                .filter(move |(_, e)| e.side == side && e.mandatory == mandatory)
                .map(|(i, _)| i)
                .collect::<Vec<_>>()
        };
        let mut order = of_side(true);
        let mut fillers = of_side(false);
        rng.shuffle(&mut fillers);
        order.extend(fillers);
        all.extend(order.into_iter().enumerate().map(|(k, entry)| Spawn { at: k as u64 * cfg.spawn_spacing, entry }));
    }
    all.sort_by_key(|s| (s.at, plan.entries[s.entry].side));
    all.into()
}

pub fn new_session(plan: BlobPlan, board: Board, config: GameConfig, seed: u64) -> Result<GameState, BoardError> {
    board.validate()?;
    let spawn_queue = schedule(&plan, &config, seed);
    Ok(GameState {
        tick: 0,
        phase: Phase::Building,
        budget: config.initial_budget,
        health: config.initial_health,
        score: 0,
        blobs: Vec::new(),
        towers: Vec::new(),
        spawn_queue,
        outcomes: Outcomes::default(),
        spawned: 0,
        log: Vec::new(),
        next_id: 1,
        init: SessionInit { plan, board, config, seed },
    })
}

impl GameState {
    pub fn from_init(init: SessionInit) -> Result<GameState, BoardError> {
        new_session(init.plan, init.board, init.config, init.seed)
    }

    pub fn apply(&mut self, action: &Action) -> Result<(), GameError> {
        match action {
            Action::PlaceTower { kind, cell } => self.place_tower(*kind, *cell).map(|_| ()),
            Action::StartWave => self.start_wave(),
        }
    }

    pub fn place_tower(&mut self, kind: TowerKind, cell: Cell) -> Result<u64, GameError> {
        if self.phase == Phase::Ended {
            return Err(GameError::WrongPhase { phase: self.phase });
        }
        if !self.init.board.buildable.contains(&cell) {
            return Err(GameError::NotBuildable { cell });
        }
        if self.towers.iter().any(|t| t.cell == cell) {
            return Err(GameError::CellOccupied { cell });
        }
        let cost = self.init.config.tower(kind).cost;
        if cost > self.budget {
            return Err(GameError::InsufficientBudget { cost, budget: self.budget });
        }
        self.budget -= cost;
        let id = self.fresh_id();
        self.towers.push(Tower { id, kind, cell, ready_in: 0 });
        self.log.push(LogEntry { tick: self.tick, action: Action::PlaceTower { kind, cell } });
        Ok(id)
    }

    pub fn start_wave(&mut self) -> Result<(), GameError> {
        if self.phase != Phase::Building {
            return Err(GameError::WrongPhase { phase: self.phase });
        }
        self.log.push(LogEntry { tick: self.tick, action: Action::StartWave });
        self.phase = if self.spawn_queue.is_empty() { Phase::Ended } else { Phase::Wave };
        Ok(())
    }

    fn fresh_id(&mut self) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    /// Advances the wave by one fixed timestep. Does nothing outside the wave phase.
    pub fn tick(&mut self) {
        if self.phase != Phase::Wave {
            return;
        }
        let cfg = &self.init.config;
        let board = &self.init.board;
        let now = self.tick;
        self.tick += 1;

        while let Some(s) = self.spawn_queue.front().copied().filter(|s| s.at <= now) {
            self.spawn_queue.pop_front();
            let entry = &self.init.plan.entries[s.entry];
            let id = self.next_id;
            self.next_id += 1;
            self.spawned += 1;
            self.blobs.push(Blob {
                id,
                side: entry.side,
                color: if entry.kind.is_red() { Color::Red } else { Color::Blue },
                marked: false,
                will_mark: entry.kind.is_marked(),
                entry: s.entry,
                position: 0.0,
                speed: cfg.blob_speed,
                hp: cfg.blob_hp,
                slow_factor: 1.0,
                slow_ticks: 0,
            });
        }

        for b in &mut self.blobs {
            let lane = board.lane(b.side);
            let factor = if b.slow_ticks > 0 {
                b.slow_ticks -= 1;
                b.slow_factor
            } else {
                1.0
            };
            b.position = (b.position + b.speed * factor / lane.length()).min(1.0);
            if b.will_mark && b.position >= lane.scanner {
                b.marked = true;
            }
        }

        for t in &mut self.towers {
            if t.ready_in > 0 {
                t.ready_in -= 1;
                continue;
            }
            let spec = cfg.tower(t.kind);
            let origin = cell_center(t.cell);
            let target = self
                .blobs
                .iter()
                .enumerate()
                .filter(|(_, b)| b.marked && b.hp > 0)
                .filter(|(_, b)| board.lane(b.side).point_at(b.position).dist(origin) <= spec.range)
                .max_by(|(_, a), (_, b)| a.position.total_cmp(&b.position).then(Reverse(a.id).cmp(&Reverse(b.id))))
                .map(|(i, _)| i);
            let Some(i) = target else { continue };
            let at = board.lane(self.blobs[i].side).point_at(self.blobs[i].position);
            self.blobs[i].hp -= spec.damage;
            if t.kind == TowerKind::Slower {
                self.blobs[i].slow_factor = spec.slow_factor;
                self.blobs[i].slow_ticks = spec.slow_ticks;
            }
            if spec.splash_radius > 0.0 {
                for (j, b) in self.blobs.iter_mut().enumerate() {
                    if j != i && b.marked && b.hp > 0 && board.lane(b.side).point_at(b.position).dist(at) <= spec.splash_radius {
                        b.hp -= spec.damage;
                    }
                }
            }
            t.ready_in = spec.cooldown.saturating_sub(1);
        }

        let (score, health, outcomes) = (&mut self.score, &mut self.health, &mut self.outcomes);
        self.blobs.retain(|b| {
            if b.hp <= 0 {
                match b.color {
                    Color::Red => {
                        *score += cfg.r_red;
                        outcomes.red_destroyed += 1;
                    }
                    Color::Blue => {
                        *score -= cfg.p_blue;
                        outcomes.blue_destroyed += 1;
                    }
                }
                return false;
            }
            if b.position >= 1.0 {
                match b.color {
                    Color::Red => {
                        *health = health.saturating_sub(cfg.h_red);
                        outcomes.red_reached_end += 1;
                    }
                    Color::Blue => {
                        *score += cfg.r_pass;
                        outcomes.blue_passed += 1;
                    }
                }
                return false;
            }
            true
        });

        let drained = self.spawn_queue.is_empty() && self.blobs.is_empty();
        if drained || self.health == 0 || self.tick >= cfg.max_ticks {
            self.outcomes.unresolved += (self.blobs.len() + self.spawn_queue.len()) as u32;
            self.phase = Phase::Ended;
        }
    }

    /// Ticks until the wave ends.
    pub fn run_to_end(&mut self) {
        while self.phase == Phase::Wave {
            self.tick();
        }
    }

    pub fn final_score(&self) -> ScoreReport {
        let cfg = &self.init.config;
        let entries = &self.init.plan.entries;
        let ideal: i64 = entries.iter().map(|e| if e.kind.is_red() { cfg.r_red } else { cfg.r_pass }).sum();
        let unmarked_red = entries.iter().filter(|e| e.kind == BlobKind::RedUnmarked).count() as u32;
        let attainable = ideal - unmarked_red as i64 * cfg.r_red;
        ScoreReport {
            score: self.score,
            health: self.health,
            initial_health: cfg.initial_health,
            budget: self.budget,
            ticks: self.tick,
            spawned: self.spawned,
            outcomes: self.outcomes,
            ideal_score: ideal,
            max_attainable_score: attainable,
            max_attainable_health: cfg.initial_health.saturating_sub(unmarked_red * cfg.h_red),
            ideal_attainable: unmarked_red == 0,
        }
    }

    pub fn snapshot(&self) -> Snapshot {
        let cfg = &self.init.config;
        Snapshot {
            tick: self.tick,
            phase: self.phase,
            budget: self.budget,
            health: self.health,
            score: self.score,
            queued: self.spawn_queue.len(),
            board: self.init.board.clone(),
            blobs: self
                .blobs
                .iter()
                .map(|b| {
                    let p = self.init.board.lane(b.side).point_at(b.position);
                    BlobView { id: b.id, side: b.side, color: b.color, marked: b.marked, position: b.position, x: p.x, y: p.y, hp: b.hp }
                })
                .collect(),
            towers: self
                .towers
                .iter()
                .map(|t| TowerView { id: t.id, kind: t.kind, cell: t.cell, range: cfg.tower(t.kind).range })
                .collect(),
        }
    }
}
