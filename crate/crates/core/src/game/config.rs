use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum TowerKind {
    /// Single-target damage.
    Zapper,
    /// Damages the target and every marked blob near it.
    Splash,
    /// Slows the target down instead of damaging it.
    Slower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "camelCase")]
pub struct TowerSpec {
    pub cost: u32,
    pub damage: i32,
    /// Grid units from the cell centre.
    pub range: f64,
    /// Ticks between shots.
    pub cooldown: u32,
    pub splash_radius: f64,
    /// Speed multiplier applied to the target by a slower.
    pub slow_factor: f64,
    pub slow_ticks: u32,
}

impl Default for TowerSpec {
    fn default() -> Self {
        TowerSpec { cost: 40, damage: 2, range: 2.5, cooldown: 2, splash_radius: 0.0, slow_factor: 1.0, slow_ticks: 0 }
    }
}

/// Game balance. Config keys (section `[game]`) are the camelCase field names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "camelCase")]
pub struct GameConfig {
    pub initial_budget: u32,
    pub initial_health: u32,
    pub blob_hp: i32,
    /// Grid units per tick.
    pub blob_speed: f64,
    /// Ticks between consecutive spawns.
    pub spawn_spacing: u64,
    /// Health lost per red blob reaching the end of its lane.
    pub h_red: u32,
    /// Reward for destroying a red blob.
    pub r_red: i64,
    /// Penalty for destroying a blue blob.
    pub p_blue: i64,
    /// Reward for a blue blob passing through.
    pub r_pass: i64,
    /// Game time per tick.
    pub tick_ms: u64,
    /// Hard stop for a wave.
    pub max_ticks: u64,
    pub towers: BTreeMap<TowerKind, TowerSpec>,
}

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig {
            initial_budget: 100,
            initial_health: 10,
            blob_hp: 3,
            blob_speed: 0.25,
            spawn_spacing: 4,
            h_red: 1,
            r_red: 10,
            p_blue: 15,
            r_pass: 5,
            tick_ms: 100,
            max_ticks: 20_000,
            towers: BTreeMap::from([
                (TowerKind::Zapper, TowerSpec::default()),
                (
                    TowerKind::Splash,
                    TowerSpec { cost: 60, damage: 1, range: 2.0, cooldown: 3, splash_radius: 1.0, ..Default::default() },
                ),
                (
                    TowerKind::Slower,
                    TowerSpec {
                        cost: 30,
                        damage: 0,
                        range: 2.0,
                        cooldown: 1,
                        slow_factor: 0.5,
                        slow_ticks: 6,
                        ..Default::default()
                    },
                ),
            ]),
        }
    }
}

impl GameConfig {
    pub fn tower(&self, kind: TowerKind) -> TowerSpec {
        self.towers.get(&kind).cloned().unwrap_or_default()
    }
}
