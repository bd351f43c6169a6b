//! Deterministic tower-defense simulation driven by a blob plan.
//!
//! Blobs travel two lanes (input and output). Each lane has a scanner that marks blobs
//! whose data the student's formula rejects; towers only ever shoot marked blobs. Red
//! blobs carry data the model rejects and should be destroyed, blue blobs should pass.

mod board;
mod config;
mod log;
mod state;

pub use board::{cell_center, Board, BoardError, Cell, Lane, Point};
pub use config::{GameConfig, TowerKind, TowerSpec};
pub use log::{parse_log, replay, replay_text, write_log, ReplayError};
pub use state::{
    new_session, Action, Blob, BlobView, Color, GameError, GameState, LogEntry, Outcomes, Phase, ScoreReport, SessionInit,
    Snapshot, Spawn, Tower, TowerView,
};
