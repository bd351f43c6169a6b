//! Action logs: a JSON-lines file whose first line is `{"init": ...}` and whose
//! remaining lines are `{"tick": n, "action": "placeTower" | "startWave", "params": ...}`.

use serde::{Deserialize, Serialize};

use super::board::BoardError;
use super::state::{GameError, GameState, LogEntry, Phase, ScoreReport, SessionInit};

#[derive(Serialize, Deserialize)]
struct Header {
    init: SessionInit,
}

#[derive(Debug, thiserror::Error)]
pub enum ReplayError {
    #[error("log is empty")]
    Empty,
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("invalid board: {0}")]
    Board(#[from] BoardError),
    #[error("line {line}: action at tick {tick} rejected: {source}")]
    Rejected { line: usize, tick: u64, source: GameError },
    #[error("line {line}: tick {tick} is earlier than the current tick {now}")]
    OutOfOrder { line: usize, tick: u64, now: u64 },
}

pub fn write_log(state: &GameState) -> String {
    let mut out = serde_json::to_string(&Header { init: state.init.clone() }).expect("init serializes");
    out.push('\n');
    for e in &state.log {
        out.push_str(&serde_json::to_string(e).expect("entry serializes"));
        out.push('\n');
    }
    out
}

pub fn parse_log(text: &str) -> Result<(SessionInit, Vec<LogEntry>), ReplayError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines.next().ok_or(ReplayError::Empty)?;
    let header: Header = serde_json::from_str(first).map_err(|source| ReplayError::Json { line: 1, source })?;
    let entries = lines
        .map(|(i, l)| serde_json::from_str(l).map_err(|source| ReplayError::Json { line: i + 1, source }))
        .collect::<Result<Vec<LogEntry>, _>>()?;
    Ok((header.init, entries))
}

/// Re-simulates a session: each action is applied once the wave reaches its tick, and a
/// started wave is then run to the end.
pub fn replay(init: SessionInit, entries: &[LogEntry]) -> Result<GameState, ReplayError> {
    let mut state = GameState::from_init(init)?;
    for (i, e) in entries.iter().enumerate() {
        while state.tick < e.tick && state.phase == Phase::Wave {
            state.tick();
        }
        if state.tick != e.tick {
            return Err(ReplayError::OutOfOrder { line: i + 2, tick: e.tick, now: state.tick });
        }
        state
            .apply(&e.action)
            .map_err(|source| ReplayError::Rejected { line: i + 2, tick: e.tick, source })?;
    }
    state.run_to_end();
    Ok(state)
}

pub fn replay_text(text: &str) -> Result<ScoreReport, ReplayError> {
    let (init, entries) = parse_log(text)?;
    Ok(replay(init, &entries)?.final_score())
}
