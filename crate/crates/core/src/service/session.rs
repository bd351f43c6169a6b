//! Live game sessions. Each session is a task owning its [`GameState`]; actions reach
//! it through a queue and are applied between ticks in arrival order.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use tokio::sync::{mpsc, oneshot, watch};

use super::store::Store;
use crate::game::{write_log, Action, GameError, GameState, Phase, ScoreReport, Snapshot};

/// Server-to-client frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "camelCase")]
pub enum ServerFrame {
    Snapshot { snapshot: Snapshot },
    Error { code: String, message: String },
    Score { score: ScoreReport },
}

impl ServerFrame {
    pub fn error(code: &str, message: impl Into<String>) -> ServerFrame {
        ServerFrame::Error { code: code.into(), message: message.into() }
    }
}

impl From<&GameError> for ServerFrame {
    fn from(e: &GameError) -> ServerFrame {
        let code = match e {
            GameError::InsufficientBudget { .. } => "insufficientBudget",
            GameError::CellOccupied { .. } => "cellOccupied",
            GameError::NotBuildable { .. } => "notBuildable",
            GameError::WrongPhase { .. } => "wrongPhase",
        };
        ServerFrame::error(code, e.to_string())
    }
}

struct Command {
    action: Action,
    reply: oneshot::Sender<Result<(), GameError>>,
}

/// What every connection to a session can observe.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionView {
    pub snapshot: Snapshot,
    pub score: Option<ScoreReport>,
}

#[derive(Clone)]
pub struct SessionHandle {
    commands: mpsc::Sender<Command>,
    view: watch::Receiver<SessionView>,
}

impl SessionHandle {
    /// Queues an action and waits for the session task to apply it.
    pub async fn send(&self, action: Action) -> Result<(), ActionError> {
        let (reply, rx) = oneshot::channel();
        self.commands.send(Command { action, reply }).await.map_err(|_| ActionError::Ended)?;
        match rx.await {
            Ok(Ok(())) => Ok(()),
            Ok(Err(e)) => Err(ActionError::Rejected(e)),
            Err(_) => Err(ActionError::Ended),
        }
    }

    pub fn subscribe(&self) -> watch::Receiver<SessionView> {
        self.view.clone()
    }

    pub fn current(&self) -> SessionView {
        self.view.borrow().clone()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ActionError {
    #[error("session has ended")]
    Ended,
    #[error("{0}")]
    Rejected(GameError),
}

#[derive(Default)]
pub struct SessionHub {
    sessions: Mutex<HashMap<String, SessionHandle>>,
}

impl SessionHub {
    pub fn get(&self, id: &str) -> Option<SessionHandle> {
        self.sessions.lock().unwrap_or_else(|e| e.into_inner()).get(id).cloned()
    }

    /// Starts the task driving `state`. The action log is written to the store when the
    /// wave ends.
    pub fn start(&self, id: String, state: GameState, store: Arc<Store>) -> SessionHandle {
        let (tx, rx) = mpsc::channel(64);
        let (view_tx, view_rx) = watch::channel(SessionView { snapshot: state.snapshot(), score: None });
        tokio::spawn(run(id.clone(), state, rx, view_tx, store));
        let handle = SessionHandle { commands: tx, view: view_rx };
        self.sessions.lock().unwrap_or_else(|e| e.into_inner()).insert(id, handle.clone());
        handle
    }
}

async fn run(
    id: String,
    mut state: GameState,
    mut commands: mpsc::Receiver<Command>,
    view: watch::Sender<SessionView>,
    store: Arc<Store>,
) {
    let period = Duration::from_millis(state.init.config.tick_ms.max(1));
    let mut ticker = tokio::time::interval(period);
    ticker.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Delay);
    tracing::debug!(session = %id, "session started");
    loop {
        let wave = state.phase == Phase::Wave;
        tokio::select! {
            cmd = commands.recv() => {
                let Some(cmd) = cmd else { break };
                let result = state.apply(&cmd.action);
                if let Err(e) = &result {
                    tracing::debug!(session = %id, error = %e, "action rejected");
                }
                let _ = cmd.reply.send(result);
            }
            _ = ticker.tick(), if wave => state.tick(),
        }
        let ended = state.phase == Phase::Ended;
        let score = ended.then(|| state.final_score());
        view.send_replace(SessionView { snapshot: state.snapshot(), score });
        if ended {
            break;
        }
    }
    if let Err(e) = store.save_session_log(&id, &write_log(&state)) {
        tracing::warn!(session = %id, error = %e, "could not save action log");
    }
    tracing::info!(session = %id, score = state.score, health = state.health, "session ended");
}
