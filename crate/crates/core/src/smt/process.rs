use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::time::{Duration, Instant};

use super::sexpr::{depth, parse_all, Sexp};
use super::{SmtError, SolverConfig};

/// A running solver driven over stdin/stdout. The child is killed and reaped on drop.
pub(crate) struct Session {
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<String>,
    deadline: Instant,
}

impl Session {
    pub fn start(cfg: &SolverConfig) -> Result<Session, SmtError> {
        let deadline = Instant::now() + Duration::from_millis(cfg.timeout_ms);
        let mut child = Command::new(&cfg.path)
            .args(&cfg.extra_args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|source| SmtError::Spawn { path: cfg.path.clone(), source })?;
        let stdout = child.stdout.take().expect("piped stdout");
        let stdin = child.stdin.take();
        let (tx, lines) = mpsc::channel();
        std::thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(Session { child, stdin, lines, deadline })
    }

    pub fn send(&mut self, text: &str) -> Result<(), SmtError> {
        let stdin = self.stdin.as_mut().ok_or_else(|| SmtError::Protocol("solver input closed".into()))?;
        stdin
            .write_all(text.as_bytes())
            .and_then(|_| stdin.flush())
            .map_err(|e| SmtError::Protocol(format!("writing to solver: {e}")))
    }

    /// Next complete response: a bare atom line or a balanced list.
    pub fn read(&mut self) -> Result<Sexp, SmtError> {
        let mut acc = String::new();
        loop {
            let left = self.deadline.saturating_duration_since(Instant::now());
            if left.is_zero() {
                return Err(SmtError::Timeout);
            }
            match self.lines.recv_timeout(left) {
                Ok(line) => {
                    acc.push_str(&line);
                    acc.push('\n');
                    if !acc.trim().is_empty() && depth(&acc) <= 0 {
                        break;
                    }
                }
                Err(RecvTimeoutError::Timeout) => return Err(SmtError::Timeout),
                Err(RecvTimeoutError::Disconnected) => {
                    return Err(SmtError::Protocol(format!("solver exited; partial output {:?}", acc.trim())))
                }
            }
        }
        let mut items = parse_all(&acc).map_err(|e| SmtError::Protocol(format!("{e} in {:?}", acc.trim())))?;
        if items.len() != 1 {
            return Err(SmtError::Protocol(format!("expected one response, got {:?}", acc.trim())));
        }
        let resp = items.pop().unwrap();
        if let Some([Sexp::Atom(head), rest @ ..]) = resp.list() {
            if head == "error" {
                let msg = rest.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ");
                return Err(SmtError::Protocol(format!("solver error: {msg}")));
            }
        }
        Ok(resp)
    }

    /// Values of `terms`, in order.
    pub fn get_values(&mut self, terms: &[String]) -> Result<Vec<Sexp>, SmtError> {
        if terms.is_empty() {
            return Ok(Vec::new());
        }
        self.send(&format!("(get-value ({}))\n", terms.join(" ")))?;
        let resp = self.read()?;
        let pairs = resp.list().ok_or_else(|| SmtError::Protocol(format!("bad get-value response {resp}")))?;
        if pairs.len() != terms.len() {
            return Err(SmtError::Protocol(format!("expected {} values, got {}", terms.len(), pairs.len())));
        }
        pairs
            .iter()
            .map(|p| match p.list() {
                Some([_, v]) => Ok(v.clone()),
                _ => Err(SmtError::Protocol(format!("bad get-value pair {p}"))),
            })
            .collect()
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        if let Some(mut stdin) = self.stdin.take() {
            let _ = stdin.write_all(b"(exit)\n");
        }
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
