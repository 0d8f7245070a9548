//! Out-of-process objectives speaking a line-delimited JSON protocol.
//!
//! For every trial the parent writes one line holding the parameters as a
//! JSON object (`{"alpha":1.0}`) to the child's standard input and reads one
//! line `{"score": <number>}` from its standard output. The child stays alive
//! across trials and sees at most one request at a time.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use crate::fmt::to_json_line;
use crate::search_space::ParamPoint;

#[derive(Debug, thiserror::Error)]
pub enum WorkerError {
    #[error("worker command is empty")]
    EmptyCommand,

    #[error("cannot start `{command}`: {source}")]
    Spawn {
        command: String,
        #[source]
        source: std::io::Error,
    },

    #[error("worker exited ({0})")]
    Exited(String),

    #[error("worker I/O failed: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed reply `{reply}`: {reason}")]
    Malformed { reply: String, reason: String },
}

struct Running {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

/// A persistent child process evaluating points on request.
///
/// A child that dies is restarted on the next request.
pub struct ExternalObjective {
    argv: Vec<String>,
    running: Option<Running>,
}

impl ExternalObjective {
    /// Starts the child once so that a bad command is reported up front.
    pub fn spawn(argv: &[String]) -> Result<Self, WorkerError> {
        let mut worker = ExternalObjective {
            argv: argv.to_vec(),
            running: None,
        };
        worker.running = Some(worker.start()?);
        Ok(worker)
    }

    pub fn command(&self) -> &[String] {
        &self.argv
    }

    fn start(&self) -> Result<Running, WorkerError> {
        let (program, args) = self.argv.split_first().ok_or(WorkerError::EmptyCommand)?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|source| WorkerError::Spawn {
                command: self.argv.join(" "),
                source,
            })?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(Running { child, stdin, stdout })
    }

    /// Sends `point` and waits for the score.
    pub fn evaluate(&mut self, point: &ParamPoint) -> Result<f64, WorkerError> {
        if self.running.is_none() {
            self.running = Some(self.start()?);
        }
        let outcome = self.exchange(point);
        if matches!(outcome, Err(WorkerError::Exited(_) | WorkerError::Io(_))) {
            if let Some(mut dead) = self.running.take() {
                let _ = dead.child.kill();
                let _ = dead.child.wait();
            }
        }
        outcome
    }

    fn exchange(&mut self, point: &ParamPoint) -> Result<f64, WorkerError> {
        let running = self.running.as_mut().expect("started");
        let request = to_json_line(point).map_err(std::io::Error::from)?;
        let sent = writeln!(running.stdin, "{request}").and_then(|()| running.stdin.flush());
        let mut reply = String::new();
        let read = sent.and_then(|()| running.stdout.read_line(&mut reply));
        match read {
            Ok(0) | Err(_) => {
                let status = match running.child.wait() {
                    Ok(s) => s.to_string(),
                    Err(e) => e.to_string(),
                };
                Err(WorkerError::Exited(status))
            }
            Ok(_) => parse_reply(reply.trim_end()),
        }
    }
}

fn parse_reply(reply: &str) -> Result<f64, WorkerError> {
    let malformed = |reason: &str| WorkerError::Malformed {
        reply: reply.to_owned(),
        reason: reason.to_owned(),
    };
    let value: serde_json::Value = serde_json::from_str(reply).map_err(|e| malformed(&e.to_string()))?;
    value
        .get("score")
        .ok_or_else(|| malformed("no `score` field"))?
        .as_f64()
        .ok_or_else(|| malformed("`score` is not a number"))
}

impl Drop for ExternalObjective {
    fn drop(&mut self) {
        let Some(Running { mut child, stdin, stdout }) = self.running.take() else {
            return;
        };
        drop(stdin);
        drop(stdout);
        let deadline = Instant::now() + Duration::from_secs(1);
        while Instant::now() < deadline {
            if let Ok(Some(_)) = child.try_wait() {
                return;
            }
            thread::sleep(Duration::from_millis(5));
        }
        let _ = child.kill();
        let _ = child.wait();
    }
}
