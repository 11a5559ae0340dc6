//! Append-only event log in newline-delimited JSON, and replay.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::engine::{Championship, EngineError, Event};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRecord {
    pub seq: u64,
    /// Milliseconds since the Unix epoch when the event was accepted.
    pub ts_ms: u64,
    pub event: Event,
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("log line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("log must start with the championship's creation record")]
    MissingCreation,
    #[error("record {seq}: {source}")]
    Rejected {
        seq: u64,
        #[source]
        source: EngineError,
    },
    #[error("record {seq}: {message}")]
    Diverged { seq: u64, message: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub fn write_record<W: Write>(mut out: W, record: &LogRecord) -> std::io::Result<()> {
    let mut line = serde_json::to_string(record).map_err(std::io::Error::other)?;
    line.push('\n');
    out.write_all(line.as_bytes())
}

pub fn read_log<R: BufRead>(input: R) -> Result<Vec<LogRecord>, ReplayError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: LogRecord = serde_json::from_str(&line).map_err(|e| ReplayError::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

/// Rebuild a championship by re-executing every recorded event. Race runs
/// are recomputed and must reproduce the recorded classification exactly.
pub fn replay(records: &[LogRecord]) -> Result<Championship, ReplayError> {
    let mut it = records.iter();
    let Some(LogRecord {
        event: Event::Created { rules },
        ..
    }) = it.next()
    else {
        return Err(ReplayError::MissingCreation);
    };
    let mut ch = Championship::new((**rules).clone());
    for rec in it {
        let seq = rec.seq;
        let rejected = |source| ReplayError::Rejected { seq, source };
        match &rec.event {
            Event::Created { .. } => {
                return Err(ReplayError::Diverged {
                    seq,
                    message: "second creation record".into(),
                })
            }
            Event::Registered { team, name } => {
                let (id, _) = ch.register_team(name).map_err(rejected)?;
                if id != *team {
                    return Err(ReplayError::Diverged {
                        seq,
                        message: format!("team id {id} assigned, log says {team}"),
                    });
                }
            }
            Event::Submitted { team, submission } => {
                ch.submit(*team, submission.clone()).map_err(rejected)?;
            }
            Event::RaceRun { race, classification } => {
                let (got, _) = ch.run_race(*race).map_err(rejected)?;
                if &got != classification {
                    return Err(ReplayError::Diverged {
                        seq,
                        message: format!("race {race} classification differs from the log"),
                    });
                }
            }
        }
    }
    Ok(ch)
}
