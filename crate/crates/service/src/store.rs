//! One directory per championship holding two append-only files:
//! `events.ndjson`, the replayable event log, and `sessions.ndjson`, the token
//! digests. Every append is synced to disk before the caller is answered.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use f1champ_core::championship::{read_log, replay, write_record, Championship, Event, LogRecord, Rules};

use crate::auth::{Role, SessionRecord};
use crate::error::ApiError;

const EVENTS: &str = "events.ndjson";
const SESSIONS: &str = "sessions.ndjson";

pub struct Hosted {
    pub championship: Championship,
    sessions: HashMap<String, Role>,
    events: File,
    session_file: File,
    seq: u64,
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64)
}

fn open_append(path: &Path) -> std::io::Result<File> {
    OpenOptions::new().create(true).append(true).open(path)
}

/// File contents up to the last complete line. A torn final line can only
/// come from a write that was never acknowledged, so it is cut off the file
/// before anything new is appended.
fn complete_lines(path: &Path) -> std::io::Result<String> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    let end = text.rfind('\n').map_or(0, |i| i + 1);
    if end < text.len() {
        OpenOptions::new().write(true).open(path)?.set_len(end as u64)?;
        text.truncate(end);
    }
    Ok(text)
}

impl Hosted {
    /// Start a championship in `dir`, which must not exist yet.
    pub fn create(dir: &Path, rules: Rules) -> Result<Self, ApiError> {
        std::fs::create_dir_all(dir.parent().unwrap_or(dir))?;
        std::fs::create_dir(dir)?;
        let championship = Championship::new(rules);
        let mut hosted = Hosted {
            events: open_append(&dir.join(EVENTS))?,
            session_file: open_append(&dir.join(SESSIONS))?,
            sessions: HashMap::new(),
            seq: 0,
            championship,
        };
        let created = hosted.championship.creation_event();
        hosted.append(created)?;
        Ok(hosted)
    }

    pub fn load(dir: &Path) -> Result<Self, ApiError> {
        let events_path = dir.join(EVENTS);
        let records = read_log(complete_lines(&events_path)?.as_bytes())
            .map_err(|e| ApiError::Internal(format!("{}: {e}", events_path.display())))?;
        let championship =
            replay(&records).map_err(|e| ApiError::Internal(format!("{}: {e}", events_path.display())))?;
        let seq = records.last().map_or(0, |r| r.seq);

        let sessions_path = dir.join(SESSIONS);
        let mut sessions = HashMap::new();
        if sessions_path.exists() {
            for line in BufReader::new(complete_lines(&sessions_path)?.as_bytes()).lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec: SessionRecord = serde_json::from_str(&line)
                    .map_err(|e| ApiError::Internal(format!("{}: {e}", sessions_path.display())))?;
                sessions.insert(rec.token_sha256, rec.role);
            }
        }
        Ok(Hosted {
            championship,
            sessions,
            events: open_append(&events_path)?,
            session_file: open_append(&sessions_path)?,
            seq,
        })
    }

    pub fn append(&mut self, event: Event) -> Result<u64, ApiError> {
        self.seq += 1;
        let rec = LogRecord {
            seq: self.seq,
            ts_ms: now_ms(),
            event,
        };
        write_record(&mut self.events, &rec)?;
        self.events.flush()?;
        self.events.sync_data()?;
        Ok(self.seq)
    }

    pub fn add_session(&mut self, token_sha256: String, role: Role) -> Result<(), ApiError> {
        let rec = SessionRecord { token_sha256, role };
        let mut line = serde_json::to_string(&rec).map_err(|e| ApiError::Internal(e.to_string()))?;
        line.push('\n');
        self.session_file.write_all(line.as_bytes())?;
        self.session_file.sync_data()?;
        self.sessions.insert(rec.token_sha256, role);
        Ok(())
    }

    pub fn role_of(&self, token_sha256: &str) -> Option<Role> {
        self.sessions.get(token_sha256).copied()
    }
}

/// Directories under `root` that hold a championship.
pub fn championship_dirs(root: &Path) -> std::io::Result<Vec<(String, PathBuf)>> {
    let mut out = Vec::new();
    if !root.exists() {
        return Ok(out);
    }
    for entry in std::fs::read_dir(root)? {
        let entry = entry?;
        let path = entry.path();
        if path.join(EVENTS).is_file() {
            if let Some(id) = path.file_name().and_then(|n| n.to_str()) {
                out.push((id.to_string(), path.clone()));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torn_last_line_is_ignored() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c1");
        {
            let mut h = Hosted::create(&path, Rules::shipped()).unwrap();
            h.championship
                .register_team("A")
                .map(|(_, e)| h.append(e))
                .unwrap()
                .unwrap();
        }
        let mut f = open_append(&path.join(EVENTS)).unwrap();
        f.write_all(b"{\"seq\":3,\"ts_").unwrap();
        let mut h = Hosted::load(&path).unwrap();
        assert_eq!(h.championship.teams().len(), 1);
        assert_eq!(h.seq, 2);
        h.championship
            .register_team("B")
            .map(|(_, e)| h.append(e))
            .unwrap()
            .unwrap();
        drop(h);
        assert_eq!(Hosted::load(&path).unwrap().championship.teams().len(), 2);
    }
}
