//! Append-only JSONL event log. Each append is flushed and synced before
//! it returns.

use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::JudgeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Created,
    Verdict,
    Closed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub seq: u64,
    pub kind: EventKind,
    pub data: serde_json::Value,
    pub ts: String,
}

#[derive(Debug)]
pub struct EventLog {
    path: PathBuf,
    file: File,
    next_seq: u64,
}

impl EventLog {
    /// Open (or create) the log and return every complete event in it. A
    /// trailing line without its newline was never acknowledged and is cut
    /// off.
    pub fn open(path: &Path) -> Result<(Self, Vec<Event>), JudgeError> {
        let io = |e: std::io::Error| JudgeError::Storage(format!("{}: {e}", path.display()));
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(path)
            .map_err(io)?;
        let mut text = String::new();
        file.read_to_string(&mut text).map_err(io)?;

        let mut events = Vec::new();
        let mut good_len = 0;
        let mut rest = text.as_str();
        while let Some(end) = rest.find('\n') {
            let line = &rest[..end];
            if !line.trim().is_empty() {
                let event: Event = serde_json::from_str(line).map_err(|e| {
                    JudgeError::Storage(format!("{}: event {}: {e}", path.display(), events.len() + 1))
                })?;
                if event.seq != events.len() as u64 {
                    return Err(JudgeError::Storage(format!(
                        "{}: expected seq {}, found {}",
                        path.display(),
                        events.len(),
                        event.seq
                    )));
                }
                events.push(event);
            }
            good_len += end + 1;
            rest = &rest[end + 1..];
        }
        if !rest.is_empty() {
            file.set_len(good_len as u64).map_err(io)?;
            file.seek(SeekFrom::End(0)).map_err(io)?;
        }
        Ok((
            EventLog {
                path: path.to_path_buf(),
                file,
                next_seq: events.len() as u64,
            },
            events,
        ))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Append and sync. The returned event is what replay will see.
    pub fn append(&mut self, kind: EventKind, data: serde_json::Value) -> Result<Event, JudgeError> {
        let event = Event {
            seq: self.next_seq,
            kind,
            data,
            ts: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Micros, true),
        };
        let mut line = serde_json::to_vec(&event).map_err(|e| JudgeError::Storage(e.to_string()))?;
        line.push(b'\n');
        let io = |e: std::io::Error| JudgeError::Storage(format!("{}: {e}", self.path.display()));
        self.file.write_all(&line).map_err(io)?;
        self.file.sync_data().map_err(io)?;
        self.next_seq += 1;
        Ok(event)
    }
}
