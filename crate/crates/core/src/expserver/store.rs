use std::fs::{File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use super::ledger::Event;
use super::ServerError;

/// Append-only JSON Lines event log.
#[derive(Debug)]
pub struct EventLog {
    file: File,
    path: PathBuf,
    fsync: bool,
}

/// Parses log text. A final line that is unterminated or unparseable is a
/// torn write and is dropped; the returned offset is where valid data ends.
fn parse(text: &str, path: &Path) -> Result<(Vec<Event>, usize), ServerError> {
    let mut events = Vec::new();
    let mut offset = 0;
    let mut rest = text;
    let mut line_no = 0;
    while !rest.is_empty() {
        line_no += 1;
        let (line, terminated) = match rest.find('\n') {
            Some(i) => (&rest[..i], true),
            None => (rest, false),
        };
        let consumed = line.len() + usize::from(terminated);
        if line.trim().is_empty() {
            offset += consumed;
            rest = &rest[consumed..];
            continue;
        }
        match serde_json::from_str::<Event>(line) {
            Ok(e) if terminated => events.push(e),
            Ok(_) => break,
            Err(_) if consumed == rest.len() => break,
            Err(e) => {
                return Err(ServerError::CorruptLog {
                    path: path.display().to_string(),
                    line: line_no,
                    message: e.to_string(),
                })
            }
        }
        offset += consumed;
        rest = &rest[consumed..];
    }
    Ok((events, offset))
}

/// Reads every complete event in a log without modifying it.
pub fn read_events(path: impl AsRef<Path>) -> Result<Vec<Event>, ServerError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| ServerError::io(path, e))?;
    Ok(parse(&text, path)?.0)
}

impl EventLog {
    /// Opens or creates the log, cuts off a torn final line, and returns the
    /// events already stored.
    pub fn open(
        path: impl AsRef<Path>,
        fsync: bool,
    ) -> Result<(EventLog, Vec<Event>), ServerError> {
        let path = path.as_ref().to_path_buf();
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => String::new(),
            Err(e) => return Err(ServerError::io(&path, e)),
        };
        let (events, valid) = parse(&text, &path)?;
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| ServerError::io(&path, e))?;
        if valid < text.len() {
            log::warn!(
                "{}: dropping {} bytes of torn trailing write",
                path.display(),
                text.len() - valid
            );
            file.set_len(valid as u64)
                .map_err(|e| ServerError::io(&path, e))?;
        }
        Ok((EventLog { file, path, fsync }, events))
    }

    /// Writes one event and flushes it (and syncs, if configured) before
    /// returning.
    pub fn append(&mut self, event: &Event) -> Result<(), ServerError> {
        let mut line = serde_json::to_vec(event).expect("events serialize");
        line.push(b'\n');
        self.file
            .write_all(&line)
            .and_then(|()| self.file.flush())
            .map_err(|e| ServerError::io(&self.path, e))?;
        if self.fsync {
            self.file
                .sync_data()
                .map_err(|e| ServerError::io(&self.path, e))?;
        }
        Ok(())
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}
