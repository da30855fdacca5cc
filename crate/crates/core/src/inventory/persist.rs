//! Data directory layout.
//!
//! ```text
//! <dir>/events.jsonl    append-only event log, one JSON object per LF-terminated line
//! <dir>/snapshot.json   latest checkpoint: {items, next_receipt_id, last_seq, ...}
//! ```
//!
//! Opening a directory loads the snapshot (if any) and replays the log
//! entries after its `last_seq`.

use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use super::clock::Clock;
use super::event::{parse_log, StoreEvent};
use super::store::{Journal, Snapshot, Store};
use super::InventoryError;

pub const EVENTS_FILE: &str = "events.jsonl";
pub const SNAPSHOT_FILE: &str = "snapshot.json";

/// Appends events to `events.jsonl` and writes a snapshot every
/// `snapshot_every` events.
#[derive(Debug)]
pub struct FileJournal {
    dir: PathBuf,
    events: File,
    snapshot_every: Option<u64>,
}

impl FileJournal {
    pub fn open(dir: &Path, snapshot_every: Option<u64>) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        let events = OpenOptions::new()
            .create(true)
            .append(true)
            .open(dir.join(EVENTS_FILE))?;
        Ok(FileJournal {
            dir: dir.to_owned(),
            events,
            snapshot_every: snapshot_every.filter(|&n| n > 0),
        })
    }
}

impl Journal for FileJournal {
    fn append(&mut self, event: &StoreEvent) -> io::Result<()> {
        self.events.write_all(event.to_line().as_bytes())?;
        self.events.flush()
    }

    fn checkpoint_due(&self, last_seq: u64) -> bool {
        self.snapshot_every
            .is_some_and(|n| last_seq.is_multiple_of(n))
    }

    fn checkpoint(&mut self, snapshot: &Snapshot) -> io::Result<()> {
        write_snapshot(&self.dir, snapshot)
    }
}

/// Writes `snapshot.json` atomically (temp file + rename).
pub fn write_snapshot(dir: &Path, snapshot: &Snapshot) -> io::Result<()> {
    let tmp = dir.join(format!("{SNAPSHOT_FILE}.tmp"));
    fs::write(&tmp, snapshot.to_json())?;
    fs::rename(tmp, dir.join(SNAPSHOT_FILE))
}

pub fn read_snapshot(dir: &Path) -> Result<Option<Snapshot>, InventoryError> {
    match fs::read_to_string(dir.join(SNAPSHOT_FILE)) {
        Ok(text) => Snapshot::from_json(&text).map(Some),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn read_events(dir: &Path) -> Result<Vec<StoreEvent>, InventoryError> {
    match fs::read_to_string(dir.join(EVENTS_FILE)) {
        Ok(text) => parse_log(&text),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(Vec::new()),
        Err(e) => Err(e.into()),
    }
}

/// Recovers the store kept in `dir` and attaches a journal to it.
pub fn open_store(
    dir: &Path,
    clock: Arc<dyn Clock>,
    snapshot_every: Option<u64>,
) -> Result<Store, InventoryError> {
    fs::create_dir_all(dir)?;
    let mut store = match read_snapshot(dir)? {
        Some(snapshot) => Store::from_snapshot(snapshot)?,
        None => Store::new(),
    };
    let base = store.last_seq();
    let pending = read_events(dir)?.into_iter().filter(|e| e.seq > base);
    store.replay_onto(pending)?;
    store.set_clock(clock);
    store.set_journal(Box::new(FileJournal::open(dir, snapshot_every)?));
    Ok(store)
}
