//! Store events and their one-line JSON form.
//!
//! Each log line is a JSON object with keys in the order
//! `seq`, `kind`, `ts`, `payload`, terminated by a single LF.

use serde::{Deserialize, Serialize};

use super::model::{CarrierRef, LabelId, Sku, Timestamp};
use super::InventoryError;
use crate::tag_codec::ProductRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EventKind {
    Provisioned,
    Sold,
    Repriced,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provisioned {
    pub sku: Sku,
    pub record: ProductRecord,
    pub carrier: CarrierRef,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sold {
    pub sku: Sku,
    pub receipt_id: u64,
    pub price_minor: u32,
}

/// A price change. Barcode items carry the serial of the label printed to
/// replace the retired one; NFC items are rewritten in place.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Repriced {
    pub sku: Sku,
    pub old_price_minor: u32,
    pub new_price_minor: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replacement_label: Option<LabelId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventBody {
    Provisioned(Provisioned),
    Sold(Sold),
    Repriced(Repriced),
}

impl EventBody {
    pub fn kind(&self) -> EventKind {
        match self {
            EventBody::Provisioned(_) => EventKind::Provisioned,
            EventBody::Sold(_) => EventKind::Sold,
            EventBody::Repriced(_) => EventKind::Repriced,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoreEvent {
    pub seq: u64,
    pub ts: Timestamp,
    pub body: EventBody,
}

#[derive(Serialize, Deserialize)]
struct RawEvent {
    seq: u64,
    kind: String,
    ts: Timestamp,
    payload: serde_json::Value,
}

impl StoreEvent {
    pub fn kind(&self) -> EventKind {
        self.body.kind()
    }

    /// JSON object plus trailing LF.
    pub fn to_line(&self) -> String {
        let (kind, payload) = match &self.body {
            EventBody::Provisioned(p) => ("PROVISIONED", serde_json::to_value(p)),
            EventBody::Sold(p) => ("SOLD", serde_json::to_value(p)),
            EventBody::Repriced(p) => ("REPRICED", serde_json::to_value(p)),
        };
        let raw = RawEvent {
            seq: self.seq,
            kind: kind.to_owned(),
            ts: self.ts,
            payload: payload.expect("event payloads serialize"),
        };
        let mut line = serde_json::to_string(&raw).expect("event serializes");
        line.push('\n');
        line
    }

    /// Parses one log line (without its LF). `line_no` is 1-based and only
    /// used in error reports.
    pub fn from_line(line: &str, line_no: usize) -> Result<Self, InventoryError> {
        let corrupt = |reason: String| InventoryError::CorruptLog {
            line: line_no,
            reason,
        };
        let raw: RawEvent = serde_json::from_str(line).map_err(|e| corrupt(e.to_string()))?;
        let body = match raw.kind.as_str() {
            "PROVISIONED" => serde_json::from_value(raw.payload).map(EventBody::Provisioned),
            "SOLD" => serde_json::from_value(raw.payload).map(EventBody::Sold),
            "REPRICED" => serde_json::from_value(raw.payload).map(EventBody::Repriced),
            other => return Err(corrupt(format!("unknown event kind {other:?}"))),
        }
        .map_err(|e| corrupt(e.to_string()))?;
        Ok(StoreEvent {
            seq: raw.seq,
            ts: raw.ts,
            body,
        })
    }
}

/// Parses a whole log. Blank lines are rejected; the file must end with LF
/// unless empty.
pub fn parse_log(text: &str) -> Result<Vec<StoreEvent>, InventoryError> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let Some(body) = text.strip_suffix('\n') else {
        return Err(InventoryError::CorruptLog {
            line: text.lines().count(),
            reason: "unterminated final line".into(),
        });
    };
    body.split('\n')
        .enumerate()
        .map(|(i, line)| StoreEvent::from_line(line, i + 1))
        .collect()
}

pub fn render_log(events: &[StoreEvent]) -> String {
    events.iter().map(StoreEvent::to_line).collect()
}
