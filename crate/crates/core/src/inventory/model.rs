use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, SubsecRound, Utc};
use serde::{Deserialize, Serialize};

use crate::tag_codec::{ProductRecord, TagUid};

/// UTC instant with millisecond resolution, serialized as RFC 3339 (`...123Z`).
///
/// Truncation on construction keeps a timestamp identical after a trip
/// through the event log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(DateTime<Utc>);

impl Timestamp {
    pub fn new(at: DateTime<Utc>) -> Self {
        Timestamp(at.trunc_subsecs(3))
    }

    pub fn as_datetime(&self) -> DateTime<Utc> {
        self.0
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.to_rfc3339_opts(SecondsFormat::Millis, true))
    }
}

impl FromStr for Timestamp {
    type Err = chrono::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Timestamp::new(
            DateTime::parse_from_rfc3339(s)?.with_timezone(&Utc),
        ))
    }
}

impl Serialize for Timestamp {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Timestamp {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Store-level item key: the decimal product id.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Sku(String);

impl Sku {
    pub fn for_product(product_id: u32) -> Self {
        Sku(product_id.to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Sku {
    fn from(s: &str) -> Self {
        Sku(s.to_owned())
    }
}

impl fmt::Display for Sku {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Serial number of a printed label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LabelId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CarrierKind {
    Nfc,
    Barcode,
}

/// The physical medium an item is identified by.
///
/// Text form: `nfc:<14 hex digit UID>` or `barcode:<label serial>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CarrierRef {
    Nfc(TagUid),
    Barcode(LabelId),
}

impl CarrierRef {
    pub fn kind(&self) -> CarrierKind {
        match self {
            CarrierRef::Nfc(_) => CarrierKind::Nfc,
            CarrierRef::Barcode(_) => CarrierKind::Barcode,
        }
    }
}

impl fmt::Display for CarrierRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CarrierRef::Nfc(uid) => write!(f, "nfc:{uid}"),
            CarrierRef::Barcode(id) => write!(f, "barcode:{}", id.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("carrier reference must be nfc:<uid> or barcode:<serial>, got {0:?}")]
pub struct ParseCarrierError(pub String);

impl FromStr for CarrierRef {
    type Err = ParseCarrierError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseCarrierError(s.to_owned());
        let (kind, value) = s.split_once(':').ok_or_else(err)?;
        match kind {
            "nfc" => value.parse().map(CarrierRef::Nfc).map_err(|_| err()),
            "barcode" => value
                .parse()
                .map(|n| CarrierRef::Barcode(LabelId(n)))
                .map_err(|_| err()),
            _ => Err(err()),
        }
    }
}

impl Serialize for CarrierRef {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CarrierRef {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ItemStatus {
    InStock,
    Sold,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InventoryItem {
    pub sku: Sku,
    pub record: ProductRecord,
    pub carrier: CarrierRef,
    pub status: ItemStatus,
    pub sold_at: Option<Timestamp>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReceiptLine {
    pub sku: Sku,
    pub name: String,
    pub price_minor: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Receipt {
    pub receipt_id: u64,
    pub lines: Vec<ReceiptLine>,
    pub total_minor: u64,
    pub issued_at: Timestamp,
}

impl Receipt {
    pub fn new(receipt_id: u64, lines: Vec<ReceiptLine>, issued_at: Timestamp) -> Self {
        let total_minor = lines.iter().map(|l| u64::from(l.price_minor)).sum();
        Receipt {
            receipt_id,
            lines,
            total_minor,
            issued_at,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn carrier_text_form() {
        let nfc = CarrierRef::Nfc(TagUid::from_serial(1));
        assert_eq!(nfc.to_string(), "nfc:04000000000001");
        assert_eq!("nfc:04000000000001".parse::<CarrierRef>().unwrap(), nfc);
        let bc = CarrierRef::Barcode(LabelId(12));
        assert_eq!(bc.to_string(), "barcode:12");
        assert_eq!("barcode:12".parse::<CarrierRef>().unwrap(), bc);
        for bad in ["", "nfc", "nfc:12", "barcode:x", "qr:1"] {
            assert!(bad.parse::<CarrierRef>().is_err(), "{bad}");
        }
    }

    #[test]
    fn timestamp_round_trip() {
        let ts: Timestamp = "2026-10-16T09:30:00.123456Z".parse().unwrap();
        assert_eq!(ts.to_string(), "2026-10-16T09:30:00.123Z");
        assert_eq!(ts.to_string().parse::<Timestamp>().unwrap(), ts);
    }
}
