//! Product records and the simulated NFC Forum Type-2 tag they are stored on.
//!
//! A record is serialized with a fixed big-endian layout:
//!
//! ```text
//! offset  size  field
//! 0       1     version (0x01)
//! 1       4     product_id
//! 5       1     name length n (1..=64)
//! 6       n     name, UTF-8
//! 6+n     4     price_minor
//! 10+n    2     manufacturing_date (days since 2000-01-01)
//! 12+n    2     expiry_date
//! 14+n    2     delivery_date
//! ```
//!
//! The tag data area wraps the record in a single TLV block:
//! `0x03, L, <L payload bytes>, 0xFE, 0x00...` padded to 128 bytes.

use std::fmt;
use std::str::FromStr;

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const RECORD_VERSION: u8 = 0x01;
/// Bytes of a record that are not the name.
pub const RECORD_FIXED_LEN: usize = 16;
pub const MAX_NAME_LEN: usize = 64;
pub const MIN_RECORD_LEN: usize = RECORD_FIXED_LEN + 1;
pub const MAX_RECORD_LEN: usize = RECORD_FIXED_LEN + MAX_NAME_LEN;

pub const TAG_CAPACITY: usize = 128;
pub const TLV_NDEF: u8 = 0x03;
pub const TLV_TERMINATOR: u8 = 0xFE;
/// Tag byte, length byte and terminator.
pub const TLV_OVERHEAD: usize = 3;
pub const MAX_TLV_PAYLOAD: usize = TAG_CAPACITY - TLV_OVERHEAD;

pub const UID_LEN: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("invalid product name: {0}")]
    InvalidName(&'static str),
    #[error("expiry date {expiry} precedes manufacturing date {manufacturing}")]
    InvalidDates { manufacturing: u16, expiry: u16 },
    #[error("unsupported record version 0x{0:02X}")]
    BadVersion(u8),
    #[error("record truncated: need {needed} bytes, have {available}")]
    Truncated { needed: usize, available: usize },
    #[error("{0} trailing bytes after record")]
    TrailingGarbage(usize),
    #[error("payload of {0} bytes exceeds tag capacity of {MAX_TLV_PAYLOAD}")]
    CapacityExceeded(usize),
    #[error("tag is write-locked")]
    TagLocked,
    #[error("tag is blank")]
    BlankTag,
    #[error("malformed TLV frame: {0}")]
    MalformedTlv(&'static str),
}

/// The product payload carried by a tag.
///
/// Dates are day counts since 2000-01-01.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProductRecord {
    pub product_id: u32,
    pub name: String,
    pub price_minor: u32,
    pub manufacturing_date: u16,
    pub expiry_date: u16,
    pub delivery_date: u16,
}

impl ProductRecord {
    pub fn validate(&self) -> Result<(), CodecError> {
        validate_name(self.name.as_bytes())?;
        if self.expiry_date < self.manufacturing_date {
            return Err(CodecError::InvalidDates {
                manufacturing: self.manufacturing_date,
                expiry: self.expiry_date,
            });
        }
        Ok(())
    }

    pub fn encoded_len(&self) -> usize {
        RECORD_FIXED_LEN + self.name.len()
    }
}

fn validate_name(name: &[u8]) -> Result<(), CodecError> {
    if name.is_empty() {
        return Err(CodecError::InvalidName("empty"));
    }
    if name.len() > MAX_NAME_LEN {
        return Err(CodecError::InvalidName("longer than 64 bytes"));
    }
    if name.contains(&0) {
        return Err(CodecError::InvalidName("contains NUL"));
    }
    Ok(())
}

const EPOCH: NaiveDate = match NaiveDate::from_ymd_opt(2000, 1, 1) {
    Some(d) => d,
    None => unreachable!(),
};

/// Calendar date of a day count.
pub fn day_to_date(days: u16) -> NaiveDate {
    EPOCH + Days::new(u64::from(days))
}

/// Day count of a calendar date, if it lies in the representable range.
pub fn date_to_day(date: NaiveDate) -> Option<u16> {
    let days = date.signed_duration_since(EPOCH).num_days();
    u16::try_from(days).ok()
}

pub fn encode_record(record: &ProductRecord) -> Result<Vec<u8>, CodecError> {
    record.validate()?;
    let name = record.name.as_bytes();
    let mut out = Vec::with_capacity(record.encoded_len());
    out.push(RECORD_VERSION);
    out.extend_from_slice(&record.product_id.to_be_bytes());
    out.push(name.len() as u8);
    out.extend_from_slice(name);
    out.extend_from_slice(&record.price_minor.to_be_bytes());
    out.extend_from_slice(&record.manufacturing_date.to_be_bytes());
    out.extend_from_slice(&record.expiry_date.to_be_bytes());
    out.extend_from_slice(&record.delivery_date.to_be_bytes());
    debug_assert_eq!(out.len(), record.encoded_len());
    Ok(out)
}

pub fn decode_record(bytes: &[u8]) -> Result<ProductRecord, CodecError> {
    if bytes.len() < MIN_RECORD_LEN {
        return Err(CodecError::Truncated {
            needed: MIN_RECORD_LEN,
            available: bytes.len(),
        });
    }
    if bytes[0] != RECORD_VERSION {
        return Err(CodecError::BadVersion(bytes[0]));
    }
    let name_len = usize::from(bytes[5]);
    if name_len == 0 || name_len > MAX_NAME_LEN {
        return Err(CodecError::InvalidName("length byte out of range"));
    }
    let total = RECORD_FIXED_LEN + name_len;
    if bytes.len() < total {
        return Err(CodecError::Truncated {
            needed: total,
            available: bytes.len(),
        });
    }
    if bytes.len() > total {
        return Err(CodecError::TrailingGarbage(bytes.len() - total));
    }

    let name_bytes = &bytes[6..6 + name_len];
    validate_name(name_bytes)?;
    let name = std::str::from_utf8(name_bytes)
        .map_err(|_| CodecError::InvalidName("not UTF-8"))?
        .to_owned();

    let rest = &bytes[6 + name_len..];
    let be16 = |at: usize| u16::from_be_bytes([rest[at], rest[at + 1]]);
    let record = ProductRecord {
        product_id: u32::from_be_bytes([bytes[1], bytes[2], bytes[3], bytes[4]]),
        name,
        price_minor: u32::from_be_bytes([rest[0], rest[1], rest[2], rest[3]]),
        manufacturing_date: be16(4),
        expiry_date: be16(6),
        delivery_date: be16(8),
    };
    record.validate()?;
    Ok(record)
}

/// 7-byte tag identifier, rendered as 14 uppercase hex digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TagUid(pub [u8; UID_LEN]);

impl TagUid {
    /// Deterministic UID for the `serial`-th tag minted by a store.
    /// The first byte is the NXP manufacturer code, as on most Type-2 tags.
    pub fn from_serial(serial: u64) -> Self {
        let mut uid = [0u8; UID_LEN];
        uid[0] = 0x04;
        uid[1..].copy_from_slice(&serial.to_be_bytes()[2..]);
        TagUid(uid)
    }
}

impl fmt::Display for TagUid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.0 {
            write!(f, "{b:02X}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("tag UID must be 14 hex digits")]
pub struct ParseUidError;

impl FromStr for TagUid {
    type Err = ParseUidError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() != UID_LEN * 2 || !s.is_ascii() {
            return Err(ParseUidError);
        }
        let mut uid = [0u8; UID_LEN];
        for (i, byte) in uid.iter_mut().enumerate() {
            *byte = u8::from_str_radix(&s[2 * i..2 * i + 2], 16).map_err(|_| ParseUidError)?;
        }
        Ok(TagUid(uid))
    }
}

impl Serialize for TagUid {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TagUid {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A simulated 128-byte NFC Forum Type-2 tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Type2Tag {
    uid: TagUid,
    data: [u8; TAG_CAPACITY],
    write_locked: bool,
}

impl Type2Tag {
    pub fn blank(uid: TagUid) -> Self {
        Type2Tag {
            uid,
            data: [0; TAG_CAPACITY],
            write_locked: false,
        }
    }

    /// A tag holding an arbitrary data image, e.g. one read off a fuzzer.
    pub fn from_raw(uid: TagUid, data: [u8; TAG_CAPACITY], write_locked: bool) -> Self {
        Type2Tag {
            uid,
            data,
            write_locked,
        }
    }

    pub fn uid(&self) -> TagUid {
        self.uid
    }

    pub fn data(&self) -> &[u8; TAG_CAPACITY] {
        &self.data
    }

    pub fn is_write_locked(&self) -> bool {
        self.write_locked
    }

    /// Sets the lock flag. Locking cannot be undone.
    pub fn lock(&mut self) {
        self.write_locked = true;
    }

    pub fn is_blank(&self) -> bool {
        self.data.iter().all(|&b| b == 0)
    }

    /// Replaces the data area with a single TLV block holding `payload`.
    pub fn write_payload(&mut self, payload: &[u8]) -> Result<(), CodecError> {
        if self.write_locked {
            return Err(CodecError::TagLocked);
        }
        if payload.len() > MAX_TLV_PAYLOAD {
            return Err(CodecError::CapacityExceeded(payload.len()));
        }
        let len = payload.len();
        let mut data = [0u8; TAG_CAPACITY];
        data[0] = TLV_NDEF;
        data[1] = len as u8;
        data[2..2 + len].copy_from_slice(payload);
        data[2 + len] = TLV_TERMINATOR;
        self.data = data;
        Ok(())
    }

    pub fn write_record(&mut self, record: &ProductRecord) -> Result<(), CodecError> {
        if self.write_locked {
            return Err(CodecError::TagLocked);
        }
        let payload = encode_record(record)?;
        self.write_payload(&payload)
    }

    /// The value of the TLV block, after checking the whole frame.
    pub fn payload(&self) -> Result<&[u8], CodecError> {
        if self.is_blank() {
            return Err(CodecError::BlankTag);
        }
        if self.data[0] != TLV_NDEF {
            return Err(CodecError::MalformedTlv("unexpected TLV tag byte"));
        }
        let len = usize::from(self.data[1]);
        if len > MAX_TLV_PAYLOAD {
            return Err(CodecError::MalformedTlv("length exceeds capacity"));
        }
        let end = 2 + len;
        if self.data[end] != TLV_TERMINATOR {
            return Err(CodecError::MalformedTlv("missing terminator"));
        }
        if self.data[end + 1..].iter().any(|&b| b != 0) {
            return Err(CodecError::MalformedTlv("non-zero padding"));
        }
        Ok(&self.data[2..end])
    }

    pub fn read_record(&self) -> Result<ProductRecord, CodecError> {
        decode_record(self.payload()?)
    }
}

/// Returns a copy of `tag` with `record` written to it.
pub fn write_tag(tag: &Type2Tag, record: &ProductRecord) -> Result<Type2Tag, CodecError> {
    let mut out = tag.clone();
    out.write_record(record)?;
    Ok(out)
}

pub fn read_tag(tag: &Type2Tag) -> Result<ProductRecord, CodecError> {
    tag.read_record()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hex(s: &str) -> Vec<u8> {
        s.split_whitespace()
            .flat_map(|chunk| {
                (0..chunk.len())
                    .step_by(2)
                    .map(move |i| u8::from_str_radix(&chunk[i..i + 2], 16).unwrap())
            })
            .collect()
    }

    fn zero_record() -> ProductRecord {
        ProductRecord {
            product_id: 0,
            name: "A".into(),
            price_minor: 0,
            manufacturing_date: 0,
            expiry_date: 0,
            delivery_date: 0,
        }
    }

    fn uid() -> TagUid {
        TagUid::from_serial(1)
    }

    #[test]
    fn zero_record_layout() {
        let bytes = encode_record(&zero_record()).unwrap();
        assert_eq!(bytes, hex("01 00000000 01 41 00000000 0000 0000 0000"));
        assert_eq!(bytes.len(), 17);
        assert_eq!(decode_record(&bytes).unwrap(), zero_record());
    }

    #[test]
    fn usb_cable_layout() {
        let record = ProductRecord {
            product_id: 1001,
            name: "USB-C Cable".into(),
            price_minor: 1999,
            ..zero_record()
        };
        let bytes = encode_record(&record).unwrap();
        // 1001 = 0x3E9, 1999 = 0x7CF, "USB-C Cable" in ASCII.
        let expected = hex("01 000003E9 0B 5553422D43204361626C65 000007CF 0000 0000 0000");
        assert_eq!(bytes.len(), 27);
        assert_eq!(bytes, expected);
        assert_eq!(&bytes[1..5], &[0x00, 0x00, 0x03, 0xE9]);
    }

    #[test]
    fn name_bounds() {
        let long = ProductRecord {
            name: "x".repeat(65),
            ..zero_record()
        };
        assert!(matches!(
            encode_record(&long),
            Err(CodecError::InvalidName(_))
        ));
        let empty = ProductRecord {
            name: String::new(),
            ..zero_record()
        };
        assert!(matches!(
            encode_record(&empty),
            Err(CodecError::InvalidName(_))
        ));
        let nul = ProductRecord {
            name: "a\0b".into(),
            ..zero_record()
        };
        assert!(matches!(
            encode_record(&nul),
            Err(CodecError::InvalidName(_))
        ));
        let max = ProductRecord {
            name: "x".repeat(64),
            ..zero_record()
        };
        assert_eq!(encode_record(&max).unwrap().len(), 80);
    }

    #[test]
    fn dates_ordered() {
        let r = ProductRecord {
            manufacturing_date: 10,
            expiry_date: 9,
            ..zero_record()
        };
        assert_eq!(
            encode_record(&r),
            Err(CodecError::InvalidDates {
                manufacturing: 10,
                expiry: 9
            })
        );
    }

    #[test]
    fn decode_errors() {
        assert!(matches!(
            decode_record(&[0x01; 15]),
            Err(CodecError::Truncated { .. })
        ));
        let mut bytes = encode_record(&zero_record()).unwrap();
        bytes.push(0);
        assert_eq!(decode_record(&bytes), Err(CodecError::TrailingGarbage(1)));

        let mut bad = encode_record(&zero_record()).unwrap();
        bad[0] = 0x02;
        assert_eq!(decode_record(&bad), Err(CodecError::BadVersion(2)));

        // name length claims more bytes than present
        let mut short = encode_record(&zero_record()).unwrap();
        short[5] = 2;
        assert!(matches!(
            decode_record(&short),
            Err(CodecError::Truncated { .. })
        ));

        let mut utf = encode_record(&zero_record()).unwrap();
        utf[6] = 0xFF;
        assert!(matches!(
            decode_record(&utf),
            Err(CodecError::InvalidName(_))
        ));
    }

    #[test]
    fn blank_tag_write_layout() {
        let tag = write_tag(&Type2Tag::blank(uid()), &zero_record()).unwrap();
        let data = tag.data();
        assert_eq!(data[0], 0x03);
        assert_eq!(data[1], 17);
        assert_eq!(
            &data[2..19],
            encode_record(&zero_record()).unwrap().as_slice()
        );
        assert_eq!(data[19], 0xFE);
        assert!(data[20..].iter().all(|&b| b == 0));
        assert_eq!(read_tag(&tag).unwrap(), zero_record());
    }

    #[test]
    fn longest_name_fits() {
        let r = ProductRecord {
            name: "n".repeat(64),
            ..zero_record()
        };
        let tag = write_tag(&Type2Tag::blank(uid()), &r).unwrap();
        assert_eq!(tag.data()[1], 80);
        assert_eq!(tag.data()[82], 0xFE);
    }

    #[test]
    fn capacity_and_lock() {
        let mut tag = Type2Tag::blank(uid());
        assert!(tag.write_payload(&[0xAA; 125]).is_ok());
        assert_eq!(tag.data()[127], 0xFE);
        assert_eq!(
            tag.write_payload(&[0xAA; 126]),
            Err(CodecError::CapacityExceeded(126))
        );
        tag.lock();
        assert_eq!(
            write_tag(&tag, &zero_record()).unwrap_err(),
            CodecError::TagLocked
        );
    }

    #[test]
    fn read_errors() {
        let blank = Type2Tag::blank(uid());
        assert_eq!(read_tag(&blank), Err(CodecError::BlankTag));

        let mut data = [0u8; TAG_CAPACITY];
        data[0] = 0x03;
        data[1] = 126;
        let tag = Type2Tag::from_raw(uid(), data, false);
        assert!(matches!(read_tag(&tag), Err(CodecError::MalformedTlv(_))));

        let mut good = *write_tag(&blank, &zero_record()).unwrap().data();
        good[19] = 0x00;
        let tag = Type2Tag::from_raw(uid(), good, false);
        assert_eq!(
            read_tag(&tag),
            Err(CodecError::MalformedTlv("missing terminator"))
        );

        let mut padded = *write_tag(&blank, &zero_record()).unwrap().data();
        padded[100] = 1;
        let tag = Type2Tag::from_raw(uid(), padded, false);
        assert_eq!(
            read_tag(&tag),
            Err(CodecError::MalformedTlv("non-zero padding"))
        );

        let mut wrong = [0u8; TAG_CAPACITY];
        wrong[0] = 0x01;
        let tag = Type2Tag::from_raw(uid(), wrong, false);
        assert!(matches!(read_tag(&tag), Err(CodecError::MalformedTlv(_))));
    }

    #[test]
    fn rewrite_replaces_content() {
        let long = ProductRecord {
            name: "a long product name".into(),
            ..zero_record()
        };
        let tag = write_tag(&Type2Tag::blank(uid()), &long).unwrap();
        let tag = write_tag(&tag, &zero_record()).unwrap();
        let fresh = write_tag(&Type2Tag::blank(uid()), &zero_record()).unwrap();
        assert_eq!(tag, fresh);
    }

    #[test]
    fn uid_text_form() {
        let uid = TagUid::from_serial(0x0102_0304_0506);
        assert_eq!(uid.to_string(), "04010203040506");
        assert_eq!("04010203040506".parse::<TagUid>().unwrap(), uid);
        assert!("0401".parse::<TagUid>().is_err());
        assert!("0401020304050G".parse::<TagUid>().is_err());
    }

    #[test]
    fn day_conversion() {
        assert_eq!(day_to_date(0), NaiveDate::from_ymd_opt(2000, 1, 1).unwrap());
        assert_eq!(
            day_to_date(366),
            NaiveDate::from_ymd_opt(2001, 1, 1).unwrap()
        );
        let d = NaiveDate::from_ymd_opt(2026, 10, 16).unwrap();
        assert_eq!(day_to_date(date_to_day(d).unwrap()), d);
        assert_eq!(
            date_to_day(NaiveDate::from_ymd_opt(1999, 12, 31).unwrap()),
            None
        );
    }
}
