//! Read-attempt simulation for barcode and NFC readers.
//!
//! Barcode reads fail on any damage, on a tilt beyond 8 degrees, and on
//! labels too wide to read. NFC reads only care about distance: any tilt,
//! any surface condition, up to 10 cm. Latencies are a fixed 300 ms for
//! barcode trigger-and-decode and a 10 ms pairing cost plus transfer time
//! at 424 kbit/s for NFC; both fixed costs are synthetic.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::barcode::{BarcodeLabel, Damage, ReadabilityClass};
use crate::tag_codec::{ProductRecord, TagUid, Type2Tag};

/// Largest barcode tilt that still reads.
pub const BARCODE_MAX_TILT_DEG: u16 = 8;
/// Last barcode angle covered by the angle experiment.
pub const BARCODE_SWEEP_MAX_DEG: u32 = 172;
pub const BARCODE_LATENCY_MS: f64 = 300.0;

pub const NFC_RANGE_CM: f64 = 10.0;
pub const NFC_RATE_BPS: f64 = 424_000.0;
pub const NFC_SETUP_MS: f64 = 10.0;
/// Nominal reader supply current. Recorded only; not used by the model.
pub const NFC_SUPPLY_CURRENT_MA: f64 = 15.0;
/// Footprint of a Type-2 tag sticker; measured sizes range over 30-40 mm.
pub const NFC_TAG_SIZE_MM: f64 = 35.0;

/// Distance used for "in range" reference reads.
pub const REFERENCE_NFC_DISTANCE_CM: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ReaderKind {
    BarcodeReader,
    NfcReader,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Technology {
    Barcode,
    Nfc,
}

impl Technology {
    pub fn as_str(self) -> &'static str {
        match self {
            Technology::Barcode => "barcode",
            Technology::Nfc => "nfc",
        }
    }

    pub fn reader(self) -> ReaderKind {
        match self {
            Technology::Barcode => ReaderKind::BarcodeReader,
            Technology::Nfc => ReaderKind::NfcReader,
        }
    }
}

impl std::str::FromStr for Technology {
    type Err = ScanError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "barcode" => Ok(Technology::Barcode),
            "nfc" => Ok(Technology::Nfc),
            _ => Err(ScanError::UnknownTechnology(s.to_owned())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScanError {
    #[error("distance must be finite and non-negative, got {0}")]
    InvalidDistance(f64),
    #[error("sweep step must be at least 1 degree")]
    ZeroStep,
    #[error("unknown technology {0:?}")]
    UnknownTechnology(String),
    #[error("success probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),
}

/// Conditions of a single read attempt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanContext {
    tilt_deg: u16,
    distance_cm: f64,
    damage: Damage,
    reader: ReaderKind,
}

impl ScanContext {
    /// Tilt is normalized into `[0, 360)`.
    pub fn new(
        tilt_deg: i64,
        distance_cm: f64,
        damage: Damage,
        reader: ReaderKind,
    ) -> Result<Self, ScanError> {
        if !distance_cm.is_finite() || distance_cm < 0.0 {
            return Err(ScanError::InvalidDistance(distance_cm));
        }
        Ok(ScanContext {
            tilt_deg: tilt_deg.rem_euclid(360) as u16,
            distance_cm,
            damage,
            reader,
        })
    }

    pub fn tilt_deg(&self) -> u16 {
        self.tilt_deg
    }

    pub fn distance_cm(&self) -> f64 {
        self.distance_cm
    }

    pub fn damage(&self) -> Damage {
        self.damage
    }

    pub fn reader(&self) -> ReaderKind {
        self.reader
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FailureReason {
    Angle,
    Range,
    Damage,
    Size,
    /// Wrong reader for the carrier, or no readable frame on the tag.
    Mismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanPayload {
    /// Raw TLV value read from a tag.
    Bytes(Vec<u8>),
    /// Decoded barcode text.
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanOutcome {
    pub success: bool,
    pub failure_reason: Option<FailureReason>,
    pub latency_ms: f64,
    pub payload: Option<ScanPayload>,
}

impl ScanOutcome {
    pub fn read(payload: ScanPayload, latency_ms: f64) -> Self {
        debug_assert!(latency_ms > 0.0);
        ScanOutcome {
            success: true,
            failure_reason: None,
            latency_ms,
            payload: Some(payload),
        }
    }

    pub fn failed(reason: FailureReason, latency_ms: f64) -> Self {
        ScanOutcome {
            success: false,
            failure_reason: Some(reason),
            latency_ms,
            payload: None,
        }
    }
}

/// How DIFFICULT-class barcode labels behave.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ScanMode {
    /// DIFFICULT labels always read.
    #[default]
    Deterministic,
    /// DIFFICULT labels read with the given probability.
    Stochastic { difficult_success: f64 },
}

impl ScanMode {
    pub fn stochastic(difficult_success: f64) -> Result<Self, ScanError> {
        if !(0.0..=1.0).contains(&difficult_success) {
            return Err(ScanError::InvalidProbability(difficult_success));
        }
        Ok(ScanMode::Stochastic { difficult_success })
    }
}

/// Folds a tilt into `[0, 180]`; a flat label reads the same at `t` and `360 - t`.
pub fn fold_tilt(tilt_deg: u16) -> u16 {
    let t = tilt_deg % 360;
    if t > 180 {
        360 - t
    } else {
        t
    }
}

/// Deterministic barcode read.
pub fn scan_barcode(label: &BarcodeLabel, ctx: &ScanContext) -> ScanOutcome {
    barcode_attempt(label, ctx, |_| true)
}

/// Barcode read in the given mode. The generator is consulted only for
/// DIFFICULT labels in stochastic mode.
pub fn scan_barcode_with<R: Rng + ?Sized>(
    label: &BarcodeLabel,
    ctx: &ScanContext,
    mode: ScanMode,
    rng: &mut R,
) -> ScanOutcome {
    barcode_attempt(label, ctx, |class| match (mode, class) {
        (ScanMode::Stochastic { difficult_success }, ReadabilityClass::Difficult) => {
            rng.random_bool(difficult_success)
        }
        _ => true,
    })
}

fn barcode_attempt(
    label: &BarcodeLabel,
    ctx: &ScanContext,
    mut difficult_reads: impl FnMut(ReadabilityClass) -> bool,
) -> ScanOutcome {
    if ctx.reader != ReaderKind::BarcodeReader {
        return ScanOutcome::failed(FailureReason::Mismatch, 0.0);
    }
    if ctx.damage != Damage::None || label.damage() != Damage::None {
        return ScanOutcome::failed(FailureReason::Damage, BARCODE_LATENCY_MS);
    }
    if fold_tilt(ctx.tilt_deg) > BARCODE_MAX_TILT_DEG {
        return ScanOutcome::failed(FailureReason::Angle, BARCODE_LATENCY_MS);
    }
    let class = label.readability();
    let readable = match class {
        ReadabilityClass::Easy => true,
        ReadabilityClass::Difficult => difficult_reads(class),
        ReadabilityClass::VeryDifficult => false,
    };
    if !readable {
        return ScanOutcome::failed(FailureReason::Size, BARCODE_LATENCY_MS);
    }
    ScanOutcome::read(
        ScanPayload::Text(label.chars().to_owned()),
        BARCODE_LATENCY_MS,
    )
}

/// Time to pair with a tag and transfer `payload_len` bytes.
pub fn nfc_latency_ms(payload_len: usize) -> f64 {
    let bits = (payload_len * 8) as f64;
    NFC_SETUP_MS + bits / NFC_RATE_BPS * 1000.0
}

/// NFC read. Tilt and damage are ignored; only range matters.
pub fn scan_nfc(tag: &Type2Tag, ctx: &ScanContext) -> ScanOutcome {
    if ctx.reader != ReaderKind::NfcReader {
        return ScanOutcome::failed(FailureReason::Mismatch, 0.0);
    }
    if ctx.distance_cm > NFC_RANGE_CM {
        return ScanOutcome::failed(FailureReason::Range, 0.0);
    }
    match tag.payload() {
        Ok(payload) => ScanOutcome::read(
            ScanPayload::Bytes(payload.to_vec()),
            nfc_latency_ms(payload.len()),
        ),
        Err(_) => ScanOutcome::failed(FailureReason::Mismatch, NFC_SETUP_MS),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub technology: Technology,
    pub angle_deg: u32,
    pub readable: bool,
}

/// Reference label for sweeps: undamaged EAN-8, 33 mm, EASY.
pub fn reference_label() -> BarcodeLabel {
    BarcodeLabel::ean("7351353").expect("valid EAN-8 payload")
}

/// Reference tag for sweeps: a written product record.
pub fn reference_tag() -> Type2Tag {
    let record = ProductRecord {
        product_id: 1001,
        name: "USB-C Cable".into(),
        price_minor: 1999,
        manufacturing_date: 0,
        expiry_date: 0,
        delivery_date: 0,
    };
    let mut tag = Type2Tag::blank(TagUid::from_serial(0));
    tag.write_record(&record).expect("reference record fits");
    tag
}

/// Sampled angles for a sweep. Barcode sampling covers 0..=172 and stops at
/// the first multiple of `step` reaching 172; NFC samples `[0, 360)`.
pub fn sweep_angle_points(technology: Technology, step_deg: u32) -> Result<Vec<u32>, ScanError> {
    if step_deg == 0 {
        return Err(ScanError::ZeroStep);
    }
    let points = match technology {
        Technology::Barcode => {
            let count = BARCODE_SWEEP_MAX_DEG.div_ceil(step_deg) + 1;
            (0..count).map(|k| k * step_deg).collect()
        }
        Technology::Nfc => (0..360).step_by(step_deg as usize).collect(),
    };
    Ok(points)
}

/// Readability at each sampled angle for an undamaged reference carrier.
pub fn sweep_angles(technology: Technology, step_deg: u32) -> Result<Vec<SweepRow>, ScanError> {
    let label = reference_label();
    let tag = reference_tag();
    let rows = sweep_angle_points(technology, step_deg)?
        .into_iter()
        .map(|angle| {
            let ctx = ScanContext::new(
                i64::from(angle),
                REFERENCE_NFC_DISTANCE_CM,
                Damage::None,
                technology.reader(),
            )
            .expect("finite reference distance");
            let outcome = match technology {
                Technology::Barcode => scan_barcode(&label, &ctx),
                Technology::Nfc => scan_nfc(&tag, &ctx),
            };
            SweepRow {
                technology,
                angle_deg: angle,
                readable: outcome.success,
            }
        })
        .collect();
    Ok(rows)
}

pub const SWEEP_CSV_HEADER: &str = "technology,angle_deg,readable";

/// CSV rendering with LF line endings.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            row.technology.as_str(),
            row.angle_deg,
            row.readable
        ));
    }
    out
}
