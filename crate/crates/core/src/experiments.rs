//! The barcode-vs-NFC comparisons as reproducible CSV tables.
//!
//! All numbers are printed with two decimals and a `.` separator; all
//! lines end in LF. Output is byte-identical across runs.

use crate::barcode::{readability_class, width_model, ReadabilityClass};
use crate::scan::{
    scan_barcode, scan_nfc, sweep_angles, sweep_csv, ReaderKind, ScanContext, ScanError,
    Technology, NFC_TAG_SIZE_MM, REFERENCE_NFC_DISTANCE_CM,
};
use crate::tag_codec::{TagUid, Type2Tag, MAX_TLV_PAYLOAD};
use crate::Damage;

/// Barcode character counts measured for the size experiment.
pub const BARCODE_SIZE_POINTS: [usize; 4] = [8, 12, 20, 30];
/// NFC payload sizes measured for the size experiment.
pub const NFC_SIZE_POINTS: [usize; 3] = [8, 20, 128];

/// Angle readability for both technologies: barcode rows, then NFC rows.
pub fn table2_csv(step_deg: u32) -> Result<String, ScanError> {
    let mut rows = sweep_angles(Technology::Barcode, step_deg)?;
    rows.extend(sweep_angles(Technology::Nfc, step_deg)?);
    Ok(sweep_csv(&rows))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeRow {
    pub technology: Technology,
    pub char_count: usize,
    pub size_mm: f64,
    pub class: ReadabilityClass,
}

pub fn table3_rows() -> Vec<SizeRow> {
    let barcode = BARCODE_SIZE_POINTS.iter().map(|&n| {
        let size_mm = width_model(n).expect("measured points are in range");
        SizeRow {
            technology: Technology::Barcode,
            char_count: n,
            size_mm,
            class: readability_class(size_mm),
        }
    });
    // a tag's footprint does not depend on how much of it is used
    let nfc = NFC_SIZE_POINTS.iter().map(|&n| SizeRow {
        technology: Technology::Nfc,
        char_count: n,
        size_mm: NFC_TAG_SIZE_MM,
        class: readability_class(NFC_TAG_SIZE_MM),
    });
    barcode.chain(nfc).collect()
}

pub fn table3_csv() -> String {
    let mut out = String::from("technology,char_count,size_mm,readability_class\n");
    for row in table3_rows() {
        out.push_str(&format!(
            "{},{},{:.2},{}\n",
            row.technology.as_str(),
            row.char_count,
            row.size_mm,
            row.class.as_str()
        ));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatencySummary {
    pub items: usize,
    pub nfc_payload_bytes: usize,
    pub barcode_mean_ms: f64,
    pub nfc_mean_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatencyError {
    #[error("need at least one item")]
    NoItems,
    #[error("payload of {0} bytes does not fit a tag (max {MAX_TLV_PAYLOAD})")]
    PayloadTooLarge(usize),
}

/// Mean per-item read latency at the counter for `items` products, each
/// carrying an EAN-13 label and a tag holding `nfc_payload_bytes` bytes.
pub fn latency_compare(
    items: usize,
    nfc_payload_bytes: usize,
) -> Result<LatencySummary, LatencyError> {
    if items == 0 {
        return Err(LatencyError::NoItems);
    }
    if nfc_payload_bytes > MAX_TLV_PAYLOAD {
        return Err(LatencyError::PayloadTooLarge(nfc_payload_bytes));
    }
    let barcode_ctx =
        ScanContext::new(0, 0.0, Damage::None, ReaderKind::BarcodeReader).expect("valid context");
    let nfc_ctx = ScanContext::new(
        0,
        REFERENCE_NFC_DISTANCE_CM,
        Damage::None,
        ReaderKind::NfcReader,
    )
    .expect("valid context");

    let mut barcode_total = 0.0;
    let mut nfc_total = 0.0;
    for i in 0..items {
        let label = crate::inventory::label_for_product(i as u32);
        barcode_total += scan_barcode(&label, &barcode_ctx).latency_ms;

        let mut tag = Type2Tag::blank(TagUid::from_serial(i as u64 + 1));
        let payload: Vec<u8> = (0..nfc_payload_bytes).map(|b| (b + i) as u8).collect();
        tag.write_payload(&payload).expect("size checked");
        nfc_total += scan_nfc(&tag, &nfc_ctx).latency_ms;
    }
    Ok(LatencySummary {
        items,
        nfc_payload_bytes,
        barcode_mean_ms: barcode_total / items as f64,
        nfc_mean_ms: nfc_total / items as f64,
    })
}

impl LatencySummary {
    pub fn to_csv(&self) -> String {
        format!(
            "technology,items,payload_bytes,mean_latency_ms\n\
             barcode,{n},13,{b:.2}\n\
             nfc,{n},{p},{c:.2}\n",
            n = self.items,
            p = self.nfc_payload_bytes,
            b = self.barcode_mean_ms,
            c = self.nfc_mean_ms,
        )
    }
}
