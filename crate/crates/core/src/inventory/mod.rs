//! Catalog, stock and checkout for a single store.
//!
//! State changes are recorded as [`StoreEvent`]s; replaying the log
//! rebuilds the same state. See [`persist`] for the on-disk layout.

mod clock;
mod event;
mod model;
pub mod persist;
mod store;

use thiserror::Error;

pub use clock::{Clock, SteppingClock, SystemClock};
pub use event::{
    parse_log, render_log, EventBody, EventKind, Provisioned, Repriced, Sold, StoreEvent,
};
pub use model::{
    CarrierKind, CarrierRef, InventoryItem, ItemStatus, LabelId, ParseCarrierError, Receipt,
    ReceiptLine, Sku, Timestamp,
};
pub use store::{label_for_product, Journal, ScanTarget, Snapshot, Store};

use crate::scan::FailureReason;
use crate::tag_codec::CodecError;

#[derive(Debug, Error)]
pub enum InventoryError {
    #[error("sku {0} already exists")]
    DuplicateSku(Sku),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("scan failed ({})", reason_str(*.0))]
    ScanFailed(Option<FailureReason>),
    #[error("product {0} is not in the catalog")]
    UnknownProduct(u32),
    #[error("item {0} is already sold")]
    AlreadySold(Sku),
    #[error("scan payload is not a product: {0}")]
    MalformedPayload(String),
    #[error("item {0} carries a printed barcode; print a replacement label to change its price")]
    ImmutableCarrier(Sku),
    #[error("item {0} has been sold")]
    ItemSold(Sku),
    #[error("item {0} is not barcode-labelled")]
    NotBarcodeCarrier(Sku),
    #[error("no item is bound to carrier {0}")]
    UnknownCarrier(CarrierRef),
    #[error("no item with sku {0}")]
    UnknownSku(Sku),
    #[error("corrupt event log at line {line}: {reason}")]
    CorruptLog { line: usize, reason: String },
    #[error("corrupt snapshot: {0}")]
    CorruptSnapshot(String),
    #[error("store invariant violated: {0}")]
    Inconsistent(String),
    #[error("journal i/o: {0}")]
    Io(#[from] std::io::Error),
}

fn reason_str(reason: Option<FailureReason>) -> &'static str {
    match reason {
        Some(FailureReason::Angle) => "ANGLE",
        Some(FailureReason::Range) => "RANGE",
        Some(FailureReason::Damage) => "DAMAGE",
        Some(FailureReason::Size) => "SIZE",
        Some(FailureReason::Mismatch) => "MISMATCH",
        None => "unknown",
    }
}

impl InventoryError {
    /// Stable machine-readable name of the error.
    pub fn code(&self) -> &'static str {
        match self {
            InventoryError::DuplicateSku(_) => "DUPLICATE_SKU",
            InventoryError::Codec(e) => match e {
                CodecError::InvalidName(_) => "INVALID_NAME",
                CodecError::InvalidDates { .. } => "INVALID_DATES",
                CodecError::CapacityExceeded(_) => "CAPACITY_EXCEEDED",
                CodecError::TagLocked => "TAG_LOCKED",
                CodecError::BadVersion(_)
                | CodecError::Truncated { .. }
                | CodecError::TrailingGarbage(_)
                | CodecError::BlankTag
                | CodecError::MalformedTlv(_) => "MALFORMED_PAYLOAD",
            },
            InventoryError::ScanFailed(_) => "SCAN_FAILED",
            InventoryError::UnknownProduct(_) => "UNKNOWN_PRODUCT",
            InventoryError::AlreadySold(_) => "ALREADY_SOLD",
            InventoryError::MalformedPayload(_) => "MALFORMED_PAYLOAD",
            InventoryError::ImmutableCarrier(_) => "IMMUTABLE_CARRIER",
            InventoryError::ItemSold(_) => "ITEM_SOLD",
            InventoryError::NotBarcodeCarrier(_) => "NOT_BARCODE_CARRIER",
            InventoryError::UnknownCarrier(_) => "UNKNOWN_CARRIER",
            InventoryError::UnknownSku(_) => "UNKNOWN_SKU",
            InventoryError::CorruptLog { .. } => "CORRUPT_LOG",
            InventoryError::CorruptSnapshot(_) => "CORRUPT_SNAPSHOT",
            InventoryError::Inconsistent(_) => "INCONSISTENT",
            InventoryError::Io(_) => "IO",
        }
    }
}
