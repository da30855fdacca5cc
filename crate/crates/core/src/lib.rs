//! Inventory control with NFC Type-2 tags or printed barcodes.
//!
//! - [`tag_codec`]: product records and the 128-byte tag they live on
//! - [`barcode`]: Code 39 / EAN symbol text, check characters, label width
//! - [`scan`]: read-attempt simulation for both reader kinds
//! - [`inventory`]: event-sourced catalog and checkout
//! - [`experiments`]: the comparison tables as CSV

pub mod barcode;
pub mod experiments;
pub mod hexdump;
pub mod inventory;
pub mod scan;
pub mod tag_codec;

pub use barcode::{BarcodeLabel, Damage, ReadabilityClass, Symbology};
pub use hexdump::hex_dump;
pub use inventory::{
    CarrierKind, CarrierRef, InventoryError, InventoryItem, ItemStatus, Receipt, Sku, Store,
    StoreEvent,
};
pub use scan::{
    FailureReason, ReaderKind, ScanContext, ScanMode, ScanOutcome, ScanPayload, Technology,
};
pub use tag_codec::{ProductRecord, TagUid, Type2Tag};
