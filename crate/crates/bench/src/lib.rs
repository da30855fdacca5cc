//! Shared fixtures for the benchmarks.

use tagstock_core::inventory::ScanTarget;
use tagstock_core::scan::{scan_barcode, scan_nfc};
use tagstock_core::{
    CarrierKind, CarrierRef, Damage, ProductRecord, ReaderKind, ScanContext, ScanOutcome, Store,
};

/// A valid record whose name is `name_len` bytes long.
pub fn record(product_id: u32, name_len: usize) -> ProductRecord {
    ProductRecord {
        product_id,
        name: "n".repeat(name_len.max(1)),
        price_minor: 1999,
        manufacturing_date: 9000,
        expiry_date: 9400,
        delivery_date: 9100,
    }
}

/// A store holding `n` items, alternating NFC tags and barcode labels.
pub fn stocked_store(n: u32) -> (Store, Vec<CarrierRef>) {
    let mut store = Store::new();
    let carriers = (0..n)
        .map(|i| {
            let kind = if i % 2 == 0 {
                CarrierKind::Nfc
            } else {
                CarrierKind::Barcode
            };
            store
                .provision(record(i + 1, 12), kind)
                .expect("fresh sku")
                .carrier
        })
        .collect();
    (store, carriers)
}

/// A successful read of `carrier` at the counter.
pub fn read(store: &Store, carrier: &CarrierRef) -> ScanOutcome {
    match store.scan_target(carrier).expect("bound carrier") {
        ScanTarget::Tag(tag) => scan_nfc(
            tag,
            &ScanContext::new(0, 3.0, Damage::None, ReaderKind::NfcReader).expect("context"),
        ),
        ScanTarget::Label(label) => scan_barcode(
            label,
            &ScanContext::new(0, 3.0, Damage::None, ReaderKind::BarcodeReader).expect("context"),
        ),
    }
}
