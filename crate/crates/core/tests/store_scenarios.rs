use std::sync::Arc;

use chrono::{Duration, TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tagstock_core::inventory::persist::{self, open_store, EVENTS_FILE, SNAPSHOT_FILE};
use tagstock_core::inventory::{
    parse_log, render_log, CarrierKind, CarrierRef, EventKind, InventoryError, ItemStatus,
    ScanTarget, SteppingClock, Store,
};
use tagstock_core::scan::{scan_barcode, scan_nfc, ReaderKind, ScanContext};
use tagstock_core::{Damage, ProductRecord, ScanOutcome};

fn clock() -> Arc<SteppingClock> {
    let start = Utc.with_ymd_and_hms(2026, 10, 16, 8, 0, 0).unwrap();
    Arc::new(SteppingClock::new(start, Duration::milliseconds(1500)))
}

fn record(id: u32, price: u32) -> ProductRecord {
    ProductRecord {
        product_id: id,
        name: format!("Product {id}"),
        price_minor: price,
        manufacturing_date: 9000,
        expiry_date: 9300,
        delivery_date: 9010,
    }
}

fn read(store: &Store, carrier: &CarrierRef) -> ScanOutcome {
    match store.scan_target(carrier).expect("carrier exists") {
        ScanTarget::Tag(tag) => scan_nfc(
            tag,
            &ScanContext::new(90, 2.0, Damage::Wrinkled, ReaderKind::NfcReader).unwrap(),
        ),
        ScanTarget::Label(label) => scan_barcode(
            label,
            &ScanContext::new(3, 0.0, Damage::None, ReaderKind::BarcodeReader).unwrap(),
        ),
    }
}

fn check_conservation(store: &Store) {
    let provisioned = store
        .events()
        .iter()
        .filter(|e| e.kind() == EventKind::Provisioned)
        .count();
    let in_stock = store.items(Some(ItemStatus::InStock)).count();
    let sold = store.items(Some(ItemStatus::Sold)).count();
    assert_eq!(in_stock + sold, provisioned);
}

/// Random command sequence; returns the store and every command's result code.
fn run_scenario(seed: u64, steps: usize, store: &mut Store) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut results = Vec::new();
    for _ in 0..steps {
        let id = rng.random_range(1..20u32);
        let result = match rng.random_range(0..5) {
            0 | 1 => {
                let kind = if rng.random_bool(0.5) {
                    CarrierKind::Nfc
                } else {
                    CarrierKind::Barcode
                };
                store
                    .provision(record(id, rng.random_range(1..10_000)), kind)
                    .map(|_| "ok")
            }
            2 | 3 => match store
                .item(&id.to_string().as_str().into())
                .map(|i| i.carrier)
            {
                Some(carrier) => {
                    let scan = read(store, &carrier);
                    store.checkout(&scan).map(|_| "ok")
                }
                None => Ok("skip"),
            },
            _ => {
                let sku = id.to_string().as_str().into();
                let price = rng.random_range(1..10_000);
                match store.item(&sku).map(|i| i.carrier.kind()) {
                    Some(CarrierKind::Nfc) => store.reprice_sku(&sku, price).map(|_| "ok"),
                    Some(CarrierKind::Barcode) => store.replace_label(&sku, price).map(|_| "ok"),
                    None => Ok("skip"),
                }
            }
        };
        results.push(match result {
            Ok(s) => s.to_owned(),
            Err(e) => e.code().to_owned(),
        });
        check_conservation(store);
    }
    results
}

#[test]
fn scenarios_replay_to_live_state() {
    for seed in 0..25 {
        let mut live = Store::with_clock(clock());
        let results = run_scenario(seed, 80, &mut live);
        assert!(results
            .iter()
            .any(|r| r == "ALREADY_SOLD" || r == "DUPLICATE_SKU"));

        // running the scenario twice gives the same state
        let mut again = Store::with_clock(clock());
        assert_eq!(run_scenario(seed, 80, &mut again), results);
        assert_eq!(again.snapshot().to_json(), live.snapshot().to_json());

        let log = render_log(live.events());
        let replayed = Store::replay(parse_log(&log).unwrap()).unwrap();
        assert_eq!(
            replayed.snapshot().to_json(),
            live.snapshot().to_json(),
            "seed {seed}"
        );
        check_conservation(&replayed);

        // receipts are gap-free and totals match their lines
        for id in 1..live.next_receipt_id() {
            let r = live.receipt(id).expect("no gaps");
            assert_eq!(
                r.total_minor,
                r.lines
                    .iter()
                    .map(|l| u64::from(l.price_minor))
                    .sum::<u64>()
            );
            assert!(!r.lines.is_empty());
        }
    }
}

#[test]
fn data_dir_recovery() {
    let dir = tempfile::tempdir().unwrap();
    let expected = {
        let mut store = open_store(dir.path(), clock(), Some(7)).unwrap();
        run_scenario(42, 60, &mut store);
        store.snapshot()
    };
    assert!(dir.path().join(SNAPSHOT_FILE).exists());
    let on_disk = persist::read_snapshot(dir.path()).unwrap().unwrap();
    assert!(on_disk.last_seq <= expected.last_seq);
    assert_eq!(on_disk.last_seq % 7, 0);

    let reopened = open_store(dir.path(), clock(), Some(7)).unwrap();
    assert_eq!(reopened.snapshot(), expected);

    // the full log alone rebuilds the same state
    std::fs::remove_file(dir.path().join(SNAPSHOT_FILE)).unwrap();
    let from_log = open_store(dir.path(), clock(), None).unwrap();
    assert_eq!(from_log.snapshot().to_json(), expected.to_json());
}

#[test]
fn reopened_store_keeps_appending() {
    let dir = tempfile::tempdir().unwrap();
    {
        let mut store = open_store(dir.path(), clock(), None).unwrap();
        store.provision(record(1, 100), CarrierKind::Nfc).unwrap();
    }
    let mut store = open_store(dir.path(), clock(), None).unwrap();
    let item = store.provision(record(2, 100), CarrierKind::Nfc).unwrap();
    assert_eq!(item.carrier.to_string(), "nfc:04000000000002");
    let scan = read(&store, &item.carrier);
    assert_eq!(store.checkout(&scan).unwrap().receipt_id, 1);

    let text = std::fs::read_to_string(dir.path().join(EVENTS_FILE)).unwrap();
    let seqs: Vec<u64> = parse_log(&text).unwrap().iter().map(|e| e.seq).collect();
    assert_eq!(seqs, vec![1, 2, 3]);
}

#[test]
fn corrupt_log_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    {
        let mut store = open_store(dir.path(), clock(), None).unwrap();
        store.provision(record(1, 100), CarrierKind::Nfc).unwrap();
        store
            .provision(record(2, 100), CarrierKind::Barcode)
            .unwrap();
    }
    let path = dir.path().join(EVENTS_FILE);
    let text = std::fs::read_to_string(&path).unwrap();
    let truncated = &text[..text.len() - 5];
    std::fs::write(&path, truncated).unwrap();
    assert!(matches!(
        open_store(dir.path(), clock(), None),
        Err(InventoryError::CorruptLog { .. })
    ));

    let mut lines: Vec<&str> = text.lines().collect();
    lines.swap(0, 1);
    std::fs::write(&path, lines.join("\n") + "\n").unwrap();
    assert!(matches!(
        open_store(dir.path(), clock(), None),
        Err(InventoryError::CorruptLog { .. })
    ));
}
