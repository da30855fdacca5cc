use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::clock::{Clock, SystemClock};
use super::event::{EventBody, Provisioned, Repriced, Sold, StoreEvent};
use super::model::{
    CarrierKind, CarrierRef, InventoryItem, ItemStatus, LabelId, Receipt, ReceiptLine, Sku,
};
use super::InventoryError;
use crate::barcode::{validate, BarcodeLabel, Symbology};
use crate::scan::{ScanOutcome, ScanPayload};
use crate::tag_codec::{decode_record, write_tag, ProductRecord, TagUid, Type2Tag};

/// Destination for committed events, written before the event is applied.
pub trait Journal: Send {
    fn append(&mut self, event: &StoreEvent) -> std::io::Result<()>;

    fn checkpoint_due(&self, _last_seq: u64) -> bool {
        false
    }

    fn checkpoint(&mut self, _snapshot: &Snapshot) -> std::io::Result<()> {
        Ok(())
    }
}

/// Serialized store state. `items` are ordered by SKU, `receipts` by id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub items: Vec<InventoryItem>,
    pub next_receipt_id: u64,
    pub last_seq: u64,
    pub receipts: Vec<Receipt>,
    pub next_tag_serial: u64,
    pub next_label_serial: u64,
}

impl Snapshot {
    /// Pretty-printed JSON document with a trailing LF.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("snapshot serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self, InventoryError> {
        serde_json::from_str(text).map_err(|e| InventoryError::CorruptSnapshot(e.to_string()))
    }
}

/// What a reader would find at a carrier.
#[derive(Debug, Clone, Copy)]
pub enum ScanTarget<'a> {
    Tag(&'a Type2Tag),
    Label(&'a BarcodeLabel),
}

/// Catalog, carriers, receipts and the event log of one store.
///
/// Every mutation is an event: commands validate, append the event to the
/// journal, then apply it through the same path replay uses.
#[derive(Debug)]
pub struct Store {
    items: BTreeMap<Sku, InventoryItem>,
    by_carrier: HashMap<CarrierRef, Sku>,
    tags: HashMap<TagUid, Type2Tag>,
    labels: HashMap<LabelId, BarcodeLabel>,
    receipts: BTreeMap<u64, Receipt>,
    next_receipt_id: u64,
    next_tag_serial: u64,
    next_label_serial: u64,
    last_seq: u64,
    log: Vec<StoreEvent>,
    clock: Arc<dyn Clock>,
    journal: Option<Box<dyn Journal>>,
}

impl std::fmt::Debug for dyn Journal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Journal")
    }
}

impl Default for Store {
    fn default() -> Self {
        Store::new()
    }
}

/// EAN-13 label text for a product id: the id zero-padded to 12 digits.
pub fn label_for_product(product_id: u32) -> BarcodeLabel {
    BarcodeLabel::ean(&format!("{product_id:012}")).expect("12-digit payload")
}

fn tag_serial(uid: &TagUid) -> u64 {
    let mut bytes = [0u8; 8];
    bytes[2..].copy_from_slice(&uid.0[1..]);
    u64::from_be_bytes(bytes)
}

impl Store {
    pub fn new() -> Self {
        Store::with_clock(Arc::new(SystemClock))
    }

    pub fn with_clock(clock: Arc<dyn Clock>) -> Self {
        Store {
            items: BTreeMap::new(),
            by_carrier: HashMap::new(),
            tags: HashMap::new(),
            labels: HashMap::new(),
            receipts: BTreeMap::new(),
            next_receipt_id: 1,
            next_tag_serial: 1,
            next_label_serial: 1,
            last_seq: 0,
            log: Vec::new(),
            clock,
            journal: None,
        }
    }

    pub fn set_journal(&mut self, journal: Box<dyn Journal>) {
        self.journal = Some(journal);
    }

    pub fn set_clock(&mut self, clock: Arc<dyn Clock>) {
        self.clock = clock;
    }

    /// Rebuilds a store from a gap-free event sequence starting at 1.
    pub fn replay<I>(events: I) -> Result<Store, InventoryError>
    where
        I: IntoIterator<Item = StoreEvent>,
    {
        let mut store = Store::new();
        store.replay_onto(events)?;
        Ok(store)
    }

    /// Applies events continuing from the current `last_seq`.
    pub fn replay_onto<I>(&mut self, events: I) -> Result<(), InventoryError>
    where
        I: IntoIterator<Item = StoreEvent>,
    {
        for event in events {
            let seq = event.seq;
            self.apply(event)
                .map_err(|reason| InventoryError::CorruptLog {
                    line: seq as usize,
                    reason,
                })?;
        }
        Ok(())
    }

    pub fn from_snapshot(snapshot: Snapshot) -> Result<Store, InventoryError> {
        let corrupt = |m: String| InventoryError::CorruptSnapshot(m);
        let mut store = Store::new();
        for item in snapshot.items {
            store.bind_carrier(&item).map_err(corrupt)?;
            store.items.insert(item.sku.clone(), item);
        }
        for receipt in snapshot.receipts {
            store.receipts.insert(receipt.receipt_id, receipt);
        }
        store.next_receipt_id = snapshot.next_receipt_id;
        store.last_seq = snapshot.last_seq;
        store.next_tag_serial = snapshot.next_tag_serial;
        store.next_label_serial = snapshot.next_label_serial;
        Ok(store)
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            items: self.items.values().cloned().collect(),
            next_receipt_id: self.next_receipt_id,
            last_seq: self.last_seq,
            receipts: self.receipts.values().cloned().collect(),
            next_tag_serial: self.next_tag_serial,
            next_label_serial: self.next_label_serial,
        }
    }

    // --- commands ---

    /// Adds a product, minting a fresh NFC tag or EAN-13 label for it.
    pub fn provision(
        &mut self,
        record: ProductRecord,
        carrier_kind: CarrierKind,
    ) -> Result<InventoryItem, InventoryError> {
        record.validate()?;
        let sku = Sku::for_product(record.product_id);
        if self.items.contains_key(&sku) {
            return Err(InventoryError::DuplicateSku(sku));
        }
        let carrier = match carrier_kind {
            CarrierKind::Nfc => {
                let uid = TagUid::from_serial(self.next_tag_serial);
                write_tag(&Type2Tag::blank(uid), &record)?;
                CarrierRef::Nfc(uid)
            }
            CarrierKind::Barcode => CarrierRef::Barcode(LabelId(self.next_label_serial)),
        };
        self.commit(EventBody::Provisioned(Provisioned {
            sku: sku.clone(),
            record,
            carrier,
        }))?;
        Ok(self.items[&sku].clone())
    }

    /// Sells the item identified by a successful scan.
    pub fn checkout(&mut self, scan: &ScanOutcome) -> Result<Receipt, InventoryError> {
        if !scan.success {
            return Err(InventoryError::ScanFailed(scan.failure_reason));
        }
        let product_id = match &scan.payload {
            Some(ScanPayload::Bytes(bytes)) => {
                decode_record(bytes)
                    .map_err(|e| InventoryError::MalformedPayload(e.to_string()))?
                    .product_id
            }
            Some(ScanPayload::Text(text)) => product_id_from_barcode(text)?,
            None => return Err(InventoryError::MalformedPayload("no payload".into())),
        };
        let sku = Sku::for_product(product_id);
        let item = self
            .items
            .get(&sku)
            .ok_or(InventoryError::UnknownProduct(product_id))?;
        if item.status == ItemStatus::Sold {
            return Err(InventoryError::AlreadySold(sku));
        }
        let receipt_id = self.next_receipt_id;
        let price_minor = item.record.price_minor;
        self.commit(EventBody::Sold(Sold {
            sku,
            receipt_id,
            price_minor,
        }))?;
        Ok(self.receipts[&receipt_id].clone())
    }

    /// Rewrites the price on an NFC-tagged item's tag.
    pub fn reprice(
        &mut self,
        carrier: &CarrierRef,
        new_price_minor: u32,
    ) -> Result<InventoryItem, InventoryError> {
        let sku = self
            .by_carrier
            .get(carrier)
            .cloned()
            .ok_or(InventoryError::UnknownCarrier(*carrier))?;
        self.reprice_sku(&sku, new_price_minor)
    }

    pub fn reprice_sku(
        &mut self,
        sku: &Sku,
        new_price_minor: u32,
    ) -> Result<InventoryItem, InventoryError> {
        let item = self.in_stock_item(sku)?;
        let uid = match item.carrier {
            CarrierRef::Nfc(uid) => uid,
            CarrierRef::Barcode(_) => return Err(InventoryError::ImmutableCarrier(sku.clone())),
        };
        let old_price_minor = item.record.price_minor;
        let updated = ProductRecord {
            price_minor: new_price_minor,
            ..item.record.clone()
        };
        write_tag(&self.tags[&uid], &updated)?;
        self.commit(EventBody::Repriced(Repriced {
            sku: sku.clone(),
            old_price_minor,
            new_price_minor,
            replacement_label: None,
        }))?;
        Ok(self.items[sku].clone())
    }

    /// Retires a barcode item's label and prints a new one at a new price.
    pub fn replace_label(
        &mut self,
        sku: &Sku,
        new_price_minor: u32,
    ) -> Result<InventoryItem, InventoryError> {
        let item = self.in_stock_item(sku)?;
        if item.carrier.kind() != CarrierKind::Barcode {
            return Err(InventoryError::NotBarcodeCarrier(sku.clone()));
        }
        let old_price_minor = item.record.price_minor;
        self.commit(EventBody::Repriced(Repriced {
            sku: sku.clone(),
            old_price_minor,
            new_price_minor,
            replacement_label: Some(LabelId(self.next_label_serial)),
        }))?;
        Ok(self.items[sku].clone())
    }

    fn in_stock_item(&self, sku: &Sku) -> Result<&InventoryItem, InventoryError> {
        let item = self
            .items
            .get(sku)
            .ok_or_else(|| InventoryError::UnknownSku(sku.clone()))?;
        if item.status == ItemStatus::Sold {
            return Err(InventoryError::ItemSold(sku.clone()));
        }
        Ok(item)
    }

    fn commit(&mut self, body: EventBody) -> Result<(), InventoryError> {
        let event = StoreEvent {
            seq: self.last_seq + 1,
            ts: self.clock.now(),
            body,
        };
        if let Some(journal) = self.journal.as_mut() {
            journal.append(&event)?;
        }
        self.apply(event).map_err(InventoryError::Inconsistent)?;

        let due = self
            .journal
            .as_ref()
            .is_some_and(|j| j.checkpoint_due(self.last_seq));
        if due {
            let snapshot = self.snapshot();
            if let Some(journal) = self.journal.as_mut() {
                if let Err(err) = journal.checkpoint(&snapshot) {
                    tracing::warn!(%err, seq = snapshot.last_seq, "snapshot write failed");
                }
            }
        }
        Ok(())
    }

    // --- event application ---

    /// Applies one event. All checks run before any state is touched.
    fn apply(&mut self, event: StoreEvent) -> Result<(), String> {
        if event.seq != self.last_seq + 1 {
            return Err(format!(
                "sequence gap: expected {}, found {}",
                self.last_seq + 1,
                event.seq
            ));
        }
        match &event.body {
            EventBody::Provisioned(p) => {
                if self.items.contains_key(&p.sku) {
                    return Err(format!("sku {} provisioned twice", p.sku));
                }
                if p.sku != Sku::for_product(p.record.product_id) {
                    return Err(format!("sku {} does not match product id", p.sku));
                }
                p.record.validate().map_err(|e| e.to_string())?;
                let item = InventoryItem {
                    sku: p.sku.clone(),
                    record: p.record.clone(),
                    carrier: p.carrier,
                    status: ItemStatus::InStock,
                    sold_at: None,
                };
                self.bind_carrier(&item)?;
                self.items.insert(p.sku.clone(), item);
            }
            EventBody::Sold(s) => {
                let item = self
                    .items
                    .get_mut(&s.sku)
                    .ok_or_else(|| format!("sale of unknown sku {}", s.sku))?;
                if item.status == ItemStatus::Sold {
                    return Err(format!("sku {} sold twice", s.sku));
                }
                if s.receipt_id != self.next_receipt_id {
                    return Err(format!(
                        "receipt id {} out of order, expected {}",
                        s.receipt_id, self.next_receipt_id
                    ));
                }
                if s.price_minor != item.record.price_minor {
                    return Err(format!("sale price differs from catalog for {}", s.sku));
                }
                item.status = ItemStatus::Sold;
                item.sold_at = Some(event.ts);
                let line = ReceiptLine {
                    sku: s.sku.clone(),
                    name: item.record.name.clone(),
                    price_minor: s.price_minor,
                };
                self.receipts.insert(
                    s.receipt_id,
                    Receipt::new(s.receipt_id, vec![line], event.ts),
                );
                self.next_receipt_id += 1;
            }
            EventBody::Repriced(r) => {
                let item = self
                    .items
                    .get(&r.sku)
                    .ok_or_else(|| format!("reprice of unknown sku {}", r.sku))?;
                if item.status == ItemStatus::Sold {
                    return Err(format!("reprice of sold sku {}", r.sku));
                }
                if item.record.price_minor != r.old_price_minor {
                    return Err(format!("old price mismatch for {}", r.sku));
                }
                let updated = ProductRecord {
                    price_minor: r.new_price_minor,
                    ..item.record.clone()
                };
                let new_carrier = match (item.carrier, r.replacement_label) {
                    (CarrierRef::Nfc(uid), None) => {
                        let tag =
                            write_tag(&self.tags[&uid], &updated).map_err(|e| e.to_string())?;
                        self.tags.insert(uid, tag);
                        CarrierRef::Nfc(uid)
                    }
                    (CarrierRef::Barcode(old), Some(new)) => {
                        if self.labels.contains_key(&new) || new.0 < self.next_label_serial {
                            return Err(format!("label {} reused", new.0));
                        }
                        self.labels.remove(&old);
                        self.by_carrier.remove(&CarrierRef::Barcode(old));
                        self.labels
                            .insert(new, label_for_product(updated.product_id));
                        self.by_carrier
                            .insert(CarrierRef::Barcode(new), r.sku.clone());
                        self.next_label_serial = new.0 + 1;
                        CarrierRef::Barcode(new)
                    }
                    (CarrierRef::Nfc(_), Some(_)) => {
                        return Err(format!("label replacement on NFC item {}", r.sku))
                    }
                    (CarrierRef::Barcode(_), None) => {
                        return Err(format!("in-place reprice of barcode item {}", r.sku))
                    }
                };
                let item = self.items.get_mut(&r.sku).expect("checked above");
                item.record = updated;
                item.carrier = new_carrier;
            }
        }
        self.last_seq = event.seq;
        self.log.push(event);
        Ok(())
    }

    /// Materializes the tag or label of an item and indexes it.
    fn bind_carrier(&mut self, item: &InventoryItem) -> Result<(), String> {
        if self.by_carrier.contains_key(&item.carrier) {
            return Err(format!("carrier {} bound twice", item.carrier));
        }
        match item.carrier {
            CarrierRef::Nfc(uid) => {
                let tag =
                    write_tag(&Type2Tag::blank(uid), &item.record).map_err(|e| e.to_string())?;
                self.tags.insert(uid, tag);
                self.next_tag_serial = self.next_tag_serial.max(tag_serial(&uid) + 1);
            }
            CarrierRef::Barcode(id) => {
                self.labels
                    .insert(id, label_for_product(item.record.product_id));
                self.next_label_serial = self.next_label_serial.max(id.0 + 1);
            }
        }
        self.by_carrier.insert(item.carrier, item.sku.clone());
        Ok(())
    }

    // --- queries ---

    pub fn items(&self, status: Option<ItemStatus>) -> impl Iterator<Item = &InventoryItem> {
        self.items
            .values()
            .filter(move |item| status.is_none_or(|s| item.status == s))
    }

    pub fn item(&self, sku: &Sku) -> Option<&InventoryItem> {
        self.items.get(sku)
    }

    pub fn item_by_carrier(&self, carrier: &CarrierRef) -> Option<&InventoryItem> {
        self.by_carrier
            .get(carrier)
            .and_then(|sku| self.items.get(sku))
    }

    pub fn tag(&self, uid: &TagUid) -> Option<&Type2Tag> {
        self.tags.get(uid)
    }

    pub fn label(&self, id: &LabelId) -> Option<&BarcodeLabel> {
        self.labels.get(id)
    }

    pub fn scan_target(&self, carrier: &CarrierRef) -> Option<ScanTarget<'_>> {
        match carrier {
            CarrierRef::Nfc(uid) => self.tags.get(uid).map(ScanTarget::Tag),
            CarrierRef::Barcode(id) => self.labels.get(id).map(ScanTarget::Label),
        }
    }

    pub fn receipt(&self, receipt_id: u64) -> Option<&Receipt> {
        self.receipts.get(&receipt_id)
    }

    /// Events applied since this store was created or restored.
    pub fn events(&self) -> &[StoreEvent] {
        &self.log
    }

    pub fn last_seq(&self) -> u64 {
        self.last_seq
    }

    pub fn next_receipt_id(&self) -> u64 {
        self.next_receipt_id
    }
}

fn product_id_from_barcode(text: &str) -> Result<u32, InventoryError> {
    let malformed = || InventoryError::MalformedPayload(format!("unrecognized barcode {text:?}"));
    let symbology = match text.len() {
        8 => Symbology::Ean8,
        13 => Symbology::Ean13,
        _ => return Err(malformed()),
    };
    validate(symbology, text, false).map_err(|_| malformed())?;
    text[..text.len() - 1].parse().map_err(|_| malformed())
}
