use proptest::prelude::*;
use tagstock_core::barcode::{BarcodeLabel, Damage};
use tagstock_core::scan::{
    nfc_latency_ms, scan_barcode, scan_nfc, FailureReason, ReaderKind, ScanContext,
};
use tagstock_core::tag_codec::{TagUid, Type2Tag};

fn arb_damage() -> impl Strategy<Value = Damage> {
    prop_oneof![
        Just(Damage::None),
        Just(Damage::Scratched),
        Just(Damage::Wrinkled)
    ]
}

fn arb_label() -> impl Strategy<Value = BarcodeLabel> {
    prop_oneof![
        "[0-9]{7}".prop_map(|p| BarcodeLabel::ean(&p).unwrap()),
        "[0-9]{12}".prop_map(|p| BarcodeLabel::ean(&p).unwrap()),
        "[0-9A-Z]{1,30}".prop_map(|p| BarcodeLabel::code39(&p, false).unwrap()),
    ]
}

fn tag_with(len: usize) -> Type2Tag {
    let mut tag = Type2Tag::blank(TagUid::from_serial(3));
    tag.write_payload(&vec![0xA5; len]).unwrap();
    tag
}

proptest! {
    #[test]
    fn nfc_ignores_angle(len in 0usize..=125, distance in 0.0f64..20.0, a in 0i64..360, b in 0i64..360) {
        let tag = tag_with(len);
        let at = |t| scan_nfc(&tag, &ScanContext::new(t, distance, Damage::None, ReaderKind::NfcReader).unwrap());
        prop_assert_eq!(at(a), at(b));
    }

    #[test]
    fn nfc_ignores_damage(len in 0usize..=125, distance in 0.0f64..20.0, tilt in 0i64..360, damage in arb_damage()) {
        let tag = tag_with(len);
        let clean = scan_nfc(&tag, &ScanContext::new(tilt, distance, Damage::None, ReaderKind::NfcReader).unwrap());
        let dirty = scan_nfc(&tag, &ScanContext::new(tilt, distance, damage, ReaderKind::NfcReader).unwrap());
        prop_assert_eq!(clean, dirty);
    }

    #[test]
    fn barcode_monotone_in_tilt(label in arb_label(), a in 0i64..=180, damage in arb_damage()) {
        let at = |t| scan_barcode(&label, &ScanContext::new(t, 0.0, damage, ReaderKind::BarcodeReader).unwrap()).success;
        if at(a) {
            for t in 0..a {
                prop_assert!(at(t));
            }
        }
    }

    #[test]
    fn barcode_damage_fatal(label in arb_label(), tilt in 0i64..360, damage in prop_oneof![Just(Damage::Scratched), Just(Damage::Wrinkled)]) {
        let out = scan_barcode(&label, &ScanContext::new(tilt, 0.0, damage, ReaderKind::BarcodeReader).unwrap());
        prop_assert!(!out.success);
        prop_assert_eq!(out.failure_reason, Some(FailureReason::Damage));
    }

    #[test]
    fn outcome_shape(label in arb_label(), tilt in 0i64..360, damage in arb_damage()) {
        let out = scan_barcode(&label, &ScanContext::new(tilt, 0.0, damage, ReaderKind::BarcodeReader).unwrap());
        prop_assert_eq!(out.success, out.failure_reason.is_none());
        if out.success {
            prop_assert!(out.latency_ms > 0.0);
        }
        // deterministic
        let again = scan_barcode(&label, &ScanContext::new(tilt, 0.0, damage, ReaderKind::BarcodeReader).unwrap());
        prop_assert_eq!(out, again);
    }

    #[test]
    fn latency_affine(a in 0usize..=125, b in 0usize..=125) {
        let slope_ms_per_byte = 8.0 / 424_000.0 * 1000.0;
        let diff = nfc_latency_ms(b) - nfc_latency_ms(a);
        prop_assert!((diff - (b as f64 - a as f64) * slope_ms_per_byte).abs() < 1e-9);
    }
}
