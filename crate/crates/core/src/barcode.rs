//! Retail barcode symbologies: Code 39 with its mod-43 check character,
//! EAN-8/EAN-13 with the weighted parity digit, and the physical width
//! and readability model for printed labels.
//!
//! Only the character layer is modelled. Bar/space geometry is summarized
//! by [`width_model`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Code 39 value table: index is the character value used by the check sum.
const CODE39_ALPHABET: &[u8; 43] = b"0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ-. $/+%";
const CODE39_MOD: u32 = 43;
pub const CODE39_MAX_LEN: usize = 30;

pub const EAN8_LEN: usize = 8;
pub const EAN13_LEN: usize = 13;

/// Measured (character count, width in mm) points for printed labels.
const WIDTH_ANCHORS: [(f64, f64); 4] = [(8.0, 33.0), (12.0, 35.0), (20.0, 66.0), (30.0, 94.0)];
pub const WIDTH_MODEL_MAX_CHARS: usize = 60;

pub const EASY_MAX_WIDTH_MM: f64 = 50.0;
pub const DIFFICULT_MAX_WIDTH_MM: f64 = 80.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Symbology {
    Code39,
    Ean8,
    Ean13,
}

/// Physical condition of a printed label (or of the scan conditions).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Damage {
    #[default]
    None,
    Scratched,
    Wrinkled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ReadabilityClass {
    Easy,
    Difficult,
    VeryDifficult,
}

impl ReadabilityClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ReadabilityClass::Easy => "EASY",
            ReadabilityClass::Difficult => "DIFFICULT",
            ReadabilityClass::VeryDifficult => "VERY_DIFFICULT",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BarcodeError {
    #[error("character {0:?} is not in the Code 39 alphabet")]
    InvalidCharacter(char),
    #[error("expected {expected} digits, got {actual}")]
    WrongLength {
        expected: &'static str,
        actual: usize,
    },
    #[error("character {0:?} is not a digit")]
    NonDigit(char),
    #[error("character count {0} outside 1..=60")]
    OutOfRange(usize),
    #[error("invalid label: {0}")]
    Invalid(InvalidReason),
}

/// Why a candidate label failed [`validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum InvalidReason {
    #[error("wrong length")]
    WrongLength,
    #[error("character outside the symbology alphabet")]
    BadCharacter,
    #[error("check digit or character does not match")]
    CheckMismatch,
}

fn code39_value(c: char) -> Option<u32> {
    if !c.is_ascii() {
        return None;
    }
    CODE39_ALPHABET
        .iter()
        .position(|&a| a == c as u8)
        .map(|v| v as u32)
}

/// Mod-43 check character of a Code 39 payload.
pub fn code39_check_char(payload: &str) -> Result<char, BarcodeError> {
    if payload.is_empty() {
        return Err(BarcodeError::WrongLength {
            expected: "at least 1 character",
            actual: 0,
        });
    }
    let mut sum = 0u32;
    for c in payload.chars() {
        sum += code39_value(c).ok_or(BarcodeError::InvalidCharacter(c))?;
    }
    Ok(CODE39_ALPHABET[(sum % CODE39_MOD) as usize] as char)
}

fn digits(text: &str) -> Result<Vec<u32>, BarcodeError> {
    text.chars()
        .map(|c| c.to_digit(10).ok_or(BarcodeError::NonDigit(c)))
        .collect()
}

/// EAN check digit for a 7-digit (EAN-8) or 12-digit (EAN-13) payload.
///
/// The rightmost payload digit has weight 3, alternating 3/1 leftwards.
pub fn ean_check_digit(payload: &str) -> Result<u8, BarcodeError> {
    let n = payload.chars().count();
    if n != EAN8_LEN - 1 && n != EAN13_LEN - 1 {
        return Err(BarcodeError::WrongLength {
            expected: "7 or 12 digits",
            actual: n,
        });
    }
    let sum: u32 = digits(payload)?
        .iter()
        .rev()
        .enumerate()
        .map(|(i, d)| if i % 2 == 0 { d * 3 } else { *d })
        .sum();
    Ok(((10 - sum % 10) % 10) as u8)
}

/// Checks alphabet, length and check digit/character of a candidate label.
///
/// For Code 39 the last character is treated as a check character when
/// `code39_check` is set; EAN codes always carry their check digit.
pub fn validate(
    symbology: Symbology,
    chars: &str,
    code39_check: bool,
) -> Result<(), InvalidReason> {
    match symbology {
        Symbology::Code39 => {
            let n = chars.chars().count();
            let min = if code39_check { 2 } else { 1 };
            if n < min || n > CODE39_MAX_LEN {
                return Err(InvalidReason::WrongLength);
            }
            if chars.chars().any(|c| code39_value(c).is_none()) {
                return Err(InvalidReason::BadCharacter);
            }
            if code39_check {
                let split = chars.len() - 1;
                let expected =
                    code39_check_char(&chars[..split]).map_err(|_| InvalidReason::BadCharacter)?;
                if !chars.ends_with(expected) {
                    return Err(InvalidReason::CheckMismatch);
                }
            }
            Ok(())
        }
        Symbology::Ean8 | Symbology::Ean13 => {
            let want = if symbology == Symbology::Ean8 {
                EAN8_LEN
            } else {
                EAN13_LEN
            };
            if chars.chars().count() != want {
                return Err(InvalidReason::WrongLength);
            }
            if !chars.bytes().all(|b| b.is_ascii_digit()) {
                return Err(InvalidReason::BadCharacter);
            }
            let (payload, check) = chars.split_at(want - 1);
            let expected = ean_check_digit(payload).map_err(|_| InvalidReason::BadCharacter)?;
            if check.as_bytes()[0] - b'0' != expected {
                return Err(InvalidReason::CheckMismatch);
            }
            Ok(())
        }
    }
}

/// Printed width in millimetres of a label carrying `char_count` characters.
///
/// Piecewise-linear through the measured anchors; flat below 8 characters
/// and extended with the last segment's slope above 30.
pub fn width_model(char_count: usize) -> Result<f64, BarcodeError> {
    if char_count == 0 || char_count > WIDTH_MODEL_MAX_CHARS {
        return Err(BarcodeError::OutOfRange(char_count));
    }
    let n = char_count as f64;
    let (first_n, first_w) = WIDTH_ANCHORS[0];
    if n <= first_n {
        return Ok(first_w);
    }
    for pair in WIDTH_ANCHORS.windows(2) {
        let ((n0, w0), (n1, w1)) = (pair[0], pair[1]);
        if n <= n1 {
            return Ok(w0 + (n - n0) / (n1 - n0) * (w1 - w0));
        }
    }
    let (n0, w0) = WIDTH_ANCHORS[WIDTH_ANCHORS.len() - 2];
    let (n1, w1) = WIDTH_ANCHORS[WIDTH_ANCHORS.len() - 1];
    Ok(w1 + (n - n1) * (w1 - w0) / (n1 - n0))
}

pub fn readability_class(width_mm: f64) -> ReadabilityClass {
    if width_mm <= EASY_MAX_WIDTH_MM {
        ReadabilityClass::Easy
    } else if width_mm <= DIFFICULT_MAX_WIDTH_MM {
        ReadabilityClass::Difficult
    } else {
        ReadabilityClass::VeryDifficult
    }
}

/// A printed label. Immutable once created; a price change needs a new label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarcodeLabel {
    symbology: Symbology,
    chars: String,
    width_mm: f64,
    damage: Damage,
}

impl BarcodeLabel {
    /// Creates a label from complete symbol text (check digit included for EAN).
    pub fn new(symbology: Symbology, chars: &str) -> Result<Self, BarcodeError> {
        validate(symbology, chars, false).map_err(BarcodeError::Invalid)?;
        Ok(Self::unchecked(symbology, chars.to_owned()))
    }

    /// Code 39 label, optionally with the mod-43 check character appended.
    pub fn code39(payload: &str, with_check: bool) -> Result<Self, BarcodeError> {
        let mut chars = payload.to_owned();
        if with_check {
            chars.push(code39_check_char(payload)?);
        }
        validate(Symbology::Code39, &chars, with_check).map_err(BarcodeError::Invalid)?;
        Ok(Self::unchecked(Symbology::Code39, chars))
    }

    /// EAN-8 or EAN-13 label from the payload digits; the check digit is appended.
    pub fn ean(payload: &str) -> Result<Self, BarcodeError> {
        let check = ean_check_digit(payload)?;
        let symbology = if payload.len() == EAN8_LEN - 1 {
            Symbology::Ean8
        } else {
            Symbology::Ean13
        };
        Ok(Self::unchecked(symbology, format!("{payload}{check}")))
    }

    fn unchecked(symbology: Symbology, chars: String) -> Self {
        let width_mm = width_model(chars.chars().count()).expect("label lengths are within 1..=30");
        BarcodeLabel {
            symbology,
            chars,
            width_mm,
            damage: Damage::None,
        }
    }

    /// The same print run with physical damage applied.
    pub fn damaged(&self, damage: Damage) -> Self {
        BarcodeLabel {
            damage,
            ..self.clone()
        }
    }

    pub fn symbology(&self) -> Symbology {
        self.symbology
    }

    pub fn chars(&self) -> &str {
        &self.chars
    }

    pub fn width_mm(&self) -> f64 {
        self.width_mm
    }

    pub fn damage(&self) -> Damage {
        self.damage
    }

    pub fn readability(&self) -> ReadabilityClass {
        readability_class(self.width_mm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent EAN oracle: the check digit is the unique d that makes the
    /// full code's left-to-right weighted sum divisible by 10.
    fn ean_oracle(payload: &str) -> u8 {
        let full_len = payload.len() + 1;
        (0u8..10)
            .find(|d| {
                let code: Vec<u32> = payload
                    .bytes()
                    .map(|b| u32::from(b - b'0'))
                    .chain([u32::from(*d)])
                    .collect();
                let sum: u32 = code
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        // weight 3 on positions with the same parity as the
                        // payload's last digit, counted from the right end
                        let from_right = full_len - 1 - i;
                        if from_right % 2 == 1 {
                            v * 3
                        } else {
                            *v
                        }
                    })
                    .sum();
                sum.is_multiple_of(10)
            })
            .unwrap()
    }

    #[test]
    fn code39_examples() {
        assert_eq!(code39_check_char("0").unwrap(), '0');
        // H=17 E=14 L=21 L=21 O=24, 97 mod 43 = 11 -> 'B'
        assert_eq!(code39_check_char("HELLO").unwrap(), 'B');
        assert_eq!(
            code39_check_char("hello"),
            Err(BarcodeError::InvalidCharacter('h'))
        );
        assert!(code39_check_char("").is_err());
        assert_eq!(code39_check_char("%").unwrap(), '%');
        // 42 + 38 = 80, 80 mod 43 = 37 -> '.'
        assert_eq!(code39_check_char("% ").unwrap(), '.');
    }

    #[test]
    fn ean_examples() {
        assert_eq!(ean_check_digit("0000000").unwrap(), 0);
        assert_eq!(ean_check_digit("400638133393").unwrap(), 1);
        assert_eq!(ean_check_digit("7351353").unwrap(), 7);
        assert_eq!(ean_check_digit("000000000004").unwrap(), 8);
        for p in ["400638133393", "7351353", "000000000004", "590123412345"] {
            assert_eq!(ean_check_digit(p).unwrap(), ean_oracle(p), "{p}");
        }
        assert!(matches!(
            ean_check_digit("12345"),
            Err(BarcodeError::WrongLength { actual: 5, .. })
        ));
        assert_eq!(ean_check_digit("12345a7"), Err(BarcodeError::NonDigit('a')));
    }

    #[test]
    fn validate_examples() {
        assert_eq!(validate(Symbology::Ean13, "4006381333931", false), Ok(()));
        assert_eq!(
            validate(Symbology::Ean13, "4006381333932", false),
            Err(InvalidReason::CheckMismatch)
        );
        assert_eq!(
            validate(Symbology::Ean8, "1234567", false),
            Err(InvalidReason::WrongLength)
        );
        assert_eq!(
            validate(Symbology::Ean8, "7351353X", false),
            Err(InvalidReason::BadCharacter)
        );
        assert_eq!(validate(Symbology::Code39, "HELLOB", true), Ok(()));
        assert_eq!(
            validate(Symbology::Code39, "HELLOC", true),
            Err(InvalidReason::CheckMismatch)
        );
        assert_eq!(validate(Symbology::Code39, "HELLO WORLD", false), Ok(()));
        assert_eq!(
            validate(Symbology::Code39, "hello", false),
            Err(InvalidReason::BadCharacter)
        );
        assert_eq!(
            validate(Symbology::Code39, &"A".repeat(31), false),
            Err(InvalidReason::WrongLength)
        );
        assert_eq!(
            validate(Symbology::Code39, "", false),
            Err(InvalidReason::WrongLength)
        );
    }

    #[test]
    fn width_anchors() {
        assert_eq!(width_model(8).unwrap(), 33.0);
        assert_eq!(width_model(12).unwrap(), 35.0);
        assert_eq!(width_model(20).unwrap(), 66.0);
        assert_eq!(width_model(30).unwrap(), 94.0);
        // 35 + (16-12)/(20-12) * (66-35)
        assert_eq!(width_model(16).unwrap(), 50.5);
        assert_eq!(width_model(1).unwrap(), 33.0);
        assert!((width_model(31).unwrap() - 96.8).abs() < 1e-9);
        assert!((width_model(60).unwrap() - 178.0).abs() < 1e-9);
        assert_eq!(width_model(0), Err(BarcodeError::OutOfRange(0)));
        assert_eq!(width_model(61), Err(BarcodeError::OutOfRange(61)));
    }

    #[test]
    fn classes() {
        assert_eq!(readability_class(33.0), ReadabilityClass::Easy);
        assert_eq!(readability_class(35.0), ReadabilityClass::Easy);
        assert_eq!(readability_class(50.0), ReadabilityClass::Easy);
        assert_eq!(readability_class(50.01), ReadabilityClass::Difficult);
        assert_eq!(readability_class(66.0), ReadabilityClass::Difficult);
        assert_eq!(readability_class(80.0), ReadabilityClass::Difficult);
        assert_eq!(readability_class(94.0), ReadabilityClass::VeryDifficult);
    }

    #[test]
    fn labels() {
        let ean = BarcodeLabel::ean("000000000004").unwrap();
        assert_eq!(ean.chars(), "0000000000048");
        assert_eq!(ean.symbology(), Symbology::Ean13);
        assert_eq!(ean.width_mm(), 38.875);

        let ean8 = BarcodeLabel::ean("7351353").unwrap();
        assert_eq!(ean8.chars(), "73513537");
        assert_eq!(ean8.width_mm(), 33.0);
        assert_eq!(ean8.readability(), ReadabilityClass::Easy);

        let c39 = BarcodeLabel::code39("HELLO", true).unwrap();
        assert_eq!(c39.chars(), "HELLOB");
        assert!(BarcodeLabel::new(Symbology::Ean13, "4006381333932").is_err());
        assert_eq!(
            BarcodeLabel::code39(&"A".repeat(30), false)
                .unwrap()
                .readability(),
            ReadabilityClass::VeryDifficult
        );
        let scratched = ean.damaged(Damage::Scratched);
        assert_eq!(scratched.damage(), Damage::Scratched);
        assert_eq!(ean.damage(), Damage::None);
    }
}
