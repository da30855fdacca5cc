//! Debug rendering of byte images for golden files.

use std::fmt::Write;

const BYTES_PER_LINE: usize = 16;

/// Two uppercase hex digits per byte, space separated, 16 bytes per line.
/// Every line, including the last, ends with `\n`.
pub fn hex_dump(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() * 3);
    for line in bytes.chunks(BYTES_PER_LINE) {
        for (i, b) in line.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            write!(out, "{b:02X}").unwrap();
        }
        out.push('\n');
    }
    out
}
