//! Canonical JSON: keys sorted, floats always written with 17 significant
//! digits in exponent form, no whitespace.
//!
//! Parsing canonical output and writing it again reproduces it byte for
//! byte, since 17 significant digits identify an `f64` exactly.

use std::io;

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter};
use serde_json::Value;

#[derive(Debug, Default, Clone, Copy)]
pub struct CanonicalFormatter;

impl Formatter for CanonicalFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{}", format_f64(value))
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn write_i64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: i64) -> io::Result<()> {
        CompactFormatter.write_i64(writer, value)
    }

    fn write_u64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: u64) -> io::Result<()> {
        CompactFormatter.write_u64(writer, value)
    }
}

/// `{:.16e}`, e.g. `5.6714329040978384e-1`.
pub fn format_f64(value: f64) -> String {
    format!("{value:.16e}")
}

/// Serializes `value` canonically.
pub fn to_canonical_string<S: Serialize + ?Sized>(value: &S) -> serde_json::Result<String> {
    // Value's map is a BTreeMap, which sorts keys
    let tree = serde_json::to_value(value)?;
    write_value(&tree)
}

fn write_value(tree: &Value) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, CanonicalFormatter);
    tree.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// Parses and re-serializes canonically.
pub fn recanonicalize(text: &str) -> serde_json::Result<String> {
    let tree: Value = serde_json::from_str(text)?;
    write_value(&tree)
}
