//! Fixed number formatting shared by every serialized output.
//!
//! Machine-readable outputs (JSON, CSV) carry 17 significant digits, which
//! is enough to round-trip any finite `f64`. Tables carry 6.

use std::io;

use serde::Serialize;

/// `x` with 17 significant digits in scientific notation, e.g. `3.9062500000000000e-3`.
pub fn sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// `x` with 6 significant digits, for human-facing tables.
pub fn sig6(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.5e}")
    } else {
        sig17(x)
    }
}

struct Sig17Formatter;

impl serde_json::ser::Formatter for Sig17Formatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Compact JSON with every float written to 17 significant digits.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17Formatter);
    value.serialize(&mut ser).expect("in-memory serialization cannot fail");
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

/// CSV text with the comma-separated `header` followed by `rows`.
pub fn write_csv(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header.split(',')).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// A list-valued CSV field: `;`-separated, 17 digits each.
pub fn join_f64(values: &[f64]) -> String {
    values.iter().map(|&x| sig17(x)).collect::<Vec<_>>().join(";")
}

pub fn join_usize(values: &[usize]) -> String {
    values.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}
