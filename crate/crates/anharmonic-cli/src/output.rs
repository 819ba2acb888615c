//! Deterministic file formats. JSON floats carry 17 significant digits and
//! CSV floats 15; neither carries timestamps.

use serde::Serialize;
use serde_json::ser::Formatter;
use std::io::{self, Write};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Compact JSON with every float written as `d.dddddddddddddddde±x`.
struct FixedDigits;

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(w, "{value:.16e}")
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigits);
    value.serialize(&mut ser).expect("serialisable value");
    buf.push(b'\n');
    String::from_utf8(buf).expect("utf-8 json")
}

/// The envelope every JSON file shares.
#[derive(Debug, Serialize)]
pub struct Document<P: Serialize, D: Serialize> {
    pub schema_version: u32,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command: &'static str,
    pub parameters: P,
    pub data: D,
}

impl<P: Serialize, D: Serialize> Document<P, D> {
    pub fn new(command: &'static str, parameters: P, data: D) -> Self {
        Document { schema_version: SCHEMA_VERSION, tool: "anharmonic", tool_version: TOOL_VERSION, command, parameters, data }
    }
}

pub fn fmt_csv_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.14e}")
    } else {
        String::new()
    }
}

/// CSV with a header row; cells are preformatted strings.
pub fn to_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8 csv")
}

/// Write to `path`, or standard output when absent.
pub fn emit(text: &str, path: Option<&Path>) -> io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        let s = to_json(&serde_json::json!({ "x": 0.1, "y": [3.0, f64::NAN] }));
        assert_eq!(s, "{\"x\":1.0000000000000001e-1,\"y\":[3.0000000000000000e0,null]}\n");
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64().unwrap(), 0.1);
    }

    #[test]
    fn csv_rows_have_fifteen_digits() {
        let s = to_csv(&["n", "e"], &[vec!["0".into(), fmt_csv_float(3.0)]]);
        assert_eq!(s, "n,e\r\n0,3.00000000000000e0\r\n");
    }
}
