//! CSV and JSON writers with every float at 17 significant digits.

use std::io::{self, Write};
use std::path::Path;

use gawcga::Trace;
use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};

pub const TRACE_HEADER: [&str; 8] =
    ["step", "atom_index", "atom_sign", "residual_norm", "E_n", "margin_functional", "margin_select", "margin_approx"];

/// `{:.16e}`: 17 significant digits, exact round trip for every finite double.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// Compact JSON whose floats use [`fmt_f64`]; non-finite values become `null`.
struct SigDigits;

impl Formatter for SigDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_json<S: Serialize + ?Sized>(value: &S) -> io::Result<String> {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, SigDigits);
    value.serialize(&mut ser).map_err(io::Error::other)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub fn trace_csv<T>(trace: &Trace<T>) -> io::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TRACE_HEADER)?;
    for s in &trace.steps {
        w.write_record([
            s.step.to_string(),
            s.atom_id.to_string(),
            s.atom_sign.to_string(),
            fmt_f64(s.residual_norm),
            fmt_f64(s.error),
            fmt_f64(s.margin_functional),
            fmt_f64(s.margin_select),
            fmt_f64(s.margin_approx),
        ])?;
    }
    into_string(w)
}

pub fn into_string(w: csv::Writer<Vec<u8>>) -> io::Result<String> {
    let bytes = w.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv of UTF-8 fields"))
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)
}
