//! Output formatting: deterministic CSV and JSON writers.
//!
//! Floats print as `{:.12e}` in CSV (fixed width, gnuplot-friendly) and
//! through serde_json's shortest-roundtrip form in JSON. Neither path
//! emits timestamps or machine identity, so reruns with identical inputs
//! are byte-identical.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::{CliError, CliResult};

/// Fixed-precision scientific form used by every CSV cell.
pub fn fmt_f(v: f64) -> String {
    format!("{v:.12e}")
}

/// JSON shape for complex values: an object with explicit re/im keys
/// (num-complex would emit a bare [re, im] pair).
#[derive(serde::Serialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<num_complex::Complex64> for ComplexJson {
    fn from(c: num_complex::Complex64) -> Self {
        ComplexJson { re: c.re, im: c.im }
    }
}

/// Optional float cell; absent values print as `none`.
pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f).unwrap_or_else(|| "none".into())
}

/// RFC-4180 quoting for free-text cells (error messages may hold commas).
pub fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

/// Buffered writer over `--out <path>` or stdout.
pub fn sink(out: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match out {
        Some(path) => {
            let file = File::create(path).map_err(|e| {
                CliError::Input(format!("cannot write --out {}: {e}", path.display()))
            })?;
            Box::new(BufWriter::new(file))
        }
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

/// Writes a serializable document as pretty JSON plus trailing newline.
pub fn emit_json<T: serde::Serialize>(out: Option<&Path>, doc: &T) -> CliResult<()> {
    let mut w = sink(out)?;
    let text = serde_json::to_string_pretty(doc)
        .expect("output documents are plain data and always serialize");
    writeln!(w, "{text}").map_err(CliError::Io)?;
    w.flush().map_err(CliError::Io)
}

/// Writes pre-assembled CSV text.
pub fn emit_text(out: Option<&Path>, text: &str) -> CliResult<()> {
    let mut w = sink(out)?;
    w.write_all(text.as_bytes()).map_err(CliError::Io)?;
    w.flush().map_err(CliError::Io)
}
