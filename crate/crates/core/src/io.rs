//! CSV helpers shared by field snapshots, rasters and mode tables.

use std::io::{self, Write};

/// Formats a float with 17 significant digits (round-trip exact for `f64`).
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Writes one CSV row of floats.
pub fn write_row<W: Write>(out: &mut W, values: &[f64]) -> io::Result<()> {
    let mut first = true;
    for v in values {
        if !first {
            out.write_all(b",")?;
        }
        first = false;
        out.write_all(fmt_f64(*v).as_bytes())?;
    }
    out.write_all(b"\n")
}
