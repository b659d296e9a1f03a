//! CSV formatting shared by every table the crate emits.
//!
//! Reals are written with 17 significant digits in exponent form so that a
//! parse of the text gives back the same `f64`. Missing values are empty
//! fields.

use std::io::{self, Write};

/// 17 significant digits, `.` as decimal separator.
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_default()
}

/// Write a header line followed by pre-formatted rows.
pub fn write_table<W, I>(w: &mut W, header: &[&str], rows: I) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = Vec<String>>,
{
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
