//! Aggregate metrics, CSV tables and SVG charts.

mod metrics;
pub mod svg;

pub use metrics::*;

/// One CSV line (LF-terminated), quoting fields that need it.
pub fn csv_row<S: AsRef<str>>(fields: &[S]) -> String {
    let mut out = String::new();
    for (i, f) in fields.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let f = f.as_ref();
        if f.contains([',', '"', '\n', '\r']) {
            out.push('"');
            out.push_str(&f.replace('"', "\"\""));
            out.push('"');
        } else {
            out.push_str(f);
        }
    }
    out.push('\n');
    out
}

/// Fixed-point rendering with `.` as separator; NaN and infinities render
/// empty and negative zero renders unsigned.
pub fn fmt_num(x: f64, decimals: usize) -> String {
    if !x.is_finite() {
        return String::new();
    }
    let s = format!("{x:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_owned()
    } else {
        s
    }
}

pub fn fmt3(x: f64) -> String {
    fmt_num(x, 3)
}

pub fn fmt3_opt(x: Option<f64>) -> String {
    x.map(fmt3).unwrap_or_default()
}
