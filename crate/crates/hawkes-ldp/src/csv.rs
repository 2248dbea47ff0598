//! Shared CSV formatting: full-precision floats, '.' decimal separator,
//! LF line endings, byte-identical across runs with identical inputs.

/// Formats a float at full round-trip precision. Values with extreme
/// magnitude switch to scientific notation so rows stay readable.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    let a = x.abs();
    if (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Assembles a CSV document from a header and rows of already-formatted
/// fields.
pub fn table(header: &str, rows: &[Vec<String>]) -> String {
    let mut out = String::with_capacity(rows.len() * 32 + header.len() + 1);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
