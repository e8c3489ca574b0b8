//! Plain-text numeric output shared by the exporters.

/// Decimal scientific notation with 15 significant digits.
pub fn format_value(x: f64) -> String {
    if x == 0.0 {
        // avoid a distinct "-0" in golden files
        return format!("{:.14e}", 0.0);
    }
    format!("{x:.14e}")
}

/// Comma-joined row of formatted values.
pub fn format_row(values: &[f64]) -> String {
    values.iter().map(|&v| format_value(v)).collect::<Vec<_>>().join(",")
}
