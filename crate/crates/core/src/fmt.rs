//! Significant-digit formatting shared by reports and the CLI.

/// Format with `digits` significant digits in plain decimal notation.
pub fn format_sig(value: f64, digits: usize) -> String {
    let digits = digits.clamp(1, 17);
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return format!("{value}");
    }
    let magnitude = value.abs().log10().floor() as i64;
    let decimals = ((digits as i64 - 1) - magnitude).clamp(0, 40) as usize;
    format!("{value:.decimals$}")
}

/// Round to `digits` significant digits, through the decimal representation
/// so that text and JSON outputs carry identical numbers.
pub fn round_sig(value: f64, digits: usize) -> f64 {
    format_sig(value, digits).parse().unwrap_or(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_decimal_with_six_digits() {
        assert_eq!(format_sig(0.00338, 6), "0.00338000");
        assert_eq!(format_sig(0.1149, 6), "0.114900");
        assert_eq!(format_sig(-119.8, 6), "-119.800");
        assert_eq!(format_sig(123456789.0, 6), "123456789");
        assert_eq!(format_sig(0.0, 6), "0");
    }

    #[test]
    fn round_trips_through_text() {
        let v = 0.123456789;
        assert_eq!(round_sig(v, 6), 0.123457);
        assert_eq!(round_sig(v, 15), v);
    }
}
