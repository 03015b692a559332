//! Shared text-format helpers.

/// Locale-independent scientific notation with 10 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.9e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_keeps_precision() {
        assert_eq!(fmt_real(22.5), "2.250000000e1");
        let x = 0.123456789012_f64;
        let back: f64 = fmt_real(x).parse().unwrap();
        assert!((back - x).abs() < 1e-10);
    }
}
