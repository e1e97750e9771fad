//! Number formatting shared by the CSV, JSON and text outputs. Every number
//! is emitted with 15 significant digits.

pub const SIGNIFICANT_DIGITS: usize = 15;

/// `x` rounded to 15 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

pub fn csv_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        let r = round_sig(x);
        // plain decimals become unreadable outside this range
        if r != 0.0 && !(1e-4..1e15).contains(&r.abs()) {
            format!("{r:e}")
        } else {
            format!("{r}")
        }
    }
}

/// Empty field for an absent value.
pub fn csv_opt(x: Option<f64>) -> String {
    x.map(csv_num).unwrap_or_default()
}

/// JSON number rounded to 15 significant digits; non-finite values become
/// `null`.
pub fn json_num(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(round_sig(x))
        .map(serde_json::Value::Number)
        .unwrap_or(serde_json::Value::Null)
}

pub fn json_opt(x: Option<f64>) -> serde_json::Value {
    x.map(json_num).unwrap_or(serde_json::Value::Null)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounds_to_fifteen_digits() {
        assert_eq!(round_sig(1.0 / 7.0), 0.142857142857143);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(round_sig(1.784_063_417_681_157_2e-5), 1.78406341768116e-5);
        assert_eq!(csv_num(0.5), "0.5");
        assert_eq!(csv_num(1.784_063_417_681_157_2e-5), "1.78406341768116e-5");
        assert_eq!(csv_num(-2.5e20), "-2.5e20");
        assert_eq!(csv_num(0.0), "0");
        assert_eq!(csv_num(f64::NAN), "nan");
        assert_eq!(csv_opt(None), "");
        assert_eq!(json_num(f64::INFINITY), serde_json::Value::Null);
    }
}
