//! Number formatting shared by the text reports.

fn group_digits(digits: &str) -> String {
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

/// `10047606` → `"10,047,606"`.
pub fn group_int(value: i64) -> String {
    let digits = group_digits(&value.unsigned_abs().to_string());
    if value < 0 {
        format!("-{digits}")
    } else {
        digits
    }
}

/// Fixed-point with thousands separators, e.g. `106392.6` → `"106,392.60"`.
pub fn group_fixed(value: f64, decimals: usize) -> String {
    let text = format!("{:.*}", decimals, value.abs());
    let (int, frac) = match text.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (text.as_str(), None),
    };
    let mut out = String::new();
    if value < 0.0 && text.chars().any(|c| c.is_ascii_digit() && c != '0') {
        out.push('-');
    }
    out.push_str(&group_digits(int));
    if let Some(f) = frac {
        out.push('.');
        out.push_str(f);
    }
    out
}

/// Signed count as printed in redistribution tables: `+11,063`, `-15,603`, `0`.
pub fn signed_count(value: i64) -> String {
    if value > 0 {
        format!("+{}", group_int(value))
    } else {
        group_int(value)
    }
}

/// Signed percentage with one decimal: `+314.3%`, `-100.0%`, `0.0%`.
pub fn signed_percent(value: f64) -> String {
    let body = group_fixed(value, 1);
    if body.starts_with('-') || body.trim_start_matches(['0', '.', ',']).is_empty() {
        format!("{body}%")
    } else {
        format!("+{body}%")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grouping() {
        assert_eq!(group_int(10_047_606), "10,047,606");
        assert_eq!(group_int(-15_603), "-15,603");
        assert_eq!(group_int(0), "0");
        assert_eq!(group_int(999), "999");
        assert_eq!(group_fixed(106_392.6, 1), "106,392.6");
        assert_eq!(group_fixed(-0.0001, 2), "0.00");
    }

    #[test]
    fn signed_forms() {
        assert_eq!(signed_count(11_063), "+11,063");
        assert_eq!(signed_count(-15_603), "-15,603");
        assert_eq!(signed_count(0), "0");
        assert_eq!(signed_percent(314.29), "+314.3%");
        assert_eq!(signed_percent(-100.0), "-100.0%");
        assert_eq!(signed_percent(0.0), "0.0%");
        assert_eq!(signed_percent(1378.0), "+1,378.0%");
    }
}
