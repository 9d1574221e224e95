//! Text-mode number and polynomial formatting.

/// `%g`-style rendering with `digits` significant digits and trailing zeros removed.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{exp}", trim(mantissa))
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Ascending-power rendering such as `0.142857 + 1.03016 u + u^2`.
/// Coefficients below `1e-12` of the largest one are treated as zero.
pub fn polynomial(b: &[f64], digits: usize) -> String {
    let scale = b.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
    let mut out = String::new();
    for (p, &c) in b.iter().enumerate() {
        if c.abs() <= 1e-12 * scale {
            continue;
        }
        let magnitude = sig(c.abs(), digits);
        let body = match (p, magnitude.as_str()) {
            (0, m) => m.to_string(),
            (1, "1") => "u".to_string(),
            (1, m) => format!("{m} u"),
            (p, "1") => format!("u^{p}"),
            (p, m) => format!("{m} u^{p}"),
        };
        if out.is_empty() {
            if c < 0.0 {
                out.push('-');
            }
        } else {
            out.push_str(if c < 0.0 { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}
