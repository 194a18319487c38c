//! Numeric literals with optional multiples of π: `0.25`, `pi`, `pi/12`,
//! `2*pi/3`, `-pi/2`, `3/4`.

use std::f64::consts::PI;

/// Parses a decimal or a `p*pi/q` expression. The result is computed as
/// `(p·π)/q`.
pub fn parse_real(input: &str) -> Result<f64, String> {
    let s = input.trim();
    if s.is_empty() {
        return Err("empty number".into());
    }
    if let Ok(x) = s.parse::<f64>() {
        return Ok(x);
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s.strip_prefix('+').unwrap_or(s)),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (body, None),
    };
    let numerator = match num.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.trim();
            let coef = coef.strip_suffix('*').unwrap_or(coef).trim();
            let p = if coef.is_empty() {
                1.0
            } else {
                plain(coef, input)?
            };
            p * PI
        }
        None => plain(num, input)?,
    };
    let value = match den {
        Some(d) => numerator / plain(d, input)?,
        None => numerator,
    };
    if !value.is_finite() {
        return Err(format!("`{input}` is not a finite number"));
    }
    Ok(sign * value)
}

fn plain(token: &str, whole: &str) -> Result<f64, String> {
    token
        .parse::<f64>()
        .map_err(|_| format!("cannot parse `{whole}` as a number or p*pi/q"))
}
