//! Complex literals: `a`, `a+bi`, `a-bi`, `bi`, `i`, `-i`.

use qmod_core::Complex64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid complex literal `{0}`")]
pub struct ParseComplexError(pub String);

fn parse_part(s: &str, whole: &str) -> Result<f64, ParseComplexError> {
    let v: f64 = match s {
        "" | "+" => 1.0,
        "-" => -1.0,
        _ => s
            .parse()
            .map_err(|_| ParseComplexError(whole.to_string()))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ParseComplexError(whole.to_string()))
    }
}

fn parse_real(s: &str, whole: &str) -> Result<f64, ParseComplexError> {
    if s.is_empty() || s == "+" || s == "-" {
        return Err(ParseComplexError(whole.to_string()));
    }
    parse_part(s, whole)
}

pub fn parse_complex(input: &str) -> Result<Complex64, ParseComplexError> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(ParseComplexError(input.to_string()));
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(parse_real(&s, input)?, 0.0));
    };
    // split at the last sign that is not the leading one or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Ok(Complex64::new(
            parse_real(&body[..k], input)?,
            parse_part(&body[k..], input)?,
        )),
        None => Ok(Complex64::new(0.0, parse_part(body, input)?)),
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-4..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Round-trip formatting in the literal syntax accepted by [`parse_complex`].
pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format_f64(z.re)
    } else if z.re == 0.0 {
        format!("{}i", format_f64(z.im))
    } else if z.im.is_sign_negative() {
        format!("{}-{}i", format_f64(z.re), format_f64(-z.im))
    } else {
        format!("{}+{}i", format_f64(z.re), format_f64(z.im))
    }
}

/// `value` to `digits` significant digits, fixed notation for moderate
/// magnitudes.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..16).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.prec$e}", prec = digits - 1)
    }
}

pub fn format_complex_sig(z: Complex64, digits: usize) -> String {
    if z.im == 0.0 {
        format_sig(z.re, digits)
    } else if z.im < 0.0 {
        format!(
            "{} - {}i",
            format_sig(z.re, digits),
            format_sig(-z.im, digits)
        )
    } else {
        format!(
            "{} + {}i",
            format_sig(z.re, digits),
            format_sig(z.im, digits)
        )
    }
}
