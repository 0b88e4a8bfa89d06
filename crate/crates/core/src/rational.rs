//! Exact rational scalars and their text form.
//!
//! Values are written as `"p/q"` (reduced, positive denominator) or bare
//! `"p"` for integers. That format is used in every JSON file and report this
//! crate produces.

use num_bigint::BigInt;
use num_traits::Zero;

pub use num_rational::BigRational as Rational;

/// `n/d` as an exact rational. Panics when `d == 0`; meant for literals in
/// fixtures and tests.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as an exact rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Why a rational literal failed to parse.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational `{input}`: {reason}")]
pub struct ParseRationalError {
    pub input: String,
    pub reason: &'static str,
}

fn digits_to_int(digits: &str) -> Option<BigInt> {
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse::<BigInt>().ok()
}

/// Parses `"p"` or `"p/q"`. The numerator may carry a leading minus sign; the
/// denominator must be a positive integer. No whitespace, no `+` signs.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let bad = |reason| ParseRationalError { input: text.to_string(), reason };
    let (num_text, den_text) = match text.split_once('/') {
        None => (text, None),
        Some((n, d)) => (n, Some(d)),
    };
    let (negative, magnitude) = match num_text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, num_text),
    };
    let mut numer = digits_to_int(magnitude).ok_or_else(|| bad("bad numerator"))?;
    if negative {
        numer = -numer;
    }
    let denom = match den_text {
        None => BigInt::from(1),
        Some(d) => {
            let d = digits_to_int(d).ok_or_else(|| bad("bad denominator"))?;
            if d.is_zero() {
                return Err(bad("denominator must be positive"));
            }
            d
        }
    };
    Ok(Rational::new(numer, denom))
}

/// Renders a rational as `"p/q"`, or `"p"` when it is an integer.
pub fn format_rational(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}
