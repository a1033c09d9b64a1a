//! Exact rational arithmetic helpers.
//!
//! All moments, correlations, and probabilities in this crate are
//! [`Rational`] values. Decimal strings parse exactly ("-0.805" is
//! -805/1000), and display rounding is round-half-even so that printed
//! reports are reproducible.

use alloc::string::{String, ToString};
use core::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

/// Largest decimal exponent magnitude accepted by [`parse_decimal`].
const MAX_EXPONENT: u32 = 9_999;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NumberParseError {
    Empty,
    InvalidDigit,
    ExponentOutOfRange,
    ZeroDenominator,
    NotFinite,
}

impl fmt::Display for NumberParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumberParseError::Empty => write!(f, "empty number literal"),
            NumberParseError::InvalidDigit => write!(f, "invalid character in number literal"),
            NumberParseError::ExponentOutOfRange => {
                write!(f, "decimal exponent magnitude exceeds {MAX_EXPONENT}")
            }
            NumberParseError::ZeroDenominator => write!(f, "fraction has zero denominator"),
            NumberParseError::NotFinite => write!(f, "number is not finite"),
        }
    }
}

impl core::error::Error for NumberParseError {}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Convenience constructor for small exact ratios. Panics on a zero
/// denominator; intended for literals in code and tests.
pub fn rat(num: i64, den: i64) -> Rational {
    assert!(den != 0, "rat() called with zero denominator");
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses a decimal literal exactly: optional sign, digits with an optional
/// fractional part, and an optional e/E exponent. "-0.805" becomes -805/1000.
pub fn parse_decimal(input: &str) -> Result<Rational, NumberParseError> {
    let s = input.trim();
    if s.is_empty() {
        return Err(NumberParseError::Empty);
    }
    let bytes = s.as_bytes();
    let mut pos = 0usize;
    let mut negative = false;
    if bytes[pos] == b'+' || bytes[pos] == b'-' {
        negative = bytes[pos] == b'-';
        pos += 1;
    }

    let mut mantissa = BigInt::zero();
    let mut int_digits = 0usize;
    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
        mantissa = mantissa * 10 + (bytes[pos] - b'0');
        int_digits += 1;
        pos += 1;
    }

    let mut frac_digits = 0usize;
    if pos < bytes.len() && bytes[pos] == b'.' {
        pos += 1;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            mantissa = mantissa * 10 + (bytes[pos] - b'0');
            frac_digits += 1;
            pos += 1;
        }
    }
    if int_digits == 0 && frac_digits == 0 {
        return Err(NumberParseError::InvalidDigit);
    }

    let mut exponent: i64 = 0;
    if pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
        pos += 1;
        let mut exp_negative = false;
        if pos < bytes.len() && (bytes[pos] == b'+' || bytes[pos] == b'-') {
            exp_negative = bytes[pos] == b'-';
            pos += 1;
        }
        let mut exp_digits = 0usize;
        let mut exp: i64 = 0;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            exp = exp
                .saturating_mul(10)
                .saturating_add((bytes[pos] - b'0') as i64);
            exp_digits += 1;
            pos += 1;
        }
        if exp_digits == 0 {
            return Err(NumberParseError::InvalidDigit);
        }
        exponent = if exp_negative { -exp } else { exp };
    }
    if pos != bytes.len() {
        return Err(NumberParseError::InvalidDigit);
    }

    let shift = exponent - frac_digits as i64;
    if shift.unsigned_abs() > MAX_EXPONENT as u64 {
        return Err(NumberParseError::ExponentOutOfRange);
    }
    if negative {
        mantissa = -mantissa;
    }
    let value = if shift >= 0 {
        Rational::from_integer(mantissa * BigInt::from(10u32).pow(shift as u32))
    } else {
        Rational::new(mantissa, BigInt::from(10u32).pow((-shift) as u32))
    };
    Ok(value)
}

/// Parses "p/q" fraction literals, falling back to [`parse_decimal`] for
/// plain integers and decimals.
pub fn parse_fraction(input: &str) -> Result<Rational, NumberParseError> {
    let s = input.trim();
    match s.split_once('/') {
        None => parse_decimal(s),
        Some((num, den)) => {
            let n = parse_integer(num.trim())?;
            let d = parse_integer(den.trim())?;
            if d.is_zero() {
                return Err(NumberParseError::ZeroDenominator);
            }
            Ok(Rational::new(n, d))
        }
    }
}

fn parse_integer(s: &str) -> Result<BigInt, NumberParseError> {
    if s.is_empty() {
        return Err(NumberParseError::Empty);
    }
    let (negative, digits) = match s.as_bytes()[0] {
        b'+' => (false, &s[1..]),
        b'-' => (true, &s[1..]),
        _ => (false, s),
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(NumberParseError::InvalidDigit);
    }
    let mut value = BigInt::zero();
    for b in digits.bytes() {
        value = value * 10 + (b - b'0');
    }
    Ok(if negative { -value } else { value })
}

/// Converts a finite f64 through its shortest round-tripping decimal
/// representation, so JSON numbers behave like the equivalent string
/// literal: -0.805_f64 becomes exactly -805/1000.
pub fn from_f64_shortest(x: f64) -> Result<Rational, NumberParseError> {
    if !x.is_finite() {
        return Err(NumberParseError::NotFinite);
    }
    parse_decimal(&x.to_string())
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Rounds to `digits` fractional decimal digits, round-half-even, and
/// formats with a fixed number of places. Never prints "-0.000".
pub fn format_decimal(r: &Rational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = r * Rational::from_integer(scale.clone());
    let rounded = round_half_even(&scaled);
    let negative = rounded.sign() == Sign::Minus && !rounded.is_zero();
    let magnitude = rounded.magnitude().to_string();

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if digits == 0 {
        out.push_str(&magnitude);
        return out;
    }
    if magnitude.len() > digits {
        let split = magnitude.len() - digits;
        out.push_str(&magnitude[..split]);
        out.push('.');
        out.push_str(&magnitude[split..]);
    } else {
        out.push_str("0.");
        for _ in 0..(digits - magnitude.len()) {
            out.push('0');
        }
        out.push_str(&magnitude);
    }
    out
}

/// Nearest integer, ties to even.
fn round_half_even(r: &Rational) -> BigInt {
    let (quot, rem) = r.numer().div_rem(r.denom());
    if rem.is_zero() {
        return quot;
    }
    // div_rem truncates toward zero, so `quot` is the integer on the
    // zero-side of r and rem carries r's sign.
    let twice = rem.abs() * BigInt::from(2);
    let step = if rem.sign() == Sign::Minus {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    match twice.cmp(r.denom()) {
        core::cmp::Ordering::Less => quot,
        core::cmp::Ordering::Greater => quot + step,
        core::cmp::Ordering::Equal => {
            if quot.is_even() {
                quot
            } else {
                quot + step
            }
        }
    }
}

/// Formats as a reduced fraction: "3/16", or a plain integer when the
/// denominator is 1.
pub fn format_fraction(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        let mut s = r.numer().to_string();
        s.push('/');
        s.push_str(&r.denom().to_string());
        s
    }
}

/// Floor approximation of sqrt(r) with `digits` correct decimal places;
/// exact whenever the scaled radicand is a perfect square (e.g. sqrt of
/// 1/100 at any precision). Panics if r is negative.
pub fn sqrt_approx(r: &Rational, digits: u32) -> Rational {
    assert!(!r.is_negative(), "sqrt_approx of a negative rational");
    if r.is_zero() {
        return Rational::zero();
    }
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (r * Rational::from_integer(&scale * &scale)).floor();
    let root = scaled.to_integer().sqrt();
    Rational::new(root, scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn parses_plain_decimals_exactly() {
        assert_eq!(parse_decimal("-0.805").unwrap(), rat(-805, 1000));
        assert_eq!(parse_decimal("0.136").unwrap(), rat(136, 1000));
        assert_eq!(parse_decimal("2").unwrap(), rat_int(2));
        assert_eq!(parse_decimal("+.5").unwrap(), rat(1, 2));
        assert_eq!(parse_decimal("3.").unwrap(), rat_int(3));
    }

    #[test]
    fn parses_exponents() {
        assert_eq!(
            parse_decimal("1e-10").unwrap(),
            Rational::new(1.into(), BigInt::from(10u32).pow(10))
        );
        assert_eq!(parse_decimal("2.5E2").unwrap(), rat_int(250));
        assert_eq!(
            parse_decimal("1e10000"),
            Err(NumberParseError::ExponentOutOfRange)
        );
    }

    #[test]
    fn rejects_malformed_literals() {
        for bad in ["", ".", "1.2.3", "e5", "1e", "--2", "0x10", "1 2"] {
            assert!(parse_decimal(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn parses_fractions() {
        assert_eq!(parse_fraction("3/16").unwrap(), rat(3, 16));
        assert_eq!(parse_fraction("-1/2").unwrap(), rat(-1, 2));
        assert_eq!(parse_fraction("4/2").unwrap(), rat_int(2));
        assert_eq!(parse_fraction("0.25").unwrap(), rat(1, 4));
        assert_eq!(
            parse_fraction("1/0"),
            Err(NumberParseError::ZeroDenominator)
        );
    }

    #[test]
    fn f64_conversion_uses_shortest_decimal() {
        assert_eq!(from_f64_shortest(-0.805).unwrap(), rat(-805, 1000));
        assert_eq!(from_f64_shortest(0.1).unwrap(), rat(1, 10));
        assert_eq!(from_f64_shortest(-3.0).unwrap(), rat_int(-3));
        assert!(from_f64_shortest(f64::NAN).is_err());
        assert!(from_f64_shortest(f64::INFINITY).is_err());
    }

    #[test]
    fn formats_decimals_half_even() {
        let cases = vec![
            (rat(5, 2), 0, "2"),
            (rat(7, 2), 0, "4"),
            (rat(-5, 2), 0, "-2"),
            (rat(1, 8), 2, "0.12"),
            (rat(3, 8), 2, "0.38"),
            (rat(-1, 8), 2, "-0.12"),
            (rat(3127, 1000), 3, "3.127"),
            (rat(-805, 1000), 3, "-0.805"),
            (rat_int(0), 3, "0.000"),
            (rat(-1, 100000), 3, "0.000"),
            (rat(12345, 10), 2, "1234.50"),
        ];
        for (value, digits, expected) in cases {
            assert_eq!(format_decimal(&value, digits), expected);
        }
    }

    #[test]
    fn formats_fractions_reduced() {
        assert_eq!(format_fraction(&rat(3, 16)), "3/16");
        assert_eq!(format_fraction(&rat(4, 2)), "2");
        assert_eq!(format_fraction(&rat(-1, 2)), "-1/2");
        assert_eq!(format_fraction(&rat_int(0)), "0");
    }

    #[test]
    fn sqrt_is_exact_on_perfect_squares() {
        assert_eq!(sqrt_approx(&rat(1, 100), 12), rat(1, 10));
        assert_eq!(sqrt_approx(&rat(9, 16), 12), rat(3, 4));
        assert_eq!(sqrt_approx(&rat_int(0), 12), rat_int(0));
        let two = sqrt_approx(&rat_int(2), 12);
        let err = (&two * &two - rat_int(2)).abs();
        assert!(err < rat(1, 100_000_000_000));
    }
}
