//! Scalar abstraction shared by every exact computation in the crate.
//!
//! The chain, coupling and analysis code only needs field arithmetic, an
//! absolute value and an ordering, so it is written once against [`Scalar`]
//! and instantiated for `f64`, `f32` and arbitrary-precision rationals.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

/// Real-like field used for probabilities.
pub trait Scalar:
    Clone + PartialOrd + Debug + Display + Num + Signed + Send + Sync + 'static
{
    /// Absolute slack for validation checks such as row sums.
    ///
    /// Zero for exact types.
    fn tolerance() -> Self;

    /// Converts an `f64` into this scalar. Exact for rationals.
    fn lossy_from_f64(x: f64) -> Self;

    /// Nearest `f64` to this value.
    fn as_f64(&self) -> f64;

    /// Parses a decimal string such as `"0.25"`, `"1e-3"` or (rationals
    /// only) `"1/3"`.
    fn parse_decimal(s: &str) -> Option<Self>;

    fn from_usize(n: usize) -> Self {
        let mut out = Self::zero();
        // Counts used here are tiny (state counts, step indices).
        for _ in 0..n {
            out = out + Self::one();
        }
        out
    }

    fn is_exact() -> bool {
        false
    }
}

/// Smaller of two scalars under `PartialOrd`.
pub fn min_of<S: Scalar>(a: &S, b: &S) -> S {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// Larger of two scalars under `PartialOrd`.
pub fn max_of<S: Scalar>(a: &S, b: &S) -> S {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-12
    }
    fn lossy_from_f64(x: f64) -> Self {
        x
    }
    fn as_f64(&self) -> f64 {
        *self
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        parse_float_ratio::<f64>(s.trim())
    }
    fn from_usize(n: usize) -> Self {
        n as f64
    }
}

impl Scalar for f32 {
    fn tolerance() -> Self {
        1e-5
    }
    fn lossy_from_f64(x: f64) -> Self {
        x as f32
    }
    fn as_f64(&self) -> f64 {
        *self as f64
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        parse_float_ratio::<f32>(s.trim())
    }
    fn from_usize(n: usize) -> Self {
        n as f32
    }
}

impl Scalar for BigRational {
    fn tolerance() -> Self {
        BigRational::zero()
    }
    fn lossy_from_f64(x: f64) -> Self {
        BigRational::from_float(x).unwrap_or_else(BigRational::zero)
    }
    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        parse_exact_decimal(s.trim())
    }
    fn from_usize(n: usize) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn is_exact() -> bool {
        true
    }
}

/// `x` or `p/q` with float components.
fn parse_float_ratio<F: FromStr + num_traits::Float>(s: &str) -> Option<F> {
    let v = match s.split_once('/') {
        Some((n, d)) => {
            let d = F::from_str(d.trim()).ok()?;
            if d.is_zero() {
                return None;
            }
            F::from_str(n.trim()).ok()? / d
        }
        None => F::from_str(s).ok()?,
    };
    v.is_finite().then_some(v)
}

fn parse_exact_decimal(s: &str) -> Option<BigRational> {
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).ok()?;
        let den = BigInt::from_str(den.trim()).ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], i32::from_str(&s[i + 1..]).ok()?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(BigInt::from_str(&digits).ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let factor = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= factor;
    } else {
        value /= factor;
    }
    Some(if negative { -value } else { value })
}
