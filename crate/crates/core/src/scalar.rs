use core::fmt::Debug;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational, the exact-mode scalar.
pub type Rational = BigRational;

/// Field arithmetic shared by the exact and floating-point code paths.
///
/// Comparisons against tolerances go through [`Scalar::within`]: rationals
/// compare exactly and ignore the tolerance, floats compare with it.
pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;

    fn from_int(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self;

    fn within(&self, other: &Self, tol: f64) -> bool;

    fn is_nan(&self) -> bool {
        false
    }

    fn powi(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        libm::fabs(*self)
    }

    fn within(&self, other: &Self, tol: f64) -> bool {
        libm::fabs(self - other) <= tol
    }

    fn is_nan(&self) -> bool {
        f64::is_nan(*self)
    }

    fn powi(&self, k: u32) -> Self {
        libm::pow(*self, k as f64)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn within(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
}

/// Parses a plain decimal literal such as `0.3`, `-12.25` or `1e-3` exactly.
pub fn rational_from_decimal(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.find('.') {
        Some(pos) => (&digits[..pos], &digits[pos + 1..]),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut all = alloc::string::String::with_capacity(int_part.len() + frac_part.len());
    all.push_str(int_part);
    all.push_str(frac_part);
    let mut numer: BigInt = all.parse().ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!(rational_from_decimal("0.3"), Some(Rational::from_ratio(3, 10)));
        assert_eq!(rational_from_decimal("-12.25"), Some(Rational::from_ratio(-49, 4)));
        assert_eq!(rational_from_decimal("1e-3"), Some(Rational::from_ratio(1, 1000)));
        assert_eq!(rational_from_decimal("2.5E2"), Some(Rational::from_int(250)));
        assert_eq!(rational_from_decimal(".5"), Some(Rational::from_ratio(1, 2)));
        assert_eq!(rational_from_decimal("abc"), None);
        assert_eq!(rational_from_decimal(""), None);
    }

    #[test]
    fn rational_to_f64_survives_large_terms() {
        let big = Rational::from_int(3).powi(800) / Rational::from_int(3).powi(799);
        assert_eq!(Scalar::to_f64(&big), 3.0);
    }
}
