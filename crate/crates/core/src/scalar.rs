//! Exact Gaussian-rational scalars.
//!
//! Every number in the crate is an element of ℚ(i): a pair of arbitrary
//! precision rationals. `BigRational` keeps denominators positive and in
//! lowest terms after each operation, so structural equality is value
//! equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    re: BigRational,
    im: BigRational,
}

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn i() -> Self {
        Scalar::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Scalar::new(BigRational::new(BigInt::from(num), BigInt::from(den)), BigRational::zero())
    }

    pub fn complex(re: i64, im: i64) -> Self {
        Scalar::new(BigRational::from_integer(BigInt::from(re)), BigRational::from_integer(BigInt::from(im)))
    }

    pub fn from_real(re: BigRational) -> Self {
        Scalar::new(re, BigRational::zero())
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Scalar::new(self.re.clone(), -self.im.clone())
    }

    /// |s|², always a nonnegative rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Sign of a real scalar; `None` when the imaginary part is nonzero.
    pub fn real_sign(&self) -> Option<Ordering> {
        if !self.im.is_zero() {
            return None;
        }
        Some(self.re.cmp(&BigRational::zero()))
    }

    pub fn is_positive_real(&self) -> bool {
        self.real_sign() == Some(Ordering::Greater)
    }

    pub fn is_negative_real(&self) -> bool {
        self.real_sign() == Some(Ordering::Less)
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Scalar::new(&self.re / &n, -(&self.im / &n)))
    }

    /// Total order used only for canonical tie-breaking (real part, then
    /// imaginary part). It is not a field order.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a> $tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'a Scalar) -> Scalar {
                let f: fn(&Scalar, &Scalar) -> Scalar = $body;
                f(self, rhs)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'a Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| Scalar::new(&a.re + &b.re, &a.im + &b.im));
binop!(Sub, sub, |a, b| Scalar::new(&a.re - &b.re, &a.im - &b.im));
binop!(Mul, mul, |a, b| {
    if a.im.is_zero() && b.im.is_zero() {
        return Scalar::from_real(&a.re * &b.re);
    }
    Scalar::new(&a.re * &b.re - &a.im * &b.im, &a.re * &b.im + &a.im * &b.re)
});
binop!(Div, div, |a, b| {
    if b.im.is_zero() {
        assert!(!b.re.is_zero(), "division by zero scalar");
        return Scalar::new(&a.re / &b.re, &a.im / &b.re);
    }
    a * &b.inv().expect("division by zero scalar")
});

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re, -self.im)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re.clone(), -self.im.clone())
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |mut acc, s| {
            acc += &s;
            acc
        })
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rational(&self.re));
        }
        if self.re.is_zero() {
            return write!(f, "{} i", fmt_rational(&self.im));
        }
        let sign = if self.im.is_negative() { '-' } else { '+' };
        write!(f, "{}{}{} i", fmt_rational(&self.re), sign, fmt_rational(&self.im.abs()))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn parse_rational(tok: &str) -> Option<BigRational> {
    let (num, den) = match tok.split_once('/') {
        Some((n, d)) => (n, d),
        None => (tok, "1"),
    };
    if num.is_empty() || den.is_empty() || den.starts_with(['+', '-']) {
        return None;
    }
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

/// Grammar: `p/q` or `p/q+r/s i` (also `r/s i`, `i`, `-i`); whitespace is
/// ignored and both parts may carry a sign.
impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::parse(format!("invalid scalar {s:?}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad());
        }
        let Some(body) = compact.strip_suffix('i') else {
            return parse_rational(&compact).map(Scalar::from_real).ok_or_else(bad);
        };
        // split at the last sign that is not the leading one
        let split = body.char_indices().skip(1).filter(|(_, c)| *c == '+' || *c == '-').map(|(i, _)| i).last();
        let (re_part, im_part) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("", body),
        };
        let re = if re_part.is_empty() { BigRational::zero() } else { parse_rational(re_part).ok_or_else(bad)? };
        let im = match im_part {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            t => parse_rational(t.strip_prefix('+').unwrap_or(t)).ok_or_else(bad)?,
        };
        Ok(Scalar::new(re, im))
    }
}

impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
        }
        match Raw::deserialize(de)? {
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
            Raw::Int(n) => Ok(Scalar::from_int(n)),
        }
    }
}
