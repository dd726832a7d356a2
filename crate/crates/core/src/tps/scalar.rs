//! Exact complex scalars with rational real and imaginary parts.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use rug::{Float, Rational};

use super::hp::HpComplex;
use super::TpsError;

/// A complex number `re + im·i` with `re, im ∈ ℚ`.
///
/// `rug::Rational` keeps both parts canonical (reduced, positive denominator),
/// so structural equality is numeric equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    re: Rational,
    im: Rational,
}

impl Scalar {
    pub fn new(re: Rational, im: Rational) -> Self {
        Scalar { re, im }
    }

    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn i() -> Self {
        Scalar::new(Rational::new(), Rational::from(1))
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::new(Rational::from(n), Rational::new())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::new(Rational::from((num, den)), Rational::new())
    }

    pub fn real(re: Rational) -> Self {
        Scalar::new(re, Rational::new())
    }

    pub fn re(&self) -> &Rational {
        &self.re
    }

    pub fn im(&self) -> &Rational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.cmp0().is_eq() && self.im.cmp0().is_eq()
    }

    pub fn is_one(&self) -> bool {
        self.im.cmp0().is_eq() && self.re == 1
    }

    pub fn is_real(&self) -> bool {
        self.im.cmp0().is_eq()
    }

    pub fn conj(&self) -> Self {
        Scalar::new(self.re.clone(), Rational::from(-&self.im))
    }

    /// `|x|²`, exact.
    pub fn norm_sqr(&self) -> Rational {
        Rational::from(&self.re * &self.re) + Rational::from(&self.im * &self.im)
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.is_real() {
            return Some(Scalar::real(self.re.clone().recip()));
        }
        let n = self.norm_sqr();
        let re = Rational::from(&self.re / &n);
        let im = -Rational::from(&self.im / &n);
        Some(Scalar::new(re, im))
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Option<Self> {
        rhs.recip().map(|inv| self * &inv)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Scalar::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn to_hp(&self, prec: u32) -> HpComplex {
        HpComplex::new(
            Float::with_val(prec, &self.re),
            Float::with_val(prec, &self.im),
        )
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let re_zero = self.re.cmp0().is_eq();
        let im_zero = self.im.cmp0().is_eq();
        match (re_zero, im_zero) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                if self.im.cmp0().is_lt() {
                    write!(f, "{}-{}i", self.re, Rational::from(-&self.im))
                } else {
                    write!(f, "{}+{}i", self.re, self.im)
                }
            }
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    let valid = !body.is_empty()
        && body.split('/').count() <= 2
        && body.split('/').all(|p| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit()));
    if !valid {
        return None;
    }
    let r: Rational = s.strip_prefix('+').unwrap_or(s).parse().ok()?;
    Some(r)
}

/// Parses `<rat>`, `<rat>i`, `<rat>+<rat>i` or `<rat>-<rat>i`, where `<rat>` is a
/// signed integer or fraction `a/b`. A bare `i` or `-i` is accepted for ±1·i.
impl FromStr for Scalar {
    type Err = TpsError;

    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let bad = || TpsError::BadScalar(input.to_string());
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(bad());
        }
        let Some(body) = s.strip_suffix('i') else {
            return parse_rational(&s).map(Scalar::real).ok_or_else(bad);
        };
        // Split at the last sign that is not the leading one; that separates re from im.
        let bytes = body.as_bytes();
        let split = (1..bytes.len()).rev().find(|&i| matches!(bytes[i], b'+' | b'-')).map(|i| {
            // "<rat>+-<rat>i": the separator is the '+' in front of the signed part
            if i > 1 && bytes[i] == b'-' && bytes[i - 1] == b'+' {
                i - 1
            } else {
                i
            }
        });
        let (re_part, im_part) = match split {
            Some(idx) => (&body[..idx], &body[idx..]),
            None => ("", body),
        };
        let im_part = if im_part.starts_with("+-") { &im_part[1..] } else { im_part };
        let im = match im_part {
            "" | "+" => Rational::from(1),
            "-" => Rational::from(-1),
            p => parse_rational(p).ok_or_else(bad)?,
        };
        let re = if re_part.is_empty() {
            Rational::new()
        } else {
            parse_rational(re_part).ok_or_else(bad)?
        };
        Ok(Scalar::new(re, im))
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        Scalar::new(
            Rational::from(&self.re + &rhs.re),
            Rational::from(&self.im + &rhs.im),
        )
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        Scalar::new(
            Rational::from(&self.re - &rhs.re),
            Rational::from(&self.im - &rhs.im),
        )
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        // most coefficients in practice are real
        if self.is_real() && rhs.is_real() {
            return Scalar::real(Rational::from(&self.re * &rhs.re));
        }
        let re = Rational::from(&self.re * &rhs.re) - Rational::from(&self.im * &rhs.im);
        let im = Rational::from(&self.re * &rhs.im) + Rational::from(&self.im * &rhs.re);
        Scalar::new(re, im)
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    /// Panics on division by zero; use [`Scalar::checked_div`] otherwise.
    fn div(self, rhs: &'a Scalar) -> Scalar {
        self.checked_div(rhs).expect("division by zero scalar")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(Rational::from(-&self.re), Rational::from(-&self.im))
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re, -self.im)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
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
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

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

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    #[test]
    fn parse_grammar() {
        assert_eq!(s("3"), Scalar::from_int(3));
        assert_eq!(s("-1/2"), Scalar::from_ratio(-1, 2));
        assert_eq!(s("2/4"), Scalar::from_ratio(1, 2));
        assert_eq!(s("1/2+3/4i"), Scalar::new(Rational::from((1, 2)), Rational::from((3, 4))));
        assert_eq!(s("1/2-3i"), Scalar::new(Rational::from((1, 2)), Rational::from(-3)));
        assert_eq!(s("1/2+-3i"), s("1/2-3i"));
        assert_eq!(s("-5/3i"), Scalar::new(Rational::new(), Rational::from((-5, 3))));
        assert_eq!(s("i"), Scalar::i());
        assert_eq!(s("-i"), -Scalar::i());
        assert_eq!(s("-2-i"), Scalar::new(Rational::from(-2), Rational::from(-1)));
    }

    #[test]
    fn parse_rejects_garbage() {
        for bad in ["", "1/0", "x", "1//2", "1.5", "1/2+", "1+2", "++1", "1/2i3", "/3"] {
            assert!(bad.parse::<Scalar>().is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn display_round_trips() {
        for x in ["0", "7", "-1/2", "3i", "-1/3i", "1/2+3/4i", "-5-2/7i"] {
            let v = s(x);
            assert_eq!(v.to_string().parse::<Scalar>().unwrap(), v);
        }
        assert_eq!(s("1/2+-3i").to_string(), "1/2-3i");
    }

    #[test]
    fn field_ops() {
        let a = s("1+2i");
        let b = s("3-i");
        assert_eq!(&a * &b, s("5+5i"));
        assert_eq!(&(&a / &b) * &b, a);
        assert_eq!(a.recip().unwrap(), s("1/5-2/5i"));
        assert!(Scalar::zero().recip().is_none());
        assert_eq!(s("i").pow(4), Scalar::one());
        assert_eq!(s("1+i").pow(2), s("2i"));
    }
}
