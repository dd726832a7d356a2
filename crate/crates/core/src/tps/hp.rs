//! Binary floating-point complex numbers at a configurable precision.

use std::fmt;

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use super::TpsError;

pub const MIN_PRECISION: u32 = 64;

/// Complex value backed by two MPFR floats of the same precision.
#[derive(Clone, PartialEq)]
pub struct HpComplex {
    pub re: Float,
    pub im: Float,
}

impl HpComplex {
    pub fn new(re: Float, im: Float) -> Self {
        HpComplex { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        HpComplex::new(Float::new(prec), Float::new(prec))
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        HpComplex::new(Float::with_val(prec, re), Float::with_val(prec, im))
    }

    pub fn from_polar(prec: u32, modulus: &Float, angle: &Float) -> Self {
        let (s, c) = Float::with_val(prec, angle).sin_cos(Float::new(prec));
        HpComplex::new(Float::with_val(prec, modulus * &c), Float::with_val(prec, modulus * &s))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        HpComplex::new(Float::with_val(prec, &self.re), Float::with_val(prec, &self.im))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// Errors on NaN or infinite parts.
    pub fn check_finite(self) -> Result<Self, TpsError> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(TpsError::NonFinite)
        }
    }

    pub fn add(&self, rhs: &HpComplex) -> HpComplex {
        let p = self.prec();
        HpComplex::new(
            Float::with_val(p, &self.re + &rhs.re),
            Float::with_val(p, &self.im + &rhs.im),
        )
    }

    pub fn sub(&self, rhs: &HpComplex) -> HpComplex {
        let p = self.prec();
        HpComplex::new(
            Float::with_val(p, &self.re - &rhs.re),
            Float::with_val(p, &self.im - &rhs.im),
        )
    }

    pub fn mul(&self, rhs: &HpComplex) -> HpComplex {
        let p = self.prec();
        let ac = Float::with_val(p, &self.re * &rhs.re);
        let bd = Float::with_val(p, &self.im * &rhs.im);
        let ad = Float::with_val(p, &self.re * &rhs.im);
        let bc = Float::with_val(p, &self.im * &rhs.re);
        HpComplex::new(ac - bd, ad + bc)
    }

    pub fn scale(&self, k: &Float) -> HpComplex {
        let p = self.prec();
        HpComplex::new(Float::with_val(p, &self.re * k), Float::with_val(p, &self.im * k))
    }

    pub fn neg(&self) -> HpComplex {
        HpComplex::new(Float::with_val(self.prec(), -&self.re), Float::with_val(self.prec(), -&self.im))
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, &self.re * &self.re) + Float::with_val(p, &self.im * &self.im)
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    /// Principal argument in (−π, π].
    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    pub fn recip(&self) -> Option<HpComplex> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        let p = self.prec();
        Some(HpComplex::new(
            Float::with_val(p, &self.re / &n),
            -Float::with_val(p, &self.im / &n),
        ))
    }

    pub fn div(&self, rhs: &HpComplex) -> Option<HpComplex> {
        rhs.recip().map(|r| self.mul(&r))
    }

    pub fn powi(&self, e: u32) -> HpComplex {
        let mut acc = HpComplex::from_f64(self.prec(), 1.0, 0.0);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Principal branch of `self^x` for real `x`.
    pub fn powf(&self, x: &Float) -> HpComplex {
        let p = self.prec();
        if self.is_zero() {
            return HpComplex::zero(p);
        }
        let modulus = Float::with_val(p, self.abs().pow(x));
        let angle = Float::with_val(p, self.arg() * x);
        HpComplex::from_polar(p, &modulus, &angle)
    }

    /// All `n` complex `n`-th roots, ordered by increasing branch index
    /// `k = 0..n` of `|z|^{1/n} e^{i(arg z + 2πk)/n}`.
    pub fn nth_roots(&self, n: u32) -> Vec<HpComplex> {
        let p = self.prec();
        let inv_n = Float::with_val(p, 1) / n;
        let modulus = Float::with_val(p, self.abs().pow(&inv_n));
        let two_pi = Float::with_val(p, Constant::Pi) * 2u32;
        let base = self.arg();
        (0..n)
            .map(|k| {
                let ang = Float::with_val(p, &base + Float::with_val(p, &two_pi * k)) / n;
                HpComplex::from_polar(p, &modulus, &ang)
            })
            .collect()
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// Decimal rendering of each part with `digits` significant digits.
    pub fn to_decimal_parts(&self, digits: usize) -> (String, String) {
        (fmt_float(&self.re, digits), fmt_float(&self.im, digits))
    }
}

/// Scientific-notation decimal string with `digits` significant digits.
pub fn fmt_float(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x.is_sign_negative() { "-inf".into() } else { "inf".into() };
    }
    let s = x.to_string_radix(10, Some(digits.max(1)));
    // MPFR style "1.2345e-5"; normalize exponent marker
    s.replace('@', "e")
}

/// Number of decimal digits that a `prec`-bit mantissa supports.
pub fn decimal_digits(prec: u32) -> usize {
    ((prec as f64) * std::f64::consts::LOG10_2).floor() as usize
}

impl fmt::Debug for HpComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_decimal_parts(20);
        write!(f, "({re} + {im}i)")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_unity() {
        let one = HpComplex::from_f64(128, 1.0, 0.0);
        let roots = one.nth_roots(4);
        assert_eq!(roots.len(), 4);
        for r in &roots {
            let back = r.powi(4);
            assert!((back.re.to_f64() - 1.0).abs() < 1e-30);
            assert!(back.im.to_f64().abs() < 1e-30);
        }
        assert!((roots[1].im.to_f64() - 1.0).abs() < 1e-30);
    }

    #[test]
    fn arithmetic() {
        let a = HpComplex::from_f64(128, 1.0, 2.0);
        let b = HpComplex::from_f64(128, 3.0, -1.0);
        let p = a.mul(&b);
        assert_eq!(p.to_f64_pair(), (5.0, 5.0));
        let q = p.div(&b).unwrap();
        assert!((q.re.to_f64() - 1.0).abs() < 1e-30);
        assert!((q.im.to_f64() - 2.0).abs() < 1e-30);
        assert!(HpComplex::zero(64).recip().is_none());
    }

    #[test]
    fn non_finite_is_an_error() {
        let nan = HpComplex::new(Float::with_val(64, f64::NAN), Float::new(64));
        assert!(nan.check_finite().is_err());
        let inf = HpComplex::new(Float::with_val(64, f64::INFINITY), Float::new(64));
        assert!(inf.check_finite().is_err());
    }

    #[test]
    fn formatting() {
        assert_eq!(fmt_float(&Float::with_val(64, 0.5), 3), "5.00e-1");
        assert_eq!(fmt_float(&Float::new(64), 3), "0");
    }
}
