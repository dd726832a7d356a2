//! Bivariate truncated power series in `(z, w)` with exact coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::hp::HpComplex;
use super::scalar::Scalar;
use super::univariate::Series1;
use super::TpsError;

/// Exponent pair of `z^z w^w`. Ordered by total degree first, so map
/// iteration walks the series degree by degree.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Mono {
    pub z: u32,
    pub w: u32,
}

impl Mono {
    pub fn new(z: u32, w: u32) -> Self {
        Mono { z, w }
    }

    pub fn degree(self) -> u32 {
        self.z + self.w
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.degree(), self.w).cmp(&(other.degree(), other.w))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `Σ c_{ij} z^i w^j` over `i + j ≤ N`. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries2 {
    trunc: u32,
    coeffs: BTreeMap<Mono, Scalar>,
}

pub type Ts2 = TruncatedSeries2;

impl TruncatedSeries2 {
    pub fn zero(trunc: u32) -> Self {
        TruncatedSeries2 { trunc, coeffs: BTreeMap::new() }
    }

    pub fn constant(trunc: u32, c: Scalar) -> Self {
        Self::monomial(trunc, 0, 0, c)
    }

    pub fn one(trunc: u32) -> Self {
        Self::constant(trunc, Scalar::one())
    }

    pub fn z(trunc: u32) -> Self {
        Self::monomial(trunc, 1, 0, Scalar::one())
    }

    pub fn w(trunc: u32) -> Self {
        Self::monomial(trunc, 0, 1, Scalar::one())
    }

    pub fn monomial(trunc: u32, zp: u32, wp: u32, c: Scalar) -> Self {
        let mut s = Self::zero(trunc);
        s.add_term(zp, wp, &c);
        s
    }

    /// Sums the given terms; duplicates accumulate and terms above `trunc` are dropped.
    pub fn from_terms<'a>(trunc: u32, terms: impl IntoIterator<Item = (u32, u32, &'a Scalar)>) -> Self {
        let mut s = Self::zero(trunc);
        for (i, j, c) in terms {
            s.add_term(i, j, c);
        }
        s
    }

    /// Embeds a univariate series in `z`.
    pub fn from_z_series(trunc: u32, s: &Series1) -> Self {
        Self::from_terms(trunc, s.coeffs().iter().enumerate().map(|(i, c)| (i as u32, 0, c)))
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn coeff(&self, zp: u32, wp: u32) -> Scalar {
        self.coeffs.get(&Mono::new(zp, wp)).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, zp: u32, wp: u32, c: &Scalar) {
        if zp + wp > self.trunc || c.is_zero() {
            return;
        }
        let key = Mono::new(zp, wp);
        let entry = self.coeffs.entry(key).or_default();
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (Mono, &Scalar)> + '_ {
        self.coeffs.iter().map(|(m, c)| (*m, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest total degree with a nonzero coefficient.
    pub fn valuation(&self) -> Option<u32> {
        self.coeffs.keys().next().map(|m| m.degree())
    }

    /// Highest total degree with a nonzero coefficient.
    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().map(|m| m.degree())
    }

    pub fn with_trunc(&self, trunc: u32) -> Self {
        Self::from_terms(trunc, self.terms().map(|(m, c)| (m.z, m.w, c)))
    }

    /// The total-degree-`d` terms.
    pub fn degree_part(&self, d: u32) -> Self {
        let coeffs = self
            .coeffs
            .range(Mono::new(d, 0)..=Mono::new(0, d))
            .map(|(m, c)| (*m, c.clone()))
            .collect();
        TruncatedSeries2 { trunc: self.trunc, coeffs }
    }

    /// Terms of total degree `≥ d`.
    pub fn tail_from(&self, d: u32) -> Self {
        let coeffs = self.coeffs.range(Mono::new(d, 0)..).map(|(m, c)| (*m, c.clone())).collect();
        TruncatedSeries2 { trunc: self.trunc, coeffs }
    }

    /// Coefficients of `h(1, u)` for a degree-`d` slice `h`, indexed by the power of `u`.
    pub fn dehomogenize(&self, d: u32) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); d as usize + 1];
        for (m, c) in self.degree_part(d).terms() {
            out[m.w as usize] = c.clone();
        }
        out
    }

    /// `f(z, 0)` as a univariate series in `z`.
    pub fn restrict_w0(&self) -> Series1 {
        let mut s = Series1::zero(self.trunc);
        for (m, c) in self.terms().filter(|(m, _)| m.w == 0) {
            s.set_coeff(m.z, c.clone());
        }
        s
    }

    /// Terms whose `w`-exponent equals `j`, as a series in `z` (the `w^j` factor stripped).
    pub fn w_slice(&self, j: u32) -> Series1 {
        let mut s = Series1::zero(self.trunc.saturating_sub(j));
        for (m, c) in self.terms().filter(|(m, _)| m.w == j) {
            s.set_coeff(m.z, c.clone());
        }
        s
    }

    /// `self / w^k`; errors unless every term carries at least `w^k`.
    pub fn div_w_pow(&self, k: u32) -> Result<Self, TpsError> {
        let mut out = Self::zero(self.trunc.saturating_sub(k));
        for (m, c) in self.terms() {
            if m.w < k {
                return Err(TpsError::NotDivisible);
            }
            out.add_term(m.z, m.w - k, c);
        }
        Ok(out)
    }

    /// Terms with `w`-exponent at least `k`.
    pub fn filter_w_at_least(&self, k: u32) -> Self {
        let coeffs = self.coeffs.iter().filter(|(m, _)| m.w >= k).map(|(m, c)| (*m, c.clone())).collect();
        TruncatedSeries2 { trunc: self.trunc, coeffs }
    }

    pub fn d_dz(&self) -> Self {
        let mut out = Self::zero(self.trunc);
        for (m, c) in self.terms().filter(|(m, _)| m.z > 0) {
            out.add_term(m.z - 1, m.w, &(c * &Scalar::from_int(m.z as i64)));
        }
        out
    }

    pub fn d_dw(&self) -> Self {
        let mut out = Self::zero(self.trunc);
        for (m, c) in self.terms().filter(|(m, _)| m.w > 0) {
            out.add_term(m.z, m.w - 1, &(c * &Scalar::from_int(m.w as i64)));
        }
        out
    }

    pub fn scale(&self, k: &Scalar) -> Self {
        if k.is_zero() {
            return Self::zero(self.trunc);
        }
        let coeffs = self.coeffs.iter().map(|(m, c)| (*m, c * k)).collect();
        TruncatedSeries2 { trunc: self.trunc, coeffs }
    }

    fn check(&self, other: &Self) -> Result<(), TpsError> {
        if self.trunc != other.trunc {
            Err(TpsError::TruncationMismatch(self.trunc, other.trunc))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, TpsError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.z, m.w, c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, TpsError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.z, m.w, &-c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, TpsError> {
        self.check(other)?;
        Ok(self.mul_to(other, self.trunc))
    }

    /// Product keeping only terms of total degree `≤ limit` (and `≤ N`).
    pub fn mul_to(&self, other: &Self, limit: u32) -> Self {
        let limit = limit.min(self.trunc);
        let mut acc: BTreeMap<Mono, Scalar> = BTreeMap::new();
        for (ma, ca) in &self.coeffs {
            let da = ma.degree();
            if da > limit {
                break;
            }
            for (mb, cb) in &other.coeffs {
                if da + mb.degree() > limit {
                    break;
                }
                let key = Mono::new(ma.z + mb.z, ma.w + mb.w);
                *acc.entry(key).or_default() += &(ca * cb);
            }
        }
        acc.retain(|_, c| !c.is_zero());
        TruncatedSeries2 { trunc: self.trunc, coeffs: acc }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.trunc);
        for _ in 0..e {
            acc = acc.mul_to(self, self.trunc);
        }
        acc
    }

    /// Substitution `self(g1, g2)`. Both `g1` and `g2` must have zero constant term
    /// so that every output degree depends only on finitely many input terms.
    pub fn compose(&self, g1: &Self, g2: &Self) -> Result<Self, TpsError> {
        self.check(g1)?;
        self.check(g2)?;
        if !g1.coeff(0, 0).is_zero() || !g2.coeff(0, 0).is_zero() {
            return Err(TpsError::NonzeroConstant);
        }
        let n = self.trunc;
        let max_w = self.terms().map(|(m, _)| m.w).max().unwrap_or(0);
        let max_z = self.terms().map(|(m, _)| m.z).max().unwrap_or(0);
        // g2^j, each truncated to what can still contribute
        let mut g2_pows = Vec::with_capacity(max_w as usize + 1);
        g2_pows.push(Self::one(n));
        for j in 1..=max_w {
            let next = g2_pows[j as usize - 1].mul_to(g2, n);
            g2_pows.push(next);
        }
        // Horner in g1: Σ_i g1^i · inner_i(g2), inner_i = Σ_j c_ij g2^j
        let mut acc = Self::zero(n);
        for i in (0..=max_z).rev() {
            acc = acc.mul_to(g1, n);
            for (m, c) in self.terms().filter(|(m, _)| m.z == i) {
                for (mp, cp) in g2_pows[m.w as usize].terms() {
                    acc.add_term(mp.z, mp.w, &(c * cp));
                }
            }
        }
        Ok(acc)
    }

    /// Numerical evaluation at a point, in the precision of `z`.
    pub fn eval_hp(&self, z: &HpComplex, w: &HpComplex) -> Result<HpComplex, TpsError> {
        let p = z.prec();
        let max_z = self.terms().map(|(m, _)| m.z).max().unwrap_or(0);
        let max_w = self.terms().map(|(m, _)| m.w).max().unwrap_or(0);
        let zp = powers(z, max_z);
        let wp = powers(w, max_w);
        let mut acc = HpComplex::zero(p);
        for (m, c) in self.terms() {
            let t = c.to_hp(p).mul(&zp[m.z as usize]).mul(&wp[m.w as usize]);
            acc = acc.add(&t);
        }
        acc.check_finite()
    }
}

pub(crate) fn powers(x: &HpComplex, max: u32) -> Vec<HpComplex> {
    let mut v = Vec::with_capacity(max as usize + 1);
    v.push(HpComplex::from_f64(x.prec(), 1.0, 0.0));
    for i in 1..=max as usize {
        let next = v[i - 1].mul(x);
        v.push(next);
    }
    v
}

impl fmt::Debug for TruncatedSeries2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0 [N={}]", self.trunc);
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .map(|(m, c)| format!("({c})z^{}w^{}", m.z, m.w))
            .collect();
        write!(f, "{} [N={}]", terms.join(" + "), self.trunc)
    }
}

// Operator forms panic on truncation mismatch; the `checked_*` methods report it.
impl<'a> Add<&'a Ts2> for &'a Ts2 {
    type Output = Ts2;
    fn add(self, rhs: &'a Ts2) -> Ts2 {
        self.checked_add(rhs).expect("truncation mismatch")
    }
}

impl<'a> Sub<&'a Ts2> for &'a Ts2 {
    type Output = Ts2;
    fn sub(self, rhs: &'a Ts2) -> Ts2 {
        self.checked_sub(rhs).expect("truncation mismatch")
    }
}

impl<'a> Mul<&'a Ts2> for &'a Ts2 {
    type Output = Ts2;
    fn mul(self, rhs: &'a Ts2) -> Ts2 {
        self.checked_mul(rhs).expect("truncation mismatch")
    }
}

impl Neg for &Ts2 {
    type Output = Ts2;
    fn neg(self) -> Ts2 {
        self.scale(&Scalar::from_int(-1))
    }
}
