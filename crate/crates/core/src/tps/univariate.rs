//! Dense univariate truncated power series with exact coefficients.

use std::fmt;

use super::scalar::Scalar;
use super::TpsError;

/// `Σ_{i=0}^{N} c_i x^i`, truncated at degree `N`.
#[derive(Clone, PartialEq, Eq)]
pub struct Series1 {
    trunc: u32,
    coeffs: Vec<Scalar>,
}

impl Series1 {
    pub fn zero(trunc: u32) -> Self {
        Series1 { trunc, coeffs: vec![Scalar::zero(); trunc as usize + 1] }
    }

    pub fn identity(trunc: u32) -> Self {
        let mut s = Series1::zero(trunc);
        if trunc >= 1 {
            s.coeffs[1] = Scalar::one();
        }
        s
    }

    pub fn constant(trunc: u32, c: Scalar) -> Self {
        let mut s = Series1::zero(trunc);
        s.coeffs[0] = c;
        s
    }

    /// Builds from coefficients `c_0, c_1, …`; entries past `trunc` are dropped.
    pub fn from_coeffs(trunc: u32, coeffs: impl IntoIterator<Item = Scalar>) -> Self {
        let mut s = Series1::zero(trunc);
        for (i, c) in coeffs.into_iter().enumerate().take(trunc as usize + 1) {
            s.coeffs[i] = c;
        }
        s
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn coeff(&self, i: u32) -> &Scalar {
        static ZERO: std::sync::OnceLock<Scalar> = std::sync::OnceLock::new();
        self.coeffs.get(i as usize).unwrap_or_else(|| ZERO.get_or_init(Scalar::zero))
    }

    pub fn set_coeff(&mut self, i: u32, c: Scalar) {
        if i <= self.trunc {
            self.coeffs[i as usize] = c;
        }
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    /// Index of the first nonzero coefficient, `None` for the zero series.
    pub fn valuation(&self) -> Option<u32> {
        self.coeffs.iter().position(|c| !c.is_zero()).map(|i| i as u32)
    }

    pub fn with_trunc(&self, trunc: u32) -> Self {
        Series1::from_coeffs(trunc, self.coeffs.iter().cloned())
    }

    fn check(&self, other: &Series1) -> Result<(), TpsError> {
        if self.trunc != other.trunc {
            return Err(TpsError::TruncationMismatch(self.trunc, other.trunc));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Series1) -> Result<Series1, TpsError> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Series1 { trunc: self.trunc, coeffs })
    }

    pub fn checked_sub(&self, other: &Series1) -> Result<Series1, TpsError> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Series1 { trunc: self.trunc, coeffs })
    }

    pub fn checked_mul(&self, other: &Series1) -> Result<Series1, TpsError> {
        self.check(other)?;
        let n = self.trunc as usize;
        let mut out = vec![Scalar::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                if !b.is_zero() {
                    out[i + j] += &(a * b);
                }
            }
        }
        Ok(Series1 { trunc: self.trunc, coeffs: out })
    }

    pub fn scale(&self, k: &Scalar) -> Series1 {
        Series1 { trunc: self.trunc, coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    pub fn pow(&self, e: u32) -> Series1 {
        let mut acc = Series1::constant(self.trunc, Scalar::one());
        for _ in 0..e {
            acc = acc.checked_mul(self).expect("same truncation");
        }
        acc
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn recip(&self) -> Result<Series1, TpsError> {
        let c0 = self.coeffs[0].recip().ok_or(TpsError::NotInvertible("zero constant term"))?;
        let n = self.trunc as usize;
        let mut out = vec![Scalar::zero(); n + 1];
        out[0] = c0.clone();
        for d in 1..=n {
            let mut acc = Scalar::zero();
            for i in 1..=d {
                if !self.coeffs[i].is_zero() && !out[d - i].is_zero() {
                    acc += &(&self.coeffs[i] * &out[d - i]);
                }
            }
            out[d] = -(&acc * &c0);
        }
        Ok(Series1 { trunc: self.trunc, coeffs: out })
    }

    /// Composition `self(g)`; `g` must have zero constant term.
    pub fn compose(&self, g: &Series1) -> Result<Series1, TpsError> {
        self.check(g)?;
        if !g.coeffs[0].is_zero() {
            return Err(TpsError::NonzeroConstant);
        }
        // Horner in g
        let mut acc = Series1::zero(self.trunc);
        for c in self.coeffs.iter().rev() {
            acc = acc.checked_mul(g)?;
            acc.coeffs[0] += c;
        }
        Ok(acc)
    }

    /// Compositional inverse of `h` with `h(0) = 0`, `h'(0) ≠ 0`, computed
    /// degree by degree: with `h = a x + H(x)` and `g = h⁻¹`, the relation
    /// `g(x) = (x − H(g(x))) / a` fixes one more coefficient of `g` per pass.
    pub fn reverse(&self) -> Result<Series1, TpsError> {
        if !self.coeffs[0].is_zero() {
            return Err(TpsError::NonzeroConstant);
        }
        let n = self.trunc;
        if n == 0 {
            return Ok(Series1::zero(0));
        }
        let a_inv = self.coeffs[1]
            .recip()
            .ok_or(TpsError::NotInvertible("zero linear coefficient"))?;
        let mut nonlinear = self.clone();
        nonlinear.coeffs[1] = Scalar::zero();
        let mut g = Series1::identity(n).scale(&a_inv);
        for _ in 1..n {
            let hg = nonlinear.compose(&g)?;
            let next = Series1::identity(n).checked_sub(&hg)?.scale(&a_inv);
            if next == g {
                break;
            }
            g = next;
        }
        Ok(g)
    }

    /// `self / x^k`, dropping the first `k` coefficients (which must vanish).
    /// The truncation drops by `k` as well.
    pub fn shift_down(&self, k: u32) -> Result<Series1, TpsError> {
        if self.coeffs.iter().take(k as usize).any(|c| !c.is_zero()) {
            return Err(TpsError::NotDivisible);
        }
        let trunc = self.trunc.saturating_sub(k);
        Ok(Series1::from_coeffs(trunc, self.coeffs.iter().skip(k as usize).cloned()))
    }

    pub fn eval_hp(&self, x: &super::hp::HpComplex) -> super::hp::HpComplex {
        let p = x.prec();
        let mut acc = super::hp::HpComplex::zero(p);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(&c.to_hp(p));
        }
        acc
    }
}

impl fmt::Debug for Series1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("({c})x^{i}"))
            .collect();
        if terms.is_empty() {
            write!(f, "0 + O(x^{})", self.trunc + 1)
        } else {
            write!(f, "{} + O(x^{})", terms.join(" + "), self.trunc + 1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(trunc: u32, c: &[i64]) -> Series1 {
        Series1::from_coeffs(trunc, c.iter().map(|&x| Scalar::from_int(x)))
    }

    // Reversion oracle independent of `reverse`: solve h(g(x)) = x by brute
    // force over small-integer candidates for each successive coefficient.
    fn brute_reverse(h: &Series1) -> Series1 {
        let n = h.trunc();
        let mut g = Series1::identity(n);
        for d in 2..=n {
            let mut found = false;
            for cand in -50i64..=50 {
                let mut trial = g.clone();
                trial.set_coeff(d, Scalar::from_int(cand));
                let comp = h.compose(&trial).unwrap();
                if comp.coeff(d).is_zero() {
                    g = trial;
                    found = true;
                    break;
                }
            }
            assert!(found, "no integer candidate at degree {d}");
        }
        g
    }

    #[test]
    fn reverse_examples() {
        let id = Series1::identity(6);
        assert_eq!(id.reverse().unwrap(), id);

        let h = series(4, &[0, 1, 1]);
        let g = h.reverse().unwrap();
        assert_eq!(g, series(4, &[0, 1, -1, 2, -5]));
        assert_eq!(g, brute_reverse(&h));
        assert_eq!(h.compose(&g).unwrap(), Series1::identity(4));

        let two = series(5, &[0, 2]);
        let half = two.reverse().unwrap();
        assert_eq!(half.coeff(1), &Scalar::from_ratio(1, 2));
        assert_eq!(half.valuation(), Some(1));
        assert!(half.coeffs().iter().skip(2).all(Scalar::is_zero));
    }

    #[test]
    fn reverse_rejects_degenerate() {
        assert!(matches!(
            series(4, &[0, 0, 1]).reverse(),
            Err(TpsError::NotInvertible(_))
        ));
        assert!(matches!(series(4, &[1, 1]).reverse(), Err(TpsError::NonzeroConstant)));
    }

    #[test]
    fn recip_and_shift() {
        let s = series(5, &[1, 1]);
        let inv = s.recip().unwrap();
        assert_eq!(inv, series(5, &[1, -1, 1, -1, 1, -1]));
        let x2 = series(5, &[0, 0, 3, 1]);
        assert_eq!(x2.shift_down(2).unwrap(), series(3, &[3, 1]));
        assert!(x2.shift_down(3).is_err());
    }

    #[test]
    fn mismatch_is_error() {
        assert!(series(3, &[1]).checked_mul(&series(4, &[1])).is_err());
    }
}
