//! Asymptotic rate fits of `z_n` and `w_n` over the last decade of an orbit.

use std::cmp::Ordering;
use std::fmt;

use rug::{Float, Rational};

use super::{OrbitError, OrbitRecord};
use crate::normalform::Decomposition;

/// Which bound on `w_n` applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WCase {
    /// `t ≠ r`, `s = ∞`: `exp(−(r Re β/(r−t)) n^{(r−t)/r})`.
    Exponential,
    /// `t ≠ r`, `s` finite: `n^{−(s+1−t)/r}`.
    PowerS,
    /// `t = r`, `ν > 0`: `n^{−(s+1−t)/r}`.
    NuPositive,
    /// `t = r`, `ν < 0`: `n^{−Re β}`.
    NuNegative,
    /// `t = r`, `ν = 0`: `n^{−Re β} log n`.
    NuZero,
}

impl fmt::Display for WCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WCase::Exponential => "t!=r, s=inf",
            WCase::PowerS => "t!=r, s finite",
            WCase::NuPositive => "t=r, nu>0",
            WCase::NuNegative => "t=r, nu<0",
            WCase::NuZero => "t=r, nu=0",
        })
    }
}

/// The invariants a rate fit needs.
#[derive(Clone, Debug)]
pub struct RateInvariants {
    pub k: u32,
    pub t: u32,
    pub r: u32,
    /// `None` for `s = ∞`.
    pub s: Option<u32>,
    pub re_beta: f64,
    /// `ν` exactly, when `t = r` (then `β = b/(ar)` is exact).
    pub nu_exact: Option<Rational>,
}

impl RateInvariants {
    /// Reads the invariants off an exact decomposition; `re_beta` comes from the normal form.
    pub fn from_decomposition(d: &Decomposition, re_beta: f64) -> Self {
        let s = d.s.finite();
        let nu_exact = (d.t == d.r).then(|| {
            let beta = &d.b / &(&d.a * &crate::tps::Scalar::from_int(d.r as i64));
            let re = Rational::from(beta.re());
            match s {
                Some(s) => re - Rational::from(((s + 1 - d.t) as i64, d.r as i64)),
                None => Rational::from(-1),
            }
        });
        RateInvariants { k: d.k, t: d.t, r: d.r, s, re_beta, nu_exact }
    }

    pub fn nu(&self) -> f64 {
        match (&self.nu_exact, self.s) {
            (Some(n), _) if self.s.is_some() => n.to_f64(),
            (_, Some(s)) => -((s + 1 - self.t) as f64) / self.r as f64 + self.re_beta,
            _ => f64::NEG_INFINITY,
        }
    }

    pub fn w_case(&self) -> WCase {
        if self.t != self.r {
            return if self.s.is_some() { WCase::PowerS } else { WCase::Exponential };
        }
        let sign = match (&self.nu_exact, self.s) {
            (_, None) => Ordering::Less,
            (Some(n), _) => n.cmp0(),
            (None, Some(_)) => self.nu().partial_cmp(&0.0).unwrap_or(Ordering::Equal),
        };
        match sign {
            Ordering::Greater => WCase::NuPositive,
            Ordering::Less => WCase::NuNegative,
            Ordering::Equal => WCase::NuZero,
        }
    }

    /// `ln g(n)`.
    pub fn ln_g(&self, n: f64) -> f64 {
        let r = self.r as f64;
        let t = self.t as f64;
        match self.w_case() {
            WCase::Exponential => -(r * self.re_beta / (r - t)) * n.powf((r - t) / r),
            WCase::PowerS | WCase::NuPositive => -((self.s.unwrap_or(0) + 1) as f64 - t) / r * n.ln(),
            WCase::NuNegative => -self.re_beta * n.ln(),
            WCase::NuZero => -self.re_beta * n.ln() + n.ln().ln(),
        }
    }

    /// The regressor for the `w` slope and the slope `g` predicts against it.
    fn w_axis(&self) -> (fn(f64, f64) -> f64, f64) {
        let r = self.r as f64;
        let t = self.t as f64;
        match self.w_case() {
            WCase::Exponential => (|n, e| n.powf(e), -(r * self.re_beta) / (r - t)),
            WCase::PowerS | WCase::NuPositive => (|n, _| n.ln(), -((self.s.unwrap_or(0) + 1) as f64 - t) / r),
            WCase::NuNegative | WCase::NuZero => (|n, _| n.ln(), -self.re_beta),
        }
    }
}

/// Tolerances for [`RateFit::passes`].
#[derive(Clone, Debug)]
pub struct RateTolerances {
    /// Absolute, on the `z` exponent.
    pub z_abs: f64,
    /// Relative, on the exponential-case `w` slope.
    pub exp_rel: f64,
    /// Absolute, on power-law `w` slopes (one-sided: the bound is an upper bound).
    pub power_abs: f64,
    /// Upper limit on `max C_n / median C_n`.
    pub envelope: f64,
}

impl Default for RateTolerances {
    fn default() -> Self {
        RateTolerances { z_abs: 0.01, exp_rel: 0.05, power_abs: 0.1, envelope: 2.0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateFit {
    /// Fit window `[n_lo, n_hi]`.
    pub window: (u64, u64),
    pub points: usize,
    pub z_exponent: f64,
    pub z_expected: f64,
    pub z_residual: f64,
    pub w_case: WCase,
    pub nu: f64,
    /// Slope of `ln|w_n|` against `n^{(r−t)/r}` (exponential case) or `ln n`.
    pub w_slope: f64,
    pub w_expected: f64,
    pub w_residual: f64,
    /// `max C_n / median C_n`, `C_n = |w_n|/g(n)`.
    pub envelope_ratio: f64,
    pub bound_satisfied: bool,
    /// Mean step of `1/z_n^r` over the window.
    pub inv_z_increment: f64,
}

impl RateFit {
    pub fn z_ok(&self, tol: &RateTolerances) -> bool {
        (self.z_exponent - self.z_expected).abs() <= tol.z_abs
    }

    pub fn w_ok(&self, tol: &RateTolerances) -> bool {
        match self.w_case {
            WCase::Exponential => ((self.w_slope - self.w_expected) / self.w_expected).abs() <= tol.exp_rel,
            _ => self.w_slope <= self.w_expected + tol.power_abs,
        }
    }

    pub fn passes(&self, tol: &RateTolerances) -> bool {
        self.z_ok(tol) && self.w_ok(tol) && self.envelope_ratio <= tol.envelope
    }
}

/// Least-squares line through `(x, y)`: `(slope, intercept, rms residual)`.
pub fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum();
    (slope, icpt, (rss / n).sqrt())
}

fn ln_abs(x: &crate::tps::HpComplex) -> f64 {
    Float::with_val(x.prec(), x.norm_sqr().ln() / 2u32).to_f64()
}

/// Fits over `[steps/10, steps]`; the orbit must have run all its steps without flags.
pub fn rate_fit(orbit: &OrbitRecord, inv: &RateInvariants) -> Result<RateFit, OrbitError> {
    if !orbit.clean() {
        return Err(OrbitError::Params("orbit carries flags; no rate fit".into()));
    }
    let hi = orbit.steps;
    if hi < 1000 {
        return Err(OrbitError::TooShort(orbit.samples.len()));
    }
    let lo = hi / 10;
    let window: Vec<_> = orbit.samples.iter().filter(|s| s.n >= lo && s.n <= hi).collect();
    if window.len() < 10 || window.iter().any(|s| s.z.is_zero() || s.w.is_zero()) {
        return Err(OrbitError::TooShort(window.len()));
    }
    let ns: Vec<f64> = window.iter().map(|s| s.n as f64).collect();
    let lnn: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let lnz: Vec<f64> = window.iter().map(|s| ln_abs(&s.z)).collect();
    let lnw: Vec<f64> = window.iter().map(|s| ln_abs(&s.w)).collect();
    let (z_exponent, _, z_residual) = least_squares(&lnn, &lnz);

    let r = inv.r as f64;
    let e = (r - inv.t as f64) / r;
    let (axis, w_expected) = inv.w_axis();
    let xs: Vec<f64> = ns.iter().map(|&n| axis(n, e)).collect();
    let (w_slope, _, w_residual) = least_squares(&xs, &lnw);

    let mut ln_c: Vec<f64> = ns.iter().zip(&lnw).map(|(&n, &lw)| lw - inv.ln_g(n)).collect();
    let max = ln_c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    ln_c.sort_by(|a, b| a.total_cmp(b));
    let m = ln_c.len();
    let median = if m % 2 == 1 { ln_c[m / 2] } else { 0.5 * (ln_c[m / 2 - 1] + ln_c[m / 2]) };
    let envelope_ratio = (max - median).exp();

    let first = window[0];
    let last = window[window.len() - 1];
    let inv_z = |s: &super::OrbitSample| s.z.powi(inv.r).recip().map(|x| x.re.to_f64()).unwrap_or(f64::NAN);
    let inv_z_increment = (inv_z(last) - inv_z(first)) / (last.n - first.n) as f64;

    Ok(RateFit {
        window: (lo, hi),
        points: window.len(),
        z_exponent,
        z_expected: -1.0 / r,
        z_residual,
        w_case: inv.w_case(),
        nu: inv.nu(),
        w_slope,
        w_expected,
        w_residual,
        envelope_ratio,
        bound_satisfied: envelope_ratio <= RateTolerances::default().envelope,
        inv_z_increment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inv(t: u32, s: Option<u32>, re_beta: f64, nu: Option<(i64, i64)>) -> RateInvariants {
        RateInvariants { k: 1, t, r: 2, s, re_beta, nu_exact: nu.map(Rational::from) }
    }

    #[test]
    fn case_selection() {
        assert_eq!(inv(1, None, 1.0, None).w_case(), WCase::Exponential);
        assert_eq!(inv(1, Some(5), 1.0, None).w_case(), WCase::PowerS);
        assert_eq!(inv(2, Some(4), 3.0, Some((3, 2))).w_case(), WCase::NuPositive);
        assert_eq!(inv(2, Some(7), 3.0, Some((0, 1))).w_case(), WCase::NuZero);
        assert_eq!(inv(2, Some(8), 3.0, Some((-1, 2))).w_case(), WCase::NuNegative);
        assert_eq!(inv(2, None, 3.0, Some((-1, 1))).w_case(), WCase::NuNegative);
        assert_eq!(inv(2, Some(4), 3.0, Some((3, 2))).nu(), 1.5);
    }

    #[test]
    fn least_squares_recovers_line() {
        let x: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 0.5 * v).collect();
        let (m, b, res) = least_squares(&x, &y);
        assert!((m + 0.5).abs() < 1e-12 && (b - 3.0).abs() < 1e-12 && res < 1e-12);
    }

    #[test]
    fn ln_g_per_case() {
        let n = 1e4f64;
        assert!((inv(1, None, 1.0, None).ln_g(n) + 200.0).abs() < 1e-9);
        assert!((inv(2, Some(4), 3.0, Some((3, 2))).ln_g(n) + 1.5 * n.ln()).abs() < 1e-9);
        assert!((inv(2, Some(7), 3.0, Some((0, 1))).ln_g(n) - (-3.0 * n.ln() + n.ln().ln())).abs() < 1e-9);
    }
}
