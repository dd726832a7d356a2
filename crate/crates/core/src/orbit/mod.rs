//! Numerical checks of the attracting domain `D_{δ,θ,μ}`: parameters, sampling,
//! high-precision iteration and asymptotic rate fits.

mod fit;
mod sample;

use std::f64::consts::PI;
use std::io::Write;

use rug::Float;
use thiserror::Error;

use crate::tps::{fmt_float, HpComplex, HpMap2, TpsError};

pub use fit::{least_squares, rate_fit, RateFit, RateInvariants, RateTolerances, WCase};
pub use sample::{invariance_check, sample_start, InvarianceReport, SampleFailure};

/// Default constants resolving the "much smaller than" choices.
pub const C_THETA: f64 = 0.5;
pub const C_DELTA: f64 = 0.01;
pub const DEFAULT_EPSILON: f64 = 0.1;
pub const DELTA_CAP: f64 = 0.1;
pub const DEFAULT_PRECISION: u32 = 256;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrbitError {
    #[error(transparent)]
    Tps(#[from] TpsError),
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("not transversally attracting at these parameters: Re beta_hat = {0}")]
    NotAttracting(f64),
    #[error("precision {precision} exhausted at step {step}; rerun with a higher --precision")]
    PrecisionExhausted { step: u64, precision: u32 },
    #[error("orbit too short for a fit: {0} samples in the window")]
    TooShort(usize),
}

/// `μ = max{(r−k+ε)/m + 1, r−k+ε, t−k+1+ε}`, with the first term `1` when `m = ∞`.
pub fn mu_exponent(k: u32, t: u32, r: u32, m: Option<u32>, epsilon: f64) -> Result<f64, OrbitError> {
    if !(k < r && k <= t && t <= r) {
        return Err(OrbitError::Params(format!("need k < r and k <= t <= r, got k={k}, t={t}, r={r}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0 / 3.0) {
        return Err(OrbitError::Params(format!("epsilon = {epsilon} outside (0, 1/3)")));
    }
    let rk = (r - k) as f64 + epsilon;
    let first = match m {
        Some(0) => return Err(OrbitError::Params("m = 0: direction is non-degenerate at degree k+1".into())),
        Some(m) => rk / m as f64 + 1.0,
        None => 1.0,
    };
    let third = (t - k) as f64 + 1.0 + epsilon;
    Ok(first.max(rk).max(third))
}

/// Shape of `D_{δ,θ,μ}` plus the constants it was built from.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainParams {
    pub delta: f64,
    pub theta: f64,
    pub epsilon: f64,
    pub mu: f64,
    /// `Re β̂`.
    pub re_beta_hat: f64,
}

/// Inputs to [`default_params`] read off the germ and its normal form.
#[derive(Clone, Debug)]
pub struct GermConstants {
    pub k: u32,
    pub t: u32,
    pub r: u32,
    pub m: Option<u32>,
    /// `None` for `s = ∞` (or `s` beyond the truncation).
    pub s: Option<u32>,
    pub re_beta: f64,
    pub re_delta: f64,
}

/// Overrides for the defaults; `None` keeps the default.
#[derive(Clone, Debug, Default)]
pub struct ParamOverrides {
    pub delta: Option<f64>,
    pub theta: Option<f64>,
    pub epsilon: Option<f64>,
}

pub fn default_params(g: &GermConstants, ov: &ParamOverrides) -> Result<DomainParams, OrbitError> {
    let r = g.r as f64;
    let mut epsilon = DEFAULT_EPSILON;
    if g.t == g.r {
        epsilon = epsilon.min(0.5 * r * g.re_delta);
    }
    let epsilon = ov.epsilon.unwrap_or(epsilon);
    if g.t == g.r && epsilon >= r * g.re_delta {
        return Err(OrbitError::Params(format!("epsilon = {epsilon} must be below r Re Delta = {}", r * g.re_delta)));
    }
    let mu = mu_exponent(g.k, g.t, g.r, g.m, epsilon)?;
    let re_beta_hat = if g.t < g.r { g.re_beta } else { g.re_beta - mu / r };
    if re_beta_hat <= 0.0 {
        return Err(OrbitError::NotAttracting(re_beta_hat));
    }
    if let Some(s) = g.s {
        let need = mu + g.t as f64 + 2.0 * epsilon;
        if ((s + 1) as f64) < need {
            return Err(OrbitError::Params(format!("s + 1 = {} is below mu + t + 2 epsilon = {need}", s + 1)));
        }
    }
    let theta = ov.theta.unwrap_or(C_THETA * PI / (4.0 * r));
    if !(theta > 0.0 && theta < PI / (4.0 * r)) {
        return Err(OrbitError::Params(format!("theta = {theta} outside (0, pi/(4r))")));
    }
    let delta = ov
        .delta
        .unwrap_or_else(|| (C_DELTA * (1.0 / r).min(re_beta_hat)).powf(1.0 / epsilon).min(DELTA_CAP));
    if delta.is_nan() || delta <= 0.0 {
        return Err(OrbitError::Params(format!("delta = {delta} must be positive")));
    }
    Ok(DomainParams { delta, theta, epsilon, mu, re_beta_hat })
}

/// `0 < |z| < δ`, `|Arg z| < θ`, `|w| < |z|^μ`, all strict.
pub fn in_domain(z: &HpComplex, w: &HpComplex, p: &DomainParams) -> bool {
    Bounds::new(p, z.prec()).contains(z, w)
}

/// The domain inequalities with `δ²` and `tan θ` evaluated once at precision `P`.
struct Bounds {
    delta_sqr: Float,
    tan_theta: Float,
    mu: Float,
    mu_f64: f64,
}

impl Bounds {
    fn new(p: &DomainParams, prec: u32) -> Self {
        Bounds {
            delta_sqr: Float::with_val(prec, p.delta).square(),
            tan_theta: Float::with_val(prec, p.theta).tan(),
            mu: Float::with_val(prec, p.mu),
            mu_f64: p.mu,
        }
    }

    fn contains(&self, z: &HpComplex, w: &HpComplex) -> bool {
        let prec = z.prec();
        if z.is_zero() || z.re.cmp0() != Some(std::cmp::Ordering::Greater) {
            return false;
        }
        let nz = z.norm_sqr();
        if nz >= self.delta_sqr {
            return false;
        }
        if Float::with_val(prec, z.im.abs_ref()) >= Float::with_val(prec, &z.re * &self.tan_theta) {
            return false;
        }
        if w.is_zero() {
            return true;
        }
        // |w| < |z|^μ through logarithms, at 64 bits unless too close to call
        let nw = w.norm_sqr();
        let lw = Float::with_val(64, &nw).ln().to_f64();
        let lz = Float::with_val(64, &nz).ln().to_f64();
        let gap = lw - self.mu_f64 * lz;
        if gap.abs() > 1e-9 * (1.0 + lw.abs()) {
            return gap < 0.0;
        }
        nw.ln() < Float::with_val(prec, nz.ln() * &self.mu)
    }
}

/// Which steps to keep in an [`OrbitRecord`].
#[derive(Clone, Debug)]
pub enum Record {
    Nothing,
    /// Every `d`-th step, plus the last.
    Every(u64),
    /// About `per_decade` steps per decade of `n`, plus the last.
    LogSpaced { per_decade: u32 },
}

impl Record {
    fn targets(&self, n_max: u64) -> Vec<u64> {
        let mut out = match self {
            Record::Nothing => Vec::new(),
            Record::Every(d) => (0..=n_max).step_by((*d).max(1) as usize).collect(),
            Record::LogSpaced { per_decade } => {
                let top = (n_max.max(1) as f64).log10();
                let count = (top * *per_decade as f64).ceil() as u64;
                let mut v: Vec<u64> = (0..=count)
                    .map(|i| 10f64.powf(i as f64 / *per_decade as f64).round() as u64)
                    .filter(|&n| n <= n_max)
                    .collect();
                v.insert(0, 0);
                v
            }
        };
        if !matches!(self, Record::Nothing) {
            out.push(n_max);
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Clone, Debug)]
pub struct IterateOptions<'a> {
    pub n_max: u64,
    pub record: Record,
    /// When set, leaving the domain is flagged and the orbit stops.
    pub domain: Option<&'a DomainParams>,
    /// When set, `|w_n/z_n|` must not increase once `n` exceeds it.
    pub burn_in: Option<u64>,
    /// Escape radius for both coordinates.
    pub guard: f64,
}

impl Default for IterateOptions<'_> {
    fn default() -> Self {
        IterateOptions { n_max: 1000, record: Record::Every(1), domain: None, burn_in: Some(10), guard: 1.0 }
    }
}

#[derive(Clone, Debug)]
pub struct OrbitSample {
    pub n: u64,
    pub z: HpComplex,
    pub w: HpComplex,
}

#[derive(Clone, Debug)]
pub struct OrbitRecord {
    pub start: (HpComplex, HpComplex),
    pub samples: Vec<OrbitSample>,
    pub steps: u64,
    pub precision: u32,
    pub escaped: Option<u64>,
    pub left_domain: Option<u64>,
    pub ratio_increase: Option<u64>,
    pub underflow: Option<u64>,
}

impl OrbitRecord {
    pub fn clean(&self) -> bool {
        self.escaped.is_none() && self.left_domain.is_none() && self.ratio_increase.is_none() && self.underflow.is_none()
    }
}

/// Iterates `f` from `start` at the precision of the map.
pub fn iterate(f: &HpMap2, start: (HpComplex, HpComplex), opts: &IterateOptions) -> Result<OrbitRecord, OrbitError> {
    let prec = f.prec();
    let (mut z, mut w) = (start.0.with_prec(prec), start.1.with_prec(prec));
    let targets = opts.record.targets(opts.n_max);
    let mut next_target = 0;
    let mut rec = OrbitRecord {
        start: (z.clone(), w.clone()),
        samples: Vec::new(),
        steps: 0,
        precision: prec,
        escaped: None,
        left_domain: None,
        ratio_increase: None,
        underflow: None,
    };
    let mut keep = |n: u64, z: &HpComplex, w: &HpComplex, rec: &mut OrbitRecord| {
        if targets.get(next_target) == Some(&n) {
            rec.samples.push(OrbitSample { n, z: z.clone(), w: w.clone() });
            next_target += 1;
        }
    };
    keep(0, &z, &w, &mut rec);
    if z.is_zero() && w.is_zero() {
        // the fixed point
        for &n in &targets[next_target..] {
            rec.samples.push(OrbitSample { n, z: z.clone(), w: w.clone() });
        }
        rec.steps = opts.n_max;
        return Ok(rec);
    }
    let bounds = opts.domain.map(|p| Bounds::new(p, prec));
    if let Some(b) = &bounds {
        if !b.contains(&z, &w) {
            rec.left_domain = Some(0);
            return Ok(rec);
        }
    }
    let guard = opts.guard * opts.guard;
    for n in 1..=opts.n_max {
        let (z1, w1) = f.eval(&z, &w)?;
        if z1 == z && !z.is_zero() {
            return Err(OrbitError::PrecisionExhausted { step: n, precision: prec });
        }
        rec.steps = n;
        if z1.norm_sqr() >= guard || w1.norm_sqr() >= guard {
            rec.escaped = Some(n);
            keep(n, &z1, &w1, &mut rec);
            return Ok(rec);
        }
        if (z1.is_zero() && !z.is_zero()) || (w1.is_zero() && !w.is_zero()) {
            rec.underflow = Some(n);
            return Ok(rec);
        }
        if opts.burn_in.is_some_and(|b| n > b) && rec.ratio_increase.is_none() {
            // |w1|/|z1| <= |w|/|z|  ⇔  |w1|²|z|² <= |w|²|z1|²
            let lhs = Float::with_val(prec, w1.norm_sqr() * z.norm_sqr());
            let rhs = Float::with_val(prec, w.norm_sqr() * z1.norm_sqr());
            if lhs > rhs {
                rec.ratio_increase = Some(n);
            }
        }
        if let Some(b) = &bounds {
            if !b.contains(&z1, &w1) {
                rec.left_domain = Some(n);
                keep(n, &z1, &w1, &mut rec);
                return Ok(rec);
            }
        }
        z = z1;
        w = w1;
        keep(n, &z, &w, &mut rec);
    }
    Ok(rec)
}

/// Orbit rows as CSV: `n,re_z,im_z,abs_z,abs_w,abs_w_over_z`.
pub fn write_csv<W: Write>(rec: &OrbitRecord, digits: usize, out: W) -> Result<(), csv::Error> {
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record(["n", "re_z", "im_z", "abs_z", "abs_w", "abs_w_over_z"])?;
    for s in &rec.samples {
        let az = s.z.abs();
        let aw = s.w.abs();
        let ratio = if az.is_zero() { Float::new(az.prec()) } else { Float::with_val(az.prec(), &aw / &az) };
        wr.write_record([
            s.n.to_string(),
            fmt_float(&s.z.re, digits),
            fmt_float(&s.z.im, digits),
            fmt_float(&az, digits),
            fmt_float(&aw, digits),
            fmt_float(&ratio, digits),
        ])?;
    }
    wr.flush()?;
    Ok(())
}
