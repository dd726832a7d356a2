//! End-to-end check at `[1:0]`: verdict, normal form, domain parameters,
//! invariance sampling and rate fits.

use rayon::prelude::*;
use rug::Float;
use thiserror::Error;

use crate::germ::{classify_at_e1, DirectionReport, Germ, GermError};
use crate::normalform::{decompose_with, rescale, NormalFormError, Rescaled, LAMBDA_MAX};
use crate::orbit::{
    default_params, invariance_check, iterate, rate_fit, DomainParams, GermConstants, InvarianceReport, IterateOptions,
    OrbitError, ParamOverrides, RateFit, RateInvariants, RateTolerances, Record, DEFAULT_PRECISION,
};
use crate::tps::HpComplex;

/// `|z_0|` of the rate-fit starts.
pub const RATE_RADII: [f64; 2] = [0.1, 0.2];
/// `|w_0| = RATE_W_FACTOR·|z_0|^μ` for the rate-fit starts.
pub const RATE_W_FACTOR: f64 = 1e-6;
/// Largest allowed spread of the fitted `z` exponents across rate starts.
pub const Z_SPREAD_MAX: f64 = 0.02;
/// Samples per decade kept from each rate orbit.
pub const RATE_PER_DECADE: u32 = 100;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Germ(#[from] GermError),
    #[error(transparent)]
    NormalForm(#[from] NormalFormError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub samples: u64,
    pub steps: u64,
    pub rate_steps: u64,
    pub seed: u64,
    pub threads: usize,
    pub precision: u32,
    pub lambda_max: f64,
    pub overrides: ParamOverrides,
    pub tolerances: RateTolerances,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            samples: 200,
            steps: 10_000,
            rate_steps: 100_000,
            seed: 0,
            threads: 1,
            precision: DEFAULT_PRECISION,
            lambda_max: LAMBDA_MAX,
            overrides: ParamOverrides::default(),
            tolerances: RateTolerances::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RateRun {
    pub start: (HpComplex, HpComplex),
    pub fit: RateFit,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub enum Outcome {
    /// The theorem does not apply; nothing was sampled.
    NotApplicable,
    Checked {
        rescaled: Box<Rescaled>,
        params: DomainParams,
        invariance: InvarianceReport,
        rates: Vec<RateRun>,
        z_spread: f64,
    },
}

#[derive(Clone, Debug)]
pub struct Verification {
    pub classification: DirectionReport,
    pub outcome: Outcome,
}

impl Verification {
    pub fn invariance_ok(&self) -> bool {
        match &self.outcome {
            Outcome::Checked { invariance, .. } => invariance.ok(),
            Outcome::NotApplicable => false,
        }
    }

    pub fn rates_ok(&self) -> bool {
        match &self.outcome {
            Outcome::Checked { rates, z_spread, .. } => rates.iter().all(|r| r.passed) && *z_spread < Z_SPREAD_MAX,
            Outcome::NotApplicable => false,
        }
    }
}

/// Rate-fit starts: `|z_0| ∈ RATE_RADII`, `Arg z_0 ∈ {−θ/2, 0, θ/2}`, `w_0 = 10⁻⁶|z_0|^μ`.
pub fn rate_starts(p: &DomainParams, prec: u32) -> Vec<(HpComplex, HpComplex)> {
    let mut out = Vec::new();
    for rad in RATE_RADII {
        for k in [-1.0, 0.0, 1.0] {
            let z = HpComplex::from_polar(prec, &Float::with_val(prec, rad), &Float::with_val(prec, k * p.theta / 2.0));
            let w = HpComplex::from_f64(prec, RATE_W_FACTOR * rad.powf(p.mu), 0.0);
            out.push((z, w));
        }
    }
    out
}

/// The germ constants behind [`default_params`].
pub fn germ_constants(rep: &DirectionReport, rescaled: &Rescaled) -> GermConstants {
    let d = &rescaled.data.decomposition;
    GermConstants {
        k: d.k,
        t: d.t,
        r: d.r,
        m: rep.m(),
        s: d.s.finite(),
        re_beta: rescaled.data.beta.re.to_f64(),
        re_delta: rescaled.data.delta.re.to_f64(),
    }
}

/// Runs the whole check along `[1:0]` of `f`.
pub fn verify(f: &Germ, opts: &VerifyOptions) -> Result<Verification, VerifyError> {
    let rep = classify_at_e1(f)?;
    if !rep.verdict.applies() {
        return Ok(Verification { classification: rep, outcome: Outcome::NotApplicable });
    }
    let d = decompose_with(f, &rep)?;
    let rescaled = rescale(f, &d, opts.lambda_max, opts.precision)?;
    let params = default_params(&germ_constants(&rep, &rescaled), &opts.overrides)?;
    let map = &rescaled.map;
    let invariance = invariance_check(map, &params, opts.samples, opts.steps, opts.seed, opts.threads)?;

    let inv = RateInvariants::from_decomposition(&d, rescaled.data.beta.re.to_f64());
    let starts = rate_starts(&params, opts.precision);
    let run = |start: &(HpComplex, HpComplex)| -> Result<RateRun, OrbitError> {
        let io = IterateOptions {
            n_max: opts.rate_steps,
            record: Record::LogSpaced { per_decade: RATE_PER_DECADE },
            domain: None,
            burn_in: None,
            guard: 1.0,
        };
        let rec = iterate(map, start.clone(), &io)?;
        let fit = rate_fit(&rec, &inv)?;
        let passed = fit.passes(&opts.tolerances);
        Ok(RateRun { start: start.clone(), fit, passed })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.max(1))
        .build()
        .map_err(|e| OrbitError::Params(format!("thread pool: {e}")))?;
    let rates: Vec<RateRun> = pool.install(|| starts.par_iter().map(run).collect::<Result<_, _>>())?;
    let (lo, hi) = rates
        .iter()
        .map(|r| r.fit.z_exponent)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let z_spread = hi - lo;
    Ok(Verification {
        classification: rep,
        outcome: Outcome::Checked { rescaled: Box::new(rescaled), params, invariance, rates, z_spread },
    })
}
