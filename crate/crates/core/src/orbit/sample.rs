//! Seeded sampling of `D_{δ,θ,μ}` and the invariance check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Float;

use super::{iterate, DomainParams, IterateOptions, OrbitError, Record};
use crate::tps::{HpComplex, HpMap2};

/// Lower end of the log-uniform `|w|/|z|^μ` range.
pub const RATIO_MIN: f64 = 1e-6;
/// Steps after which `|w_n/z_n|` must be non-increasing.
pub const BURN_IN: u64 = 10;

/// Start point number `index` of the stream seeded by `seed`.
///
/// `|z|` is log-uniform on `[δ/10, δ)`, `Arg z` uniform on `(−θ, θ)`,
/// `|w|/|z|^μ` log-uniform on `[10⁻⁶, 1)` and `Arg w` uniform.
pub fn sample_start(p: &DomainParams, seed: u64, index: u64, prec: u32) -> (HpComplex, HpComplex) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let u_mod: f64 = rng.gen();
    let u_arg: f64 = rng.gen();
    let u_ratio: f64 = rng.gen();
    let u_phase: f64 = rng.gen();

    let f = |x: f64| Float::with_val(prec, x);
    let ln_delta = f(p.delta).ln();
    // |z| = δ·10^{−u}
    let ln_z = Float::with_val(prec, &ln_delta - f(u_mod) * f(10.0).ln());
    let modz = Float::with_val(prec, ln_z.exp_ref());
    let argz = f(p.theta * (2.0 * u_arg - 1.0));
    let z = HpComplex::from_polar(prec, &modz, &argz);
    // |w| = |z|^μ · 10^{−6(1−u)}
    let ln_ratio = f(RATIO_MIN.ln() * (1.0 - u_ratio));
    let ln_w = Float::with_val(prec, &ln_z * f(p.mu) + ln_ratio);
    let modw = Float::with_val(prec, ln_w.exp_ref());
    let argw = f(std::f64::consts::PI * (2.0 * u_phase - 1.0));
    let w = HpComplex::from_polar(prec, &modw, &argw);
    (z, w)
}

/// One failed start, reported with its full-precision start point.
#[derive(Clone, Debug)]
pub struct SampleFailure {
    pub index: u64,
    pub start: (HpComplex, HpComplex),
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct InvarianceReport {
    pub samples: u64,
    pub steps: u64,
    pub seed: u64,
    pub precision: u32,
    pub failures: Vec<SampleFailure>,
    /// Largest `|z_n|` over `|z_0|` at the final step, over all samples.
    pub max_final_shrink: f64,
}

impl InvarianceReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Iterates `samples` seeded starts of `D` for `steps` steps each on a pool of `threads` workers.
pub fn invariance_check(
    f: &HpMap2,
    p: &DomainParams,
    samples: u64,
    steps: u64,
    seed: u64,
    threads: usize,
) -> Result<InvarianceReport, OrbitError> {
    let prec = f.prec();
    let run = |index: u64| -> Result<(Option<SampleFailure>, f64), OrbitError> {
        let start = sample_start(p, seed, index, prec);
        // first and last point only
        let record = Record::Every(steps.max(1));
        let opts = IterateOptions { n_max: steps, record, domain: Some(p), burn_in: Some(BURN_IN), guard: 1.0 };
        let rec = iterate(f, start.clone(), &opts)?;
        let reason = if let Some(n) = rec.left_domain {
            Some(format!("left the domain at step {n}"))
        } else if let Some(n) = rec.escaped {
            Some(format!("escaped at step {n}"))
        } else if let Some(n) = rec.underflow {
            Some(format!("underflow at step {n}"))
        } else {
            rec.ratio_increase.map(|n| format!("|w/z| increased at step {n}"))
        };
        let shrink = match (rec.samples.first(), rec.samples.last()) {
            (Some(a), Some(b)) if !a.z.is_zero() => Float::with_val(prec, b.z.abs() / a.z.abs()).to_f64(),
            _ => f64::NAN,
        };
        Ok((reason.map(|reason| SampleFailure { index, start, reason }), shrink))
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| OrbitError::Params(format!("thread pool: {e}")))?;
    let results: Vec<_> = pool.install(|| (0..samples).into_par_iter().map(run).collect());
    let mut failures = Vec::new();
    let mut max_final_shrink = 0f64;
    for r in results {
        let (fail, shrink) = r?;
        failures.extend(fail);
        max_final_shrink = max_final_shrink.max(shrink);
    }
    Ok(InvarianceReport { samples, steps, seed, precision: prec, failures, max_final_shrink })
}

#[cfg(test)]
mod tests {
    use super::super::in_domain;
    use super::*;

    fn params() -> DomainParams {
        DomainParams { delta: 1e-3, theta: std::f64::consts::PI / 16.0, epsilon: 0.1, mu: 2.1, re_beta_hat: 1.0 }
    }

    #[test]
    fn samples_lie_in_domain_and_repeat() {
        let p = params();
        for i in 0..200 {
            let (z, w) = sample_start(&p, 7, i, 256);
            assert!(in_domain(&z, &w, &p), "sample {i}");
            let zf = z.abs().to_f64();
            assert!(zf >= p.delta / 10.0 * (1.0 - 1e-12));
        }
        assert_eq!(sample_start(&p, 7, 3, 256), sample_start(&p, 7, 3, 256));
        assert_ne!(sample_start(&p, 7, 3, 256), sample_start(&p, 7, 4, 256));
        assert_ne!(sample_start(&p, 7, 3, 256), sample_start(&p, 8, 3, 256));
    }
}
