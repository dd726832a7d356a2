//! Acceptance suite: ten criteria, one PASS/FAIL line each.
//!
//! Runs as its own binary (`harness = false`) so every line is printed even when
//! all criteria pass. Tolerances and runtime limits are pinned below.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use germlab::cli::GermSpec;
use germlab::conjugation::{phi_chi_decompose, prop_c_report};
use germlab::gen;
use germlab::germ::{classify_at_e1, Condition, DirType, Germ, Verdict};
use germlab::normalform::inverse_invariants;
use germlab::orbit::WCase;
use germlab::tps::{Map2, Scalar, Ts2};
use germlab::verify::{verify, Outcome, VerifyOptions};

// criterion 1
const C1_MAPS: usize = 100;
const C1_TRUNCATION: u32 = 10;
const C1_RUNTIME: Duration = Duration::from_secs(10);
// criterion 3
const C3_PSIS: usize = 50;
const C3_PAIRS: usize = 50;
const C3_TRUNCATION: u32 = 10;
const C3_RUNTIME: Duration = Duration::from_secs(60);
// criteria 5 to 7
const C5_SAMPLES: u64 = 200;
const C5_STEPS: u64 = 10_000;
const C5_PRECISION: u32 = 256;
const C5_SEED: u64 = 7;
const C5_RUNTIME: Duration = Duration::from_secs(120);
const C6_Z_SLOPE: f64 = -0.5;
const C6_Z_TOL: f64 = 0.01;
const RATE_STEPS: u64 = 100_000;
const C7_W_SLOPE: f64 = -2.0;
const C7_W_REL_TOL: f64 = 0.05;
// criterion 8
const C8_S4_SLOPE: f64 = -1.5;
const C8_S4_TOL: f64 = 0.05;
const C8_S8_SLOPE: f64 = -3.0;
const C8_S8_TOL: f64 = 0.1;
const C8_S7_ENVELOPE: f64 = 2.0;
const C8_RUNTIME: Duration = Duration::from_secs(300);
// criterion 10
const C10_THREADS: [&str; 2] = ["1", "3"];

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn load(name: &str) -> Germ {
    let p = data(name).display().to_string();
    GermSpec::read(&p).unwrap().to_germ(&p, None).unwrap()
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_germlab"))
}

/// Result line detail; a panic inside a criterion counts as FAIL.
type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn c1_series_algebra() -> Check {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = C1_TRUNCATION;
    for i in 0..C1_MAPS {
        let tau = rng.gen_range(2..=4);
        let f = gen::tangent_map(&mut rng, n, tau, 0.3);
        let g = f.invert_tangent().map_err(|e| e.to_string())?;
        let id = Map2::identity(n);
        ensure(f.compose(&g).unwrap() == id, format!("map {i}: f∘f⁻¹ ≠ Id"))?;
        ensure(g.compose(&f).unwrap() == id, format!("map {i}: f⁻¹∘f ≠ Id"))?;
        let low = gen::inverse_low_degree(&f).unwrap();
        for j in tau..=(2 * tau - 1).min(n) {
            ensure(
                low.first().degree_part(j) == g.first().degree_part(j)
                    && low.second().degree_part(j) == g.second().degree_part(j),
                format!("map {i}: closed form differs from the inverse in degree {j}"),
            )?;
        }
    }
    let mut p1 = Ts2::z(n);
    p1.add_term(2, 0, &Scalar::one());
    let mut p2 = Ts2::w(n);
    p2.add_term(1, 1, &Scalar::one());
    let psi = Map2::new(p1, p2).unwrap();
    let b = psi.invert_tangent().unwrap();
    let (b31, b32) = (b.first().degree_part(3), b.second().degree_part(3));
    let two = Scalar::from_int(2);
    ensure(
        b31 == Ts2::monomial(n, 3, 0, two.clone()) && b32 == Ts2::monomial(n, 2, 1, two),
        "worked case: B_3 ≠ (2z³, 2z²w)",
    )?;
    let dt = t0.elapsed();
    ensure(dt < C1_RUNTIME, format!("runtime {dt:?}"))?;
    Ok(format!("{C1_MAPS} maps exact, B_3 = (2z^3, 2z^2w), {dt:.1?}"))
}

fn c2_classification() -> Check {
    let f = load("fuchsian.json");
    let rep = classify_at_e1(&f).map_err(|e| e.to_string())?;
    let o = rep.orders[0];
    ensure(rep.k == 1, format!("k = {}", rep.k))?;
    ensure((o.m, o.l, o.n) == (Some(2), None, Some(3)), format!("(m,l,n) = {:?}", (o.m, o.l, o.n)))?;
    ensure(rep.dir_type == DirType::Fuchsian, format!("type {}", rep.dir_type))?;
    ensure(rep.abate_index == Some(Scalar::from_int(-1)), format!("index {:?}", rep.abate_index))?;
    ensure(matches!(rep.verdict, Verdict::Fails { .. }), format!("verdict {}", rep.verdict))?;
    let again = classify_at_e1(&f).unwrap();
    ensure(format!("{again:?}") == format!("{rep:?}"), "not deterministic")?;
    Ok(format!("k=1 m=2 l=inf n=3 fuchsian index=-1, {}", rep.verdict))
}

fn c3_decomposition_and_thresholds() -> Check {
    let t0 = Instant::now();
    let n = C3_TRUNCATION;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..C3_PSIS {
        let sigma = rng.gen_range(1..=n);
        let psi = gen::psi_fixing(&mut rng, n, sigma, 0.3);
        let pc = phi_chi_decompose(&psi).map_err(|e| e.to_string())?;
        ensure(pc.sigma.value == sigma.min(n), format!("Ψ {i}: σ = {} ≠ {sigma}", pc.sigma))?;
        let back = pc.big_phi.map().compose(pc.chi.map()).unwrap();
        ensure(&back == psi.map(), format!("Ψ {i}: Φ∘χ ≠ Ψ"))?;
        ensure(pc.chi.map().second().restrict_w0().is_zero(), format!("Ψ {i}: χ moves {{w=0}}"))?;
    }
    for i in 0..C3_PAIRS {
        let d = gen::degrees(&mut rng, n);
        let f = gen::germ_with_degrees(&mut rng, n, d, 0.3);
        let s = d.s.unwrap();
        let need = (d.t - d.k).max(d.r - d.k).max(s - d.t).max((s - d.k) / 2) + 1;
        let sigma = (need + rng.gen_range(0..=1)).min(n);
        let psi = gen::psi_fixing(&mut rng, n, sigma, 0.3);
        let rep = prop_c_report(&f, &psi).map_err(|e| e.to_string())?;
        ensure(rep.ok(), format!("pair {i}: {:?}", rep.violations))?;
        ensure(rep.checks.iter().all(|c| c.asserted && c.equal), format!("pair {i} ({d:?}, σ={sigma}): {:?}", rep.checks))?;
    }
    let dt = t0.elapsed();
    ensure(dt < C3_RUNTIME, format!("runtime {dt:?}"))?;
    Ok(format!("{C3_PSIS} decompositions exact, {C3_PAIRS} pairs invariant, {dt:.1?}"))
}

fn c4_inverse() -> Check {
    let corpus = ["germ_a.json", "family_s4.json", "family_s7.json", "family_s8.json", "family_lambda0.json"];
    for name in corpus {
        let f = load(name);
        let rep = inverse_invariants(&f).map_err(|e| e.to_string())?;
        ensure(rep.forward.verdict.applies(), format!("{name}: {}", rep.forward.verdict))?;
        ensure(rep.ok(), format!("{name}: {:?}", rep.violations))?;
        let (fw, iv) = (&rep.forward, &rep.inverse);
        ensure((fw.k, fw.t, fw.r) == (iv.k, iv.t, iv.r) && fw.s.same_degree(iv.s), format!("{name}: degrees differ"))?;
        ensure(iv.a.as_ref() == fw.a.as_ref().map(|a| -a).as_ref(), format!("{name}: R(0) sign"))?;
        ensure(iv.b.as_ref() == fw.b.as_ref().map(|b| -b).as_ref(), format!("{name}: T(0) sign"))?;
        if fw.t == fw.r {
            let d = |r: &germlab::germ::DirectionReport| r.director.as_ref().and_then(|d| d.exact.clone()).map(|x| x.re().clone());
            ensure(d(fw).is_some() && d(fw) == d(iv), format!("{name}: Re Delta differs"))?;
        }
    }
    Ok(format!("{} germs: (k,t,r,s) equal, R(0) and T(0) negated, Re Delta equal for t=r", corpus.len()))
}

struct GermARun {
    dt: Duration,
    verification: germlab::verify::Verification,
}

fn germ_a_run() -> Result<GermARun, String> {
    let f = load("germ_a.json");
    let opts = VerifyOptions {
        samples: C5_SAMPLES,
        steps: C5_STEPS,
        rate_steps: RATE_STEPS,
        seed: C5_SEED,
        precision: C5_PRECISION,
        threads: 1,
        ..VerifyOptions::default()
    };
    let t0 = Instant::now();
    let verification = verify(&f, &opts).map_err(|e| e.to_string())?;
    Ok(GermARun { dt: t0.elapsed(), verification })
}

fn c5_invariance(run: &GermARun) -> Check {
    let Outcome::Checked { invariance, params, .. } = &run.verification.outcome else {
        return Err("verdict does not apply".into());
    };
    ensure(invariance.samples == C5_SAMPLES && invariance.steps == C5_STEPS, "wrong sample plan")?;
    ensure(invariance.failures.is_empty(), format!("{} violations, first {:?}", invariance.failures.len(), invariance.failures.first().map(|f| &f.reason)))?;
    // the sampling pass includes the invariance sampling plus the rate orbits
    ensure(run.dt < C5_RUNTIME, format!("runtime {:?}", run.dt))?;
    Ok(format!(
        "{C5_SAMPLES} starts x {C5_STEPS} steps at {C5_PRECISION} bits: 0 exits, |w/z| < |z|^(mu-1) throughout (delta={:e}, mu={}), {:.1?}",
        params.delta, params.mu, run.dt
    ))
}

fn c6_z_rate(run: &GermARun) -> Check {
    let Outcome::Checked { rates, .. } = &run.verification.outcome else {
        return Err("verdict does not apply".into());
    };
    let mut worst: f64 = 0.0;
    for r in rates {
        ensure(r.fit.window == (RATE_STEPS / 10, RATE_STEPS), "window is not [1e4, 1e5]")?;
        worst = worst.max((r.fit.z_exponent - C6_Z_SLOPE).abs());
    }
    ensure(worst <= C6_Z_TOL, format!("max |slope + 1/2| = {worst}"))?;
    Ok(format!("{} orbits, slopes within {worst:.4} of -1/2", rates.len()))
}

fn c7_w_rate(run: &GermARun) -> Check {
    let Outcome::Checked { rates, .. } = &run.verification.outcome else {
        return Err("verdict does not apply".into());
    };
    let mut worst: f64 = 0.0;
    for r in rates {
        ensure(r.fit.w_case == WCase::Exponential, format!("case {}", r.fit.w_case))?;
        worst = worst.max(((r.fit.w_slope - C7_W_SLOPE) / C7_W_SLOPE).abs());
    }
    ensure(worst <= C7_W_REL_TOL, format!("max relative error {worst}"))?;
    Ok(format!("slope of ln|w| vs sqrt(n) within {:.2}% of -2", 100.0 * worst))
}

fn c8_family_rates() -> Check {
    let t0 = Instant::now();
    let opts = VerifyOptions { samples: 0, rate_steps: RATE_STEPS, threads: 1, ..VerifyOptions::default() };
    let mut details = Vec::new();
    for (name, case, nu) in [
        ("family_s4.json", WCase::NuPositive, 1.5),
        ("family_s7.json", WCase::NuZero, 0.0),
        ("family_s8.json", WCase::NuNegative, -0.5),
    ] {
        let v = verify(&load(name), &opts).map_err(|e| e.to_string())?;
        let Outcome::Checked { rates, .. } = &v.outcome else {
            return Err(format!("{name}: verdict does not apply"));
        };
        for r in rates {
            let f = &r.fit;
            ensure(f.w_case == case && f.nu == nu, format!("{name}: case {} nu {}", f.w_case, f.nu))?;
            match case {
                WCase::NuPositive => ensure((f.w_slope - C8_S4_SLOPE).abs() <= C8_S4_TOL, format!("{name}: slope {}", f.w_slope))?,
                WCase::NuNegative => ensure((f.w_slope - C8_S8_SLOPE).abs() <= C8_S8_TOL, format!("{name}: slope {}", f.w_slope))?,
                _ => ensure(f.envelope_ratio <= C8_S7_ENVELOPE, format!("{name}: max/median C_n = {}", f.envelope_ratio))?,
            }
        }
        let summary = match case {
            WCase::NuZero => rates.iter().map(|r| r.fit.envelope_ratio).fold(0.0, f64::max),
            _ => rates.iter().map(|r| r.fit.w_slope).fold(f64::NEG_INFINITY, f64::max),
        };
        details.push(format!("{case}: {summary:.3}"));
    }
    let dt = t0.elapsed();
    ensure(dt < C8_RUNTIME, format!("runtime {dt:?}"))?;
    Ok(format!("{} ({dt:.1?})", details.join(", ")))
}

fn c9_negative_gate() -> Check {
    let f = load("gate_s3.json");
    let rep = classify_at_e1(&f).map_err(|e| e.to_string())?;
    ensure((rep.k, rep.t, rep.r, rep.s.finite()) == (1, Some(2), Some(2), Some(3)), "degrees")?;
    ensure(
        matches!(rep.verdict, Verdict::Fails { condition: Condition::SAboveRPlusTMinusK, .. }),
        format!("verdict {}", rep.verdict),
    )?;
    let out = bin().arg("verify").arg(data("gate_s3.json")).output().map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(2), format!("exit {:?}", out.status.code()))?;
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    ensure(json["invariance"].is_null() && json["rates"].as_array().is_some_and(|r| r.is_empty()), "sampling ran")?;
    Ok(format!("verdict \"{}\", verify exit 2, nothing sampled", rep.verdict))
}

fn c10_determinism() -> Check {
    let dir = std::env::temp_dir().join(format!("germlab-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for threads in C10_THREADS {
        let out = dir.join(format!("verify-{threads}.json"));
        let status = bin()
            .env("GERMLAB_THREADS", threads)
            .args(["--seed", "11", "--out"])
            .arg(&out)
            .args(["verify", "--samples", "24", "--steps", "2000", "--rate-steps", "20000"])
            .arg(data("germ_a.json"))
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.code() == Some(0), format!("threads={threads}: exit {:?}", status.code()))?;
        outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    let _ = std::fs::remove_dir_all(&dir);
    ensure(outputs[0] == outputs[1], "reports differ")?;
    Ok(format!("GERMLAB_THREADS={} vs {}: {} identical bytes", C10_THREADS[0], C10_THREADS[1], outputs[0].len()))
}

fn run(id: u32, name: &str, f: impl FnOnce() -> Check) -> bool {
    let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
    });
    match res {
        Ok(detail) => {
            println!("criterion {id:>2} PASS  {name}: {detail}");
            true
        }
        Err(why) => {
            println!("criterion {id:>2} FAIL  {name}: {why}");
            false
        }
    }
}

fn main() {
    let mut ok = true;
    ok &= run(1, "series algebra", c1_series_algebra);
    ok &= run(2, "classification", c2_classification);
    ok &= run(3, "decomposition and invariance thresholds", c3_decomposition_and_thresholds);
    ok &= run(4, "inverse germ", c4_inverse);
    let germ_a = germ_a_run();
    let germ_a = &germ_a;
    let with_run = |f: fn(&GermARun) -> Check| move || germ_a.as_ref().map_err(|e| e.clone()).and_then(f);
    ok &= run(5, "domain invariance, t != r", with_run(c5_invariance));
    ok &= run(6, "z_n rate", with_run(c6_z_rate));
    ok &= run(7, "w_n rate, t != r, s = inf", with_run(c7_w_rate));
    ok &= run(8, "w_n rates, t = r", c8_family_rates);
    ok &= run(9, "negative gate", c9_negative_gate);
    ok &= run(10, "determinism across worker counts", c10_determinism);
    if !ok {
        std::process::exit(1);
    }
}
