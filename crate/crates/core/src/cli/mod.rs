//! Command-line front end. Every command writes a JSON report and maps its
//! outcome to an exit code.

pub mod spec;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rug::Float;

pub use spec::{GermSpec, MonomialSpec, SpecError};

use crate::conjugation::{phi_chi_decompose, prop_c_report};
use crate::germ::{classify, classify_approx, classify_at_e1, DirPoint, Direction, DirectionReport, Germ, Verdict};
use crate::normalform::{decompose_with, rescale, LAMBDA_MAX};
use crate::orbit::{default_params, iterate, write_csv, IterateOptions, OrbitError, ParamOverrides, Record};
use crate::report::{self, ClassifyReport, NormalizeReport, SCHEMA_VERSION};
use crate::tps::{decimal_digits, HpComplex, HpMap2, MIN_PRECISION};
use crate::verify::{germ_constants, verify, VerifyError, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAILS: i32 = 2;
pub const EXIT_TRUNCATION: i32 = 3;
pub const EXIT_PROP_C: i32 = 4;
pub const EXIT_INVARIANCE: i32 = 5;
pub const EXIT_RATE: i32 = 6;

#[derive(Debug, Parser)]
#[command(name = "germlab", version, about = "Germs of holomorphic maps of C^2 tangent to the identity")]
pub struct Cli {
    /// Truncation degree N (default: the one in the germ file).
    #[arg(long, global = true)]
    pub truncation: Option<u32>,
    /// Working precision in bits for numerical work.
    #[arg(long, global = true, default_value_t = 256)]
    pub precision: u32,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Characteristic directions, degrees, type, index, director and verdict.
    Classify {
        germ: PathBuf,
        /// Only this direction, as `a:b` or `[a:b]` with rational-complex entries.
        #[arg(long)]
        direction: Option<String>,
    },
    /// Decomposition and rescaled normal form at [1:0].
    Normalize {
        germ: PathBuf,
        #[arg(long, default_value_t = LAMBDA_MAX)]
        lambda_max: f64,
    },
    /// Conjugate by a biholomorphism and check which invariants are guaranteed.
    Conjugate { germ: PathBuf, psi: PathBuf },
    /// Iterate the germ from a start point and write the orbit as CSV.
    Iterate {
        germ: PathBuf,
        /// `z,w` with each entry `re`, `re+imi` or `imi` in decimal.
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(long, default_value_t = 1000)]
        steps: u64,
        /// CSV destination (default: stdout).
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Keep every d-th step.
        #[arg(long, default_value_t = 1)]
        decimate: u64,
    },
    /// Sample the attracting domain, check invariance and fit the rates.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub germ: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub samples: u64,
    #[arg(long, default_value_t = 10_000)]
    pub steps: u64,
    /// Steps of each rate-fit orbit.
    #[arg(long, default_value_t = 100_000)]
    pub rate_steps: u64,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, default_value_t = LAMBDA_MAX)]
    pub lambda_max: f64,
}

/// Parses `args` and runs the command on `threads` workers; returns the exit code.
pub fn run<I, T>(args: I, threads: usize) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match execute(&cli, threads) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_ERROR
        }
    }
}

fn execute(cli: &Cli, threads: usize) -> Result<i32, String> {
    if cli.precision < MIN_PRECISION {
        return Err(format!("--precision must be at least {MIN_PRECISION}"));
    }
    match &cli.command {
        Command::Classify { germ, direction } => cmd_classify(cli, germ, direction.as_deref()),
        Command::Normalize { germ, lambda_max } => cmd_normalize(cli, germ, *lambda_max),
        Command::Conjugate { germ, psi } => cmd_conjugate(cli, germ, psi),
        Command::Iterate { germ, start, steps, csv, decimate } => {
            cmd_iterate(cli, germ, start, *steps, csv.as_deref(), *decimate)
        }
        Command::Verify(v) => cmd_verify(cli, v, threads),
    }
}

fn load_germ(cli: &Cli, path: &Path) -> Result<Germ, String> {
    let p = path.display().to_string();
    let spec = GermSpec::read(&p).map_err(|e| e.to_string())?;
    spec.to_germ(&p, cli.truncation).map_err(|e| e.to_string())
}

fn emit(cli: &Cli, json: &str) -> Result<(), String> {
    match &cli.out {
        Some(path) => std::fs::write(path, json).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(json.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn verdict_code(v: &Verdict) -> i32 {
    match v {
        Verdict::Applies { .. } => EXIT_OK,
        Verdict::Fails { .. } => EXIT_FAILS,
        Verdict::TruncationLimited { .. } => EXIT_TRUNCATION,
    }
}

fn cmd_classify(cli: &Cli, path: &Path, direction: Option<&str>) -> Result<i32, String> {
    let f = load_germ(cli, path)?;
    let dirs = f.char_directions(f.order()).map_err(|e| e.to_string())?;
    let mut reports: Vec<DirectionReport> = Vec::new();
    match direction {
        Some(d) => {
            let v: Direction = d.parse().map_err(|e| format!("--direction {d:?}: {e}"))?;
            reports.push(classify(&f, &v).map_err(|e| format!("{v}: {e}"))?);
        }
        None => {
            for cd in &dirs.directions {
                let rep = match &cd.point {
                    DirPoint::Exact(v) => classify(&f, v),
                    DirPoint::Approx { u, .. } => classify_approx(&f, u),
                };
                reports.push(rep.map_err(|e| e.to_string())?);
            }
        }
    }
    let code = match reports.iter().find(|r| r.direction.is_e1()).or(reports.first()) {
        Some(r) if direction.is_some() || reports.len() == 1 => verdict_code(&r.verdict),
        _ if reports.iter().any(|r| r.verdict.applies()) => EXIT_OK,
        _ if reports.iter().any(|r| matches!(r.verdict, Verdict::TruncationLimited { .. })) => EXIT_TRUNCATION,
        _ => EXIT_FAILS,
    };
    let rep = ClassifyReport {
        schema_version: SCHEMA_VERSION,
        command: "classify".into(),
        truncation: f.trunc(),
        order: f.order(),
        dicritical: dirs.dicritical,
        characteristic_directions: report::char_directions(&dirs),
        reports: reports.iter().map(Into::into).collect(),
    };
    emit(cli, &report::to_json(&rep))?;
    Ok(code)
}

fn cmd_normalize(cli: &Cli, path: &Path, lambda_max: f64) -> Result<i32, String> {
    let f = load_germ(cli, path)?;
    let rep = classify_at_e1(&f).map_err(|e| e.to_string())?;
    let mut out = NormalizeReport {
        schema_version: SCHEMA_VERSION,
        command: "normalize".into(),
        direction: (&rep).into(),
        normal_form: None,
        params: None,
        note: None,
    };
    if !rep.verdict.applies() {
        out.note = Some(rep.verdict.to_string());
        emit(cli, &report::to_json(&out))?;
        return Ok(verdict_code(&rep.verdict));
    }
    let d = decompose_with(&f, &rep).map_err(|e| e.to_string())?;
    let rescaled = rescale(&f, &d, lambda_max, cli.precision).map_err(|e| e.to_string())?;
    out.normal_form = Some((&rescaled.data).into());
    match default_params(&germ_constants(&rep, &rescaled), &ParamOverrides::default()) {
        Ok(p) => out.params = Some((&p).into()),
        Err(e) => out.note = Some(e.to_string()),
    }
    emit(cli, &report::to_json(&out))?;
    Ok(EXIT_OK)
}

fn cmd_conjugate(cli: &Cli, path: &Path, psi_path: &Path) -> Result<i32, String> {
    let f = load_germ(cli, path)?;
    let p = psi_path.display().to_string();
    let psi = GermSpec::read(&p)
        .and_then(|s| s.to_biholo(&p, Some(cli.truncation.unwrap_or(f.trunc()))))
        .map_err(|e| e.to_string())?;
    let pc = phi_chi_decompose(&psi).map_err(|e| e.to_string())?;
    let prop = prop_c_report(&f, &psi).map_err(|e| e.to_string())?;
    let g = crate::conjugation::conjugate(&f, &psi).map_err(|e| e.to_string())?;
    let rep = report::conjugate_report(&pc, g.map(), &prop);
    emit(cli, &report::to_json(&rep))?;
    Ok(if prop.ok() { EXIT_OK } else { EXIT_PROP_C })
}

/// A decimal complex number `re`, `re+imi`, `re-imi` or `imi`.
pub fn parse_complex(s: &str, prec: u32) -> Result<HpComplex, String> {
    let s = s.trim();
    let float = |t: &str| -> Result<Float, String> {
        let t = t.strip_prefix('+').unwrap_or(t);
        Float::parse(t).map(|v| Float::with_val(prec, v)).map_err(|e| format!("{t:?}: {e}"))
    };
    let Some(body) = s.strip_suffix('i') else {
        return Ok(HpComplex::new(float(s)?, Float::new(prec)));
    };
    // split at the last sign that is not a leading sign or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match split {
        Some(i) => {
            let im = if i + 1 == body.len() { format!("{}1", &body[i..]) } else { body[i..].to_string() };
            Ok(HpComplex::new(float(&body[..i])?, float(&im)?))
        }
        None => {
            let im = match body {
                "" | "+" => "1",
                "-" => "-1",
                b => b,
            };
            Ok(HpComplex::new(Float::new(prec), float(im)?))
        }
    }
}

fn cmd_iterate(
    cli: &Cli,
    path: &Path,
    start: &str,
    steps: u64,
    csv: Option<&Path>,
    decimate: u64,
) -> Result<i32, String> {
    let f = load_germ(cli, path)?;
    let (zs, ws) = start.split_once(',').ok_or_else(|| format!("--start {start:?}: expected z,w"))?;
    let z = parse_complex(zs, cli.precision).map_err(|e| format!("--start: {e}"))?;
    let w = parse_complex(ws, cli.precision).map_err(|e| format!("--start: {e}"))?;
    if !z.is_finite() || !w.is_finite() {
        return Err("--start must be finite".into());
    }
    let map = HpMap2::from_map(f.map(), cli.precision);
    let opts = IterateOptions {
        n_max: steps,
        record: Record::Every(decimate.max(1)),
        domain: None,
        burn_in: None,
        guard: 1.0,
    };
    let rec = iterate(&map, (z, w), &opts).map_err(|e| e.to_string())?;
    let digits = decimal_digits(cli.precision);
    match csv {
        Some(p) => {
            let file = std::fs::File::create(p).map_err(|e| format!("{}: {e}", p.display()))?;
            write_csv(&rec, digits, std::io::BufWriter::new(file)).map_err(|e| e.to_string())?;
            emit(cli, &report::to_json(&report::iterate_report(&rec)))?;
        }
        None => {
            write_csv(&rec, digits, std::io::stdout().lock()).map_err(|e| e.to_string())?;
            if cli.out.is_some() {
                emit(cli, &report::to_json(&report::iterate_report(&rec)))?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_verify(cli: &Cli, v: &VerifyArgs, threads: usize) -> Result<i32, String> {
    let f = load_germ(cli, &v.germ)?;
    let opts = VerifyOptions {
        samples: v.samples,
        steps: v.steps,
        rate_steps: v.rate_steps,
        seed: cli.seed,
        threads,
        precision: cli.precision,
        lambda_max: v.lambda_max,
        overrides: ParamOverrides { delta: v.delta, theta: v.theta, epsilon: v.epsilon },
        ..VerifyOptions::default()
    };
    let ver = match verify(&f, &opts) {
        Ok(x) => x,
        Err(VerifyError::Orbit(e @ (OrbitError::Params(_) | OrbitError::NotAttracting(_)))) => {
            eprintln!("error: {e}");
            return Ok(EXIT_FAILS);
        }
        Err(e) => return Err(e.to_string()),
    };
    emit(cli, &report::to_json(&report::VerifyReport::from(&ver)))?;
    Ok(match () {
        _ if !ver.classification.verdict.applies() => verdict_code(&ver.classification.verdict),
        _ if !ver.invariance_ok() => EXIT_INVARIANCE,
        _ if !ver.rates_ok() => EXIT_RATE,
        _ => EXIT_OK,
    })
}
