//! Versioned JSON reports. Exact scalars are rational strings; precision-`P`
//! values are decimal strings tagged with their precision.

use serde::{Deserialize, Serialize};

use crate::conjugation::{PhiChi, PropCReport, Sigma};
use crate::germ::{fmt_order, CharDirections, DirPoint, Director, DirectionReport, Verdict};
use crate::normalform::{Decomposition, NormalFormData};
use crate::orbit::{DomainParams, InvarianceReport, OrbitRecord, RateFit};
use crate::tps::{decimal_digits, fmt_float, HpComplex, Series1, Ts2};
use crate::verify::{Outcome, RateRun, Verification};

pub const SCHEMA_VERSION: u32 = 1;

/// A precision-`P` complex number.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HpNum {
    pub re: String,
    pub im: String,
    pub precision_bits: u32,
}

impl From<&HpComplex> for HpNum {
    fn from(x: &HpComplex) -> Self {
        let (re, im) = x.to_decimal_parts(decimal_digits(x.prec()));
        HpNum { re, im, precision_bits: x.prec() }
    }
}

/// Shortest round-trip decimal of an `f64`; `inf`, `-inf` and `NaN` included.
pub fn f64_str(x: f64) -> String {
    x.to_string()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: String,
    pub z_pow: u32,
    pub w_pow: u32,
}

pub fn terms(s: &Ts2) -> Vec<Term> {
    s.terms().map(|(m, c)| Term { coeff: c.to_string(), z_pow: m.z, w_pow: m.w }).collect()
}

/// Coefficients of a one-variable series, lowest degree first.
pub fn coeffs(s: &Series1) -> Vec<String> {
    s.coeffs().iter().map(|c| c.to_string()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orders {
    pub j: u32,
    pub m: String,
    pub l: String,
    pub n: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictDto {
    /// `applies`, `fails` or `truncation-limited`.
    pub status: String,
    pub condition: Option<String>,
    pub reason: Option<String>,
    pub s_through_truncation: bool,
    pub text: String,
}

impl From<&Verdict> for VerdictDto {
    fn from(v: &Verdict) -> Self {
        let text = v.to_string();
        match v {
            Verdict::Applies { s_through_truncation } => VerdictDto {
                status: "applies".into(),
                condition: None,
                reason: None,
                s_through_truncation: *s_through_truncation,
                text,
            },
            Verdict::Fails { condition, reason } => VerdictDto {
                status: "fails".into(),
                condition: Some(condition.to_string()),
                reason: Some(reason.clone()),
                s_through_truncation: false,
                text,
            },
            Verdict::TruncationLimited { reason } => VerdictDto {
                status: "truncation-limited".into(),
                condition: None,
                reason: Some(reason.clone()),
                s_through_truncation: false,
                text,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectorDto {
    /// Exact value when single-valued.
    pub exact: Option<String>,
    pub value: HpNum,
    pub branches: Vec<HpNum>,
    pub a1: HpNum,
    pub attraction: String,
}

impl From<&Director> for DirectorDto {
    fn from(d: &Director) -> Self {
        DirectorDto {
            exact: d.exact.as_ref().map(|x| x.to_string()),
            value: (&d.value).into(),
            branches: d.branches.iter().map(HpNum::from).collect(),
            a1: (&d.a1).into(),
            attraction: d.attraction.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionDto {
    pub direction: String,
    pub approximate: bool,
    pub k: u32,
    pub truncation: u32,
    pub orders: Vec<Orders>,
    pub dir_type: String,
    pub s: String,
    pub r: Option<u32>,
    pub t: Option<u32>,
    pub m: Option<String>,
    pub a: Option<String>,
    pub b: Option<String>,
    pub abate_index: Option<String>,
    pub director: Option<DirectorDto>,
    pub attraction: String,
    pub verdict: VerdictDto,
}

impl From<&DirectionReport> for DirectionDto {
    fn from(r: &DirectionReport) -> Self {
        DirectionDto {
            direction: r.direction.to_string(),
            approximate: r.approximate,
            k: r.k,
            truncation: r.trunc,
            orders: r
                .orders
                .iter()
                .map(|o| Orders { j: o.j, m: fmt_order(o.m), l: fmt_order(o.l), n: fmt_order(o.n) })
                .collect(),
            dir_type: r.dir_type.to_string(),
            s: r.s.to_string(),
            r: r.r,
            t: r.t,
            m: r.orders.first().map(|o| fmt_order(o.m)),
            a: r.a.as_ref().map(|x| x.to_string()),
            b: r.b.as_ref().map(|x| x.to_string()),
            abate_index: r.abate_index.as_ref().map(|x| x.to_string()),
            director: r.director.as_ref().map(DirectorDto::from),
            attraction: r.attraction.to_string(),
            verdict: (&r.verdict).into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharDirectionDto {
    pub direction: String,
    pub multiplicity: u32,
    pub approximate: bool,
    pub residual: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub schema_version: u32,
    pub command: String,
    pub truncation: u32,
    pub order: u32,
    pub dicritical: bool,
    pub characteristic_directions: Vec<CharDirectionDto>,
    pub reports: Vec<DirectionDto>,
}

pub fn char_directions(c: &CharDirections) -> Vec<CharDirectionDto> {
    c.directions
        .iter()
        .map(|d| match &d.point {
            DirPoint::Exact(v) => {
                CharDirectionDto { direction: v.to_string(), multiplicity: d.multiplicity, approximate: false, residual: None }
            }
            DirPoint::Approx { u, residual } => {
                let (re, im) = u.to_decimal_parts(30);
                CharDirectionDto {
                    direction: format!("[1:{re}+{im}i]"),
                    multiplicity: d.multiplicity,
                    approximate: true,
                    residual: Some(fmt_float(residual, 6)),
                }
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionDto {
    pub k: u32,
    pub t: u32,
    pub r: u32,
    pub s: String,
    pub a: String,
    pub b: String,
    pub c: String,
    /// `R`, `S`, `T` as coefficient lists in `z`.
    pub big_r: Vec<String>,
    pub big_s: Vec<String>,
    pub big_t: Vec<String>,
    pub u: Vec<Term>,
    pub v: Vec<Term>,
    pub order_bounds_hold: bool,
}

impl From<&Decomposition> for DecompositionDto {
    fn from(d: &Decomposition) -> Self {
        DecompositionDto {
            k: d.k,
            t: d.t,
            r: d.r,
            s: d.s.to_string(),
            a: d.a.to_string(),
            b: d.b.to_string(),
            c: d.c.to_string(),
            big_r: coeffs(&d.r_ser),
            big_s: coeffs(&d.s_ser),
            big_t: coeffs(&d.t_ser),
            u: terms(&d.u),
            v: terms(&d.v),
            order_bounds_hold: d.order_bounds_hold(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalFormDto {
    pub decomposition: DecompositionDto,
    pub director: DirectorDto,
    pub a1: HpNum,
    pub a2: HpNum,
    pub beta: HpNum,
    pub lambda: HpNum,
    pub delta: HpNum,
}

impl From<&NormalFormData> for NormalFormDto {
    fn from(n: &NormalFormData) -> Self {
        NormalFormDto {
            decomposition: (&n.decomposition).into(),
            director: (&n.director).into(),
            a1: (&n.a1).into(),
            a2: (&n.a2).into(),
            beta: (&n.beta).into(),
            lambda: (&n.lambda).into(),
            delta: (&n.delta).into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizeReport {
    pub schema_version: u32,
    pub command: String,
    pub direction: DirectionDto,
    pub normal_form: Option<NormalFormDto>,
    /// Default domain parameters, including `β̂`.
    pub params: Option<ParamsDto>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaDto {
    pub value: u32,
    pub through_truncation: bool,
    pub text: String,
}

impl From<&Sigma> for SigmaDto {
    fn from(s: &Sigma) -> Self {
        SigmaDto { value: s.value, through_truncation: s.through_truncation, text: s.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckDto {
    pub name: String,
    pub asserted: bool,
    pub before: String,
    pub after: String,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjugateReport {
    pub schema_version: u32,
    pub command: String,
    pub sigma: SigmaDto,
    pub phi: Vec<String>,
    pub big_phi: [Vec<Term>; 2],
    pub chi: [Vec<Term>; 2],
    pub conjugate: [Vec<Term>; 2],
    pub checks: Vec<CheckDto>,
    pub violations: Vec<String>,
}

pub fn conjugate_report(pc: &PhiChi, g: &crate::tps::Map2, prop: &PropCReport) -> ConjugateReport {
    let pair = |m: &crate::tps::Map2| [terms(m.first()), terms(m.second())];
    ConjugateReport {
        schema_version: SCHEMA_VERSION,
        command: "conjugate".into(),
        sigma: (&prop.sigma).into(),
        phi: coeffs(&pc.phi),
        big_phi: pair(pc.big_phi.map()),
        chi: pair(pc.chi.map()),
        conjugate: pair(g),
        checks: prop
            .checks
            .iter()
            .map(|c| CheckDto {
                name: c.name.to_string(),
                asserted: c.asserted,
                before: c.before.clone(),
                after: c.after.clone(),
                equal: c.equal,
            })
            .collect(),
        violations: prop.violations.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterateReport {
    pub schema_version: u32,
    pub command: String,
    pub precision_bits: u32,
    pub steps: u64,
    pub start: [HpNum; 2],
    pub last: Option<[HpNum; 2]>,
    pub rows: usize,
    pub escaped: Option<u64>,
    pub underflow: Option<u64>,
}

pub fn iterate_report(rec: &OrbitRecord) -> IterateReport {
    IterateReport {
        schema_version: SCHEMA_VERSION,
        command: "iterate".into(),
        precision_bits: rec.precision,
        steps: rec.steps,
        start: [(&rec.start.0).into(), (&rec.start.1).into()],
        last: rec.samples.last().map(|s| [(&s.z).into(), (&s.w).into()]),
        rows: rec.samples.len(),
        escaped: rec.escaped,
        underflow: rec.underflow,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsDto {
    pub delta: String,
    pub theta: String,
    pub epsilon: String,
    pub mu: String,
    pub re_beta_hat: String,
}

impl From<&DomainParams> for ParamsDto {
    fn from(p: &DomainParams) -> Self {
        ParamsDto {
            delta: f64_str(p.delta),
            theta: f64_str(p.theta),
            epsilon: f64_str(p.epsilon),
            mu: f64_str(p.mu),
            re_beta_hat: f64_str(p.re_beta_hat),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureDto {
    pub index: u64,
    pub start: [HpNum; 2],
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvarianceDto {
    pub samples: u64,
    pub steps: u64,
    pub seed: u64,
    pub precision_bits: u32,
    pub violations: usize,
    pub failures: Vec<FailureDto>,
    pub max_final_shrink: String,
}

impl From<&InvarianceReport> for InvarianceDto {
    fn from(r: &InvarianceReport) -> Self {
        InvarianceDto {
            samples: r.samples,
            steps: r.steps,
            seed: r.seed,
            precision_bits: r.precision,
            violations: r.failures.len(),
            failures: r
                .failures
                .iter()
                .map(|f| FailureDto { index: f.index, start: [(&f.start.0).into(), (&f.start.1).into()], reason: f.reason.clone() })
                .collect(),
            max_final_shrink: f64_str(r.max_final_shrink),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateFitDto {
    pub window: [u64; 2],
    pub points: usize,
    pub z_exponent: String,
    pub z_expected: String,
    pub z_residual: String,
    pub w_case: String,
    pub nu: String,
    pub w_slope: String,
    pub w_expected: String,
    pub w_residual: String,
    pub envelope_ratio: String,
    pub bound_satisfied: bool,
    pub inv_z_increment: String,
}

impl From<&RateFit> for RateFitDto {
    fn from(f: &RateFit) -> Self {
        RateFitDto {
            window: [f.window.0, f.window.1],
            points: f.points,
            z_exponent: f64_str(f.z_exponent),
            z_expected: f64_str(f.z_expected),
            z_residual: f64_str(f.z_residual),
            w_case: f.w_case.to_string(),
            nu: f64_str(f.nu),
            w_slope: f64_str(f.w_slope),
            w_expected: f64_str(f.w_expected),
            w_residual: f64_str(f.w_residual),
            envelope_ratio: f64_str(f.envelope_ratio),
            bound_satisfied: f.bound_satisfied,
            inv_z_increment: f64_str(f.inv_z_increment),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateRunDto {
    pub start: [HpNum; 2],
    pub fit: RateFitDto,
    pub passed: bool,
}

impl From<&RateRun> for RateRunDto {
    fn from(r: &RateRun) -> Self {
        RateRunDto { start: [(&r.start.0).into(), (&r.start.1).into()], fit: (&r.fit).into(), passed: r.passed }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub command: String,
    pub direction: DirectionDto,
    pub normal_form: Option<NormalFormDto>,
    pub params: Option<ParamsDto>,
    pub invariance: Option<InvarianceDto>,
    pub rates: Vec<RateRunDto>,
    pub z_spread: Option<String>,
    /// The fit window is an empirical default.
    pub fit_window: String,
    pub invariance_ok: bool,
    pub rates_ok: bool,
}

impl From<&Verification> for VerifyReport {
    fn from(v: &Verification) -> Self {
        let base = VerifyReport {
            schema_version: SCHEMA_VERSION,
            command: "verify".into(),
            direction: (&v.classification).into(),
            normal_form: None,
            params: None,
            invariance: None,
            rates: Vec::new(),
            z_spread: None,
            fit_window: "last decade [n_max/10, n_max] (empirical default)".into(),
            invariance_ok: v.invariance_ok(),
            rates_ok: v.rates_ok(),
        };
        match &v.outcome {
            Outcome::NotApplicable => base,
            Outcome::Checked { rescaled, params, invariance, rates, z_spread } => VerifyReport {
                normal_form: Some((&rescaled.data).into()),
                params: Some(params.into()),
                invariance: Some(invariance.into()),
                rates: rates.iter().map(RateRunDto::from).collect(),
                z_spread: Some(f64_str(*z_spread)),
                ..base
            },
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report types serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::germ::{classify_at_e1, Germ};
    use crate::tps::{Map2, Scalar};

    #[test]
    fn classify_report_round_trips() {
        let n = 6;
        let mut f1 = Ts2::z(n);
        f1.add_term(0, 2, &Scalar::one());
        let f = Germ::polynomial(Map2::new(f1, Ts2::w(n)).unwrap()).unwrap();
        let rep = classify_at_e1(&f).unwrap();
        let dto = ClassifyReport {
            schema_version: SCHEMA_VERSION,
            command: "classify".into(),
            truncation: n,
            order: f.order(),
            dicritical: false,
            characteristic_directions: char_directions(&f.char_directions(2).unwrap()),
            reports: vec![(&rep).into()],
        };
        let text = to_json(&dto);
        let back: ClassifyReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, dto);
        assert_eq!(back.reports[0].abate_index.as_deref(), Some("-1"));
        assert_eq!(back.reports[0].verdict.status, "fails");
    }

    #[test]
    fn hp_numbers_carry_precision() {
        let x = HpComplex::from_f64(128, 0.5, -2.0);
        let n = HpNum::from(&x);
        assert_eq!(n.precision_bits, 128);
        assert!(n.re.starts_with("5.0000"));
        assert_eq!(f64_str(f64::NEG_INFINITY), "-inf");
    }
}
