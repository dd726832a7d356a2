//! Moving a direction to `[1:0]`, the `R, S, T, U, V` decomposition, and the
//! rescaled normal form with `β` and `λ`.

use rug::Float;
use thiserror::Error;

use crate::germ::{classify_at_e1, Attraction, Direction, DirectionReport, Director, Germ, GermError, SDegree};
use crate::tps::{HpComplex, HpMap2, HpPoly2, Linear, Map2, Scalar, Series1, Ts2};

/// Default bound on `|λ|` after rescaling.
pub const LAMBDA_MAX: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormalFormError {
    #[error(transparent)]
    Germ(#[from] GermError),
    #[error("cannot decompose: {0}")]
    Missing(String),
}

fn linear_to(v: &Direction) -> Linear {
    if v.a().is_zero() {
        [[Scalar::zero(), Scalar::one()], [Scalar::one(), Scalar::zero()]]
    } else {
        [[Scalar::one(), Scalar::zero()], [v.b().clone(), Scalar::one()]]
    }
}

/// `L⁻¹ ∘ f ∘ L` for a linear `L` sending `[1:0]` to `v`.
pub fn move_to_e1(f: &Germ, v: &Direction) -> Result<Germ, GermError> {
    if v.is_e1() {
        return Ok(f.clone());
    }
    let g = f.map().conjugate_linear(&linear_to(v))?;
    if f.is_complete() {
        Germ::polynomial(g)
    } else {
        Germ::truncated(g)
    }
}

/// `f = (z(1 + z^r R(z)) + wU, w(1 + z^t T(z) + wV) + z^{s+1} S(z))`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub k: u32,
    pub t: u32,
    pub r: u32,
    pub s: SDegree,
    pub r_ser: Series1,
    pub s_ser: Series1,
    pub t_ser: Series1,
    pub u: Ts2,
    pub v: Ts2,
    pub a: Scalar,
    pub b: Scalar,
    /// `S(0)`, zero exactly when `S ≡ 0` to the truncation.
    pub c: Scalar,
    pub trunc: u32,
}

impl Decomposition {
    /// `U = O((z,w)^k)` and `V = O((z,w)^{k−1})`.
    pub fn order_bounds_hold(&self) -> bool {
        let u_ok = self.u.valuation().is_none_or(|d| d >= self.k);
        let v_ok = self.v.valuation().is_none_or(|d| d + 1 >= self.k);
        u_ok && v_ok
    }

    pub fn s_vanishes(&self) -> bool {
        self.s_ser.is_zero()
    }
}

fn div_z_pow(s: &Series1, p: u32) -> Result<Series1, NormalFormError> {
    s.shift_down(p).map_err(|_| NormalFormError::Missing(format!("series not divisible by z^{p}")))
}

/// Splits a germ whose `[1:0]` has degrees `t ≤ r < s`.
pub fn decompose(f: &Germ) -> Result<Decomposition, NormalFormError> {
    let rep = classify_at_e1(f)?;
    decompose_with(f, &rep)
}

pub fn decompose_with(f: &Germ, rep: &DirectionReport) -> Result<Decomposition, NormalFormError> {
    let r = rep.r.ok_or_else(|| NormalFormError::Missing("degree r".into()))?;
    let t = rep.t.ok_or_else(|| NormalFormError::Missing("degree t".into()))?;
    if t > r {
        return Err(NormalFormError::Missing(format!("t = {t} exceeds r = {r}")));
    }
    if rep.s.finite().is_some_and(|s| s <= r) {
        return Err(NormalFormError::Missing(format!("s = {} is not above r = {r}", rep.s)));
    }
    let n = f.trunc();
    let (f1, f2) = (f.map().first(), f.map().second());

    let rz = f1.restrict_w0().checked_sub(&Series1::identity(n)).map_err(GermError::from)?;
    let r_ser = div_z_pow(&rz, r + 1)?;
    let u = f1.filter_w_at_least(1).div_w_pow(1).map_err(GermError::from)?;
    let w1 = f2.w_slice(1).checked_sub(&Series1::constant(n - 1, Scalar::one())).map_err(GermError::from)?;
    let t_ser = div_z_pow(&w1, t)?;
    let v = f2.filter_w_at_least(2).div_w_pow(2).map_err(GermError::from)?;
    let s_ser = match rep.s.finite() {
        Some(s) => div_z_pow(&f2.restrict_w0(), s + 1)?,
        None => Series1::zero(0),
    };
    let a = r_ser.coeff(0).clone();
    let b = t_ser.coeff(0).clone();
    let c = s_ser.coeff(0).clone();
    if a.is_zero() || b.is_zero() {
        return Err(NormalFormError::Missing("R(0) or T(0) vanishes".into()));
    }
    Ok(Decomposition { k: rep.k, t, r, s: rep.s, r_ser, s_ser, t_ser, u, v, a, b, c, trunc: n })
}

fn z_pow_times(s: &Series1, p: u32, w: u32, n: u32) -> Ts2 {
    let mut out = Ts2::zero(n);
    for (i, c) in s.coeffs().iter().enumerate() {
        out.add_term(i as u32 + p, w, c);
    }
    out
}

/// Reassembles the map from its five pieces.
pub fn rebuild(d: &Decomposition) -> Map2 {
    let n = d.trunc;
    let mut first = &Ts2::z(n) + &z_pow_times(&d.r_ser, d.r + 1, 0, n);
    for (m, c) in d.u.terms() {
        first.add_term(m.z, m.w + 1, c);
    }
    let mut second = &Ts2::w(n) + &z_pow_times(&d.t_ser, d.t, 1, n);
    for (m, c) in d.v.terms() {
        second.add_term(m.z, m.w + 2, c);
    }
    if let Some(s) = d.s.finite() {
        second = &second + &z_pow_times(&d.s_ser, s + 1, 0, n);
    }
    Map2::new(first, second).expect("pieces share the truncation")
}

/// Constants of the rescaled form.
#[derive(Clone, Debug)]
pub struct NormalFormData {
    pub decomposition: Decomposition,
    pub director: Director,
    pub a1: HpComplex,
    pub a2: HpComplex,
    pub beta: HpComplex,
    pub lambda: HpComplex,
    pub delta: HpComplex,
    pub prec: u32,
}

/// The conjugate `L⁻¹ ∘ f ∘ L`, `L = diag(a₁, a₂)`, as a float-coefficient map.
#[derive(Clone, Debug)]
pub struct Rescaled {
    pub map: HpMap2,
    pub data: NormalFormData,
}

/// Chooses `a₁` by the director and `a₂` so that `|λ| ≤ lambda_max`.
pub fn rescale(f: &Germ, d: &Decomposition, lambda_max: f64, prec: u32) -> Result<Rescaled, NormalFormError> {
    let director = crate::germ::director(d.k, d.t, d.r, &d.a, &d.b)?;
    let a1 = director.a1.with_prec(prec);
    let beta = (-&d.b).to_hp(prec).mul(&a1.powi(d.t));
    let one = HpComplex::from_f64(prec, 1.0, 0.0);
    let (a2, lambda) = match d.s.finite() {
        Some(s) if !d.c.is_zero() => {
            let raw = d.c.to_hp(prec).mul(&a1.powi(s + 1));
            let size = raw.abs();
            if size <= lambda_max {
                (one.clone(), raw)
            } else {
                let a2 = Float::with_val(prec, &size / lambda_max);
                let a2 = HpComplex::new(a2, Float::new(prec));
                let lambda = raw.div(&a2).expect("a2 > 0");
                (a2, lambda)
            }
        }
        _ => (one.clone(), HpComplex::zero(prec)),
    };
    let delta = director.value.with_prec(prec);
    let map = conjugate_diag(f.map(), &a1, &a2, prec);
    let data = NormalFormData { decomposition: d.clone(), director, a1, a2, beta, lambda, delta, prec };
    Ok(Rescaled { map, data })
}

/// Coefficients `c_ij a₁^i a₂^j / a₁` (first) and `/ a₂` (second).
pub fn conjugate_diag(f: &Map2, a1: &HpComplex, a2: &HpComplex, prec: u32) -> HpMap2 {
    // the identity term of each coordinate is kept exact rather than as a·a⁻¹
    let conj = |s: &Ts2, div: &HpComplex, own: (u32, u32)| {
        let terms = s
            .terms()
            .map(|(m, c)| {
                let v = if (m.z, m.w) == own {
                    c.to_hp(prec)
                } else {
                    c.to_hp(prec).mul(&a1.powi(m.z)).mul(&a2.powi(m.w)).div(div).expect("nonzero scale")
                };
                (m.z, m.w, v)
            })
            .collect();
        HpPoly2::from_terms(terms)
    };
    HpMap2::new(conj(f.first(), a1, (1, 0)), conj(f.second(), a2, (0, 1)), prec)
}

/// Checks of the inverse map against the original at `[1:0]`.
#[derive(Clone, Debug)]
pub struct InverseReport {
    pub forward: DirectionReport,
    pub inverse: DirectionReport,
    pub attracting_forward: Attraction,
    pub attracting_inverse: Attraction,
    pub violations: Vec<String>,
}

impl InverseReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn inverse_invariants(f: &Germ) -> Result<InverseReport, NormalFormError> {
    let fwd = classify_at_e1(f)?;
    let inv = classify_at_e1(&f.inverse()?)?;
    let mut v = Vec::new();
    if (fwd.k, fwd.t, fwd.r) != (inv.k, inv.t, inv.r) {
        v.push(format!("(k,t,r) = ({},{:?},{:?}) but inverse has ({},{:?},{:?})", fwd.k, fwd.t, fwd.r, inv.k, inv.t, inv.r));
    }
    if !fwd.s.same_degree(inv.s) {
        v.push(format!("s = {} but inverse has s = {}", fwd.s, inv.s));
    }
    match (&fwd.a, &inv.a) {
        (Some(a), Some(ah)) if *ah == -a => {}
        (a, ah) => v.push(format!("R(0) = {a:?} but inverse R(0) = {ah:?}")),
    }
    match (&fwd.b, &inv.b) {
        (Some(b), Some(bh)) if *bh == -b => {}
        (b, bh) => v.push(format!("T(0) = {b:?} but inverse T(0) = {bh:?}")),
    }
    let (af, ai) = (fwd.attraction, inv.attraction);
    if let (Some(t), Some(r)) = (fwd.t, fwd.r) {
        if t == r {
            let (d, dh) = (fwd.director.as_ref().and_then(|d| d.exact.clone()), inv.director.as_ref().and_then(|d| d.exact.clone()));
            if d != dh {
                v.push(format!("t = r but Delta = {d:?}, inverse Delta = {dh:?}"));
            }
            if af != ai {
                v.push("t = r but attraction differs between f and its inverse".into());
            }
        } else if r == 2 * t && af != Attraction::Yes && ai != Attraction::Yes {
            v.push("r = 2t but neither f nor its inverse is transversally attracting".into());
        }
    }
    Ok(InverseReport { forward: fwd, inverse: inv, attracting_forward: af, attracting_inverse: ai, violations: v })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    fn germ(a: &[(&str, u32, u32)], b: &[(&str, u32, u32)]) -> Germ {
        let n = 12;
        let mut f1 = Ts2::z(n);
        let mut f2 = Ts2::w(n);
        for (c, i, j) in a {
            f1.add_term(*i, *j, &sc(c));
        }
        for (c, i, j) in b {
            f2.add_term(*i, *j, &sc(c));
        }
        Germ::polynomial(Map2::new(f1, f2).unwrap()).unwrap()
    }

    fn germ_a() -> Germ {
        germ(&[("1", 1, 1), ("-1/2", 3, 0)], &[("-1", 1, 1)])
    }

    fn family(tail: &str, s1: u32) -> Germ {
        germ(&[("-1/2", 3, 0)], &[("-3", 2, 1), ("1", 0, 2), (tail, s1, 0)])
    }

    #[test]
    fn move_examples() {
        let f = germ_a();
        assert_eq!(move_to_e1(&f, &Direction::e1()).unwrap(), f);
        // swapping the coordinates
        let g = germ(&[("1", 0, 2)], &[]);
        let m = move_to_e1(&g, &Direction::e2()).unwrap();
        assert_eq!(*m.map().first(), Ts2::z(12));
        assert_eq!(m.map().second().coeff(2, 0), sc("1"));
        // (z + (z−w)², w) along [1:1] becomes (z + w², w − w²)
        let h = germ(&[("1", 2, 0), ("-2", 1, 1), ("1", 0, 2)], &[]);
        let m = move_to_e1(&h, &Direction::new(sc("1"), sc("1")).unwrap()).unwrap();
        assert_eq!(m.map().first().coeff(0, 2), sc("1"));
        assert_eq!(m.map().second().coeff(0, 2), sc("-1"));
        assert!(m.vanishing_orders(2).unwrap().n.is_some_and(|n| n >= 1));
    }

    #[test]
    fn decompose_germ_a() {
        let d = decompose(&germ_a()).unwrap();
        assert_eq!((d.a.clone(), d.b.clone()), (sc("-1/2"), sc("-1")));
        assert!(d.s_vanishes());
        assert_eq!(d.u.coeff(1, 0), sc("1"));
        assert_eq!(d.u.len(), 1);
        assert!(d.v.is_zero());
        assert_eq!(rebuild(&d), *germ_a().map());
        assert!(d.order_bounds_hold());
    }

    #[test]
    fn decompose_family() {
        let f = family("1", 5);
        let d = decompose(&f).unwrap();
        assert_eq!((d.a.clone(), d.b.clone(), d.c.clone()), (sc("-1/2"), sc("-3"), sc("1")));
        assert!(d.u.is_zero());
        assert_eq!(d.v.coeff(0, 0), sc("1"));
        assert_eq!(rebuild(&d), *f.map());
    }

    #[test]
    fn decompose_rejects_missing_degrees() {
        let f = germ(&[("1", 0, 2)], &[]);
        assert!(matches!(decompose(&f), Err(NormalFormError::Missing(_))));
    }

    #[test]
    fn rescale_germ_a() {
        let f = germ_a();
        let d = decompose(&f).unwrap();
        let rs = rescale(&f, &d, LAMBDA_MAX, 256).unwrap();
        assert_eq!(rs.data.a1.to_f64_pair(), (1.0, 0.0));
        assert_eq!(rs.data.beta.to_f64_pair(), (1.0, 0.0));
        assert!(rs.data.lambda.is_zero());
    }

    #[test]
    fn rescale_family_bounds_lambda() {
        let f = family("1", 5);
        let d = decompose(&f).unwrap();
        let rs = rescale(&f, &d, LAMBDA_MAX, 256).unwrap();
        assert_eq!(rs.data.beta.to_f64_pair(), (3.0, 0.0));
        assert_eq!(rs.data.delta.to_f64_pair(), (2.0, 0.0));
        assert!((rs.data.lambda.abs().to_f64() - 1e-3).abs() < 1e-15);
        assert!((rs.data.a2.re.to_f64() - 1e3).abs() < 1e-9);
        // normal-form coefficients: −1/r on z^{r+1}, −β on z^t w, λ on z^{s+1}
        let m = &rs.map;
        assert!((m.first.coeff(3, 0).unwrap().re.to_f64() + 0.5).abs() < 1e-15);
        assert!((m.second.coeff(2, 1).unwrap().re.to_f64() + 3.0).abs() < 1e-15);
        assert!((m.second.coeff(5, 0).unwrap().re.to_f64() - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn rescale_with_complex_root() {
        // a = 1/2, r = 2: a1² = −1, a1 = ±i; t = 1: β = −b a1
        let f = germ(&[("1/2", 3, 0)], &[("1", 1, 1)]);
        let d = decompose(&f).unwrap();
        let rs = rescale(&f, &d, LAMBDA_MAX, 256).unwrap();
        let a1 = &rs.data.a1;
        let check = d.a.to_hp(256).mul(&a1.powi(2));
        assert!((check.re.to_f64() + 0.5).abs() < 1e-30 && check.im.to_f64().abs() < 1e-30);
        let c = rs.map.first.coeff(3, 0).unwrap();
        assert!((c.re.to_f64() + 0.5).abs() < 1e-30);
    }

    #[test]
    fn inverse_invariants_hold_on_examples() {
        let rep = inverse_invariants(&germ_a()).unwrap();
        assert!(rep.ok(), "{:?}", rep.violations);
        assert_eq!(rep.inverse.a, Some(sc("1/2")));
        assert_eq!(rep.inverse.b, Some(sc("1")));
        assert_eq!(rep.attracting_forward, Attraction::Yes);
        assert_eq!(rep.attracting_inverse, Attraction::No);

        let rep = inverse_invariants(&family("1", 5)).unwrap();
        assert!(rep.ok(), "{:?}", rep.violations);
        assert_eq!(rep.inverse.director.unwrap().exact, Some(sc("2")));
    }

    #[test]
    fn inverse_of_inverse() {
        let f = germ_a();
        let back = f.inverse().unwrap().inverse().unwrap();
        assert_eq!(back.map(), f.map());
    }
}
