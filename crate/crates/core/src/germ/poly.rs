//! Dense univariate polynomials over ℚ(i): square-free decomposition and roots.
//!
//! Coefficients are stored lowest degree first; trailing zeros are trimmed.

use rug::float::Constant;
use rug::{Float, Integer, Rational};

use crate::tps::{HpComplex, Scalar};

pub type Poly = Vec<Scalar>;

pub fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(Scalar::is_zero) {
        p.pop();
    }
    p
}

/// Degree, `None` for the zero polynomial.
pub fn degree(p: &[Scalar]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

/// Order of vanishing at 0, `None` (∞) for the zero polynomial.
pub fn valuation(p: &[Scalar]) -> Option<u32> {
    p.iter().position(|c| !c.is_zero()).map(|i| i as u32)
}

pub fn eval(p: &[Scalar], x: &Scalar) -> Scalar {
    p.iter().rev().fold(Scalar::zero(), |acc, c| &(&acc * x) + c)
}

pub fn eval_hp(p: &[HpComplex], x: &HpComplex) -> HpComplex {
    let mut acc = HpComplex::zero(x.prec());
    for c in p.iter().rev() {
        acc = acc.mul(x).add(c);
    }
    acc
}

pub fn derivative(p: &[Scalar]) -> Poly {
    trim(p.iter().enumerate().skip(1).map(|(i, c)| c * &Scalar::from_int(i as i64)).collect())
}

fn monic(p: Poly) -> Poly {
    let p = trim(p);
    match p.last() {
        Some(lead) if !lead.is_one() => {
            let inv = lead.recip().expect("trimmed leading coefficient is nonzero");
            p.iter().map(|c| c * &inv).collect()
        }
        _ => p,
    }
}

/// Quotient and remainder; panics on a zero divisor.
pub fn divrem(a: &[Scalar], b: &[Scalar]) -> (Poly, Poly) {
    let db = degree(b).expect("division by the zero polynomial");
    let lead_inv = b[db].recip().unwrap();
    let mut rem = trim(a.to_vec());
    let mut quot = vec![Scalar::zero(); rem.len().saturating_sub(db).max(1)];
    while let Some(dr) = degree(&rem) {
        if dr < db {
            break;
        }
        let c = &rem[dr] * &lead_inv;
        let shift = dr - db;
        for (i, bc) in b.iter().enumerate().take(db + 1) {
            let t = &c * bc;
            rem[shift + i] -= &t;
        }
        quot[shift] = c;
        rem = trim(rem);
    }
    (trim(quot), rem)
}

pub fn gcd(a: &[Scalar], b: &[Scalar]) -> Poly {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let (_, r) = divrem(&x, &y);
        x = y;
        y = r;
    }
    monic(x)
}

/// Yun's algorithm: `p = c · Π f_i^i` with the `f_i` monic, square-free and pairwise coprime.
/// Returns the nonconstant `(f_i, i)`.
pub fn square_free(p: &[Scalar]) -> Vec<(Poly, u32)> {
    let p = monic(p.to_vec());
    if degree(&p).unwrap_or(0) == 0 {
        return Vec::new();
    }
    let dp = derivative(&p);
    let a0 = gcd(&p, &dp);
    let mut b = divrem(&p, &a0).0;
    let mut c = divrem(&dp, &a0).0;
    let mut d = sub(&c, &derivative(&b));
    let mut out = Vec::new();
    let mut i = 1;
    loop {
        let a = gcd(&b, &d);
        if degree(&a).unwrap_or(0) > 0 {
            out.push((a.clone(), i));
        }
        b = divrem(&b, &a).0;
        if degree(&b).unwrap_or(0) == 0 {
            break;
        }
        c = divrem(&d, &a).0;
        d = sub(&c, &derivative(&b));
        i += 1;
    }
    out
}

fn sub(a: &[Scalar], b: &[Scalar]) -> Poly {
    let n = a.len().max(b.len());
    let zero = Scalar::zero();
    trim((0..n).map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero)).collect())
}

/// A root of a polynomial: exact when it lies in ℚ(i), otherwise a numeric
/// approximation together with `|p(root)|`.
#[derive(Clone, Debug)]
pub enum Root {
    Exact(Scalar),
    Numeric { value: HpComplex, residual: Float },
}

/// All roots with multiplicity, grouped as `(root, multiplicity)`.
pub fn roots(p: &[Scalar], prec: u32) -> Vec<(Root, u32)> {
    let mut out = Vec::new();
    for (factor, mult) in square_free(p) {
        let d = degree(&factor).unwrap();
        if d == 1 {
            let r = -(&factor[0] / &factor[1]);
            out.push((Root::Exact(r), mult));
            continue;
        }
        let hp_coeffs: Vec<HpComplex> = factor.iter().map(|c| c.to_hp(prec)).collect();
        for z in aberth(&hp_coeffs, prec) {
            let root = match reconstruct(&z, prec) {
                Some(q) if eval(&factor, &q).is_zero() => Root::Exact(q),
                _ => {
                    let residual = eval_hp(&hp_coeffs, &z).abs();
                    Root::Numeric { value: z, residual }
                }
            };
            out.push((root, mult));
        }
    }
    out
}

/// Simultaneous Aberth–Ehrlich iteration on a square-free polynomial.
fn aberth(p: &[HpComplex], prec: u32) -> Vec<HpComplex> {
    let n = p.len() - 1;
    let lead = p[n].clone();
    let monic: Vec<HpComplex> = p.iter().map(|c| c.div(&lead).unwrap()).collect();
    let dp: Vec<HpComplex> = monic
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.scale(&Float::with_val(prec, i as u32)))
        .collect();
    let mut radius = Float::with_val(prec, 1);
    for c in &monic[..n] {
        let a = c.abs();
        if a > radius {
            radius = a;
        }
    }
    radius += 1u32;
    let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
    let mut zs: Vec<HpComplex> = (0..n)
        .map(|k| {
            let ang = Float::with_val(prec, &two_pi * k as u32) / n as u32 + 0.4f64;
            HpComplex::from_polar(prec, &radius, &ang)
        })
        .collect();
    let tol = Float::with_val(prec, Float::i_exp(1, -(prec as i32) + 16));
    for _ in 0..2000 {
        let mut worst = Float::new(prec);
        for i in 0..n {
            let pv = eval_hp(&monic, &zs[i]);
            if pv.is_zero() {
                continue;
            }
            let dv = eval_hp(&dp, &zs[i]);
            let Some(ratio) = pv.div(&dv) else { continue };
            let mut sum = HpComplex::zero(prec);
            for (j, zj) in zs.iter().enumerate() {
                if j != i {
                    if let Some(inv) = zs[i].sub(zj).recip() {
                        sum = sum.add(&inv);
                    }
                }
            }
            let one = HpComplex::from_f64(prec, 1.0, 0.0);
            let denom = one.sub(&ratio.mul(&sum));
            let step = ratio.div(&denom).unwrap_or(ratio);
            let size = Float::with_val(prec, step.abs() / Float::with_val(prec, zs[i].abs().max(&Float::with_val(prec, 1))));
            if size > worst {
                worst = size;
            }
            zs[i] = zs[i].sub(&step);
        }
        if worst < tol {
            break;
        }
    }
    zs
}

/// Best rational approximation of each part by continued fractions, accepted once
/// within `2^{-prec/2}`.
fn reconstruct(z: &HpComplex, prec: u32) -> Option<Scalar> {
    let tol = Float::with_val(prec, Float::i_exp(1, -(prec as i32) / 2));
    let re = continued_fraction(&z.re, &tol, prec)?;
    let im = continued_fraction(&z.im, &tol, prec)?;
    Some(Scalar::new(re, im))
}

fn continued_fraction(x: &Float, tol: &Float, prec: u32) -> Option<Rational> {
    if x.clone().abs() < *tol {
        return Some(Rational::new());
    }
    let (mut h0, mut h1) = (Integer::from(0), Integer::from(1));
    let (mut k0, mut k1) = (Integer::from(1), Integer::from(0));
    let mut y = x.clone();
    for _ in 0..120 {
        let a = y.clone().floor().to_integer()?;
        let h2 = Integer::from(&a * &h1) + &h0;
        let k2 = Integer::from(&a * &k1) + &k0;
        (h0, h1) = (h1, h2);
        (k0, k1) = (k1, k2);
        let approx = Rational::from((h1.clone(), k1.clone()));
        let err = Float::with_val(prec, x - Float::with_val(prec, &approx)).abs();
        if err < *tol {
            return Some(approx);
        }
        let frac = Float::with_val(prec, &y - &a);
        if frac.is_zero() {
            return None;
        }
        y = Float::with_val(prec, frac.recip());
    }
    None
}
