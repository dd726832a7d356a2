//! Biholomorphisms fixing a direction, the `Φ ∘ χ` splitting, conjugation of
//! germs and invariance of `k, t, r, s` under it.

use std::fmt;

use thiserror::Error;

use crate::germ::{classify_at_e1, Direction, Germ, GermError, SDegree};
use crate::tps::{linear_inverse, Linear, Map2, Scalar, Series1, TpsError, Ts2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConjugationError {
    #[error(transparent)]
    Tps(#[from] TpsError),
    #[error(transparent)]
    Germ(#[from] GermError),
    #[error("first coordinate of psi(z,0) has no linear term; eta is not invertible")]
    EtaNotInvertible,
}

/// A biholomorphic germ fixing the origin: invertible linear part.
#[derive(Clone, Debug, PartialEq)]
pub struct Biholo {
    map: Map2,
}

impl Biholo {
    pub fn new(map: Map2) -> Result<Biholo, ConjugationError> {
        if !map.has_zero_constant() {
            return Err(TpsError::NonzeroConstant.into());
        }
        linear_inverse(&map.linear_part())?;
        Ok(Biholo { map })
    }

    pub fn identity(trunc: u32) -> Biholo {
        Biholo { map: Map2::identity(trunc) }
    }

    pub fn map(&self) -> &Map2 {
        &self.map
    }

    pub fn trunc(&self) -> u32 {
        self.map.trunc()
    }

    pub fn inverse(&self) -> Result<Biholo, ConjugationError> {
        Ok(Biholo { map: self.map.invert()? })
    }

    pub fn compose(&self, other: &Biholo) -> Result<Biholo, ConjugationError> {
        Ok(Biholo { map: self.map.compose(&other.map)? })
    }

    /// `L⁻¹ ∘ Ψ ∘ L` for a linear `L` sending `[1:0]` to `v`.
    fn moved(&self, v: &Direction) -> Result<Biholo, ConjugationError> {
        if v.is_e1() {
            return Ok(self.clone());
        }
        let l: Linear = if v.a().is_zero() {
            [[Scalar::zero(), Scalar::one()], [Scalar::one(), Scalar::zero()]]
        } else {
            [[Scalar::one(), Scalar::zero()], [v.b().clone(), Scalar::one()]]
        };
        Ok(Biholo { map: self.map.conjugate_linear(&l)? })
    }
}

/// Largest degree through which a direction is fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sigma {
    pub value: u32,
    /// The whole line is fixed to the truncation; `value` is then `N`.
    pub through_truncation: bool,
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.through_truncation {
            write!(f, ">={}", self.value)
        } else {
            write!(f, "{}", self.value)
        }
    }
}

/// `σ` such that `Ψ_j` fixes `[v]` for every `j ≤ σ`: after moving `v` to `[1:0]`,
/// the second coordinate of `Ψ(z, 0)` is `O(z^{σ+1})`.
pub fn fixes_up_to(psi: &Biholo, v: &Direction) -> Result<Sigma, ConjugationError> {
    let m = psi.moved(v)?;
    Ok(sigma_at_e1(&m))
}

fn sigma_at_e1(psi: &Biholo) -> Sigma {
    let line = psi.map.second().restrict_w0();
    match line.valuation() {
        Some(v) => Sigma { value: v - 1, through_truncation: false },
        None => Sigma { value: psi.trunc(), through_truncation: true },
    }
}

/// `Ψ = Φ ∘ χ` with `Φ = Id + (0, z^{σ+1} φ(z))` and `χ` preserving `{w = 0}`.
#[derive(Clone, Debug)]
pub struct PhiChi {
    pub sigma: Sigma,
    pub phi: Series1,
    pub big_phi: Biholo,
    pub chi: Biholo,
}

/// Splits `Ψ` at `[1:0]`: `η(z) = Ψ¹(z, 0)`, `A₃ = z^{−(σ+1)} Ψ²(z, 0)` and
/// `φ(z) = (η⁻¹(z)/z)^{σ+1} A₃(η⁻¹(z))`.
pub fn phi_chi_decompose(psi: &Biholo) -> Result<PhiChi, ConjugationError> {
    let n = psi.trunc();
    let sigma = sigma_at_e1(psi);
    let eta = psi.map.first().restrict_w0();
    if eta.coeff(1).is_zero() {
        return Err(ConjugationError::EtaNotInvertible);
    }
    let phi_trunc = n.saturating_sub(sigma.value + 1);
    let phi = if sigma.through_truncation {
        Series1::zero(0)
    } else {
        let p = sigma.value + 1;
        let eta_inv = eta.reverse()?;
        let ratio = eta_inv.shift_down(1)?.with_trunc(n);
        let a3 = psi.map.second().restrict_w0().shift_down(p)?.with_trunc(n);
        let composed = a3.compose(&eta_inv)?;
        ratio.pow(p).checked_mul(&composed)?.with_trunc(phi_trunc)
    };
    let mut lift = Ts2::zero(n);
    if !sigma.through_truncation {
        for (i, c) in phi.coeffs().iter().enumerate() {
            lift.add_term(i as u32 + sigma.value + 1, 0, c);
        }
    }
    let big_phi = Map2::new(Ts2::z(n), &Ts2::w(n) + &lift)?;
    let big_phi_inv = Map2::new(Ts2::z(n), &Ts2::w(n) - &lift)?;
    let chi = big_phi_inv.compose(&psi.map)?;
    Ok(PhiChi { sigma, phi, big_phi: Biholo { map: big_phi }, chi: Biholo { map: chi } })
}

/// `Ψ⁻¹ ∘ f ∘ Ψ`.
pub fn conjugate(f: &Germ, psi: &Biholo) -> Result<Germ, ConjugationError> {
    let inv = psi.inverse()?;
    let g = inv.map.compose(&f.map().compose(&psi.map)?)?;
    Ok(Germ::truncated(g)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Invariants {
    pub k: u32,
    pub t: Option<u32>,
    pub r: Option<u32>,
    pub s: SDegree,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantCheck {
    pub name: &'static str,
    /// The sufficient condition for invariance holds, so equality is asserted.
    pub asserted: bool,
    pub before: String,
    pub after: String,
    pub equal: bool,
}

#[derive(Clone, Debug)]
pub struct PropCReport {
    pub sigma: Sigma,
    pub before: Invariants,
    /// `None` when `[1:0]` is no longer characteristic for the conjugate.
    pub after: Option<Invariants>,
    pub checks: Vec<InvariantCheck>,
    pub violations: Vec<String>,
}

impl PropCReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn invariants(f: &Germ) -> Result<Invariants, GermError> {
    let rep = classify_at_e1(f)?;
    Ok(Invariants { k: rep.k, t: rep.t, r: rep.r, s: rep.s })
}

fn opt(x: Option<u32>) -> String {
    x.map_or("none".to_string(), |v| v.to_string())
}

/// Conjugates `f` by `Ψ` and compares `(k, t, r, s)` against the thresholds
/// `σ > t − k`, `σ > r − k` and `σ > max{s − t, (s − k)/2}`.
pub fn prop_c_report(f: &Germ, psi: &Biholo) -> Result<PropCReport, ConjugationError> {
    let sigma = sigma_at_e1(psi);
    let before = invariants(f)?;
    let (Some(t), Some(r)) = (before.t, before.r) else {
        return Err(GermError::DirectorUndefined("conjugation report needs t and r").into());
    };
    let k = before.k;
    let g = conjugate(f, psi)?;
    let after = match invariants(&g) {
        Ok(inv) => Some(inv),
        Err(GermError::NotCharacteristic) => None,
        Err(e) => return Err(e.into()),
    };
    let all = sigma.through_truncation;
    let sv = sigma.value;
    let t_ok = all || sv + k > t;
    let r_ok = all || sv + k > r;
    let s_ok = all
        || match before.s.finite() {
            Some(s) => sv + t > s && 2 * sv + k > s,
            None => false,
        };
    let mut checks = vec![InvariantCheck {
        name: "k",
        asserted: true,
        before: k.to_string(),
        after: after.map_or("-".into(), |a| a.k.to_string()),
        equal: after.is_some_and(|a| a.k == k),
    }];
    checks.push(InvariantCheck {
        name: "t",
        asserted: t_ok,
        before: opt(before.t),
        after: after.map_or("-".into(), |a| opt(a.t)),
        equal: after.is_some_and(|a| a.t == before.t),
    });
    checks.push(InvariantCheck {
        name: "r",
        asserted: r_ok,
        before: opt(before.r),
        after: after.map_or("-".into(), |a| opt(a.r)),
        equal: after.is_some_and(|a| a.r == before.r),
    });
    checks.push(InvariantCheck {
        name: "s",
        asserted: s_ok,
        before: before.s.to_string(),
        after: after.map_or("-".into(), |a| a.s.to_string()),
        equal: after.is_some_and(|a| a.s.same_degree(before.s)),
    });
    let violations = checks
        .iter()
        .filter(|c| c.asserted && !c.equal)
        .map(|c| format!("{} changed from {} to {} with sigma = {sigma}", c.name, c.before, c.after))
        .collect();
    Ok(PropCReport { sigma, before, after, checks, violations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    fn map(n: u32, a: &[(&str, u32, u32)], b: &[(&str, u32, u32)]) -> Map2 {
        let mut f1 = Ts2::zero(n);
        let mut f2 = Ts2::zero(n);
        for (c, i, j) in a {
            f1.add_term(*i, *j, &sc(c));
        }
        for (c, i, j) in b {
            f2.add_term(*i, *j, &sc(c));
        }
        Map2::new(f1, f2).unwrap()
    }

    fn biholo(n: u32, a: &[(&str, u32, u32)], b: &[(&str, u32, u32)]) -> Biholo {
        Biholo::new(map(n, a, b)).unwrap()
    }

    fn germ(a: &[(&str, u32, u32)], b: &[(&str, u32, u32)]) -> Germ {
        let mut a = a.to_vec();
        a.push(("1", 1, 0));
        let mut b = b.to_vec();
        b.push(("1", 0, 1));
        Germ::polynomial(map(10, &a, &b)).unwrap()
    }

    #[test]
    fn sigma_examples() {
        let e1 = Direction::e1();
        let psi = biholo(8, &[("1", 1, 0)], &[("1", 0, 1), ("1", 3, 0)]);
        assert_eq!(fixes_up_to(&psi, &e1).unwrap(), Sigma { value: 2, through_truncation: false });
        let line = biholo(8, &[("1", 1, 0), ("1", 0, 2)], &[("1", 0, 1), ("1", 1, 1)]);
        assert_eq!(fixes_up_to(&line, &e1).unwrap(), Sigma { value: 8, through_truncation: true });
        let psi = biholo(8, &[("1", 1, 0), ("1", 2, 0)], &[("1", 0, 1), ("1", 3, 0)]);
        assert_eq!(fixes_up_to(&psi, &e1).unwrap().value, 2);
        assert_eq!(fixes_up_to(&psi.inverse().unwrap(), &e1).unwrap().value, 2);
        // along [0:1]: (z + w^3, w) fixes the w-axis up through 2
        let v = biholo(8, &[("1", 1, 0), ("1", 0, 3)], &[("1", 0, 1)]);
        assert_eq!(fixes_up_to(&v, &Direction::e2()).unwrap().value, 2);
    }

    #[test]
    fn phi_chi_examples() {
        let psi = biholo(8, &[("1", 1, 0)], &[("1", 0, 1), ("1", 2, 0)]);
        let d = phi_chi_decompose(&psi).unwrap();
        assert_eq!(d.sigma.value, 1);
        assert_eq!(d.phi, Series1::constant(6, Scalar::one()));
        assert_eq!(d.big_phi.map(), psi.map());
        assert_eq!(*d.chi.map(), Map2::identity(8));

        let psi = biholo(8, &[("1", 1, 0), ("1", 2, 0)], &[("1", 0, 1), ("1", 3, 0)]);
        let d = phi_chi_decompose(&psi).unwrap();
        assert_eq!(d.sigma.value, 2);
        assert_eq!(d.phi.coeff(0), &sc("1"));
        assert_eq!(d.phi.coeff(1), &sc("-3"));
        assert_eq!(d.phi.coeff(2), &sc("9"));
        assert!(d.chi.map().second().restrict_w0().is_zero());
        assert_eq!(d.big_phi.map().compose(d.chi.map()).unwrap(), *psi.map());

        let psi = biholo(8, &[("2", 1, 0)], &[("1", 0, 1), ("1", 3, 0)]);
        let d = phi_chi_decompose(&psi).unwrap();
        assert_eq!(d.phi, Series1::constant(5, sc("1/8")));

        let bad = biholo(8, &[("1", 0, 1)], &[("1", 1, 0)]);
        assert_eq!(phi_chi_decompose(&bad).unwrap_err(), ConjugationError::EtaNotInvertible);
    }

    #[test]
    fn conjugation_group_action() {
        let f = germ(&[("1", 1, 1), ("-1/2", 3, 0)], &[("-1", 1, 1)]);
        let id = Biholo::identity(10);
        assert_eq!(conjugate(&f, &id).unwrap().map(), f.map());
        let psi = biholo(10, &[("1", 1, 0), ("2", 2, 0), ("1", 1, 1)], &[("1", 0, 1), ("1", 1, 1), ("3", 3, 0)]);
        let g = conjugate(&f, &psi).unwrap();
        let back = conjugate(&g, &psi.inverse().unwrap()).unwrap();
        assert_eq!(back.map(), f.map());
    }

    #[test]
    fn chi_type_conjugation_keeps_degrees() {
        let f = germ(&[("1", 1, 1), ("-1/2", 3, 0)], &[("-1", 1, 1)]);
        let psi = biholo(10, &[("1", 1, 0)], &[("1", 0, 1), ("1", 1, 1)]);
        let rep = prop_c_report(&f, &psi).unwrap();
        assert!(rep.sigma.through_truncation);
        assert!(rep.ok(), "{:?}", rep.violations);
        assert!(rep.checks.iter().all(|c| c.asserted && c.equal));
    }

    #[test]
    fn prop_c_family_examples() {
        let f = germ(&[("-1/2", 3, 0)], &[("-3", 2, 1), ("1", 0, 2), ("1", 5, 0)]);
        let psi = biholo(10, &[("1", 1, 0)], &[("1", 0, 1), ("1", 4, 0)]);
        let rep = prop_c_report(&f, &psi).unwrap();
        assert_eq!(rep.sigma.value, 3);
        assert!(rep.checks.iter().all(|c| c.asserted && c.equal), "{:?}", rep.checks);

        let psi = biholo(10, &[("1", 1, 0)], &[("1", 0, 1), ("1", 3, 0)]);
        let rep = prop_c_report(&f, &psi).unwrap();
        assert_eq!(rep.sigma.value, 2);
        let by_name = |n: &str| rep.checks.iter().find(|c| c.name == n).unwrap().clone();
        assert!(by_name("t").asserted && by_name("t").equal);
        assert!(by_name("r").asserted && by_name("r").equal);
        assert!(!by_name("s").asserted);
        assert!(rep.ok());
    }
}
