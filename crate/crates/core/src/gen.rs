//! Seeded random germs and biholomorphisms with prescribed structure, plus the
//! closed-form low-degree inverse of a map tangent to the identity.

use rand::Rng;

use crate::conjugation::Biholo;
use crate::germ::Germ;
use crate::tps::{Map2, Scalar, TpsError, Ts2};

/// A Gaussian rational with numerators in `[−9, 9]` and denominators in `[1, 6]`.
/// A quarter are real, none are zero.
pub fn scalar<R: Rng>(rng: &mut R) -> Scalar {
    loop {
        let re = Scalar::from_ratio(rng.gen_range(-9..=9), rng.gen_range(1..=6));
        let s = if rng.gen_bool(0.25) {
            re
        } else {
            &re + &(&Scalar::from_ratio(rng.gen_range(-9..=9), rng.gen_range(1..=6)) * &Scalar::i())
        };
        if !s.is_zero() {
            return s;
        }
    }
}

fn sprinkle<R: Rng>(rng: &mut R, s: &mut Ts2, density: f64, keep: impl Fn(u32, u32) -> bool) {
    let n = s.trunc();
    for d in 0..=n {
        for j in 0..=d {
            if keep(d - j, j) && rng.gen_bool(density) {
                s.add_term(d - j, j, &scalar(rng));
            }
        }
    }
}

/// `Id + Σ_{j ≥ τ} A_j` at truncation `n` with `A_τ ≠ 0`.
pub fn tangent_map<R: Rng>(rng: &mut R, n: u32, tau: u32, density: f64) -> Map2 {
    assert!(tau >= 2 && tau <= n);
    let mut f1 = Ts2::z(n);
    let mut f2 = Ts2::w(n);
    sprinkle(rng, &mut f1, density, |i, j| i + j >= tau);
    sprinkle(rng, &mut f2, density, |i, j| i + j >= tau);
    let j = rng.gen_range(0..=tau);
    if rng.gen_bool(0.5) {
        f1.add_term(tau - j, j, &scalar(rng));
    } else {
        f2.add_term(tau - j, j, &scalar(rng));
    }
    let f = Map2::new(f1, f2).expect("same truncation");
    if f.order() == Some(tau) {
        f
    } else {
        // the forced term cancelled one already present
        tangent_map(rng, n, tau, density)
    }
}

/// The degree-`≤ 2τ−1` part of `Ψ⁻¹` by the closed forms
/// `B_j = −A_j` for `j ≤ 2(τ−1)` and `B_{2τ−1} = −A_{2τ−1} + Σ_l A_τ^l ∂A_τ/∂z^l`.
pub fn inverse_low_degree(psi: &Map2) -> Result<Map2, TpsError> {
    let tau = psi.order().ok_or(TpsError::NotTangentToIdentity)?;
    let n = psi.trunc();
    let top = (2 * tau - 1).min(n);
    let (a1, a2) = psi.minus_identity();
    let mut b1 = Ts2::z(n);
    let mut b2 = Ts2::w(n);
    for j in tau..=top {
        b1 = b1.checked_sub(&a1.degree_part(j))?;
        b2 = b2.checked_sub(&a2.degree_part(j))?;
    }
    if 2 * tau - 1 <= n {
        let (t1, t2) = (a1.degree_part(tau), a2.degree_part(tau));
        let corr = |c: &Ts2| -> Result<Ts2, TpsError> { t1.checked_mul(&c.d_dz())?.checked_add(&t2.checked_mul(&c.d_dw())?) };
        b1 = b1.checked_add(&corr(&t1)?)?;
        b2 = b2.checked_add(&corr(&t2)?)?;
    }
    Map2::new(b1, b2)
}

/// A biholomorphism with linear part `[[a₁, b₁], [0, a₂]]` whose second coordinate on
/// `{w = 0}` starts exactly at `z^{σ+1}`; `sigma ≥ n` leaves that line empty.
pub fn psi_fixing<R: Rng>(rng: &mut R, n: u32, sigma: u32, density: f64) -> Biholo {
    let mut f1 = Ts2::zero(n);
    let mut f2 = Ts2::zero(n);
    f1.add_term(1, 0, &scalar(rng));
    if rng.gen_bool(0.5) {
        f1.add_term(0, 1, &scalar(rng));
    }
    f2.add_term(0, 1, &scalar(rng));
    sprinkle(rng, &mut f1, density, |i, j| i + j >= 2);
    sprinkle(rng, &mut f2, density, |i, j| i + j >= 2 && (j >= 1 || i > sigma + 1));
    if sigma < n {
        f2.add_term(sigma + 1, 0, &scalar(rng));
    }
    Biholo::new(Map2::new(f1, f2).expect("same truncation")).expect("invertible linear part")
}

/// Target degrees for [`germ_with_degrees`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Degrees {
    pub k: u32,
    pub t: u32,
    pub r: u32,
    /// `None` leaves `{w = 0}` invariant.
    pub s: Option<u32>,
}

/// Random admissible degrees with `k < r < s ≤ n − 1` and `k ≤ t ≤ r`.
pub fn degrees<R: Rng>(rng: &mut R, n: u32) -> Degrees {
    let k = rng.gen_range(1..=2);
    let r = rng.gen_range(k + 1..=(k + 3).min(n - 3));
    let t = rng.gen_range(k..=r);
    let s = rng.gen_range(r + 1..=n - 1);
    Degrees { k, t, r, s: Some(s) }
}

/// A polynomial germ with `[1:0]` characteristic of the given degrees:
///
/// `f = (z + a z^{r+1} + …  + w·U, w + b z^t w + … + c z^{s+1} + … + w²·V)`
/// where `U` and `V` have order `≥ k` and `≥ k − 1` and every omitted term is higher.
pub fn germ_with_degrees<R: Rng>(rng: &mut R, n: u32, d: Degrees, density: f64) -> Germ {
    let Degrees { k, t, r, s } = d;
    assert!(k < r && k <= t && t <= r && r < n);
    let mut f1 = Ts2::z(n);
    let mut f2 = Ts2::w(n);
    f1.add_term(r + 1, 0, &scalar(rng));
    f2.add_term(t, 1, &scalar(rng));
    sprinkle(rng, &mut f1, density, |i, j| (j == 0 && i > r + 1) || (j >= 1 && i + j > k));
    sprinkle(rng, &mut f2, density, |i, j| (j == 1 && i > t) || (j >= 2 && i + j > k));
    if let Some(s) = s {
        assert!(s > r && s < n);
        f2.add_term(s + 1, 0, &scalar(rng));
        sprinkle(rng, &mut f2, density, |i, j| j == 0 && i > s + 1);
    }
    if t > k {
        // a term of degree k + 1 off the line fixes the order
        let j = rng.gen_range(1..=k + 1);
        f1.add_term(k + 1 - j, j, &scalar(rng));
    }
    let g = Germ::polynomial(Map2::new(f1, f2).expect("same truncation")).expect("tangent to the identity");
    if g.k() == k {
        g
    } else {
        germ_with_degrees(rng, n, d, density)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::germ::classify_at_e1;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn closed_form_worked_case() {
        let n = 6;
        let mut p1 = Ts2::z(n);
        p1.add_term(2, 0, &Scalar::one());
        let mut p2 = Ts2::w(n);
        p2.add_term(1, 1, &Scalar::one());
        let low = inverse_low_degree(&Map2::new(p1, p2).unwrap()).unwrap();
        assert_eq!(low.first().degree_part(3).coeff(3, 0), Scalar::from_int(2));
        assert_eq!(low.second().degree_part(3).coeff(2, 1), Scalar::from_int(2));
        assert_eq!(low.second().degree_part(3).len(), 1);
    }

    #[test]
    fn germs_have_requested_degrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let d = degrees(&mut rng, 10);
            let g = germ_with_degrees(&mut rng, 10, d, 0.3);
            let rep = classify_at_e1(&g).unwrap();
            assert_eq!((rep.k, rep.t, rep.r, rep.s.finite()), (d.k, Some(d.t), Some(d.r), d.s), "{d:?}");
        }
    }

    #[test]
    fn psi_sigma_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for sigma in 1..12 {
            let psi = psi_fixing(&mut rng, 10, sigma, 0.3);
            let v = psi.map().second().restrict_w0().valuation();
            assert_eq!(v, (sigma < 10).then_some(sigma + 1));
        }
    }
}
