//! Self-maps of `(C², 0)` as pairs of truncated series.

use std::fmt;

use super::hp::HpComplex;
use super::scalar::Scalar;
use super::series::Ts2;
use super::TpsError;

/// A 2×2 matrix acting as `(z, w) ↦ (m[0][0] z + m[0][1] w, m[1][0] z + m[1][1] w)`.
pub type Linear = [[Scalar; 2]; 2];

#[derive(Clone, PartialEq, Eq)]
pub struct Map2 {
    first: Ts2,
    second: Ts2,
}

impl Map2 {
    pub fn new(first: Ts2, second: Ts2) -> Result<Self, TpsError> {
        if first.trunc() != second.trunc() {
            return Err(TpsError::TruncationMismatch(first.trunc(), second.trunc()));
        }
        Ok(Map2 { first, second })
    }

    pub fn identity(trunc: u32) -> Self {
        Map2 { first: Ts2::z(trunc), second: Ts2::w(trunc) }
    }

    pub fn linear(trunc: u32, m: &Linear) -> Self {
        let row = |r: &[Scalar; 2]| {
            let mut s = Ts2::zero(trunc);
            s.add_term(1, 0, &r[0]);
            s.add_term(0, 1, &r[1]);
            s
        };
        Map2 { first: row(&m[0]), second: row(&m[1]) }
    }

    pub fn first(&self) -> &Ts2 {
        &self.first
    }

    pub fn second(&self) -> &Ts2 {
        &self.second
    }

    pub fn into_parts(self) -> (Ts2, Ts2) {
        (self.first, self.second)
    }

    pub fn trunc(&self) -> u32 {
        self.first.trunc()
    }

    pub fn with_trunc(&self, trunc: u32) -> Self {
        Map2 { first: self.first.with_trunc(trunc), second: self.second.with_trunc(trunc) }
    }

    /// `P_j = (p_j, q_j)`, the homogeneous degree-`j` part of each component.
    pub fn homogeneous_part(&self, j: u32) -> Result<(Ts2, Ts2), TpsError> {
        if j == 0 || j > self.trunc() {
            return Err(TpsError::DegreeOutOfRange { j, n: self.trunc() });
        }
        Ok((self.first.degree_part(j), self.second.degree_part(j)))
    }

    pub fn linear_part(&self) -> Linear {
        [
            [self.first.coeff(1, 0), self.first.coeff(0, 1)],
            [self.second.coeff(1, 0), self.second.coeff(0, 1)],
        ]
    }

    pub fn has_zero_constant(&self) -> bool {
        self.first.coeff(0, 0).is_zero() && self.second.coeff(0, 0).is_zero()
    }

    pub fn is_tangent_to_identity(&self) -> bool {
        let l = self.linear_part();
        self.has_zero_constant()
            && l[0][0].is_one()
            && l[0][1].is_zero()
            && l[1][0].is_zero()
            && l[1][1].is_one()
    }

    /// `self − Id`.
    pub fn minus_identity(&self) -> (Ts2, Ts2) {
        let n = self.trunc();
        (&self.first - &Ts2::z(n), &self.second - &Ts2::w(n))
    }

    /// Lowest degree `j ≥ 2` with `P_j ≠ 0`, for a tangent-to-identity map.
    pub fn order(&self) -> Option<u32> {
        let (a, b) = self.minus_identity();
        match (a.valuation(), b.valuation()) {
            (None, None) => None,
            (Some(x), None) | (None, Some(x)) => Some(x),
            (Some(x), Some(y)) => Some(x.min(y)),
        }
    }

    /// `self ∘ g`, truncated; `g` must fix the origin.
    pub fn compose(&self, g: &Map2) -> Result<Map2, TpsError> {
        if self.trunc() != g.trunc() {
            return Err(TpsError::TruncationMismatch(self.trunc(), g.trunc()));
        }
        if !g.has_zero_constant() {
            return Err(TpsError::NonzeroConstant);
        }
        Ok(Map2 {
            first: self.first.compose(&g.first, &g.second)?,
            second: self.second.compose(&g.first, &g.second)?,
        })
    }

    /// Compositional inverse of a map tangent to the identity.
    ///
    /// With `f = Id + A` and `f⁻¹ = Id + B`, the identity `f ∘ f⁻¹ = Id` reads
    /// `B = −A(Id + B)`. If `A` has order `τ` and `B` is exact through degree `c`,
    /// the right-hand side is exact through degree `c + τ − 1`, so each pass only
    /// needs that truncation.
    pub fn invert_tangent(&self) -> Result<Map2, TpsError> {
        if !self.is_tangent_to_identity() {
            return Err(TpsError::NotTangentToIdentity);
        }
        let n = self.trunc();
        let Some(tau) = self.order() else {
            return Ok(self.clone());
        };
        let (a1, a2) = self.minus_identity();
        let mut b = (Ts2::zero(n), Ts2::zero(n));
        let mut exact = tau - 1;
        while exact < n {
            let m = (exact + tau - 1).min(n);
            let g1 = &Ts2::z(m) + &b.0.with_trunc(m);
            let g2 = &Ts2::w(m) + &b.1.with_trunc(m);
            let next1 = -&a1.with_trunc(m).compose(&g1, &g2)?;
            let next2 = -&a2.with_trunc(m).compose(&g1, &g2)?;
            b = (next1.with_trunc(n), next2.with_trunc(n));
            exact = m;
        }
        Ok(Map2 { first: &Ts2::z(n) + &b.0, second: &Ts2::w(n) + &b.1 })
    }

    /// Inverse of any map fixing the origin with invertible linear part:
    /// `Ψ⁻¹ = (L⁻¹ ∘ Ψ)⁻¹ ∘ L⁻¹` with the middle factor tangent to the identity.
    pub fn invert(&self) -> Result<Map2, TpsError> {
        if !self.has_zero_constant() {
            return Err(TpsError::NonzeroConstant);
        }
        if self.is_tangent_to_identity() {
            return self.invert_tangent();
        }
        let n = self.trunc();
        let l_inv = Map2::linear(n, &linear_inverse(&self.linear_part())?);
        let tangent = l_inv.compose(self)?;
        tangent.invert_tangent()?.compose(&l_inv)
    }

    /// Conjugation `L⁻¹ ∘ self ∘ L` by an invertible linear map.
    pub fn conjugate_linear(&self, l: &Linear) -> Result<Map2, TpsError> {
        let n = self.trunc();
        let l_map = Map2::linear(n, l);
        let l_inv = Map2::linear(n, &linear_inverse(l)?);
        l_inv.compose(&self.compose(&l_map)?)
    }

    pub fn eval_hp(&self, z: &HpComplex, w: &HpComplex) -> Result<(HpComplex, HpComplex), TpsError> {
        Ok((self.first.eval_hp(z, w)?, self.second.eval_hp(z, w)?))
    }
}

pub fn linear_inverse(m: &Linear) -> Result<Linear, TpsError> {
    let det = &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]);
    let inv = det.recip().ok_or(TpsError::NotInvertible("singular linear part"))?;
    Ok([
        [&m[1][1] * &inv, -(&m[0][1] * &inv)],
        [-(&m[1][0] * &inv), &m[0][0] * &inv],
    ])
}

impl fmt::Debug for Map2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Map2(\n  {:?},\n  {:?}\n)", self.first, self.second)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(n, d)
    }

    fn map(n: u32, first: &[(u32, u32, Scalar)], second: &[(u32, u32, Scalar)]) -> Map2 {
        let f = Ts2::from_terms(n, first.iter().map(|(i, j, c)| (*i, *j, c)));
        let s = Ts2::from_terms(n, second.iter().map(|(i, j, c)| (*i, *j, c)));
        Map2::new(f, s).unwrap()
    }

    #[test]
    fn homogeneous_parts() {
        let n = 6;
        let f = map(n, &[(1, 0, q(1, 1)), (0, 2, q(1, 1))], &[(0, 1, q(1, 1))]);
        let (p2, q2) = f.homogeneous_part(2).unwrap();
        assert_eq!(p2, Ts2::w(n).pow(2));
        assert!(q2.is_zero());
        let id = Map2::identity(n);
        let (a, b) = id.homogeneous_part(2).unwrap();
        assert!(a.is_zero() && b.is_zero());
        let g = map(
            n,
            &[(1, 0, q(1, 1)), (1, 1, q(1, 1)), (3, 0, q(-1, 2))],
            &[(0, 1, q(1, 1)), (1, 1, q(-1, 1))],
        );
        let (p3, q3) = g.homogeneous_part(3).unwrap();
        assert_eq!(p3, Ts2::monomial(n, 3, 0, q(-1, 2)));
        assert!(q3.is_zero());
        assert!(matches!(g.homogeneous_part(0), Err(TpsError::DegreeOutOfRange { .. })));
        assert!(matches!(g.homogeneous_part(7), Err(TpsError::DegreeOutOfRange { .. })));
    }

    #[test]
    fn compose_identity_and_disjoint() {
        let n = 5;
        let f = map(n, &[(1, 0, q(1, 1)), (2, 0, q(1, 1))], &[(0, 1, q(1, 1))]);
        assert_eq!(f.compose(&Map2::identity(n)).unwrap(), f);
        let g = map(n, &[(1, 0, q(1, 1))], &[(0, 1, q(1, 1)), (2, 0, q(1, 1))]);
        let fg = f.compose(&g).unwrap();
        let expect = map(n, &[(1, 0, q(1, 1)), (2, 0, q(1, 1))], &[(0, 1, q(1, 1)), (2, 0, q(1, 1))]);
        assert_eq!(fg, expect);
    }

    #[test]
    fn compose_rejects_constant_term() {
        let n = 3;
        let shifted = map(n, &[(0, 0, q(1, 1)), (1, 0, q(1, 1))], &[(0, 1, q(1, 1))]);
        assert!(matches!(Map2::identity(n).compose(&shifted), Err(TpsError::NonzeroConstant)));
    }

    #[test]
    fn inverse_round_trip() {
        let n = 6;
        let psi = map(n, &[(1, 0, q(1, 1)), (2, 0, q(1, 1))], &[(0, 1, q(1, 1)), (3, 0, q(1, 1))]);
        let inv = psi.invert().unwrap();
        assert_eq!(psi.compose(&inv).unwrap(), Map2::identity(n));
        assert_eq!(inv.compose(&psi).unwrap(), Map2::identity(n));
    }

    #[test]
    fn inverse_quadratic_example() {
        // Ψ = Id + (z², zw): Ψ⁻¹ = (z − z² + 2z³, w − zw + 2z²w) + O(4)
        let n = 3;
        let psi = map(n, &[(1, 0, q(1, 1)), (2, 0, q(1, 1))], &[(0, 1, q(1, 1)), (1, 1, q(1, 1))]);
        let inv = psi.invert_tangent().unwrap();
        let expect = map(
            n,
            &[(1, 0, q(1, 1)), (2, 0, q(-1, 1)), (3, 0, q(2, 1))],
            &[(0, 1, q(1, 1)), (1, 1, q(-1, 1)), (2, 1, q(2, 1))],
        );
        assert_eq!(inv, expect);
    }

    #[test]
    fn inverse_of_constructed_germ() {
        let n = 8;
        let f = map(
            n,
            &[(1, 0, q(1, 1)), (1, 1, q(1, 1)), (3, 0, q(-1, 2))],
            &[(0, 1, q(1, 1)), (1, 1, q(-1, 1))],
        );
        let inv = f.invert_tangent().unwrap();
        let (b1, b2) = inv.homogeneous_part(2).unwrap();
        assert_eq!(b1, Ts2::monomial(n, 1, 1, q(-1, 1)));
        assert_eq!(b2, Ts2::monomial(n, 1, 1, q(1, 1)));
    }

    #[test]
    fn non_tangent_rejected_by_tangent_inverse() {
        let n = 4;
        let f = Map2::linear(n, &[[q(2, 1), q(0, 1)], [q(0, 1), q(1, 1)]]);
        assert!(matches!(f.invert_tangent(), Err(TpsError::NotTangentToIdentity)));
        // but the general inverse handles it
        let inv = f.invert().unwrap();
        assert_eq!(inv.first().coeff(1, 0), q(1, 2));
        let singular = Map2::linear(n, &[[q(1, 1), q(1, 1)], [q(1, 1), q(1, 1)]]);
        assert!(matches!(singular.invert(), Err(TpsError::NotInvertible(_))));
    }

    #[test]
    fn linear_conjugation() {
        let n = 4;
        // f = (z + (z − w)², w); moving [1:1] to [1:0] gives (z + w², w − w²)
        let f = map(
            n,
            &[(1, 0, q(1, 1)), (2, 0, q(1, 1)), (1, 1, q(-2, 1)), (0, 2, q(1, 1))],
            &[(0, 1, q(1, 1))],
        );
        let l = [[q(1, 1), q(0, 1)], [q(1, 1), q(1, 1)]];
        let g = f.conjugate_linear(&l).unwrap();
        let expect = map(n, &[(1, 0, q(1, 1)), (0, 2, q(1, 1))], &[(0, 1, q(1, 1)), (0, 2, q(-1, 1))]);
        assert_eq!(g, expect);
    }
}
