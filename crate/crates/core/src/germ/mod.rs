//! Germs tangent to the identity at the origin of ℂ² and their classification
//! along a characteristic direction.

mod classify;
pub mod poly;

use std::fmt;

use rug::Float;
use thiserror::Error;

use crate::tps::{HpComplex, Map2, Scalar, TpsError, Ts2};

pub use classify::{
    abate_index, classify, classify_approx, classify_at_e1, classify_type, degree_r, degree_s, degree_t, director,
    theorem_a_verdict, Attraction, Condition, DirType, Director, DirectionReport, SDegree, Verdict,
};
pub use poly::Root;

/// Precision used for numeric root finding and director branches.
pub const ROOT_PRECISION: u32 = 256;

/// Zero test for coefficients of germs moved along a numerically found direction.
pub const APPROX_ZERO_TOL: f64 = 1e-30;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GermError {
    #[error(transparent)]
    Tps(#[from] TpsError),
    #[error("order undefined at this truncation")]
    OrderUndefined,
    #[error("degree {j} outside {lo}..={hi}")]
    DegreeOutOfRange { j: u32, lo: u32, hi: u32 },
    #[error("not a characteristic direction")]
    NotCharacteristic,
    #[error("origin is dicritical: every direction is characteristic")]
    Dicritical,
    #[error("director undefined: {0}")]
    DirectorUndefined(&'static str),
    #[error("polynomial germ has a term of degree {0} above its truncation")]
    AboveTruncation(u32),
}

/// `f = Id + Σ_{j≥k+1} P_j`, tangent to the identity.
///
/// `complete` marks a polynomial germ given in full, for which `P_j = 0` beyond the
/// truncation is known rather than assumed.
#[derive(Clone, Debug, PartialEq)]
pub struct Germ {
    map: Map2,
    order: u32,
    complete: bool,
}

impl Germ {
    /// A polynomial germ: every term is present, higher `P_j` vanish.
    pub fn polynomial(map: Map2) -> Result<Germ, GermError> {
        Self::build(map, true)
    }

    /// The `N`-jet of a germ whose higher terms are unknown.
    pub fn truncated(map: Map2) -> Result<Germ, GermError> {
        Self::build(map, false)
    }

    fn build(map: Map2, complete: bool) -> Result<Germ, GermError> {
        if !map.is_tangent_to_identity() {
            return Err(TpsError::NotTangentToIdentity.into());
        }
        let order = map.order().ok_or(GermError::OrderUndefined)?;
        Ok(Germ { map, order, complete })
    }

    pub fn map(&self) -> &Map2 {
        &self.map
    }

    /// The order `k + 1`.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn k(&self) -> u32 {
        self.order - 1
    }

    pub fn trunc(&self) -> u32 {
        self.map.trunc()
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// Changes the truncation. Raising it is only meaningful for complete germs.
    pub fn with_trunc(&self, n: u32) -> Result<Germ, GermError> {
        if self.complete {
            let top = self.map.first().degree().into_iter().chain(self.map.second().degree()).max().unwrap_or(0);
            if top > n {
                return Err(GermError::AboveTruncation(top));
            }
        } else if n > self.trunc() {
            return Err(TpsError::TruncationMismatch(n, self.trunc()).into());
        }
        Germ::build(self.map.with_trunc(n), self.complete)
    }

    /// `f⁻¹`, known up to the truncation.
    pub fn inverse(&self) -> Result<Germ, GermError> {
        Germ::truncated(self.map.invert_tangent()?)
    }

    fn check_degree(&self, j: u32) -> Result<(), GermError> {
        if j < self.order || j > self.trunc() {
            return Err(GermError::DegreeOutOfRange { j, lo: self.order, hi: self.trunc() });
        }
        Ok(())
    }

    /// `P_j = (p_j, q_j)`.
    pub fn homogeneous(&self, j: u32) -> Result<(Ts2, Ts2), GermError> {
        self.check_degree(j)?;
        Ok(self.map.homogeneous_part(j)?)
    }

    /// `r_j = z q_j − w p_j`, homogeneous of degree `j + 1`. Stored with truncation
    /// `N + 1` so that `j = N` is representable.
    pub fn r_poly(&self, j: u32) -> Result<Ts2, GermError> {
        let (p, q) = self.homogeneous(j)?;
        let n = self.trunc() + 1;
        let zq = &Ts2::z(n) * &q.with_trunc(n);
        let wp = &Ts2::w(n) * &p.with_trunc(n);
        Ok(&zq - &wp)
    }

    /// Coefficients of `(p_j(1,u), q_j(1,u), r_j(1,u))`, lowest power first.
    pub fn dehomogenized(&self, j: u32) -> Result<[Vec<Scalar>; 3], GermError> {
        let (p, q) = self.homogeneous(j)?;
        let pd = p.dehomogenize(j);
        let qd = q.dehomogenize(j);
        let mut rd = vec![Scalar::zero(); j as usize + 2];
        for i in 0..=j as usize {
            rd[i] += &qd[i];
            rd[i + 1] -= &pd[i];
        }
        Ok([pd, qd, rd])
    }

    /// `(m_j, l_j, n_j)` at `[1:0]`.
    pub fn vanishing_orders(&self, j: u32) -> Result<VanishingOrders, GermError> {
        self.vanishing_orders_with(j, ZeroTest::Exact)
    }

    pub(crate) fn vanishing_orders_with(&self, j: u32, zt: ZeroTest) -> Result<VanishingOrders, GermError> {
        let [p, q, r] = self.dehomogenized(j)?;
        Ok(VanishingOrders { j, m: zt.valuation(&p), l: zt.valuation(&q), n: zt.valuation(&r) })
    }

    /// Characteristic directions of `P_j`: the projective zeros of `r_j`.
    pub fn char_directions(&self, j: u32) -> Result<CharDirections, GermError> {
        let [_, _, r] = self.dehomogenized(j)?;
        let Some(deg) = poly::degree(&r) else {
            return Ok(CharDirections { dicritical: true, directions: Vec::new() });
        };
        let mut directions = Vec::new();
        for (root, multiplicity) in poly::roots(&r, ROOT_PRECISION) {
            let point = match root {
                Root::Exact(u) => DirPoint::Exact(Direction::new(Scalar::one(), u)?),
                Root::Numeric { value, residual } => DirPoint::Approx { u: value, residual },
            };
            directions.push(CharDirection { point, multiplicity });
        }
        // r_j(1,u) has degree j+1 exactly when the w^{j+1} coefficient survives
        let at_infinity = j + 1 - deg as u32;
        if at_infinity > 0 {
            directions.push(CharDirection {
                point: DirPoint::Exact(Direction::new(Scalar::zero(), Scalar::one())?),
                multiplicity: at_infinity,
            });
        }
        Ok(CharDirections { dicritical: false, directions })
    }

    /// Exact substitution `r_j(a, b)`.
    pub fn r_at(&self, j: u32, v: &Direction) -> Result<Scalar, GermError> {
        let r = self.r_poly(j)?;
        let mut acc = Scalar::zero();
        for (m, c) in r.terms() {
            acc += &(&(c * &v.a.pow(m.z)) * &v.b.pow(m.w));
        }
        Ok(acc)
    }
}

/// Exact zero test, or `|c| < tol` for germs moved along an approximate direction.
#[derive(Clone, Copy, Debug)]
pub(crate) enum ZeroTest {
    Exact,
    Tolerance(f64),
}

impl ZeroTest {
    pub(crate) fn is_zero(self, c: &Scalar) -> bool {
        match self {
            ZeroTest::Exact => c.is_zero(),
            ZeroTest::Tolerance(tol) => {
                let n = Float::with_val(128, c.norm_sqr());
                n < tol * tol
            }
        }
    }

    pub(crate) fn valuation(self, p: &[Scalar]) -> Option<u32> {
        p.iter().position(|c| !self.is_zero(c)).map(|i| i as u32)
    }
}

/// Projective direction `[a:b]`, stored as `[1 : b/a]` or `[0 : 1]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Direction {
    a: Scalar,
    b: Scalar,
}

impl Direction {
    pub fn new(a: Scalar, b: Scalar) -> Result<Direction, GermError> {
        if a.is_zero() {
            if b.is_zero() {
                return Err(TpsError::NotInvertible("[0:0] is not a direction").into());
            }
            return Ok(Direction { a, b: Scalar::one() });
        }
        let b = &b / &a;
        Ok(Direction { a: Scalar::one(), b })
    }

    pub fn e1() -> Direction {
        Direction { a: Scalar::one(), b: Scalar::zero() }
    }

    pub fn e2() -> Direction {
        Direction { a: Scalar::zero(), b: Scalar::one() }
    }

    pub fn a(&self) -> &Scalar {
        &self.a
    }

    pub fn b(&self) -> &Scalar {
        &self.b
    }

    pub fn is_e1(&self) -> bool {
        *self == Direction::e1()
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}]", self.a, self.b)
    }
}

impl fmt::Debug for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl std::str::FromStr for Direction {
    type Err = GermError;

    /// `a:b` or `[a:b]` with scalar entries.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let body = s.trim().trim_start_matches('[').trim_end_matches(']');
        let (a, b) = body
            .split_once(':')
            .ok_or_else(|| GermError::Tps(TpsError::BadScalar(s.to_string())))?;
        Direction::new(a.parse()?, b.parse()?)
    }
}

/// A characteristic direction as found: exact in ℚ(i), or `[1:u]` numerically.
#[derive(Clone, Debug)]
pub enum DirPoint {
    Exact(Direction),
    Approx { u: HpComplex, residual: Float },
}

#[derive(Clone, Debug)]
pub struct CharDirection {
    pub point: DirPoint,
    pub multiplicity: u32,
}

#[derive(Clone, Debug)]
pub struct CharDirections {
    pub dicritical: bool,
    pub directions: Vec<CharDirection>,
}

/// Orders of vanishing at `u = 0` of `p_j(1,u)`, `q_j(1,u)`, `r_j(1,u)`; `None` is ∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VanishingOrders {
    pub j: u32,
    pub m: Option<u32>,
    pub l: Option<u32>,
    pub n: Option<u32>,
}

/// Renders an order of vanishing, `∞` for `None`.
pub fn fmt_order(o: Option<u32>) -> String {
    o.map_or_else(|| "inf".to_string(), |v| v.to_string())
}
