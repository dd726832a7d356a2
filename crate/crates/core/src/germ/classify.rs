//! Degrees `s, r, t`, direction type, Abate's index, director and the
//! attracting-domain verdict, all read at `[1:0]`.

use std::cmp::Ordering;
use std::fmt;

use rug::{Float, Integer};

use super::{Direction, Germ, GermError, VanishingOrders, ZeroTest, APPROX_ZERO_TOL, ROOT_PRECISION};
use crate::normalform::move_to_e1;
use crate::tps::{HpComplex, Scalar};

/// Degree `s` of the characteristic direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SDegree {
    Finite(u32),
    /// `[1:0]` is characteristic through the truncation `n`. With `polynomial_exact`
    /// the germ is a polynomial given in full, so `s = ∞` is decided.
    ThroughTruncation { n: u32, polynomial_exact: bool },
}

impl SDegree {
    pub fn finite(self) -> Option<u32> {
        match self {
            SDegree::Finite(s) => Some(s),
            SDegree::ThroughTruncation { .. } => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, SDegree::ThroughTruncation { polynomial_exact: true, .. })
    }

    /// Whether `s > x`, `None` when the truncation hides the answer.
    pub fn exceeds(self, x: u32) -> Option<bool> {
        match self {
            SDegree::Finite(s) => Some(s > x),
            SDegree::ThroughTruncation { polynomial_exact: true, .. } => Some(true),
            SDegree::ThroughTruncation { n, .. } => (n > x).then_some(true),
        }
    }

    /// Same degree, ignoring how a truncated one was established.
    pub fn same_degree(self, other: SDegree) -> bool {
        match (self, other) {
            (SDegree::Finite(a), SDegree::Finite(b)) => a == b,
            (SDegree::ThroughTruncation { n: a, .. }, SDegree::ThroughTruncation { n: b, .. }) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for SDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SDegree::Finite(s) => write!(f, "{s}"),
            SDegree::ThroughTruncation { polynomial_exact: true, .. } => write!(f, "inf"),
            SDegree::ThroughTruncation { n, .. } => write!(f, ">={n}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DirType {
    Fuchsian,
    Irregular,
    Apparent,
    Dicritical,
}

impl fmt::Display for DirType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DirType::Fuchsian => "fuchsian",
            DirType::Irregular => "irregular",
            DirType::Apparent => "apparent",
            DirType::Dicritical => "dicritical",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Attraction {
    Yes,
    No,
    Undetermined,
}

impl fmt::Display for Attraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Attraction::Yes => "yes",
            Attraction::No => "no",
            Attraction::Undetermined => "undetermined",
        })
    }
}

/// Hypotheses of the attracting-domain theorem, in the order they are checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    SAboveR,
    RBetweenKAndS,
    TBetweenKAndR,
    TransversallyAttracting,
    SAboveRPlusTMinusK,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::SAboveR => "s > r",
            Condition::RBetweenKAndS => "k < r < s",
            Condition::TBetweenKAndR => "k <= t <= r",
            Condition::TransversallyAttracting => "Re Delta > 0",
            Condition::SAboveRPlusTMinusK => "s > r + t - k",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// `s_through_truncation`: `s` was only seen up to the truncation (large enough).
    Applies { s_through_truncation: bool },
    Fails { condition: Condition, reason: String },
    TruncationLimited { reason: String },
}

impl Verdict {
    pub fn applies(&self) -> bool {
        matches!(self, Verdict::Applies { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Applies { s_through_truncation: false } => write!(f, "applies"),
            Verdict::Applies { s_through_truncation: true } => write!(f, "applies (s holds through truncation)"),
            Verdict::Fails { condition, reason } => write!(f, "fails {condition}: {reason}"),
            Verdict::TruncationLimited { reason } => write!(f, "truncation-limited: {reason}"),
        }
    }
}

/// Director `Δ` with the branch data behind it.
#[derive(Clone, Debug)]
pub struct Director {
    /// Exact value when it is single-valued (`t = r`).
    pub exact: Option<Scalar>,
    pub value: HpComplex,
    /// Distinct values over all choices of the `r`-th root, by branch index.
    pub branches: Vec<HpComplex>,
    /// The root `a₁` of `a·a₁^r = −1/r` realizing `value`.
    pub a1: HpComplex,
    pub attraction: Attraction,
}

#[derive(Clone, Debug)]
pub struct DirectionReport {
    pub direction: Direction,
    /// Direction found numerically; zero tests used a tolerance.
    pub approximate: bool,
    pub k: u32,
    pub trunc: u32,
    pub orders: Vec<VanishingOrders>,
    pub dir_type: DirType,
    pub s: SDegree,
    pub r: Option<u32>,
    pub t: Option<u32>,
    /// `R(0)`: coefficient of `z^{r+1}` in the first coordinate.
    pub a: Option<Scalar>,
    /// `T(0)`: coefficient of `z^t w` in the second coordinate.
    pub b: Option<Scalar>,
    pub abate_index: Option<Scalar>,
    pub director: Option<Director>,
    pub attraction: Attraction,
    pub verdict: Verdict,
}

impl DirectionReport {
    pub fn m(&self) -> Option<u32> {
        self.orders[0].m
    }
}

fn orders_table(f: &Germ, zt: ZeroTest) -> Result<Vec<VanishingOrders>, GermError> {
    (f.order()..=f.trunc()).map(|j| f.vanishing_orders_with(j, zt)).collect()
}

/// Type at degree `k + 1`.
pub fn classify_type(o: &VanishingOrders) -> Result<DirType, GermError> {
    match (o.m, o.n) {
        (_, None) => Ok(DirType::Dicritical),
        (_, Some(0)) => Err(GermError::NotCharacteristic),
        (None, Some(_)) => Ok(DirType::Apparent),
        (Some(m), Some(n)) => Ok(match (1 + m).cmp(&n) {
            Ordering::Equal => DirType::Fuchsian,
            Ordering::Less => DirType::Irregular,
            Ordering::Greater => DirType::Apparent,
        }),
    }
}

fn s_from(orders: &[VanishingOrders], n: u32, complete: bool) -> Result<SDegree, GermError> {
    match orders.iter().position(|o| o.n == Some(0)) {
        Some(0) => Err(GermError::NotCharacteristic),
        Some(i) => Ok(SDegree::Finite(orders[i].j - 1)),
        None => Ok(SDegree::ThroughTruncation { n, polynomial_exact: complete }),
    }
}

fn r_from(orders: &[VanishingOrders]) -> Option<u32> {
    orders.iter().find(|o| o.m == Some(0)).map(|o| o.j - 1)
}

fn t_from(orders: &[VanishingOrders]) -> Option<u32> {
    for o in orders {
        match o.l {
            Some(1) => return Some(o.j - 1),
            Some(0) => return None,
            _ => {}
        }
    }
    None
}

pub fn degree_s(f: &Germ) -> Result<SDegree, GermError> {
    s_from(&orders_table(f, ZeroTest::Exact)?, f.trunc(), f.is_complete())
}

pub fn degree_r(f: &Germ) -> Result<Option<u32>, GermError> {
    Ok(r_from(&orders_table(f, ZeroTest::Exact)?))
}

pub fn degree_t(f: &Germ) -> Result<Option<u32>, GermError> {
    Ok(t_from(&orders_table(f, ZeroTest::Exact)?))
}

/// `Res_{u=0} p_{k+1}(1,u) / r_{k+1}(1,u)`.
pub fn abate_index(f: &Germ) -> Result<Scalar, GermError> {
    abate_with(f, ZeroTest::Exact)
}

fn abate_with(f: &Germ, zt: ZeroTest) -> Result<Scalar, GermError> {
    let [p, _, r] = f.dehomogenized(f.order())?;
    let n = zt.valuation(&r).ok_or(GermError::Dicritical)?;
    if n == 0 {
        return Err(GermError::NotCharacteristic);
    }
    // p(u)/r(u) = u^{-n} p(u)/r̃(u); the residue is the u^{n-1} coefficient of p/r̃
    let rt = &r[n as usize..];
    let inv0 = rt[0].recip().ok_or(GermError::NotCharacteristic)?;
    let len = n as usize;
    let mut q = vec![Scalar::zero(); len];
    let zero = Scalar::zero();
    for i in 0..len {
        let mut acc = p.get(i).unwrap_or(&zero).clone();
        for j in 1..=i {
            if let Some(c) = rt.get(j) {
                acc -= &(c * &q[i - j]);
            }
        }
        q[i] = &acc * &inv0;
    }
    Ok(q[len - 1].clone())
}

/// `Δ` from `k ≤ t ≤ r`, `k ≠ r` or `k = t = r`, with `a = R(0)`, `b = T(0)`.
pub fn director(k: u32, t: u32, r: u32, a: &Scalar, b: &Scalar) -> Result<Director, GermError> {
    director_prec(k, t, r, a, b, ROOT_PRECISION)
}

pub(crate) fn director_prec(k: u32, t: u32, r: u32, a: &Scalar, b: &Scalar, prec: u32) -> Result<Director, GermError> {
    if a.is_zero() || b.is_zero() {
        return Err(GermError::DirectorUndefined("a and b must be nonzero"));
    }
    if t > r || k > t || (k == r && t != r) {
        return Err(GermError::DirectorUndefined("requires k <= t <= r"));
    }
    let ar = a * &Scalar::from_int(r as i64);
    let rho = -ar.recip().unwrap();
    let roots = rho.to_hp(prec).nth_roots(r);
    let neg_b = (-b).to_hp(prec);

    let exact = if t == r {
        let shift = Scalar::from_int((r - k + 1) as i64);
        let d = &(&(b / a) - &shift) / &Scalar::from_int(r as i64);
        Some(d)
    } else {
        None
    };
    let candidates: Vec<HpComplex> = roots
        .iter()
        .map(|a1| match &exact {
            Some(d) => d.to_hp(prec),
            None => neg_b.mul(&a1.powi(t)),
        })
        .collect();

    let tol = |x: &HpComplex| {
        let scale = Float::with_val(prec, x.abs() + 1u32);
        Float::with_val(prec, scale * Float::with_val(prec, Float::i_exp(1, -(prec as i32) + 32)))
    };
    let close = |x: &Float, y: &Float, t: &Float| Float::with_val(prec, x - y).abs() <= *t;
    let mut best = 0;
    for i in 1..r as usize {
        let (c, b0) = (&candidates[i], &candidates[best]);
        let t = tol(c);
        let better = if !close(&c.re, &b0.re, &t) {
            c.re > b0.re
        } else if !close(&c.im, &b0.im, &t) {
            c.im > b0.im
        } else {
            let (ac, ab) = (roots[i].arg().abs(), roots[best].arg().abs());
            if !close(&ac, &ab, &t) {
                ac < ab
            } else {
                roots[i].arg() > roots[best].arg()
            }
        };
        if better {
            best = i;
        }
    }
    let mut branches: Vec<HpComplex> = Vec::new();
    for c in &candidates {
        let t = tol(c);
        if !branches.iter().any(|x| close(&x.re, &c.re, &t) && close(&x.im, &c.im, &t)) {
            branches.push(c.clone());
        }
    }

    let attraction = match &exact {
        Some(d) => {
            if d.re().cmp0().is_gt() {
                Attraction::Yes
            } else {
                Attraction::No
            }
        }
        None => {
            let g = Integer::from(r).gcd(&Integer::from(t)).to_u32().unwrap();
            let (r1, t1) = (r / g, t / g);
            if r1 >= 3 {
                Attraction::Yes
            } else {
                // r = 2t: Δ² = b² ρ^{t'} exactly; Re Δ = 0 on both branches iff Δ² < 0
                let sq = &b.pow(2) * &rho.pow(t1);
                if sq.is_real() && sq.re().cmp0().is_lt() {
                    Attraction::No
                } else {
                    Attraction::Yes
                }
            }
        }
    };
    Ok(Director {
        exact,
        value: candidates[best].clone(),
        branches,
        a1: roots[best].clone(),
        attraction,
    })
}

/// Verdict from computed invariants; checks run in the theorem's order.
fn verdict_from(k: u32, s: SDegree, r: Option<u32>, t: Option<u32>, attraction: Attraction, complete: bool) -> Verdict {
    let fails = |condition, reason: String| Verdict::Fails { condition, reason };
    if let Some(sv) = s.finite() {
        if r.is_none_or(|r| sv <= r) {
            let rs = r.map_or("no r up to the truncation".to_string(), |r| format!("r = {r}"));
            return fails(Condition::SAboveR, format!("s = {sv}, {rs}"));
        }
    }
    let Some(r) = r else {
        if complete {
            return fails(Condition::RBetweenKAndS, "no degree r+1 with [1:0] non-degenerate".into());
        }
        return Verdict::TruncationLimited { reason: "r not found up to the truncation".into() };
    };
    if r <= k {
        return fails(Condition::RBetweenKAndS, format!("r = {r} is not above k = {k}"));
    }
    let Some(t) = t.filter(|&t| t <= r) else {
        let ts = t.map_or("no t".to_string(), |t| format!("t = {t}"));
        return fails(Condition::TBetweenKAndR, format!("{ts} with r = {r}"));
    };
    match attraction {
        Attraction::Yes => {}
        Attraction::No => return fails(Condition::TransversallyAttracting, "Re Delta <= 0 on every branch".into()),
        Attraction::Undetermined => return fails(Condition::TransversallyAttracting, "director undefined".into()),
    }
    let bound = r + t - k;
    match s.exceeds(bound) {
        Some(true) => Verdict::Applies { s_through_truncation: matches!(s, SDegree::ThroughTruncation { polynomial_exact: false, .. }) },
        Some(false) => fails(Condition::SAboveRPlusTMinusK, format!("s = {s}, r + t - k = {bound}")),
        None => Verdict::TruncationLimited { reason: format!("need s > {bound}, seen s >= {}", f_trunc(s)) },
    }
}

fn f_trunc(s: SDegree) -> u32 {
    match s {
        SDegree::Finite(v) | SDegree::ThroughTruncation { n: v, .. } => v,
    }
}

pub fn theorem_a_verdict(f: &Germ) -> Result<Verdict, GermError> {
    Ok(classify_at_e1(f)?.verdict)
}

/// Full report at `[1:0]`.
pub fn classify_at_e1(f: &Germ) -> Result<DirectionReport, GermError> {
    report(f, Direction::e1(), ZeroTest::Exact, false)
}

/// Full report at an exact direction, moved to `[1:0]` first.
pub fn classify(f: &Germ, v: &Direction) -> Result<DirectionReport, GermError> {
    let g = move_to_e1(f, v)?;
    report(&g, v.clone(), ZeroTest::Exact, false)
}

/// Report at a numerically found direction `[1:u]`. The direction is replaced by
/// the exact binary rational nearest the float, and zero tests use a tolerance.
pub fn classify_approx(f: &Germ, u: &HpComplex) -> Result<DirectionReport, GermError> {
    let re = u.re.to_rational().ok_or(crate::tps::TpsError::NonFinite)?;
    let im = u.im.to_rational().ok_or(crate::tps::TpsError::NonFinite)?;
    let v = Direction::new(Scalar::one(), Scalar::new(re, im))?;
    let g = move_to_e1(f, &v)?;
    report(&g, v, ZeroTest::Tolerance(APPROX_ZERO_TOL), true)
}

fn report(f: &Germ, direction: Direction, zt: ZeroTest, approximate: bool) -> Result<DirectionReport, GermError> {
    let orders = orders_table(f, zt)?;
    let dir_type = classify_type(&orders[0])?;
    let s = s_from(&orders, f.trunc(), f.is_complete())?;
    let r = r_from(&orders);
    let t = t_from(&orders);
    let k = f.k();
    let a = r.map(|r| f.map().first().coeff(r + 1, 0));
    let b = t.map(|t| f.map().second().coeff(t, 1));
    let abate_index = if dir_type == DirType::Dicritical { None } else { Some(abate_with(f, zt)?) };
    let director = match (r, t, &a, &b) {
        (Some(r), Some(t), Some(a), Some(b)) if k <= t && t <= r && (k < r || t == r) => director(k, t, r, a, b).ok(),
        _ => None,
    };
    let attraction = director.as_ref().map_or(Attraction::Undetermined, |d| d.attraction);
    let verdict = verdict_from(k, s, r, t, attraction, f.is_complete());
    Ok(DirectionReport {
        direction,
        approximate,
        k,
        trunc: f.trunc(),
        orders,
        dir_type,
        s,
        r,
        t,
        a,
        b,
        abate_index,
        director,
        attraction,
        verdict,
    })
}
