//! Polynomial maps of ℂ² with precision-`P` float coefficients, for orbit work.

use super::hp::HpComplex;
use super::map::Map2;
use super::series::Ts2;
use super::TpsError;

/// `Σ c_ij z^i w^j` with float coefficients.
#[derive(Clone, Debug)]
pub struct HpPoly2 {
    terms: Vec<(u32, u32, HpComplex)>,
    max_z: u32,
    max_w: u32,
}

impl HpPoly2 {
    pub fn from_terms(terms: Vec<(u32, u32, HpComplex)>) -> Self {
        let terms: Vec<_> = terms.into_iter().filter(|(_, _, c)| !c.is_zero()).collect();
        let max_z = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let max_w = terms.iter().map(|t| t.1).max().unwrap_or(0);
        HpPoly2 { terms, max_z, max_w }
    }

    pub fn from_series(s: &Ts2, prec: u32) -> Self {
        Self::from_terms(s.terms().map(|(m, c)| (m.z, m.w, c.to_hp(prec))).collect())
    }

    pub fn terms(&self) -> &[(u32, u32, HpComplex)] {
        &self.terms
    }

    pub fn coeff(&self, i: u32, j: u32) -> Option<&HpComplex> {
        self.terms.iter().find(|t| t.0 == i && t.1 == j).map(|t| &t.2)
    }

    fn eval_with(&self, zp: &[HpComplex], wp: &[HpComplex], prec: u32) -> HpComplex {
        let mut acc = HpComplex::zero(prec);
        for (i, j, c) in &self.terms {
            let mut t = c.mul(&zp[*i as usize]);
            if *j > 0 {
                t = t.mul(&wp[*j as usize]);
            }
            acc = acc.add(&t);
        }
        acc
    }
}

/// A polynomial self-map of ℂ² with float coefficients.
#[derive(Clone, Debug)]
pub struct HpMap2 {
    pub first: HpPoly2,
    pub second: HpPoly2,
    prec: u32,
}

impl HpMap2 {
    pub fn new(first: HpPoly2, second: HpPoly2, prec: u32) -> Self {
        HpMap2 { first, second, prec }
    }

    /// Exact coefficients rounded to `prec` bits.
    pub fn from_map(f: &Map2, prec: u32) -> Self {
        HpMap2::new(HpPoly2::from_series(f.first(), prec), HpPoly2::from_series(f.second(), prec), prec)
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn eval(&self, z: &HpComplex, w: &HpComplex) -> Result<(HpComplex, HpComplex), TpsError> {
        let zp = powers(z, self.first.max_z.max(self.second.max_z));
        let wp = powers(w, self.first.max_w.max(self.second.max_w));
        let a = self.first.eval_with(&zp, &wp, self.prec).check_finite()?;
        let b = self.second.eval_with(&zp, &wp, self.prec).check_finite()?;
        Ok((a, b))
    }
}

fn powers(x: &HpComplex, max: u32) -> Vec<HpComplex> {
    let mut out = Vec::with_capacity(max as usize + 1);
    out.push(HpComplex::from_f64(x.prec(), 1.0, 0.0));
    for i in 1..=max as usize {
        let next = out[i - 1].mul(x);
        out.push(next);
    }
    out
}
