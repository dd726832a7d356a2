//! `GermSpec` JSON: a truncation and the monomials of both coordinates.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conjugation::Biholo;
use crate::germ::Germ;
use crate::tps::{Map2, Scalar, Ts2};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MonomialSpec {
    pub coeff: String,
    pub z_pow: u32,
    pub w_pow: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GermSpec {
    pub truncation: u32,
    pub coord1: Vec<MonomialSpec>,
    pub coord2: Vec<MonomialSpec>,
    /// The listed terms are the whole map (no unknown higher-order terms).
    #[serde(default = "yes")]
    pub polynomial: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("{path}: line {line}, column {column}: {msg}")]
    Json { path: String, line: usize, column: usize, msg: String },
    #[error("{path}: {msg}")]
    Invalid { path: String, msg: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl GermSpec {
    pub fn parse(text: &str, path: &str) -> Result<GermSpec, SpecError> {
        serde_json::from_str(text).map_err(|e| SpecError::Json {
            path: path.to_string(),
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })
    }

    pub fn read(path: &str) -> Result<GermSpec, SpecError> {
        let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io { path: path.to_string(), source })?;
        GermSpec::parse(&text, path)
    }

    /// The map, duplicates summed, at truncation `trunc` (default: the spec's own).
    pub fn to_map(&self, path: &str, trunc: Option<u32>) -> Result<Map2, SpecError> {
        let n = trunc.unwrap_or(self.truncation);
        let invalid = |msg: String| SpecError::Invalid { path: path.to_string(), msg };
        let coord = |name: &str, list: &[MonomialSpec]| -> Result<Ts2, SpecError> {
            let mut sums: BTreeMap<(u32, u32), Scalar> = BTreeMap::new();
            for (i, m) in list.iter().enumerate() {
                let c: Scalar = m
                    .coeff
                    .parse()
                    .map_err(|e| invalid(format!("{name}[{i}].coeff = {:?}: {e}", m.coeff)))?;
                if m.z_pow + m.w_pow > self.truncation {
                    return Err(invalid(format!(
                        "{name}[{i}]: {} has degree {} above the truncation {}",
                        monomial(m.z_pow, m.w_pow),
                        m.z_pow + m.w_pow,
                        self.truncation
                    )));
                }
                *sums.entry((m.z_pow, m.w_pow)).or_insert_with(Scalar::zero) += &c;
            }
            let mut s = Ts2::zero(n);
            for ((i, j), c) in sums {
                if i + j <= n {
                    s.add_term(i, j, &c);
                }
            }
            Ok(s)
        };
        let f1 = coord("coord1", &self.coord1)?;
        let f2 = coord("coord2", &self.coord2)?;
        Map2::new(f1, f2).map_err(|e| invalid(e.to_string()))
    }

    /// A germ tangent to the identity; the diagnostic names the first offending monomial.
    pub fn to_germ(&self, path: &str, trunc: Option<u32>) -> Result<Germ, SpecError> {
        let map = self.to_map(path, trunc)?;
        let invalid = |msg: String| SpecError::Invalid { path: path.to_string(), msg };
        for (name, s, (ei, ej)) in [("coord1", map.first(), (1, 0)), ("coord2", map.second(), (0, 1))] {
            for (i, j) in [(0, 0), (1, 0), (0, 1)] {
                let want = if (i, j) == (ei, ej) { Scalar::one() } else { Scalar::zero() };
                let got = s.coeff(i, j);
                if got != want {
                    return Err(invalid(format!(
                        "{name}: coefficient of {} is {got}, expected {want} (linear part must be the identity)",
                        monomial(i, j)
                    )));
                }
            }
        }
        let g = if self.polynomial && trunc.is_none_or(|n| n >= self.truncation) {
            Germ::polynomial(map)
        } else {
            Germ::truncated(map)
        };
        g.map_err(|e| invalid(e.to_string()))
    }

    /// A local biholomorphism fixing the origin.
    pub fn to_biholo(&self, path: &str, trunc: Option<u32>) -> Result<Biholo, SpecError> {
        let map = self.to_map(path, trunc)?;
        Biholo::new(map).map_err(|e| SpecError::Invalid { path: path.to_string(), msg: e.to_string() })
    }
}

fn monomial(i: u32, j: u32) -> String {
    let part = |v: &str, e: u32| match e {
        0 => String::new(),
        1 => v.to_string(),
        e => format!("{v}^{e}"),
    };
    match (i, j) {
        (0, 0) => "1".to_string(),
        _ => [part("z", i), part("w", j)].into_iter().filter(|s| !s.is_empty()).collect::<Vec<_>>().join("*"),
    }
}
