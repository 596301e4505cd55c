//! Built-in test functions, addressed by short textual ids.
//!
//! An id is a generator name followed by optional `key=value` pairs:
//!
//! ```text
//! geometric:r=0.5,N=1,Q=64
//! gevrey:c=1,k=1,N=2,Q=512
//! polynomial_decay:q=1,Q=512
//! finite:[1;0.5;-2],N=2
//! ```
//!
//! Every component `p` of an order-`N` corpus function carries the same coefficient rule
//! `g(q)` scaled by `1/(p+1)`, so `a_{p,q} = g(q)/(p+1)` for `q ≤ Q`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::decompose::CoefficientTable;
use crate::error::{Error, Result};
use crate::poly::{ComplexScalar, NAnalyticPoly};

/// Coefficient rule of a corpus function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Generator {
    /// `g(q) = r^q`.
    Geometric { r: f64 },
    /// `g(q) = exp(-c q^{k/(k+1)})`.
    Gevrey { c: f64, k: f64 },
    /// `g(q) = (q+1)^{-s}`.
    PolynomialDecay { s: f64 },
    /// Explicit real coefficients `g(0), g(1), ...`.
    Finite(Vec<f64>),
}

impl Generator {
    pub fn coefficient(&self, q: usize) -> f64 {
        match self {
            Generator::Geometric { r } => r.powi(q as i32),
            Generator::Gevrey { c, k } => (-c * (q as f64).powf(k / (k + 1.0))).exp(),
            Generator::PolynomialDecay { s } => (q as f64 + 1.0).powf(-s),
            Generator::Finite(list) => list.get(q).copied().unwrap_or(0.0),
        }
    }
}

/// A parsed corpus entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusFunction {
    pub id: String,
    pub order: usize,
    pub generator: Generator,
    pub q_max: usize,
}

impl CorpusFunction {
    /// Parses an id; see the module documentation for the grammar.
    pub fn parse(id: &str) -> Result<Self> {
        let id = id.trim();
        let (name, rest) = id.split_once(':').unwrap_or((id, ""));
        let (list, rest) = if name == "finite" {
            let rest = rest.trim();
            let close = rest
                .strip_prefix('[')
                .and_then(|r| r.find(']').map(|i| (r[..i].to_string(), r[i + 1..].trim_start_matches(',').to_string())))
                .ok_or_else(|| Error::Parse(format!("finite corpus needs a bracketed list, got `{rest}`")))?;
            (Some(close.0), close.1)
        } else {
            (None, rest.to_string())
        };

        let mut params: Vec<(String, f64)> = Vec::new();
        for pair in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = pair.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value, got `{pair}`")))?;
            let value: f64 = value.trim().parse().map_err(|_| Error::Parse(format!("bad number in `{pair}`")))?;
            params.push((key.trim().to_string(), value));
        }
        let take = |key: &str, default: f64| params.iter().rev().find(|(k, _)| k == key).map_or(default, |p| p.1);
        let allowed: &[&str] = match name {
            "geometric" => &["r", "N", "Q"],
            "gevrey" => &["c", "k", "N", "Q"],
            "polynomial_decay" => &["q", "N", "Q"],
            "finite" => &["N"],
            other => return Err(Error::Parse(format!("unknown corpus generator `{other}`"))),
        };
        if let Some((k, _)) = params.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            return Err(Error::Parse(format!("`{name}` does not take parameter `{k}`")));
        }

        let order = positive_integer(take("N", 1.0), "N")?;
        let (generator, q_max) = match name {
            "geometric" => {
                let r = take("r", 0.5);
                if !(r > 0.0 && r < 1.0) {
                    return Err(Error::Domain(format!("geometric ratio must lie in (0, 1), got {r}")));
                }
                (Generator::Geometric { r }, positive_integer(take("Q", 64.0), "Q")?)
            }
            "gevrey" => {
                let (c, k) = (take("c", 1.0), take("k", 1.0));
                if !(c > 0.0 && k > 0.0) {
                    return Err(Error::Domain("gevrey corpus needs c > 0 and k > 0".into()));
                }
                (Generator::Gevrey { c, k }, positive_integer(take("Q", 512.0), "Q")?)
            }
            "polynomial_decay" => {
                let s = take("q", 1.0);
                if !(s > 0.0) {
                    return Err(Error::Domain("polynomial decay exponent must be positive".into()));
                }
                (Generator::PolynomialDecay { s }, positive_integer(take("Q", 512.0), "Q")?)
            }
            _ => {
                let list = list.expect("finite list parsed above");
                let coeffs = list
                    .split(';')
                    .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad coefficient `{s}`"))))
                    .collect::<Result<Vec<_>>>()?;
                let q_max = coeffs.len() - 1;
                (Generator::Finite(coeffs), q_max)
            }
        };
        Ok(CorpusFunction { id: id.to_string(), order, generator, q_max })
    }

    /// `a_{p,q} = g(q)/(p+1)` for `q ≤ Q`.
    pub fn coefficient(&self, p: usize, q: usize) -> f64 {
        if p >= self.order || q > self.q_max {
            return 0.0;
        }
        self.generator.coefficient(q) / (p as f64 + 1.0)
    }

    pub fn table(&self) -> CoefficientTable {
        let rows = (0..self.order)
            .map(|p| (0..=self.q_max).map(|q| ComplexScalar::new(self.coefficient(p, q), 0.0)).collect())
            .collect();
        CoefficientTable::from_rows(rows).expect("corpus order is at least 1")
    }

    /// The truncated function as a polynomial.
    pub fn poly(&self) -> NAnalyticPoly {
        self.table().to_poly()
    }

    /// The Gevrey exponent `k` the generator was built for, if any.
    pub fn k(&self) -> Option<f64> {
        match self.generator {
            Generator::Gevrey { k, .. } => Some(k),
            _ => None,
        }
    }

    /// The decay constant `β` of `exp(-β q^{k/(k+1)})` the generator realizes for the given `k`,
    /// when it has one.
    pub fn decay_constant(&self) -> Option<f64> {
        match self.generator {
            Generator::Gevrey { c, .. } => Some(c),
            _ => None,
        }
    }

    /// Whether the untruncated function belongs to every Gevrey class `H_N^k`.
    pub fn is_member(&self) -> bool {
        !matches!(self.generator, Generator::PolynomialDecay { .. })
    }
}

impl fmt::Display for CorpusFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id)
    }
}

impl std::str::FromStr for CorpusFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

fn positive_integer(v: f64, key: &str) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 && v < 1e7 {
        Ok(v as usize)
    } else {
        Err(Error::Parse(format!("`{key}` must be a positive integer, got {v}")))
    }
}

/// Corpus functions in the Gevrey classes that the end-to-end checks run on.
pub fn members() -> Vec<CorpusFunction> {
    ["gevrey:c=1,k=1,N=1,Q=512", "gevrey:c=1,k=1,N=2,Q=512", "gevrey:c=1,k=2,N=1,Q=512", "geometric:r=0.6,N=2,Q=96"]
        .iter()
        .map(|id| CorpusFunction::parse(id).expect("built-in ids parse"))
        .collect()
}

/// The non-member used as a negative control: `a_q = 1/(q+1)`.
pub fn non_member() -> CorpusFunction {
    CorpusFunction::parse("polynomial_decay:q=1,N=1,Q=512").expect("built-in id parses")
}
