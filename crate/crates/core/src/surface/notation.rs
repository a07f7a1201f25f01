use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{BasisKind, Component, ModelError, SurfaceModel};
use crate::lattice::LatticeVector;
use crate::relations::split_signed;

impl SurfaceModel {
    /// Parses basis-name sums such as `3l-e1-e2+2e'3`.
    pub fn parse_vector(&self, s: &str) -> Result<LatticeVector, ModelError> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut v = LatticeVector::zeros(self.rank());
        if s == "0" {
            return Ok(v);
        }
        let tokens = split_signed(&s).ok_or_else(|| ModelError::Parse(s.clone()))?;
        for (sign, tok) in tokens {
            let digits: String = tok.chars().take_while(char::is_ascii_digit).collect();
            let k: BigInt = if digits.is_empty() {
                BigInt::one()
            } else {
                digits.parse().map_err(|_| ModelError::Parse(s.clone()))?
            };
            let sym = normalize(&tok[digits.len()..]);
            let i = self
                .basis
                .iter()
                .position(|b| b.name() == sym)
                .ok_or_else(|| ModelError::UnknownSymbol { symbol: sym.clone(), alphabet: self.alphabet() })?;
            v.0[i] += k * sign;
        }
        Ok(v)
    }

    pub fn format_vector(&self, v: &LatticeVector) -> String {
        let mut out = String::new();
        for (x, b) in v.coords().iter().zip(&self.basis) {
            if x.is_zero() {
                continue;
            }
            if x.is_negative() {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            let mag = x.abs();
            if !mag.is_one() {
                out.push_str(&mag.to_string());
            }
            out.push_str(&b.name());
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    /// Human-readable list of the basis symbols, with exceptional runs compressed.
    pub fn alphabet(&self) -> String {
        let mut parts = Vec::new();
        for c in Component::BOTH {
            let prime = if c == Component::V1 { "'" } else { "" };
            let mut count = 0;
            for b in self.basis.iter().filter(|b| b.home == c) {
                if b.kind == BasisKind::Exceptional {
                    count += 1;
                } else {
                    parts.push(b.name());
                }
            }
            match count {
                0 => {}
                1 => parts.push(format!("e{prime}1")),
                n => parts.push(format!("e{prime}1..e{prime}{n}")),
            }
        }
        format!("{{{}}}", parts.join(", "))
    }
}

/// Accepts `e3'` as a spelling of `e'3`.
fn normalize(sym: &str) -> String {
    if let Some(body) = sym.strip_suffix('\'') {
        if let Some(idx) = body.strip_prefix('e') {
            if !idx.is_empty() && idx.chars().all(|c| c.is_ascii_digit()) {
                return format!("e'{idx}");
            }
        }
    }
    sym.to_string()
}
