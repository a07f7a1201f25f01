use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use super::{FormalDivisor, PointSymbol};
use crate::lattice::{span_membership, LatticeVector, Membership};
use crate::surface::{BasisElement, Component, ModelError, SurfaceModel};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum RelationError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("model {0} has no restriction dictionary; supply one with with_dictionary")]
    NoDictionary(String),
    #[error("class is not numerically Cartier: degree {v0} on V0 but {v1} on V1")]
    NotCartier { v0: String, v1: String },
    #[error("coefficient {0} does not fit in a machine integer")]
    Overflow(String),
    #[error("relation {0} has nonzero degree")]
    NonzeroDegree(String),
}

/// Image of every basis class on the double curve, keyed by basis element.
pub fn restriction_dictionary(m: &SurfaceModel) -> Result<Vec<(BasisElement, FormalDivisor)>, RelationError> {
    let dict = m.dictionary().ok_or_else(|| RelationError::NoDictionary(m.id.to_string()))?;
    Ok(m.basis().iter().cloned().zip(dict.images.iter().cloned()).collect())
}

fn small(x: &BigInt) -> Result<i64, RelationError> {
    x.to_i64().ok_or_else(|| RelationError::Overflow(x.to_string()))
}

fn restrict(m: &SurfaceModel, c: &LatticeVector, comp: Component) -> Result<FormalDivisor, RelationError> {
    let dict = m.dictionary().ok_or_else(|| RelationError::NoDictionary(m.id.to_string()))?;
    let mut out = FormalDivisor::zero();
    for ((x, b), img) in c.coords().iter().zip(m.basis()).zip(&dict.images) {
        if b.tag == comp && !x.is_zero() {
            out = out + small(x)? * img;
        }
    }
    Ok(out)
}

/// ψ(c) = c|V0 − c|V1 on the double curve.
pub fn psi(m: &SurfaceModel, c: &LatticeVector) -> Result<FormalDivisor, RelationError> {
    if c.dim() != m.rank() {
        return Err(ModelError::Dimension { expected: m.rank(), found: c.dim() }.into());
    }
    let deg = |comp| m.intersect(&m.restricted(c, comp), &m.anticanonical(comp));
    let (d0, d1) = (deg(Component::V0), deg(Component::V1));
    if d0 != d1 {
        return Err(RelationError::NotCartier { v0: d0.to_string(), v1: d1.to_string() });
    }
    let out = restrict(m, c, Component::V0)? - restrict(m, c, Component::V1)?;
    debug_assert_eq!(out.degree(), 0);
    Ok(out)
}

/// Generators of the relations holding among the points, and optionally a target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationSystem {
    pub r_h: FormalDivisor,
    pub r_xi: FormalDivisor,
    pub aux: Vec<FormalDivisor>,
    pub target: Option<FormalDivisor>,
}

impl RelationSystem {
    pub fn generators(&self) -> Vec<&FormalDivisor> {
        [&self.r_h, &self.r_xi].into_iter().chain(&self.aux).collect()
    }

    pub fn generator_labels(&self) -> Vec<String> {
        let mut out = vec!["R_h".to_string(), "R_xi".to_string()];
        out.extend((1..=self.aux.len()).map(|i| format!("aux{i}")));
        out
    }

    pub fn with_target(mut self, t: FormalDivisor) -> Self {
        self.target = Some(t);
        self
    }

    pub fn map_symbols(&self, f: impl Fn(&PointSymbol) -> PointSymbol) -> RelationSystem {
        RelationSystem {
            r_h: self.r_h.map_symbols(&f),
            r_xi: self.r_xi.map_symbols(&f),
            aux: self.aux.iter().map(|a| a.map_symbols(&f)).collect(),
            target: self.target.as_ref().map(|t| t.map_symbols(&f)),
        }
    }
}

/// R_h = ψ(h), R_ξ = −ψ(ξ), plus the model's auxiliary relations.
pub fn imposed_relations(m: &SurfaceModel) -> Result<RelationSystem, RelationError> {
    let r_h = psi(m, m.h()?)?;
    let r_xi = -psi(m, m.xi())?;
    let aux = m.dictionary().map(|d| d.aux.clone()).unwrap_or_default();
    if let Some(a) = aux.iter().find(|a| a.degree() != 0) {
        return Err(RelationError::NonzeroDegree(a.to_string()));
    }
    Ok(RelationSystem { r_h, r_xi, aux, target: None })
}

/// Integer coefficients on the generators of a [`RelationSystem`], in generator order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate(pub Vec<i64>);

impl Certificate {
    pub fn expand(&self, system: &RelationSystem) -> FormalDivisor {
        self.0.iter().zip(system.generators()).map(|(&k, g)| k * g).sum()
    }

    /// `2R_h + R_xi`, `4R_h + 3R_xi + aux1`, ...
    pub fn describe(&self, labels: &[String]) -> String {
        let mut s = String::new();
        for (k, label) in self.0.iter().zip(labels).filter(|(k, _)| **k != 0) {
            let sign = if *k < 0 { "-" } else if s.is_empty() { "" } else { "+" };
            let mag = k.abs();
            if mag == 1 {
                s.push_str(&format!("{sign}{label}"));
            } else {
                s.push_str(&format!("{sign}{mag}·{label}"));
            }
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }
}

impl Serialize for Certificate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (i, k) in self.0.iter().enumerate() {
            map.serialize_entry(&i.to_string(), k)?;
        }
        map.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Derivation {
    Certified { certificate: Certificate },
    RationalOnly,
    NotInSpan,
}

impl Derivation {
    pub fn is_certified(&self) -> bool {
        matches!(self, Derivation::Certified { .. })
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Derivation::Certified { certificate } => Some(certificate),
            _ => None,
        }
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Derivation::Certified { certificate } => write!(f, "certified {:?}", certificate.0),
            Derivation::RationalOnly => write!(f, "rational only"),
            Derivation::NotInSpan => write!(f, "not in span"),
        }
    }
}

/// Decides whether the target lies in the ℤ-span of the generators.
/// A certificate is only returned after re-expanding it to the target exactly.
pub fn derive(system: &RelationSystem, target: &FormalDivisor) -> Result<Derivation, RelationError> {
    for g in system.generators().into_iter().chain([target]) {
        if g.degree() != 0 {
            return Err(RelationError::NonzeroDegree(g.to_string()));
        }
    }
    let symbols: Vec<PointSymbol> = system
        .generators()
        .into_iter()
        .chain([target])
        .flat_map(|d| d.symbols().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let vectorize = |d: &FormalDivisor| LatticeVector::from_i64s(&symbols.iter().map(|s| d.coefficient(s)).collect::<Vec<_>>());
    let gens: Vec<LatticeVector> = system.generators().into_iter().map(vectorize).collect();
    Ok(match span_membership(&vectorize(target), &gens) {
        Membership::Integral(c) => {
            let cert = Certificate(c.iter().map(small).collect::<Result<_, _>>()?);
            assert_eq!(&cert.expand(system), target, "certificate must re-expand to the target");
            Derivation::Certified { certificate: cert }
        }
        Membership::RationalOnly => Derivation::RationalOnly,
        Membership::Outside => Derivation::NotInSpan,
    })
}

/// (3n+9)q − (n+1)p₁ − Σ_{i=2}^{2n+9} p_i.
pub fn hirzebruch_relation(n: u32) -> FormalDivisor {
    assert!(n >= 1, "Hirzebruch index must be positive");
    let mut d = FormalDivisor::term(3 * n as i64 + 9, PointSymbol::Identity(Component::V0));
    d.add_term(-(n as i64 + 1), PointSymbol::Point(Component::V0, 1));
    for i in 2..=2 * n + 9 {
        d.add_term(-1, PointSymbol::Point(Component::V0, i));
    }
    d
}
