//! Combined Picard lattice of a two-component degeneration, with component tags.

mod catalogue;
mod model;
mod notation;

use std::fmt;

use serde::Serialize;

pub use catalogue::{build_model, catalogue, catalogue_model, ModelId};
pub use model::{CurveEntry, CurveKind, CurveSet, Dictionary, NefReport, SurfaceModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Component {
    V0,
    V1,
}

impl Component {
    pub const BOTH: [Component; 2] = [Component::V0, Component::V1];

    pub fn index(self) -> usize {
        match self {
            Component::V0 => 0,
            Component::V1 => 1,
        }
    }

    pub fn other(self) -> Component {
        match self {
            Component::V0 => Component::V1,
            Component::V1 => Component::V0,
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "V{}", self.index())
    }
}

/// Minimal rational surface the component is blown up from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SurfaceKind {
    P2,
    P1xP1,
}

impl SurfaceKind {
    /// Number of points on the double curve in the unflopped Construction-1 split.
    pub fn k0(self) -> usize {
        match self {
            SurfaceKind::P2 => 9,
            SurfaceKind::P1xP1 => 8,
        }
    }

    pub fn parse(s: &str) -> Option<SurfaceKind> {
        match s.to_ascii_lowercase().as_str() {
            "p2" => Some(SurfaceKind::P2),
            "p1xp1" | "f0" => Some(SurfaceKind::P1xP1),
            _ => None,
        }
    }

    pub fn pretty(self) -> &'static str {
        match self {
            SurfaceKind::P2 => "P²",
            SurfaceKind::P1xP1 => "P¹×P¹",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum BasisKind {
    Line,
    Section,
    Fiber,
    Exceptional,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BasisElement {
    pub kind: BasisKind,
    /// 1-based for exceptionals, 0 otherwise.
    pub index: u32,
    pub home: Component,
    pub tag: Component,
}

impl BasisElement {
    pub fn name(&self) -> String {
        let prime = if self.home == Component::V1 { "'" } else { "" };
        match self.kind {
            BasisKind::Line => format!("l{prime}"),
            BasisKind::Section => format!("s{prime}"),
            BasisKind::Fiber => format!("f{prime}"),
            BasisKind::Exceptional => format!("e{prime}{}", self.index),
        }
    }

    pub fn self_pairing(&self) -> i64 {
        match self.kind {
            BasisKind::Line => 1,
            BasisKind::Section | BasisKind::Fiber => 0,
            BasisKind::Exceptional => -1,
        }
    }

    pub fn is_exceptional(&self) -> bool {
        self.kind == BasisKind::Exceptional
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("point count {n} out of range 0..={k}")]
    PointsOutOfRange { n: usize, k: usize },
    #[error("invalid polarization: h·h = {h2} (want 4), h·ξ = {h_xi} (want 0)")]
    InvalidPolarization { h2: String, h_xi: String },
    #[error("model has no polarization class")]
    NoPolarization,
    #[error("{0} is not an exceptional class and cannot be flopped")]
    NotExceptional(String),
    #[error("{0} is not floppable in the current state")]
    NotFloppable(String),
    #[error("transported ξ disagrees with ξ recomputed from tags after flopping {0}")]
    TransportMismatch(String),
    #[error("unknown symbol '{symbol}'; this model's alphabet is {alphabet}")]
    UnknownSymbol { symbol: String, alphabet: String },
    #[error("cannot parse vector '{0}'")]
    Parse(String),
    #[error("unknown model '{0}'")]
    UnknownModel(String),
    #[error("vector has dimension {found}, lattice has rank {expected}")]
    Dimension { expected: usize, found: usize },
}
