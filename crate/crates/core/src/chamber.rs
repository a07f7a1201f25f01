//! Wall-and-chamber structure of the cone of lifted polarizations mh + nξ.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::ser::{SerializeTuple, Serializer};
use serde::Serialize;

use crate::lattice::LatticeVector;
use crate::surface::{catalogue_model, Component, CurveEntry, CurveKind, CurveSet, ModelError, ModelId, SurfaceModel};

const STEP_BUDGET: usize = 64;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum ChamberError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{model}: no wall in direction {direction}; the cone is unbounded relative to the curve catalogue")]
    Unbounded { model: String, direction: Direction },
    #[error("{model}: walk exceeded {STEP_BUDGET} steps")]
    StepBudget { model: String },
    #[error("{ray} is not nef: negative on {curves}")]
    NotNef { ray: RayPoint, curves: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Direction {
    fn sign(self) -> i64 {
        match self {
            Direction::Plus => 1,
            Direction::Minus => -1,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if *self == Direction::Plus { "+" } else { "-" })
    }
}

/// The class mh + nξ, in the coordinates of the unflopped model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RayPoint {
    pub m: i64,
    pub n: i64,
}

impl RayPoint {
    pub fn new(m: i64, n: i64) -> RayPoint {
        let g = m.gcd(&n).max(1);
        RayPoint { m: m / g, n: n / g }
    }

    /// The ray through h + dir·ε·ξ.
    fn at(eps: &BigRational, dir: Direction) -> RayPoint {
        let p = eps.numer().to_i64().expect("small wall parameter");
        let q = eps.denom().to_i64().expect("small wall parameter");
        RayPoint::new(q, dir.sign() * p)
    }

    /// Primitive ray strictly between two rays.
    pub fn between(a: RayPoint, b: RayPoint) -> RayPoint {
        RayPoint::new(a.m + b.m, a.n + b.n)
    }

    /// m·h + n·ξ using the state's current classes.
    pub fn class(&self, state: &SurfaceModel) -> Result<LatticeVector, ModelError> {
        Ok(&(self.m * state.h()?) + &(self.n * state.xi()))
    }
}

impl fmt::Display for RayPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coef = |k: i64| if k.abs() == 1 { String::new() } else { k.abs().to_string() };
        match (self.m, self.n) {
            (0, 0) => write!(f, "0"),
            (m, 0) => write!(f, "{}{}h", if m < 0 { "-" } else { "" }, coef(m)),
            (0, n) => write!(f, "{}{}ξ", if n < 0 { "-" } else { "" }, coef(n)),
            (m, n) => write!(f, "{}{}h{}{}ξ", if m < 0 { "-" } else { "" }, coef(m), if n < 0 { "-" } else { "+" }, coef(n)),
        }
    }
}

impl Serialize for RayPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(2)?;
        t.serialize_element(&self.m)?;
        t.serialize_element(&self.n)?;
        t.end()
    }
}

#[derive(Clone, Debug)]
pub struct WallHit {
    pub eps: BigRational,
    pub zero_classes: Vec<CurveEntry>,
}

/// First ε ≥ `from` at which h + dir·ε·ξ meets zero on a catalogue curve that it is decreasing on.
pub fn next_wall(
    state: &SurfaceModel,
    dir: Direction,
    from: &BigRational,
    set: CurveSet,
) -> Result<Option<WallHit>, ModelError> {
    let h = state.h()?;
    let xi = state.xi();
    let mut best: Option<WallHit> = None;
    for curve in state.curves(set) {
        let a = state.intersect(h, &curve.cls);
        let slope = state.intersect(xi, &curve.cls) * dir.sign();
        if !slope.is_negative() {
            continue;
        }
        let eps = BigRational::new(a, -slope);
        if &eps < from {
            continue;
        }
        match &mut best {
            Some(b) if b.eps < eps => {}
            Some(b) if b.eps == eps => b.zero_classes.push(curve),
            _ => best = Some(WallHit { eps, zero_classes: vec![curve] }),
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Birational { contracted_curves: Vec<String> },
    ContractedToCurve { class: String },
    ContractedToPoint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentModel {
    pub component: Component,
    pub surface: String,
    pub restricted_square: i64,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StableModelDescription {
    pub ray: RayPoint,
    pub components: [ComponentModel; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub singular_model: Option<&'static str>,
}

impl StableModelDescription {
    pub fn verdict(&self, c: Component) -> &Verdict {
        &self.components[c.index()].verdict
    }
}

/// What the polarization mh + nξ contracts on the given state.
pub fn stable_model_at(state: &SurfaceModel, ray: RayPoint) -> Result<StableModelDescription, ChamberError> {
    let class = ray.class(state)?;
    let report = state.nef_report_on(&class, CurveSet::Full);
    if !report.is_nonnegative {
        let curves: Vec<String> = report.negative_set.iter().map(|c| c.label.clone()).collect();
        return Err(ChamberError::NotNef { ray, curves: curves.join(", ") });
    }
    let components = Component::BOTH.map(|c| {
        let r = state.restricted(&class, c);
        let sq = state.intersect(&r, &r).to_i64().expect("small square");
        let verdict = if r.is_zero() {
            Verdict::ContractedToPoint
        } else if sq == 0 {
            Verdict::ContractedToCurve { class: state.format_vector(&r) }
        } else {
            Verdict::Birational {
                contracted_curves: report
                    .zero_set
                    .iter()
                    .filter(|z| z.component == c)
                    .map(|z| z.label.clone())
                    .collect(),
            }
        };
        ComponentModel { component: c, surface: state.surface_name(c), restricted_square: sq, verdict }
    });
    let singular_model = (ray == RayPoint::new(1, 0) && state.flop_history().is_empty() && !state.is_swapped())
        .then(|| state.id.singular_model())
        .flatten();
    Ok(StableModelDescription { ray, components, singular_model })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    InteriorFlop,
    BoundaryComponentTrivial,
    BoundaryMovingClass,
}

#[derive(Clone, Debug, Serialize)]
pub struct WallEvent {
    pub ray: RayPoint,
    pub kind: EventKind,
    pub zero_classes: Vec<String>,
    pub stable_model: StableModelDescription,
}

#[derive(Clone, Debug, Serialize)]
pub struct Chamber {
    pub label0: String,
    pub label1: String,
    /// Exceptionals flopped relative to the unflopped model.
    pub flops: Vec<String>,
    pub interior: RayPoint,
    #[serde(skip)]
    pub state: SurfaceModel,
}

impl Chamber {
    pub fn label(&self) -> String {
        format!("{} ∪ {}", self.label0, self.label1)
    }
}

/// Ordered from the + boundary to the − boundary.
#[derive(Clone, Debug, Serialize)]
pub struct LiftFan {
    pub model: ModelId,
    pub boundary: [RayPoint; 2],
    pub walls: Vec<RayPoint>,
    pub chambers: Vec<Chamber>,
    pub events: Vec<WallEvent>,
}

struct Side {
    /// Interior walls in walk order, each with the state beyond it.
    walls: Vec<(WallEvent, SurfaceModel)>,
    boundary: WallEvent,
}

fn walk(start: &SurfaceModel, dir: Direction, set: CurveSet) -> Result<Side, ChamberError> {
    let mut state = start.clone();
    let mut eps = BigRational::zero();
    let mut walls = Vec::new();
    for _ in 0..STEP_BUDGET {
        let hit = next_wall(&state, dir, &eps, set)?
            .ok_or_else(|| ChamberError::Unbounded { model: start.id.to_string(), direction: dir })?;
        let ray = RayPoint::at(&hit.eps, dir);
        let class = ray.class(&state)?;
        let trivial = Component::BOTH.iter().any(|&c| state.restricted(&class, c).is_zero());
        let moving = hit.zero_classes.iter().any(|c| c.kind == CurveKind::Moving);
        let kind = if trivial {
            EventKind::BoundaryComponentTrivial
        } else if moving {
            EventKind::BoundaryMovingClass
        } else {
            EventKind::InteriorFlop
        };
        let event = WallEvent {
            ray,
            kind,
            zero_classes: hit.zero_classes.iter().map(|c| c.label.clone()).collect(),
            stable_model: stable_model_at(&state, ray)?,
        };
        if kind != EventKind::InteriorFlop {
            return Ok(Side { walls, boundary: event });
        }
        let flops: Vec<usize> = hit
            .zero_classes
            .iter()
            .filter_map(|c| match c.kind {
                CurveKind::Exceptional { basis } => Some(basis),
                _ => None,
            })
            .collect();
        state = state.flop_all(&flops)?;
        walls.push((event, state.clone()));
        eps = hit.eps;
    }
    Err(ChamberError::StepBudget { model: start.id.to_string() })
}

fn chamber(state: &SurfaceModel, a: RayPoint, b: RayPoint) -> Chamber {
    Chamber {
        label0: state.surface_name(Component::V0),
        label1: state.surface_name(Component::V1),
        flops: state.flop_history().iter().map(|&i| state.basis()[i].name()).collect(),
        interior: RayPoint::between(a, b),
        state: state.clone(),
    }
}

pub fn lift_fan(m: &SurfaceModel) -> Result<LiftFan, ChamberError> {
    lift_fan_with(m, CurveSet::Standard)
}

pub fn lift_fan_with(m: &SurfaceModel, set: CurveSet) -> Result<LiftFan, ChamberError> {
    let plus = walk(m, Direction::Plus, set)?;
    let minus = walk(m, Direction::Minus, set)?;

    // Rays and the states between them, from the + boundary downwards.
    let mut rays = vec![plus.boundary.ray];
    let mut states = Vec::new();
    for (event, beyond) in plus.walls.iter().rev() {
        states.push(beyond.clone());
        rays.push(event.ray);
    }
    states.push(m.clone());
    for (event, beyond) in &minus.walls {
        rays.push(event.ray);
        states.push(beyond.clone());
    }
    rays.push(minus.boundary.ray);

    let chambers = states.iter().enumerate().map(|(i, s)| chamber(s, rays[i], rays[i + 1])).collect();
    let mut events = vec![plus.boundary.clone()];
    events.extend(plus.walls.iter().rev().map(|(e, _)| e.clone()));
    events.extend(minus.walls.iter().map(|(e, _)| e.clone()));
    events.push(minus.boundary);
    Ok(LiftFan {
        model: m.id,
        boundary: [rays[0], rays[rays.len() - 1]],
        walls: rays[1..rays.len() - 1].to_vec(),
        chambers,
        events,
    })
}

impl LiftFan {
    /// Plain-text picture: rays and chambers from the + boundary to the − boundary.
    pub fn diagram(&self) -> String {
        let mut out = format!("{}\n", self.model);
        let width = self.events.iter().map(|e| e.ray.to_string().chars().count()).max().unwrap_or(1);
        for (i, event) in self.events.iter().enumerate() {
            let what = match event.kind {
                EventKind::InteriorFlop => format!("wall, flop {}", event.zero_classes.join(" ")),
                EventKind::BoundaryComponentTrivial => "boundary, component contracted".to_string(),
                EventKind::BoundaryMovingClass => format!("boundary, zero on {}", event.zero_classes.join(" ")),
            };
            let ray = event.ray.to_string();
            let pad = width - ray.chars().count();
            out.push_str(&format!("  {ray}{}  {what}\n", " ".repeat(pad)));
            if let Some(ch) = self.chambers.get(i) {
                out.push_str(&format!("  {}  │ {}\n", " ".repeat(width), ch.label()));
            }
        }
        out
    }
}

/// Reference decomposition of one model, with chamber labels listed in computed (V0, V1) order.
#[derive(Clone, Debug, Serialize)]
pub struct FanPanel {
    pub model: ModelId,
    pub boundary: [(i64, i64); 2],
    pub walls: &'static [(i64, i64)],
    pub chambers: &'static [&'static str],
    /// The conventional label lists the components as V1 ∪ V0.
    pub labels_reversed: bool,
}

pub const FAN_PANELS: [FanPanel; 9] = [
    FanPanel {
        model: ModelId::A15,
        boundary: [(2, 1), (2, -1)],
        walls: &[(1, 0)],
        chambers: &["P¹×P¹ ∪ Bl₁₆(P¹×P¹)", "Bl₁₆(P¹×P¹) ∪ P¹×P¹"],
        labels_reversed: true,
    },
    FanPanel {
        model: ModelId::A11E6,
        boundary: [(3, 1), (1, -1)],
        walls: &[(1, 0)],
        chambers: &["P² ∪ Bl₁₈P²", "Bl₁₂P² ∪ Bl₆P² (dP₃)"],
        labels_reversed: false,
    },
    FanPanel {
        model: ModelId::D12D5,
        boundary: [(1, 0), (1, -1)],
        walls: &[],
        chambers: &["Bl₁₃P² ∪ Bl₅P² (dP₄)"],
        labels_reversed: false,
    },
    FanPanel {
        model: ModelId::D8D8,
        boundary: [(1, 0), (1, -1)],
        walls: &[],
        chambers: &["Bl₉P² ∪ Bl₉P²"],
        labels_reversed: false,
    },
    FanPanel {
        model: ModelId::D16,
        boundary: [(1, 0), (2, -1)],
        walls: &[],
        chambers: &["Bl₁₇P² ∪ P¹×P¹"],
        labels_reversed: false,
    },
    FanPanel {
        model: ModelId::D17,
        boundary: [(1, 0), (3, -2)],
        walls: &[],
        chambers: &["Bl₁₈P² ∪ P²"],
        labels_reversed: false,
    },
    FanPanel {
        model: ModelId::E8D9,
        boundary: [(1, 0), (1, -2)],
        walls: &[],
        chambers: &["Bl₈P² (dP₁) ∪ Bl₁₀P²"],
        labels_reversed: true,
    },
    FanPanel {
        model: ModelId::E7E7A3,
        boundary: [(1, 0), (1, -2)],
        walls: &[(1, -1)],
        chambers: &["Bl₇P² (dP₂) ∪ Bl₁₁P²", "Bl₁₁P² ∪ Bl₇P² (dP₂)"],
        labels_reversed: false,
    },
    FanPanel {
        model: ModelId::E8E8,
        boundary: [(1, 0), (1, -3)],
        walls: &[(1, -1), (1, -2)],
        chambers: &["Bl₈P² (dP₁) ∪ Bl₁₀P²", "Bl₉P² ∪ Bl₉P²", "Bl₁₀P² ∪ Bl₈P² (dP₁)"],
        labels_reversed: false,
    },
];

#[derive(Clone, Debug, Serialize)]
pub struct FanResult {
    pub model: ModelId,
    pub fan: LiftFan,
    pub diffs: Vec<String>,
}

impl FanResult {
    pub fn passed(&self) -> bool {
        self.diffs.is_empty()
    }
}

pub fn compare_panel(panel: &FanPanel, fan: &LiftFan) -> Vec<String> {
    let mut diffs = Vec::new();
    let ray = |(m, n): (i64, i64)| RayPoint::new(m, n);
    for (i, &want) in panel.boundary.iter().enumerate() {
        if fan.boundary[i] != ray(want) {
            diffs.push(format!("boundary {i}: got {}, want {}", fan.boundary[i], ray(want)));
        }
    }
    let want_walls: Vec<RayPoint> = panel.walls.iter().copied().map(ray).collect();
    if fan.walls != want_walls {
        diffs.push(format!("walls: got {:?}, want {:?}", fan.walls, want_walls));
    }
    let labels: Vec<String> = fan.chambers.iter().map(Chamber::label).collect();
    if labels != panel.chambers {
        diffs.push(format!("chambers: got {labels:?}, want {:?}", panel.chambers));
    }
    diffs
}

pub fn verify_fig5() -> Result<Vec<FanResult>, ChamberError> {
    FAN_PANELS.par_iter()
        .map(|panel| {
            let fan = lift_fan(&catalogue_model(panel.model)?)?;
            let diffs = compare_panel(panel, &fan);
            Ok(FanResult { model: panel.model, fan, diffs })
        })
        .collect()
}

/// Self-intersection of mh + nξ, which is 4m² in every state.
pub fn ray_square(state: &SurfaceModel, ray: RayPoint) -> Result<BigInt, ModelError> {
    let c = ray.class(state)?;
    Ok(state.intersect(&c, &c))
}
