use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{BasisElement, BasisKind, Component, ModelError, ModelId, SurfaceKind};
use crate::lattice::{GramForm, IntMatrix, LatticeVector};
use crate::relations::FormalDivisor;

/// Images of basis classes on the double curve, plus model-specific relations among auxiliary points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dictionary {
    pub images: Vec<FormalDivisor>,
    pub aux: Vec<FormalDivisor>,
}

impl Dictionary {
    fn swapped(&self, perm: &[usize]) -> Dictionary {
        Dictionary {
            images: perm.iter().map(|&i| self.images[i].swapped()).collect(),
            aux: self.aux.iter().map(FormalDivisor::swapped).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    /// A basis exceptional class; flopping it is a basis operation.
    Exceptional { basis: usize },
    /// l − e_i − e_j on a P² component.
    TwoPointLine,
    /// Lines, rulings and conic-bundle fibers.
    Moving,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveEntry {
    pub label: String,
    pub component: Component,
    #[serde(skip)]
    pub cls: LatticeVector,
    pub kind: CurveKind,
}

impl CurveEntry {
    pub fn is_floppable(&self) -> bool {
        !matches!(self.kind, CurveKind::Moving)
    }
}

/// Which curves to include when testing nefness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveSet {
    /// Exceptionals and moving classes.
    Standard,
    /// Standard plus all two-point lines.
    Full,
}

#[derive(Clone, Debug, Serialize)]
pub struct NefReport {
    pub is_nonnegative: bool,
    pub zero_set: Vec<CurveEntry>,
    pub negative_set: Vec<CurveEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceModel {
    pub id: ModelId,
    pub(super) basis: Vec<BasisElement>,
    pub(super) gram: GramForm,
    pub(super) base: [SurfaceKind; 2],
    pub(super) h: Option<LatticeVector>,
    pub(super) xi: LatticeVector,
    pub(super) dictionary: Option<Dictionary>,
    /// Exceptionals e for which l − e (on e's home component) is a conic-bundle fiber.
    pub(super) fibers: Vec<usize>,
    pub(super) flop_history: Vec<usize>,
    pub(super) swapped: bool,
}

impl SurfaceModel {
    pub(super) fn assemble(base: [SurfaceKind; 2], counts: [usize; 2]) -> SurfaceModel {
        let mut basis = Vec::new();
        for c in Component::BOTH {
            let kinds: &[BasisKind] = match base[c.index()] {
                SurfaceKind::P2 => &[BasisKind::Line],
                SurfaceKind::P1xP1 => &[BasisKind::Section, BasisKind::Fiber],
            };
            basis.extend(kinds.iter().map(|&kind| BasisElement { kind, index: 0, home: c, tag: c }));
            basis.extend((1..=counts[c.index()] as u32).map(|index| BasisElement {
                kind: BasisKind::Exceptional,
                index,
                home: c,
                tag: c,
            }));
        }
        let n = basis.len();
        let mut g = IntMatrix::zeros(n, n);
        for (i, b) in basis.iter().enumerate() {
            g.set(i, i, b.self_pairing());
            if b.kind == BasisKind::Section {
                g.set(i, i + 1, 1);
                g.set(i + 1, i, 1);
            }
        }
        let mut m = SurfaceModel {
            id: ModelId::Custom,
            basis,
            gram: GramForm::new(g).expect("symmetric by construction"),
            base,
            h: None,
            xi: LatticeVector::zeros(n),
            dictionary: None,
            fibers: Vec::new(),
            flop_history: Vec::new(),
            swapped: false,
        };
        m.xi = m.xi_from_tags();
        m
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn gram(&self) -> &GramForm {
        &self.gram
    }

    pub fn base(&self, c: Component) -> SurfaceKind {
        self.base[c.index()]
    }

    pub fn h(&self) -> Result<&LatticeVector, ModelError> {
        self.h.as_ref().ok_or(ModelError::NoPolarization)
    }

    pub fn xi(&self) -> &LatticeVector {
        &self.xi
    }

    pub fn dictionary(&self) -> Option<&Dictionary> {
        self.dictionary.as_ref()
    }

    pub fn with_dictionary(mut self, d: Dictionary) -> SurfaceModel {
        self.dictionary = Some(d);
        self
    }

    pub fn flop_history(&self) -> &[usize] {
        &self.flop_history
    }

    /// True once `swap` has been applied an odd number of times.
    pub fn is_swapped(&self) -> bool {
        self.swapped
    }

    pub fn intersect(&self, a: &LatticeVector, b: &LatticeVector) -> BigInt {
        self.gram.pairing(a, b)
    }

    pub fn unit(&self, i: usize) -> LatticeVector {
        LatticeVector::unit(self.rank(), i)
    }

    pub fn find(&self, kind: BasisKind, home: Component, index: u32) -> Option<usize> {
        self.basis.iter().position(|b| b.kind == kind && b.home == home && b.index == index)
    }

    fn line_of(&self, c: Component) -> Option<usize> {
        self.find(BasisKind::Line, c, 0)
    }

    /// Exceptional basis indices currently tagged to `c`.
    pub fn exceptionals_on(&self, c: Component) -> Vec<usize> {
        (0..self.rank()).filter(|&i| self.basis[i].is_exceptional() && self.basis[i].tag == c).collect()
    }

    /// Anticanonical class of component `c` in the current tagging.
    pub fn anticanonical(&self, c: Component) -> LatticeVector {
        let mut v = LatticeVector::zeros(self.rank());
        for (i, b) in self.basis.iter().enumerate() {
            if b.home != c && b.tag != c {
                continue;
            }
            let k = match b.kind {
                BasisKind::Line => 3,
                BasisKind::Section | BasisKind::Fiber => 2,
                BasisKind::Exceptional if b.tag == c => -1,
                BasisKind::Exceptional => 0,
            };
            v.0[i] = BigInt::from(k);
        }
        v
    }

    pub fn xi_from_tags(&self) -> LatticeVector {
        &self.anticanonical(Component::V1) - &self.anticanonical(Component::V0)
    }

    /// d = (points on V0) − k₀(V0), so that E₀² = −d.
    pub fn d(&self) -> i64 {
        self.exceptionals_on(Component::V0).len() as i64 - self.base(Component::V0).k0() as i64
    }

    pub(super) fn set_h(&mut self, h: LatticeVector) -> Result<(), ModelError> {
        if h.dim() != self.rank() {
            return Err(ModelError::Dimension { expected: self.rank(), found: h.dim() });
        }
        let h2 = self.intersect(&h, &h);
        let hx = self.intersect(&h, &self.xi);
        if h2 != BigInt::from(4) || !hx.is_zero() {
            return Err(ModelError::InvalidPolarization { h2: h2.to_string(), h_xi: hx.to_string() });
        }
        self.h = Some(h);
        Ok(())
    }

    /// Moves the exceptional curve `e` to the other component, reflecting every tracked class.
    pub fn flop(&self, e: usize) -> Result<SurfaceModel, ModelError> {
        let b = self.basis.get(e).ok_or(ModelError::Dimension { expected: self.rank(), found: e })?;
        if !b.is_exceptional() {
            return Err(ModelError::NotExceptional(b.name()));
        }
        let ev = self.unit(e);
        if self.intersect(&ev, &ev) != BigInt::from(-1) || !self.intersect(&ev, &self.anticanonical(b.tag)).is_one() {
            return Err(ModelError::NotFloppable(b.name()));
        }
        let mut next = self.clone();
        let reflect = |v: &LatticeVector| {
            let mut w = v.clone();
            w.0[e] = -&w.0[e];
            w
        };
        next.h = self.h.as_ref().map(reflect);
        let transported = reflect(&self.xi);
        next.basis[e].tag = b.tag.other();
        next.xi = next.xi_from_tags();
        if next.xi != transported {
            return Err(ModelError::TransportMismatch(b.name()));
        }
        if next.flop_history.last() == Some(&e) {
            next.flop_history.pop();
        } else {
            next.flop_history.push(e);
        }
        Ok(next)
    }

    pub fn flop_all(&self, es: &[usize]) -> Result<SurfaceModel, ModelError> {
        es.iter().try_fold(self.clone(), |m, &e| m.flop(e))
    }

    /// Exchanges the roles of V0 and V1: ξ ↦ −ξ, names toggle primes, h is relabelled.
    pub fn swap(&self) -> SurfaceModel {
        let perm: Vec<usize> = Component::BOTH
            .iter()
            .rev()
            .flat_map(|&c| (0..self.rank()).filter(move |&i| self.basis[i].home == c))
            .collect();
        let mut inverse = vec![0; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inverse[old] = new;
        }
        let permute = |v: &LatticeVector| LatticeVector(perm.iter().map(|&i| v.0[i].clone()).collect());
        let basis = perm
            .iter()
            .map(|&i| {
                let b = &self.basis[i];
                BasisElement { home: b.home.other(), tag: b.tag.other(), ..b.clone() }
            })
            .collect();
        let gram_rows: Vec<Vec<BigInt>> = perm
            .iter()
            .map(|&i| perm.iter().map(|&j| self.gram.matrix().get(i, j).clone()).collect())
            .collect();
        let mut m = SurfaceModel {
            id: self.id,
            basis,
            gram: GramForm::new(IntMatrix::from_rows(gram_rows)).expect("permuted symmetric"),
            base: [self.base[1], self.base[0]],
            h: self.h.as_ref().map(permute),
            xi: LatticeVector::zeros(self.rank()),
            dictionary: self.dictionary.as_ref().map(|d| d.swapped(&perm)),
            fibers: self.fibers.iter().map(|&e| inverse[e]).collect(),
            flop_history: self.flop_history.iter().map(|&e| inverse[e]).collect(),
            swapped: !self.swapped,
        };
        m.xi = m.xi_from_tags();
        debug_assert_eq!(m.xi, -permute(&self.xi));
        m
    }

    /// Coordinates of `c` supported on basis elements tagged `comp`.
    pub fn restricted(&self, c: &LatticeVector, comp: Component) -> LatticeVector {
        LatticeVector(
            c.coords()
                .iter()
                .zip(&self.basis)
                .map(|(x, b)| if b.tag == comp { x.clone() } else { BigInt::zero() })
                .collect(),
        )
    }

    pub fn curves(&self, set: CurveSet) -> Vec<CurveEntry> {
        let mut out = Vec::new();
        for (i, b) in self.basis.iter().enumerate() {
            if b.is_exceptional() {
                out.push(CurveEntry {
                    label: b.name(),
                    component: b.tag,
                    cls: self.unit(i),
                    kind: CurveKind::Exceptional { basis: i },
                });
            }
        }
        if set == CurveSet::Full {
            for c in Component::BOTH {
                let Some(l) = self.line_of(c) else { continue };
                let es = self.exceptionals_on(c);
                for (a, &i) in es.iter().enumerate() {
                    for &j in &es[a + 1..] {
                        let mut v = self.unit(l);
                        v.0[i] -= 1;
                        v.0[j] -= 1;
                        out.push(CurveEntry {
                            label: format!("{}-{}-{}", self.basis[l].name(), self.basis[i].name(), self.basis[j].name()),
                            component: c,
                            cls: v,
                            kind: CurveKind::TwoPointLine,
                        });
                    }
                }
            }
        }
        for (i, b) in self.basis.iter().enumerate() {
            if !b.is_exceptional() {
                out.push(CurveEntry { label: b.name(), component: b.tag, cls: self.unit(i), kind: CurveKind::Moving });
            }
        }
        for &e in &self.fibers {
            let eb = &self.basis[e];
            if eb.tag != eb.home {
                continue;
            }
            let Some(l) = self.line_of(eb.home) else { continue };
            let mut v = self.unit(l);
            v.0[e] -= 1;
            out.push(CurveEntry {
                label: format!("{}-{}", self.basis[l].name(), eb.name()),
                component: eb.home,
                cls: v,
                kind: CurveKind::Moving,
            });
        }
        out
    }

    /// Exceptionals, two-point lines and moving classes.
    pub fn curve_catalogue(&self) -> Vec<CurveEntry> {
        self.curves(CurveSet::Full)
    }

    pub fn nef_report_on(&self, c: &LatticeVector, set: CurveSet) -> NefReport {
        let mut zero_set = Vec::new();
        let mut negative_set = Vec::new();
        for curve in self.curves(set) {
            let v = self.intersect(c, &curve.cls);
            if v.is_zero() {
                zero_set.push(curve);
            } else if v.is_negative() {
                negative_set.push(curve);
            }
        }
        NefReport { is_nonnegative: negative_set.is_empty(), zero_set, negative_set }
    }

    pub fn nef_report(&self, c: &LatticeVector) -> NefReport {
        self.nef_report_on(c, CurveSet::Full)
    }

    pub fn surface_name(&self, c: Component) -> String {
        let k = self.exceptionals_on(c).len();
        match (self.base(c), k) {
            (kind, 0) => kind.pretty().to_string(),
            (SurfaceKind::P2, k) if k <= 8 => format!("Bl{}P² (dP{})", subscript(k), subscript(9 - k)),
            (SurfaceKind::P2, k) => format!("Bl{}P²", subscript(k)),
            (SurfaceKind::P1xP1, k) => format!("Bl{}(P¹×P¹)", subscript(k)),
        }
    }

    /// Both component names joined as "V0 ∪ V1".
    pub fn pair_name(&self) -> String {
        format!("{} ∪ {}", self.surface_name(Component::V0), self.surface_name(Component::V1))
    }

    pub fn export(&self) -> ModelExport {
        ModelExport {
            id: self.id.to_string(),
            base: self.base,
            basis: self
                .basis
                .iter()
                .map(|b| BasisExport { name: b.name(), home: b.home, tag: b.tag, self_pairing: b.self_pairing() })
                .collect(),
            gram: self.gram.clone(),
            h: self.h.clone(),
            xi: self.xi.clone(),
            d: self.d(),
            names: [self.surface_name(Component::V0), self.surface_name(Component::V1)],
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BasisExport {
    pub name: String,
    pub home: Component,
    pub tag: Component,
    pub self_pairing: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelExport {
    pub id: String,
    pub base: [SurfaceKind; 2],
    pub basis: Vec<BasisExport>,
    pub gram: GramForm,
    pub h: Option<LatticeVector>,
    pub xi: LatticeVector,
    pub d: i64,
    pub names: [String; 2],
}

pub(crate) fn subscript(n: usize) -> String {
    const DIGITS: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];
    n.to_string().chars().map(|c| DIGITS[c.to_digit(10).unwrap() as usize]).collect()
}
