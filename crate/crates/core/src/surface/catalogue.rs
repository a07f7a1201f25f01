use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{BasisKind, Component, Dictionary, ModelError, SurfaceKind, SurfaceModel};
use crate::lattice::LatticeVector;
use crate::relations::{FormalDivisor, PointSymbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ModelId {
    A15,
    A11E6,
    D12D5,
    D8D8,
    D16,
    D17,
    E8D9,
    E7E7A3,
    E8E8,
    Custom,
}

impl ModelId {
    pub const CATALOGUE: [ModelId; 9] = [
        ModelId::A15,
        ModelId::A11E6,
        ModelId::D12D5,
        ModelId::D8D8,
        ModelId::D16,
        ModelId::D17,
        ModelId::E8D9,
        ModelId::E7E7A3,
        ModelId::E8E8,
    ];

    /// The singular degeneration obtained by contracting every exceptional curve at the ray h.
    pub fn singular_model(self) -> Option<&'static str> {
        Some(match self {
            ModelId::A15 => "two quadrics intersecting transversally",
            ModelId::A11E6 => "a plane intersecting a cubic surface",
            ModelId::D12D5 => "quartic surface non-normal along a conic",
            ModelId::D8D8 => "quartic surface non-normal along a line",
            ModelId::D16 => "quartic surface non-normal along a twisted cubic",
            ModelId::D17 => "double cover of P(1,1,2) branched along a doubled twisted cubic and a conic",
            ModelId::E8D9 => "quartic surface with an Ẽ8 singularity and no line through it",
            ModelId::E7E7A3 => "quartic surface with an Ẽ7 singularity",
            ModelId::E8E8 => "quartic surface with an Ẽ8 singularity and a line through it",
            ModelId::Custom => return None,
        })
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ModelId::A15 => "A15",
            ModelId::A11E6 => "A11E6",
            ModelId::D12D5 => "D12D5",
            ModelId::D8D8 => "D8D8",
            ModelId::D16 => "D16",
            ModelId::D17 => "D17",
            ModelId::E8D9 => "E8D9",
            ModelId::E7E7A3 => "E7E7A3",
            ModelId::E8E8 => "E8E8",
            ModelId::Custom => "CUSTOM",
        };
        f.write_str(s)
    }
}

impl FromStr for ModelId {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, ModelError> {
        ModelId::CATALOGUE
            .into_iter()
            .chain([ModelId::Custom])
            .find(|id| id.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| ModelError::UnknownModel(s.to_string()))
    }
}

/// Construction 1: `n` points on V0 and `k − n` on V1.
pub fn build_model(
    base0: SurfaceKind,
    base1: SurfaceKind,
    n: usize,
    h: Option<LatticeVector>,
) -> Result<SurfaceModel, ModelError> {
    let k = base0.k0() + base1.k0();
    if n > k {
        return Err(ModelError::PointsOutOfRange { n, k });
    }
    let mut m = SurfaceModel::assemble([base0, base1], [n, k - n]);
    if let Some(h) = h {
        m.set_h(h)?;
    }
    Ok(m)
}

/// Signed run of exceptionals, e.g. `run(V1, 2..=9, -1)` = `-e'2-…-e'9`.
fn run(c: Component, range: std::ops::RangeInclusive<u32>, k: i64) -> String {
    let prime = if c == Component::V1 { "'" } else { "" };
    range.map(|i| format!("{k:+}e{prime}{i}")).collect()
}

fn standard_dictionary(m: &SurfaceModel) -> Dictionary {
    let images = m
        .basis()
        .iter()
        .map(|b| match b.kind {
            BasisKind::Line => FormalDivisor::term(3, PointSymbol::Identity(b.home)),
            BasisKind::Section | BasisKind::Fiber => FormalDivisor::term(2, PointSymbol::Identity(b.home)),
            BasisKind::Exceptional => FormalDivisor::symbol(PointSymbol::Point(b.home, b.index)),
        })
        .collect();
    Dictionary { images, aux: Vec::new() }
}

fn divisor(s: &str) -> FormalDivisor {
    FormalDivisor::parse(s).expect("catalogue divisor literal")
}

pub fn catalogue_model(id: ModelId) -> Result<SurfaceModel, ModelError> {
    use Component::{V0, V1};
    use SurfaceKind::{P1xP1, P2};
    let (b0, b1, n, h, fibers): (_, _, _, String, &[(Component, u32)]) = match id {
        ModelId::A15 => (P1xP1, P1xP1, 16, "s+f+s'+f'".into(), &[]),
        ModelId::A11E6 => (P2, P2, 12, format!("l+3l'{}", run(V1, 1..=6, -1)), &[]),
        ModelId::D12D5 => (P2, P2, 13, format!("2l-2e1+3l'{}", run(V1, 1..=5, -1)), &[(V0, 1)]),
        ModelId::D8D8 => (P2, P2, 9, format!("l-e1+4l'-2e'1{}", run(V1, 2..=9, -1)), &[(V0, 1), (V1, 1)]),
        ModelId::D16 => (P2, P1xP1, 17, "3l-3e1+s'+2f'".into(), &[(V0, 1)]),
        ModelId::D17 => (P2, P2, 18, "3l-3e1+2l'".into(), &[(V0, 1)]),
        ModelId::E8D9 => (P2, P2, 8, format!("7l'-3e'1{}", run(V1, 2..=10, -2)), &[(V1, 1)]),
        ModelId::E7E7A3 => (P2, P2, 7, format!("6l'{}{}", run(V1, 1..=7, -2), run(V1, 8..=11, -1)), &[]),
        ModelId::E8E8 => (P2, P2, 8, format!("9l'{}-2e'9-e'10", run(V1, 1..=8, -3)), &[]),
        ModelId::Custom => return Err(ModelError::UnknownModel(id.to_string())),
    };
    let mut m = build_model(b0, b1, n, None)?;
    let hv = m.parse_vector(&h)?;
    m.set_h(hv)?;
    m.id = id;
    m.fibers = fibers
        .iter()
        .map(|&(c, i)| m.find(BasisKind::Exceptional, c, i).expect("fiber exceptional exists"))
        .collect();
    let mut dict = standard_dictionary(&m);
    if id == ModelId::D16 {
        let s = m.find(BasisKind::Section, V1, 0).expect("V1 ruling");
        let f = m.find(BasisKind::Fiber, V1, 0).expect("V1 ruling");
        dict.images[s] = divisor("3q'-p_f");
        dict.images[f] = divisor("q'+p_f");
        dict.aux.push(divisor("4p_f-4q'"));
    }
    m.dictionary = Some(dict);
    Ok(m)
}

pub fn catalogue() -> Vec<SurfaceModel> {
    ModelId::CATALOGUE.iter().map(|&id| catalogue_model(id).expect("catalogue data is valid")).collect()
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;

    use super::*;
    use crate::surface::CurveKind;

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn model(id: ModelId) -> SurfaceModel {
        catalogue_model(id).unwrap()
    }

    #[test]
    fn known_xi_matches_tags() {
        use Component::{V0, V1};
        let known = [
            (ModelId::A15, format!("-2s-2f{}+2s'+2f'", run(V0, 1..=16, 1))),
            (ModelId::A11E6, format!("-3l{}+3l'{}", run(V0, 1..=12, 1), run(V1, 1..=6, -1))),
            (ModelId::D12D5, format!("-3l{}+3l'{}", run(V0, 1..=13, 1), run(V1, 1..=5, -1))),
            (ModelId::D8D8, format!("-3l{}+3l'{}", run(V0, 1..=9, 1), run(V1, 1..=9, -1))),
            (ModelId::D16, format!("-3l{}+2s'+2f'", run(V0, 1..=17, 1))),
            (ModelId::D17, format!("-3l{}+3l'", run(V0, 1..=18, 1))),
            (ModelId::E8D9, format!("-3l{}+3l'{}", run(V0, 1..=8, 1), run(V1, 1..=10, -1))),
            (ModelId::E7E7A3, format!("-3l{}+3l'{}", run(V0, 1..=7, 1), run(V1, 1..=11, -1))),
            (ModelId::E8E8, format!("-3l{}+3l'{}", run(V0, 1..=8, 1), run(V1, 1..=10, -1))),
        ];
        for (id, xi) in known {
            let m = model(id);
            assert_eq!(m.xi(), &m.parse_vector(&xi).unwrap(), "{id}");
        }
    }

    #[test]
    fn catalogue_basics() {
        let a15 = model(ModelId::A15);
        let h = a15.h().unwrap();
        assert_eq!(a15.intersect(h, h), big(4));
        let e8e8 = model(ModelId::E8E8);
        assert_eq!(e8e8.intersect(e8e8.xi(), e8e8.xi()), big(0));
        assert_eq!(model(ModelId::D16).rank(), 20);
        for m in catalogue() {
            assert_eq!(m.rank(), 20);
            assert_eq!(m.intersect(m.h().unwrap(), m.xi()), big(0));
        }
    }

    #[test]
    fn build_model_degrees() {
        let m = build_model(SurfaceKind::P2, SurfaceKind::P2, 10, None).unwrap();
        let (e0, e1) = (m.anticanonical(Component::V0), m.anticanonical(Component::V1));
        assert_eq!(m.d(), 1);
        assert_eq!(m.intersect(&e0, &e0), big(-1));
        assert_eq!(m.intersect(&e1, &e1), big(1));
        assert_eq!(m.intersect(m.xi(), m.xi()), big(0));
        assert_eq!(build_model(SurfaceKind::P1xP1, SurfaceKind::P1xP1, 16, None).unwrap().d(), 8);
        let sym = build_model(SurfaceKind::P2, SurfaceKind::P2, 9, None).unwrap();
        assert_eq!(sym.d(), 0);
        let e0 = sym.anticanonical(Component::V0);
        assert_eq!(sym.intersect(&e0, &e0), big(0));
        assert_eq!(
            build_model(SurfaceKind::P2, SurfaceKind::P2, 19, None).unwrap_err(),
            ModelError::PointsOutOfRange { n: 19, k: 18 }
        );
    }

    #[test]
    fn build_rejects_bad_polarization() {
        let m = build_model(SurfaceKind::P2, SurfaceKind::P2, 9, None).unwrap();
        let bad = m.parse_vector("l").unwrap();
        assert!(matches!(
            build_model(SurfaceKind::P2, SurfaceKind::P2, 9, Some(bad)),
            Err(ModelError::InvalidPolarization { .. })
        ));
    }

    #[test]
    fn intersect_examples() {
        let m = model(ModelId::A11E6);
        let c = m.parse_vector(&format!("3l'{}", run(Component::V1, 1..=6, -1))).unwrap();
        assert_eq!(m.intersect(&c, &c), big(3));
        let (l, e1) = (m.parse_vector("l").unwrap(), m.parse_vector("e1").unwrap());
        assert_eq!(m.intersect(&l, &e1), big(0));
    }

    #[test]
    fn a15_flop_all() {
        let m = model(ModelId::A15);
        let es = m.exceptionals_on(Component::V0);
        let f = m.flop_all(&es).unwrap();
        let want = m.parse_vector(&format!("-2s-2f+2s'+2f'{}", run(Component::V0, 1..=16, -1))).unwrap();
        assert_eq!(f.xi(), &want);
        assert_eq!(f.surface_name(Component::V0), "P¹×P¹");
        assert_eq!(f.surface_name(Component::V1), "Bl₁₆(P¹×P¹)");
        assert_eq!(m.flop(es[3]).unwrap().flop(es[3]).unwrap(), m);
    }

    #[test]
    fn e7_transported_h() {
        let m = model(ModelId::E7E7A3);
        let es: Vec<usize> = (8..=11).map(|i| m.find(BasisKind::Exceptional, Component::V1, i).unwrap()).collect();
        let f = m.flop_all(&es).unwrap();
        let want = m
            .parse_vector(&format!("{}+6l'{}", run(Component::V1, 8..=11, 1), run(Component::V1, 1..=7, -2)))
            .unwrap();
        let h = f.h().unwrap();
        assert_eq!(h, &want);
        assert_eq!(f.intersect(h, h), big(4));
    }

    #[test]
    fn flop_rejects_base_class() {
        let m = model(ModelId::D17);
        assert_eq!(m.flop(0).unwrap_err(), ModelError::NotExceptional("l".into()));
    }

    #[test]
    fn curve_catalogue_examples() {
        let has_moving = |m: &SurfaceModel, label: &str, c: Component| {
            m.curve_catalogue().iter().any(|e| e.label == label && e.component == c && e.kind == CurveKind::Moving)
        };
        assert!(has_moving(&model(ModelId::D12D5), "l-e1", Component::V0));
        assert!(has_moving(&model(ModelId::E8E8), "l", Component::V0));
        let a15 = model(ModelId::A15).curve_catalogue();
        assert_eq!(a15.iter().filter(|c| c.is_floppable()).count(), 16);
    }

    #[test]
    fn nef_report_examples() {
        let a15 = model(ModelId::A15);
        let r = a15.nef_report(a15.h().unwrap());
        let zero: Vec<String> = r.zero_set.iter().map(|c| c.label.clone()).collect();
        assert_eq!(zero, (1..=16).map(|i| format!("e{i}")).collect::<Vec<_>>());
        assert!(r.negative_set.is_empty());

        let d8 = model(ModelId::D8D8);
        let c = d8.h().unwrap() - d8.xi();
        let zero: Vec<String> = d8.nef_report(&c).zero_set.iter().map(|c| c.label.clone()).collect();
        for want in (2..=9).map(|i| format!("e'{i}")).chain(["l'-e'1".to_string()]) {
            assert!(zero.contains(&want), "{want} missing from {zero:?}");
        }

        let twice = d8.h().unwrap().scale(&big(2));
        let (a, b) = (d8.nef_report(d8.h().unwrap()), d8.nef_report(&twice));
        assert_eq!(a.zero_set, b.zero_set);
        assert_eq!(a.negative_set, b.negative_set);
    }

    #[test]
    fn names() {
        let m = model(ModelId::E8E8);
        assert_eq!(m.surface_name(Component::V1), "Bl₁₀P²");
        assert_eq!(m.surface_name(Component::V0), "Bl₈P² (dP₁)");
    }

    #[test]
    fn parse_reports_alphabet() {
        let m = model(ModelId::A11E6);
        match m.parse_vector("3l-e13") {
            Err(ModelError::UnknownSymbol { symbol, alphabet }) => {
                assert_eq!(symbol, "e13");
                assert_eq!(alphabet, "{l, e1..e12, l', e'1..e'6}");
            }
            other => panic!("{other:?}"),
        }
        let v = m.parse_vector("3l-e1-e2+2e'3").unwrap();
        assert_eq!(m.format_vector(&v), "3l-e1-e2+2e'3");
        assert_eq!(m.parse_vector("2e3'").unwrap(), m.parse_vector("2e'3").unwrap());
    }

    #[test]
    fn swap_negates_xi() {
        let m = model(ModelId::E8D9);
        let s = m.swap();
        assert_eq!(s.surface_name(Component::V0), "Bl₁₀P²");
        assert_eq!(s.d(), 1);
        let xi_back = s.swap();
        assert_eq!(xi_back, m);
        let toggle = |name: String| match name.find('\'') {
            Some(_) => name.replace('\'', ""),
            None if name.len() == 1 => format!("{name}'"),
            None => format!("{}'{}", &name[..1], &name[1..]),
        };
        for (i, b) in m.basis().iter().enumerate() {
            let j = s.basis().iter().position(|c| c.name() == toggle(b.name())).unwrap();
            assert_eq!(s.xi().0[j], -&m.xi().0[i]);
            assert_eq!(s.h().unwrap().0[j], m.h().unwrap().0[i]);
        }
    }
}
