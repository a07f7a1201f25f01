use degen_atlas::chamber::*;
use degen_atlas::surface::{catalogue_model, Component, CurveSet, ModelId, SurfaceModel};
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn labels(hit: &WallHit) -> Vec<String> {
    hit.zero_classes.iter().map(|c| c.label.clone()).collect()
}

fn model(id: ModelId) -> SurfaceModel {
    catalogue_model(id).unwrap()
}

#[test]
fn first_walls() {
    let a15 = model(ModelId::A15);
    let hit = next_wall(&a15, Direction::Plus, &BigRational::zero(), CurveSet::Standard).unwrap().unwrap();
    assert_eq!(hit.eps, q(0, 1));
    assert_eq!(labels(&hit), (1..=16).map(|i| format!("e{i}")).collect::<Vec<_>>());

    let e8 = model(ModelId::E8E8);
    let hit = next_wall(&e8, Direction::Minus, &BigRational::zero(), CurveSet::Standard).unwrap().unwrap();
    assert_eq!((labels(&hit), hit.eps), (vec!["e'10".to_string()], q(1, 1)));

    let d17 = model(ModelId::D17);
    let hit = next_wall(&d17, Direction::Minus, &BigRational::zero(), CurveSet::Standard).unwrap().unwrap();
    assert_eq!(hit.eps, q(2, 3));
    let class = RayPoint::new(3, -2).class(&d17).unwrap();
    assert!(d17.restricted(&class, Component::V1).is_zero());
}

#[test]
fn stable_models() {
    let a15 = model(ModelId::A15);
    let s = stable_model_at(&a15, RayPoint::new(1, 0)).unwrap();
    assert_eq!(s.singular_model, Some("two quadrics intersecting transversally"));
    let Verdict::Birational { contracted_curves } = s.verdict(Component::V0) else { panic!() };
    assert_eq!(contracted_curves.len(), 16);

    let d17 = model(ModelId::D17);
    let s = stable_model_at(&d17, RayPoint::new(3, -2)).unwrap();
    assert_eq!(s.verdict(Component::V1), &Verdict::ContractedToPoint);

    let e8 = model(ModelId::E8E8);
    let s = stable_model_at(&e8, RayPoint::new(2, -1)).unwrap();
    for c in Component::BOTH {
        assert_eq!(s.verdict(c), &Verdict::Birational { contracted_curves: vec![] });
    }
    assert_eq!(s.components.iter().map(|c| c.restricted_square).sum::<i64>(), 16);

    let d16 = model(ModelId::D16);
    let s = stable_model_at(&d16, RayPoint::new(2, -1)).unwrap();
    assert_eq!(s.verdict(Component::V1), &Verdict::ContractedToCurve { class: "2f'".into() });

    assert!(matches!(stable_model_at(&e8, RayPoint::new(1, -2)), Err(ChamberError::NotNef { .. })));
}

#[test]
fn published_events() {
    let fan = lift_fan(&model(ModelId::E7E7A3)).unwrap();
    let wall = fan.events.iter().find(|e| e.kind == EventKind::InteriorFlop).unwrap();
    assert_eq!(wall.ray, RayPoint::new(1, -1));
    assert_eq!(wall.zero_classes, ["e'8", "e'9", "e'10", "e'11"]);

    let fan = lift_fan(&model(ModelId::A11E6)).unwrap();
    let top = &fan.events[0];
    assert_eq!(top.ray, RayPoint::new(3, 1));
    assert_eq!(top.stable_model.verdict(Component::V0), &Verdict::ContractedToPoint);

    let fan = lift_fan(&model(ModelId::E8D9)).unwrap();
    let bottom = fan.events.last().unwrap();
    assert_eq!(bottom.ray, RayPoint::new(1, -2));
    assert_eq!(bottom.kind, EventKind::BoundaryMovingClass);
    let mut want: Vec<String> = (2..=10).map(|i| format!("e'{i}")).collect();
    want.push("l'-e'1".into());
    assert_eq!(bottom.zero_classes, want);
}

#[test]
fn all_panels_match() {
    let results = verify_fig5().unwrap();
    assert_eq!(results.len(), 9);
    for r in &results {
        assert!(r.passed(), "{}: {:?}", r.model, r.diffs);
        assert_eq!(r.fan.chambers.len(), r.fan.walls.len() + 1);
    }
    let counts: Vec<usize> = results.iter().map(|r| r.fan.chambers.len()).collect();
    assert_eq!(counts, [2, 2, 1, 1, 1, 1, 1, 2, 3]);
}

#[test]
fn extended_catalogue_gives_same_fan() {
    for id in ModelId::CATALOGUE {
        let m = model(id);
        let a = lift_fan_with(&m, CurveSet::Standard).unwrap();
        let b = lift_fan_with(&m, CurveSet::Full).unwrap();
        assert_eq!(a.boundary, b.boundary, "{id}");
        assert_eq!(a.walls, b.walls, "{id}");
        let la: Vec<String> = a.chambers.iter().map(Chamber::label).collect();
        let lb: Vec<String> = b.chambers.iter().map(Chamber::label).collect();
        assert_eq!(la, lb, "{id}");
    }
}

#[test]
fn boundaries_nef_and_interiors_ample() {
    for id in ModelId::CATALOGUE {
        let fan = lift_fan(&model(id)).unwrap();
        let first = &fan.chambers[0].state;
        let last = &fan.chambers[fan.chambers.len() - 1].state;
        for (state, ray) in [(first, fan.boundary[0]), (last, fan.boundary[1])] {
            let report = state.nef_report(&ray.class(state).unwrap());
            assert!(report.negative_set.is_empty(), "{id} {ray}");
        }
        for ch in &fan.chambers {
            let report = ch.state.nef_report(&ch.interior.class(&ch.state).unwrap());
            assert!(report.is_nonnegative && report.zero_set.is_empty(), "{id} {}", ch.interior);
        }
    }
}

#[test]
fn neighbouring_chambers_differ_by_recorded_flops() {
    for id in ModelId::CATALOGUE {
        let fan = lift_fan(&model(id)).unwrap();
        let walls: Vec<&WallEvent> = fan.events.iter().filter(|e| e.kind == EventKind::InteriorFlop).collect();
        for (i, wall) in walls.iter().enumerate() {
            let (upper, lower) = (&fan.chambers[i].state, &fan.chambers[i + 1].state);
            let flops: Vec<usize> = wall
                .zero_classes
                .iter()
                .map(|name| lower.basis().iter().position(|b| &b.name() == name).unwrap())
                .collect();
            let moved_up = lower.flop_all(&flops).unwrap();
            let moved_down = upper.flop_all(&flops).unwrap();
            assert!(moved_up.basis() == upper.basis() || moved_down.basis() == lower.basis(), "{id} wall {}", wall.ray);
        }
    }
}

#[test]
fn fan_json_shape() {
    let fan = lift_fan(&model(ModelId::E8E8)).unwrap();
    let v = serde_json::to_value(&fan).unwrap();
    assert_eq!(v["boundary"], serde_json::json!([[1, 0], [1, -3]]));
    assert_eq!(v["walls"], serde_json::json!([[1, -1], [1, -2]]));
    assert_eq!(v["chambers"][1]["label0"], "Bl₉P²");
    assert_eq!(v["chambers"][1]["flops"], serde_json::json!(["e'10"]));
    let text = fan.diagram();
    for ray in ["h ", "h-ξ", "h-2ξ", "h-3ξ"] {
        assert!(text.contains(ray), "{text}");
    }
}

#[test]
fn ray_labels() {
    let shown: Vec<String> =
        [(2, 1), (2, -1), (1, 0), (3, -2), (1, -1), (0, 1)].iter().map(|&(m, n)| RayPoint::new(m, n).to_string()).collect();
    assert_eq!(shown, ["2h+ξ", "2h-ξ", "h", "3h-2ξ", "h-ξ", "ξ"]);
    assert_eq!(RayPoint::new(4, -2), RayPoint::new(2, -1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ray_square_is_preserved(which in 0usize..9, m in 1i64..6, n in -6i64..6, picks in prop::collection::vec(0usize..32, 0..6)) {
        let base = model(ModelId::CATALOGUE[which]);
        let exc: Vec<usize> = (0..base.rank()).filter(|&i| base.basis()[i].is_exceptional()).collect();
        let order: Vec<usize> = picks.iter().map(|p| exc[p % exc.len()]).collect();
        let state = base.flop_all(&order).unwrap();
        let r = RayPoint { m, n };
        prop_assert_eq!(ray_square(&state, r).unwrap(), num_bigint::BigInt::from(4 * m * m));
    }
}
