use std::collections::BTreeSet;

use craft_core::geom::{Axis, PartClass, PartLabel, Primitive, RigidTransform, Vec3};
use craft_core::matching::{
    anchor_candidates, find_anchor, find_largest_part, match_remaining, normalize_parts, pair_error, propose,
};
use craft_core::{CraftError, PrimitivePart, SceneObject};
use proptest::prelude::*;

fn part(id: usize, p: Primitive<f64>) -> PrimitivePart {
    PrimitivePart {
        id,
        label: PartLabel::Class(if p.kind() == craft_core::geom::ShapeKind::Cylinder {
            PartClass::Wheel
        } else {
            PartClass::TruckBody
        }),
        primitive: p,
        transform: RigidTransform::identity(),
    }
}

fn arb_primitive() -> impl Strategy<Value = Primitive<f64>> {
    prop_oneof![
        (0.1f64..3.0, 0.1f64..3.0, 0.1f64..3.0).prop_map(|(a, b, c)| Primitive::cuboid(Vec3::new(a, b, c)).unwrap()),
        (0.05f64..1.0, 0.1f64..3.0).prop_map(|(r, l)| Primitive::cylinder(r, l, Axis::X).unwrap()),
    ]
}

fn arb_object(i: usize) -> impl Strategy<Value = SceneObject> {
    prop_oneof![
        (5f64..500.0, 5f64..500.0, 5f64..500.0)
            .prop_map(move |(a, b, c)| SceneObject::cuboid(format!("o{i:02}"), [a, b, c]).unwrap()),
        (2f64..100.0, 5f64..500.0).prop_map(move |(r, l)| SceneObject::cylinder(format!("o{i:02}"), r, l).unwrap()),
    ]
}

fn arb_case() -> impl Strategy<Value = (Vec<PrimitivePart>, Vec<SceneObject>)> {
    let parts = prop::collection::vec(arb_primitive(), 1..5)
        .prop_map(|ps| ps.into_iter().enumerate().map(|(i, p)| part(i, p)).collect::<Vec<_>>());
    let scene = (4usize..10).prop_flat_map(|n| (0..n).map(arb_object).collect::<Vec<_>>());
    (parts, scene)
}

fn ids(r: &Result<craft_core::CraftProposal, CraftError>) -> Option<Vec<(usize, String)>> {
    r.as_ref().ok().map(|p| {
        let mut v: Vec<_> = p.assignments.iter().map(|a| (a.part_id, a.object_id.clone())).collect();
        v.sort();
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn proposals_are_injective_and_shape_compatible((parts, scene) in arb_case()) {
        if let Ok(p) = propose(&parts, &scene) {
            let used: BTreeSet<_> = p.object_ids().into_iter().collect();
            prop_assert_eq!(used.len(), p.assignments.len());
            prop_assert_eq!(p.assignments.len(), parts.len());
            for a in &p.assignments {
                let o = scene.iter().find(|o| o.id == a.object_id).unwrap();
                prop_assert_eq!(o.shape(), parts[a.part_id].primitive.kind());
                prop_assert_eq!(a.shape, o.shape());
            }
        }
    }

    #[test]
    fn selection_is_scale_invariant((parts, scene) in arb_case(), k in prop::sample::select(vec![0.5, 2.0, 4.0, 0.25, 8.0])) {
        // power-of-two factors keep every normalized value bit-identical
        let base = ids(&propose(&parts, &scene));
        let scaled_scene: Vec<_> = scene.iter().map(|o| o.scaled(k)).collect();
        prop_assert_eq!(&base, &ids(&propose(&parts, &scaled_scene)));
        let scaled_parts: Vec<_> = parts
            .iter()
            .map(|p| PrimitivePart {
                primitive: match p.primitive {
                    Primitive::Cuboid { dims } => Primitive::Cuboid { dims: dims * k },
                    Primitive::Cylinder { radius, length, axis } => Primitive::Cylinder { radius: radius * k, length: length * k, axis },
                },
                ..p.clone()
            })
            .collect();
        prop_assert_eq!(&base, &ids(&propose(&scaled_parts, &scene)));
    }

    #[test]
    fn selection_is_permutation_invariant((parts, scene) in arb_case(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut shuffled = scene.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(ids(&propose(&parts, &scene)), ids(&propose(&parts, &shuffled)));
    }

    #[test]
    fn pair_errors_vanish_only_on_coincidence(a in prop::array::uniform3(0.01f64..1.0), b in prop::array::uniform3(0.01f64..1.0)) {
        let sort = |mut v: [f64; 3]| { v.sort_by(|x, y| y.partial_cmp(x).unwrap()); v };
        let (a, b) = (sort(a), sort(b));
        let e = pair_error(a, b);
        prop_assert_eq!(e.dim == 0.0, a == b);
        let ra = a.map(|v| v / a[0]);
        let rb = b.map(|v| v / b[0]);
        prop_assert_eq!(e.ratio == 0.0, ra == rb);
        prop_assert_eq!(pair_error(a, a).total, 0.0);
    }

    #[test]
    fn normalized_largest_part_leads_with_one((parts, _) in arb_case()) {
        let p_max = find_largest_part(&parts).unwrap();
        let n = normalize_parts(&parts, p_max);
        let pn = n.iter().find(|p| p.id == p_max.id).unwrap();
        prop_assert_eq!(pn.dims[0], 1.0);
        for p in &n {
            prop_assert!(p.dims[0] <= 1.0);
        }
    }
}

#[test]
fn largest_part_tie_rule_matches_exhaustive_comparison() {
    let parts = vec![
        part(0, Primitive::cuboid(Vec3::new(10.0, 2.0, 1.0)).unwrap()),
        part(1, Primitive::cuboid(Vec3::new(10.0, 2.0, 2.0)).unwrap()),
        part(2, Primitive::cylinder(1.0, 10.0, Axis::Y).unwrap()),
        part(3, Primitive::cuboid(Vec3::new(4.0, 4.0, 4.0)).unwrap()),
    ];
    // the winner beats or ties every other part on (max dim, volume), with
    // the lower id on full ties
    let best = find_largest_part(&parts).unwrap();
    for p in &parts {
        let key = |q: &PrimitivePart| (q.primitive.dim_vector()[0], q.primitive.volume());
        let (kb, kp) = (key(best), key(p));
        assert!(kb.0 > kp.0 || (kb.0 == kp.0 && (kb.1 > kp.1 || (kb.1 == kp.1 && best.id <= p.id))));
    }
    assert_eq!(best.id, 1);
}

#[test]
fn anchor_hand_run() {
    let scene = vec![
        SceneObject::cuboid("a", [100.0, 40.0, 40.0]).unwrap(),
        SceneObject::cuboid("b", [10.0, 10.0, 10.0]).unwrap(),
    ];
    let parts = vec![part(0, Primitive::cuboid(Vec3::new(10.0, 4.0, 4.0)).unwrap())];
    let n = normalize_parts(&parts, &parts[0]);
    let c = anchor_candidates(&scene, &n[0]);
    assert_eq!((c[0].rank_dims, c[0].rank_volume), (1, 1));
    assert_eq!((c[1].rank_dims, c[1].rank_volume), (2, 2));
    assert_eq!(find_anchor(&scene, &n[0]).unwrap().id, "a");
    assert_eq!(find_anchor(&scene[1..], &n[0]).unwrap().id, "b");
}

/// Per-step oracle: recomputes the argmin over every unused object of the
/// right shape given the assignments made before the step.
#[test]
fn three_parts_five_objects_follow_the_per_step_oracle() {
    let parts = vec![
        part(0, Primitive::cuboid(Vec3::new(8.0, 3.0, 2.0)).unwrap()),
        part(1, Primitive::cuboid(Vec3::new(3.0, 2.0, 1.0)).unwrap()),
        part(2, Primitive::cuboid(Vec3::new(2.5, 2.0, 2.0)).unwrap()),
    ];
    let scene = vec![
        SceneObject::cuboid("s0", [160.0, 60.0, 40.0]).unwrap(),
        SceneObject::cuboid("s1", [60.0, 40.0, 20.0]).unwrap(),
        SceneObject::cuboid("s2", [50.0, 40.0, 40.0]).unwrap(),
        SceneObject::cuboid("s3", [55.0, 45.0, 20.0]).unwrap(),
        SceneObject::cuboid("s4", [20.0, 20.0, 20.0]).unwrap(),
    ];
    let p_max = find_largest_part(&parts).unwrap();
    let n = normalize_parts(&parts, p_max);
    let anchor = find_anchor(&scene, &n[0]).unwrap();
    let steps = match_remaining(&n, p_max.id, &scene, anchor).unwrap();
    let s = anchor.dim_vector()[0];
    let mut used = vec![anchor.id.clone()];
    for step in &steps {
        let pn = n.iter().find(|p| p.id == step.part_id).unwrap();
        let best = scene
            .iter()
            .filter(|o| !used.contains(&o.id))
            .map(|o| (pair_error(pn.dims, o.dim_vector().map(|v| v / s)).total, o.id.clone()))
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)))
            .unwrap();
        assert_eq!(step.object_id, best.1);
        used.push(best.1);
    }
    assert_eq!(steps.len(), 2);
}
