use craft_core::geom::templates::generate_template;
use craft_core::geom::{ObjectClass, PartClass, Vec3};
use craft_core::poseopt::{
    loss_dist, loss_iou, loss_miou, optimize_hypothesis, select_best, OptimConfig, PoseHypothesis,
};
use craft_core::raster::{render_instances, render_labels, LabelMap, Mask, SilhouetteRenderer};
use craft_core::{Camera, PoseResult};
use proptest::prelude::*;

fn arb_labels(w: usize) -> impl Strategy<Value = LabelMap> {
    prop::collection::vec(0u8..4, w * w).prop_map(move |v| {
        let classes = [PartClass::TableSurface, PartClass::FurnitureLeg, PartClass::ChairBack];
        let masks: Vec<(PartClass, Mask)> = classes
            .iter()
            .enumerate()
            .map(|(k, &c)| (c, Mask::from_fn(w, w, |x, y| v[y * w + x] == k as u8 + 1)))
            .collect();
        LabelMap::from_class_masks(w, w, &masks)
    })
}

fn result(template: &str, index: usize, losses: (f64, f64, f64)) -> PoseResult {
    let cfg = OptimConfig::default();
    PoseResult {
        template_id: template.to_string(),
        hypothesis_index: index,
        hypothesis: PoseHypothesis::new(Camera::new(0.0, 0.0, 2.0, 8, 8)),
        render: LabelMap::empty(8, 8),
        l_iou: losses.0,
        l_miou: losses.1,
        l_dist: losses.2,
        l_total: cfg.total(losses.0, losses.1, losses.2),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn losses_lie_in_unit_interval(a in arb_labels(9), b in arb_labels(9)) {
        for l in [
            loss_iou(&a.silhouette(), &b.silhouette()).unwrap(),
            loss_miou(&a, &b).unwrap(),
            loss_dist(&a, &b).unwrap(),
        ] {
            prop_assert!((0.0..=1.0).contains(&l), "{}", l);
        }
        prop_assert_eq!(loss_miou(&a, &a).unwrap(), 0.0);
        prop_assert_eq!(loss_dist(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn silhouette_loss_is_symmetric(a in arb_labels(9), b in arb_labels(9)) {
        let (sa, sb) = (a.silhouette(), b.silhouette());
        prop_assert_eq!(loss_iou(&sa, &sb).unwrap(), loss_iou(&sb, &sa).unwrap());
    }

    #[test]
    fn selection_ignores_result_order(
        losses in prop::collection::vec((0u8..4, 0u8..4, 0u8..4), 1..12),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        // coarse values force plenty of ties
        let results: Vec<PoseResult> = losses
            .iter()
            .enumerate()
            .map(|(i, &(a, b, c))| {
                let t = if i % 2 == 0 { "truck_1" } else { "truck_2" };
                result(t, i, (a as f64 / 4.0, b as f64 / 4.0, c as f64 / 4.0))
            })
            .collect();
        let mut shuffled = results.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let cfg = OptimConfig::default();
        let a = select_best(&results, &cfg).unwrap();
        let b = select_best(&shuffled, &cfg).unwrap();
        prop_assert_eq!((&a.template_id, a.hypothesis_index), (&b.template_id, b.hypothesis_index));
        for r in &results {
            prop_assert!(a.l_total <= r.l_total);
        }
    }
}

#[test]
fn selection_prefers_lower_iou_loss_on_equal_totals() {
    let cfg = OptimConfig {
        lambda_iou: 1.0,
        lambda_miou: 1.0,
        lambda_dist: 0.0,
        ..Default::default()
    };
    let results = vec![result("bus_1", 0, (0.5, 0.25, 0.0)), result("bus_1", 1, (0.25, 0.5, 0.0))];
    assert_eq!(select_best(&results, &cfg).unwrap().hypothesis_index, 1);
    assert!(select_best::<f64>(&[], &cfg).is_err());
}

#[test]
fn optimization_never_increases_the_loss() {
    let cfg = OptimConfig {
        steps: 40,
        ..Default::default()
    };
    for (class, variant) in [(ObjectClass::Chair, 1), (ObjectClass::Bus, 2)] {
        let t = generate_template::<f64>(class, variant).unwrap();
        let target = render_labels(&t, Vec3::splat(1.0), &Camera::new(0.9, 0.35, 2.6, 96, 96))
            .unwrap()
            .silhouette();
        let start = PoseHypothesis::new(Camera::new(1.4, 0.1, 3.1, 96, 96));
        let h = optimize_hypothesis(&t, &target, &start, &cfg);
        assert!(h.loss_history.len() >= 2);
        assert!(h.loss_history.windows(2).all(|w| w[1] < w[0]), "{:?}", h.loss_history);
        assert_eq!(h, optimize_hypothesis(&t, &target, &start, &cfg));
    }
}

#[test]
fn renders_are_deterministic_and_agree() {
    for class in ObjectClass::ALL {
        let t = generate_template::<f64>(class, 1).unwrap();
        let cam = Camera::new(2.2, 0.5, 2.4, 80, 60);
        let a = render_labels(&t, Vec3::splat(1.0), &cam).unwrap();
        assert_eq!(a, render_labels(&t, Vec3::splat(1.0), &cam).unwrap());
        let inst = render_instances(&t, Vec3::splat(1.0), &cam).unwrap();
        assert_eq!(inst.to_class_labels().silhouette(), a.silhouette());
        let fast = SilhouetteRenderer::new(&t).render(Vec3::splat(1.0), &cam);
        let sil = a.silhouette();
        let iou = fast.and_count(&sil) as f64 / fast.or_count(&sil) as f64;
        assert!(iou > 0.97, "{class:?}: {iou}");
    }
}
