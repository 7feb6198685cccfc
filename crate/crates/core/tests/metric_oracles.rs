mod common;

use common::oracles::{self, random_case, Case};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use texbench_core::maskio::{BinaryMask, InstanceLabelMap};
use texbench_core::metrics::{self, AssignOptions};

fn lib_inputs(c: &Case) -> (Vec<BinaryMask>, InstanceLabelMap) {
    let masks = c.masks.iter().map(|m| BinaryMask::new(c.w, c.h, m.clone()).unwrap()).collect();
    (masks, InstanceLabelMap::new(c.w, c.h, c.gt.clone()).unwrap())
}

#[test]
fn miou_and_ari_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..300 {
        let c = random_case(&mut rng);
        let (masks, gt) = lib_inputs(&c);
        for include_bg in [false, true] {
            let opts = AssignOptions { include_background: include_bg, ..Default::default() };
            for aggregate in [true, false] {
                let got = metrics::miou(&masks, &gt, aggregate, opts).ok();
                let want = oracles::miou_oracle(&c.masks, &c.gt, aggregate, include_bg);
                match (got, want) {
                    (Some(g), Some(w)) => assert!((g - w).abs() <= 1e-12, "miou {g} vs {w}"),
                    (None, None) => {}
                    other => panic!("definedness differs: {other:?}"),
                }
            }
            let got = metrics::ari(&masks, &c.scores, &gt, include_bg).unwrap();
            let want = oracles::ari_oracle(&c.masks, &c.scores, &c.gt, include_bg);
            assert!((got - want).abs() <= 1e-12, "ari {got} vs {want}");
        }
    }
}

#[test]
fn assignment_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let c = random_case(&mut rng);
        let (masks, gt) = lib_inputs(&c);
        let t = metrics::assign(&masks, &gt, AssignOptions::default()).unwrap();
        for (i, m) in c.masks.iter().enumerate() {
            assert_eq!(t.pred_to_gt[i], oracles::assign_oracle(m, &c.gt, false));
        }
    }
}

#[test]
fn ari_two_halves_single_cluster_is_zero() {
    let gt: Vec<u32> = (0..16).map(|p| u32::from(p % 4 >= 2)).collect();
    let pred = vec![1u32; 16];
    assert_eq!(oracles::ari_pairs_oracle(&gt, &pred), 0.0);
    assert_eq!(metrics::adjusted_rand_index(&gt, &pred).unwrap(), 0.0);
}

#[test]
fn aggregated_iou_equals_union_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let c = random_case(&mut rng);
        let (masks, gt) = lib_inputs(&c);
        for r in metrics::region_scores(&masks, &gt, AssignOptions::default()).unwrap() {
            let mut union = BinaryMask::empty(c.w, c.h);
            for &i in &r.assigned {
                union.union_with(&masks[i]);
            }
            let want = if r.assigned.is_empty() { 0.0 } else { metrics::iou(&union, &gt.region_mask(r.id)).unwrap() };
            assert_eq!(r.iou_aggregated, want);
        }
    }
}

fn arb_case() -> impl Strategy<Value = (usize, usize, Vec<u16>, Vec<Vec<bool>>)> {
    (1usize..8, 1usize..8).prop_flat_map(|(w, h)| {
        (
            Just(w),
            Just(h),
            proptest::collection::vec(0u16..4, w * h),
            proptest::collection::vec(proptest::collection::vec(any::<bool>(), w * h), 0..5),
        )
    })
}

proptest! {
    #[test]
    fn iou_is_symmetric((w, h, _, masks) in arb_case()) {
        for a in &masks {
            for b in &masks {
                let (a, b) = (BinaryMask::new(w, h, a.clone()).unwrap(), BinaryMask::new(w, h, b.clone()).unwrap());
                prop_assert_eq!(metrics::iou(&a, &b).unwrap(), metrics::iou(&b, &a).unwrap());
            }
        }
    }

    #[test]
    fn metrics_invariant_under_gt_relabeling((w, h, gt, masks) in arb_case()) {
        // mIoU: order-preserving relabel (tie-breaks follow id order);
        // ARI: any bijection, background included
        let monotone = [0u16, 3, 17, 900];
        let shuffled = [5u16, 900, 0, 17];
        let bm: Vec<BinaryMask> = masks.iter().map(|m| BinaryMask::new(w, h, m.clone()).unwrap()).collect();
        let scores = vec![0.5; bm.len()];
        let relabel = |p: &[u16; 4]| InstanceLabelMap::new(w, h, gt.iter().map(|&g| p[g as usize]).collect()).unwrap();
        let a = InstanceLabelMap::new(w, h, gt.clone()).unwrap();
        let b = relabel(&monotone);
        let opts = AssignOptions::default();
        for agg in [true, false] {
            prop_assert_eq!(metrics::miou(&bm, &a, agg, opts).ok(), metrics::miou(&bm, &b, agg, opts).ok());
        }
        let c = relabel(&shuffled);
        prop_assert_eq!(metrics::ari(&bm, &scores, &a, true).unwrap(), metrics::ari(&bm, &scores, &c, true).unwrap());
    }

    #[test]
    fn ari_self_is_one_and_symmetric(a in proptest::collection::vec(0u32..5, 0..40), seed in any::<u64>()) {
        prop_assert_eq!(metrics::adjusted_rand_index(&a, &a).unwrap(), 1.0);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let b: Vec<u32> = a.iter().map(|_| r.random_range(0..3)).collect();
        let ab = metrics::adjusted_rand_index(&a, &b).unwrap();
        let ba = metrics::adjusted_rand_index(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!((ab - oracles::ari_pairs_oracle(&a, &b)).abs() < 1e-12);
    }

    #[test]
    fn bijection_scores_one(w in 2usize..8, h in 1usize..8, split in 1usize..7) {
        let split = split.min(w - 1);
        let gt = InstanceLabelMap::from_fn(w, h, |x, _| if x < split { 1 } else { 2 });
        let preds = vec![gt.region_mask(1), gt.region_mask(2)];
        let opts = AssignOptions::default();
        prop_assert_eq!(metrics::miou(&preds, &gt, true, opts).unwrap(), 1.0);
        prop_assert_eq!(metrics::miou(&preds, &gt, false, opts).unwrap(), 1.0);
        prop_assert_eq!(metrics::ari(&preds, &[0.9, 0.9], &gt, false).unwrap(), 1.0);
    }
}
