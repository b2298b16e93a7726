//! Property-based checks of the library invariants.

use std::f64::consts::PI;

use proptest::prelude::*;

use csviz_core::colormap::{Rgb8, WHITE};
use csviz_core::cspace::{
    apply_epsilon, bin_center, bin_dataset, build_tree, discretize, subsample, DiscretizationSpec,
    PerturbationSpec,
};
use csviz_core::dataset::{Dataset, Label};
use csviz_core::metrics::{mse, negative_subtraction, pixel_setminus};
use csviz_core::planar::{forward_kinematics, in_collision, CircleObstacle, PlanarRobot, Vec2, Workspace};
use csviz_core::raster::RasterImage;
use csviz_core::stats::{fisher_z_mean, pearson};

fn angle() -> impl Strategy<Value = f64> {
    -PI..=PI
}

fn dataset(n: std::ops::Range<usize>, m: std::ops::Range<usize>) -> impl Strategy<Value = Dataset> {
    (n, m).prop_flat_map(|(n, m)| {
        prop::collection::vec(prop::collection::vec(angle(), n), m).prop_map(move |samples| Dataset {
            n_joints: n,
            workspace_id: "prop".into(),
            seed: 0,
            samples,
            labels: vec![Label::Free; m],
        })
    })
}

fn image(w: u32, h: u32) -> impl Strategy<Value = RasterImage> {
    prop::collection::vec(prop::array::uniform3(0u8..=255), (w * h) as usize).prop_map(move |px| {
        RasterImage {
            width: w,
            height: h,
            pixels: px.into_iter().map(Rgb8).collect(),
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn fk_consecutive_joints_are_link_lengths_apart(
        angles in prop::collection::vec(angle(), 1..6),
        len in 0.1f64..3.0,
    ) {
        let robot = PlanarRobot::uniform(angles.len(), len, 0.02);
        let pts = forward_kinematics(&robot, &angles).unwrap();
        prop_assert_eq!(pts.len(), angles.len() + 1);
        for w in pts.windows(2) {
            prop_assert!((w[0].dist(w[1]) - len).abs() < 1e-9);
        }
    }

    #[test]
    fn growing_obstacles_never_uncollides(
        angles in prop::collection::vec(angle(), 2..5),
        cx in -2.0f64..2.0,
        cy in -2.0f64..2.0,
        r in 0.05f64..1.0,
        grow in 0.0f64..1.0,
    ) {
        let robot = PlanarRobot::uniform(angles.len(), 0.8, 0.05);
        let small = Workspace {
            id: "s".into(),
            obstacles: vec![CircleObstacle { center: Vec2::new(cx, cy), radius: r }],
        };
        let big = Workspace {
            id: "b".into(),
            obstacles: vec![CircleObstacle { center: Vec2::new(cx, cy), radius: r + grow }],
        };
        if in_collision(&robot, &small, &angles).unwrap() {
            prop_assert!(in_collision(&robot, &big, &angles).unwrap());
        }
    }

    #[test]
    fn discretization_residual_is_half_bin(theta in angle(), n_d in 1usize..2000) {
        let bin = discretize(theta, n_d).unwrap();
        prop_assert!(bin < n_d);
        let c = bin_center(bin, n_d).unwrap();
        prop_assert!((c - theta).abs() <= PI / n_d as f64 + 1e-12);
    }

    #[test]
    fn trees_partition_the_dataset(ds in dataset(2..4, 1..40), n_d in 1usize..40) {
        let spec = DiscretizationSpec { n_d };
        for i in 0..ds.n_joints - 1 {
            let tree = build_tree(&ds, i, &spec).unwrap();
            let total: usize = tree.children.values().map(Vec::len).sum();
            prop_assert_eq!(total, ds.m());
            for (parent, kids) in &tree.children {
                prop_assert!(*parent < n_d);
                // child lists stay in ascending sample order
                prop_assert!(kids.windows(2).all(|w| w[0].1 < w[1].1));
            }
        }
    }

    #[test]
    fn tree_contents_ignore_sample_order(ds in dataset(2..3, 2..30), seed in 0u64..50) {
        let spec = DiscretizationSpec { n_d: 8 };
        let mut shuffled = ds.clone();
        let mut r = csviz_core::rng::stream(seed);
        for k in (1..shuffled.m()).rev() {
            let j = csviz_core::rng::uniform_index(&mut r, k + 1);
            shuffled.samples.swap(k, j);
            shuffled.labels.swap(k, j);
        }
        let a = build_tree(&ds, 0, &spec).unwrap();
        let b = build_tree(&shuffled, 0, &spec).unwrap();
        prop_assert_eq!(
            a.children.keys().collect::<Vec<_>>(),
            b.children.keys().collect::<Vec<_>>()
        );
        for (parent, kids) in &a.children {
            let mut left: Vec<u64> = kids.iter().map(|(th, _)| th.to_bits()).collect();
            let mut right: Vec<u64> = b.children[parent].iter().map(|(th, _)| th.to_bits()).collect();
            left.sort_unstable();
            right.sort_unstable();
            prop_assert_eq!(left, right);
        }
    }

    #[test]
    fn epsilon_respects_bound_and_bins(
        ds in dataset(2..4, 2..30),
        n_d in 2usize..40,
        eps_scale in 0.0f64..0.999,
        dup_pairs in prop::collection::vec((0usize..30, 0usize..30), 0..6),
    ) {
        // force duplicate child angles across random sample pairs
        let mut ds = ds;
        let m = ds.m();
        for (a, b) in dup_pairs {
            let (a, b) = (a % m, b % m);
            for j in 1..ds.n_joints {
                ds.samples[b][j] = ds.samples[a][j];
            }
        }
        let spec = DiscretizationSpec { n_d };
        let pert = PerturbationSpec { epsilon_max: eps_scale * PI / n_d as f64 };
        let out = apply_epsilon(&ds, &spec, &pert).unwrap();
        prop_assert_eq!(out.m(), ds.m());
        let before = bin_dataset(&ds, &spec).unwrap();
        let after = bin_dataset(&out, &spec).unwrap();
        for k in 0..m {
            prop_assert_eq!(&before[k].bins, &after[k].bins);
            for j in 0..ds.n_joints {
                let shift = (out.samples[k][j] - ds.samples[k][j]).abs();
                prop_assert!(shift <= pert.epsilon_max + 1e-15);
                prop_assert!(out.samples[k][j] >= -PI && out.samples[k][j] <= PI);
            }
        }
    }

    #[test]
    fn subsample_is_an_ordered_subset(ds in dataset(2..4, 1..40), f in 0.01f64..1.0, seed in 0u64..100) {
        let sub = subsample(&ds, f, seed).unwrap();
        prop_assert_eq!(sub.m(), (f * ds.m() as f64).floor() as usize);
        let mut cursor = 0usize;
        for q in &sub.samples {
            // each subset sample appears in the remainder of the original order
            let pos = ds.samples[cursor..].iter().position(|o| o == q);
            prop_assert!(pos.is_some());
            cursor += pos.unwrap() + 1;
        }
        prop_assert_eq!(&subsample(&ds, f, seed).unwrap(), &sub);
    }

    #[test]
    fn setminus_self_is_blank(img in image(6, 5)) {
        let (out, stats) = pixel_setminus(&img, &img, WHITE).unwrap();
        prop_assert!(out.pixels.iter().all(|&p| p == WHITE));
        prop_assert_eq!(stats.nonwhite_after, 0);
        prop_assert_eq!(stats.mismatch_ratio, 0.0);
    }

    #[test]
    fn mse_is_symmetric_and_zero_iff_equal(a in image(5, 4), b in image(5, 4)) {
        let ab = mse(&a, &b).unwrap();
        prop_assert_eq!(ab, mse(&b, &a).unwrap());
        prop_assert_eq!(ab == 0.0, a == b);
        prop_assert_eq!(mse(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn negative_subtraction_is_symmetric(a in image(4, 4), b in image(4, 4)) {
        prop_assert_eq!(negative_subtraction(&a, &b).unwrap(), negative_subtraction(&b, &a).unwrap());
    }

    #[test]
    fn pearson_survives_positive_affine_maps(
        pairs in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 3..20),
        ax in 0.1f64..10.0,
        bx in -50.0f64..50.0,
        ay in 0.1f64..10.0,
        by in -50.0f64..50.0,
    ) {
        let xs: Vec<f64> = pairs.iter().enumerate().map(|(k, p)| p.0 + k as f64 * 1e-3).collect();
        let ys: Vec<f64> = pairs.iter().enumerate().map(|(k, p)| p.1 + (k % 7) as f64 * 1e-3).collect();
        prop_assume!(xs.iter().any(|&x| x != xs[0]) && ys.iter().any(|&y| y != ys[0]));
        let r = pearson(&xs, &ys).unwrap();
        let xs2: Vec<f64> = xs.iter().map(|x| ax * x + bx).collect();
        let ys2: Vec<f64> = ys.iter().map(|y| ay * y + by).collect();
        prop_assert!((pearson(&xs2, &ys2).unwrap() - r).abs() < 1e-12);
        prop_assert!(r.abs() <= 1.0);
    }

    #[test]
    fn fisher_mean_stays_in_hull(rs in prop::collection::vec(-0.99f64..0.99, 1..12)) {
        let s = fisher_z_mean(&rs).unwrap();
        let lo = rs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = rs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(s.r_mean >= lo - 1e-12 && s.r_mean <= hi + 1e-12);
        prop_assert!(s.se >= 0.0);
        if rs.len() == 1 {
            prop_assert!((s.r_mean - rs[0]).abs() < 1e-12);
            prop_assert_eq!(s.se, 0.0);
        }
    }
}
