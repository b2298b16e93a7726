//! Statistical trend checks across many seeds. Individual seeds may deviate;
//! the aggregated direction must not.

use csviz_core::experiment::{checker_accuracy, inject_collision_states, visualization_accuracy};
use csviz_core::metrics::pixel_setminus;
use csviz_core::planar::{random_workspace, sample_cspace, Bounds, PlanarRobot, SampleMode};
use csviz_core::render::{render, PlotMode, RenderConfig, RenderSpec};
use csviz_core::rng::subseed;

fn spec_for(n_joints: usize, n_d: usize, canvas: u32, legend: u32) -> RenderSpec {
    RenderConfig {
        n_d: Some(n_d),
        canvas_px: Some(canvas),
        legend_strip_px: Some(legend),
        ..RenderConfig::default()
    }
    .resolve(n_joints)
    .unwrap()
}

/// Comparing two independent same-distribution renders: coarser bins pack
/// points onto fewer rings, so more pixels coincide and the surviving
/// mismatch ratio drops.
#[test]
fn coarser_discretization_lowers_mismatch_between_twin_renders() {
    let robot = PlanarRobot::uniform(2, 1.0, 0.05);
    let mut coarse = Vec::new();
    let mut fine = Vec::new();
    // some random workspaces wall off the base entirely; skip those seeds
    let mut seed = 0u64;
    while coarse.len() < 10 {
        seed += 1;
        assert!(seed < 40, "too few usable workspaces");
        let ws = random_workspace(subseed(900 + seed, 0), 3, Bounds::centered(2.2), (0.3, 0.7))
            .unwrap();
        let Ok(a) = sample_cspace(&robot, &ws, 1500, subseed(seed, 1), SampleMode::FreeOnly) else {
            continue;
        };
        let b = sample_cspace(&robot, &ws, 1500, subseed(seed, 2), SampleMode::FreeOnly).unwrap();
        for (n_d, out) in [(8, &mut coarse), (64, &mut fine)] {
            let spec = spec_for(2, n_d, 600, 0);
            let ra = render(&a, &spec).unwrap();
            let rb = render(&b, &spec).unwrap();
            let (_, stats) = pixel_setminus(&ra, &rb, spec.layout.background).unwrap();
            out.push(stats.mismatch_ratio);
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    assert!(
        mean(&coarse) < mean(&fine),
        "coarse mean {:.3} should be below fine mean {:.3}",
        mean(&coarse),
        mean(&fine)
    );
    let pairwise = coarse.iter().zip(&fine).filter(|(c, f)| c <= f).count();
    assert!(pairwise >= 7, "only {pairwise}/10 seeds followed the trend");
}

/// More injected collision states can only push the injected render further
/// from the clean reference.
#[test]
fn visualization_accuracy_falls_as_injection_grows() {
    let robot = PlanarRobot::uniform(3, 0.8, 0.05);
    let spec = spec_for(3, 16, 400, 20);
    let reference_spec = RenderSpec { mode: PlotMode::FreeOnly, ..spec.clone() };
    let injected_spec = RenderSpec { mode: PlotMode::All, ..spec };
    let fractions = [0.2, 0.4, 0.6, 0.8, 1.0];

    let mut total_pairs = 0;
    let mut ordered_pairs = 0;
    let mut usable = 0;
    let mut seed = 0u64;
    while usable < 10 {
        seed += 1;
        assert!(seed < 40, "too few usable workspaces");
        let ws = random_workspace(subseed(7000 + seed, 0), 2, Bounds::centered(2.0), (0.3, 0.6))
            .unwrap();
        let Ok(ds) = sample_cspace(&robot, &ws, 400, subseed(seed, 1), SampleMode::FreeOnly) else {
            continue;
        };
        usable += 1;
        let reference = render(&ds, &reference_spec).unwrap();
        let mut prev: Option<f64> = None;
        for (fi, &f) in fractions.iter().enumerate() {
            let injected = inject_collision_states(&ds, f, &robot, &ws, subseed(seed, 10 + fi as u64))
                .unwrap();
            assert!(checker_accuracy(&injected).unwrap() <= 1.0 - f + 1e-12 + 1.0 / 400.0);
            let img = render(&injected, &injected_spec).unwrap();
            let acc =
                visualization_accuracy(&img, &reference, injected_spec.layout.background).unwrap();
            if let Some(p) = prev {
                total_pairs += 1;
                if acc <= p + 1e-12 {
                    ordered_pairs += 1;
                }
            }
            prev = Some(acc);
        }
    }
    assert_eq!(total_pairs, 40); // 10 usable seeds x 4 adjacent pairs
    assert!(
        ordered_pairs * 10 >= total_pairs * 9,
        "only {ordered_pairs}/{total_pairs} adjacent fraction pairs were non-increasing"
    );
}
