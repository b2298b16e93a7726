//! Discretization of joint angles and per-joint-pair conditional trees.
//!
//! Angles in [-pi, pi] fall into n_d uniform bins. For each joint pair
//! (i, i+1) a conditional tree groups the observed child angles of joint i+1
//! under the discretized bin of their parent angle of joint i. When the same
//! child bin shows up under several different parents the epsilon perturbation
//! nudges the duplicates apart so they stay visually distinguishable.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscretizationSpec {
    /// Number of uniform bins over [-pi, pi]. Bin width is 2*pi/n_d.
    pub n_d: usize,
}

impl Default for DiscretizationSpec {
    fn default() -> Self {
        DiscretizationSpec { n_d: 500 }
    }
}

impl DiscretizationSpec {
    pub fn bin_width(&self) -> f64 {
        TAU / self.n_d as f64
    }
}

/// Bin index of an angle: floor((theta + pi) * n_d / (2*pi)), with theta = pi
/// clamped into the last bin.
pub fn discretize(theta: f64, n_d: usize) -> Result<usize> {
    if n_d == 0 {
        return Err(Error::ZeroBins);
    }
    if !(-PI..=PI).contains(&theta) {
        return Err(Error::AngleOutOfRange(theta));
    }
    let raw = ((theta + PI) * n_d as f64 / TAU).floor() as usize;
    Ok(raw.min(n_d - 1))
}

/// Representative angle of a bin: its midpoint.
pub fn bin_center(bin: usize, n_d: usize) -> Result<f64> {
    if n_d == 0 {
        return Err(Error::ZeroBins);
    }
    if bin >= n_d {
        return Err(Error::BinOutOfRange { bin, n_d });
    }
    Ok(-PI + (bin as f64 + 0.5) * TAU / n_d as f64)
}

/// One sample reduced to its per-joint bin indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinnedState {
    pub bins: Vec<usize>,
    pub sample_index: usize,
}

/// Discretizes every sample of a dataset.
pub fn bin_dataset(ds: &Dataset, spec: &DiscretizationSpec) -> Result<Vec<BinnedState>> {
    ds.validate()?;
    ds.samples
        .iter()
        .enumerate()
        .map(|(sample_index, q)| {
            let bins = q
                .iter()
                .map(|&a| discretize(a, spec.n_d))
                .collect::<Result<Vec<_>>>()?;
            Ok(BinnedState { bins, sample_index })
        })
        .collect()
}

/// Conditional tree for joint pair (i, i+1): parent bin of theta_i mapped to
/// the child angles theta_{i+1} observed under it.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalTree {
    pub joint_index: usize,
    pub n_d: usize,
    /// Parent bin -> (child angle, sample index), ascending by sample index.
    pub children: BTreeMap<usize, Vec<(f64, usize)>>,
}

pub fn build_tree(ds: &Dataset, i: usize, spec: &DiscretizationSpec) -> Result<ConditionalTree> {
    ds.validate()?;
    if ds.samples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if ds.n_joints < 2 {
        return Err(Error::NeedTwoJoints(ds.n_joints));
    }
    if i + 1 >= ds.n_joints {
        return Err(Error::JointPairOutOfRange {
            pair: i,
            n_joints: ds.n_joints,
        });
    }
    let mut children: BTreeMap<usize, Vec<(f64, usize)>> = BTreeMap::new();
    for (k, q) in ds.samples.iter().enumerate() {
        let parent = discretize(q[i], spec.n_d)?;
        children.entry(parent).or_default().push((q[i + 1], k));
    }
    Ok(ConditionalTree {
        joint_index: i,
        n_d: spec.n_d,
        children,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    /// Bound on the shift applied to any coordinate, radians. Must stay below
    /// half a bin width so a shifted angle can always remain in its bin.
    pub epsilon_max: f64,
}

impl PerturbationSpec {
    /// Half of the allowed bound for the given discretization.
    pub fn default_for(n_d: usize) -> Self {
        PerturbationSpec {
            epsilon_max: PI / (2.0 * n_d as f64),
        }
    }

    pub fn validate(&self, spec: &DiscretizationSpec) -> Result<()> {
        let limit = PI / spec.n_d as f64;
        if !(self.epsilon_max >= 0.0 && self.epsilon_max < limit) {
            return Err(Error::EpsilonOutOfRange {
                epsilon_max: self.epsilon_max,
                limit,
            });
        }
        Ok(())
    }
}

/// Pulls `value` toward `origin` by ulps until the displacement is within
/// `bound`. Addition and subtraction can round a nominally in-bound shift a
/// few ulps past it; stepping back cannot leave the coordinate's bin because
/// every float between `value` and `origin` shares it.
fn clamp_displacement(origin: f64, value: f64, bound: f64) -> f64 {
    let mut v = value;
    while (v - origin).abs() > bound {
        v = if v > origin { v.next_down() } else { v.next_up() };
    }
    v
}

/// Returns a perturbed copy of the dataset.
///
/// For each joint pair, samples whose child bin of theta_{i+1} coincides while
/// their parent bins of theta_i differ form a duplicate group. Group members
/// are ranked 0, 1, 2, ... in sample-index order; a sample's rank is the
/// maximum over all pairs it duplicates in. Every coordinate of a rank-d
/// sample shifts by d * epsilon_max / max_rank, direction reversed per
/// coordinate where the shift would leave the coordinate's bin, so all bin
/// indices are preserved exactly and no measured shift exceeds epsilon_max.
pub fn apply_epsilon(
    ds: &Dataset,
    spec: &DiscretizationSpec,
    pert: &PerturbationSpec,
) -> Result<Dataset> {
    pert.validate(spec)?;
    let binned = bin_dataset(ds, spec)?;
    let m = ds.m();
    let n = ds.n_joints;
    if n < 2 || m == 0 || pert.epsilon_max == 0.0 {
        return Ok(ds.clone());
    }

    let mut rank = vec![0usize; m];
    let mut max_rank = 0usize;
    for i in 0..n - 1 {
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for b in &binned {
            groups.entry(b.bins[i + 1]).or_default().push(b.sample_index);
        }
        for members in groups.values() {
            let first_parent = binned[members[0]].bins[i];
            if !members.iter().any(|&k| binned[k].bins[i] != first_parent) {
                continue;
            }
            for (d, &k) in members.iter().enumerate() {
                rank[k] = rank[k].max(d);
                max_rank = max_rank.max(d);
            }
        }
    }
    if max_rank == 0 {
        return Ok(ds.clone());
    }

    let delta = pert.epsilon_max / max_rank as f64;
    let mut out = ds.clone();
    for k in 0..m {
        if rank[k] == 0 {
            continue;
        }
        let shift = rank[k] as f64 * delta;
        for j in 0..n {
            let orig = out.samples[k][j];
            let bin = binned[k].bins[j];
            let up = orig + shift;
            let down = orig - shift;
            // shift < bin_width/2 guarantees one direction stays in the bin;
            // keeping the original is a float-edge fallback
            let shifted = if up <= PI && discretize(up, spec.n_d)? == bin {
                up
            } else if down >= -PI && discretize(down, spec.n_d)? == bin {
                down
            } else {
                orig
            };
            out.samples[k][j] = clamp_displacement(orig, shifted, pert.epsilon_max);
        }
    }
    Ok(out)
}

/// Keeps floor(fraction * m) samples chosen uniformly without replacement,
/// in their original order.
pub fn subsample(ds: &Dataset, fraction: f64, seed: u64) -> Result<Dataset> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::FractionOutOfRange(fraction));
    }
    ds.validate()?;
    let m = ds.m();
    let keep = (fraction * m as f64).floor() as usize;
    let mut idx: Vec<usize> = (0..m).collect();
    let mut rng = rng::stream(seed);
    for k in 0..keep.min(m.saturating_sub(1)) {
        let j = k + rng::uniform_index(&mut rng, m - k);
        idx.swap(k, j);
    }
    let mut chosen: Vec<usize> = idx[..keep].to_vec();
    chosen.sort_unstable();
    Ok(Dataset {
        n_joints: ds.n_joints,
        workspace_id: ds.workspace_id.clone(),
        seed,
        samples: chosen.iter().map(|&k| ds.samples[k].clone()).collect(),
        labels: chosen.iter().map(|&k| ds.labels[k]).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Label;

    fn ds(samples: Vec<Vec<f64>>) -> Dataset {
        let m = samples.len();
        Dataset {
            n_joints: samples.first().map_or(0, |q| q.len()),
            workspace_id: "t".into(),
            seed: 0,
            samples,
            labels: vec![Label::Free; m],
        }
    }

    #[test]
    fn discretize_boundary_cases() {
        assert_eq!(discretize(-PI, 4).unwrap(), 0);
        assert_eq!(discretize(0.0, 4).unwrap(), 2);
        assert_eq!(discretize(PI, 4).unwrap(), 3);
        assert_eq!(discretize(PI, 1).unwrap(), 0);
    }

    #[test]
    fn discretize_hand_values() {
        // floor((0.1 + pi) * 500 / (2*pi)) = 257, floor((2.0 + pi) * 500 / (2*pi)) = 409
        assert_eq!(discretize(0.1, 500).unwrap(), 257);
        assert_eq!(discretize(2.0, 500).unwrap(), 409);
    }

    #[test]
    fn discretize_rejects_out_of_range() {
        assert!(matches!(discretize(3.2, 4), Err(Error::AngleOutOfRange(_))));
        assert!(matches!(discretize(f64::NAN, 4), Err(Error::AngleOutOfRange(_))));
        assert!(matches!(discretize(0.0, 0), Err(Error::ZeroBins)));
    }

    #[test]
    fn bin_center_values_and_range_check() {
        assert!((bin_center(0, 2).unwrap() + PI / 2.0).abs() < 1e-15);
        assert!((bin_center(1, 2).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!(matches!(bin_center(2, 2), Err(Error::BinOutOfRange { .. })));
    }

    #[test]
    fn residual_stays_within_half_bin() {
        let n_d = 500;
        let c = bin_center(discretize(0.1, n_d).unwrap(), n_d).unwrap();
        assert!((c - 0.1).abs() <= PI / n_d as f64);
    }

    #[test]
    fn build_tree_hand_example() {
        let d = ds(vec![vec![0.1, 0.5], vec![0.1, -0.5], vec![2.0, 0.2]]);
        let tree = build_tree(&d, 0, &DiscretizationSpec { n_d: 500 }).unwrap();
        assert_eq!(tree.children.len(), 2);
        assert_eq!(tree.children[&257], vec![(0.5, 0), (-0.5, 1)]);
        assert_eq!(tree.children[&409], vec![(0.2, 2)]);
    }

    #[test]
    fn build_tree_degenerate_shapes() {
        let single = ds(vec![vec![0.3, 1.0]]);
        let t = build_tree(&single, 0, &DiscretizationSpec { n_d: 16 }).unwrap();
        assert_eq!(t.children.len(), 1);

        let shared = ds(vec![vec![0.3, 1.0], vec![0.3, -1.0], vec![0.3, 0.5]]);
        let t = build_tree(&shared, 0, &DiscretizationSpec { n_d: 16 }).unwrap();
        assert_eq!(t.children.len(), 1);
        assert_eq!(t.children.values().next().unwrap().len(), 3);
    }

    #[test]
    fn build_tree_partitions_the_dataset() {
        let d = ds((0..60)
            .map(|k| {
                vec![
                    (-PI + 0.1 * k as f64).clamp(-PI, PI),
                    ((k as f64 * 0.37).sin() * 3.0).clamp(-PI, PI),
                ]
            })
            .collect());
        let t = build_tree(&d, 0, &DiscretizationSpec { n_d: 7 }).unwrap();
        let total: usize = t.children.values().map(Vec::len).sum();
        assert_eq!(total, d.m());
    }

    #[test]
    fn build_tree_rejects_bad_pair() {
        let d = ds(vec![vec![0.0, 0.0]]);
        assert!(matches!(
            build_tree(&d, 1, &DiscretizationSpec { n_d: 4 }),
            Err(Error::JointPairOutOfRange { .. })
        ));
    }

    #[test]
    fn epsilon_identity_when_no_duplicates() {
        // distinct child bins everywhere: nothing to disambiguate
        let d = ds(vec![vec![0.1, -2.0], vec![1.2, 0.0], vec![-2.5, 2.0]]);
        let spec = DiscretizationSpec { n_d: 8 };
        let out = apply_epsilon(&d, &spec, &PerturbationSpec { epsilon_max: 0.1 }).unwrap();
        assert_eq!(out, d);
    }

    #[test]
    fn epsilon_two_sample_hand_case() {
        // same child bin (angles equal), different parents: second shifts by epsilon
        let d = ds(vec![vec![0.1, 0.5], vec![2.0, 0.5]]);
        let spec = DiscretizationSpec { n_d: 500 };
        let eps = 0.001; // below pi/500
        let out = apply_epsilon(&d, &spec, &PerturbationSpec { epsilon_max: eps }).unwrap();
        assert_eq!(out.samples[0], d.samples[0]);
        assert!((out.samples[1][0] - (2.0 + eps)).abs() < 1e-15);
        assert!((out.samples[1][1] - (0.5 + eps)).abs() < 1e-15);
    }

    #[test]
    fn epsilon_groups_with_single_parent_stay_put() {
        let d = ds(vec![vec![0.1, 0.5], vec![0.1, 0.5], vec![0.1, 0.5]]);
        let spec = DiscretizationSpec { n_d: 500 };
        let out = apply_epsilon(&d, &spec, &PerturbationSpec { epsilon_max: 0.001 }).unwrap();
        assert_eq!(out, d);
    }

    #[test]
    fn epsilon_preserves_bins_and_bound() {
        let spec = DiscretizationSpec { n_d: 8 };
        let eps = 0.38; // near the pi/8 = 0.3927 limit
        // angles packed at bin edges to force reversals; child-bin groups
        // (k mod 5) mix parent bins (k mod 8) because 5 and 8 are coprime
        let step = TAU / 8.0;
        let mut samples = Vec::new();
        for k in 0..40usize {
            let parent = -PI + (k % 8) as f64 * step + 0.999 * step;
            let child = -PI + (k % 5) as f64 * step + 0.001 * step;
            samples.push(vec![parent.min(PI), child]);
        }
        let d = ds(samples);
        let out = apply_epsilon(&d, &spec, &PerturbationSpec { epsilon_max: eps }).unwrap();
        let mut moved = 0;
        for (q0, q1) in d.samples.iter().zip(&out.samples) {
            for (a0, a1) in q0.iter().zip(q1) {
                assert!((a1 - a0).abs() <= eps + 1e-15);
                assert_eq!(
                    discretize(*a0, spec.n_d).unwrap(),
                    discretize(*a1, spec.n_d).unwrap()
                );
                if a1 != a0 {
                    moved += 1;
                }
            }
        }
        assert!(moved > 0, "perturbation never fired");
    }

    #[test]
    fn epsilon_measured_shift_never_exceeds_bound() {
        // A rank-1 sample in a two-sample group shifts by exactly epsilon_max,
        // where fl(theta + eps) - theta can round above eps. The measured
        // displacement must still be <= epsilon_max bit-for-bit, with bins intact.
        let spec = DiscretizationSpec { n_d: 16 };
        let eps = 0.3 * PI / 16.0;
        let mut state = 0x5EEDu64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..300 {
            let child = -PI + TAU * next();
            let d = ds(vec![vec![-1.0, child], vec![1.0, child]]);
            let out = apply_epsilon(&d, &spec, &PerturbationSpec { epsilon_max: eps }).unwrap();
            assert_eq!(out.samples[0], d.samples[0]);
            for (a, b) in d.samples[1].iter().zip(&out.samples[1]) {
                assert!(
                    (b - a).abs() <= eps,
                    "shift {} exceeds {eps} for origin {a}",
                    (b - a).abs()
                );
                assert_eq!(
                    discretize(*a, spec.n_d).unwrap(),
                    discretize(*b, spec.n_d).unwrap()
                );
            }
        }
    }

    #[test]
    fn epsilon_validates_spec() {
        let d = ds(vec![vec![0.0, 0.0]]);
        let spec = DiscretizationSpec { n_d: 4 };
        let bad = PerturbationSpec { epsilon_max: PI / 4.0 };
        assert!(matches!(
            apply_epsilon(&d, &spec, &bad),
            Err(Error::EpsilonOutOfRange { .. })
        ));
    }

    #[test]
    fn subsample_basic_properties() {
        let d = ds((0..10).map(|k| vec![-3.0 + 0.6 * k as f64, 0.1 * k as f64]).collect());
        let s = subsample(&d, 0.5, 3).unwrap();
        assert_eq!(s.m(), 5);
        let mut last = None;
        for q in &s.samples {
            let pos = d.samples.iter().position(|o| o == q).unwrap();
            if let Some(prev) = last {
                assert!(pos > prev, "order not preserved");
            }
            last = Some(pos);
        }
        assert_eq!(subsample(&d, 0.5, 3).unwrap(), s);
        assert_ne!(subsample(&d, 0.5, 4).unwrap().samples, s.samples);
    }

    #[test]
    fn subsample_full_fraction_is_identity() {
        let d = ds(vec![vec![0.1, 0.2], vec![0.3, 0.4], vec![0.5, 0.6]]);
        let s = subsample(&d, 1.0, 9).unwrap();
        assert_eq!(s.samples, d.samples);
        assert_eq!(s.labels, d.labels);
    }

    #[test]
    fn subsample_rejects_bad_fraction() {
        let d = ds(vec![vec![0.0, 0.0]]);
        assert!(matches!(subsample(&d, 0.0, 1), Err(Error::FractionOutOfRange(_))));
        assert!(matches!(subsample(&d, 1.5, 1), Err(Error::FractionOutOfRange(_))));
    }
}
