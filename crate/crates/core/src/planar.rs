//! Planar n-link robot, circular obstacles, and seeded C-space sampling.
//!
//! This is the ground-truth side of the toolkit: forward kinematics for a
//! revolute chain, capsule-vs-circle collision checking, and the uniform
//! samplers that produce [`Dataset`] values.

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dist(self, other: Vec2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// One revolute link modeled as a capsule: a segment of the given length with
/// a collision radius of `half_width`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkSpec {
    pub length: f64,
    pub half_width: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarRobot {
    pub base: Vec2,
    pub links: Vec<LinkSpec>,
}

impl PlanarRobot {
    /// Chain of n identical links rooted at the origin.
    pub fn uniform(n_joints: usize, length: f64, half_width: f64) -> Self {
        PlanarRobot {
            base: Vec2::new(0.0, 0.0),
            links: vec![LinkSpec { length, half_width }; n_joints],
        }
    }

    pub fn n_joints(&self) -> usize {
        self.links.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleObstacle {
    pub center: Vec2,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Workspace {
    pub id: String,
    pub obstacles: Vec<CircleObstacle>,
}

/// Axis-aligned sampling box for obstacle centers.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Bounds {
    pub min: Vec2,
    pub max: Vec2,
}

impl Bounds {
    pub const fn new(min: Vec2, max: Vec2) -> Self {
        Bounds { min, max }
    }

    pub fn centered(half_extent: f64) -> Self {
        Bounds {
            min: Vec2::new(-half_extent, -half_extent),
            max: Vec2::new(half_extent, half_extent),
        }
    }
}

/// Joint positions for a configuration: the base followed by each link's end
/// point. Joint i+1 sits at joint i plus L_i in the direction of the running
/// angle sum.
pub fn forward_kinematics(robot: &PlanarRobot, angles: &[f64]) -> Result<Vec<Vec2>> {
    if angles.len() != robot.links.len() {
        return Err(Error::DimensionMismatch {
            expected: robot.links.len(),
            got: angles.len(),
        });
    }
    let mut points = Vec::with_capacity(angles.len() + 1);
    points.push(robot.base);
    let mut heading = 0.0;
    let mut at = robot.base;
    for (link, &theta) in robot.links.iter().zip(angles) {
        heading += theta;
        at = Vec2::new(
            at.x + link.length * heading.cos(),
            at.y + link.length * heading.sin(),
        );
        points.push(at);
    }
    Ok(points)
}

/// Minimum distance from p to the closed segment ab. A degenerate segment
/// (a = b) reduces to point distance.
pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let abx = b.x - a.x;
    let aby = b.y - a.y;
    let len2 = abx * abx + aby * aby;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.x - a.x) * abx + (p.y - a.y) * aby) / len2).clamp(0.0, 1.0)
    };
    p.dist(Vec2::new(a.x + t * abx, a.y + t * aby))
}

/// True iff some link's capsule strictly overlaps some obstacle. Tangency
/// counts as free.
pub fn in_collision(robot: &PlanarRobot, ws: &Workspace, angles: &[f64]) -> Result<bool> {
    let joints = forward_kinematics(robot, angles)?;
    Ok(collides(robot, ws, &joints))
}

fn collides(robot: &PlanarRobot, ws: &Workspace, joints: &[Vec2]) -> bool {
    for (i, link) in robot.links.iter().enumerate() {
        for obs in &ws.obstacles {
            let d = point_segment_distance(obs.center, joints[i], joints[i + 1]);
            if d < obs.radius + link.half_width {
                return true;
            }
        }
    }
    false
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleMode {
    /// Keep every draw, labeled by the collision check.
    All,
    /// Keep only collision-free draws; labels are all Free.
    FreeOnly,
}

/// Attempts allowed per requested sample before rejection sampling gives up.
pub const REJECTION_BUDGET_PER_SAMPLE: usize = 1000;

/// Draws m configurations i.i.d. uniform per joint over [-pi, pi) from one
/// seeded stream, joints in joint order within each sample.
pub fn sample_cspace(
    robot: &PlanarRobot,
    ws: &Workspace,
    m: usize,
    seed: u64,
    mode: SampleMode,
) -> Result<Dataset> {
    if m == 0 {
        return Err(Error::ZeroSamples);
    }
    let n = robot.n_joints();
    let mut rng = rng::stream(seed);
    let budget = REJECTION_BUDGET_PER_SAMPLE.saturating_mul(m);
    let mut attempts = 0usize;
    let mut samples = Vec::with_capacity(m);
    let mut labels = Vec::with_capacity(m);
    while samples.len() < m {
        if attempts >= budget {
            return Err(Error::RejectionBudget {
                wanted: m - samples.len(),
                attempts,
            });
        }
        attempts += 1;
        let q: Vec<f64> = (0..n).map(|_| rng::uniform_angle(&mut rng)).collect();
        let hit = in_collision(robot, ws, &q)?;
        match mode {
            SampleMode::All => {
                labels.push(if hit { Label::Collision } else { Label::Free });
                samples.push(q);
            }
            SampleMode::FreeOnly => {
                if !hit {
                    labels.push(Label::Free);
                    samples.push(q);
                }
            }
        }
    }
    Ok(Dataset {
        n_joints: n,
        workspace_id: ws.id.clone(),
        seed,
        samples,
        labels,
    })
}

/// k circle obstacles with centers uniform in `bounds` and radii uniform in
/// `radius_range`, drawn as (x, y, radius) per obstacle from one seeded stream.
pub fn random_workspace(
    seed: u64,
    k_obstacles: usize,
    bounds: Bounds,
    radius_range: (f64, f64),
) -> Result<Workspace> {
    if !(bounds.max.x > bounds.min.x && bounds.max.y > bounds.min.y) {
        return Err(Error::EmptyBounds);
    }
    let (lo, hi) = radius_range;
    if !(lo > 0.0 && lo <= hi) {
        return Err(Error::BadRadiusRange { lo, hi });
    }
    let mut rng = rng::stream(seed);
    let obstacles = (0..k_obstacles)
        .map(|_| {
            let x = rng::uniform_in(&mut rng, bounds.min.x, bounds.max.x);
            let y = rng::uniform_in(&mut rng, bounds.min.y, bounds.max.y);
            let radius = rng::uniform_in(&mut rng, lo, hi);
            CircleObstacle {
                center: Vec2::new(x, y),
                radius,
            }
        })
        .collect();
    Ok(Workspace {
        id: format!("rand-k{k_obstacles}-s{seed}"),
        obstacles,
    })
}
