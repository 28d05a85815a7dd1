//! Planar 8-joint arm testbed.
//!
//! Kinematic model: each servo settles on its commanded angle, so the final
//! pose depends only on the eight angles. The base sits at the workspace
//! origin pointing along +y; joint angles accumulate along the chain.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::io::BufRead;

use serde::Serialize;

use crate::adapt::{Measurement, TrialEvaluator};
use crate::archive::{ArchiveGrid, Elite, Genome, GridSpec};
use crate::error::{Error, Result};
use crate::map_elites::{Evaluation, Evaluator};

pub const JOINTS: usize = 8;

/// Points of the chain: the base followed by the tip of every link.
pub type Chain = [[f64; 2]; JOINTS + 1];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArmConfig {
    pub link_lengths: [f64; JOINTS],
    /// Symmetric joint range, radians.
    pub joint_limit: f64,
    pub base: [f64; 2],
    /// Heading of the first link when joint 1 is at 0, radians.
    pub base_heading: f64,
}

impl Default for ArmConfig {
    fn default() -> Self {
        Self { link_lengths: [0.62 / JOINTS as f64; JOINTS], joint_limit: FRAC_PI_2, base: [0.0, 0.0], base_heading: FRAC_PI_2 }
    }
}

impl ArmConfig {
    pub fn total_length(&self) -> f64 {
        self.link_lengths.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "condition", content = "angle", rename_all = "snake_case")]
pub enum JointCondition {
    Intact,
    /// The joint holds this angle whatever it is commanded.
    Stuck(f64),
    /// The joint ends up this far from its command, within the joint range.
    Offset(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DamageSpec {
    pub joints: [JointCondition; JOINTS],
}

impl Default for DamageSpec {
    fn default() -> Self {
        Self::none()
    }
}

impl DamageSpec {
    pub fn none() -> Self {
        Self { joints: [JointCondition::Intact; JOINTS] }
    }

    /// Sets the condition of `joint` (1-based).
    pub fn with(mut self, joint: usize, condition: JointCondition) -> Self {
        assert!((1..=JOINTS).contains(&joint), "joint {joint} out of range");
        self.joints[joint - 1] = condition;
        self
    }

    pub fn is_intact(&self) -> bool {
        self.joints.iter().all(|c| *c == JointCondition::Intact)
    }

    /// Reads `joint,condition,angle_rad` rows. Joints are numbered from 1,
    /// conditions are `intact`, `stuck` or `offset`. A header row starting
    /// with `joint`, blank lines and `#` comments are skipped.
    pub fn from_csv<R: BufRead>(input: R, joint_limit: f64) -> Result<Self> {
        let mut spec = Self::none();
        let mut seen = [false; JOINTS];
        for (i, line) in input.lines().enumerate() {
            let line_no = i + 1;
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || (i == 0 && line.starts_with("joint")) {
                continue;
            }
            let err = |message: String| Error::Format { line: line_no, message };
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(err(format!("expected `joint,condition,angle_rad`, found {} fields", parts.len())));
            }
            let joint: usize = parts[0].parse().map_err(|_| err(format!("bad joint `{}`", parts[0])))?;
            if !(1..=JOINTS).contains(&joint) {
                return Err(err(format!("joint must be in 1..={JOINTS}, got {joint}")));
            }
            let angle: f64 = parts[2].parse().map_err(|_| err(format!("bad angle `{}`", parts[2])))?;
            if !angle.is_finite() || angle.abs() > joint_limit + 1e-12 {
                return Err(err(format!("angle {angle} outside the joint range ±{joint_limit}")));
            }
            let condition = match parts[1] {
                "intact" => JointCondition::Intact,
                "stuck" => JointCondition::Stuck(angle),
                "offset" => JointCondition::Offset(angle),
                other => return Err(err(format!("unknown condition `{other}`"))),
            };
            if seen[joint - 1] {
                return Err(err(format!("joint {joint} listed twice")));
            }
            seen[joint - 1] = true;
            spec.joints[joint - 1] = condition;
        }
        Ok(spec)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("joint,condition,angle_rad\n");
        for (i, c) in self.joints.iter().enumerate() {
            let (name, angle) = match c {
                JointCondition::Intact => continue,
                JointCondition::Stuck(a) => ("stuck", a),
                JointCondition::Offset(a) => ("offset", a),
            };
            out.push_str(&format!("{},{name},{angle:.17e}\n", i + 1));
        }
        out
    }

    /// Effective angles for the `commanded` ones.
    pub fn apply(&self, commanded: &[f64; JOINTS], joint_limit: f64) -> [f64; JOINTS] {
        let mut out = *commanded;
        for (a, c) in out.iter_mut().zip(&self.joints) {
            match *c {
                JointCondition::Intact => {}
                JointCondition::Stuck(s) => *a = s,
                JointCondition::Offset(o) => *a = (*a + o).clamp(-joint_limit, joint_limit),
            }
        }
        out
    }
}

/// The fourteen damage conditions used for benchmarking. The first three
/// are the stuck, offset and broken-plus-offset examples; the rest are
/// further stuck/offset combinations, the last few deliberately hard.
pub fn damage_suite() -> Vec<(String, DamageSpec)> {
    use JointCondition::{Offset, Stuck};
    let d = DamageSpec::none;
    let cases = vec![
        ("c1_j1_stuck_45", d().with(1, Stuck(FRAC_PI_4))),
        ("c2_j2_offset_45", d().with(2, Offset(FRAC_PI_4))),
        ("c3_j5_stuck_0_j3_offset_-45", d().with(5, Stuck(0.0)).with(3, Offset(-FRAC_PI_4))),
        ("c4_j2_stuck_-45", d().with(2, Stuck(-FRAC_PI_4))),
        ("c5_j6_stuck_0", d().with(6, Stuck(0.0))),
        ("c6_j8_offset_45", d().with(8, Offset(FRAC_PI_4))),
        ("c7_j3_stuck_90", d().with(3, Stuck(FRAC_PI_2))),
        ("c8_j1_offset_-45", d().with(1, Offset(-FRAC_PI_4))),
        ("c9_j2_j6_stuck_0", d().with(2, Stuck(0.0)).with(6, Stuck(0.0))),
        ("c10_j4_offset_-60", d().with(4, Offset(-PI / 3.0))),
        ("c11_j1_stuck_-90", d().with(1, Stuck(-FRAC_PI_2))),
        ("c12_j1_j2_stuck_45", d().with(1, Stuck(FRAC_PI_4)).with(2, Stuck(FRAC_PI_4))),
        ("c13_j3_offset_45_j7_offset_-45", d().with(3, Offset(FRAC_PI_4)).with(7, Offset(-FRAC_PI_4))),
        ("c14_j5_j6_j7_stuck_0", d().with(5, Stuck(0.0)).with(6, Stuck(0.0)).with(7, Stuck(0.0))),
    ];
    cases.into_iter().map(|(n, s)| (n.to_string(), s)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Workspace {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

impl Default for Workspace {
    fn default() -> Self {
        Self { x: [-0.7, 0.7], y: [0.0, 0.7] }
    }
}

impl Workspace {
    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.x[0] && p[0] <= self.x[1] && p[1] >= self.y[0] && p[1] <= self.y[1]
    }

    /// 200 x 100 cells over the default rectangle.
    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(vec![self.x[0], self.y[0]], vec![self.x[1], self.y[1]], vec![200, 100])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Target {
    pub x: f64,
    pub y: f64,
    pub radius: f64,
}

impl Default for Target {
    fn default() -> Self {
        Self { x: 0.0, y: 0.5, radius: 0.05 }
    }
}

impl Target {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y, ..Self::default() }
    }

    pub fn distance(&self, p: &[f64]) -> f64 {
        ((p[0] - self.x).powi(2) + (p[1] - self.y).powi(2)).sqrt()
    }
}

/// `(v - 0.5) * pi` per component.
pub fn genome_to_angles(genome: &Genome) -> Result<[f64; JOINTS]> {
    let p = genome.params();
    if p.len() != JOINTS {
        return Err(Error::DimensionMismatch { expected: JOINTS, actual: p.len() });
    }
    let mut out = [0.0; JOINTS];
    for (a, v) in out.iter_mut().zip(p) {
        *a = (v - 0.5) * PI;
    }
    Ok(out)
}

pub fn apply_damage(commanded: &[f64; JOINTS], damage: &DamageSpec, config: &ArmConfig) -> [f64; JOINTS] {
    damage.apply(commanded, config.joint_limit)
}

/// Base and link-tip positions; the gripper is the last point.
pub fn forward_kinematics(angles: &[f64; JOINTS], config: &ArmConfig) -> Chain {
    let mut points = [[0.0; 2]; JOINTS + 1];
    points[0] = config.base;
    let mut heading = config.base_heading;
    for i in 0..JOINTS {
        heading += angles[i];
        let l = config.link_lengths[i];
        points[i + 1] = [points[i][0] + l * heading.cos(), points[i][1] + l * heading.sin()];
    }
    points
}

pub fn gripper(chain: &Chain) -> [f64; 2] {
    chain[JOINTS]
}

const COLLINEAR_EPS: f64 = 1e-12;

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> i8 {
    let v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    if v > COLLINEAR_EPS {
        1
    } else if v < -COLLINEAR_EPS {
        -1
    } else {
        0
    }
}

fn on_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> bool {
    p[0] >= a[0].min(b[0]) - COLLINEAR_EPS
        && p[0] <= a[0].max(b[0]) + COLLINEAR_EPS
        && p[1] >= a[1].min(b[1]) - COLLINEAR_EPS
        && p[1] <= a[1].max(b[1]) + COLLINEAR_EPS
}

/// Closed-segment intersection, including touching and collinear overlap.
pub fn segments_intersect(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let o1 = orient(p1, p2, q1);
    let o2 = orient(p1, p2, q2);
    let o3 = orient(q1, q2, p1);
    let o4 = orient(q1, q2, p2);
    (o1 * o2 < 0 && o3 * o4 < 0)
        || (o1 == 0 && on_segment(p1, p2, q1))
        || (o2 == 0 && on_segment(p1, p2, q2))
        || (o3 == 0 && on_segment(q1, q2, p1))
        || (o4 == 0 && on_segment(q1, q2, p2))
}

/// True when any two non-adjacent links touch.
pub fn self_collides(chain: &[[f64; 2]]) -> bool {
    let links = chain.len().saturating_sub(1);
    for i in 0..links {
        for j in i + 2..links {
            if segments_intersect(chain[i], chain[i + 1], chain[j], chain[j + 1]) {
                return true;
            }
        }
    }
    false
}

/// `-(1/8) * sum (a_i - mean)^2`, radians squared.
pub fn angle_variance_performance(angles: &[f64; JOINTS]) -> f64 {
    let m = angles.iter().sum::<f64>() / JOINTS as f64;
    -angles.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / JOINTS as f64
}

/// Map-creation simulator: descriptor is the gripper position, performance
/// the negated angle variance; colliding or out-of-workspace poses are invalid.
#[derive(Debug, Clone, Default)]
pub struct ArmMapEvaluator {
    pub config: ArmConfig,
    pub workspace: Workspace,
}

impl Evaluator for ArmMapEvaluator {
    fn name(&self) -> &str {
        "arm"
    }

    fn genome_len(&self) -> usize {
        JOINTS
    }

    fn evaluate(&self, genome: &Genome) -> Evaluation {
        let angles = match genome_to_angles(genome) {
            Ok(a) => a,
            Err(_) => return Evaluation { descriptor: vec![0.0, 0.0], performance: f64::NEG_INFINITY, valid: false },
        };
        let chain = forward_kinematics(&angles, &self.config);
        let g = gripper(&chain);
        let valid = self.workspace.contains(g) && !self_collides(&chain);
        Evaluation { descriptor: g.to_vec(), performance: angle_variance_performance(&angles), valid }
    }
}

/// Performance reported when the gripper leaves the workspace.
pub const OUTSIDE_PERFORMANCE: f64 = -1.0;

/// Adaptation-time test on the damaged arm: `-||gripper - target||`.
#[derive(Debug, Clone, Default)]
pub struct ArmTrial {
    pub config: ArmConfig,
    pub workspace: Workspace,
    pub damage: DamageSpec,
    pub target: Target,
    /// Score self-colliding poses as -1 instead of measuring them.
    pub prescreen_collisions: bool,
}

impl ArmTrial {
    pub fn new(damage: DamageSpec, target: Target) -> Self {
        Self { damage, target, ..Self::default() }
    }

    pub fn gripper(&self, genome: &Genome) -> Result<[f64; 2]> {
        let angles = apply_damage(&genome_to_angles(genome)?, &self.damage, &self.config);
        Ok(gripper(&forward_kinematics(&angles, &self.config)))
    }

    pub fn performance(&self, genome: &Genome) -> Result<f64> {
        let angles = apply_damage(&genome_to_angles(genome)?, &self.damage, &self.config);
        let chain = forward_kinematics(&angles, &self.config);
        let g = gripper(&chain);
        if !self.workspace.contains(g) || (self.prescreen_collisions && self_collides(&chain)) {
            return Ok(OUTSIDE_PERFORMANCE);
        }
        Ok(-self.target.distance(&g))
    }
}

impl TrialEvaluator for ArmTrial {
    fn evaluate(&mut self, genome: &Genome) -> std::result::Result<Measurement, String> {
        self.performance(genome).map(Measurement::exact).map_err(|e| e.to_string())
    }
}

/// Adaptation prior for one target: `-||descriptor - b||` from the stored descriptor.
pub fn target_prior(target: Target) -> impl Fn(u64, &Elite) -> f64 {
    move |_, e| -target.distance(&e.descriptor)
}

/// Prior value for every occupied cell, sorted by cell index.
pub fn map_prior_for_target(grid: &ArchiveGrid, target: Target) -> Vec<(u64, f64)> {
    let prior = target_prior(target);
    grid.sorted().into_iter().map(|(k, e)| (k, prior(k, e))).collect()
}
