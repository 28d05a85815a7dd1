//! The eleven trajectory descriptors and the random composite.
//!
//! Every output is clamped to `[0, 1]`.

use std::f64::consts::PI;

use rand::seq::index::sample;
use serde::Serialize;

use super::trajectory::{TrajectoryRecord, LEGS};
use crate::error::{Error, Result};
use crate::rng;

const ORIENTATION_THRESHOLD: f64 = 0.005 * PI;
const DISPLACEMENT_THRESHOLD: f64 = 0.001;
const MAX_ENERGY: f64 = 100.0;
const MAX_GRF: f64 = 10.0;
const DEVIATION_SCALE: f64 = 0.95 / 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DescriptorKind {
    DutyFactor,
    Orientation,
    Displacement,
    TotalEnergy,
    RelativeEnergy,
    Deviation,
    TotalGrf,
    RelativeGrf,
    LegPitch,
    LegRoll,
    LegYaw,
}

impl DescriptorKind {
    pub const ALL: [DescriptorKind; 11] = [
        Self::DutyFactor,
        Self::Orientation,
        Self::Displacement,
        Self::TotalEnergy,
        Self::RelativeEnergy,
        Self::Deviation,
        Self::TotalGrf,
        Self::RelativeGrf,
        Self::LegPitch,
        Self::LegRoll,
        Self::LegYaw,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::DutyFactor => "duty_factor",
            Self::Orientation => "orientation",
            Self::Displacement => "displacement",
            Self::TotalEnergy => "total_energy",
            Self::RelativeEnergy => "relative_energy",
            Self::Deviation => "deviation",
            Self::TotalGrf => "total_grf",
            Self::RelativeGrf => "relative_grf",
            Self::LegPitch => "leg_pitch",
            Self::LegRoll => "leg_roll",
            Self::LegYaw => "leg_yaw",
        }
    }

    pub fn dims(self) -> usize {
        match self {
            Self::Deviation => 3,
            _ => 6,
        }
    }
}

impl std::str::FromStr for DescriptorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| Error::Config(format!("unknown descriptor kind `{s}`")))
    }
}

impl std::fmt::Display for DescriptorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn step_fn(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else {
        0.0
    }
}

fn clamp01(v: Vec<f64>) -> Vec<f64> {
    v.into_iter().map(|x| x.clamp(0.0, 1.0)).collect()
}

/// Fraction of steps above `+threshold` and below `-threshold`, per signal.
fn signed_fractions(traj: &TrajectoryRecord, threshold: f64, signals: &[Vec<f64>]) -> Vec<f64> {
    let k = traj.len() as f64;
    signals
        .iter()
        .flat_map(|s| {
            let pos = s.iter().map(|&v| step_fn(v - threshold)).sum::<f64>() / k;
            let neg = s.iter().map(|&v| step_fn(-v - threshold)).sum::<f64>() / k;
            [pos, neg]
        })
        .collect()
}

fn relative(values: [f64; LEGS]) -> Vec<f64> {
    let total: f64 = values.iter().sum();
    if total == 0.0 {
        return vec![1.0 / LEGS as f64; LEGS];
    }
    values.iter().map(|v| v / total).collect()
}

/// Mean of `angle(leg, step)` over the steps where the leg touches the
/// ground, after `map`; zero for a leg that never touches.
fn contact_mean(traj: &TrajectoryRecord, angle: impl Fn(usize, usize) -> f64, map: impl Fn(f64) -> f64) -> Vec<f64> {
    (0..LEGS)
        .map(|leg| {
            let (sum, n) = traj
                .steps()
                .iter()
                .enumerate()
                .filter(|(_, s)| s.contacts[leg])
                .fold((0.0, 0usize), |(sum, n), (k, _)| (sum + map(angle(leg, k)), n + 1));
            if n == 0 {
                0.0
            } else {
                sum / n as f64
            }
        })
        .collect()
}

fn range(values: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    hi - lo
}

/// Evaluates one descriptor on a trajectory.
pub fn descriptor(kind: DescriptorKind, traj: &TrajectoryRecord) -> Vec<f64> {
    let steps = traj.steps();
    let k = steps.len() as f64;
    let last = steps.last().expect("trajectory is non-empty");
    let out = match kind {
        DescriptorKind::DutyFactor => (0..LEGS).map(|leg| steps.iter().filter(|s| s.contacts[leg]).count() as f64 / k).collect(),
        DescriptorKind::Orientation => {
            let signals =
                [steps.iter().map(|s| s.pitch).collect(), steps.iter().map(|s| s.roll).collect(), steps.iter().map(|s| s.yaw).collect()];
            signed_fractions(traj, ORIENTATION_THRESHOLD, &signals)
        }
        DescriptorKind::Displacement => {
            let signals: Vec<Vec<f64>> = (0..3)
                .map(|axis| {
                    let mut prev = 0.0;
                    steps
                        .iter()
                        .map(|s| {
                            let d = s.position[axis] - prev;
                            prev = s.position[axis];
                            d
                        })
                        .collect()
                })
                .collect();
            signed_fractions(traj, DISPLACEMENT_THRESHOLD, &signals)
        }
        DescriptorKind::TotalEnergy => last.energy.iter().map(|e| e / MAX_ENERGY).collect(),
        DescriptorKind::RelativeEnergy => relative(last.energy),
        DescriptorKind::Deviation => {
            let dt = traj.timestep();
            let speed = last.position[1] / traj.duration();
            let series = |f: &dyn Fn(usize, &[f64; 3]) -> f64| -> f64 {
                let values: Vec<f64> = steps.iter().enumerate().map(|(i, s)| f(i, &s.position)).collect();
                range(std::iter::once(0.0).chain(values))
            };
            vec![
                DEVIATION_SCALE * series(&|_, p| p[0]),
                DEVIATION_SCALE * series(&|i, p| p[1] - speed * (i + 1) as f64 * dt),
                DEVIATION_SCALE * series(&|_, p| p[2]),
            ]
        }
        DescriptorKind::TotalGrf => last.grf.iter().map(|f| f / MAX_GRF).collect(),
        DescriptorKind::RelativeGrf => relative(last.grf),
        DescriptorKind::LegPitch => contact_mean(traj, |l, k| steps[k].leg_pitch[l], |a| a / PI),
        DescriptorKind::LegRoll => contact_mean(traj, |l, k| steps[k].leg_roll[l], |a| a / PI),
        DescriptorKind::LegYaw => contact_mean(traj, |l, k| steps[k].leg_yaw[l], |a| (a + PI) / (2.0 * PI)),
    };
    clamp01(out)
}

/// All 63 single components `(kind, component index)` in kind order.
pub fn component_pool() -> Vec<(DescriptorKind, usize)> {
    DescriptorKind::ALL.into_iter().flat_map(|k| (0..k.dims()).map(move |c| (k, c))).collect()
}

/// Six components drawn without replacement from the pool.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RandomBasis {
    pub components: Vec<(DescriptorKind, usize)>,
}

impl RandomBasis {
    pub fn evaluate(&self, traj: &TrajectoryRecord) -> Vec<f64> {
        let mut cache: Vec<(DescriptorKind, Vec<f64>)> = Vec::new();
        self.components
            .iter()
            .map(|&(kind, c)| {
                if let Some((_, v)) = cache.iter().find(|(k, _)| *k == kind) {
                    return v[c];
                }
                let v = descriptor(kind, traj);
                let out = v[c];
                cache.push((kind, v));
                out
            })
            .collect()
    }
}

pub fn random_descriptor_basis(seed: u64) -> RandomBasis {
    let pool = component_pool();
    let mut r = rng::seeded(seed);
    let components = sample(&mut r, pool.len(), 6).into_iter().map(|i| pool[i]).collect();
    RandomBasis { components }
}
