//! Hexapod gait controller and trajectory behavior descriptors.
//!
//! Each leg has two driven signals. A signal is a 1 Hz square wave of
//! amplitude `alpha` that sits high for a `tau` fraction of the period,
//! smoothed by a circular Gaussian filter and shifted by `phi` periods.
//! The third servo of every leg mirrors the second.

mod descriptors;
mod trajectory;

pub use descriptors::{component_pool, descriptor, random_descriptor_basis, DescriptorKind, RandomBasis};
pub use trajectory::{TrajectoryRecord, TrajectoryStep, DEFAULT_TIMESTEP, LEGS, TRAJECTORY_COLUMNS};

use serde::Serialize;

use crate::archive::Genome;
use crate::error::{Error, Result};

/// Samples per 1 s period in the smoothed signal table (10 ms resolution).
pub const PERIOD_SAMPLES: usize = 100;
/// Servo update interval, seconds.
pub const COMMAND_INTERVAL: f64 = 0.03;
/// Default smoothing width: two command intervals.
pub const DEFAULT_SMOOTHING_SIGMA: f64 = 0.06;

/// One smoothed period of the square wave, sampled every 10 ms.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalTable {
    values: Vec<f64>,
}

impl SignalTable {
    /// `sigma` is the Gaussian width in seconds; the kernel is truncated at
    /// three widths and renormalized. `sigma = 0` keeps the raw square wave.
    pub fn new(alpha: f64, tau: f64, sigma: f64) -> Self {
        let n = PERIOD_SAMPLES;
        let square: Vec<f64> = (0..n).map(|j| if (j as f64) < tau * n as f64 { alpha } else { -alpha }).collect();
        let s = sigma * n as f64;
        if s <= 0.0 {
            return Self { values: square };
        }
        let half = (3.0 * s).ceil() as i64;
        let weights: Vec<f64> = (-half..=half).map(|k| (-(k * k) as f64 / (2.0 * s * s)).exp()).collect();
        let total: f64 = weights.iter().sum();
        let values = (0..n as i64)
            .map(|j| {
                weights.iter().enumerate().map(|(w, &wt)| wt * square[(j + w as i64 - half).rem_euclid(n as i64) as usize]).sum::<f64>()
                    / total
            })
            .collect();
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Linear interpolation at `t` seconds for phase `phi` (in periods).
    pub fn at(&self, t: f64, phi: f64) -> f64 {
        let n = self.values.len();
        let u = (t - phi).rem_euclid(1.0) * n as f64;
        let i = (u.floor() as usize).min(n - 1);
        let frac = u - i as f64;
        let a = self.values[i];
        let b = self.values[(i + 1) % n];
        a + (b - a) * frac
    }
}

/// `gamma(t, alpha, phi, tau)` with the default smoothing.
pub fn gait_signal(t: f64, alpha: f64, phi: f64, tau: f64) -> f64 {
    SignalTable::new(alpha, tau, DEFAULT_SMOOTHING_SIGMA).at(t, phi)
}

/// Parameters of one leg.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LegParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub tau1: f64,
    pub tau2: f64,
}

/// The 36-parameter controller, six values per leg in the order
/// `alpha1, alpha2, phi1, phi2, tau1, tau2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaitParams {
    pub legs: [LegParams; LEGS],
}

impl GaitParams {
    pub const LEN: usize = 6 * LEGS;

    pub fn from_genome(genome: &Genome) -> Result<Self> {
        Self::from_slice(genome.params())
    }

    pub fn from_slice(p: &[f64]) -> Result<Self> {
        if p.len() != Self::LEN {
            return Err(Error::DimensionMismatch { expected: Self::LEN, actual: p.len() });
        }
        if let Some(v) = p.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidGenome(format!("gait parameter {v} outside [0, 1]")));
        }
        let legs = std::array::from_fn(|i| {
            let q = &p[6 * i..6 * i + 6];
            LegParams { alpha1: q[0], alpha2: q[1], phi1: q[2], phi2: q[3], tau1: q[4], tau2: q[5] }
        });
        Ok(Self { legs })
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.legs.iter().flat_map(|l| [l.alpha1, l.alpha2, l.phi1, l.phi2, l.tau1, l.tau2]).collect()
    }

    /// True when every value is one of the 21 levels {0, 0.05, ..., 1}.
    pub fn on_levels(&self) -> bool {
        self.to_vec().iter().all(|v| ((v * 20.0).round() - v * 20.0).abs() < 1e-9)
    }

    /// The hand-designed tripod gait.
    pub fn reference_tripod() -> Self {
        let phi1 = [0.0, 0.0, 0.5, 0.5, 0.0, 0.0];
        let phi2 = [0.75, 0.25, 0.25, 0.75, 0.75, 0.25];
        let legs = std::array::from_fn(|i| LegParams { alpha1: 1.0, alpha2: 0.25, phi1: phi1[i], phi2: phi2[i], tau1: 0.5, tau2: 0.5 });
        Self { legs }
    }
}

/// Signal generator for a full controller.
#[derive(Debug, Clone)]
pub struct GaitController {
    params: GaitParams,
    tables: Vec<[SignalTable; 2]>,
}

impl GaitController {
    pub fn new(params: GaitParams, sigma: f64) -> Self {
        let tables =
            params.legs.iter().map(|l| [SignalTable::new(l.alpha1, l.tau1, sigma), SignalTable::new(l.alpha2, l.tau2, sigma)]).collect();
        Self { params, tables }
    }

    pub fn params(&self) -> &GaitParams {
        &self.params
    }

    /// Continuous-time commands: per leg `[dof1, dof2, dof3]` with `dof3 = -dof2`.
    pub fn signals(&self, t: f64) -> [[f64; 3]; LEGS] {
        std::array::from_fn(|i| {
            let l = &self.params.legs[i];
            let d1 = self.tables[i][0].at(t, l.phi1);
            let d2 = self.tables[i][1].at(t, l.phi2);
            [d1, d2, -d2]
        })
    }

    /// Commands as sent to the servos: held between 30 ms updates.
    pub fn joint_commands(&self, t: f64) -> [[f64; 3]; LEGS] {
        let tick = (t / COMMAND_INTERVAL + 1e-9).floor();
        self.signals(tick * COMMAND_INTERVAL)
    }
}

/// `joint_commands` for `params` with the default smoothing.
pub fn joint_commands(params: &GaitParams, t: f64) -> [[f64; 3]; LEGS] {
    GaitController::new(params.clone(), DEFAULT_SMOOTHING_SIGMA).joint_commands(t)
}
