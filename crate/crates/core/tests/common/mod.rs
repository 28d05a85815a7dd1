//! Independent reference implementations shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::PI;

use iteqd::gait::{DescriptorKind, TrajectoryRecord, TrajectoryStep, LEGS};
use iteqd::gp::Observation;
use iteqd::rng::seeded;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Matérn 5/2 written out from its definition.
pub fn kernel(a: &[f64], b: &[f64], rho: f64) -> f64 {
    let d = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let s5 = 5f64.sqrt();
    (1.0 + s5 * d / rho + 5.0 * d * d / (3.0 * rho * rho)) * (-s5 * d / rho).exp()
}

/// Posterior mean and variance through an explicit matrix inverse.
pub fn dense_posterior(obs: &[Observation], rho: f64, noise: f64, x: &[f64], prior_x: f64) -> (f64, f64) {
    let t = obs.len();
    if t == 0 {
        return (prior_x, 1.0);
    }
    let k = DMatrix::from_fn(t, t, |i, j| kernel(&obs[i].chi, &obs[j].chi, rho) + if i == j { noise } else { 0.0 });
    let inv = k.try_inverse().expect("invertible");
    let kx = DVector::from_fn(t, |i, _| kernel(x, &obs[i].chi, rho));
    let resid = DVector::from_fn(t, |i, _| obs[i].measured - obs[i].prior_at_chi);
    let mu = prior_x + (kx.transpose() * &inv * resid)[(0, 0)];
    let var = kernel(x, x, rho) - (kx.transpose() * &inv * &kx)[(0, 0)];
    (mu, var)
}

pub fn random_trajectory(seed: u64) -> TrajectoryRecord {
    let mut r = seeded(seed ^ 0xD15C);
    let k = r.random_range(1..400);
    let mut energy = [0.0; LEGS];
    let mut pos = [0.0; 3];
    let steps = (0..k)
        .map(|_| {
            for e in &mut energy {
                *e += r.random_range(0.0..0.6);
            }
            for p in &mut pos {
                *p += r.random_range(-0.004..0.004);
            }
            TrajectoryStep {
                contacts: std::array::from_fn(|_| r.random_bool(0.6)),
                pitch: r.random_range(-0.1..0.1),
                roll: r.random_range(-0.1..0.1),
                yaw: r.random_range(-0.1..0.1),
                position: pos,
                energy,
                grf: std::array::from_fn(|_| r.random_range(0.0..12.0)),
                leg_pitch: std::array::from_fn(|_| r.random_range(0.0..PI)),
                leg_roll: std::array::from_fn(|_| r.random_range(0.0..PI)),
                leg_yaw: std::array::from_fn(|_| r.random_range(-PI..PI)),
            }
        })
        .collect();
    TrajectoryRecord::new(0.015, steps).unwrap()
}

fn u(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Descriptor formulas transcribed term by term with index loops.
pub fn descriptor_oracle(kind: DescriptorKind, traj: &TrajectoryRecord) -> Vec<f64> {
    let s = traj.steps();
    let kk = s.len();
    let dt = traj.timestep();
    let last = &s[kk - 1];
    let mut x = vec![0.0; kind.dims()];
    match kind {
        DescriptorKind::DutyFactor => {
            for i in 0..6 {
                let mut sum = 0.0;
                for t in 0..kk {
                    if s[t].contacts[i] {
                        sum += 1.0;
                    }
                }
                x[i] = sum / kk as f64;
            }
        }
        DescriptorKind::Orientation => {
            for k in 0..kk {
                let th = s[k].pitch;
                let ps = s[k].roll;
                let ph = s[k].yaw;
                x[0] += u(th - 0.005 * PI);
                x[1] += u(-th - 0.005 * PI);
                x[2] += u(ps - 0.005 * PI);
                x[3] += u(-ps - 0.005 * PI);
                x[4] += u(ph - 0.005 * PI);
                x[5] += u(-ph - 0.005 * PI);
            }
            for v in &mut x {
                *v /= kk as f64;
            }
        }
        DescriptorKind::Displacement => {
            for k in 0..kk {
                let prev = if k == 0 { [0.0; 3] } else { s[k - 1].position };
                let dx = s[k].position[0] - prev[0];
                let dy = s[k].position[1] - prev[1];
                let dz = s[k].position[2] - prev[2];
                x[0] += u(dx - 0.001);
                x[1] += u(-dx - 0.001);
                x[2] += u(dy - 0.001);
                x[3] += u(-dy - 0.001);
                x[4] += u(dz - 0.001);
                x[5] += u(-dz - 0.001);
            }
            for v in &mut x {
                *v /= kk as f64;
            }
        }
        DescriptorKind::TotalEnergy => {
            for i in 0..6 {
                x[i] = last.energy[i] / 100.0;
            }
        }
        DescriptorKind::RelativeEnergy => {
            let total: f64 = last.energy.iter().sum();
            for i in 0..6 {
                x[i] = if total == 0.0 { 1.0 / 6.0 } else { last.energy[i] / total };
            }
        }
        DescriptorKind::Deviation => {
            let duration = kk as f64 * dt;
            let yf = last.position[1];
            let mut xs = vec![0.0];
            let mut ys = vec![0.0];
            let mut zs = vec![0.0];
            for k in 0..kk {
                let t = (k + 1) as f64 * dt;
                xs.push(s[k].position[0]);
                ys.push(s[k].position[1] - yf / duration * t);
                zs.push(s[k].position[2]);
            }
            let spread = |v: &[f64]| {
                let mut a = f64::MIN;
                let mut b = f64::MAX;
                for &e in v {
                    a = a.max(e);
                    b = b.min(e);
                }
                a - b
            };
            x[0] = 0.95 * spread(&xs) / 0.2;
            x[1] = 0.95 * spread(&ys) / 0.2;
            x[2] = 0.95 * spread(&zs) / 0.2;
        }
        DescriptorKind::TotalGrf => {
            for i in 0..6 {
                x[i] = last.grf[i] / 10.0;
            }
        }
        DescriptorKind::RelativeGrf => {
            let total: f64 = last.grf.iter().sum();
            for i in 0..6 {
                x[i] = if total == 0.0 { 1.0 / 6.0 } else { last.grf[i] / total };
            }
        }
        DescriptorKind::LegPitch | DescriptorKind::LegRoll | DescriptorKind::LegYaw => {
            for i in 0..6 {
                let mut sum = 0.0;
                let mut n = 0usize;
                for t in 0..kk {
                    if !s[t].contacts[i] {
                        continue;
                    }
                    n += 1;
                    sum += match kind {
                        DescriptorKind::LegPitch => s[t].leg_pitch[i] / PI,
                        DescriptorKind::LegRoll => s[t].leg_roll[i] / PI,
                        _ => (s[t].leg_yaw[i] + PI) / (2.0 * PI),
                    };
                }
                x[i] = if n == 0 { 0.0 } else { sum / n as f64 };
            }
        }
    }
    x.iter().map(|v| v.clamp(0.0, 1.0)).collect()
}
