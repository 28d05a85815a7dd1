//! Recorded hexapod trajectories.
//!
//! One row per 15 ms step, taken at the end of the step. Positions are
//! relative to the start pose, so the robot is at the origin at `t = 0`.
//!
//! CSV columns, in order:
//!
//! ```text
//! c1..c6            contact flags (0 or 1)
//! pitch,roll,yaw    torso orientation, rad
//! x,y,z             torso position, m
//! e1..e6            cumulative energy per leg, N.m.rad
//! f1..f6            mean ground reaction force so far per leg, N
//! lp1..lp6          lower-leg pitch, rad (read only while in contact)
//! lr1..lr6          lower-leg roll, rad
//! ly1..ly6          lower-leg yaw, rad
//! ```

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

pub const LEGS: usize = 6;

pub const TRAJECTORY_COLUMNS: usize = 42;

/// Default sampling interval, seconds.
pub const DEFAULT_TIMESTEP: f64 = 0.015;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryStep {
    pub contacts: [bool; LEGS],
    pub pitch: f64,
    pub roll: f64,
    pub yaw: f64,
    pub position: [f64; 3],
    pub energy: [f64; LEGS],
    pub grf: [f64; LEGS],
    pub leg_pitch: [f64; LEGS],
    pub leg_roll: [f64; LEGS],
    pub leg_yaw: [f64; LEGS],
}

impl TrajectoryStep {
    fn values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.contacts.iter().map(|&c| if c { 1.0 } else { 0.0 }).collect();
        v.extend([self.pitch, self.roll, self.yaw]);
        v.extend(self.position);
        for block in [&self.energy, &self.grf, &self.leg_pitch, &self.leg_roll, &self.leg_yaw] {
            v.extend(block.iter());
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    timestep: f64,
    steps: Vec<TrajectoryStep>,
}

fn header() -> String {
    let mut cols: Vec<String> = (1..=LEGS).map(|i| format!("c{i}")).collect();
    cols.extend(["pitch", "roll", "yaw", "x", "y", "z"].map(String::from));
    for p in ["e", "f", "lp", "lr", "ly"] {
        cols.extend((1..=LEGS).map(|i| format!("{p}{i}")));
    }
    cols.join(",")
}

impl TrajectoryRecord {
    pub fn new(timestep: f64, steps: Vec<TrajectoryStep>) -> Result<Self> {
        let bad = |line: usize, message: String| Error::Trajectory { line, message };
        if !(timestep > 0.0 && timestep.is_finite()) {
            return Err(bad(0, format!("timestep must be positive, got {timestep}")));
        }
        if steps.is_empty() {
            return Err(bad(0, "trajectory has no steps".into()));
        }
        let mut prev = [0.0; LEGS];
        for (k, s) in steps.iter().enumerate() {
            if s.values().iter().any(|v| !v.is_finite()) {
                return Err(bad(k + 1, "non-finite value".into()));
            }
            for (i, (&e, p)) in s.energy.iter().zip(&prev).enumerate() {
                if e < 0.0 {
                    return Err(bad(k + 1, format!("negative energy on leg {}", i + 1)));
                }
                if e < *p {
                    return Err(bad(k + 1, format!("energy of leg {} decreases", i + 1)));
                }
            }
            prev = s.energy;
        }
        Ok(Self { timestep, steps })
    }

    pub fn timestep(&self) -> f64 {
        self.timestep
    }

    pub fn steps(&self) -> &[TrajectoryStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Total recorded duration `K * dt`.
    pub fn duration(&self) -> f64 {
        self.steps.len() as f64 * self.timestep
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", header())?;
        for s in &self.steps {
            let v = s.values();
            let mut fields: Vec<String> = v[..LEGS].iter().map(|c| format!("{c:.0}")).collect();
            fields.extend(v[LEGS..].iter().map(|x| format!("{x:.16e}")));
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R, timestep: f64) -> Result<Self> {
        let mut steps = Vec::new();
        let expected = header();
        for (i, line) in input.lines().enumerate() {
            let line_no = i + 1;
            let line = line?;
            let line = line.trim();
            if i == 0 {
                if line != expected {
                    return Err(Error::Trajectory { line: 1, message: format!("expected header `{expected}`") });
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Trajectory { line: line_no, message };
            let v: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| err("bad number".into()))?;
            if v.len() != TRAJECTORY_COLUMNS {
                return Err(err(format!("expected {TRAJECTORY_COLUMNS} fields, found {}", v.len())));
            }
            let mut contacts = [false; LEGS];
            for (c, &x) in contacts.iter_mut().zip(&v[..LEGS]) {
                *c = if x == 1.0 {
                    true
                } else if x == 0.0 {
                    false
                } else {
                    return Err(err(format!("contact flag must be 0 or 1, got {x}")));
                };
            }
            let six = |o: usize| -> [f64; LEGS] { std::array::from_fn(|i| v[o + i]) };
            steps.push(TrajectoryStep {
                contacts,
                pitch: v[6],
                roll: v[7],
                yaw: v[8],
                position: [v[9], v[10], v[11]],
                energy: six(12),
                grf: six(18),
                leg_pitch: six(24),
                leg_roll: six(30),
                leg_yaw: six(36),
            });
        }
        Self::new(timestep, steps).map_err(|e| match e {
            Error::Trajectory { line, message } if line > 0 => Error::Trajectory { line: line + 1, message },
            other => other,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(k: usize) -> TrajectoryStep {
        TrajectoryStep {
            contacts: [k.is_multiple_of(2), true, false, true, k.is_multiple_of(3), false],
            pitch: 0.01 * k as f64,
            position: [0.0, 0.002 * k as f64, 0.05],
            energy: [k as f64; LEGS],
            grf: [1.5; LEGS],
            leg_yaw: [-0.3; LEGS],
            ..Default::default()
        }
    }

    #[test]
    fn csv_round_trip() {
        let traj = TrajectoryRecord::new(DEFAULT_TIMESTEP, (0..20).map(step).collect()).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        assert_eq!(header().split(',').count(), TRAJECTORY_COLUMNS);
        let back = TrajectoryRecord::read_csv(buf.as_slice(), DEFAULT_TIMESTEP).unwrap();
        assert_eq!(back, traj);
    }

    #[test]
    fn rejects_invalid_records() {
        assert!(TrajectoryRecord::new(0.015, vec![]).is_err());
        let mut s = vec![step(2), step(1)];
        assert!(matches!(TrajectoryRecord::new(0.015, s.clone()), Err(Error::Trajectory { line: 2, .. })));
        s[1].energy = [-1.0; LEGS];
        assert!(TrajectoryRecord::new(0.015, s).is_err());
        assert!(TrajectoryRecord::read_csv("a,b\n".as_bytes(), 0.015).is_err());
        let bad = format!("{}\n1,0,0\n", header());
        assert!(matches!(TrajectoryRecord::read_csv(bad.as_bytes(), 0.015), Err(Error::Trajectory { line: 2, .. })));
    }
}
