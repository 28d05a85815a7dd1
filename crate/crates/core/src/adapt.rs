//! Map-based Bayesian optimization: the adaptation loop.
//!
//! Each iteration scores every occupied cell of the archive with the upper
//! confidence bound `mu + kappa * sigma`, tests the winner's controller on the
//! (damaged) system, refits the Gaussian process on all trials so far and
//! checks the stopping rules.

use rand::Rng;
use serde::Serialize;

use crate::archive::{ArchiveGrid, Elite, Genome};
use crate::error::{Error, Result};
use crate::gp::{GpState, KernelParams, Observation, Posterior};

/// Outcome of testing one controller on the real (or damaged simulated) system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Measurement {
    /// What the optimizer sees, possibly noisy.
    pub measured: f64,
    /// Noise-free value, kept for reporting.
    pub truth: f64,
}

impl Measurement {
    pub fn exact(value: f64) -> Self {
        Self { measured: value, truth: value }
    }
}

pub trait TrialEvaluator {
    fn evaluate(&mut self, genome: &Genome) -> std::result::Result<Measurement, String>;
}

impl<F> TrialEvaluator for F
where
    F: FnMut(&Genome) -> f64,
{
    fn evaluate(&mut self, genome: &Genome) -> std::result::Result<Measurement, String> {
        Ok(Measurement::exact(self(genome)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdaptConfig {
    pub kappa: f64,
    pub alpha: f64,
    /// Stop once the best measurement reaches `alpha` times the highest
    /// predicted performance in the map.
    pub alpha_stop: bool,
    pub noise_var: f64,
    pub max_trials: usize,
    pub kernel: KernelParams,
    /// Stop once a measurement is at least `-radius` (distance-type tasks).
    pub target_radius: Option<f64>,
    /// The first `random_initial` trials pick untested cells uniformly at random.
    pub random_initial: usize,
    /// Measurements below this value are raised to it.
    pub performance_floor: Option<f64>,
    /// Value recorded for a failed evaluation. `None` aborts instead.
    pub failure_sentinel: Option<f64>,
}

impl AdaptConfig {
    /// Defaults for unit-cube behavior spaces (gait-style tasks).
    pub fn unit_cube() -> Self {
        Self {
            kappa: 0.05,
            alpha: 0.9,
            alpha_stop: true,
            noise_var: 0.001,
            max_trials: 20,
            kernel: KernelParams::new(0.4),
            target_radius: None,
            random_initial: 0,
            performance_floor: None,
            failure_sentinel: None,
        }
    }

    /// Defaults for the arm: distances in meters, stop within 5 cm of the target.
    pub fn arm() -> Self {
        Self {
            kappa: 0.3,
            alpha: 0.9,
            alpha_stop: false,
            noise_var: 0.03,
            max_trials: 31,
            kernel: KernelParams::new(0.1),
            target_radius: Some(0.05),
            random_initial: 0,
            performance_floor: None,
            failure_sentinel: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.kappa.is_nan() || self.kappa < 0.0 {
            return Err(Error::Config(format!("kappa must be non-negative, got {}", self.kappa)));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Config(format!("alpha must be in (0, 1], got {}", self.alpha)));
        }
        if self.max_trials == 0 {
            return Err(Error::Config("max_trials must be at least 1".into()));
        }
        Ok(())
    }
}

/// A cell the acquisition function may choose.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub cell: u64,
    pub descriptor: Vec<f64>,
    pub prior: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    /// Position in the candidate slice.
    pub position: usize,
    pub cell: u64,
    pub posterior: Posterior,
    pub acquisition: f64,
}

/// Exhaustive UCB over `candidates`; ties go to the lowest cell index.
pub fn ucb_select(gp: &GpState, candidates: &[Candidate], kappa: f64) -> Result<Selection> {
    let scan: Vec<Posterior> = candidates.iter().map(|c| gp.posterior(&c.descriptor, c.prior)).collect();
    argmax_ucb(candidates, &scan, kappa).ok_or(Error::NoCandidates)
}

fn argmax_ucb(candidates: &[Candidate], scan: &[Posterior], kappa: f64) -> Option<Selection> {
    let mut best: Option<Selection> = None;
    for (i, (c, p)) in candidates.iter().zip(scan).enumerate() {
        let a = p.mu + kappa * p.sigma();
        let better = match &best {
            None => true,
            Some(b) => a > b.acquisition || (a == b.acquisition && c.cell < b.cell),
        };
        if better {
            best = Some(Selection { position: i, cell: c.cell, posterior: *p, acquisition: a });
        }
    }
    best
}

/// `best_measured >= alpha * max_predicted_mu`.
pub fn stop_check(best_measured: f64, max_predicted_mu: f64, alpha: f64) -> bool {
    best_measured >= alpha * max_predicted_mu
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionKind {
    Ucb,
    Random,
    Perturbation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialEntry {
    pub trial: usize,
    /// Archive cell tested; `None` for raw-space searches.
    pub cell: Option<u64>,
    /// Behavior descriptor, or the genome itself for raw-space searches.
    pub descriptor: Vec<f64>,
    pub selection: SelectionKind,
    /// Posterior before the test. Model-free searches log NaN here and in
    /// the other model fields.
    pub predicted_mu: f64,
    pub predicted_var: f64,
    pub acquisition: f64,
    pub measured: f64,
    pub truth: f64,
    /// Running max of `measured`.
    pub cumulative_best: f64,
    /// Highest posterior mean over the map after this trial's update.
    pub max_predicted_mu: f64,
    pub k_condition: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TrialLog {
    pub entries: Vec<TrialEntry>,
}

impl TrialLog {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Noise-free performance of the best-measured trial among the first `cut`.
    pub fn best_truth_at(&self, cut: usize) -> Option<f64> {
        let mut best: Option<&TrialEntry> = None;
        for e in self.entries.iter().take(cut) {
            if best.is_none_or(|b| e.measured > b.measured) {
                best = Some(e);
            }
        }
        best.map(|e| e.truth)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Alpha,
    TargetRadius,
    MaxTrials,
}

#[derive(Debug, Clone)]
pub struct AdaptOutcome {
    pub best_cell: u64,
    pub best: Elite,
    pub best_measured: f64,
    pub best_truth: f64,
    pub stop_reason: StopReason,
    pub log: TrialLog,
}

impl AdaptOutcome {
    pub fn trials(&self) -> usize {
        self.log.len()
    }
}

/// Candidates for every occupied cell, sorted by cell index, with the prior
/// mean given by `prior(cell, elite)`.
pub fn candidates<F>(grid: &ArchiveGrid, prior: F) -> Vec<Candidate>
where
    F: Fn(u64, &Elite) -> f64,
{
    grid.sorted().into_iter().map(|(cell, e)| Candidate { cell, descriptor: e.descriptor.clone(), prior: prior(cell, e) }).collect()
}

/// Runs the adaptation loop over `grid` with the prior mean `prior(cell, elite)`.
///
/// `rng` is only consumed by the random initial trials.
pub fn adapt<E, R, F>(grid: &ArchiveGrid, prior: F, evaluator: &mut E, config: &AdaptConfig, rng: &mut R) -> Result<AdaptOutcome>
where
    E: TrialEvaluator + ?Sized,
    R: Rng + ?Sized,
    F: Fn(u64, &Elite) -> f64,
{
    config.validate()?;
    if grid.is_empty() {
        return Err(Error::EmptyArchive);
    }
    let cands = candidates(grid, prior);
    let mut gp = GpState::empty(config.kernel, config.noise_var)?;
    let mut scan: Vec<Posterior> = cands.iter().map(|c| gp.posterior(&c.descriptor, c.prior)).collect();
    let mut tested = vec![false; cands.len()];
    let mut observations: Vec<Observation> = Vec::new();
    let mut log = TrialLog::default();
    let mut best: Option<(usize, f64, f64)> = None;

    for trial in 1..=config.max_trials {
        let (sel, kind) = if trial <= config.random_initial {
            let untested: Vec<usize> = (0..cands.len()).filter(|&i| !tested[i]).collect();
            let position =
                if untested.is_empty() { rng.random_range(0..cands.len()) } else { untested[rng.random_range(0..untested.len())] };
            let p = scan[position];
            let sel = Selection { position, cell: cands[position].cell, posterior: p, acquisition: p.mu + config.kappa * p.sigma() };
            (sel, SelectionKind::Random)
        } else {
            (argmax_ucb(&cands, &scan, config.kappa).expect("non-empty"), SelectionKind::Ucb)
        };
        let cand = &cands[sel.position];
        let elite = grid.get(cand.cell).expect("candidate cell is occupied");

        let mut m = match evaluator.evaluate(&elite.genome) {
            Ok(m) => m,
            Err(msg) => match config.failure_sentinel {
                Some(v) => Measurement::exact(v),
                None => return Err(Error::Evaluation(msg)),
            },
        };
        if let Some(floor) = config.performance_floor {
            m.measured = m.measured.max(floor);
        }
        tested[sel.position] = true;

        observations.push(Observation { chi: cand.descriptor.clone(), measured: m.measured, prior_at_chi: cand.prior });
        gp = GpState::fit(config.kernel, config.noise_var, observations.clone())?;
        scan = cands.iter().map(|c| gp.posterior(&c.descriptor, c.prior)).collect();
        let max_mu = scan.iter().map(|p| p.mu).fold(f64::NEG_INFINITY, f64::max);

        if best.is_none_or(|(_, b, _)| m.measured > b) {
            best = Some((sel.position, m.measured, m.truth));
        }
        let (_, best_measured, _) = best.expect("set above");
        log.entries.push(TrialEntry {
            trial,
            cell: Some(cand.cell),
            descriptor: cand.descriptor.clone(),
            selection: kind,
            predicted_mu: sel.posterior.mu,
            predicted_var: sel.posterior.var,
            acquisition: sel.acquisition,
            measured: m.measured,
            truth: m.truth,
            cumulative_best: best_measured,
            max_predicted_mu: max_mu,
            k_condition: gp.condition_estimate(),
        });

        let reason = if config.target_radius.is_some_and(|r| m.measured >= -r) {
            Some(StopReason::TargetRadius)
        } else if config.alpha_stop && stop_check(best_measured, max_mu, config.alpha) {
            Some(StopReason::Alpha)
        } else if trial == config.max_trials {
            Some(StopReason::MaxTrials)
        } else {
            None
        };
        if let Some(stop_reason) = reason {
            let (position, best_measured, best_truth) = best.expect("at least one trial");
            let best_cell = cands[position].cell;
            return Ok(AdaptOutcome {
                best_cell,
                best: grid.get(best_cell).expect("occupied").clone(),
                best_measured,
                best_truth,
                stop_reason,
                log,
            });
        }
    }
    unreachable!("the last trial always stops")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::archive::GridSpec;
    use crate::rng::seeded;

    fn grid_with(points: &[(f64, f64)]) -> ArchiveGrid {
        // 1-D behavior space, each point is (descriptor, performance)
        let mut g = ArchiveGrid::new(GridSpec::unit(1, 1000).unwrap());
        for &(d, p) in points {
            g.try_insert(Elite { genome: Genome::new(vec![d]).unwrap(), descriptor: vec![d], performance: p }).unwrap();
        }
        g
    }

    fn cand(cell: u64, x: f64, prior: f64) -> Candidate {
        Candidate { cell, descriptor: vec![x], prior }
    }

    #[test]
    fn ucb_hand_arithmetic() {
        let mu = [0.5, 0.4];
        let sd = [0.1f64, 0.5];
        let c = [cand(0, 0.0, 0.0), cand(1, 1.0, 0.0)];
        let scan: Vec<Posterior> = mu.iter().zip(sd).map(|(&m, s)| Posterior { mu: m, var: s * s }).collect();
        let s = argmax_ucb(&c, &scan, 0.05).unwrap();
        assert_eq!(s.cell, 0);
        assert!((s.acquisition - 0.505).abs() < 1e-12);
        let s = argmax_ucb(&c, &scan, 0.3).unwrap();
        assert_eq!(s.cell, 1);
        assert!((s.acquisition - 0.55).abs() < 1e-12);
        let s = argmax_ucb(&c, &scan, 0.0).unwrap();
        assert_eq!(s.cell, 0);
    }

    #[test]
    fn ucb_ties_go_to_lowest_cell() {
        let gp = GpState::empty(KernelParams::new(0.4), 0.001).unwrap();
        let c = [cand(7, 0.0, 1.0), cand(3, 0.5, 1.0), cand(5, 0.9, 1.0)];
        assert_eq!(ucb_select(&gp, &c, 0.05).unwrap().cell, 3);
        assert!(matches!(ucb_select(&gp, &[], 0.05), Err(Error::NoCandidates)));
    }

    #[test]
    fn stop_check_boundary() {
        assert!(stop_check(0.27, 0.30, 0.9));
        assert!(!stop_check(0.26, 0.30, 0.9));
    }

    #[test]
    fn perfect_prior_stops_after_one_trial() {
        let grid = grid_with(&[(0.05, 0.2), (0.5, 0.9), (0.95, 0.4)]);
        for kappa in [0.0, 0.05] {
            let cfg = AdaptConfig { kappa, ..AdaptConfig::unit_cube() };
            let mut eval = |g: &Genome| grid.get(grid.spec().flat_index(g.params()).unwrap()).unwrap().performance;
            let out = adapt(&grid, |_, e| e.performance, &mut eval, &cfg, &mut seeded(0)).unwrap();
            assert_eq!(out.trials(), 1);
            assert_eq!(out.stop_reason, StopReason::Alpha);
            assert_eq!(out.best.descriptor, vec![0.5]);
        }
    }

    /// Three cells far enough apart that every cross-covariance underflows
    /// to exactly 0 (rho 0.001, spacing 0.45), zero prior, kappa 0.05.
    /// Untested cells keep mu 0, var 1, UCB 0.05; a tested cell with
    /// measurement m gets mu = m/1.001 and var = 1 - 1/1.001.
    /// Trial 1: three-way tie -> A; A = -0.2, max mu stays 0, no stop.
    /// Trial 2: A scores -0.1998 + 0.05*0.0316 < 0.05, B/C tie -> B; B = -0.1.
    /// Trial 3: C; C = 0.6, max mu = 0.6/1.001, 0.6 >= 0.9*0.5994 -> stop.
    #[test]
    fn hand_simulated_plain_bo_trace() {
        let grid = grid_with(&[(0.0, 0.0), (0.45, 0.0), (0.9, 0.0)]);
        let cell = |x: f64| Some(grid.spec().flat_index(&[x]).unwrap());
        let cfg = AdaptConfig { kernel: KernelParams::new(0.001), ..AdaptConfig::unit_cube() };
        let mut eval = |g: &Genome| match g.params()[0] {
            x if x < 0.2 => -0.2,
            x if x < 0.6 => -0.1,
            _ => 0.6,
        };
        let out = adapt(&grid, |_, _| 0.0, &mut eval, &cfg, &mut seeded(0)).unwrap();
        let cells: Vec<Option<u64>> = out.log.entries.iter().map(|e| e.cell).collect();
        assert_eq!(cells, vec![cell(0.0), cell(0.45), cell(0.9)]);
        for e in &out.log.entries {
            assert_eq!(e.acquisition, 0.05);
            assert_eq!((e.predicted_mu, e.predicted_var), (0.0, 1.0));
        }
        let max_mu: Vec<f64> = out.log.entries.iter().map(|e| e.max_predicted_mu).collect();
        assert_eq!(max_mu[..2], [0.0, 0.0]);
        assert!((max_mu[2] - 0.6 / 1.001).abs() < 1e-12);
        let best: Vec<f64> = out.log.entries.iter().map(|e| e.cumulative_best).collect();
        assert_eq!(best, vec![-0.2, -0.1, 0.6]);
        assert_eq!(out.stop_reason, StopReason::Alpha);
        assert_eq!(out.best_measured, 0.6);
    }

    #[test]
    fn max_trials_fallback() {
        let pts: Vec<(f64, f64)> = (0..40).map(|i| (i as f64 / 40.0, 1.0)).collect();
        let grid = grid_with(&pts);
        let cfg = AdaptConfig { kernel: KernelParams::new(0.001), ..AdaptConfig::unit_cube() };
        let mut eval = |_: &Genome| 0.0;
        let out = adapt(&grid, |_, e| e.performance, &mut eval, &cfg, &mut seeded(0)).unwrap();
        assert_eq!(out.trials(), 20);
        assert_eq!(out.stop_reason, StopReason::MaxTrials);
    }

    #[test]
    fn evaluator_failure_aborts_or_records_sentinel() {
        struct Failing;
        impl TrialEvaluator for Failing {
            fn evaluate(&mut self, _: &Genome) -> std::result::Result<Measurement, String> {
                Err("servo timeout".into())
            }
        }
        let grid = grid_with(&[(0.1, 1.0), (0.9, 0.5)]);
        let cfg = AdaptConfig { max_trials: 3, ..AdaptConfig::unit_cube() };
        let err = adapt(&grid, |_, e| e.performance, &mut Failing, &cfg, &mut seeded(0)).unwrap_err();
        assert!(err.to_string().contains("servo timeout"));
        let cfg = AdaptConfig { failure_sentinel: Some(-1.0), ..cfg };
        let out = adapt(&grid, |_, e| e.performance, &mut Failing, &cfg, &mut seeded(0)).unwrap();
        assert!(out.log.entries.iter().all(|e| e.measured == -1.0));
        assert_eq!(out.trials(), 3);
    }

    #[test]
    fn random_initial_trials_do_not_repeat() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64 / 10.0, 0.5)).collect();
        let grid = grid_with(&pts);
        let cfg = AdaptConfig { random_initial: 10, max_trials: 10, alpha_stop: false, ..AdaptConfig::unit_cube() };
        let mut eval = |_: &Genome| 0.0;
        let out = adapt(&grid, |_, _| 0.5, &mut eval, &cfg, &mut seeded(4)).unwrap();
        let mut cells: Vec<Option<u64>> = out.log.entries.iter().map(|e| e.cell).collect();
        assert!(out.log.entries.iter().all(|e| e.selection == SelectionKind::Random));
        cells.sort();
        cells.dedup();
        assert_eq!(cells.len(), 10);
    }

    #[test]
    fn floor_clamps_measurements() {
        let grid = grid_with(&[(0.5, 1.0)]);
        let cfg = AdaptConfig { performance_floor: Some(0.0), max_trials: 1, ..AdaptConfig::unit_cube() };
        let mut eval = |_: &Genome| -3.0;
        let out = adapt(&grid, |_, e| e.performance, &mut eval, &cfg, &mut seeded(0)).unwrap();
        assert_eq!(out.log.entries[0].measured, 0.0);
        assert_eq!(out.log.entries[0].truth, -3.0);
    }
}
