//! Knockout variants: the full method next to versions with the prior, the
//! map or the Bayesian optimizer removed, all run on the same evaluator
//! with the same trial budget.
//!
//! | variant               | map | prior | search            |
//! |-----------------------|-----|-------|-------------------|
//! | `ite`                 | yes | yes   | Bayesian opt.     |
//! | `map_random`          | yes | no    | random search     |
//! | `map_bo_noprior`      | yes | no    | Bayesian opt.     |
//! | `map_policy_gradient` | yes | no    | policy gradient   |
//! | `raw_bo`              | no  | no    | Bayesian opt.     |
//! | `raw_policy_gradient` | no  | no    | policy gradient   |
//!
//! Every variant consumes exactly `budget` evaluations and the stopping
//! rules are disabled, so logs can be compared at any trial cut.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::adapt::{adapt, AdaptConfig, Measurement, SelectionKind, TrialEntry, TrialEvaluator, TrialLog};
use crate::archive::{ArchiveGrid, Elite, Genome};
use crate::arm::{target_prior, ArmTrial};
use crate::error::{Error, Result};
use crate::gp::{GpState, KernelParams, Observation};
use crate::map_elites::uniform_genome;
use crate::rng;
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantKind {
    Ite,
    MapRandom,
    MapBoNoprior,
    MapPolicyGradient,
    RawBo,
    RawPolicyGradient,
}

impl VariantKind {
    pub const ALL: [VariantKind; 6] =
        [Self::Ite, Self::MapRandom, Self::MapBoNoprior, Self::MapPolicyGradient, Self::RawBo, Self::RawPolicyGradient];

    pub fn name(self) -> &'static str {
        match self {
            Self::Ite => "ite",
            Self::MapRandom => "map_random",
            Self::MapBoNoprior => "map_bo_noprior",
            Self::MapPolicyGradient => "map_policy_gradient",
            Self::RawBo => "raw_bo",
            Self::RawPolicyGradient => "raw_policy_gradient",
        }
    }

    pub fn uses_map(self) -> bool {
        !matches!(self, Self::RawBo | Self::RawPolicyGradient)
    }

    fn index(self) -> u64 {
        Self::ALL.iter().position(|k| *k == self).expect("listed") as u64
    }
}

impl std::str::FromStr for VariantKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| Error::Config(format!("unknown variant `{s}`")))
    }
}

impl std::fmt::Display for VariantKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Multiplicative Gaussian measurement noise, applied to the measured value
/// only; the noise-free value is kept as the trial's truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseModel {
    pub enabled: bool,
    pub mean: f64,
    pub std: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self { enabled: true, mean: 0.95, std: 0.1 }
    }
}

impl NoiseModel {
    pub fn off() -> Self {
        Self { enabled: false, ..Self::default() }
    }
}

pub struct Noisy<E, R> {
    pub inner: E,
    pub model: NoiseModel,
    pub rng: R,
}

impl<E: TrialEvaluator, R: Rng> TrialEvaluator for Noisy<E, R> {
    fn evaluate(&mut self, genome: &Genome) -> std::result::Result<Measurement, String> {
        let m = self.inner.evaluate(genome)?;
        if !self.model.enabled {
            return Ok(m);
        }
        let factor = Normal::new(self.model.mean, self.model.std).map_err(|e| e.to_string())?.sample(&mut self.rng);
        Ok(Measurement { measured: m.truth * factor, truth: m.truth })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolicyGradientConfig {
    /// Perturbed trials per gradient estimate.
    pub perturbations: usize,
    /// Perturbation size per dimension.
    pub epsilon: f64,
    /// Length of each update step.
    pub step: f64,
}

impl Default for PolicyGradientConfig {
    fn default() -> Self {
        Self { perturbations: 15, epsilon: 0.05, step: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchConfig {
    pub budget: usize,
    /// GP settings shared by the Bayesian variants.
    pub adapt: AdaptConfig,
    /// Random trials before the model takes over (no-prior and raw BO).
    pub random_initial: usize,
    /// Raw-space length scale in genome units.
    pub raw_rho: f64,
    /// Uniform candidates scored per raw-space acquisition.
    pub raw_candidates: usize,
    pub policy_gradient: PolicyGradientConfig,
}

impl BenchConfig {
    pub fn arm(budget: usize) -> Self {
        Self {
            budget,
            adapt: AdaptConfig::arm(),
            random_initial: 5,
            raw_rho: 0.4,
            raw_candidates: 2000,
            policy_gradient: PolicyGradientConfig::default(),
        }
    }

    fn validate(&self, kind: VariantKind) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::Config("budget must be at least 1".into()));
        }
        let pg = self.policy_gradient.perturbations;
        if matches!(kind, VariantKind::MapPolicyGradient | VariantKind::RawPolicyGradient) && self.budget < pg {
            return Err(Error::Config(format!(
                "{kind} needs a budget of at least {pg} trials (one gradient estimate), got {}",
                self.budget
            )));
        }
        if matches!(kind, VariantKind::RawBo) && self.raw_candidates == 0 {
            return Err(Error::Config("raw_candidates must be at least 1".into()));
        }
        Ok(())
    }
}

fn model_free_entry(trial: usize, cell: Option<u64>, descriptor: Vec<f64>, kind: SelectionKind, m: Measurement, best: f64) -> TrialEntry {
    TrialEntry {
        trial,
        cell,
        descriptor,
        selection: kind,
        predicted_mu: f64::NAN,
        predicted_var: f64::NAN,
        acquisition: f64::NAN,
        measured: m.measured,
        truth: m.truth,
        cumulative_best: best,
        max_predicted_mu: f64::NAN,
        k_condition: f64::NAN,
    }
}

fn measure<E: TrialEvaluator + ?Sized>(evaluator: &mut E, genome: &Genome) -> Result<Measurement> {
    evaluator.evaluate(genome).map_err(Error::Evaluation)
}

/// Runs one variant. `grid` and `prior` are required by the map-based kinds;
/// `genome_len` by the raw-space kinds.
pub fn run_variant<E, R, F>(
    kind: VariantKind,
    grid: Option<&ArchiveGrid>,
    prior: F,
    genome_len: usize,
    evaluator: &mut E,
    config: &BenchConfig,
    rng: &mut R,
) -> Result<TrialLog>
where
    E: TrialEvaluator + ?Sized,
    R: Rng + ?Sized,
    F: Fn(u64, &Elite) -> f64,
{
    config.validate(kind)?;
    let map = || match grid {
        Some(g) if !g.is_empty() => Ok(g),
        _ => Err(Error::EmptyArchive),
    };
    let no_stop = AdaptConfig { alpha_stop: false, target_radius: None, max_trials: config.budget, ..config.adapt.clone() };
    match kind {
        VariantKind::Ite => Ok(adapt(map()?, prior, evaluator, &no_stop, rng)?.log),
        VariantKind::MapBoNoprior => {
            let grid = map()?;
            let values: Vec<f64> = grid.iter().map(|(k, e)| prior(k, e)).collect();
            let mean = stats::mean(&values).expect("non-empty");
            let var = stats::variance(&values).expect("non-empty");
            let signal_var = if var > 0.0 { var } else { 1.0 };
            let cfg =
                AdaptConfig { random_initial: config.random_initial, kernel: KernelParams { signal_var, ..no_stop.kernel }, ..no_stop };
            Ok(adapt(grid, |_, _| mean, evaluator, &cfg, rng)?.log)
        }
        VariantKind::MapRandom => map_random(map()?, evaluator, config.budget, rng),
        VariantKind::MapPolicyGradient => map_policy_gradient(map()?, evaluator, config, rng),
        VariantKind::RawBo => raw_bo(genome_len, evaluator, config, rng),
        VariantKind::RawPolicyGradient => raw_policy_gradient(genome_len, evaluator, config, rng),
    }
}

fn map_random<E, R>(grid: &ArchiveGrid, evaluator: &mut E, budget: usize, rng: &mut R) -> Result<TrialLog>
where
    E: TrialEvaluator + ?Sized,
    R: Rng + ?Sized,
{
    let cells: Vec<(u64, &Elite)> = grid.sorted();
    let mut untested: Vec<usize> = (0..cells.len()).collect();
    let mut log = TrialLog::default();
    let mut best = f64::NEG_INFINITY;
    for trial in 1..=budget {
        let i =
            if untested.is_empty() { rng.random_range(0..cells.len()) } else { untested.swap_remove(rng.random_range(0..untested.len())) };
        let (cell, elite) = cells[i];
        let m = measure(evaluator, &elite.genome)?;
        best = best.max(m.measured);
        log.entries.push(model_free_entry(trial, Some(cell), elite.descriptor.clone(), SelectionKind::Random, m, best));
    }
    Ok(log)
}

/// Kohl-style finite-difference policy gradient in the unit cube.
///
/// Each iteration draws `perturbations` points `theta + epsilon * s` with
/// `s` uniform in {-1, 0, +1}^n. Per dimension, the mean scores of the +,
/// 0 and - groups give the adjustment `avg+ - avg-`, or zero when the
/// unperturbed group beats both. The adjustment vector is normalized to
/// length `step` and added to `theta`. A final partial iteration is
/// evaluated without an update.
struct PolicyGradient {
    theta: Vec<f64>,
    config: PolicyGradientConfig,
}

impl PolicyGradient {
    fn perturb<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vec<i8>, Vec<f64>) {
        let signs: Vec<i8> = (0..self.theta.len()).map(|_| rng.random_range(-1i8..=1)).collect();
        let point = self.theta.iter().zip(&signs).map(|(t, &s)| (t + self.config.epsilon * s as f64).clamp(0.0, 1.0)).collect();
        (signs, point)
    }

    fn update(&mut self, batch: &[(Vec<i8>, f64)]) {
        let n = self.theta.len();
        let mut adj = vec![0.0; n];
        for (d, a) in adj.iter_mut().enumerate() {
            let group = |s: i8| {
                let v: Vec<f64> = batch.iter().filter(|(sg, _)| sg[d] == s).map(|(_, f)| *f).collect();
                stats::mean(&v)
            };
            let (plus, zero, minus) = (group(1), group(0), group(-1));
            if let (Some(p), Some(m)) = (plus, minus) {
                let zero_wins = zero.is_some_and(|z| z > p && z > m);
                *a = if zero_wins { 0.0 } else { p - m };
            }
        }
        let norm = adj.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 0.0 {
            for (t, a) in self.theta.iter_mut().zip(&adj) {
                *t = (*t + self.config.step * a / norm).clamp(0.0, 1.0);
            }
        }
    }

    /// Runs `budget` trials; `trial_fn` maps a point to (cell, descriptor, measurement).
    fn run<R, T>(mut self, budget: usize, rng: &mut R, mut trial_fn: T) -> Result<TrialLog>
    where
        R: Rng + ?Sized,
        T: FnMut(&[f64]) -> Result<(Option<u64>, Vec<f64>, Measurement)>,
    {
        let mut log = TrialLog::default();
        let mut best = f64::NEG_INFINITY;
        let mut batch = Vec::with_capacity(self.config.perturbations);
        for trial in 1..=budget {
            let (signs, point) = self.perturb(rng);
            let (cell, descriptor, m) = trial_fn(&point)?;
            best = best.max(m.measured);
            log.entries.push(model_free_entry(trial, cell, descriptor, SelectionKind::Perturbation, m, best));
            batch.push((signs, m.measured));
            if batch.len() == self.config.perturbations {
                self.update(&batch);
                batch.clear();
            }
        }
        Ok(log)
    }
}

fn raw_policy_gradient<E, R>(genome_len: usize, evaluator: &mut E, config: &BenchConfig, rng: &mut R) -> Result<TrialLog>
where
    E: TrialEvaluator + ?Sized,
    R: Rng + ?Sized,
{
    let theta = uniform_genome(genome_len, rng).into_inner();
    let pg = PolicyGradient { theta, config: config.policy_gradient };
    pg.run(config.budget, rng, |p| {
        let g = Genome::new(p.to_vec())?;
        let m = measure(evaluator, &g)?;
        Ok((None, p.to_vec(), m))
    })
}

/// Policy gradient over normalized behavior coordinates: each point is
/// tested through the elite whose stored descriptor is nearest to it.
fn map_policy_gradient<E, R>(grid: &ArchiveGrid, evaluator: &mut E, config: &BenchConfig, rng: &mut R) -> Result<TrialLog>
where
    E: TrialEvaluator + ?Sized,
    R: Rng + ?Sized,
{
    let spec = grid.spec();
    let normalize = |d: &[f64]| -> Vec<f64> {
        d.iter().enumerate().map(|(i, v)| ((v - spec.lower()[i]) / (spec.upper()[i] - spec.lower()[i])).clamp(0.0, 1.0)).collect()
    };
    let cells: Vec<(u64, &Elite, Vec<f64>)> = grid.sorted().into_iter().map(|(k, e)| (k, e, normalize(&e.descriptor))).collect();
    let start = &cells[rng.random_range(0..cells.len())];
    let pg = PolicyGradient { theta: start.2.clone(), config: config.policy_gradient };
    pg.run(config.budget, rng, |p| {
        let mut nearest = &cells[0];
        let mut best_d = f64::INFINITY;
        for c in &cells {
            let d: f64 = c.2.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum();
            if d < best_d {
                best_d = d;
                nearest = c;
            }
        }
        let m = measure(evaluator, &nearest.1.genome)?;
        Ok((Some(nearest.0), nearest.1.descriptor.clone(), m))
    })
}

/// Bayesian optimization directly on the genome with a zero prior mean.
/// Each acquisition scores `raw_candidates` fresh uniform genomes.
fn raw_bo<E, R>(genome_len: usize, evaluator: &mut E, config: &BenchConfig, rng: &mut R) -> Result<TrialLog>
where
    E: TrialEvaluator + ?Sized,
    R: Rng + ?Sized,
{
    let kernel = KernelParams::new(config.raw_rho);
    let noise_var = config.adapt.noise_var;
    let kappa = config.adapt.kappa;
    let mut gp = GpState::empty(kernel, noise_var)?;
    let mut obs: Vec<Observation> = Vec::new();
    let mut log = TrialLog::default();
    let mut best = f64::NEG_INFINITY;
    for trial in 1..=config.budget {
        let (genome, kind) = if trial <= config.random_initial {
            (uniform_genome(genome_len, rng), SelectionKind::Random)
        } else {
            let mut chosen: Option<(f64, Genome)> = None;
            for _ in 0..config.raw_candidates {
                let g = uniform_genome(genome_len, rng);
                let p = gp.posterior(g.params(), 0.0);
                let a = p.mu + kappa * p.sigma();
                if chosen.as_ref().is_none_or(|(b, _)| a > *b) {
                    chosen = Some((a, g));
                }
            }
            (chosen.expect("at least one candidate").1, SelectionKind::Ucb)
        };
        let before = gp.posterior(genome.params(), 0.0);
        let m = measure(evaluator, &genome)?;
        obs.push(Observation { chi: genome.params().to_vec(), measured: m.measured, prior_at_chi: 0.0 });
        gp = GpState::fit(kernel, noise_var, obs.clone())?;
        best = best.max(m.measured);
        log.entries.push(TrialEntry {
            trial,
            cell: None,
            descriptor: genome.params().to_vec(),
            selection: kind,
            predicted_mu: before.mu,
            predicted_var: before.var,
            acquisition: before.mu + kappa * before.sigma(),
            measured: m.measured,
            truth: m.truth,
            cumulative_best: best,
            max_predicted_mu: f64::NAN,
            k_condition: gp.condition_estimate(),
        });
    }
    Ok(log)
}

/// One damaged-arm benchmark case.
#[derive(Debug, Clone)]
pub struct ArmCase<'a> {
    pub map_id: usize,
    pub grid: &'a ArchiveGrid,
    pub damage: String,
    pub trial: ArmTrial,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub variant: VariantKind,
    pub map_id: usize,
    pub damage: String,
    pub seed: u64,
    pub log: TrialLog,
}

/// Runs every `(case, kind)` pair in parallel. Each run draws from its own
/// streams of the case seed, so results do not depend on scheduling. Raw-space
/// variants score self-colliding poses as -1 without testing them.
pub fn run_arm_cases(cases: &[ArmCase<'_>], kinds: &[VariantKind], config: &BenchConfig, noise: NoiseModel) -> Result<Vec<RunRecord>> {
    let jobs: Vec<(&ArmCase<'_>, VariantKind)> = cases.iter().flat_map(|c| kinds.iter().map(move |k| (c, *k))).collect();
    jobs.par_iter()
        .map(|(case, kind)| {
            let mut trial = case.trial.clone();
            trial.prescreen_collisions = !kind.uses_map();
            let mut eval = Noisy { inner: trial, model: noise, rng: rng::stream(case.seed, 200 + kind.index()) };
            let mut r = rng::stream(case.seed, 100 + kind.index());
            let log = run_variant(*kind, Some(case.grid), target_prior(case.trial.target), crate::arm::JOINTS, &mut eval, config, &mut r)?;
            Ok(RunRecord { variant: *kind, map_id: case.map_id, damage: case.damage.clone(), seed: case.seed, log })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub variant: VariantKind,
    pub cut: usize,
    pub runs: usize,
    pub median: f64,
    pub p25: f64,
    pub p75: f64,
}

/// Per-variant quartiles of the noise-free performance of the best-measured
/// trial within the first `cut` trials. Cuts beyond a log's length are skipped.
pub fn summarize(records: &[RunRecord], cuts: &[usize]) -> Vec<SummaryRow> {
    let mut rows = Vec::new();
    for kind in VariantKind::ALL {
        for &cut in cuts {
            let values: Vec<f64> =
                records.iter().filter(|r| r.variant == kind && r.log.len() >= cut).filter_map(|r| r.log.best_truth_at(cut)).collect();
            if values.is_empty() {
                continue;
            }
            rows.push(SummaryRow {
                variant: kind,
                cut,
                runs: values.len(),
                median: stats::percentile(&values, 0.5).expect("non-empty"),
                p25: stats::percentile(&values, 0.25).expect("non-empty"),
                p75: stats::percentile(&values, 0.75).expect("non-empty"),
            });
        }
    }
    rows
}

/// Report cuts: 17 and 150 trials, where the budget allows.
pub fn default_cuts(budget: usize) -> Vec<usize> {
    [17, 150].into_iter().filter(|&c| c <= budget).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::archive::GridSpec;
    use crate::rng::seeded;

    fn toy_grid() -> ArchiveGrid {
        let mut g = ArchiveGrid::new(GridSpec::unit(2, 10).unwrap());
        for i in 0..10 {
            for j in 0..10 {
                let d = vec![(i as f64 + 0.5) / 10.0, (j as f64 + 0.5) / 10.0];
                g.try_insert(Elite { genome: Genome::new(d.clone()).unwrap(), descriptor: d, performance: 0.0 }).unwrap();
            }
        }
        g
    }

    /// Peak at (0.75, 0.25); the map prior is exact.
    fn score(p: &[f64]) -> f64 {
        1.0 - ((p[0] - 0.75).powi(2) + (p[1] - 0.25).powi(2)).sqrt()
    }

    fn cfg(budget: usize) -> BenchConfig {
        BenchConfig { adapt: AdaptConfig::unit_cube(), raw_candidates: 200, ..BenchConfig::arm(budget) }
    }

    struct Counting(usize);
    impl TrialEvaluator for Counting {
        fn evaluate(&mut self, g: &Genome) -> std::result::Result<Measurement, String> {
            self.0 += 1;
            Ok(Measurement::exact(score(g.params())))
        }
    }

    #[test]
    fn every_variant_consumes_the_budget() {
        let grid = toy_grid();
        for budget in [15, 17, 31] {
            for kind in VariantKind::ALL {
                let mut eval = Counting(0);
                let log = run_variant(kind, Some(&grid), |_, e| score(&e.descriptor), 2, &mut eval, &cfg(budget), &mut seeded(1)).unwrap();
                assert_eq!(log.len(), budget, "{kind}");
                assert_eq!(eval.0, budget, "{kind}");
                assert!(log.entries.windows(2).all(|w| w[1].cumulative_best >= w[0].cumulative_best));
            }
        }
    }

    #[test]
    fn configuration_errors() {
        let grid = toy_grid();
        let mut eval = Counting(0);
        for kind in [VariantKind::MapPolicyGradient, VariantKind::RawPolicyGradient] {
            let err = run_variant(kind, Some(&grid), |_, _| 0.0, 2, &mut eval, &cfg(14), &mut seeded(0)).unwrap_err();
            assert!(matches!(err, Error::Config(_)));
        }
        let err = run_variant(VariantKind::Ite, None, |_, _| 0.0, 2, &mut eval, &cfg(5), &mut seeded(0)).unwrap_err();
        assert!(matches!(err, Error::EmptyArchive));
    }

    #[test]
    fn map_random_single_trial() {
        let grid = toy_grid();
        let mut seen = std::collections::HashSet::new();
        for s in 0..200 {
            let log = run_variant(VariantKind::MapRandom, Some(&grid), |_, _| 0.0, 2, &mut Counting(0), &cfg(1), &mut seeded(s)).unwrap();
            assert_eq!(log.len(), 1);
            seen.insert(log.entries[0].cell.unwrap());
        }
        assert!(seen.len() > 50);
    }

    #[test]
    fn ite_first_trial_beats_noprior_median() {
        let grid = toy_grid();
        let first = |kind: VariantKind, seed: u64| {
            let log = run_variant(kind, Some(&grid), |_, e| score(&e.descriptor), 2, &mut Counting(0), &cfg(5), &mut seeded(seed)).unwrap();
            log.entries[0].truth
        };
        let noprior: Vec<f64> = (0..50).map(|s| first(VariantKind::MapBoNoprior, s)).collect();
        let ite_min = (0..50).map(|s| first(VariantKind::Ite, s)).fold(f64::INFINITY, f64::min);
        assert!(ite_min >= stats::median(&noprior).unwrap());
    }

    #[test]
    fn noise_scales_measurement_only() {
        let mut eval = Noisy { inner: |_: &Genome| -0.5, model: NoiseModel::default(), rng: seeded(3) };
        let g = Genome::new(vec![0.5]).unwrap();
        let ms: Vec<Measurement> = (0..20_000).map(|_| eval.evaluate(&g).unwrap()).collect();
        assert!(ms.iter().all(|m| m.truth == -0.5));
        let factors: Vec<f64> = ms.iter().map(|m| m.measured / m.truth).collect();
        let mean = stats::mean(&factors).unwrap();
        let sd = stats::variance(&factors).unwrap().sqrt();
        assert!((mean - 0.95).abs() < 0.003, "{mean}");
        assert!((sd - 0.1).abs() < 0.003, "{sd}");
        let mut off = Noisy { inner: |_: &Genome| -0.5, model: NoiseModel::off(), rng: seeded(3) };
        assert_eq!(off.evaluate(&g).unwrap().measured, -0.5);
    }

    #[test]
    fn summary_quartiles() {
        let rec = |v: f64| RunRecord {
            variant: VariantKind::Ite,
            map_id: 0,
            damage: "none".into(),
            seed: 0,
            log: TrialLog { entries: vec![model_free_entry(1, None, vec![], SelectionKind::Random, Measurement::exact(v), v)] },
        };
        let rows = summarize(&[rec(3.0)], &[1]);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].median, 3.0);
        let rows = summarize(&[rec(1.0), rec(2.0), rec(3.0), rec(4.0)], &[1, 17]);
        assert_eq!(rows.len(), 1);
        assert_eq!((rows[0].median, rows[0].p25, rows[0].p75), (2.5, 1.75, 3.25));
        assert_eq!(default_cuts(17), vec![17]);
        assert_eq!(default_cuts(150), vec![17, 150]);
    }

    #[test]
    fn policy_gradient_climbs() {
        let mut eval = |g: &Genome| score(g.params());
        let c = BenchConfig { budget: 300, ..cfg(300) };
        let log = run_variant(VariantKind::RawPolicyGradient, None, |_, _| 0.0, 2, &mut eval, &c, &mut seeded(2)).unwrap();
        let early = log.entries[..15].iter().map(|e| e.truth).sum::<f64>() / 15.0;
        let late = log.entries[285..].iter().map(|e| e.truth).sum::<f64>() / 15.0;
        assert!(late > early, "{early} -> {late}");
    }
}
