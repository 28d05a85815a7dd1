//! MAP-Elites illumination.
//!
//! The loop starts with `init_random_count` uniformly random controllers, then
//! repeatedly picks a random occupied cell, mutates its controller, evaluates
//! the child and offers it to the archive. Every iteration costs exactly one
//! evaluation, including evaluations flagged invalid.

mod mutation;

pub use mutation::{level_value, mutate_discrete, mutate_polynomial, polynomial_delta, Mutation};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::archive::{ArchiveGrid, Elite, Genome, GridSpec};
use crate::error::{Error, Result};
use crate::rng;

/// Result of simulating one controller.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub descriptor: Vec<f64>,
    pub performance: f64,
    /// `false` means the controller must not enter the archive.
    pub valid: bool,
}

/// Deterministic simulator used during map creation.
pub trait Evaluator: Sync {
    fn name(&self) -> &str;
    fn genome_len(&self) -> usize;
    fn evaluate(&self, genome: &Genome) -> Evaluation;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapElitesConfig {
    pub total_iterations: u64,
    pub init_random_count: u64,
    pub mutation: Mutation,
    pub seed: u64,
    /// 1 runs the bit-reproducible serial loop; more evaluates batches on the
    /// rayon pool with one RNG stream per worker.
    pub workers: usize,
}

impl MapElitesConfig {
    pub fn new(total_iterations: u64, mutation: Mutation, seed: u64) -> Self {
        Self { total_iterations, init_random_count: 400, mutation, seed, workers: 1 }
    }

    fn validate(&self) -> Result<()> {
        if self.total_iterations == 0 {
            return Err(Error::Config("empty run: total_iterations must be at least 1".into()));
        }
        if self.init_random_count == 0 {
            return Err(Error::Config("init_random_count must be at least 1".into()));
        }
        if self.init_random_count > self.total_iterations {
            return Err(Error::Config(format!(
                "init_random_count ({}) exceeds total_iterations ({})",
                self.init_random_count, self.total_iterations
            )));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Checkpoint {
    pub iterations: u64,
    pub filled: usize,
    pub mean_perf: Option<f64>,
    pub max_perf: Option<f64>,
}

impl Checkpoint {
    fn of(grid: &ArchiveGrid, iterations: u64) -> Self {
        let s = grid.stats();
        Self { iterations, filled: s.filled, mean_perf: s.mean_performance, max_perf: s.max_performance }
    }
}

#[derive(Debug, Clone)]
pub struct MapElitesRun {
    pub archive: ArchiveGrid,
    pub evaluations: u64,
}

pub fn run_map_elites<E: Evaluator + ?Sized>(config: &MapElitesConfig, spec: GridSpec, evaluator: &E) -> Result<MapElitesRun> {
    run_map_elites_with(config, spec, evaluator, 0, |_| {})
}

/// Like [`run_map_elites`], calling `on_checkpoint` every `checkpoint_every`
/// evaluations (0 disables) and once at the end.
pub fn run_map_elites_with<E, F>(
    config: &MapElitesConfig,
    spec: GridSpec,
    evaluator: &E,
    checkpoint_every: u64,
    mut on_checkpoint: F,
) -> Result<MapElitesRun>
where
    E: Evaluator + ?Sized,
    F: FnMut(&Checkpoint),
{
    config.validate()?;
    let mut grid = ArchiveGrid::new(spec);
    let n = evaluator.genome_len();
    let mut done = 0u64;
    let mut next_checkpoint = if checkpoint_every == 0 { u64::MAX } else { checkpoint_every };

    if config.workers == 1 {
        let mut rng = rng::stream(config.seed, 0);
        while done < config.total_iterations {
            let child = if done < config.init_random_count {
                config.mutation.random_genome(n, &mut rng)
            } else {
                let parent = grid.random_elite(&mut rng)?;
                config.mutation.apply(&parent.genome, &mut rng)
            };
            offer(&mut grid, evaluator, child)?;
            done += 1;
            if done == config.init_random_count && grid.is_empty() {
                return Err(no_valid(evaluator, done));
            }
            if done == next_checkpoint {
                on_checkpoint(&Checkpoint::of(&grid, done));
                next_checkpoint = next_checkpoint.saturating_add(checkpoint_every);
            }
        }
    } else {
        let mut streams: Vec<_> = (0..config.workers).map(|w| rng::stream(config.seed, 1 + w as u64)).collect();
        let per_worker = 64u64;
        while done < config.total_iterations {
            // Batches never straddle the end of the random phase or a checkpoint.
            let mut limit = config.total_iterations.min(next_checkpoint);
            if done < config.init_random_count {
                limit = limit.min(config.init_random_count);
            }
            let batch = (limit - done).min(per_worker * config.workers as u64) as usize;
            let random_phase = done < config.init_random_count;
            let mut children = Vec::with_capacity(batch);
            for i in 0..batch {
                let rng = &mut streams[i % config.workers];
                children.push(if random_phase {
                    config.mutation.random_genome(n, rng)
                } else {
                    let parent = grid.random_elite(rng)?;
                    config.mutation.apply(&parent.genome, rng)
                });
            }
            let evaluated: Vec<_> = children
                .into_par_iter()
                .map(|g| {
                    let e = evaluator.evaluate(&g);
                    (g, e)
                })
                .collect();
            for (genome, e) in evaluated {
                if e.valid {
                    grid.try_insert(Elite { genome, descriptor: e.descriptor, performance: e.performance })?;
                }
            }
            done += batch as u64;
            if done == config.init_random_count && grid.is_empty() {
                return Err(no_valid(evaluator, done));
            }
            if done == next_checkpoint {
                on_checkpoint(&Checkpoint::of(&grid, done));
                next_checkpoint = next_checkpoint.saturating_add(checkpoint_every);
            }
        }
    }
    if grid.is_empty() {
        return Err(no_valid(evaluator, done));
    }
    if checkpoint_every == 0 || !done.is_multiple_of(checkpoint_every) {
        on_checkpoint(&Checkpoint::of(&grid, done));
    }
    Ok(MapElitesRun { archive: grid, evaluations: done })
}

fn offer<E: Evaluator + ?Sized>(grid: &mut ArchiveGrid, evaluator: &E, genome: Genome) -> Result<()> {
    let e = evaluator.evaluate(&genome);
    if e.valid {
        grid.try_insert(Elite { genome, descriptor: e.descriptor, performance: e.performance })?;
    }
    Ok(())
}

fn no_valid<E: Evaluator + ?Sized>(evaluator: &E, evaluations: u64) -> Error {
    Error::NoValidEvaluations { evaluator: evaluator.name().to_string(), evaluations }
}

/// Baseline with the same budget: every controller is drawn uniformly at
/// random and offered to the archive; nothing is selected from it.
pub fn random_sampling<E: Evaluator + ?Sized>(
    evaluations: u64,
    mutation: Mutation,
    seed: u64,
    spec: GridSpec,
    evaluator: &E,
) -> Result<MapElitesRun> {
    let mut grid = ArchiveGrid::new(spec);
    let mut rng = rng::stream(seed, 0);
    for _ in 0..evaluations {
        let g = mutation.random_genome(evaluator.genome_len(), &mut rng);
        offer(&mut grid, evaluator, g)?;
    }
    Ok(MapElitesRun { archive: grid, evaluations })
}

/// A toy evaluator over the unit cube: the descriptor is the first `dims`
/// genome components and the performance rewards keeping the remaining
/// components near 0.5. Useful for exercising the loop without a simulator.
#[derive(Debug, Clone)]
pub struct SyntheticEvaluator {
    pub dims: usize,
    pub genome_len: usize,
}

impl Evaluator for SyntheticEvaluator {
    fn name(&self) -> &str {
        "synthetic"
    }

    fn genome_len(&self) -> usize {
        self.genome_len
    }

    fn evaluate(&self, genome: &Genome) -> Evaluation {
        let p = genome.params();
        let rest = &p[self.dims.min(p.len())..];
        let performance = 1.0 - rest.iter().map(|v| (v - 0.5) * (v - 0.5)).sum::<f64>();
        Evaluation { descriptor: p[..self.dims].to_vec(), performance, valid: true }
    }
}

/// Uniform draw helper shared with the bench.
pub(crate) fn uniform_genome<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Genome {
    Genome::new((0..len).map(|_| rng.random::<f64>()).collect()).expect("unit interval")
}
