use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::time::Instant;

use iteqd::adapt::{adapt, candidates, AdaptConfig, TrialEvaluator};
use iteqd::arm::{damage_suite, target_prior, ArmConfig, ArmTrial, DamageSpec, Target, JOINTS};
use iteqd::gp::KernelParams;
use iteqd::map_elites::{Evaluator, SyntheticEvaluator};
use iteqd::rng;
use iteqd::{ArchiveGrid, Elite};
use serde_json::json;

use crate::cli::{AdaptRunArgs, ModelArgs, Task};
use crate::error::{CliError, CliResult};
use crate::map;
use crate::settings::Settings;

/// Applies flag/file overrides on top of task defaults.
pub fn model_config(s: &mut Settings, m: &ModelArgs, base: AdaptConfig) -> CliResult<AdaptConfig> {
    Ok(AdaptConfig {
        kappa: s.get("kappa", m.kappa, base.kappa)?,
        alpha: s.get("alpha", m.alpha, base.alpha)?,
        alpha_stop: s.get("alpha_stop", m.alpha_stop, base.alpha_stop)?,
        noise_var: s.get("noise_var", m.noise_var, base.noise_var)?,
        kernel: KernelParams::new(s.get("rho", m.rho, base.kernel.rho)?),
        max_trials: s.get("max_trials", m.max_trials, base.max_trials)?,
        ..base
    })
}

pub fn check_arm_archive(grid: &ArchiveGrid, genome_len: usize) -> CliResult {
    if grid.spec().dims() != 2 || genome_len != JOINTS {
        return Err(CliError::Runtime(format!(
            "schema error: arm needs a 2-D archive of {JOINTS}-parameter genomes, found {}-D with {genome_len} parameters",
            grid.spec().dims()
        )));
    }
    Ok(())
}

struct SyntheticTrial(SyntheticEvaluator);

impl TrialEvaluator for SyntheticTrial {
    fn evaluate(&mut self, genome: &iteqd::Genome) -> Result<iteqd::adapt::Measurement, String> {
        Ok(iteqd::adapt::Measurement::exact(self.0.evaluate(genome).performance))
    }
}

type Prior = Box<dyn Fn(u64, &Elite) -> f64>;

pub fn run(args: AdaptRunArgs) -> CliResult {
    let mut s = Settings::load(args.config.config.as_deref())?;
    let archive = s.required_path("archive", args.archive)?;
    let task = s.get("task", args.task, Task::Arm)?;
    let seed = s.get("seed", args.seed, 0)?;
    let map_id = s.get("map_id", args.map_id, archive.file_stem().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default())?;
    let trigger_drop = s.get_opt("trigger_drop", args.trigger_drop)?;
    let floor = s.get_opt("floor", args.floor)?;
    let log_path = s.path("log", args.log)?;
    let summary_path = s.path("summary", args.summary)?;

    let (grid, meta) = map::load(&archive)?;
    s.record("archive_hash", &meta.config_hash);
    if grid.is_empty() {
        return Err(CliError::Runtime(format!("{}: archive is empty", archive.display())));
    }

    let (mut evaluator, prior, condition, base): (Box<dyn TrialEvaluator>, Prior, String, AdaptConfig) = match task {
        Task::Arm => {
            check_arm_archive(&grid, meta.genome_len)?;
            let damage_file = s.path("damage", args.damage)?;
            let damage_case = s.get_opt("damage_case", args.damage_case)?;
            let (condition, damage) = match (damage_file, damage_case) {
                (Some(_), Some(_)) => return Err(CliError::Usage("give either --damage or --damage-case".into())),
                (Some(p), None) => {
                    let f = File::open(&p).map_err(|e| CliError::Runtime(format!("cannot open damage file {}: {e}", p.display())))?;
                    let d = DamageSpec::from_csv(BufReader::new(f), ArmConfig::default().joint_limit)
                        .map_err(|e| CliError::Runtime(format!("{}: {e}", p.display())))?;
                    s.record("damage_spec", d.to_csv().replace('\n', ";"));
                    (p.file_stem().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(), d)
                }
                (None, Some(name)) => damage_suite()
                    .into_iter()
                    .find(|(n, _)| *n == name)
                    .ok_or_else(|| CliError::Usage(format!("unknown damage case `{name}`")))?,
                (None, None) => ("intact".to_string(), DamageSpec::none()),
            };
            let target = Target::new(s.get("bin_x", args.bin_x, 0.0)?, s.get("bin_y", args.bin_y, 0.5)?);
            let radius = s.get("target_radius", args.target_radius, 0.05)?;
            let base = AdaptConfig { target_radius: Some(radius), ..AdaptConfig::arm() };
            (Box::new(ArmTrial::new(damage, target)), Box::new(target_prior(target)), condition, base)
        }
        Task::Synthetic => {
            if args.damage.is_some() || args.damage_case.is_some() {
                return Err(CliError::Usage("damage settings apply to the arm task only".into()));
            }
            let eval = SyntheticEvaluator { dims: grid.spec().dims(), genome_len: meta.genome_len };
            let base = AdaptConfig { target_radius: s.get_opt("target_radius", args.target_radius)?, ..AdaptConfig::unit_cube() };
            (Box::new(SyntheticTrial(eval)), Box::new(|_, e: &Elite| e.performance), "intact".to_string(), base)
        }
        Task::Trajectory => return Err(CliError::Usage("adapt run supports the arm and synthetic tasks".into())),
    };
    let mut config = model_config(&mut s, &args.model, base)?;
    config.performance_floor = floor;
    let config_id = s.finish("adapt run")?;

    let mut log: Box<dyn Write> = match &log_path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    };
    writeln!(log, "{}", config_id.meta_json("adapt run"))?;

    let start = Instant::now();
    let row = if let Some(threshold) = trigger_drop {
        let cands = candidates(&grid, &prior);
        let best = cands.iter().fold(&cands[0], |a, c| if c.prior > a.prior { c } else { a });
        let elite = grid.get(best.cell).expect("candidate cell exists");
        let measured = evaluator.evaluate(&elite.genome).map_err(CliError::Runtime)?.measured;
        let drop = best.prior - measured;
        let triggered = drop > threshold;
        writeln!(
            log,
            "{}",
            json!({ "trigger": { "cell": best.cell, "predicted": best.prior, "measured": measured, "drop": drop, "threshold": threshold, "triggered": triggered } })
        )?;
        if triggered {
            None
        } else {
            Some((0usize, measured, measured, best.cell, "not_triggered".to_string()))
        }
    } else {
        None
    };

    let row = match row {
        Some(r) => r,
        None => {
            let outcome = adapt(&grid, &prior, evaluator.as_mut(), &config, &mut rng::stream(seed, 300))?;
            for e in &outcome.log.entries {
                writeln!(log, "{}", serde_json::to_string(e)?)?;
            }
            let reason = serde_json::to_value(outcome.stop_reason)?.as_str().unwrap_or_default().to_string();
            (outcome.trials(), outcome.best_measured, outcome.best_truth, outcome.best_cell, reason)
        }
    };
    log.flush()?;
    let seconds = start.elapsed().as_secs_f64();
    let (trials, best_measured, best_truth, best_cell, reason) = row;

    if let Some(p) = &summary_path {
        let mut w = BufWriter::new(File::create(p)?);
        writeln!(w, "{}", config_id.header_comment())?;
        writeln!(w, "condition,map_id,trials,seconds,best_perf,best_truth,best_cell,stop_reason")?;
        writeln!(w, "{condition},{map_id},{trials},{seconds:.3},{best_measured},{best_truth},{best_cell},{reason}")?;
        w.flush()?;
    }
    eprintln!("{condition} on {map_id}: {trials} trials, best {best_measured} (cell {best_cell}), stop: {reason}");
    Ok(())
}
