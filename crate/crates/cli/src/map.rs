use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use iteqd::archive::{read_archive, write_archive, ArchiveMeta};
use iteqd::arm::ArmMapEvaluator;
use iteqd::map_elites::{run_map_elites_with, Evaluator, MapElitesConfig, Mutation, SyntheticEvaluator};
use iteqd::{ArchiveGrid, GridSpec};
use serde_json::json;

use crate::cli::{MapCreateArgs, MapExportArgs, MapFileArgs, MutationKind, Task};
use crate::error::{CliError, CliResult};
use crate::settings::{Settings, TOOL};

pub fn create(args: MapCreateArgs) -> CliResult {
    let mut s = Settings::load(args.config.config.as_deref())?;
    let task = s.get("task", args.task, Task::Arm)?;
    let default_iterations = if task == Task::Arm { 20_000_000 } else { 100_000 };
    let iterations = s.get("iterations", args.iterations, default_iterations)?;
    let init_random = s.get("init_random", args.init_random, 400)?;
    let mutation = match s.get("mutation", args.mutation, MutationKind::Polynomial)? {
        MutationKind::Polynomial => {
            Mutation::Polynomial { rate: s.get("mutation_rate", args.mutation_rate, 0.125)?, eta_m: s.get("eta_m", args.eta_m, 10.0)? }
        }
        MutationKind::Discrete => {
            Mutation::Discrete { rate: s.get("mutation_rate", args.mutation_rate, 0.05)?, levels: s.get("levels", args.levels, 21)? }
        }
    };
    let seed = s.get("seed", args.seed, 0)?;
    let workers = s.get("workers", args.workers, 1)?;
    let checkpoint_every = s.get("checkpoint_every", args.checkpoint_every, (iterations / 100).max(1))?;
    let (evaluator, spec): (Box<dyn Evaluator>, GridSpec) = match task {
        Task::Arm => (Box::new(ArmMapEvaluator::default()), GridSpec::arm()),
        Task::Synthetic => {
            let dims = s.get("synthetic_dims", args.synthetic_dims, 2)?;
            let genome_len = s.get("synthetic_genome_len", args.synthetic_genome_len, 6)?;
            let bins = s.get("bins", args.bins, 20)?;
            if dims == 0 || dims > genome_len {
                return Err(CliError::Usage(format!("synthetic_dims must be in 1..={genome_len}, got {dims}")));
            }
            (Box::new(SyntheticEvaluator { dims, genome_len }), GridSpec::unit(dims, bins)?)
        }
        Task::Trajectory => {
            return Err(CliError::Usage(
                "map create supports the arm and synthetic tasks; trajectory maps need an external simulator".into(),
            ))
        }
    };
    let out = s.required_path("out", args.out)?;
    let progress = s.path("progress", args.progress)?.unwrap_or_else(|| suffixed(&out, ".progress.jsonl"));
    let config = s.finish("map create")?;
    if workers == 0 {
        return Err(CliError::Usage("workers must be at least 1".into()));
    }

    let cfg = MapElitesConfig { init_random_count: init_random, workers, ..MapElitesConfig::new(iterations, mutation, seed) };
    let mut log = BufWriter::new(File::create(&progress)?);
    writeln!(log, "{}", config.meta_json("map create"))?;
    let start = Instant::now();
    let mut io_error = None;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| CliError::Runtime(e.to_string()))?;
    let run = pool.install(|| {
        run_map_elites_with(&cfg, spec, evaluator.as_ref(), checkpoint_every, |cp| {
            let line = json!({
                "iterations": cp.iterations,
                "filled": cp.filled,
                "mean_perf": cp.mean_perf,
                "max_perf": cp.max_perf,
                "wall_seconds": start.elapsed().as_secs_f64(),
            });
            if let Err(e) = writeln!(log, "{line}") {
                io_error.get_or_insert(e);
            }
        })
    })?;
    if let Some(e) = io_error {
        return Err(e.into());
    }
    log.flush()?;

    let meta = ArchiveMeta {
        tool: TOOL.into(),
        config_hash: config.hash.clone(),
        genome_len: evaluator.genome_len(),
        evaluations: run.evaluations,
        seed,
    };
    let mut w = BufWriter::new(File::create(&out)?);
    write_archive(&run.archive, &meta, &mut w)?;
    w.flush()?;
    let st = run.archive.stats();
    eprintln!(
        "{}: {} of {} cells filled after {} evaluations, mean performance {}",
        out.display(),
        st.filled,
        run.archive.spec().cell_count(),
        run.evaluations,
        fmt_opt(st.mean_performance)
    );
    Ok(())
}

fn suffixed(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| format!("{v}")).unwrap_or_else(|| "none".into())
}

pub fn load(path: &Path) -> CliResult<(ArchiveGrid, ArchiveMeta)> {
    let f = File::open(path).map_err(|e| CliError::Runtime(format!("cannot open archive {}: {e}", path.display())))?;
    read_archive(BufReader::new(f)).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

pub fn stats(args: MapFileArgs) -> CliResult {
    let (grid, meta) = load(&args.archive)?;
    let st = grid.stats();
    let cells = grid.spec().cell_count();
    println!("tool={}", meta.tool);
    println!("config_hash={}", meta.config_hash);
    println!("evaluations={}", meta.evaluations);
    println!("seed={}", meta.seed);
    println!("cells={cells}");
    println!("filled={}", st.filled);
    println!("coverage={}", st.filled as f64 / cells as f64);
    println!("mean_perf={}", fmt_opt(st.mean_performance));
    println!("max_perf={}", fmt_opt(st.max_performance));
    Ok(())
}

pub fn export(args: MapExportArgs) -> CliResult {
    let (grid, meta) = load(&args.archive)?;
    let out: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut out = BufWriter::new(out);
    writeln!(out, "# tool={TOOL} config_hash={} source_tool={}", meta.config_hash, meta.tool)?;
    let dims = grid.spec().dims();
    let mut cols = vec!["cell".to_string()];
    cols.extend((1..=dims).map(|i| format!("bin{i}")));
    cols.extend((1..=dims).map(|i| format!("d{i}")));
    cols.push("performance".into());
    cols.extend((1..=meta.genome_len).map(|i| format!("g{i}")));
    writeln!(out, "{}", cols.join(","))?;
    for (cell, e) in grid.sorted() {
        let mut row = vec![cell.to_string()];
        row.extend(grid.spec().unflatten(cell).iter().map(|b| b.to_string()));
        row.extend(e.descriptor.iter().map(|v| v.to_string()));
        row.push(e.performance.to_string());
        row.extend(e.genome.params().iter().map(|v| v.to_string()));
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(())
}
