use std::fs::File;
use std::io::{BufWriter, Write};

use iteqd::arm::{damage_suite, ArmMapEvaluator, ArmTrial, Target};
use iteqd::bench::{default_cuts, run_arm_cases, summarize, ArmCase, BenchConfig, NoiseModel, VariantKind};
use iteqd::map_elites::{run_map_elites, MapElitesConfig, Mutation};
use iteqd::rng::split_seed;
use iteqd::{ArchiveGrid, GridSpec};
use rayon::prelude::*;
use serde_json::json;

use crate::adapt::check_arm_archive;
use crate::cli::BenchVariantsArgs;
use crate::error::{CliError, CliResult};
use crate::map;
use crate::settings::Settings;

fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|p| !p.is_empty()).map(String::from).collect()
}

pub fn variants(args: BenchVariantsArgs) -> CliResult {
    let mut s = Settings::load(args.config.config.as_deref())?;
    let seed = s.get("seed", args.seed, 0)?;
    let workers = s.get("workers", args.workers, 1)?;
    let budget = s.get("budget", args.budget, 150)?;
    let runs = s.get("runs", args.runs, 1)?;
    let noise = s.get("noise", args.noise, true)?;
    let target = Target::new(s.get("bin_x", args.bin_x, 0.0)?, s.get("bin_y", args.bin_y, 0.5)?);
    let all_kinds = VariantKind::ALL.map(|k| k.name()).join(",");
    let kinds: Vec<VariantKind> =
        split_list(&s.get("variants", args.variants, all_kinds)?).iter().map(|n| n.parse()).collect::<Result<_, _>>()?;
    let suite = damage_suite();
    let first_five = suite[..5].iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>().join(",");
    let damages = split_list(&s.get("damage_cases", args.damage_cases, first_five)?)
        .into_iter()
        .map(|name| suite.iter().find(|(n, _)| *n == name).cloned().ok_or_else(|| CliError::Usage(format!("unknown damage case `{name}`"))))
        .collect::<CliResult<Vec<_>>>()?;
    let (maps, iterations) = if args.archives.is_empty() {
        (s.get("maps", args.maps, 3)?, s.get("iterations", args.iterations, 200_000)?)
    } else {
        (args.archives.len(), 0)
    };
    let out = s.path("out", args.out)?;
    let raw = s.path("raw", args.raw)?;

    if workers == 0 || runs == 0 || maps == 0 || kinds.is_empty() || damages.is_empty() {
        return Err(CliError::Usage("workers, runs, maps, variants and damage cases must all be non-empty".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| CliError::Runtime(e.to_string()))?;

    let grids: Vec<ArchiveGrid> = if args.archives.is_empty() {
        pool.install(|| {
            (0..maps as u64)
                .into_par_iter()
                .map(|m| {
                    let cfg = MapElitesConfig::new(iterations, Mutation::ARM, split_seed(seed, 1000 + m));
                    run_map_elites(&cfg, GridSpec::arm(), &ArmMapEvaluator::default()).map(|r| r.archive)
                })
                .collect::<iteqd::Result<Vec<_>>>()
        })?
    } else {
        let mut grids = Vec::new();
        for p in &args.archives {
            let (g, meta) = map::load(p)?;
            check_arm_archive(&g, meta.genome_len)?;
            s.record(&format!("archive_{}", grids.len()), &meta.config_hash);
            grids.push(g);
        }
        grids
    };
    let config_id = s.finish("bench variants")?;

    let mut cases = Vec::new();
    for (m, grid) in grids.iter().enumerate() {
        for (d, (name, spec)) in damages.iter().enumerate() {
            for r in 0..runs {
                let idx = ((m * damages.len() + d) * runs + r) as u64;
                cases.push(ArmCase {
                    map_id: m,
                    grid,
                    damage: name.clone(),
                    trial: ArmTrial::new(spec.clone(), target),
                    seed: split_seed(seed, idx),
                });
            }
        }
    }
    let config = BenchConfig::arm(budget);
    let model = if noise { NoiseModel::default() } else { NoiseModel::off() };
    let records = pool.install(|| run_arm_cases(&cases, &kinds, &config, model))?;

    let mut cuts = default_cuts(budget);
    if cuts.is_empty() || *cuts.last().expect("non-empty") != budget {
        cuts.push(budget);
    }
    let rows = summarize(&records, &cuts);
    let sink: Box<dyn Write> = match &out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = BufWriter::new(sink);
    writeln!(w, "{}", config_id.header_comment())?;
    writeln!(w, "variant,damage,seed,cut,runs,median_perf_at_cut,p25_perf_at_cut,p75_perf_at_cut")?;
    let damage_label = damages.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>().join(";");
    for r in &rows {
        writeln!(w, "{},{damage_label},{seed},{},{},{},{},{}", r.variant, r.cut, r.runs, r.median, r.p25, r.p75)?;
    }
    w.flush()?;

    if let Some(p) = &raw {
        let mut w = BufWriter::new(File::create(p)?);
        writeln!(w, "{}", config_id.meta_json("bench variants"))?;
        for rec in &records {
            for e in &rec.log.entries {
                let line = json!({ "variant": rec.variant, "map_id": rec.map_id, "damage": rec.damage, "seed": rec.seed, "entry": e });
                writeln!(w, "{line}")?;
            }
        }
        w.flush()?;
    }
    eprintln!("{} runs over {} maps x {} damages, budget {budget}", records.len(), grids.len(), damages.len());
    Ok(())
}
