use std::fs::File;
use std::io::{BufReader, Write};

use iteqd::gait::{descriptor, random_descriptor_basis, DescriptorKind, TrajectoryRecord, DEFAULT_TIMESTEP};

use crate::cli::DescriptorsArgs;
use crate::error::{CliError, CliResult};
use crate::settings::Settings;

pub fn compute(args: DescriptorsArgs) -> CliResult {
    let mut s = Settings::load(args.config.config.as_deref())?;
    let traj_path = s.required_path("traj", args.traj)?;
    let kind = s.get("kind", args.kind, "duty_factor".to_string())?;
    let timestep = s.get("timestep", args.timestep, DEFAULT_TIMESTEP)?;
    let basis_seed = if kind == "random" { Some(s.get("basis_seed", args.basis_seed, 0)?) } else { None };
    let out = s.path("out", args.out)?;
    let config = s.finish("descriptors compute")?;

    let f = File::open(&traj_path).map_err(|e| CliError::Runtime(format!("cannot open trajectory {}: {e}", traj_path.display())))?;
    let traj =
        TrajectoryRecord::read_csv(BufReader::new(f), timestep).map_err(|e| CliError::Runtime(format!("{}: {e}", traj_path.display())))?;
    let values = match basis_seed {
        Some(seed) => random_descriptor_basis(seed).evaluate(&traj),
        None => descriptor(kind.parse::<DescriptorKind>()?, &traj),
    };
    let line = values.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(",");
    match out {
        Some(p) => {
            let mut w = File::create(p)?;
            writeln!(w, "{}", config.header_comment())?;
            writeln!(w, "# kind={kind}")?;
            writeln!(w, "{line}")?;
        }
        None => println!("{line}"),
    }
    Ok(())
}
