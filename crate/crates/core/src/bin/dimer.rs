use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dimer_core::scenarios::{run_preset, run_to_dir, sweep, sweep_serial, Reduction, RouteChoice, ScenarioConfig, SweepSpec};
use dimer_core::{Error, Result};

/// Driven, dissipative two-pigment dimer simulator.
#[derive(Parser)]
#[command(name = "dimer", version = dimer_core::scenarios::VERSION)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one scenario and write CSV + JSON.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        route: Option<RouteChoice>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Output file stem.
        #[arg(long, default_value = "trajectory")]
        stem: String,
        /// Override a config key, e.g. `--set params.J=2.0`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Run a built-in figure preset.
    Preset {
        name: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Sweep one parameter and reduce each run to scalars.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Parameter path, e.g. `tau_p` or `params.J`.
        #[arg(long)]
        axis: String,
        /// `0.1,0.2`, `lin:MIN:MAX:N` or `log:MIN:MAX:N`.
        #[arg(long, num_args = 1.., required = true)]
        values: Vec<String>,
        /// Any of `saturation_P`, `saturation_eta`, `peak_C`.
        #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
        reduce: Vec<Reduction>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value = "sweep")]
        stem: String,
        /// Run points on one thread.
        #[arg(long)]
        serial: bool,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Parse and check a config without integrating.
    Validate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Simulate { config, route, out, stem, overrides } => {
            let mut cfg = ScenarioConfig::load(&config, &overrides)?;
            if let Some(r) = route {
                cfg.run.route = r;
            }
            let report = run_to_dir(&cfg, &out, &stem)?;
            for r in &report.routes {
                println!(
                    "{}: saturation P {:.6}, saturation eta {:.6}, peak C {:.6} at t = {:.3} -> {}",
                    r.route.name(),
                    r.saturation_p,
                    r.saturation_eta,
                    r.peak_concurrence,
                    r.peak_concurrence_time,
                    out.join(&r.csv).display()
                );
            }
            Ok(())
        }
        Command::Preset { name, out } => {
            run_preset(&name, &out)?;
            println!("{name} -> {}", out.display());
            Ok(())
        }
        Command::Sweep { config, axis, values, reduce, out, stem, serial, overrides } => {
            let base = ScenarioConfig::load(&config, &overrides)?;
            let spec = SweepSpec { base, axis, values: values.join(",").parse()?, reduce };
            let table = if serial { sweep_serial(&spec)? } else { sweep(&spec)? };
            table.write(&out, &stem)?;
            let missing = table.points.iter().filter(|p| p.reduced.is_none()).count();
            println!("{} points ({missing} missing) -> {}", table.points.len(), out.join(format!("{stem}.csv")).display());
            Ok(())
        }
        Command::Validate { config, overrides } => {
            let cfg = ScenarioConfig::load(&config, &overrides)?;
            let (start, end) = cfg.t_span()?;
            let grid = cfg.grid()?;
            println!("ok: t in [{start}, {end}], {} samples, {} pulse(s)", grid.sample_count(), cfg.train.segments.len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::IntegrationFailed { partial, .. } = &e {
                eprintln!("partial output flushed ({} samples)", partial.samples.len());
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
