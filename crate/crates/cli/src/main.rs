use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use fracture_core::io::{load_scenario, run};

mod analytic_cmd;
mod ensemble;
mod fmt;

use analytic_cmd::AnalyticCmd;

#[derive(Parser)]
#[command(name = "fracture-sim", version, about = "Splitting-crack simulation of strip-loaded blocks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write CSV, VTK and summary.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `random.seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides `output.directory`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a closed-form formula.
    Analytic {
        #[command(subcommand)]
        formula: AnalyticCmd,
    },
    /// Parse a scenario, build its mesh and report problems.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a scenario for a range of seeds, one subdirectory per seed.
    /// Parallelism follows FRACTURE_SIM_THREADS (0 = serial).
    Ensemble {
        #[arg(long)]
        config: PathBuf,
        /// Inclusive seed range `a..b`.
        #[arg(long, value_parser = ensemble::parse_seeds)]
        seeds: ensemble::SeedRange,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Run { config, seed, out } => {
            let scenario = load_scenario(&config)?;
            let out = out.unwrap_or_else(|| scenario.output.directory.clone());
            let report = run(&scenario, seed, &out).with_context(|| format!("running {}", config.display()))?;
            let s = &report.summary;
            println!("engine            {}", s.engine);
            println!("seed              {}", s.seed);
            println!("steps             {}", s.steps_recorded);
            println!("peak load         {} N", fmt::sig6(s.peak_load_n));
            println!("peak contact      {} Pa", fmt::sig6(s.peak_contact_stress_pa));
            if let (Some(cs), Some(step)) = (s.first_peak_contact_stress_pa, s.first_drop_step) {
                println!("first peak        {} Pa (drop at step {step})", fmt::sig6(cs));
            }
            println!("damaged elements  {}", s.damaged_elements);
            match &s.termination_detail {
                Some(d) => println!("termination       {} ({d})", s.termination),
                None => println!("termination       {}", s.termination),
            }
            println!("output            {}", out.display());
            Ok(if s.is_error() { ExitCode::FAILURE } else { ExitCode::SUCCESS })
        }
        Command::Analytic { formula } => {
            for line in formula.evaluate()? {
                println!("{line}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { config } => {
            let scenario = load_scenario(&config)?;
            let specimen = scenario.build_specimen()?;
            let mesh = &specimen.mesh;
            let strip = mesh.strip.as_ref().expect("specimen has a strip");
            println!("{}: ok", config.display());
            println!("engine    {}", scenario.engine.name());
            println!("mesh      {} nodes, {} elements", mesh.n_nodes(), mesh.n_elements());
            println!(
                "strip     x = [{}, {}] m (requested width {} m, centre {} m)",
                fmt::sig6(strip.x_start),
                fmt::sig6(strip.x_end),
                fmt::sig6(strip.requested_width),
                fmt::sig6(strip.requested_center)
            );
            if let Some(g) = mesh.patches {
                println!("patches   {} x {}", g.cols, g.rows);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Ensemble { config, seeds, out } => ensemble::run_ensemble(&config, seeds, &out),
    }
}
