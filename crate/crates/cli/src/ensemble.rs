use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use fracture_core::io::{load_scenario, run, write_file, RunSummary};
use rayon::prelude::*;

use crate::fmt::sig6;

pub const THREADS_ENV: &str = "FRACTURE_SIM_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedRange {
    pub first: u64,
    pub last: u64,
}

impl SeedRange {
    pub fn seeds(&self) -> Vec<u64> {
        (self.first..=self.last).collect()
    }
}

/// Parses an inclusive range `a..b`; a single number is a one-seed range.
pub fn parse_seeds(s: &str) -> Result<SeedRange, String> {
    let num = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("bad seed '{t}': {e}"));
    let (first, last) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let n = num(s)?;
            (n, n)
        }
    };
    if first > last {
        return Err(format!("empty seed range {s}"));
    }
    Ok(SeedRange { first, last })
}

/// `None` leaves the choice to rayon; `Some(0)` runs serially.
pub fn thread_setting() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|e| anyhow!("{THREADS_ENV}={v}: {e}")),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => bail!("{THREADS_ENV}: {e}"),
    }
}

pub fn run_ensemble(config: &Path, range: SeedRange, out: &Path) -> Result<ExitCode> {
    let scenario = load_scenario(config)?;
    let seeds = range.seeds();
    let one = |seed: u64| -> Result<RunSummary> {
        let dir = out.join(format!("seed_{seed:04}"));
        Ok(run(&scenario, Some(seed), &dir).with_context(|| format!("seed {seed}"))?.summary)
    };
    let summaries: Vec<RunSummary> = match thread_setting()? {
        Some(0) => seeds.iter().map(|&s| one(s)).collect::<Result<_>>()?,
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()?
            .install(|| seeds.par_iter().map(|&s| one(s)).collect::<Result<_>>())?,
        None => seeds.par_iter().map(|&s| one(s)).collect::<Result<_>>()?,
    };

    write_file(&out.join("ensemble.csv"), &ensemble_csv(&summaries))?;
    for s in &summaries {
        println!(
            "seed {:>4}  {:<22} peak {} Pa  first peak {}",
            s.seed,
            s.termination,
            sig6(s.peak_contact_stress_pa),
            s.first_peak_contact_stress_pa
                .map_or_else(|| "none".to_string(), |v| format!("{} Pa", sig6(v)))
        );
    }
    let mut firsts: Vec<f64> = summaries.iter().filter_map(|s| s.first_peak_contact_stress_pa).collect();
    if let Some(m) = median(&mut firsts) {
        println!("median first-peak contact stress {} Pa over {} runs", sig6(m), firsts.len());
    }
    let failed = summaries.iter().any(|s| s.is_error());
    Ok(if failed { ExitCode::FAILURE } else { ExitCode::SUCCESS })
}

pub fn median(v: &mut [f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

fn ensemble_csv(summaries: &[RunSummary]) -> String {
    let mut out = String::from(
        "seed,termination,peak_load_N,peak_contact_stress_Pa,first_peak_contact_stress_Pa,first_drop_step,damaged_elements\n",
    );
    for s in summaries {
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.16e}"));
        writeln!(
            out,
            "{},{},{:.16e},{:.16e},{},{},{}",
            s.seed,
            s.termination,
            s.peak_load_n,
            s.peak_contact_stress_pa,
            opt(s.first_peak_contact_stress_pa),
            s.first_drop_step.map_or(String::new(), |d| d.to_string()),
            s.damaged_elements
        )
        .unwrap();
    }
    out
}
