//! Scenario execution and the run summary.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use super::output::{load_displacement_csv, trace_csv, vtk, vtk_file_name, write_file};
use super::scenario::{Engine, Scenario};
use crate::engines::{run_sla, run_ss, RunOutput, StepEvent, Termination};
use crate::error::{Error, Result};

/// Load drop, as a fraction of the peak, that marks the first peak.
pub const FIRST_DROP_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    /// Fully resolved scenario, defaults included, with the seed actually used.
    pub scenario: Scenario,
    pub engine: &'static str,
    pub seed: u64,
    pub steps_recorded: usize,
    pub peak_load_n: f64,
    pub peak_contact_stress_pa: f64,
    pub peak_step: Option<usize>,
    /// First step whose load is at least 5% below the preceding peak.
    pub first_drop_step: Option<usize>,
    pub first_peak_load_n: Option<f64>,
    pub first_peak_contact_stress_pa: Option<f64>,
    /// SLA: degraded elements. SS: elements whose secant modulus has left the
    /// undamaged plateau.
    pub damaged_elements: usize,
    /// Snapped strip placement (m).
    pub strip_x_start_m: f64,
    pub strip_x_end_m: f64,
    pub wall_clock_seconds: f64,
    /// `error` when the run failed; see `termination_detail`.
    pub termination: &'static str,
    pub termination_detail: Option<String>,
}

impl RunSummary {
    pub fn is_error(&self) -> bool {
        self.termination == "error"
    }
}

/// Result of [`run`]: the engine output (absent if the engine refused to
/// start) and the summary that was written.
pub struct RunReport {
    pub output: Option<RunOutput>,
    pub summary: RunSummary,
}

/// Runs `scenario` with `seed` (default: the scenario's), writing
/// `load_displacement.csv`, `trace.csv`, the VTK snapshots and
/// `summary.json` into `out_dir`. Setup and I/O failures are returned as
/// errors; engine failures end up in the summary.
pub fn run(scenario: &Scenario, seed: Option<u64>, out_dir: &Path) -> Result<RunReport> {
    let start = Instant::now();
    let mut scenario = scenario.clone();
    scenario.resolve();
    scenario.validate()?;
    if let Some(s) = seed {
        scenario.random.seed = s;
    }
    let seed = scenario.random.seed;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let specimen = scenario.build_specimen()?;
    let e0 = scenario.initial_moduli(&specimen, seed)?;
    let every = scenario.snapshot_every();
    let result = match &scenario.engine {
        Engine::Sla(c) => run_sla(&specimen, &e0, &scenario.materials, c, every),
        Engine::Ss(c) => run_ss(&specimen, &e0, &scenario.materials, &scenario.step_function, c, every),
    };

    let strip = specimen.mesh.strip.as_ref().expect("specimen has a strip");
    let mut summary = RunSummary {
        engine: scenario.engine.name(),
        seed,
        steps_recorded: 0,
        peak_load_n: 0.0,
        peak_contact_stress_pa: 0.0,
        peak_step: None,
        first_drop_step: None,
        first_peak_load_n: None,
        first_peak_contact_stress_pa: None,
        damaged_elements: 0,
        strip_x_start_m: strip.x_start,
        strip_x_end_m: strip.x_end,
        wall_clock_seconds: 0.0,
        termination: "error",
        termination_detail: None,
        scenario,
    };

    let output = match result {
        Ok(out) => {
            let trace = &out.trace;
            write_file(&out_dir.join("load_displacement.csv"), &load_displacement_csv(trace))?;
            write_file(&out_dir.join("trace.csv"), &trace_csv(trace))?;
            let title = format!("{} seed {seed}", summary.engine);
            for snap in out.snapshots.iter().chain(
                out.last
                    .iter()
                    .filter(|l| out.snapshots.last().is_none_or(|s| s.step != l.step)),
            ) {
                write_file(&out_dir.join(vtk_file_name(snap.step)), &vtk(&specimen.mesh, snap, &title))?;
            }

            summary.steps_recorded = trace.records.len();
            if let Some(p) = trace.peak() {
                summary.peak_load_n = p.load;
                summary.peak_contact_stress_pa = p.contact_stress;
                summary.peak_step = Some(p.step);
            }
            if let Some(fp) = trace.first_peak(FIRST_DROP_FRACTION) {
                summary.first_drop_step = Some(fp.drop_step);
                summary.first_peak_load_n = Some(fp.peak_load);
                summary.first_peak_contact_stress_pa = Some(fp.peak_contact_stress);
            }
            summary.damaged_elements = damaged_count(&summary.scenario, &out);
            summary.termination = trace.termination.label();
            summary.termination_detail = match &trace.termination {
                Termination::NumericalInstability { detail } => Some(detail.clone()),
                Termination::SolverFailure { step, message } => Some(format!("step {step}: {message}")),
                _ => None,
            };
            Some(out)
        }
        Err(e) => {
            summary.termination_detail = Some(e.to_string());
            None
        }
    };

    summary.wall_clock_seconds = start.elapsed().as_secs_f64();
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
    write_file(&out_dir.join("summary.json"), &json)?;
    Ok(RunReport { output, summary })
}

fn damaged_count(scenario: &Scenario, out: &RunOutput) -> usize {
    match scenario.engine {
        Engine::Sla(_) => out
            .trace
            .records
            .iter()
            .filter(|r| matches!(r.event, StepEvent::Degraded { .. }))
            .count(),
        Engine::Ss(_) => out.last.as_ref().map_or(0, |s| {
            s.estar_max
                .iter()
                .filter(|&&e| scenario.step_function.eval_unchecked(e) < 1.0)
                .count()
        }),
    }
}
