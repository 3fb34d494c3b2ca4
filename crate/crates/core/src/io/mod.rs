//! Scenario files, output writers and the run driver used by the CLI.

mod output;
mod run;
mod scenario;

pub use output::{
    load_displacement_csv, trace_csv, vtk, vtk_file_name, write_file, LOAD_DISPLACEMENT_HEADER, TRACE_HEADER,
};
pub use run::{run, RunReport, RunSummary, FIRST_DROP_FRACTION};
pub use scenario::{load_scenario, Engine, Geometry, OutputSpec, RandomSpec, Scenario, StripSpec};
