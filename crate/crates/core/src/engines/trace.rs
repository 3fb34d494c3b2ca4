use serde::Serialize;

use crate::mesh::ElementId;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepEvent {
    /// Unloaded reference state.
    Initial,
    /// Sequential linear analysis: the element degraded at this step.
    Degraded { element: ElementId, sp1_unit: f64 },
    /// Secant model: inner fixed-point iterations of this step.
    Picard {
        iterations: usize,
        converged: bool,
        /// Largest relative mismatch between used and updated moduli.
        mismatch: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    /// Prescribed displacement magnitude (m), positive along the loading direction.
    pub prescribed_disp: f64,
    /// Left and right edge displacements (m), positive along the loading direction.
    pub edge_disp: [f64; 2],
    /// Driven load (N), positive along the loading direction.
    pub load: f64,
    pub contact_stress: f64,
    /// Global reaction imbalance, relative to the total absolute reaction.
    pub reaction_imbalance: f64,
    pub event: StepEvent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Termination {
    MaxSteps,
    LoadThreshold,
    MaxDisplacement,
    NoCriticalElement,
    NumericalInstability { detail: String },
    SolverFailure { step: usize, message: String },
}

impl Termination {
    pub fn is_error(&self) -> bool {
        matches!(self, Termination::SolverFailure { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Termination::MaxSteps => "max_steps",
            Termination::LoadThreshold => "load_threshold",
            Termination::MaxDisplacement => "max_displacement",
            Termination::NoCriticalElement => "no_critical_element",
            Termination::NumericalInstability { .. } => "numerical_instability",
            Termination::SolverFailure { .. } => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub records: Vec<StepRecord>,
    pub termination: Termination,
}

impl Trace {
    /// Largest recorded load and its record.
    pub fn peak(&self) -> Option<&StepRecord> {
        self.records
            .iter()
            .fold(None, |best: Option<&StepRecord>, r| match best {
                Some(b) if b.load >= r.load => Some(b),
                _ => Some(r),
            })
    }

    pub fn first_peak(&self, drop_fraction: f64) -> Option<FirstPeak> {
        first_peak(&self.records, drop_fraction)
    }
}

/// First local maximum of the load that is followed by a drop of at least
/// `drop_fraction` of it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstPeak {
    pub peak_step: usize,
    pub peak_load: f64,
    pub peak_contact_stress: f64,
    /// First step whose load is at or below `(1 - drop_fraction) * peak_load`.
    pub drop_step: usize,
    /// Smallest load after the peak.
    pub trough_load: f64,
    /// Load rises again by at least `drop_fraction * peak_load` after the trough.
    pub resumed: bool,
}

pub fn first_peak(records: &[StepRecord], drop_fraction: f64) -> Option<FirstPeak> {
    let mut best = 0usize;
    for (i, r) in records.iter().enumerate() {
        if r.load > records[best].load {
            best = i;
        }
        let peak = records[best].load;
        if peak > 0.0 && r.load <= (1.0 - drop_fraction) * peak {
            let after = &records[best + 1..];
            let (t_idx, trough) = after
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (k, r)| if r.load < acc.1 { (k, r.load) } else { acc });
            let resumed = after[t_idx..].iter().any(|r| r.load >= trough + drop_fraction * peak);
            return Some(FirstPeak {
                peak_step: records[best].step,
                peak_load: peak,
                peak_contact_stress: records[best].contact_stress,
                drop_step: r.step,
                trough_load: trough,
                resumed,
            });
        }
    }
    None
}
