//! Sequential linear analysis.
//!
//! Each step solves the current linear model under a unit prescribed
//! displacement, scales the solution so the most stressed eligible element
//! sits exactly at the tensile strength, records the scaled load and
//! displacements, then degrades that element to a fraction of its initial
//! modulus.

use serde::{Deserialize, Serialize};

use super::{
    critical_element, reaction_imbalance, Critical, RunOutput, Snapshot, Specimen, StepEvent, StepRecord, Termination,
    Trace,
};
use crate::error::{Error, Result};
use crate::fem::{reactions, solve, Assembler, RegionNu};
use crate::material::MaterialParams;
use crate::mesh::Region;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SlaConfig {
    /// Degraded modulus as a fraction of the initial one.
    pub degrade_factor: f64,
    pub max_steps: usize,
    /// Stop once the load falls below this fraction of the peak so far.
    pub load_threshold: f64,
    /// Stop once the scaled prescribed displacement exceeds this (m).
    pub max_displacement: f64,
}

impl Default for SlaConfig {
    fn default() -> Self {
        SlaConfig {
            degrade_factor: 0.01,
            max_steps: 100,
            load_threshold: 0.1,
            max_displacement: 0.01,
        }
    }
}

impl SlaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.degrade_factor > 0.0 && self.degrade_factor < 1.0) {
            return Err(Error::Config(format!(
                "sla.degrade_factor must lie in (0, 1), got {}",
                self.degrade_factor
            )));
        }
        if self.max_steps == 0 {
            return Err(Error::Config("sla.max_steps must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.load_threshold) {
            return Err(Error::Config(format!(
                "sla.load_threshold must lie in [0, 1), got {}",
                self.load_threshold
            )));
        }
        if !(self.max_displacement > 0.0) {
            return Err(Error::Config(format!(
                "sla.max_displacement must be positive, got {}",
                self.max_displacement
            )));
        }
        Ok(())
    }
}

/// Runs the analysis from the initial moduli `e_initial` (one per element).
/// `snapshot_every = 0` disables snapshots; the last state is always kept.
pub fn run_sla(
    specimen: &Specimen,
    e_initial: &[f64],
    params: &MaterialParams,
    config: &SlaConfig,
    snapshot_every: usize,
) -> Result<RunOutput> {
    config.validate()?;
    params.validate()?;
    let mesh = &specimen.mesh;
    let asm = Assembler::new(
        mesh,
        RegionNu {
            casi: params.nu_casi,
            rubber: params.nu_rubber,
        },
    )?;
    if e_initial.len() != mesh.n_elements() {
        return Err(Error::Input(format!(
            "expected {} initial moduli, got {}",
            mesh.n_elements(),
            e_initial.len()
        )));
    }

    let mut young = e_initial.to_vec();
    let mut eligible: Vec<bool> = mesh.elements.iter().map(|e| e.region == Region::Casi).collect();
    let unit = specimen.supports.constraints(1.0);

    let mut records = Vec::new();
    let mut snapshots = Vec::new();
    let mut last = None;
    let mut peak = 0.0_f64;
    let mut termination = Termination::MaxSteps;

    for step in 1..=config.max_steps {
        let system = asm.assemble(&young, unit.clone())?;
        let u = match solve(&system) {
            Ok(u) => u,
            Err(e) => {
                termination = Termination::SolverFailure {
                    step,
                    message: e.to_string(),
                };
                break;
            }
        };
        let r = reactions(&system, &u);
        let fields = asm.recover(&u, &young);
        let (critical, sp1_unit) = match critical_element(&fields, &eligible) {
            Critical::Element { id, sp1 } => (id, sp1),
            Critical::None => {
                termination = Termination::NoCriticalElement;
                break;
            }
        };

        let scale = params.f_t / sp1_unit;
        let load = scale * specimen.supports.load(&r);
        let edge = specimen.edge_displacements(&u).map(|d| scale * d);
        records.push(StepRecord {
            step,
            prescribed_disp: scale,
            edge_disp: edge,
            load,
            contact_stress: specimen.contact_stress(load),
            reaction_imbalance: reaction_imbalance(&r),
            event: StepEvent::Degraded {
                element: critical,
                sp1_unit,
            },
        });

        young[critical] = config.degrade_factor * e_initial[critical];
        eligible[critical] = false;

        let take_snapshot = snapshot_every > 0 && step % snapshot_every == 0;
        let done_steps = step == config.max_steps;
        peak = peak.max(load);
        let below = load < config.load_threshold * peak;
        let too_far = scale > config.max_displacement;
        if take_snapshot || done_steps || below || too_far {
            let snap = Snapshot {
                step,
                fields: scaled(fields, scale),
                e_next: young.clone(),
                estar_max: vec![0.0; young.len()],
            };
            if take_snapshot {
                snapshots.push(snap.clone());
            }
            last = Some(snap);
        }
        if below {
            termination = Termination::LoadThreshold;
            break;
        }
        if too_far {
            termination = Termination::MaxDisplacement;
            break;
        }
    }

    Ok(RunOutput {
        trace: Trace { records, termination },
        snapshots,
        last,
        e_initial: e_initial.to_vec(),
    })
}

fn scaled(mut f: crate::fem::FieldState, s: f64) -> crate::fem::FieldState {
    f.u.iter_mut().for_each(|x| *x *= s);
    for v in f.strain.iter_mut().chain(f.stress.iter_mut()) {
        v.iter_mut().for_each(|x| *x *= s);
    }
    f.ep1.iter_mut().for_each(|x| *x *= s);
    f.sp1.iter_mut().for_each(|x| *x *= s);
    f
}
