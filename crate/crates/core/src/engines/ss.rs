//! Incremental secant model with the step-function softening law.
//!
//! The prescribed displacement is ramped linearly. Within a step the element
//! moduli are found by damped fixed-point iteration: solve with the current
//! moduli, evaluate the secant modulus from the resulting first principal
//! strain, relax towards it, repeat. The scaled strain that drives the
//! secant law is the historical maximum per element, so damage never heals.
//! The history is committed only once per step, from the accepted iterate.

use serde::{Deserialize, Serialize};

use super::{reaction_imbalance, RunOutput, Snapshot, Specimen, StepEvent, StepRecord, Termination, Trace};
use crate::error::{Error, Result};
use crate::fem::{reactions, solve, Assembler, FieldState, RegionNu};
use crate::material::{secant_from_estar, strain_to_estar, MaterialParams, StepFunction};
use crate::mesh::Region;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SsConfig {
    pub n_steps: usize,
    /// Prescribed displacement at the last step (m).
    pub max_prescribed_disp: f64,
    /// Accept a step once every element's relative modulus mismatch is below this.
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    /// Weight of the updated modulus in each fixed-point update.
    pub relaxation: f64,
    /// Consecutive non-converged steps treated as numerical instability;
    /// 0 never stops on non-convergence.
    pub max_nonconverged: usize,
}

impl Default for SsConfig {
    fn default() -> Self {
        SsConfig {
            n_steps: 1000,
            max_prescribed_disp: 2e-3,
            picard_tol: 1e-4,
            picard_max_iter: 50,
            relaxation: 0.5,
            max_nonconverged: 0,
        }
    }
}

impl SsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_steps == 0 {
            return Err(Error::Config("ss.n_steps must be at least 1".into()));
        }
        if !(self.max_prescribed_disp.is_finite() && self.max_prescribed_disp > 0.0) {
            return Err(Error::Config(format!(
                "ss.max_prescribed_disp must be positive, got {}",
                self.max_prescribed_disp
            )));
        }
        if !(self.picard_tol > 0.0) {
            return Err(Error::Config(format!("ss.picard_tol must be positive, got {}", self.picard_tol)));
        }
        if self.picard_max_iter == 0 {
            return Err(Error::Config("ss.picard_max_iter must be at least 1".into()));
        }
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return Err(Error::Config(format!(
                "ss.relaxation must lie in (0, 1], got {}",
                self.relaxation
            )));
        }
        Ok(())
    }
}

struct Iterate {
    u: Vec<f64>,
    r: Vec<f64>,
    fields: FieldState,
    estar: Vec<f64>,
    mismatch: f64,
}

/// Runs the secant model from the initial (undamaged) patch moduli
/// `e_initial`. Block elements start at `e_floor + e_initial`; rubber keeps
/// its modulus throughout. Step 0 is the unloaded state.
pub fn run_ss(
    specimen: &Specimen,
    e_initial: &[f64],
    params: &MaterialParams,
    sf: &StepFunction,
    config: &SsConfig,
    snapshot_every: usize,
) -> Result<RunOutput> {
    config.validate()?;
    params.validate()?;
    let mesh = &specimen.mesh;
    if e_initial.len() != mesh.n_elements() {
        return Err(Error::Input(format!(
            "expected {} initial moduli, got {}",
            mesh.n_elements(),
            e_initial.len()
        )));
    }
    let asm = Assembler::new(
        mesh,
        RegionNu {
            casi: params.nu_casi,
            rubber: params.nu_rubber,
        },
    )?;
    let damageable: Vec<bool> = mesh.elements.iter().map(|e| e.region == Region::Casi).collect();
    let n_el = mesh.n_elements();

    let modulus = |e: usize, estar: f64| -> f64 {
        if damageable[e] {
            secant_from_estar(e_initial[e], estar, sf, params)
        } else {
            e_initial[e]
        }
    };

    let mut estar_hist = vec![0.0_f64; n_el];
    let mut young: Vec<f64> = (0..n_el).map(|e| modulus(e, 0.0)).collect();
    let e_start = young.clone();

    let mut records = vec![StepRecord {
        step: 0,
        prescribed_disp: 0.0,
        edge_disp: [0.0; 2],
        load: 0.0,
        contact_stress: 0.0,
        reaction_imbalance: 0.0,
        event: StepEvent::Initial,
    }];
    let mut snapshots = Vec::new();
    let mut last = None;
    let mut termination = Termination::MaxSteps;
    let mut nonconverged_run = 0usize;

    'steps: for step in 1..=config.n_steps {
        let disp = config.max_prescribed_disp * step as f64 / config.n_steps as f64;
        let constraints = specimen.supports.constraints(disp);

        let mut used = young.clone();
        let mut best: Option<(Iterate, Vec<f64>)> = None;
        let mut iterations = 0;
        let mut converged = false;
        for it in 1..=config.picard_max_iter {
            iterations = it;
            let system = asm.assemble(&used, constraints.clone())?;
            let u = match solve(&system) {
                Ok(u) => u,
                Err(e) => {
                    termination = Termination::SolverFailure {
                        step,
                        message: e.to_string(),
                    };
                    break 'steps;
                }
            };
            let r = reactions(&system, &u);
            let fields = asm.recover(&u, &used);
            if fields.ep1.iter().any(|v| !v.is_finite()) || u.iter().any(|v| !v.is_finite()) {
                termination = Termination::NumericalInstability {
                    detail: format!("non-finite field values at step {step}, iteration {it}"),
                };
                break 'steps;
            }

            let mut estar = estar_hist.clone();
            let mut target = used.clone();
            let mut mismatch = 0.0_f64;
            for e in 0..n_el {
                if !damageable[e] {
                    continue;
                }
                estar[e] = estar[e].max(strain_to_estar(fields.ep1[e], params));
                target[e] = modulus(e, estar[e]);
                mismatch = mismatch.max((target[e] - used[e]).abs() / used[e]);
            }

            let candidate = Iterate {
                u,
                r,
                fields,
                estar,
                mismatch,
            };
            if mismatch <= config.picard_tol {
                best = Some((candidate, used.clone()));
                converged = true;
                break;
            }
            let next: Vec<f64> = used
                .iter()
                .zip(&target)
                .map(|(&a, &b)| (1.0 - config.relaxation) * a + config.relaxation * b)
                .collect();
            if best.as_ref().is_none_or(|(b, _)| candidate.mismatch < b.mismatch) {
                best = Some((candidate, used));
            }
            used = next;
        }
        let (accepted, _) = best.expect("at least one iteration");

        estar_hist = accepted.estar;
        for e in 0..n_el {
            young[e] = modulus(e, estar_hist[e]);
        }

        let load = specimen.supports.load(&accepted.r);
        records.push(StepRecord {
            step,
            prescribed_disp: disp,
            edge_disp: specimen.edge_displacements(&accepted.u),
            load,
            contact_stress: specimen.contact_stress(load),
            reaction_imbalance: reaction_imbalance(&accepted.r),
            event: StepEvent::Picard {
                iterations,
                converged,
                mismatch: accepted.mismatch,
            },
        });

        nonconverged_run = if converged { 0 } else { nonconverged_run + 1 };
        let unstable = config.max_nonconverged > 0 && nonconverged_run >= config.max_nonconverged;
        let take_snapshot = snapshot_every > 0 && step % snapshot_every == 0;
        if take_snapshot || unstable || step == config.n_steps {
            let snap = Snapshot {
                step,
                fields: accepted.fields,
                e_next: young.clone(),
                estar_max: estar_hist.clone(),
            };
            if take_snapshot {
                snapshots.push(snap.clone());
            }
            last = Some(snap);
        }
        if unstable {
            termination = Termination::NumericalInstability {
                detail: format!("{nonconverged_run} consecutive non-converged steps ending at step {step}"),
            };
            break;
        }
    }

    Ok(RunOutput {
        trace: Trace { records, termination },
        snapshots,
        last,
        e_initial: e_start,
    })
}
