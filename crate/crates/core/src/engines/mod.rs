//! Fracture drivers: sequential linear analysis ([`run_sla`]) and the
//! incremental secant step-function model ([`run_ss`]).

mod sla;
mod ss;
mod trace;

pub use sla::{run_sla, SlaConfig};
pub use ss::{run_ss, SsConfig};
pub use trace::{first_peak, FirstPeak, StepEvent, StepRecord, Termination, Trace};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fem::{FieldState, Supports};
use crate::material::{MaterialParams, RandomField};
use crate::mesh::{boundary_sets, BoundarySets, ElementId, Mesh, NodeId, Patch, Region};

/// A meshed specimen with its load case.
#[derive(Debug, Clone)]
pub struct Specimen {
    pub mesh: Mesh,
    pub supports: Supports,
    /// Nodes whose displacement (along the loading direction) is reported as
    /// the left and right edge displacement.
    pub edge_nodes: [NodeId; 2],
    /// Width of the loaded bearing, for contact stress.
    pub bearing_width: f64,
}

impl Specimen {
    /// Strip-loaded block with the standard supports. The reported edge
    /// displacements are those of the block top under the two strip edges.
    pub fn from_mesh(mesh: Mesh) -> Result<Self> {
        let bsets = boundary_sets(&mesh)?;
        Ok(Self::with_boundary(mesh, &bsets))
    }

    pub fn with_boundary(mesh: Mesh, bsets: &BoundarySets) -> Self {
        let strip = mesh.strip.as_ref().expect("boundary sets imply a strip");
        let edge_nodes = strip.edge_nodes;
        let bearing_width = strip.width();
        Specimen {
            supports: Supports::from_boundary(bsets),
            edge_nodes,
            bearing_width,
            mesh,
        }
    }

    /// Contact stress of a driven load.
    pub fn contact_stress(&self, load: f64) -> f64 {
        load / (self.bearing_width * self.mesh.depth)
    }

    /// Displacements of the edge nodes, positive along the loading direction.
    pub fn edge_displacements(&self, u: &[f64]) -> [f64; 2] {
        self.edge_nodes.map(|n| self.supports.direction * u[crate::fem::uy(n)])
    }
}

/// Initial modulus per element: the patch value for block elements, the
/// rubber modulus for strip elements.
pub fn initial_moduli(mesh: &Mesh, field: &RandomField, params: &MaterialParams) -> Result<Vec<f64>> {
    mesh.elements
        .iter()
        .map(|el| match (el.region, el.patch) {
            (Region::Rubber, _) => Ok(params.e_rubber),
            (Region::Casi, Patch::Block(p)) => {
                if p.col >= field.grid.cols || p.row >= field.grid.rows {
                    return Err(Error::Config(format!("element {} lies in patch {p:?} outside the field", el.id)));
                }
                Ok(field.get(p))
            }
            (Region::Casi, _) => Err(Error::Config(format!("element {} has no patch assigned", el.id))),
        })
        .collect()
}

/// Result of [`critical_element`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Critical {
    Element { id: ElementId, sp1: f64 },
    /// No eligible element is in tension.
    None,
}

/// Eligible element with the largest first principal stress; ties go to the
/// lowest id.
pub fn critical_element(state: &FieldState, eligible: &[bool]) -> Critical {
    let mut best: Option<(ElementId, f64)> = None;
    for (id, (&s, &ok)) in state.sp1.iter().zip(eligible).enumerate() {
        if ok && s > 0.0 && best.is_none_or(|(_, b)| s > b) {
            best = Some((id, s));
        }
    }
    match best {
        Some((id, sp1)) => Critical::Element { id, sp1 },
        None => Critical::None,
    }
}

/// Field state captured during a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snapshot {
    pub step: usize,
    pub fields: FieldState,
    /// Moduli carried into the next step.
    pub e_next: Vec<f64>,
    /// Historical maximum e* per element (zero for sequential linear analysis).
    pub estar_max: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trace: Trace,
    pub snapshots: Vec<Snapshot>,
    /// State after the last recorded step.
    pub last: Option<Snapshot>,
    /// Moduli at the start of the run.
    pub e_initial: Vec<f64>,
}

/// Max over both axes of `|sum r|`, relative to `sum |r|`.
pub(crate) fn reaction_imbalance(r: &[f64]) -> f64 {
    let (mut sx, mut sy, mut scale) = (0.0, 0.0, 0.0);
    for pair in r.chunks_exact(2) {
        sx += pair[0];
        sy += pair[1];
        scale += pair[0].abs() + pair[1].abs();
    }
    if scale == 0.0 {
        0.0
    } else {
        sx.abs().max(sy.abs()) / scale
    }
}
