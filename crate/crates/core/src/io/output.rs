//! Plain-text emitters. Floats use `{:.16e}` (17 significant digits, exact
//! round trip) and lines end in `\n`, so equal runs give equal bytes.

use std::fmt::Write as _;
use std::path::Path;

use crate::engines::{Snapshot, StepEvent, Trace};
use crate::error::{Error, Result};
use crate::mesh::Mesh;

pub const LOAD_DISPLACEMENT_HEADER: &str =
    "step,prescribed_disp_m,edge_left_disp_m,edge_right_disp_m,load_N,contact_stress_Pa";

pub const TRACE_HEADER: &str = "step,prescribed_disp_m,edge_left_disp_m,edge_right_disp_m,load_N,contact_stress_Pa,\
reaction_imbalance,event,element,sp1_unit_Pa,iterations,converged,mismatch";

fn num(out: &mut String, v: f64) {
    write!(out, "{v:.16e}").expect("writing to a String cannot fail");
}

pub fn load_displacement_csv(trace: &Trace) -> String {
    let mut out = String::with_capacity(128 * (trace.records.len() + 1));
    out.push_str(LOAD_DISPLACEMENT_HEADER);
    out.push('\n');
    for r in &trace.records {
        write!(out, "{}", r.step).unwrap();
        for v in [r.prescribed_disp, r.edge_disp[0], r.edge_disp[1], r.load, r.contact_stress] {
            out.push(',');
            num(&mut out, v);
        }
        out.push('\n');
    }
    out
}

/// Load-displacement columns plus the per-step event. Columns that do not
/// apply to an event are left empty.
pub fn trace_csv(trace: &Trace) -> String {
    let mut out = String::with_capacity(200 * (trace.records.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in &trace.records {
        write!(out, "{}", r.step).unwrap();
        for v in [
            r.prescribed_disp,
            r.edge_disp[0],
            r.edge_disp[1],
            r.load,
            r.contact_stress,
            r.reaction_imbalance,
        ] {
            out.push(',');
            num(&mut out, v);
        }
        match r.event {
            StepEvent::Initial => out.push_str(",initial,,,,,"),
            StepEvent::Degraded { element, sp1_unit } => {
                write!(out, ",degraded,{element},").unwrap();
                num(&mut out, sp1_unit);
                out.push_str(",,,");
            }
            StepEvent::Picard {
                iterations,
                converged,
                mismatch,
            } => {
                write!(out, ",picard,,,{iterations},{converged},").unwrap();
                num(&mut out, mismatch);
            }
        }
        out.push('\n');
    }
    out
}

/// Legacy ASCII VTK 3.0 unstructured grid of bilinear quads with per-cell
/// `E_current`, `sp1`, `ep1` and per-point displacement `u`.
pub fn vtk(mesh: &Mesh, snap: &Snapshot, title: &str) -> String {
    let f = &snap.fields;
    let (n, m) = (mesh.n_nodes(), mesh.n_elements());
    let mut out = String::with_capacity(64 * (n + m) * 2);
    out.push_str("# vtk DataFile Version 3.0\n");
    // the title line must be a single line of at most 256 characters
    let title: String = title.chars().filter(|c| *c != '\n').take(200).collect();
    writeln!(out, "{title} step {}", snap.step).unwrap();
    out.push_str("ASCII\nDATASET UNSTRUCTURED_GRID\n");
    writeln!(out, "POINTS {n} double").unwrap();
    for p in &mesh.nodes {
        num(&mut out, p.x);
        out.push(' ');
        num(&mut out, p.y);
        out.push_str(" 0\n");
    }
    writeln!(out, "CELLS {m} {}", 5 * m).unwrap();
    for e in &mesh.elements {
        let [a, b, c, d] = e.nodes;
        writeln!(out, "4 {a} {b} {c} {d}").unwrap();
    }
    writeln!(out, "CELL_TYPES {m}").unwrap();
    for _ in 0..m {
        out.push_str("9\n");
    }
    writeln!(out, "CELL_DATA {m}").unwrap();
    for (name, data) in [("E_current", &f.e_current), ("sp1", &f.sp1), ("ep1", &f.ep1)] {
        writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default").unwrap();
        for &v in data.iter() {
            num(&mut out, v);
            out.push('\n');
        }
    }
    writeln!(out, "POINT_DATA {n}\nVECTORS u double").unwrap();
    for pair in f.u.chunks_exact(2) {
        num(&mut out, pair[0]);
        out.push(' ');
        num(&mut out, pair[1]);
        out.push_str(" 0\n");
    }
    out
}

pub fn vtk_file_name(step: usize) -> String {
    format!("fields_step_{step:04}.vtk")
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}
