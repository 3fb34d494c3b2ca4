//! Structured quadrilateral discretization of the block, the rubber bearing
//! strip stacked on its top edge, patch partitioning for the random stiffness
//! field, and the node sets used as boundary conditions.
//!
//! Block nodes are numbered row by row (x fastest), so node `(i, j)` has id
//! `j * (nx + 1) + i`. Strip nodes are appended after the block nodes and the
//! strip elements after the block elements. Elements list their nodes
//! counter-clockwise starting at the lower-left corner.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type ElementId = usize;

/// Geometric tolerance for coordinate comparisons on the structured grid.
const GEOM_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Node {
    pub id: NodeId,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Casi,
    Rubber,
}

/// Patch of the random stiffness field, addressed by column and row of the
/// patch grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PatchIndex {
    pub col: usize,
    pub row: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Patch {
    Unassigned,
    Block(PatchIndex),
    /// Reserved patch shared by all rubber elements.
    Rubber,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Element {
    pub id: ElementId,
    pub nodes: [NodeId; 4],
    pub region: Region,
    pub patch: Patch,
}

/// Where the strip ended up after snapping to grid columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Strip {
    pub requested_width: f64,
    pub requested_center: f64,
    pub first_column: usize,
    pub columns: usize,
    pub x_start: f64,
    pub x_end: f64,
    pub thickness: f64,
    pub rows: usize,
    /// Snapped width minus requested width.
    pub width_snap: f64,
    /// Snapped center minus requested center.
    pub center_snap: f64,
    /// Block-top nodes under the left and right strip edges.
    pub edge_nodes: [NodeId; 2],
}

impl Strip {
    pub fn width(&self) -> f64 {
        self.x_end - self.x_start
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.x_start + self.x_end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PatchGrid {
    pub cols: usize,
    pub rows: usize,
    pub patch_w: f64,
    pub patch_h: f64,
}

impl PatchGrid {
    pub fn len(&self) -> usize {
        self.cols * self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major linear index.
    pub fn linear(&self, p: PatchIndex) -> usize {
        p.row * self.cols + p.col
    }

    /// All patches in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = PatchIndex> + '_ {
        (0..self.rows).flat_map(move |row| (0..self.cols).map(move |col| PatchIndex { col, row }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mesh {
    pub nodes: Vec<Node>,
    pub elements: Vec<Element>,
    pub width: f64,
    pub height: f64,
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    /// Out-of-plane depth used to turn per-unit-depth quantities into forces.
    pub depth: f64,
    pub strip: Option<Strip>,
    pub patches: Option<PatchGrid>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundarySets {
    /// Vertical displacement fixed, horizontal free.
    pub bottom_nodes: Vec<NodeId>,
    /// Bottom node that additionally has its horizontal displacement fixed.
    pub pin_node: NodeId,
    /// Nodes receiving the prescribed vertical displacement.
    pub strip_top_nodes: Vec<NodeId>,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Rectangular `width` x `height` block split into `nx` x `ny` equal quads,
/// all tagged as calcium silicate.
pub fn build_structured_mesh(width: f64, height: f64, nx: usize, ny: usize, depth: f64) -> Result<Mesh> {
    positive("width", width)?;
    positive("height", height)?;
    positive("depth", depth)?;
    if nx == 0 || ny == 0 {
        return Err(Error::Config(format!("subdivisions must be at least 1, got nx={nx}, ny={ny}")));
    }
    let hx = width / nx as f64;
    let hy = height / ny as f64;

    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            nodes.push(Node {
                id: nodes.len(),
                x: if i == nx { width } else { i as f64 * hx },
                y: if j == ny { height } else { j as f64 * hy },
            });
        }
    }

    let row = nx + 1;
    let mut elements = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let n0 = j * row + i;
            elements.push(Element {
                id: elements.len(),
                nodes: [n0, n0 + 1, n0 + row + 1, n0 + row],
                region: Region::Casi,
                patch: Patch::Unassigned,
            });
        }
    }

    Ok(Mesh {
        nodes,
        elements,
        width,
        height,
        nx,
        ny,
        hx,
        hy,
        depth,
        strip: None,
        patches: None,
    })
}

/// Stack `rows` rows of rubber elements of total thickness `thickness` on the
/// top edge, centred at `width / 2 + eccentricity`. The width and position are
/// snapped to whole grid columns; the snap is recorded in [`Strip`].
pub fn attach_strip(mut mesh: Mesh, width: f64, thickness: f64, eccentricity: f64, rows: usize) -> Result<Mesh> {
    positive("strip width", width)?;
    positive("strip thickness", thickness)?;
    if !eccentricity.is_finite() {
        return Err(Error::Config(format!("strip eccentricity must be finite, got {eccentricity}")));
    }
    if rows == 0 {
        return Err(Error::Config("strip rows must be at least 1".into()));
    }
    if mesh.strip.is_some() {
        return Err(Error::Config("strip already attached".into()));
    }
    let half = 0.5 * mesh.width;
    if eccentricity.abs() + 0.5 * width > half * (1.0 + 1e-9) {
        return Err(Error::Config(format!(
            "strip of width {width} at eccentricity {eccentricity} extends beyond the top edge (half width {half})"
        )));
    }

    let center = half + eccentricity;
    let columns = ((width / mesh.hx).round() as usize).clamp(1, mesh.nx);
    let start = ((center - 0.5 * columns as f64 * mesh.hx) / mesh.hx).round();
    let first_column = (start.max(0.0) as usize).min(mesh.nx - columns);

    let row = mesh.nx + 1;
    let top = mesh.ny * row;
    let x_start = mesh.nodes[top + first_column].x;
    let x_end = mesh.nodes[top + first_column + columns].x;
    let dy = thickness / rows as f64;

    // strip node (c, r) for r >= 1; row 0 is the block's top edge
    let base = mesh.nodes.len();
    let strip_node = |c: usize, r: usize| -> NodeId {
        if r == 0 {
            top + first_column + c
        } else {
            base + (r - 1) * (columns + 1) + c
        }
    };
    for r in 1..=rows {
        for c in 0..=columns {
            let id = mesh.nodes.len();
            mesh.nodes.push(Node {
                id,
                x: mesh.nodes[top + first_column + c].x,
                y: if r == rows { mesh.height + thickness } else { mesh.height + r as f64 * dy },
            });
        }
    }
    for r in 0..rows {
        for c in 0..columns {
            let id = mesh.elements.len();
            mesh.elements.push(Element {
                id,
                nodes: [
                    strip_node(c, r),
                    strip_node(c + 1, r),
                    strip_node(c + 1, r + 1),
                    strip_node(c, r + 1),
                ],
                region: Region::Rubber,
                patch: Patch::Rubber,
            });
        }
    }

    mesh.strip = Some(Strip {
        requested_width: width,
        requested_center: center,
        first_column,
        columns,
        x_start,
        x_end,
        thickness,
        rows,
        width_snap: (x_end - x_start) - width,
        center_snap: 0.5 * (x_start + x_end) - center,
        edge_nodes: [top + first_column, top + first_column + columns],
    });
    Ok(mesh)
}

/// Tag every block element with the patch containing its centroid.
pub fn assign_patches(mut mesh: Mesh, patch_w: f64, patch_h: f64) -> Result<Mesh> {
    positive("patch width", patch_w)?;
    positive("patch height", patch_h)?;
    let cols = patch_count(mesh.width, patch_w);
    let rows = patch_count(mesh.height, patch_h);
    for e in 0..mesh.elements.len() {
        if mesh.elements[e].region == Region::Rubber {
            mesh.elements[e].patch = Patch::Rubber;
            continue;
        }
        let (xc, yc) = mesh.centroid(e);
        let col = ((xc / patch_w).floor() as usize).min(cols - 1);
        let row = ((yc / patch_h).floor() as usize).min(rows - 1);
        mesh.elements[e].patch = Patch::Block(PatchIndex { col, row });
    }
    mesh.patches = Some(PatchGrid {
        cols,
        rows,
        patch_w,
        patch_h,
    });
    Ok(mesh)
}

fn patch_count(extent: f64, size: f64) -> usize {
    // tolerate W / patch_w landing a hair above an integer
    ((extent / size - 1e-9).ceil() as usize).max(1)
}

/// Supports of the specimen: rollers along the bottom, one pinned bottom node
/// below the strip centre, and the strip's top face as the loaded set.
pub fn boundary_sets(mesh: &Mesh) -> Result<BoundarySets> {
    let strip = mesh
        .strip
        .as_ref()
        .ok_or_else(|| Error::Config("boundary sets need an attached strip".into()))?;

    let bottom_nodes: Vec<NodeId> = (0..=mesh.nx).collect();
    let target = strip.center();
    let pin_node = bottom_nodes
        .iter()
        .copied()
        .min_by(|&a, &b| {
            let da = (mesh.nodes[a].x - target).abs();
            let db = (mesh.nodes[b].x - target).abs();
            if (da - db).abs() <= 1e-9 * mesh.hx {
                // ids increase with x along the bottom row
                a.cmp(&b)
            } else {
                da.total_cmp(&db)
            }
        })
        .expect("at least two bottom nodes");

    let y_top = mesh.height + strip.thickness;
    let mut strip_top_nodes: Vec<NodeId> = mesh
        .elements
        .iter()
        .filter(|e| e.region == Region::Rubber)
        .flat_map(|e| e.nodes)
        .filter(|&n| (mesh.nodes[n].y - y_top).abs() <= GEOM_EPS * y_top.max(1.0))
        .collect();
    strip_top_nodes.sort_unstable();
    strip_top_nodes.dedup();

    Ok(BoundarySets {
        bottom_nodes,
        pin_node,
        strip_top_nodes,
    })
}

impl Mesh {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn n_dofs(&self) -> usize {
        2 * self.nodes.len()
    }

    pub fn coords(&self, e: ElementId) -> [[f64; 2]; 4] {
        self.elements[e].nodes.map(|n| [self.nodes[n].x, self.nodes[n].y])
    }

    pub fn centroid(&self, e: ElementId) -> (f64, f64) {
        let c = self.coords(e);
        let x = c.iter().map(|p| p[0]).sum::<f64>() / 4.0;
        let y = c.iter().map(|p| p[1]).sum::<f64>() / 4.0;
        (x, y)
    }

    /// Shoelace area of a quad.
    pub fn area(&self, e: ElementId) -> f64 {
        let c = self.coords(e);
        0.5 * (0..4)
            .map(|k| {
                let (a, b) = (c[k], c[(k + 1) % 4]);
                a[0] * b[1] - b[0] * a[1]
            })
            .sum::<f64>()
    }

    pub fn region_count(&self, region: Region) -> usize {
        self.elements.iter().filter(|e| e.region == region).count()
    }

    /// Checks distinct element nodes, counter-clockwise orientation and
    /// conformity: every edge is used by one element (boundary) or two
    /// elements with opposite orientation (interior).
    pub fn validate(&self) -> Result<()> {
        let mut edges: HashMap<(NodeId, NodeId), Vec<(NodeId, NodeId)>> = HashMap::new();
        for el in &self.elements {
            let n = el.nodes;
            for a in 0..4 {
                for b in a + 1..4 {
                    if n[a] == n[b] {
                        return Err(Error::Config(format!("element {} repeats node {}", el.id, n[a])));
                    }
                }
            }
            if n.iter().any(|&id| id >= self.nodes.len()) {
                return Err(Error::Config(format!("element {} references a missing node", el.id)));
            }
            let area = self.area(el.id);
            if area <= 0.0 {
                return Err(Error::Jacobian {
                    element: el.id,
                    det: area,
                });
            }
            for k in 0..4 {
                let (a, b) = (n[k], n[(k + 1) % 4]);
                edges.entry((a.min(b), a.max(b))).or_default().push((a, b));
            }
        }
        for (key, uses) in &edges {
            match uses.as_slice() {
                [_] => {}
                [u, v] if u.0 == v.1 && u.1 == v.0 => {}
                _ => {
                    return Err(Error::Config(format!(
                        "edge {key:?} is used {} times or with inconsistent orientation",
                        uses.len()
                    )))
                }
            }
        }
        Ok(())
    }

    /// Number of edges shared by two elements and on the boundary.
    pub fn edge_census(&self) -> (usize, usize) {
        let mut edges: HashMap<(NodeId, NodeId), usize> = HashMap::new();
        for el in &self.elements {
            for k in 0..4 {
                let (a, b) = (el.nodes[k], el.nodes[(k + 1) % 4]);
                *edges.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let interior = edges.values().filter(|&&c| c == 2).count();
        (interior, edges.len() - interior)
    }
}
