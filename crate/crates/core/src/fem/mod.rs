//! Plane-strain linear elastic kernel: element matrices, global assembly with
//! Dirichlet elimination, the direct sparse solve, field recovery and
//! reactions.
//!
//! Dof `2 * n` is the horizontal and `2 * n + 1` the vertical displacement of
//! node `n`. Element stiffness is linear in Young's modulus, so each element's
//! matrix is computed once at `E = 1` and scaled at assembly time.

pub mod element;
pub mod sparse;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::{BoundarySets, Mesh, NodeId, Region};

pub use element::{
    b_matrix, centroid_strain, element_stiffness, plane_strain_c, principal_max, principal_strain,
    principal_stress, ElasticityMatrix, Matrix8,
};
pub use sparse::{CsrMatrix, Skyline};

use element::plane_strain_c_unchecked;

/// Relative pivot threshold below which the reduced system is declared singular.
pub const PIVOT_TOL: f64 = 1e-12;
/// Required relative residual of a solve.
pub const RESIDUAL_TOL: f64 = 1e-10;

pub fn ux(node: NodeId) -> usize {
    2 * node
}

pub fn uy(node: NodeId) -> usize {
    2 * node + 1
}

/// Poisson ratio per region; only Young's modulus degrades.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionNu {
    pub casi: f64,
    pub rubber: f64,
}

impl RegionNu {
    pub fn of(&self, region: Region) -> f64 {
        match region {
            Region::Casi => self.casi,
            Region::Rubber => self.rubber,
        }
    }
}

/// Displacement constraints of a load case: `fixed` dofs stay at zero and
/// `driven` dofs follow `direction * displacement`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Supports {
    pub fixed: Vec<usize>,
    pub driven: Vec<usize>,
    pub direction: f64,
}

impl Supports {
    /// Rollers on the bottom, horizontal pin, strip top pushed downwards.
    pub fn from_boundary(b: &BoundarySets) -> Self {
        let mut fixed: Vec<usize> = b.bottom_nodes.iter().map(|&n| uy(n)).collect();
        fixed.push(ux(b.pin_node));
        fixed.sort_unstable();
        Supports {
            fixed,
            driven: b.strip_top_nodes.iter().map(|&n| uy(n)).collect(),
            direction: -1.0,
        }
    }

    pub fn constraints(&self, displacement: f64) -> Vec<(usize, f64)> {
        let mut c: Vec<(usize, f64)> = self.fixed.iter().map(|&d| (d, 0.0)).collect();
        c.extend(self.driven.iter().map(|&d| (d, self.direction * displacement)));
        c
    }

    /// Driven load, positive in the loading direction.
    pub fn load(&self, reactions: &[f64]) -> f64 {
        self.direction * self.driven.iter().map(|&d| reactions[d]).sum::<f64>()
    }
}

/// Assembled stiffness (both triangles), external nodal forces and the
/// prescribed displacements.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub stiffness: CsrMatrix,
    pub rhs: Vec<f64>,
    pub constraints: Vec<(usize, f64)>,
}

/// Per-mesh assembly data reused across the many solves of an engine run.
#[derive(Debug, Clone)]
pub struct Assembler {
    nu: Vec<f64>,
    unit_k: Vec<Matrix8>,
    dofs: Vec<[usize; 8]>,
    pattern: CsrMatrix,
    scatter: Vec<[usize; 64]>,
    depth: f64,
    coords: Vec<[[f64; 2]; 4]>,
}

impl Assembler {
    pub fn new(mesh: &Mesh, nu: RegionNu) -> Result<Self> {
        let ndof = mesh.n_dofs();
        let mut unit_k = Vec::with_capacity(mesh.n_elements());
        let mut nus = Vec::with_capacity(mesh.n_elements());
        let mut dofs = Vec::with_capacity(mesh.n_elements());
        let mut coords = Vec::with_capacity(mesh.n_elements());
        let mut rows = vec![Vec::new(); ndof];
        for el in &mesh.elements {
            let v = nu.of(el.region);
            let c = plane_strain_c(1.0, v)?;
            let xy = mesh.coords(el.id);
            let k = element_stiffness(&xy, &c, mesh.depth).map_err(|e| match e {
                Error::Jacobian { det, .. } => Error::Jacobian { element: el.id, det },
                other => other,
            })?;
            let d: [usize; 8] = std::array::from_fn(|i| 2 * el.nodes[i / 2] + i % 2);
            for &a in &d {
                rows[a].extend_from_slice(&d);
            }
            unit_k.push(k);
            nus.push(v);
            dofs.push(d);
            coords.push(xy);
        }
        let pattern = CsrMatrix::from_pattern(ndof, rows);
        let scatter = dofs
            .iter()
            .map(|d| {
                std::array::from_fn(|p| pattern.position(d[p / 8], d[p % 8]).expect("dof pair in pattern"))
            })
            .collect();
        Ok(Assembler {
            nu: nus,
            unit_k,
            dofs,
            pattern,
            scatter,
            depth: mesh.depth,
            coords,
        })
    }

    pub fn n_dofs(&self) -> usize {
        self.pattern.n
    }

    pub fn n_elements(&self) -> usize {
        self.unit_k.len()
    }

    pub fn depth(&self) -> f64 {
        self.depth
    }

    pub fn nu(&self, e: usize) -> f64 {
        self.nu[e]
    }

    pub fn element_stiffness(&self, e: usize, young: f64) -> Matrix8 {
        self.unit_k[e] * young
    }

    pub fn stiffness(&self, young: &[f64]) -> Result<CsrMatrix> {
        if young.len() != self.n_elements() {
            return Err(Error::Input(format!(
                "expected {} element moduli, got {}",
                self.n_elements(),
                young.len()
            )));
        }
        if let Some((e, &v)) = young.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Input(format!("element {e} has non-positive modulus {v}")));
        }
        let mut k = self.pattern.clone();
        for ((ke, map), &ye) in self.unit_k.iter().zip(&self.scatter).zip(young) {
            for (p, &pos) in map.iter().enumerate() {
                k.values[pos] += ye * ke[(p / 8, p % 8)];
            }
        }
        Ok(k)
    }

    pub fn assemble(&self, young: &[f64], constraints: Vec<(usize, f64)>) -> Result<GlobalSystem> {
        Ok(GlobalSystem {
            stiffness: self.stiffness(young)?,
            rhs: vec![0.0; self.n_dofs()],
            constraints,
        })
    }

    pub fn element_displacements(&self, e: usize, u: &[f64]) -> [f64; 8] {
        self.dofs[e].map(|d| u[d])
    }

    /// `0.5 u_e^T k_e u_e`.
    pub fn strain_energy(&self, e: usize, young: f64, u: &[f64]) -> f64 {
        let ue = nalgebra::SVector::<f64, 8>::from(self.element_displacements(e, u));
        0.5 * young * (ue.transpose() * self.unit_k[e] * ue)[(0, 0)]
    }

    /// Centroid strain and stress, principal values and the moduli used.
    pub fn recover(&self, u: &[f64], young: &[f64]) -> FieldState {
        let n = self.n_elements();
        let mut state = FieldState {
            u: u.to_vec(),
            strain: Vec::with_capacity(n),
            stress: Vec::with_capacity(n),
            ep1: Vec::with_capacity(n),
            sp1: Vec::with_capacity(n),
            e_current: young.to_vec(),
        };
        for e in 0..n {
            let strain = centroid_strain(&self.coords[e], &self.element_displacements(e, u));
            let stress = plane_strain_c_unchecked(young[e], self.nu[e]).apply(strain);
            state.ep1.push(principal_strain(strain));
            state.sp1.push(principal_stress(stress));
            state.strain.push(strain);
            state.stress.push(stress);
        }
        state
    }
}

/// Displacements, centroid strain/stress, principal values and current
/// secant moduli of one equilibrium state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldState {
    /// Interleaved `(ux, uy)` per node.
    pub u: Vec<f64>,
    /// Voigt `(exx, eyy, gxy)` per element.
    pub strain: Vec<[f64; 3]>,
    /// Voigt `(sxx, syy, sxy)` per element.
    pub stress: Vec<[f64; 3]>,
    pub ep1: Vec<f64>,
    pub sp1: Vec<f64>,
    pub e_current: Vec<f64>,
}

/// One-shot assembly for a specimen load case.
pub fn assemble(
    mesh: &Mesh,
    young: &[f64],
    nu: RegionNu,
    bsets: &BoundarySets,
    prescribed_disp: f64,
) -> Result<GlobalSystem> {
    let asm = Assembler::new(mesh, nu)?;
    asm.assemble(young, Supports::from_boundary(bsets).constraints(prescribed_disp))
}

pub fn recover_fields(mesh: &Mesh, u: &[f64], young: &[f64], nu: RegionNu) -> Result<FieldState> {
    if u.len() != mesh.n_dofs() {
        return Err(Error::Input(format!("expected {} displacements, got {}", mesh.n_dofs(), u.len())));
    }
    Ok(Assembler::new(mesh, nu)?.recover(u, young))
}

/// Solves the constrained system, returning the full displacement vector.
pub fn solve(system: &GlobalSystem) -> Result<Vec<f64>> {
    let k = &system.stiffness;
    let n = k.n;
    let mut prescribed: Vec<Option<f64>> = vec![None; n];
    for &(d, v) in &system.constraints {
        if d >= n {
            return Err(Error::Input(format!("constraint on dof {d} outside 0..{n}")));
        }
        match prescribed[d] {
            Some(old) if old != v => {
                return Err(Error::Input(format!("dof {d} constrained to both {old} and {v}")));
            }
            _ => prescribed[d] = Some(v),
        }
    }
    let free: Vec<usize> = (0..n).filter(|&d| prescribed[d].is_none()).collect();
    let mut u: Vec<f64> = prescribed.iter().map(|p| p.unwrap_or(0.0)).collect();
    if free.is_empty() {
        return Ok(u);
    }

    let mut local = vec![usize::MAX; n];
    for (i, &d) in free.iter().enumerate() {
        local[d] = i;
    }
    let adj: Vec<Vec<usize>> = free
        .iter()
        .map(|&d| {
            let (cols, _) = k.row(d);
            cols.iter().filter(|&&c| c != d && local[c] != usize::MAX).map(|&c| local[c]).collect()
        })
        .collect();
    let natural: Vec<usize> = (0..free.len()).collect();
    let rcm = sparse::reverse_cuthill_mckee(&adj);
    let perm = if sparse::envelope_size(&adj, &rcm) < sparse::envelope_size(&adj, &natural) {
        rcm
    } else {
        natural
    };
    let mut pos = vec![0; free.len()];
    for (new, &old) in perm.iter().enumerate() {
        pos[old] = new;
    }

    let first: Vec<usize> = perm
        .iter()
        .enumerate()
        .map(|(new, &old)| adj[old].iter().map(|&w| pos[w]).min().unwrap_or(new).min(new))
        .collect();
    let mut sky = Skyline::new(first);
    let mut rhs = vec![0.0; free.len()];
    for (i, &d) in free.iter().enumerate() {
        let pi = pos[i];
        let (cols, vals) = k.row(d);
        let mut r = system.rhs[d];
        for (&c, &v) in cols.iter().zip(vals) {
            match prescribed[c] {
                Some(val) => r -= v * val,
                None => {
                    let pc = pos[local[c]];
                    if pc <= pi {
                        sky.add(pc, pi, v);
                    }
                }
            }
        }
        rhs[pi] = r;
    }

    sky.factor(PIVOT_TOL).map_err(|e| match e {
        Error::SingularSystem {
            equation,
            pivot,
            diagonal,
        } => Error::SingularSystem {
            equation: free[perm[equation]],
            pivot,
            diagonal,
        },
        other => other,
    })?;

    let mut x = rhs.clone();
    sky.solve_in_place(&mut x);
    for (i, &d) in free.iter().enumerate() {
        u[d] = x[pos[i]];
    }

    // residual over the free equations; one refinement sweep if needed
    let rhs_norm = rhs.iter().map(|r| r * r).sum::<f64>().sqrt();
    if rhs_norm > 0.0 {
        for sweep in 0..2 {
            let ku = k.mul_vec(&u);
            let mut res = vec![0.0; free.len()];
            for (i, &d) in free.iter().enumerate() {
                res[pos[i]] = system.rhs[d] - ku[d];
            }
            let rel = res.iter().map(|r| r * r).sum::<f64>().sqrt() / rhs_norm;
            if !rel.is_finite() {
                return Err(Error::Solver(format!("non-finite residual after sweep {sweep}")));
            }
            if rel <= RESIDUAL_TOL {
                break;
            }
            if sweep == 1 {
                return Err(Error::Solver(format!(
                    "relative residual {rel:e} above {RESIDUAL_TOL:e} after refinement"
                )));
            }
            sky.solve_in_place(&mut res);
            for (i, &d) in free.iter().enumerate() {
                u[d] += res[pos[i]];
            }
        }
    }
    Ok(u)
}

/// `K u - f` at every dof; non-zero only at constrained dofs in equilibrium.
pub fn reactions(system: &GlobalSystem, u: &[f64]) -> Vec<f64> {
    let mut r = system.stiffness.mul_vec(u);
    for (ri, fi) in r.iter_mut().zip(&system.rhs) {
        *ri -= fi;
    }
    r
}

/// Total vertical reaction over `nodes` and the matching contact stress over
/// a bearing of `bearing_width` by `depth`. Element matrices already carry
/// the depth, so the force is in newtons.
pub fn reaction_force(system: &GlobalSystem, u: &[f64], nodes: &[NodeId], bearing_width: f64, depth: f64) -> (f64, f64) {
    let r = reactions(system, u);
    let force: f64 = nodes.iter().map(|&n| r[uy(n)]).sum();
    (force, force / (bearing_width * depth))
}
