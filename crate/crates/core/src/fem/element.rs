//! Bilinear quadrilateral in plane strain with 2x2 Gauss quadrature.

use nalgebra::{Matrix2, Matrix3, SMatrix, Vector3};

use crate::error::{Error, Result};

pub type Matrix8 = SMatrix<f64, 8, 8>;
pub type BMatrix = SMatrix<f64, 3, 8>;

/// Plane-strain constitutive matrix mapping Voigt strain `(exx, eyy, gxy)`
/// to Voigt stress `(sxx, syy, sxy)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticityMatrix(pub Matrix3<f64>);

impl ElasticityMatrix {
    pub fn apply(&self, strain: [f64; 3]) -> [f64; 3] {
        let s = self.0 * Vector3::from(strain);
        [s[0], s[1], s[2]]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }
}

pub fn plane_strain_c(e: f64, nu: f64) -> Result<ElasticityMatrix> {
    if !(0.0..0.5).contains(&nu) {
        return Err(Error::SingularMaterial { nu });
    }
    if !(e.is_finite() && e > 0.0) {
        return Err(Error::Input(format!("Young's modulus must be positive, got {e}")));
    }
    Ok(plane_strain_c_unchecked(e, nu))
}

pub(crate) fn plane_strain_c_unchecked(e: f64, nu: f64) -> ElasticityMatrix {
    let f = e / ((1.0 + nu) * (1.0 - 2.0 * nu));
    ElasticityMatrix(Matrix3::new(
        f * (1.0 - nu),
        f * nu,
        0.0,
        f * nu,
        f * (1.0 - nu),
        0.0,
        0.0,
        0.0,
        f * (1.0 - 2.0 * nu) / 2.0,
    ))
}

const G: f64 = 0.577_350_269_189_625_8; // 1/sqrt(3)
pub const GAUSS_2X2: [(f64, f64); 4] = [(-G, -G), (G, -G), (G, G), (-G, G)];

/// Reference-corner signs of the bilinear shape functions.
const CORNERS: [(f64, f64); 4] = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];

/// Strain-displacement matrix and Jacobian determinant at `(xi, eta)`.
pub fn b_matrix(coords: &[[f64; 2]; 4], xi: f64, eta: f64) -> (BMatrix, f64) {
    let mut dn = [[0.0; 2]; 4];
    for (k, &(a, b)) in CORNERS.iter().enumerate() {
        dn[k] = [0.25 * a * (1.0 + b * eta), 0.25 * b * (1.0 + a * xi)];
    }
    let mut j = Matrix2::<f64>::zeros();
    for k in 0..4 {
        j[(0, 0)] += dn[k][0] * coords[k][0];
        j[(0, 1)] += dn[k][0] * coords[k][1];
        j[(1, 0)] += dn[k][1] * coords[k][0];
        j[(1, 1)] += dn[k][1] * coords[k][1];
    }
    let det = j.determinant();
    let inv = Matrix2::new(j[(1, 1)], -j[(0, 1)], -j[(1, 0)], j[(0, 0)]) / det;

    let mut b = BMatrix::zeros();
    for k in 0..4 {
        let dx = inv[(0, 0)] * dn[k][0] + inv[(0, 1)] * dn[k][1];
        let dy = inv[(1, 0)] * dn[k][0] + inv[(1, 1)] * dn[k][1];
        b[(0, 2 * k)] = dx;
        b[(1, 2 * k + 1)] = dy;
        b[(2, 2 * k)] = dy;
        b[(2, 2 * k + 1)] = dx;
    }
    (b, det)
}

/// `k = t * sum_g B^T C B |J| w` over the 2x2 rule (all weights are 1).
pub fn element_stiffness(coords: &[[f64; 2]; 4], c: &ElasticityMatrix, thickness: f64) -> Result<Matrix8> {
    let mut k = Matrix8::zeros();
    for &(xi, eta) in GAUSS_2X2.iter() {
        let (b, det) = b_matrix(coords, xi, eta);
        if !(det > 0.0) {
            return Err(Error::Jacobian { element: usize::MAX, det });
        }
        k += b.transpose() * c.0 * b * (det * thickness);
    }
    Ok(k)
}

/// Centroid strain `B(0, 0) u_e`.
pub fn centroid_strain(coords: &[[f64; 2]; 4], ue: &[f64; 8]) -> [f64; 3] {
    let (b, _) = b_matrix(coords, 0.0, 0.0);
    let e = b * SMatrix::<f64, 8, 1>::from_column_slice(ue);
    [e[0], e[1], e[2]]
}

/// Largest eigenvalue of the symmetric 2D tensor `[[a, c], [c, b]]`.
pub fn principal_max(a: f64, b: f64, c: f64) -> f64 {
    let mean = 0.5 * (a + b);
    let half = 0.5 * (a - b);
    mean + half.hypot(c)
}

/// First principal stress of a Voigt stress vector.
pub fn principal_stress(s: [f64; 3]) -> f64 {
    principal_max(s[0], s[1], s[2])
}

/// First principal strain of a Voigt strain vector (engineering shear halved).
pub fn principal_strain(e: [f64; 3]) -> f64 {
    principal_max(e[0], e[1], 0.5 * e[2])
}
