//! Nodal P1 fields on a triangulation.
//!
//! A `ScalarField` stores one value per vertex, a `VectorField` two values
//! per vertex (interleaved x/y), a `LameField` pairs the two scalar
//! coefficient fields (lambda, mu), both in kPa.

use crate::error::{Error, Result};
use crate::mesh::TriMesh;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(mesh: &TriMesh) -> Self {
        ScalarField {
            values: vec![0.0; mesh.num_vertices()],
        }
    }

    pub fn constant(mesh: &TriMesh, c: f64) -> Self {
        ScalarField {
            values: vec![c; mesh.num_vertices()],
        }
    }

    pub fn from_fn(mesh: &TriMesh, f: impl Fn([f64; 2]) -> f64) -> Self {
        ScalarField {
            values: mesh.vertices.iter().map(|&p| f(p)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn check_mesh(&self, mesh: &TriMesh) -> Result<()> {
        if self.values.len() != mesh.num_vertices() {
            return Err(Error::MeshMismatch {
                expected: mesh.num_vertices(),
                got: self.values.len(),
            });
        }
        Ok(())
    }

    pub fn axpy(&mut self, a: f64, x: &ScalarField) {
        for (v, &xi) in self.values.iter_mut().zip(&x.values) {
            *v += a * xi;
        }
    }

    /// Evaluate the P1 interpolant at an arbitrary point of the unit square.
    pub fn eval(&self, mesh: &TriMesh, p: [f64; 2]) -> f64 {
        let (tri, bary) = locate(mesh, p);
        let [a, b, c] = mesh.triangles[tri];
        bary[0] * self.values[a] + bary[1] * self.values[b] + bary[2] * self.values[c]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    /// Interleaved components: [u1_x, u1_y, u2_x, u2_y, ...].
    pub values: Vec<f64>,
}

impl VectorField {
    pub fn zeros(mesh: &TriMesh) -> Self {
        VectorField {
            values: vec![0.0; 2 * mesh.num_vertices()],
        }
    }

    pub fn from_fn(mesh: &TriMesh, f: impl Fn([f64; 2]) -> [f64; 2]) -> Self {
        let mut values = Vec::with_capacity(2 * mesh.num_vertices());
        for &p in &mesh.vertices {
            let v = f(p);
            values.push(v[0]);
            values.push(v[1]);
        }
        VectorField { values }
    }

    pub fn num_vertices(&self) -> usize {
        self.values.len() / 2
    }

    pub fn at(&self, vertex: usize) -> [f64; 2] {
        [self.values[2 * vertex], self.values[2 * vertex + 1]]
    }

    pub fn check_mesh(&self, mesh: &TriMesh) -> Result<()> {
        if self.values.len() != 2 * mesh.num_vertices() {
            return Err(Error::MeshMismatch {
                expected: mesh.num_vertices(),
                got: self.values.len() / 2,
            });
        }
        Ok(())
    }

    pub fn axpy(&mut self, a: f64, x: &VectorField) {
        for (v, &xi) in self.values.iter_mut().zip(&x.values) {
            *v += a * xi;
        }
    }

    pub fn eval(&self, mesh: &TriMesh, p: [f64; 2]) -> [f64; 2] {
        let (tri, bary) = locate(mesh, p);
        let [a, b, c] = mesh.triangles[tri];
        let mut out = [0.0; 2];
        for k in 0..2 {
            out[k] = bary[0] * self.values[2 * a + k]
                + bary[1] * self.values[2 * b + k]
                + bary[2] * self.values[2 * c + k];
        }
        out
    }

    /// Interpolate onto the vertices of another structured mesh.
    pub fn transfer_to(&self, from: &TriMesh, to: &TriMesh) -> VectorField {
        VectorField::from_fn(to, |p| self.eval(from, p))
    }
}

/// The unknown of the inverse problem: nodal (lambda, mu) in kPa.
#[derive(Debug, Clone, PartialEq)]
pub struct LameField {
    pub lambda: ScalarField,
    pub mu: ScalarField,
}

impl LameField {
    pub fn zeros(mesh: &TriMesh) -> Self {
        LameField {
            lambda: ScalarField::zeros(mesh),
            mu: ScalarField::zeros(mesh),
        }
    }

    pub fn constant(mesh: &TriMesh, lambda: f64, mu: f64) -> Self {
        LameField {
            lambda: ScalarField::constant(mesh, lambda),
            mu: ScalarField::constant(mesh, mu),
        }
    }

    pub fn check_mesh(&self, mesh: &TriMesh) -> Result<()> {
        self.lambda.check_mesh(mesh)?;
        self.mu.check_mesh(mesh)
    }

    pub fn axpy(&mut self, a: f64, x: &LameField) {
        self.lambda.axpy(a, &x.lambda);
        self.mu.axpy(a, &x.mu);
    }

    pub fn scaled(&self, a: f64) -> LameField {
        LameField {
            lambda: ScalarField {
                values: self.lambda.values.iter().map(|&v| a * v).collect(),
            },
            mu: ScalarField {
                values: self.mu.values.iter().map(|&v| a * v).collect(),
            },
        }
    }
}

/// Locate the triangle of a structured mesh containing `p` and return its
/// index together with barycentric coordinates. Points outside [0,1]^2 are
/// clamped to the square.
fn locate(mesh: &TriMesh, p: [f64; 2]) -> (usize, [f64; 3]) {
    let n = mesh.n;
    let x = p[0].clamp(0.0, 1.0) * n as f64;
    let y = p[1].clamp(0.0, 1.0) * n as f64;
    let i = (x.floor() as usize).min(n - 1);
    let j = (y.floor() as usize).min(n - 1);
    let fx = x - i as f64;
    let fy = y - j as f64;
    let cell = 2 * (j * n + i);
    // cell triangles: [a,b,c] covers fx >= fy, [a,c,d] covers fx <= fy
    if fx >= fy {
        (cell, [1.0 - fx, fx - fy, fy])
    } else {
        (cell + 1, [1.0 - fy, fx, fy - fx])
    }
}
