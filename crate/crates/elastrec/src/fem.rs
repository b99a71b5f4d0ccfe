//! P1 finite element assembly for linearized elasticity on triangle meshes.
//!
//! The bilinear form is
//!   a_{lambda,mu}(u,v) = int lambda div(u) div(v) + 2 mu eps(u):eps(v),
//! with the coefficient fields interpolated P1 and integrated by one-point
//! centroid quadrature using the P1 mean per element, which is exact since
//! P1 displacement gradients are elementwise constant.
//!
//! Degrees of freedom are interleaved: vertex v owns dofs 2v (x) and 2v+1 (y).

use crate::error::Result;
use crate::field::{LameField, VectorField};
use crate::mesh::TriMesh;
use crate::sparse::{CsrMatrix, Triplets};

/// Stiffness matrix of the elasticity bilinear form, 2nv x 2nv.
pub fn assemble_elasticity(mesh: &TriMesh, lame: &LameField) -> Result<CsrMatrix> {
    lame.check_mesh(mesh)?;
    let nv = mesh.num_vertices();
    let mut t = Triplets::new(2 * nv);
    for tri in 0..mesh.num_triangles() {
        let verts = mesh.triangles[tri];
        let g = mesh.p1_gradients(tri);
        let area = mesh.area(tri);
        let lam = verts.iter().map(|&v| lame.lambda.values[v]).sum::<f64>() / 3.0;
        let mu = verts.iter().map(|&v| lame.mu.values[v]).sum::<f64>() / 3.0;
        for a in 0..3 {
            for b in 0..3 {
                let gdot = g[a][0] * g[b][0] + g[a][1] * g[b][1];
                for p in 0..2 {
                    for q in 0..2 {
                        let delta = if p == q { 1.0 } else { 0.0 };
                        let val = area
                            * (lam * g[a][p] * g[b][q]
                                + mu * (delta * gdot + g[a][q] * g[b][p]));
                        t.push(2 * verts[a] + p, 2 * verts[b] + q, val);
                    }
                }
            }
        }
    }
    Ok(t.into_csr())
}

/// P1 scalar mass matrix, nv x nv.
pub fn assemble_scalar_mass(mesh: &TriMesh) -> CsrMatrix {
    let mut t = Triplets::new(mesh.num_vertices());
    for tri in 0..mesh.num_triangles() {
        let verts = mesh.triangles[tri];
        let w = mesh.area(tri) / 12.0;
        for a in 0..3 {
            for b in 0..3 {
                let val = if a == b { 2.0 * w } else { w };
                t.push(verts[a], verts[b], val);
            }
        }
    }
    t.into_csr()
}

/// P1 scalar stiffness (Laplacian) matrix, nv x nv.
pub fn assemble_scalar_stiffness(mesh: &TriMesh) -> CsrMatrix {
    let mut t = Triplets::new(mesh.num_vertices());
    for tri in 0..mesh.num_triangles() {
        let verts = mesh.triangles[tri];
        let g = mesh.p1_gradients(tri);
        let area = mesh.area(tri);
        for a in 0..3 {
            for b in 0..3 {
                t.push(
                    verts[a],
                    verts[b],
                    area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]),
                );
            }
        }
    }
    t.into_csr()
}

/// Vector-valued P1 mass matrix, 2nv x 2nv (block diagonal in components).
pub fn assemble_vector_mass(mesh: &TriMesh) -> CsrMatrix {
    let mut t = Triplets::new(2 * mesh.num_vertices());
    for tri in 0..mesh.num_triangles() {
        let verts = mesh.triangles[tri];
        let w = mesh.area(tri) / 12.0;
        for a in 0..3 {
            for b in 0..3 {
                let val = if a == b { 2.0 * w } else { w };
                for p in 0..2 {
                    t.push(2 * verts[a] + p, 2 * verts[b] + p, val);
                }
            }
        }
    }
    t.into_csr()
}

/// Discrete linear form l(v) = <f,v> + <g_T,v>_{Gamma_T}.
///
/// The volume term uses the consistent P1 mass quadrature; the traction term
/// integrates the P1 edge interpolant of `g_t` over traction-tagged edges.
pub fn assemble_load(
    mesh: &TriMesh,
    f: Option<&VectorField>,
    g_t: Option<&VectorField>,
) -> Result<Vec<f64>> {
    let mut rhs = vec![0.0; 2 * mesh.num_vertices()];
    if let Some(f) = f {
        f.check_mesh(mesh)?;
        for tri in 0..mesh.num_triangles() {
            let verts = mesh.triangles[tri];
            let w = mesh.area(tri) / 12.0;
            for a in 0..3 {
                for p in 0..2 {
                    let mut acc = 0.0;
                    for b in 0..3 {
                        let coef = if a == b { 2.0 } else { 1.0 };
                        acc += coef * f.values[2 * verts[b] + p];
                    }
                    rhs[2 * verts[a] + p] += w * acc;
                }
            }
        }
    }
    if let Some(g) = g_t {
        g.check_mesh(mesh)?;
        for &(edge, tag) in &mesh.boundary_edges {
            if tag.is_dirichlet() {
                continue;
            }
            let pa = mesh.vertices[edge[0]];
            let pb = mesh.vertices[edge[1]];
            let len = ((pb[0] - pa[0]).powi(2) + (pb[1] - pa[1]).powi(2)).sqrt();
            for p in 0..2 {
                let ga = g.values[2 * edge[0] + p];
                let gb = g.values[2 * edge[1] + p];
                rhs[2 * edge[0] + p] += len / 6.0 * (2.0 * ga + gb);
                rhs[2 * edge[1] + p] += len / 6.0 * (ga + 2.0 * gb);
            }
        }
    }
    Ok(rhs)
}

#[derive(Debug, Clone)]
pub struct DirichletConstraints {
    /// Constrained dof indices, sorted and unique.
    pub dofs: Vec<usize>,
    /// Prescribed values, zero after homogenization.
    pub values: Vec<f64>,
}

impl DirichletConstraints {
    /// Constrain both displacement components of the given vertices to zero.
    pub fn zero_at_vertices(vertices: &[usize]) -> Self {
        let mut dofs: Vec<usize> = vertices
            .iter()
            .flat_map(|&v| [2 * v, 2 * v + 1])
            .collect();
        dofs.sort_unstable();
        dofs.dedup();
        let values = vec![0.0; dofs.len()];
        DirichletConstraints { dofs, values }
    }

    /// Dirichlet dof set for the experiment geometry.
    pub fn for_mode(mesh: &TriMesh, pure_displacement: bool) -> Self {
        let verts = if pure_displacement {
            mesh.boundary_vertices()
        } else {
            mesh.dirichlet_vertices()
        };
        Self::zero_at_vertices(&verts)
    }

    pub fn is_constrained(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &d in &self.dofs {
            mask[d] = true;
        }
        mask
    }
}

/// Symmetric elimination of Dirichlet constraints.
///
/// Constrained rows and columns are zeroed, the diagonal set to 1, the rhs
/// entry set to the prescribed value, and couplings moved to the rhs. The
/// result stays SPD for admissible coefficient fields.
pub fn apply_dirichlet(
    k: &CsrMatrix,
    rhs: &[f64],
    constraints: &DirichletConstraints,
) -> (CsrMatrix, Vec<f64>) {
    let n = k.n;
    let mask = constraints.is_constrained(n);
    let mut value_of = vec![0.0; n];
    for (&d, &v) in constraints.dofs.iter().zip(&constraints.values) {
        value_of[d] = v;
    }

    let mut out_rhs = rhs.to_vec();
    let mut t = Triplets::new(n);
    for r in 0..n {
        if mask[r] {
            t.push(r, r, 1.0);
            continue;
        }
        for idx in k.row_ptr[r]..k.row_ptr[r + 1] {
            let c = k.col_idx[idx];
            let v = k.values[idx];
            if mask[c] {
                out_rhs[r] -= v * value_of[c];
            } else {
                t.push(r, c, v);
            }
        }
    }
    for &d in &constraints.dofs {
        out_rhs[d] = value_of[d];
    }
    (t.into_csr(), out_rhs)
}

/// Traction-tagged edges of the mesh (for inspection and export).
pub fn traction_edges(mesh: &TriMesh) -> Vec<[usize; 2]> {
    mesh.boundary_edges
        .iter()
        .filter(|(_, tag)| !tag.is_dirichlet())
        .map(|&(e, _)| e)
        .collect()
}

/// L2 inner product of two dof vectors through a precomputed mass matrix.
pub fn mass_inner(mass: &CsrMatrix, a: &[f64], b: &[f64]) -> f64 {
    let ma = mass.mul_vec_alloc(a);
    crate::sparse::dot(&ma, b)
}

pub fn mass_norm(mass: &CsrMatrix, a: &[f64]) -> f64 {
    mass_inner(mass, a, a).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ScalarField;
    use crate::mesh::build_unit_square_mesh;
    use crate::sparse::dot;

    fn energy(k: &CsrMatrix, u: &[f64]) -> f64 {
        dot(&k.mul_vec_alloc(u), u)
    }

    #[test]
    fn zero_coefficients_give_zero_matrix() {
        let m = build_unit_square_mesh(3).unwrap();
        let k = assemble_elasticity(&m, &LameField::zeros(&m)).unwrap();
        assert!(k.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_strain_energy() {
        // u(x) = (x1, 0): div u = 1, ||eps||_F^2 = 1, energy = lambda + 2 mu
        let m = build_unit_square_mesh(4).unwrap();
        let (lam, mu) = (1.7, 0.45);
        let k = assemble_elasticity(&m, &LameField::constant(&m, lam, mu)).unwrap();
        let u = VectorField::from_fn(&m, |p| [p[0], 0.0]);
        assert!((energy(&k, &u.values) - (lam + 2.0 * mu)).abs() < 1e-12);
    }

    #[test]
    fn rigid_rotation_has_zero_energy() {
        let m = build_unit_square_mesh(4).unwrap();
        let k = assemble_elasticity(&m, &LameField::constant(&m, 2.0, 0.3)).unwrap();
        let u = VectorField::from_fn(&m, |p| [-p[1], p[0]]);
        assert!(energy(&k, &u.values).abs() < 1e-12);
    }

    #[test]
    fn kernel_is_rigid_body_space() {
        let m = build_unit_square_mesh(5).unwrap();
        let k = assemble_elasticity(&m, &LameField::constant(&m, 1.0, 1.0)).unwrap();
        let tx = VectorField::from_fn(&m, |_| [1.0, 0.0]);
        let ty = VectorField::from_fn(&m, |_| [0.0, 1.0]);
        let rot = VectorField::from_fn(&m, |p| [-p[1], p[0]]);
        for v in [&tx, &ty, &rot] {
            assert!(energy(&k, &v.values).abs() < 1e-12);
        }
        let strain = VectorField::from_fn(&m, |p| [p[0], 0.0]);
        assert!(energy(&k, &strain.values) > 1e-3);
    }

    #[test]
    fn assembly_is_linear_in_coefficients() {
        let m = build_unit_square_mesh(3).unwrap();
        let l1 = LameField {
            lambda: ScalarField::from_fn(&m, |p| 1.0 + p[0]),
            mu: ScalarField::from_fn(&m, |p| 0.5 + p[1]),
        };
        let l2 = LameField {
            lambda: ScalarField::from_fn(&m, |p| 2.0 - p[1]),
            mu: ScalarField::from_fn(&m, |p| 0.3 + p[0] * p[1]),
        };
        let mut sum = l1.clone();
        sum.axpy(1.0, &l2);
        let k1 = assemble_elasticity(&m, &l1).unwrap();
        let k2 = assemble_elasticity(&m, &l2).unwrap();
        let ks = assemble_elasticity(&m, &sum).unwrap();
        for r in 0..ks.n {
            for idx in ks.row_ptr[r]..ks.row_ptr[r + 1] {
                let c = ks.col_idx[idx];
                assert!((ks.values[idx] - (k1.get(r, c) + k2.get(r, c))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn assembled_matrix_is_symmetric() {
        let m = build_unit_square_mesh(4).unwrap();
        let lame = LameField {
            lambda: ScalarField::from_fn(&m, |p| 1.0 + p[0] + p[1]),
            mu: ScalarField::from_fn(&m, |p| 0.4 + 0.1 * p[0]),
        };
        let k = assemble_elasticity(&m, &lame).unwrap();
        assert!(k.asymmetry() < 1e-14);
    }

    #[test]
    fn load_zero_data_is_zero() {
        let m = build_unit_square_mesh(3).unwrap();
        let rhs = assemble_load(&m, None, None).unwrap();
        assert!(rhs.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_body_force_total() {
        // f = (0,-1): vertical load components sum to -|Omega| = -1
        let m = build_unit_square_mesh(6).unwrap();
        let f = VectorField::from_fn(&m, |_| [0.0, -1.0]);
        let rhs = assemble_load(&m, Some(&f), None).unwrap();
        let total_y: f64 = rhs.iter().skip(1).step_by(2).sum();
        let total_x: f64 = rhs.iter().step_by(2).sum();
        assert!((total_y + 1.0).abs() < 1e-12);
        assert!(total_x.abs() < 1e-12);
    }

    #[test]
    fn traction_on_sides_total() {
        // g_T = (1,0) everywhere; traction edges are both sides, length 2 total
        let m = build_unit_square_mesh(4).unwrap();
        let g = VectorField::from_fn(&m, |_| [1.0, 0.0]);
        let rhs = assemble_load(&m, None, Some(&g)).unwrap();
        let total_x: f64 = rhs.iter().step_by(2).sum();
        assert!((total_x - 2.0).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_no_constraints_unchanged() {
        let m = build_unit_square_mesh(2).unwrap();
        let k = assemble_elasticity(&m, &LameField::constant(&m, 1.0, 1.0)).unwrap();
        let rhs: Vec<f64> = (0..k.n).map(|i| i as f64).collect();
        let empty = DirichletConstraints {
            dofs: vec![],
            values: vec![],
        };
        let (k2, rhs2) = apply_dirichlet(&k, &rhs, &empty);
        assert_eq!(rhs, rhs2);
        for r in 0..k.n {
            for idx in k.row_ptr[r]..k.row_ptr[r + 1] {
                let c = k.col_idx[idx];
                assert_eq!(k.values[idx], k2.get(r, c));
            }
        }
    }

    #[test]
    fn dirichlet_all_constrained_gives_identity() {
        let m = build_unit_square_mesh(2).unwrap();
        let k = assemble_elasticity(&m, &LameField::constant(&m, 1.0, 1.0)).unwrap();
        let rhs = vec![3.0; k.n];
        let all: Vec<usize> = (0..m.num_vertices()).collect();
        let constraints = DirichletConstraints::zero_at_vertices(&all);
        let (k2, rhs2) = apply_dirichlet(&k, &rhs, &constraints);
        assert!(rhs2.iter().all(|&v| v == 0.0));
        for r in 0..k2.n {
            for c in 0..k2.n {
                assert_eq!(k2.get(r, c), if r == c { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn constrained_dof_is_exact_in_solution() {
        let m = build_unit_square_mesh(3).unwrap();
        let k = assemble_elasticity(&m, &LameField::constant(&m, 2.0, 0.3)).unwrap();
        let f = VectorField::from_fn(&m, |p| [p[0], -1.0]);
        let rhs = assemble_load(&m, Some(&f), None).unwrap();
        // two pinned vertices remove all rigid motions
        let constraints = DirichletConstraints::zero_at_vertices(&[0, 5]);
        let (k2, rhs2) = apply_dirichlet(&k, &rhs, &constraints);
        let x = crate::sparse::solve_spd(&k2, &rhs2, &Default::default()).unwrap();
        assert_eq!(x[10], 0.0);
        assert_eq!(x[11], 0.0);
    }

    #[test]
    fn spd_after_constraints_for_admissible_fields() {
        let m = build_unit_square_mesh(4).unwrap();
        let lame = LameField {
            lambda: ScalarField::from_fn(&m, |p| p[0]),
            mu: ScalarField::from_fn(&m, |p| 0.3 + 0.2 * p[1]),
        };
        let k = assemble_elasticity(&m, &lame).unwrap();
        let rhs: Vec<f64> = (0..k.n).map(|i| (i % 7) as f64 - 3.0).collect();
        let constraints = DirichletConstraints::for_mode(&m, false);
        let (k2, rhs2) = apply_dirichlet(&k, &rhs, &constraints);
        assert!(crate::sparse::solve_spd(&k2, &rhs2, &Default::default()).is_ok());
    }
}
