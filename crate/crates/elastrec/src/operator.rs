//! The parameter-to-solution operator, its derivative and adjoint.
//!
//! Given Lame fields (lambda, mu), the forward map solves the homogenized
//! elasticity problem a_{lambda,mu}(u,v) = l(v) - a_{lambda,mu}(Phi,v) on the
//! zero-Dirichlet subspace; the physical displacement is u + Phi.
//!
//! The derivative in a direction (h_lambda, h_mu) is one extra solve with the
//! perturbation-induced load, and the adjoint maps an L2 residual w back to
//! parameter space through one elasticity solve, elementwise products of
//! divergences and strains, and a Sobolev smoothing step.
//!
//! Smoothing realizes the H^s Riesz map for s = 2 by m = 2 successive
//! (M + K) solves with the scalar mass and stiffness matrices. The discrete
//! H^s inner product induced by this realization is <a, b> = (Ba)' M^{-1} (Bb)
//! with B = M + K, so derivative and adjoint are exactly dual at the discrete
//! level.

use crate::error::{Error, Result};
use crate::fem::{
    apply_dirichlet, assemble_elasticity, assemble_load, assemble_scalar_mass,
    assemble_scalar_stiffness, assemble_vector_mass, mass_inner, DirichletConstraints,
};
use crate::field::{LameField, ScalarField, VectorField};
use crate::mesh::{Box2, TriMesh};
use crate::sparse::{dot, solve_spd, CgOptions, CsrMatrix};

pub const DIM: usize = 2;

/// Default compact-support subdomain, a slightly smaller square than Omega.
pub const DEFAULT_OMEGA1: Box2 = Box2 {
    x0: 0.05,
    x1: 0.95,
    y0: 0.05,
    y1: 0.95,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcMode {
    /// Dirichlet on bottom/top, traction-free sides.
    Mixed,
    /// Dirichlet on the whole boundary.
    PureDisplacement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorMode {
    /// Reconstruct (lambda, mu) directly.
    Full,
    /// Reconstruct compactly supported deviations from a known background.
    Compact,
}

#[derive(Debug, Clone, Copy)]
pub struct SmoothingConfig {
    /// Sobolev order; must exceed N/2 = 1.
    pub s: f64,
    /// Number of (M + K) solves realizing the Riesz map.
    pub m: usize,
}

impl SmoothingConfig {
    pub fn new(s: f64) -> Self {
        SmoothingConfig {
            s,
            m: s.ceil() as usize,
        }
    }
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        SmoothingConfig::new(2.0)
    }
}

/// Loads, boundary data and admissibility information of one experiment.
#[derive(Debug, Clone)]
pub struct ProblemData {
    pub f: Option<VectorField>,
    pub g_t: Option<VectorField>,
    /// Homogenizer: any H1 field matching the Dirichlet data on Gamma_D.
    pub phi: VectorField,
    pub bc: BcMode,
    /// Admissibility floor mu_b > 0.
    pub mu_floor: f64,
    /// Known background (lambda_b, mu_b fields), required in compact mode.
    pub background: Option<LameField>,
    /// Support subdomain Omega_1 for the compact mode.
    pub omega1: Option<Box2>,
}

impl ProblemData {
    /// The paper-style experiment: no body force, zero traction, downward
    /// displacement c_p applied on top, Phi(x) = (0, c_p x2).
    pub fn compression(mesh: &TriMesh, c_p: f64, bc: BcMode) -> Self {
        ProblemData {
            f: None,
            g_t: None,
            phi: VectorField::from_fn(mesh, |p| [0.0, c_p * p[1]]),
            bc,
            mu_floor: 0.01,
            background: None,
            omega1: None,
        }
    }
}

/// Per-mesh context with precomputed matrices and constraints.
pub struct OperatorContext {
    pub mesh: TriMesh,
    pub data: ProblemData,
    pub smoothing: SmoothingConfig,
    pub mode: OperatorMode,
    pub solver_tol: f64,
    constraints: DirichletConstraints,
    load: Vec<f64>,
    mass_scalar: CsrMatrix,
    b_scalar: CsrMatrix,
    mass_vector: CsrMatrix,
    omega1_inside: Option<Vec<bool>>,
    /// Compact mode only: scalar mass and (M + K) with all vertices outside
    /// Omega_1 eliminated, realizing the Riesz map of the subspace of
    /// compactly supported parameter fields. Smoothing globally and masking
    /// afterwards would cut the field at the Omega_1 boundary, which both
    /// breaks the derivative/adjoint duality and blows up the H^s norm.
    mass_compact: Option<CsrMatrix>,
    b_compact: Option<CsrMatrix>,
}

/// Cached linearization point: constrained stiffness and forward solution.
pub struct Linearization {
    k_con: CsrMatrix,
    /// Homogenized solution u (zero on Gamma_D).
    pub u: VectorField,
    u_plus_phi: Vec<f64>,
}

/// Adjoint output together with the E_s load vectors that generated it.
pub struct AdjointGradient {
    pub field: LameField,
    pub load_lambda: Vec<f64>,
    pub load_mu: Vec<f64>,
}

impl OperatorContext {
    pub fn new(
        mesh: TriMesh,
        data: ProblemData,
        smoothing: SmoothingConfig,
        mode: OperatorMode,
    ) -> Result<Self> {
        data.phi.check_mesh(&mesh)?;
        if smoothing.s <= DIM as f64 / 2.0 {
            return Err(Error::Config(format!(
                "smoothing order s = {} must exceed N/2 = 1",
                smoothing.s
            )));
        }
        if data.mu_floor <= 0.0 {
            return Err(Error::Config("mu_floor must be positive".into()));
        }
        if mode == OperatorMode::Compact && data.background.is_none() {
            return Err(Error::MissingBackground);
        }
        let constraints =
            DirichletConstraints::for_mode(&mesh, data.bc == BcMode::PureDisplacement);
        let load = assemble_load(&mesh, data.f.as_ref(), data.g_t.as_ref())?;
        let mass_scalar = assemble_scalar_mass(&mesh);
        let stiff_scalar = assemble_scalar_stiffness(&mesh);
        let b_scalar = mass_scalar.add(&stiff_scalar);
        let mass_vector = assemble_vector_mass(&mesh);
        let (omega1_inside, mass_compact, b_compact) = if mode == OperatorMode::Compact {
            let rect = data.omega1.unwrap_or(DEFAULT_OMEGA1);
            let mut mask = vec![false; mesh.num_vertices()];
            for (i, &p) in mesh.vertices.iter().enumerate() {
                mask[i] = rect.contains_open(p);
            }
            let outside: Vec<usize> = (0..mesh.num_vertices()).filter(|&i| !mask[i]).collect();
            let con = DirichletConstraints {
                values: vec![0.0; outside.len()],
                dofs: outside,
            };
            let zero = vec![0.0; mesh.num_vertices()];
            let (m1, _) = apply_dirichlet(&mass_scalar, &zero, &con);
            let (b1, _) = apply_dirichlet(&b_scalar, &zero, &con);
            (Some(mask), Some(m1), Some(b1))
        } else {
            (None, None, None)
        };
        Ok(OperatorContext {
            mesh,
            data,
            smoothing,
            mode,
            solver_tol: 1e-12,
            constraints,
            load,
            mass_scalar,
            b_scalar,
            mass_vector,
            omega1_inside,
            mass_compact,
            b_compact,
        })
    }

    fn cg_opts(&self) -> CgOptions {
        CgOptions::with_tol(self.solver_tol, 2 * self.mesh.num_vertices())
    }

    /// Zero a parameter field outside Omega_1 (no-op in full mode).
    pub fn mask_to_omega1(&self, x: &LameField) -> LameField {
        match &self.omega1_inside {
            None => x.clone(),
            Some(mask) => {
                let apply = |f: &ScalarField| ScalarField {
                    values: f
                        .values
                        .iter()
                        .zip(mask)
                        .map(|(&v, &m)| if m { v } else { 0.0 })
                        .collect(),
                };
                LameField {
                    lambda: apply(&x.lambda),
                    mu: apply(&x.mu),
                }
            }
        }
    }

    /// Add the known background to a compactly supported deviation.
    pub fn lift_background(&self, delta: &LameField) -> Result<LameField> {
        let bg = self.data.background.as_ref().ok_or(Error::MissingBackground)?;
        let mut lifted = self.mask_to_omega1(delta);
        lifted.axpy(1.0, bg);
        Ok(lifted)
    }

    /// Effective Lame fields entering the PDE for an iterate `x`.
    pub fn effective_lame(&self, x: &LameField) -> Result<LameField> {
        match self.mode {
            OperatorMode::Full => Ok(x.clone()),
            OperatorMode::Compact => self.lift_background(x),
        }
    }

    /// Vertexwise clipping onto the admissible set; idempotent.
    pub fn project_admissible(&self, x: &LameField) -> LameField {
        match self.mode {
            OperatorMode::Full => {
                let lambda = ScalarField {
                    values: x.lambda.values.iter().map(|&v| v.max(0.0)).collect(),
                };
                let mu = ScalarField {
                    values: x
                        .mu
                        .values
                        .iter()
                        .map(|&v| v.max(self.data.mu_floor))
                        .collect(),
                };
                LameField { lambda, mu }
            }
            OperatorMode::Compact => {
                let bg = self.data.background.as_ref().expect("checked at build");
                let masked = self.mask_to_omega1(x);
                let lambda = ScalarField {
                    values: masked
                        .lambda
                        .values
                        .iter()
                        .zip(&bg.lambda.values)
                        .map(|(&v, &lb)| v.max(-lb))
                        .collect(),
                };
                let mu = ScalarField {
                    values: masked
                        .mu
                        .values
                        .iter()
                        .zip(&bg.mu.values)
                        .map(|(&v, &mb)| v.max(self.data.mu_floor - mb))
                        .collect(),
                };
                self.mask_to_omega1(&LameField { lambda, mu })
            }
        }
    }

    /// Constrained stiffness plus forward solution at `x`.
    pub fn linearize(&self, x: &LameField) -> Result<Linearization> {
        let lame = self.effective_lame(x)?;
        let k = assemble_elasticity(&self.mesh, &lame)?;
        let mut rhs = self.load.clone();
        let k_phi = k.mul_vec_alloc(&self.data.phi.values);
        for (r, &kp) in rhs.iter_mut().zip(&k_phi) {
            *r -= kp;
        }
        let (k_con, rhs_con) = apply_dirichlet(&k, &rhs, &self.constraints);
        let u = solve_spd(&k_con, &rhs_con, &self.cg_opts())?;
        let mut u_plus_phi = u.clone();
        for (v, &p) in u_plus_phi.iter_mut().zip(&self.data.phi.values) {
            *v += p;
        }
        Ok(Linearization {
            k_con,
            u: VectorField { values: u },
            u_plus_phi,
        })
    }

    /// The operator value F(x): homogenized displacement on this mesh.
    pub fn forward(&self, x: &LameField) -> Result<VectorField> {
        Ok(self.linearize(x)?.u)
    }

    /// Directional derivative F'(x) h via the cached linearization.
    pub fn derivative(&self, lin: &Linearization, h: &LameField) -> Result<VectorField> {
        let h_eff = self.mask_to_omega1(h);
        let k_h = assemble_elasticity(&self.mesh, &h_eff)?;
        let mut rhs = k_h.mul_vec_alloc(&lin.u_plus_phi);
        for v in rhs.iter_mut() {
            *v = -*v;
        }
        for &d in &self.constraints.dofs {
            rhs[d] = 0.0;
        }
        let x = solve_spd(&lin.k_con, &rhs, &self.cg_opts())?;
        Ok(VectorField { values: x })
    }

    /// Adjoint F'(x)* w: one elasticity solve, elementwise products, then
    /// Sobolev smoothing of both components. In compact mode the smoothing
    /// runs on Omega_1 with zero boundary values, so the output is
    /// compactly supported by construction.
    pub fn adjoint(&self, lin: &Linearization, w: &VectorField) -> Result<AdjointGradient> {
        w.check_mesh(&self.mesh)?;
        // step 2: u(w) solves a(u(w), v) = int w . v
        let mut rhs = self.mass_vector.mul_vec_alloc(&w.values);
        for &d in &self.constraints.dofs {
            rhs[d] = 0.0;
        }
        let u_w = solve_spd(&lin.k_con, &rhs, &self.cg_opts())?;

        // step 3: elementwise products of divergences and strains
        let nt = self.mesh.num_triangles();
        let mut u1 = vec![0.0; nt];
        let mut u2 = vec![0.0; nt];
        for t in 0..nt {
            let (div_u, eps_u) = element_strain(&self.mesh, t, &lin.u_plus_phi);
            let (div_w, eps_w) = element_strain(&self.mesh, t, &u_w);
            u1[t] = -div_u * div_w;
            u2[t] = -2.0
                * (eps_u[0] * eps_w[0] + eps_u[1] * eps_w[1] + 2.0 * eps_u[2] * eps_w[2]);
        }

        // steps 4-5: E_s applied to each component
        let load_lambda = self.element_load(&u1);
        let load_mu = self.element_load(&u2);
        let lambda = self.riesz_solve(&load_lambda)?;
        let mu = self.riesz_solve(&load_mu)?;
        let field = self.mask_to_omega1(&LameField { lambda, mu });
        Ok(AdjointGradient {
            field,
            load_lambda,
            load_mu,
        })
    }

    /// Load vector b_i = int g phi_i for piecewise-constant element data.
    pub fn element_load(&self, g: &[f64]) -> Vec<f64> {
        assert_eq!(g.len(), self.mesh.num_triangles());
        let mut b = vec![0.0; self.mesh.num_vertices()];
        for (t, &gt) in g.iter().enumerate() {
            let w = gt * self.mesh.area(t) / 3.0;
            for &v in &self.mesh.triangles[t] {
                b[v] += w;
            }
        }
        b
    }

    /// Discrete Riesz-map inversion: m successive (M + K) solves, the first
    /// against the load, each subsequent one against M times the previous
    /// solution.
    pub fn smooth_embed(&self, g: &[f64]) -> Result<ScalarField> {
        let load = self.element_load(g);
        self.riesz_solve(&load)
    }

    /// Scalar mass and (M + K) entering the smoothing: restricted to
    /// Omega_1 in compact mode, global otherwise.
    fn smoothing_matrices(&self) -> (&CsrMatrix, &CsrMatrix) {
        match (&self.mass_compact, &self.b_compact) {
            (Some(m), Some(b)) => (m, b),
            _ => (&self.mass_scalar, &self.b_scalar),
        }
    }

    fn riesz_solve(&self, load: &[f64]) -> Result<ScalarField> {
        let opts = CgOptions::with_tol(self.solver_tol, self.mesh.num_vertices());
        let (mass, b_mat) = self.smoothing_matrices();
        let mut rhs = load.to_vec();
        if let Some(mask) = &self.omega1_inside {
            for (r, &inside) in rhs.iter_mut().zip(mask) {
                if !inside {
                    *r = 0.0;
                }
            }
        }
        let mut x = solve_spd(b_mat, &rhs, &opts)?;
        for _ in 1..self.smoothing.m {
            let rhs = mass.mul_vec_alloc(&x);
            x = solve_spd(b_mat, &rhs, &opts)?;
        }
        Ok(ScalarField { values: x })
    }

    /// Discrete H^s inner product induced by the smoothing realization:
    /// per component (Ba)' M^{-1} (Bb), with the restricted matrices in
    /// compact mode.
    pub fn hs_inner(&self, a: &LameField, b: &LameField) -> Result<f64> {
        let opts = CgOptions::with_tol(self.solver_tol, self.mesh.num_vertices());
        let (mass, b_mat) = self.smoothing_matrices();
        let mut total = 0.0;
        for (fa, fb) in [(&a.lambda, &b.lambda), (&a.mu, &b.mu)] {
            let ba = b_mat.mul_vec_alloc(&fa.values);
            let bb = b_mat.mul_vec_alloc(&fb.values);
            let z = solve_spd(mass, &bb, &opts)?;
            total += dot(&ba, &z);
        }
        Ok(total)
    }

    pub fn hs_norm_sq(&self, a: &LameField) -> Result<f64> {
        self.hs_inner(a, a)
    }

    /// L2(Omega)^2 inner product of displacement fields (mass matrix, not
    /// the Euclidean dof product).
    pub fn l2_inner(&self, a: &VectorField, b: &VectorField) -> f64 {
        mass_inner(&self.mass_vector, &a.values, &b.values)
    }

    pub fn l2_norm(&self, a: &VectorField) -> f64 {
        self.l2_inner(a, a).max(0.0).sqrt()
    }

    pub fn l2_norm_scalar(&self, a: &ScalarField) -> f64 {
        mass_inner(&self.mass_scalar, &a.values, &a.values)
            .max(0.0)
            .sqrt()
    }
}

/// Divergence and strain (eps_xx, eps_yy, eps_xy) of a P1 displacement on one
/// triangle; constant per element.
pub fn element_strain(mesh: &TriMesh, tri: usize, dofs: &[f64]) -> (f64, [f64; 3]) {
    let verts = mesh.triangles[tri];
    let g = mesh.p1_gradients(tri);
    let mut grad = [[0.0f64; 2]; 2]; // grad[p][q] = d u_p / d x_q
    for a in 0..3 {
        for p in 0..2 {
            let val = dofs[2 * verts[a] + p];
            for q in 0..2 {
                grad[p][q] += g[a][q] * val;
            }
        }
    }
    let div = grad[0][0] + grad[1][1];
    let eps = [grad[0][0], grad[1][1], 0.5 * (grad[0][1] + grad[1][0])];
    (div, eps)
}

/// Weighted sup-distance on parameter pairs: N max|dlambda| + 2 max|dmu|.
pub fn weighted_param_distance(a: &LameField, b: &LameField) -> Result<f64> {
    if a.lambda.len() != b.lambda.len() {
        return Err(Error::MeshMismatch {
            expected: a.lambda.len(),
            got: b.lambda.len(),
        });
    }
    let max_abs = |x: &[f64], y: &[f64]| {
        x.iter()
            .zip(y)
            .fold(0.0f64, |m, (&xi, &yi)| m.max((xi - yi).abs()))
    };
    Ok(DIM as f64 * max_abs(&a.lambda.values, &b.lambda.values)
        + 2.0 * max_abs(&a.mu.values, &b.mu.values))
}
