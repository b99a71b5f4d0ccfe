//! Numerical verification of the structural conditions behind the
//! convergence theory: adjoint consistency, derivative (Taylor) checks,
//! empirical tangential-cone ratios, and coercivity probes.

use crate::error::{Error, Result};
use crate::field::{LameField, ScalarField, VectorField};
use crate::mesh::TriMesh;
use crate::operator::OperatorContext;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// W^{1,inf}-style norm of one scalar P1 field: the larger of the nodal sup
/// and the elementwise gradient sup.
fn w1inf_scalar(mesh: &TriMesh, f: &ScalarField) -> f64 {
    let sup = f.values.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let mut grad_sup = 0.0f64;
    for t in 0..mesh.num_triangles() {
        let verts = mesh.triangles[t];
        let g = mesh.p1_gradients(t);
        let mut gx = 0.0;
        let mut gy = 0.0;
        for a in 0..3 {
            gx += g[a][0] * f.values[verts[a]];
            gy += g[a][1] * f.values[verts[a]];
        }
        grad_sup = grad_sup.max((gx * gx + gy * gy).sqrt());
    }
    sup.max(grad_sup)
}

/// Norm of the parameter pair: sum of the two fields' W^{1,inf} norms.
pub fn w1inf_norm(mesh: &TriMesh, field: &LameField) -> f64 {
    w1inf_scalar(mesh, &field.lambda) + w1inf_scalar(mesh, &field.mu)
}

#[derive(Debug, Clone)]
pub struct TccReport {
    /// Perturbation scales, decreasing.
    pub scales: Vec<f64>,
    /// W^{1,inf} size of each perturbation.
    pub sizes: Vec<f64>,
    /// ||F(x) - F(xb) - F'(x)(x - xb)|| / ||F(x) - F(xb)|| per scale.
    pub ratios: Vec<f64>,
    /// All ratios strictly below one.
    pub pass: bool,
}

/// Sweep the tangential-cone ratio over perturbation scales.
///
/// For each scale t the perturbed point is xb = P(x + t * direction) and the
/// ratio is computed from three independent operator evaluations. A ratio is
/// reported as zero when numerator and denominator both vanish.
pub fn tcc_sweep(
    ctx: &OperatorContext,
    x: &LameField,
    direction: &LameField,
    scales: &[f64],
) -> Result<TccReport> {
    let lin = ctx.linearize(x)?;
    let fx = &lin.u;
    let mut sizes = Vec::with_capacity(scales.len());
    let mut ratios = Vec::with_capacity(scales.len());
    for &t in scales {
        let mut xb = x.clone();
        xb.axpy(t, direction);
        let xb = ctx.project_admissible(&xb);
        let fxb = ctx.forward(&xb)?;

        let mut diff_param = x.clone();
        diff_param.axpy(-1.0, &xb);
        sizes.push(w1inf_norm(&ctx.mesh, &diff_param));

        let dfd = ctx.derivative(&lin, &diff_param)?;
        let mut num = fx.clone();
        num.axpy(-1.0, &fxb);
        num.axpy(-1.0, &dfd);
        let mut den = fx.clone();
        den.axpy(-1.0, &fxb);
        let den_norm = ctx.l2_norm(&den);
        let num_norm = ctx.l2_norm(&num);
        if den_norm == 0.0 {
            if num_norm == 0.0 {
                ratios.push(0.0);
            } else {
                return Err(Error::Config(format!(
                    "degenerate tangential-cone ratio at scale {t}: F(x) = F(xb) but nonzero remainder"
                )));
            }
        } else {
            ratios.push(num_norm / den_norm);
        }
    }
    let pass = ratios.iter().all(|&r| r < 1.0);
    Ok(TccReport {
        scales: scales.to_vec(),
        sizes,
        ratios,
        pass,
    })
}

/// Bump-shaped perturbation directions for the tangential-cone sweep,
/// supported strictly inside Omega_1 with a one-element collar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TccDirection {
    MuOnly,
    LambdaOnly,
    Both,
}

pub fn tcc_direction(ctx: &OperatorContext, which: TccDirection) -> LameField {
    let mesh = &ctx.mesh;
    let rect = ctx
        .data
        .omega1
        .unwrap_or(crate::operator::DEFAULT_OMEGA1)
        .shrunk(1.0 / mesh.n as f64);
    let bump = crate::phantom::BumpSpec {
        center: [0.5, 0.5],
        r1: 0.1,
        r2: 0.3,
        h1: 1.0,
        h2: 0.0,
    };
    let profile = ScalarField::from_fn(mesh, |p| {
        if rect.contains_open(p) {
            crate::phantom::eval_bump(&bump, p)
        } else {
            0.0
        }
    });
    let zero = ScalarField::zeros(mesh);
    match which {
        TccDirection::MuOnly => LameField {
            lambda: zero,
            mu: profile,
        },
        TccDirection::LambdaOnly => LameField {
            lambda: profile,
            mu: zero,
        },
        TccDirection::Both => LameField {
            lambda: profile.clone(),
            mu: profile,
        },
    }
}

/// Maximum relative duality gap |<F'h,w> - <h,F'*w>| / (||F'h|| ||w||) over
/// random trials.
pub fn adjoint_test(ctx: &OperatorContext, x: &LameField, trials: usize, seed: u64) -> Result<f64> {
    let lin = ctx.linearize(x)?;
    let mut rng = StdRng::seed_from_u64(seed);
    let nv = ctx.mesh.num_vertices();
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let h = LameField {
            lambda: ScalarField {
                values: (0..nv).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            },
            mu: ScalarField {
                values: (0..nv).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            },
        };
        let h = ctx.mask_to_omega1(&h);
        let w = VectorField {
            values: (0..2 * nv).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        };
        let dfh = ctx.derivative(&lin, &h)?;
        let lhs = ctx.l2_inner(&dfh, &w);
        let grad = ctx.adjoint(&lin, &w)?;
        let rhs = ctx.hs_inner(&h, &grad.field)?;
        let scale = ctx.l2_norm(&dfh) * ctx.l2_norm(&w);
        if scale > 0.0 {
            worst = worst.max((lhs - rhs).abs() / scale);
        }
    }
    Ok(worst)
}

/// Taylor remainder slope over a scale sweep; second-order differentiability
/// shows as a log-log slope near two.
pub fn taylor_test(
    ctx: &OperatorContext,
    x: &LameField,
    h: &LameField,
    scales: &[f64],
) -> Result<f64> {
    let lin = ctx.linearize(x)?;
    let dfh = ctx.derivative(&lin, h)?;
    let mut remainders = Vec::with_capacity(scales.len());
    for &t in scales {
        let mut xt = x.clone();
        xt.axpy(t, h);
        let fxt = ctx.forward(&xt)?;
        let mut rem = fxt;
        rem.axpy(-1.0, &lin.u);
        rem.axpy(-t, &dfh);
        remainders.push(ctx.l2_norm(&rem));
    }
    Ok(log_slope(scales, &remainders))
}

pub fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|&v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|&v| v.max(1e-300).ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(&a, &b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|&a| (a - mx) * (a - mx)).sum();
    num / den
}

/// SPD probe of the constrained stiffness matrix: conjugate gradients on a
/// random right-hand side must converge, which fails exactly when the
/// coefficient fields leave the coercive regime.
pub fn coercivity_test(ctx: &OperatorContext, lame: &LameField, seed: u64) -> Result<()> {
    let k = crate::fem::assemble_elasticity(&ctx.mesh, lame)?;
    let constraints = crate::fem::DirichletConstraints::for_mode(
        &ctx.mesh,
        ctx.data.bc == crate::operator::BcMode::PureDisplacement,
    );
    let mut rng = StdRng::seed_from_u64(seed);
    let rhs: Vec<f64> = (0..k.n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let (k_con, rhs_con) = crate::fem::apply_dirichlet(&k, &rhs, &constraints);
    crate::sparse::solve_spd(&k_con, &rhs_con, &Default::default()).map(|_| ())
}

/// Convergence-rate study against a manufactured solution; returns the
/// fitted L2-error rate in the mesh width.
pub fn manufactured_rate(ns: &[usize], lambda: f64, mu: f64) -> Result<f64> {
    use crate::operator::{BcMode, OperatorMode, ProblemData, SmoothingConfig};
    use std::f64::consts::PI;
    let mut hs = Vec::new();
    let mut errs = Vec::new();
    for &n in ns {
        let mesh = crate::mesh::build_unit_square_mesh(n)?;
        // exact solution (sin(pi x1) sin(pi x2), 0), zero on the boundary
        let f = VectorField::from_fn(&mesh, |p| {
            let s = (PI * p[0]).sin() * (PI * p[1]).sin();
            let c = (PI * p[0]).cos() * (PI * p[1]).cos();
            [
                PI * PI * (lambda + 3.0 * mu) * s,
                -(lambda + mu) * PI * PI * c,
            ]
        });
        let data = ProblemData {
            f: Some(f),
            g_t: None,
            phi: VectorField::zeros(&mesh),
            bc: BcMode::PureDisplacement,
            mu_floor: 0.01,
            background: None,
            omega1: None,
        };
        let ctx = OperatorContext::new(mesh, data, SmoothingConfig::default(), OperatorMode::Full)?;
        let u = ctx.forward(&LameField::constant(&ctx.mesh, lambda, mu))?;
        let exact = VectorField::from_fn(&ctx.mesh, |p| {
            [(PI * p[0]).sin() * (PI * p[1]).sin(), 0.0]
        });
        let mut err = u;
        err.axpy(-1.0, &exact);
        hs.push(1.0 / n as f64);
        errs.push(ctx.l2_norm(&err));
    }
    Ok(log_slope(&hs, &errs))
}
