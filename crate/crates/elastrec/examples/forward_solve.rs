//! Solve the compression forward problem for a smooth phantom and export
//! the displacement field for an external viewer.
//!
//! Run with: cargo run --example forward_solve

use elastrec::io::write_vtk;
use elastrec::{
    build_unit_square_mesh, compose_phantom, BcMode, OperatorContext, OperatorMode,
    PhantomPreset, ProblemData, SmoothingConfig,
};

fn main() -> elastrec::Result<()> {
    let mesh = build_unit_square_mesh(32)?;
    let truth = compose_phantom(&PhantomPreset::Smooth.spec(), &mesh)?;

    // downward displacement of the top boundary, traction-free sides
    let data = ProblemData::compression(&mesh, -1e-4, BcMode::Mixed);
    let ctx = OperatorContext::new(mesh, data, SmoothingConfig::default(), OperatorMode::Full)?;

    let u = ctx.forward(&truth)?;
    println!("homogenized displacement: |u|_L2 = {:.6e}", ctx.l2_norm(&u));

    // physical displacement is u + Phi
    let mut physical = u.clone();
    physical.axpy(1.0, &ctx.data.phi);
    write_vtk(
        std::path::Path::new("forward_solve.vtk"),
        &ctx.mesh,
        &[("lambda_kpa", &truth.lambda), ("mu_kpa", &truth.mu)],
        &[("u_homogenized", &u), ("u_physical", &physical)],
    )?;
    println!("wrote forward_solve.vtk");
    Ok(())
}
