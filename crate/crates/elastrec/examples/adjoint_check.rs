//! Verify the discrete duality between the derivative and its adjoint:
//! <F'(x)h, w>_L2 must equal <h, F'(x)* w>_Hs for random h and w.
//!
//! Run with: cargo run --example adjoint_check

use elastrec::diagnostics::adjoint_test;
use elastrec::{
    build_unit_square_mesh, BcMode, LameField, OperatorContext, OperatorMode, ProblemData,
    SmoothingConfig,
};

fn main() -> elastrec::Result<()> {
    for n in [4, 8, 16] {
        let mesh = build_unit_square_mesh(n)?;
        let data = ProblemData::compression(&mesh, -1e-4, BcMode::Mixed);
        let ctx =
            OperatorContext::new(mesh, data, SmoothingConfig::default(), OperatorMode::Full)?;
        let x = LameField::constant(&ctx.mesh, 2.0, 0.3);
        let gap = adjoint_test(&ctx, &x, 10, 1)?;
        println!("n = {n:2}: max relative duality gap over 10 trials = {gap:.3e}");
    }
    Ok(())
}
