//! Empirical tangential-cone ratios for the compact-support operator: the
//! linearization error relative to the operator difference must stay below
//! one for convergence of the gradient iterations.
//!
//! Run with: cargo run --example tcc_sweep

use elastrec::diagnostics::{tcc_direction, tcc_sweep, TccDirection};
use elastrec::{
    build_unit_square_mesh, BcMode, LameField, OperatorContext, OperatorMode, ProblemData,
    SmoothingConfig,
};

fn main() -> elastrec::Result<()> {
    let mesh = build_unit_square_mesh(16)?;
    let mut data = ProblemData::compression(&mesh, -1e-4, BcMode::Mixed);
    data.background = Some(LameField::constant(&mesh, 2.0, 0.3));
    let ctx = OperatorContext::new(
        mesh,
        data,
        SmoothingConfig::default(),
        OperatorMode::Compact,
    )?;
    let x = LameField::zeros(&ctx.mesh);
    for which in [TccDirection::MuOnly, TccDirection::LambdaOnly, TccDirection::Both] {
        let dir = tcc_direction(&ctx, which);
        let report = tcc_sweep(&ctx, &x, &dir, &[3e-2, 3e-3, 3e-4])?;
        println!("{which:?}:");
        for (t, r) in report.scales.iter().zip(&report.ratios) {
            println!("  scale {t:8.1e}: ratio {r:.4e}");
        }
    }
    Ok(())
}
