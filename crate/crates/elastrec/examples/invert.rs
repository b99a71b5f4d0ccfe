//! End-to-end reconstruction at a small scale: synthesize data on a fine
//! mesh, add noise, and run the accelerated two-point gradient iteration on
//! a coarser mesh until the discrepancy principle stops it.
//!
//! Run with: cargo run --release --example invert

use elastrec::{run_experiment, ExperimentConfig};

fn main() -> elastrec::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.mesh.inverse_n = 16;
    cfg.mesh.data_n = 32;
    cfg.inversion.noise_level = 0.01;
    cfg.inversion.max_iters = 500;

    let (exp, result) = run_experiment(&cfg)?;
    println!(
        "stopped at k = {} ({:?}), residual {:.4e} vs tau*delta {:.4e}",
        result.state.k,
        result.state.stopped,
        result.state.residual_history.last().unwrap(),
        exp.rule.tau * exp.rule.delta
    );

    // relative L2 error of the reconstructed shear modulus
    let err = |lame: &elastrec::LameField| {
        let mut diff = lame.mu.clone();
        diff.axpy(-1.0, &exp.truth_inverse.mu);
        exp.ctx.l2_norm_scalar(&diff) / exp.ctx.l2_norm_scalar(&exp.truth_inverse.mu)
    };
    let initial = exp.ctx.effective_lame(&exp.x0)?;
    println!(
        "relative mu error: initial {:.4}, reconstructed {:.4}",
        err(&initial),
        err(&result.lame)
    );
    Ok(())
}
