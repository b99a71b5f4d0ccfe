//! Command-line driver: phantom generation, forward simulation, noise,
//! inversion, and diagnostic checks, all steered by one TOML config file.

use clap::{Parser, Subcommand};
use elastrec::diagnostics::{
    adjoint_test, coercivity_test, taylor_test, tcc_direction, tcc_sweep, TccDirection,
};
use elastrec::io::{
    write_lame_field, write_noise_meta, write_residual_log, write_vector_field, write_vtk,
};
use elastrec::{
    compose_phantom, setup_experiment, ExperimentConfig, LameField, Result, ScalarField,
    StopReason,
};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "elastrec", version, about = "Lame-parameter reconstruction from displacement data")]
struct Cli {
    /// Experiment config file (TOML); defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the noise seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the output directory from the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override one config key, e.g. --override mesh.inverse_n=16.
    #[arg(long = "override", global = true)]
    overrides: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the exact phantom Lame fields on both meshes.
    Phantom,
    /// Solve the forward problem and write the clean displacement data.
    Forward,
    /// Write the noisy data together with the realized noise level.
    Noise,
    /// Run the full reconstruction and write all run artifacts.
    Invert,
    /// Run adjoint, derivative and coercivity checks; nonzero exit on failure.
    Verify,
    /// Sweep empirical tangential-cone ratios; nonzero exit if any is >= 1.
    Tcc,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path, &cli.overrides)?,
        None => {
            let text = ExperimentConfig::default().to_toml_string();
            ExperimentConfig::from_toml_str(&text, &cli.overrides)?
        }
    };
    if let Some(seed) = cli.seed {
        cfg.inversion.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.display().to_string();
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<i32> {
    let cfg = load_config(cli)?;
    let out = PathBuf::from(&cfg.out_dir);
    match cli.command {
        Command::Phantom => {
            let spec = cfg.phantom.spec()?;
            for (name, n) in [("data", cfg.mesh.data_n), ("inverse", cfg.mesh.inverse_n)] {
                let mesh = elastrec::build_unit_square_mesh(n)?;
                let truth = compose_phantom(&spec, &mesh)?;
                write_lame_field(&out.join(format!("phantom_{name}.csv")), &mesh, &truth)?;
                write_vtk(
                    &out.join(format!("phantom_{name}.vtk")),
                    &mesh,
                    &[("lambda_kpa", &truth.lambda), ("mu_kpa", &truth.mu)],
                    &[],
                )?;
            }
            println!("phantom fields written to {}", out.display());
        }
        Command::Forward => {
            let exp = setup_experiment(&cfg)?;
            write_vector_field(&out.join("u_clean.csv"), &exp.ctx.mesh, &exp.u_clean)?;
            write_vtk(
                &out.join("u_clean.vtk"),
                &exp.ctx.mesh,
                &[],
                &[("displacement", &exp.u_clean)],
            )?;
            println!("clean data written to {}", out.display());
        }
        Command::Noise => {
            let exp = setup_experiment(&cfg)?;
            write_vector_field(&out.join("u_noisy.csv"), &exp.ctx.mesh, &exp.noisy.u_delta)?;
            write_noise_meta(
                &out.join("noise_meta.txt"),
                &exp.noisy,
                cfg.inversion.noise_level,
            )?;
            println!(
                "noisy data written to {} (delta = {:.6e})",
                out.display(),
                exp.noisy.delta
            );
        }
        Command::Invert => {
            let (exp, result) = elastrec::run_experiment(&cfg)?;
            write_lame_field(&out.join("reconstruction.csv"), &exp.ctx.mesh, &result.lame)?;
            write_vtk(
                &out.join("reconstruction.vtk"),
                &exp.ctx.mesh,
                &[
                    ("lambda_kpa", &result.lame.lambda),
                    ("mu_kpa", &result.lame.mu),
                    ("lambda_true_kpa", &exp.truth_inverse.lambda),
                    ("mu_true_kpa", &exp.truth_inverse.mu),
                ],
                &[],
            )?;
            write_residual_log(&out.join("residuals.csv"), &result.log)?;
            std::fs::create_dir_all(&out)?;
            std::fs::write(out.join("config_used.toml"), cfg.to_toml_string())?;
            let reason = match result.state.stopped {
                Some(StopReason::Discrepancy) => "discrepancy",
                Some(StopReason::MaxIters) => "max-iters",
                Some(StopReason::Converged) => "converged",
                None => "unknown",
            };
            println!(
                "stopped after {} iterations ({reason}), final residual {:.6e}, tau*delta {:.6e}",
                result.state.k,
                result.state.residual_history.last().copied().unwrap_or(f64::NAN),
                exp.rule.tau * exp.rule.delta
            );
        }
        Command::Verify => return verify(&cfg, &out),
        Command::Tcc => return tcc(&cfg, &out),
    }
    Ok(0)
}

fn verify(cfg: &ExperimentConfig, out: &Path) -> Result<i32> {
    let exp = setup_experiment(cfg)?;
    let ctx = &exp.ctx;
    let x = &exp.x0;

    let gap = adjoint_test(ctx, x, 10, cfg.inversion.seed)?;
    let adjoint_ok = gap <= 1e-8;

    let dir = tcc_direction(ctx, TccDirection::Both);
    let slope = taylor_test(ctx, x, &dir, &[1e-1, 1e-2, 1e-3])?;
    let taylor_ok = slope >= 1.9;

    let probe = match ctx.mode {
        elastrec::OperatorMode::Full => x.clone(),
        elastrec::OperatorMode::Compact => ctx.lift_background(x)?,
    };
    let coercive_ok = coercivity_test(ctx, &probe, cfg.inversion.seed).is_ok();

    let mut report = String::from("check,value,threshold,pass\n");
    report.push_str(&format!("adjoint_gap,{gap},1e-8,{adjoint_ok}\n"));
    report.push_str(&format!("taylor_slope,{slope},1.9,{taylor_ok}\n"));
    report.push_str(&format!("coercivity,{},-,{}\n", coercive_ok, coercive_ok));
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("verify_report.csv"), &report)?;
    print!("{report}");
    Ok(if adjoint_ok && taylor_ok && coercive_ok { 0 } else { 1 })
}

fn tcc(cfg: &ExperimentConfig, out: &Path) -> Result<i32> {
    let mut cfg = cfg.clone();
    // the sweep is only meaningful in the compact-support setting
    cfg.operator.mode = elastrec::config::ModeConfig::Compact;
    let exp = setup_experiment(&cfg)?;
    let ctx = &exp.ctx;
    let x = LameField {
        lambda: ScalarField::zeros(&ctx.mesh),
        mu: ScalarField::zeros(&ctx.mesh),
    };
    let dir = tcc_direction(ctx, TccDirection::MuOnly);
    let scales = [3e-2, 3e-3, 3e-4];
    let report = tcc_sweep(ctx, &x, &dir, &scales)?;
    let mut csv = String::from("scale,perturbation_w1inf,ratio\n");
    for i in 0..report.scales.len() {
        csv.push_str(&format!(
            "{},{},{}\n",
            report.scales[i], report.sizes[i], report.ratios[i]
        ));
    }
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("tcc_report.csv"), &csv)?;
    print!("{csv}");
    println!("pass = {}", report.pass);
    Ok(if report.pass { 0 } else { 1 })
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
