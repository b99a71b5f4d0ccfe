//! Experiment configuration (TOML) and the driver assembling a full
//! synthetic-data reconstruction run from it.
//!
//! Data are always generated on a finer mesh than the one used for the
//! inversion and interpolated across, so the inversion never sees its own
//! discretization (the classical inverse-crime guard).

use crate::error::{Error, Result};
use crate::field::{LameField, VectorField};
use crate::inversion::{
    add_noise, run_inversion, Method, NoisyData, ReconstructionResult, StoppingRule,
};
use crate::mesh::{build_unit_square_mesh, Box2};
use crate::operator::{
    BcMode, OperatorContext, OperatorMode, ProblemData, SmoothingConfig, DEFAULT_OMEGA1,
};
use crate::phantom::{compose_phantom, BumpSpec, PhantomPreset, PhantomSpec};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeConfig {
    Full,
    Compact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BcConfig {
    Mixed,
    PureDisplacement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodConfig {
    Tpg,
    Landweber,
    LandweberSd,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    /// Subdivisions of the mesh the inversion runs on.
    pub inverse_n: usize,
    /// Subdivisions of the finer mesh synthetic data are generated on.
    pub data_n: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorConfig {
    pub mode: ModeConfig,
    pub bc: BcConfig,
    /// Compression constant of the top-boundary displacement.
    pub c_p: f64,
    /// Sobolev smoothing order.
    pub smoothing_s: f64,
    /// Shear modulus admissibility floor, kPa.
    pub mu_floor: f64,
    /// Support box [x0, x1, y0, y1] for the compact mode.
    pub omega1: Option<[f64; 4]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InversionConfig {
    pub method: MethodConfig,
    /// Relative noise level added to the synthetic data.
    pub noise_level: f64,
    pub seed: u64,
    pub tau: f64,
    pub max_iters: usize,
    /// Initial guess (lambda, mu) in full mode; compact mode starts at zero.
    pub initial_guess: [f64; 2],
}

/// Either a named preset or an inline phantom description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhantomConfig {
    pub preset: Option<PhantomPreset>,
    pub background: Option<[f64; 2]>,
    #[serde(default)]
    pub inclusions: Vec<(BumpSpec, BumpSpec)>,
}

impl PhantomConfig {
    pub fn spec(&self) -> Result<PhantomSpec> {
        match (self.preset, self.background) {
            (Some(p), None) if self.inclusions.is_empty() => Ok(p.spec()),
            (None, Some(background)) => Ok(PhantomSpec {
                background,
                inclusions: self.inclusions.clone(),
            }),
            _ => Err(Error::Config(
                "phantom must be either a preset or an inline background with inclusions".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mesh: MeshConfig,
    pub operator: OperatorConfig,
    pub inversion: InversionConfig,
    pub phantom: PhantomConfig,
    /// Output directory for run artifacts.
    pub out_dir: String,
}

impl Default for ExperimentConfig {
    /// Desk-scale defaults mirroring the compression experiment.
    fn default() -> Self {
        ExperimentConfig {
            mesh: MeshConfig {
                inverse_n: 32,
                data_n: 64,
            },
            operator: OperatorConfig {
                mode: ModeConfig::Compact,
                bc: BcConfig::Mixed,
                c_p: -1e-4,
                smoothing_s: 2.0,
                mu_floor: 0.01,
                omega1: None,
            },
            inversion: InversionConfig {
                method: MethodConfig::Tpg,
                noise_level: 0.005,
                seed: 1,
                tau: 1.0,
                max_iters: 5000,
                initial_guess: [2.0, 0.3],
            },
            phantom: PhantomConfig {
                preset: Some(PhantomPreset::Smooth),
                background: None,
                inclusions: Vec::new(),
            },
            out_dir: "out".into(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.mesh.data_n <= self.mesh.inverse_n {
            return Err(Error::Config(format!(
                "data mesh ({}) must be finer than the inverse mesh ({})",
                self.mesh.data_n, self.mesh.inverse_n
            )));
        }
        for (name, v) in [
            ("c_p", self.operator.c_p),
            ("smoothing_s", self.operator.smoothing_s),
            ("mu_floor", self.operator.mu_floor),
            ("noise_level", self.inversion.noise_level),
            ("tau", self.inversion.tau),
        ] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite, got {v}")));
            }
        }
        if self.inversion.noise_level < 0.0 {
            return Err(Error::Config("noise_level must be nonnegative".into()));
        }
        if self.inversion.tau < 1.0 {
            return Err(Error::Config("tau must be at least one".into()));
        }
        self.phantom.spec().map(|_| ())
    }

    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e| Error::Config(format!("config parse error: {e}")))?;
        for ov in overrides {
            apply_override(&mut table, ov)?;
        }
        let cfg: ExperimentConfig = table
            .try_into()
            .map_err(|e| Error::Config(format!("config error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text, overrides)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn omega1_box(&self) -> Box2 {
        match self.operator.omega1 {
            Some([x0, x1, y0, y1]) => Box2 { x0, x1, y0, y1 },
            None => DEFAULT_OMEGA1,
        }
    }

    pub fn operator_mode(&self) -> OperatorMode {
        match self.operator.mode {
            ModeConfig::Full => OperatorMode::Full,
            ModeConfig::Compact => OperatorMode::Compact,
        }
    }

    pub fn bc_mode(&self) -> BcMode {
        match self.operator.bc {
            BcConfig::Mixed => BcMode::Mixed,
            BcConfig::PureDisplacement => BcMode::PureDisplacement,
        }
    }

    pub fn method(&self) -> Method {
        match self.inversion.method {
            MethodConfig::Tpg => Method::Tpg,
            MethodConfig::Landweber => Method::Landweber,
            MethodConfig::LandweberSd => Method::LandweberSd,
        }
    }
}

/// Apply one `key.path=value` override to a parsed TOML table, creating
/// intermediate tables as needed. Values are parsed as bool, integer, float
/// or string, in that order.
fn apply_override(table: &mut toml::Table, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{spec}' is not of the form key=value")))?;
    let value = if let Ok(b) = raw.parse::<bool>() {
        toml::Value::Boolean(b)
    } else if let Ok(i) = raw.parse::<i64>() {
        toml::Value::Integer(i)
    } else if let Ok(f) = raw.parse::<f64>() {
        toml::Value::Float(f)
    } else {
        toml::Value::String(raw.to_string())
    };
    let mut cursor = table;
    let parts: Vec<&str> = key.split('.').collect();
    for part in &parts[..parts.len() - 1] {
        cursor = cursor
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override key '{key}' crosses a non-table")))?;
    }
    cursor.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

/// Everything assembled from a config: contexts, truth, clean and noisy data.
pub struct Experiment {
    /// Context on the inverse mesh; the inversion runs against this.
    pub ctx: OperatorContext,
    /// Truth sampled on the data mesh.
    pub truth_data: LameField,
    /// Truth sampled on the inverse mesh, for error reporting.
    pub truth_inverse: LameField,
    /// Clean data interpolated onto the inverse mesh.
    pub u_clean: VectorField,
    pub noisy: NoisyData,
    pub x0: LameField,
    pub rule: StoppingRule,
    pub method: Method,
}

/// Build meshes and contexts, solve the forward problem on the data mesh,
/// interpolate onto the inverse mesh and add noise there, so the noise level
/// is exact in the norm the discrepancy principle uses.
///
/// The measured quantity is the physical displacement u + Phi, so the
/// relative noise level (and hence delta) is taken with respect to it; the
/// iteration then works on the homogenized field u^delta - Phi.
pub fn setup_experiment(cfg: &ExperimentConfig) -> Result<Experiment> {
    cfg.validate()?;
    let spec = cfg.phantom.spec()?;
    let bc = cfg.bc_mode();
    let smoothing = SmoothingConfig::new(cfg.operator.smoothing_s);

    let data_mesh = build_unit_square_mesh(cfg.mesh.data_n)?;
    let truth_data = compose_phantom(&spec, &data_mesh)?;
    let mut data_problem = ProblemData::compression(&data_mesh, cfg.operator.c_p, bc);
    data_problem.mu_floor = cfg.operator.mu_floor;
    let data_ctx =
        OperatorContext::new(data_mesh, data_problem, smoothing, OperatorMode::Full)?;
    let mut u_phys = data_ctx.forward(&truth_data)?;
    u_phys.axpy(1.0, &data_ctx.data.phi);

    let inverse_mesh = build_unit_square_mesh(cfg.mesh.inverse_n)?;
    let truth_inverse = compose_phantom(&spec, &inverse_mesh)?;
    let u_phys_clean = u_phys.transfer_to(&data_ctx.mesh, &inverse_mesh);
    let mut problem = ProblemData::compression(&inverse_mesh, cfg.operator.c_p, bc);
    problem.mu_floor = cfg.operator.mu_floor;
    let mode = cfg.operator_mode();
    if mode == OperatorMode::Compact {
        problem.background = Some(LameField::constant(
            &inverse_mesh,
            spec.background[0],
            spec.background[1],
        ));
        problem.omega1 = Some(cfg.omega1_box());
    }
    let ctx = OperatorContext::new(inverse_mesh, problem, smoothing, mode)?;

    // noise is relative to the measured (physical) field; the iteration then
    // sees the homogenized data u^delta - Phi
    let mut noisy = add_noise(&ctx, &u_phys_clean, cfg.inversion.noise_level, cfg.inversion.seed);
    noisy.u_delta.axpy(-1.0, &ctx.data.phi);
    let mut u_clean = u_phys_clean;
    u_clean.axpy(-1.0, &ctx.data.phi);
    let x0 = match mode {
        OperatorMode::Full => LameField::constant(
            &ctx.mesh,
            cfg.inversion.initial_guess[0],
            cfg.inversion.initial_guess[1],
        ),
        OperatorMode::Compact => LameField::zeros(&ctx.mesh),
    };
    let rule = StoppingRule {
        tau: cfg.inversion.tau,
        delta: noisy.delta,
        max_iters: cfg.inversion.max_iters,
    };
    Ok(Experiment {
        ctx,
        truth_data,
        truth_inverse,
        u_clean,
        noisy,
        x0,
        rule,
        method: cfg.method(),
    })
}

/// Full pipeline: setup plus the iteration itself.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<(Experiment, ReconstructionResult)> {
    let exp = setup_experiment(cfg)?;
    let result = run_inversion(
        &exp.ctx,
        exp.x0.clone(),
        &exp.noisy.u_delta,
        &exp.rule,
        exp.method,
    )?;
    Ok((exp, result))
}
