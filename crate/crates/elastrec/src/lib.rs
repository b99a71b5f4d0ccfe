//! Quantitative static elastography on the unit square.
//!
//! Given internal displacement measurements of a linearly elastic body under
//! a known compression, the library reconstructs the spatially varying Lame
//! parameters (lambda, mu) by iteratively regularized gradient methods:
//! classical Landweber, steepest-descent Landweber, and the
//! Nesterov-accelerated two-point gradient iteration, all stopped by the
//! discrepancy principle.
//!
//! The pieces are usable on their own:
//!
//! - [`mesh`], [`field`]: structured P1 triangulations and nodal fields;
//! - [`sparse`], [`fem`]: CSR matrices, preconditioned CG, and P1 assembly
//!   of the elasticity forms;
//! - [`operator`]: the parameter-to-solution operator, its derivative,
//!   adjoint, and Sobolev gradient smoothing;
//! - [`phantom`]: smooth circular-inclusion test phantoms;
//! - [`inversion`]: the iterations, noise model, and stopping rules;
//! - [`diagnostics`]: adjoint/Taylor/coercivity checks and empirical
//!   tangential-cone sweeps;
//! - [`config`], [`io`]: experiment configuration, the synthetic-data
//!   pipeline, and CSV/VTK artifacts.
//!
//! See the `examples/` directory for end-to-end usage.

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod fem;
pub mod field;
pub mod inversion;
pub mod io;
pub mod mesh;
pub mod operator;
pub mod phantom;
pub mod sparse;

pub use config::{run_experiment, setup_experiment, Experiment, ExperimentConfig};
pub use error::{Error, Result};
pub use field::{LameField, ScalarField, VectorField};
pub use inversion::{
    add_noise, run_inversion, Method, NoisyData, ReconstructionResult, StopReason, StoppingRule,
};
pub use mesh::{build_unit_square_mesh, Box2, TriMesh};
pub use operator::{
    BcMode, OperatorContext, OperatorMode, ProblemData, SmoothingConfig, DEFAULT_OMEGA1,
};
pub use phantom::{compose_phantom, BumpSpec, PhantomPreset, PhantomSpec};
