//! Constraint optimization with machine-learned objective boundary estimation.
//!
//! The library solves finite-domain constraint optimization problems (COPs)
//! and tightens the objective domain before search by predicting lower and
//! upper bounds on the optimum with regression models trained on previously
//! solved instances. Estimated bounds are posted as hard constraints; if they
//! render the instance unsatisfiable, the solve is retried above the failed
//! upper bound, so the true optimum is never lost.
//!
//! Modules:
//! - [`cop`]: COP data model and canonical instance format
//! - [`solver`]: branch-and-bound minimizer with bounds propagation
//! - [`features`]: instance feature extraction and preprocessing recipes
//! - [`estimators`]: LR / kNN / GTB / MLP under symmetric and asymmetric losses
//! - [`pipeline`]: boundary-constrained solving, corpus building, k-fold harness
//! - [`metrics`]: estimation-quality and solver-comparison metrics
//! - [`generate`]: seeded bin-packing and jobshop instance generators
//! - [`cli`]: subcommand implementations behind the `bion` binary

pub mod cli;
pub mod cop;
pub mod estimators;
pub mod features;
pub mod generate;
pub mod metrics;
pub mod pipeline;
pub mod solver;

pub use cop::{parse_instance, serialize_instance, Constraint, CopInstance, Domain, Role, Variable};
pub use estimators::{Estimation, Estimator, EstimatorKind, LabelShift, LossSpec, ShiftDirection};
pub use features::{FeatureVector, PreprocessRecipe};
pub use generate::GenSpec;
pub use pipeline::{BionResult, Dataset};
pub use solver::{SolveOutcome, SolverConfig, Verdict};
