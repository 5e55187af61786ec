//! Dense primal-dual interior-point machinery for small inequality-constrained
//! nonlinear programs, instrumented to study how floating-point error enters
//! the computed steps.
//!
//! The pipeline is:
//!
//! * [`problems`]: analytic test problems with known solution sets;
//! * [`precision`]: arithmetic with a configurable unit roundoff;
//! * [`linalg`]: Cholesky, Bunch-Kaufman / Bunch-Parlett `LDL^T`, GEPP, Jacobi SVD;
//! * [`stepgen`]: full, augmented and condensed step equations;
//! * [`driver`]: the local-phase iteration with step-length control;
//! * [`diagnostics`]: distance estimates, subspace error splits, audits, tables.

// `!(x <= y)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod driver;
pub mod error;
pub mod linalg;
pub mod precision;
pub mod problems;
pub mod stepgen;

pub use driver::{
    check_centrality, max_step, run, CentralityParams, CentralityStatus, IterationRecord,
    IterationTrace, StepInfo, StopCriteria, Termination,
};
pub use error::{Error, Result};
pub use precision::{Arith, ExtendedArith, PrecisionConfig, PrecisionMode};
pub use problems::{
    eval_residuals, Iterate, KnownSolution, MultiplierSegment, NlpProblem, Residuals, SvdBasis,
};
pub use stepgen::{
    assemble, compute_step, procedure_augmented, procedure_condensed, procedure_full,
    AssembledSystem, FactorLog, Formulation, SolverKind, Step, StepConfig, StepOutcome, TRule,
};
