//! Decides whether a causal Bayesian network is an interventionally valid
//! model of a representation of a data-generating process, under a chosen
//! interpretation of actions as interventions, and produces falsification
//! witnesses when it is not.
//!
//! Finite laws use exact rational arithmetic throughout. Gaussian laws may
//! have singular covariance; point masses are zero-variance coordinates.

pub mod abstraction;
pub mod cbn;
pub mod dgp;
pub mod dist;
pub mod error;
pub mod interpret;
pub mod linalg;
pub mod rational;
pub mod scenario;
pub mod validity;
pub mod var;

pub use abstraction::{
    is_tau_abstraction, omega_tau, scm_solve, AbstractionVerdict, FiniteScm, HardIntervention,
    Mechanism,
};
pub use cbn::{
    classify_intervention, complete_cbn_from_dist, Cbn, Dag, FiniteKernel, Intervention,
    InterventionClass, InterventionSet, Kernel, LinearGaussianKernel,
};
pub use dgp::{build_dgp_from_cbn, emulate, ActionId, Complexity, Dgp, Emulation, Link};
pub use dist::{
    Distribution, Family, FiniteDist, Functional, GaussianDist, RepresentationMap, Tolerances,
};
pub use error::{Error, Result};
pub use interpret::{
    check_desideratum, interpret, Desideratum, InterpretationResult, InterpretationSpec,
};

pub use rational::Rational;
pub use scenario::{
    builtin_scenario, builtin_scenarios, parse_scenario, resolve, run_scenario, to_canonical,
    Scenario, ScenarioReport,
};
pub use validity::{check_pheno_validity, check_validity, ValidityReport, Verdict};

pub use var::VarId;
