//! Random instance generation, the suite runner and sharpness search.

pub mod gen;
pub mod registry;
pub mod sharpness;
pub mod suite;

pub use gen::{conforms, gen_operator, gram_schmidt, project, random_unit_vector, OperatorKind, OperatorRecipe};
pub use registry::{
    checker_info, checkers, evaluate, gen_instance, param_combos, CheckDomain, CheckerInfo, Instance, OperatorSlot,
    ParamGrids, Setting, SpaceFamily, TrialConfig,
};
pub use sharpness::{sharpness_search, sharpness_search_with, SharpnessResult};
pub use suite::{
    render_report, resolve_checks, run_suite, run_trial, summary_table, trial_seed, write_report, CheckAggregate,
    Report, ReportFormat,
};
