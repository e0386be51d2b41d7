//! Conditional planning compiled to quantified Boolean formulae.
//!
//! The crate is organised bottom-up:
//!
//! * [`domain`] holds ground planning instances and the textual domain format.
//! * [`logic`] provides formulae, padded DNF, clausification, the variable
//!   atlas and QDIMACS serialisation.
//! * [`invariants`] synthesises 2-literal state invariants.
//! * [`encoder`] instantiates the execution and plan schemata into a QBF.
//! * [`solver`] decides QBFs with a QDPLL-style search.
//! * [`plan`] decodes witnesses into plans, simulates and verifies them.
//! * [`reduction`] maps forall-exists QBFs to planning instances.
//! * [`workbench`] contains benchmark generators, plan search and the
//!   statistics harness.

pub mod domain;
pub mod encoder;
pub mod invariants;
pub mod logic;
pub mod plan;
pub mod reduction;
pub mod solver;
pub mod workbench;

pub use domain::{
    parse_domain, DomainError, Fact, FactId, FactLit, FactValuation, NondetRule, OpId, Operator,
    ProblemInstance, Source,
};
pub use encoder::{
    assemble, EncodedProblem, EncodeError, EncodingConfig, MutexMode, PlanKind, QuantMode, Schema,
};
pub use logic::{
    Clause, Formula, Lit, QbfProblem, QuantBlock, Quantifier, VarId, VarIdentity, VariableAtlas,
};
pub use plan::{
    execute, extract_plan, verify_plan, AutomatonPlan, ChoiceSeq, ExecutionTrace, PhasedPlan, Plan,
    PlanError, SequencePlan, VerificationReport, VerifyOptions,
};
pub use reduction::{qbf_to_planning, solvable_by_search, ForallExistsQbf, QVar};
pub use solver::{expand_eval, solve, Outcome, SolverConfig, SolverResult, SolverStats};
pub use workbench::{
    evaluate, gen_blocks, gen_rooms, plan_search, run_benchmark, BenchRecord, SearchLimits, SearchReport,
    Suite,
};
