pub mod dictionary;
pub mod element;
pub mod engine;
pub mod error;
pub mod ext_float;
pub(crate) mod linalg;
pub mod policy;
pub mod projection;
pub mod scalar;
pub mod schedule;
pub mod space;
pub mod theory;
pub mod witness;

pub use dictionary::{canonical_dictionary, g_dictionary, weak_select, Atom, Dictionary, DictionaryKind, Selection};
pub use element::{apply, Element, Functional};
pub use engine::{audit_step, run_gawcga, run_wcga, EngineOptions, ExactRealization, Realization, StepContext, StepRecord, StopReason, Trace};
pub use error::{Constraint, Error, Result};
pub use ext_float::ExtF64;
pub use policy::{ApproximantRule, AtomRule, FunctionalRule, Policy};
pub use projection::{best_approximation, best_approximation_from, perturbed_approximant, Approximation, PathChoice, SolverOptions, SolverPath};
pub use scalar::Scalar;
pub use schedule::{Schedules, SeqSpec, StepParams, Subsequence};
pub use space::{dual_exponent, lq_norm, lq_norming_functional, LqSpace, NormedSpace, PSpec, SmoothSpaceX, Space};
pub use witness::{
    witness_finite_lambda1, witness_infinite_lambda1, witness_smooth_space, witness_unbounded_eta, Check, Expected, Lambda1Construction,
    PredicateReport, SlackBranch, Witness, WitnessKind, WitnessRun,
};
