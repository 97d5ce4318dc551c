//! Moduli of smoothness, the bounds used in the convergence proofs, and
//! finite-horizon checks of the convergence conditions.

pub mod bounds;
pub mod conditions;
pub mod modulus;

pub use bounds::{beta_bound, lemma4_check, lemma_diagnostics, ErrorTerms, Grid, HullWitness, LemmaDiagnostics};
pub use conditions::{
    check_conditions, check_conditions_xi, corollary_l1_power, corollary_l1_smooth, corollary_liminf, find_subsequence, in_lambda1,
    partition, ConditionFlags, ConditionReport, CorollaryReport, Partition, SubsequenceReport, XiConditionReport, NOTICE,
};
pub use modulus::{modulus_empirical, modulus_empirical_dim, modulus_l2, modulus_lp_bound, xi_solve, SmoothnessModel};
