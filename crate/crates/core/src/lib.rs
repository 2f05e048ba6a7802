//! Exact solvers for tropical (min-plus) differential equations.
//!
//! Everything is integer arithmetic over `Z+ ∪ {inf}`: a tropical linear
//! differential equation is a formal minimum of terms `a + x_i^(j)` plus a
//! free term, a candidate solution assigns each variable a set of exponents
//! (its power-series support), and an equation is satisfied when the
//! substituted minimum is infinite or attained at least twice.
//!
//! The crate provides:
//!
//! - [`support`]: supports, valuations, joins, canonical forms;
//! - [`linear`]: linear systems, the minimal-solution solver, tail-start
//!   bounds, and the tropical derivative;
//! - [`univar`]: the one-variable solver with jumps, equivalent to the
//!   general one in `O(r)` steps;
//! - [`nonlinear`]: non-linear systems, evaluation, and certificate
//!   verification;
//! - [`sat`]: the 3-SAT reduction with witness maps in both directions;
//! - [`oracle`]: brute-force enumeration used as independent ground truth.

pub mod extnat;
pub mod linear;
pub mod nonlinear;
pub mod oracle;
pub mod sat;
pub mod support;
pub mod univar;

pub use extnat::{ArithmeticOverflow, ExtNat};
pub use linear::{
    bound_paper, bound_safe, solve_minimal, solve_minimal_with, BoundChoice, DerivativeError,
    Discarded, EquationStatus, LinearEquation, LinearSystem, Slot, SolveError, SolveOptions,
    SolveOutcome, SolveReport, StepCounts, StepKind, StepRecord, SystemError,
};
pub use nonlinear::{
    bound_n1, verify_certificate, BoundN1Error, Monomial, NonlinearEquation, NonlinearStatus,
    NonlinearSystem,
};
pub use oracle::{
    enumerate_canonical_supports, for_each_linear_solution, oracle_minimal_linear,
    oracle_solve_nonlinear, EnumerationCaps, LinearOracleOutcome, OracleError,
    DEFAULT_ENUMERATION_BUDGET,
};
pub use sat::{
    assignment_to_support, brute_force_sat, parse_dimacs, reduce_3sat, support_to_assignment,
    Assignment, CnfError, CnfFormula, DimacsError, Literal, TooManyVariables, WitnessError,
};
pub use support::{Support, ValuationVector};
pub use univar::{jump_length, plan_jump, solve_univar, JumpCandidate, JumpComputation, UnivarError};

#[cfg(test)]
pub(crate) mod teststrat;
