//! 3-SAT to single-variable tropical non-linear systems and back: formula
//! parsing, the reduction, witness maps in both directions, and a
//! truth-table oracle for equisatisfiability testing.
//!
//! A formula over `y_0..y_{n-1}` maps to one tropical variable whose support
//! encodes the assignment: every odd derivative order up to `4n-1` must have
//! valuation 0, the orders `2j` and `2j+2n` carry valuations summing to 1,
//! and `y_j` is true exactly when `Val(2j) = 0`.

use std::fmt;

use crate::extnat::ExtNat;
use crate::linear::Slot;
use crate::nonlinear::{Monomial, NonlinearEquation, NonlinearSystem};
use crate::support::Support;

/// A literal: variable index plus polarity (`positive = false` is negation).
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn new(var: usize, positive: bool) -> Literal {
        Literal { var, positive }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            write!(f, "!")?;
        }
        write!(f, "y{}", self.var)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CnfError {
    VariableOutOfRange { clause: usize, var: usize, num_vars: usize },
    EmptyClause { clause: usize },
    ClauseTooLong { clause: usize, len: usize },
}

impl fmt::Display for CnfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CnfError::VariableOutOfRange { clause, var, num_vars } => write!(
                f,
                "clause {} uses variable y{var}, but the formula has {num_vars} variables",
                clause + 1
            ),
            CnfError::EmptyClause { clause } => write!(f, "clause {} is empty", clause + 1),
            CnfError::ClauseTooLong { clause, len } => {
                write!(f, "clause {} has {len} literals; at most 3 are supported", clause + 1)
            }
        }
    }
}

impl std::error::Error for CnfError {}

/// A CNF formula with clauses of one to three literals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Vec<Literal>>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<Literal>>) -> Result<CnfFormula, CnfError> {
        for (c, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(CnfError::EmptyClause { clause: c });
            }
            if clause.len() > 3 {
                return Err(CnfError::ClauseTooLong { clause: c, len: clause.len() });
            }
            for lit in clause {
                if lit.var >= num_vars {
                    return Err(CnfError::VariableOutOfRange {
                        clause: c,
                        var: lit.var,
                        num_vars,
                    });
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    pub fn evaluate(&self, assignment: &Assignment) -> bool {
        assert_eq!(assignment.len(), self.num_vars);
        self.clauses.iter().all(|clause| {
            clause
                .iter()
                .any(|lit| assignment.get(lit.var) == lit.positive)
        })
    }
}

/// Truth values for `y_0..y_{n-1}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Assignment {
        Assignment { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, var: usize) -> bool {
        self.values[var]
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, v) in self.values.iter().enumerate() {
            if j > 0 {
                write!(f, " ")?;
            }
            write!(f, "y{j}={v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DimacsError {
    MalformedHeader { line: usize },
    ClauseTooLong { line: usize },
    IndexOutOfRange { line: usize, literal: i64 },
    EmptyClause { line: usize },
    InvalidToken { line: usize, token: String },
    UnterminatedClause,
}

impl fmt::Display for DimacsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DimacsError::MalformedHeader { line } => {
                write!(f, "line {line}: expected a header of the form \"p cnf <vars> <clauses>\"")
            }
            DimacsError::ClauseTooLong { line } => {
                write!(f, "line {line}: clause has more than 3 literals")
            }
            DimacsError::IndexOutOfRange { line, literal } => {
                write!(f, "line {line}: literal {literal} is outside the declared variable range")
            }
            DimacsError::EmptyClause { line } => write!(f, "line {line}: empty clause"),
            DimacsError::InvalidToken { line, token } => {
                write!(f, "line {line}: invalid token {token:?}")
            }
            DimacsError::UnterminatedClause => {
                write!(f, "the final clause is not terminated by 0")
            }
        }
    }
}

impl std::error::Error for DimacsError {}

/// Parses DIMACS CNF text: `c` comment lines, a `p cnf <vars> <clauses>`
/// header, then clauses as signed 1-based variable indices terminated by 0.
/// DIMACS variable `v` maps to `y_{v-1}`; clauses longer than 3 literals are
/// rejected.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, DimacsError> {
    let mut num_vars: Option<usize> = None;
    let mut clauses: Vec<Vec<Literal>> = Vec::new();
    let mut pending: Vec<Literal> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if num_vars.is_none() {
            let mut tokens = trimmed.split_whitespace();
            let ok = tokens.next() == Some("p") && tokens.next() == Some("cnf");
            let vars = tokens.next().and_then(|t| t.parse::<usize>().ok());
            let declared_clauses = tokens.next().and_then(|t| t.parse::<usize>().ok());
            match (ok, vars, declared_clauses, tokens.next()) {
                (true, Some(v), Some(_), None) => num_vars = Some(v),
                _ => return Err(DimacsError::MalformedHeader { line }),
            }
            continue;
        }
        let nv = num_vars.expect("header parsed");
        for token in trimmed.split_whitespace() {
            let value: i64 = token
                .parse()
                .map_err(|_| DimacsError::InvalidToken { line, token: token.to_string() })?;
            if value == 0 {
                if pending.is_empty() {
                    return Err(DimacsError::EmptyClause { line });
                }
                if pending.len() > 3 {
                    return Err(DimacsError::ClauseTooLong { line });
                }
                clauses.push(std::mem::take(&mut pending));
            } else {
                let var = value.unsigned_abs();
                if var > nv as u64 {
                    return Err(DimacsError::IndexOutOfRange { line, literal: value });
                }
                pending.push(Literal::new(var as usize - 1, value > 0));
            }
        }
    }

    if !pending.is_empty() {
        return Err(DimacsError::UnterminatedClause);
    }
    let num_vars = num_vars.ok_or(DimacsError::MalformedHeader { line: 0 })?;
    // Emptiness, length and variable range were all enforced per clause.
    Ok(CnfFormula::new(num_vars, clauses).expect("clauses validated during parsing"))
}

/// Reduces a formula over `y_0..y_{n-1}` to a single-variable non-linear
/// system with `r = 4n - 1`, degree 2, and coefficients at most 1:
///
/// - `min { x^(2j+1), 0 }` for `0 <= j <= 2n-1` forces every even-order
///   valuation to 0 or 1;
/// - `min { x^(2j) + x^(2j+2n), 1 }` for `0 <= j <= n-1` makes the orders
///   `2j` and `2j+2n` carry valuations 0 and 1 in one of the two orders,
///   encoding the truth value of `y_j`;
/// - each clause adds `min { ..literal terms.., 0 }`, where `y_j` contributes
///   `x^(2j)` and its negation contributes `x^(2j+2n)`.
///
/// The formula is satisfiable iff the resulting system is solvable.
pub fn reduce_3sat(cnf: &CnfFormula) -> NonlinearSystem {
    let n = cnf.num_vars() as u64;
    if n == 0 {
        // No variables means no clauses; the empty system is trivially solvable.
        return NonlinearSystem::new(1, 0, Vec::new()).expect("empty system");
    }
    let r = 4 * n - 1;
    let mut equations = Vec::with_capacity(3 * n as usize + cnf.clauses().len());
    for j in 0..2 * n {
        equations.push(NonlinearEquation::new([
            Monomial::new(0, [Slot::new(0, 2 * j + 1)]),
            Monomial::new(0, []),
        ]));
    }
    for j in 0..n {
        equations.push(NonlinearEquation::new([
            Monomial::new(0, [Slot::new(0, 2 * j), Slot::new(0, 2 * j + 2 * n)]),
            Monomial::new(1, []),
        ]));
    }
    for clause in cnf.clauses() {
        let mut monomials: Vec<Monomial> = clause
            .iter()
            .map(|lit| {
                let j = lit.var as u64;
                let order = if lit.positive { 2 * j } else { 2 * j + 2 * n };
                Monomial::new(0, [Slot::new(0, order)])
            })
            .collect();
        monomials.push(Monomial::new(0, []));
        equations.push(NonlinearEquation::new(monomials));
    }
    NonlinearSystem::new(1, r, equations).expect("all orders are below 4n")
}

/// The support encoding an assignment: all odd integers up to `4n-1`, plus
/// `2j` for every true `y_j` and `2j+2n` for every false one; no tail.
pub fn assignment_to_support(cnf: &CnfFormula, assignment: &Assignment) -> Support {
    assert_eq!(assignment.len(), cnf.num_vars());
    let n = cnf.num_vars() as u64;
    let odds = (0..2 * n).map(|j| 2 * j + 1);
    let evens = (0..n).map(|j| {
        if assignment.get(j as usize) {
            2 * j
        } else {
            2 * j + 2 * n
        }
    });
    Support::new(odds.chain(evens), None)
}

/// A support that fails the structural equations of a reduced system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessError {
    /// Some odd derivative order has a nonzero valuation.
    OddDerivative { order: u64, valuation: ExtNat },
    /// The valuations at orders `2j` and `2j+2n` do not sum to 1.
    PairConstraint { var: usize, sum: ExtNat },
}

impl fmt::Display for WitnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessError::OddDerivative { order, valuation } => write!(
                f,
                "invalid witness: the valuation at odd order {order} is {valuation}, not 0"
            ),
            WitnessError::PairConstraint { var, sum } => write!(
                f,
                "invalid witness: the valuations encoding y{var} sum to {sum}, not 1"
            ),
        }
    }
}

impl std::error::Error for WitnessError {}

/// Reads an assignment back from a solution support of a reduced system:
/// `y_j` is true iff `Val(2j) = 0`. The structural constraints are verified
/// and any failure is reported.
pub fn support_to_assignment(
    support: &Support,
    num_vars: usize,
) -> Result<Assignment, WitnessError> {
    let n = num_vars as u64;
    for j in 0..2 * n {
        let order = 2 * j + 1;
        let valuation = support.valuation(order);
        if valuation != ExtNat::Fin(0) {
            return Err(WitnessError::OddDerivative { order, valuation });
        }
    }
    for j in 0..n {
        let sum = support
            .valuation(2 * j)
            .checked_add(support.valuation(2 * j + 2 * n))
            .unwrap_or(ExtNat::Inf);
        if sum != ExtNat::Fin(1) {
            return Err(WitnessError::PairConstraint { var: j as usize, sum });
        }
    }
    let values = (0..n)
        .map(|j| support.valuation(2 * j) == ExtNat::Fin(0))
        .collect();
    Ok(Assignment::new(values))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TooManyVariables {
    pub num_vars: usize,
}

impl fmt::Display for TooManyVariables {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "truth-table search is limited to 24 variables, got {}",
            self.num_vars
        )
    }
}

impl std::error::Error for TooManyVariables {}

/// Truth-table satisfiability: the lexicographically first satisfying
/// assignment (false before true, `y_0` most significant), or `None`.
/// Guarded to at most 24 variables.
pub fn brute_force_sat(cnf: &CnfFormula) -> Result<Option<Assignment>, TooManyVariables> {
    let n = cnf.num_vars();
    if n > 24 {
        return Err(TooManyVariables { num_vars: n });
    }
    for mask in 0u64..(1u64 << n) {
        let assignment = Assignment::new(
            (0..n).map(|j| (mask >> (n - 1 - j)) & 1 == 1).collect(),
        );
        if cnf.evaluate(&assignment) {
            return Ok(Some(assignment));
        }
    }
    Ok(None)
}
