//! Independent brute-force ground truth: exhaustive enumeration of canonical
//! supports to decide solvability and compute minimal solutions on desk-scale
//! instances. This module is deliberately simple; the solvers are tested
//! against it, never the other way around.

use std::fmt;

use crate::linear::{EquationStatus, LinearSystem};
use crate::nonlinear::{NonlinearStatus, NonlinearSystem};
use crate::support::{Support, ValuationVector};

pub const DEFAULT_ENUMERATION_BUDGET: u64 = 10_000_000;

/// Bounds of the candidate space: finite parts range over subsets of
/// `{0..r-1}`, tails over "none" and `[r, tail_cap]`. The budget caps the
/// number of candidate tuples an oracle call may visit.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct EnumerationCaps {
    pub r: u64,
    pub tail_cap: u64,
    pub budget: u64,
}

impl EnumerationCaps {
    pub fn new(r: u64, tail_cap: u64) -> EnumerationCaps {
        EnumerationCaps { r, tail_cap, budget: DEFAULT_ENUMERATION_BUDGET }
    }

    pub fn with_budget(mut self, budget: u64) -> EnumerationCaps {
        self.budget = budget;
        self
    }

    fn tail_options(&self) -> u64 {
        if self.tail_cap >= self.r {
            self.tail_cap - self.r + 2
        } else {
            1
        }
    }

    /// `2^r * (tail_cap - r + 2)`, saturating.
    pub fn per_variable_count(&self) -> u128 {
        if self.r >= 127 {
            return u128::MAX;
        }
        (1u128 << self.r).saturating_mul(self.tail_options() as u128)
    }

    fn tuple_count(&self, n: usize) -> u128 {
        let per_var = self.per_variable_count();
        let mut total: u128 = 1;
        for _ in 0..n {
            total = total.saturating_mul(per_var);
        }
        total
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    BudgetExceeded { required: u128, budget: u64 },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::BudgetExceeded { required, budget } => write!(
                f,
                "enumeration needs {required} candidates, above the budget of {budget}"
            ),
        }
    }
}

impl std::error::Error for OracleError {}

/// Yields every canonical support within the caps exactly once, in a fixed
/// order: finite parts by ascending bitmask (bit b set means element b is a
/// member), and for each finite part the tail options none, r, r+1, ...
pub fn enumerate_canonical_supports(
    caps: &EnumerationCaps,
) -> Result<SupportEnumeration, OracleError> {
    let required = caps.per_variable_count();
    if required > caps.budget as u128 {
        return Err(OracleError::BudgetExceeded { required, budget: caps.budget });
    }
    Ok(SupportEnumeration {
        r: caps.r,
        tail_cap: caps.tail_cap,
        tail_options: caps.tail_options(),
        mask: 0,
        tail_idx: 0,
        done: false,
    })
}

pub struct SupportEnumeration {
    r: u64,
    tail_cap: u64,
    tail_options: u64,
    mask: u64,
    tail_idx: u64,
    done: bool,
}

impl Iterator for SupportEnumeration {
    type Item = Support;

    fn next(&mut self) -> Option<Support> {
        if self.done {
            return None;
        }
        let finite = (0..self.r).filter(|&b| (self.mask >> b) & 1 == 1);
        let tail = if self.tail_idx == 0 { None } else { Some(self.r + self.tail_idx - 1) };
        let support = Support::new(finite, tail);
        debug_assert!(tail.is_none_or(|m| m <= self.tail_cap));

        self.tail_idx += 1;
        if self.tail_idx == self.tail_options {
            self.tail_idx = 0;
            self.mask += 1;
            // The budget check bounds 2^r, so r < 64 here.
            if self.mask == 1u64 << self.r {
                self.done = true;
            }
        }
        Some(support)
    }
}

/// Calls `f` on every canonical tuple (within caps) that solves the system,
/// in enumeration order, and returns how many solutions were seen.
pub fn for_each_linear_solution(
    system: &LinearSystem,
    caps: &EnumerationCaps,
    mut f: impl FnMut(&[Support]),
) -> Result<u64, OracleError> {
    let n = system.n();
    let required = caps.tuple_count(n);
    if required > caps.budget as u128 {
        return Err(OracleError::BudgetExceeded { required, budget: caps.budget });
    }
    let mut count = 0;
    if n == 0 {
        if system.is_solution(&[]) {
            f(&[]);
            count = 1;
        }
        return Ok(count);
    }
    if n == 1 {
        for support in enumerate_canonical_supports(caps)? {
            let tuple = [support];
            if system.is_solution(&tuple) {
                f(&tuple);
                count += 1;
            }
        }
        return Ok(count);
    }

    // Materialize the per-variable candidates with their valuation tables;
    // the tuple budget keeps this list small.
    let candidates: Vec<Support> = enumerate_canonical_supports(caps)?.collect();
    let tables: Vec<ValuationVector> =
        candidates.iter().map(|s| s.valuation_vector(system.r())).collect();
    let mut index = vec![0usize; n];
    loop {
        let satisfied = system.equations().iter().all(|eq| {
            eq.status_with(&mut |var, order| tables[index[var]].entry(order))
                == EquationStatus::Satisfied
        });
        if satisfied {
            let tuple: Vec<Support> = index.iter().map(|&i| candidates[i].clone()).collect();
            f(&tuple);
            count += 1;
        }
        // Odometer: the last variable cycles fastest.
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(count);
            }
            pos -= 1;
            index[pos] += 1;
            if index[pos] < candidates.len() {
                break;
            }
            index[pos] = 0;
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LinearOracleOutcome {
    Solvable {
        /// The componentwise join (set union) of every solution found.
        join: Vec<Support>,
        /// Whether that join is itself a solution; checked, never assumed.
        join_is_solution: bool,
        solution_count: u64,
    },
    Unsolvable,
}

/// Enumerates all canonical support tuples within the caps, collects the
/// solutions, and returns their componentwise join, which (when the claimed
/// theory holds) is the system's minimal solution.
pub fn oracle_minimal_linear(
    system: &LinearSystem,
    caps: &EnumerationCaps,
) -> Result<LinearOracleOutcome, OracleError> {
    let mut join: Option<Vec<Support>> = None;
    let solution_count = for_each_linear_solution(system, caps, |solution| match &mut join {
        None => join = Some(solution.to_vec()),
        Some(acc) => {
            for (a, s) in acc.iter_mut().zip(solution) {
                *a = a.join(s);
            }
        }
    })?;
    Ok(match join {
        None => LinearOracleOutcome::Unsolvable,
        Some(join) => {
            let join_is_solution = system.is_solution(&join);
            LinearOracleOutcome::Solvable { join, join_is_solution, solution_count }
        }
    })
}

/// The first canonical tuple (in enumeration order) solving the non-linear
/// system, or `None` when no tuple within the caps does.
pub fn oracle_solve_nonlinear(
    system: &NonlinearSystem,
    caps: &EnumerationCaps,
) -> Result<Option<Vec<Support>>, OracleError> {
    let n = system.n();
    let required = caps.tuple_count(n);
    if required > caps.budget as u128 {
        return Err(OracleError::BudgetExceeded { required, budget: caps.budget });
    }
    if n == 0 {
        return Ok(if system.is_solution(&[]) { Some(Vec::new()) } else { None });
    }
    if n == 1 {
        for support in enumerate_canonical_supports(caps)? {
            if system.is_solution(std::slice::from_ref(&support)) {
                return Ok(Some(vec![support]));
            }
        }
        return Ok(None);
    }

    let candidates: Vec<Support> = enumerate_canonical_supports(caps)?.collect();
    let tables: Vec<ValuationVector> =
        candidates.iter().map(|s| s.valuation_vector(system.r())).collect();
    let mut index = vec![0usize; n];
    loop {
        let satisfied = system.equations().iter().all(|eq| {
            eq.status_with(&mut |var, order| tables[index[var]].entry(order))
                == NonlinearStatus::Satisfied
        });
        if satisfied {
            return Ok(Some(index.iter().map(|&i| candidates[i].clone()).collect()));
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(None);
            }
            pos -= 1;
            index[pos] += 1;
            if index[pos] < candidates.len() {
                break;
            }
            index[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extnat::ExtNat;
    use crate::linear::{LinearEquation, Slot};
    use crate::nonlinear::{Monomial, NonlinearEquation};

    fn slot(order: u64) -> Slot {
        Slot::new(0, order)
    }

    #[test]
    fn enumeration_order_and_count() {
        let caps = EnumerationCaps::new(1, 2);
        let all: Vec<Support> = enumerate_canonical_supports(&caps).unwrap().collect();
        assert_eq!(
            all,
            vec![
                Support::empty(),
                Support::from_tail(1),
                Support::from_tail(2),
                Support::new([0], None),
                Support::new([0], Some(1)),
                Support::new([0], Some(2)),
            ]
        );

        let caps = EnumerationCaps::new(0, 0);
        let all: Vec<Support> = enumerate_canonical_supports(&caps).unwrap().collect();
        assert_eq!(all, vec![Support::empty(), Support::from_tail(0)]);

        let caps = EnumerationCaps::new(3, 5);
        assert_eq!(caps.per_variable_count(), 32);
        assert_eq!(enumerate_canonical_supports(&caps).unwrap().count(), 32);
    }

    #[test]
    fn budget_is_enforced() {
        let caps = EnumerationCaps::new(40, 40);
        assert!(matches!(
            enumerate_canonical_supports(&caps),
            Err(OracleError::BudgetExceeded { .. })
        ));

        let eq = LinearEquation::homogeneous([(slot(0), 0u64)]);
        let system = LinearSystem::new(1, 0, vec![eq]).unwrap();
        let caps = EnumerationCaps::new(0, 1000).with_budget(10);
        assert!(matches!(
            oracle_minimal_linear(&system, &caps),
            Err(OracleError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn running_example_join() {
        let eq = LinearEquation::new([(slot(0), 1u64), (slot(1), 0u64)], 2u64);
        let system = LinearSystem::new(1, 1, vec![eq]).unwrap();
        let caps = EnumerationCaps::new(1, 7);

        let mut solutions = Vec::new();
        let count = for_each_linear_solution(&system, &caps, |s| solutions.push(s.to_vec()))
            .unwrap();
        // Hand enumeration of the 16 candidates leaves exactly these two.
        assert_eq!(count, 2);
        assert_eq!(
            solutions,
            vec![vec![Support::from_tail(3)], vec![Support::new([0], Some(2))]]
        );

        match oracle_minimal_linear(&system, &caps).unwrap() {
            LinearOracleOutcome::Solvable { join, join_is_solution, solution_count } => {
                assert_eq!(join, vec![Support::new([0], Some(2))]);
                assert!(join_is_solution);
                assert_eq!(solution_count, 2);
            }
            other => panic!("expected solvable, got {other:?}"),
        }
    }

    #[test]
    fn free_only_system_is_unsolvable() {
        let eq = LinearEquation::new(std::iter::empty::<(Slot, u64)>(), 5u64);
        let system = LinearSystem::new(1, 0, vec![eq]).unwrap();
        let caps = EnumerationCaps::new(0, 10);
        assert_eq!(
            oracle_minimal_linear(&system, &caps).unwrap(),
            LinearOracleOutcome::Unsolvable
        );
    }

    #[test]
    fn homogeneous_single_term_has_only_the_empty_solution() {
        let eq = LinearEquation::homogeneous([(slot(0), 0u64)]);
        let system = LinearSystem::new(1, 0, vec![eq]).unwrap();
        let caps = EnumerationCaps::new(0, 5);
        match oracle_minimal_linear(&system, &caps).unwrap() {
            LinearOracleOutcome::Solvable { join, join_is_solution, solution_count } => {
                assert_eq!(join, vec![Support::empty()]);
                assert!(join_is_solution);
                assert_eq!(solution_count, 1);
            }
            other => panic!("expected solvable, got {other:?}"),
        }
    }

    #[test]
    fn empty_nonlinear_system_yields_the_first_tuple() {
        let system = NonlinearSystem::new(1, 1, vec![]).unwrap();
        let caps = EnumerationCaps::new(1, 3);
        assert_eq!(
            oracle_solve_nonlinear(&system, &caps).unwrap(),
            Some(vec![Support::empty()])
        );
    }

    #[test]
    fn nonlinear_oracle_finds_a_solution() {
        // min { x + x'', 1 } with r = 2: needs Val(0) + Val(2) = 1.
        let eq = NonlinearEquation::new([
            Monomial::new(0, [slot(0), slot(2)]),
            Monomial::new(1, []),
        ]);
        let system = NonlinearSystem::new(1, 2, vec![eq]).unwrap();
        let caps = EnumerationCaps::new(2, 8);
        let found = oracle_solve_nonlinear(&system, &caps).unwrap().unwrap();
        assert!(system.is_solution(&found));
    }

    #[test]
    fn canonical_supports_suffice() {
        // A solution with loose elements beyond r canonicalizes to an
        // enumerated support with the same satisfaction status.
        let eq = LinearEquation::new([(slot(0), 1u64), (slot(1), 0u64)], 2u64);
        let system = LinearSystem::new(1, 1, vec![eq]).unwrap();

        let loose = Support::new([0, 2, 4, 6], None);
        let canonical = loose.canonicalize(system.r());
        assert_eq!(canonical, Support::new([0], Some(2)));
        assert_eq!(
            system.is_solution(&[loose]),
            system.is_solution(std::slice::from_ref(&canonical))
        );
        let caps = EnumerationCaps::new(1, 7);
        assert!(enumerate_canonical_supports(&caps)
            .unwrap()
            .any(|s| s == canonical));

        // Same check on a non-solution.
        let loose = Support::new([1, 5], None);
        let canonical = loose.canonicalize(system.r());
        assert_eq!(
            system.is_solution(&[loose]),
            system.is_solution(std::slice::from_ref(&canonical))
        );
    }

    #[test]
    fn two_variable_oracle_agrees_with_structure() {
        // min { 0 + x1, 0 + x2 }, homogeneous: solutions are pairs whose
        // leading valuations tie or are both infinite.
        let eq = LinearEquation::homogeneous([
            (Slot::new(0, 0), 0u64),
            (Slot::new(1, 0), 0u64),
        ]);
        let system = LinearSystem::new(2, 0, vec![eq]).unwrap();
        let caps = EnumerationCaps::new(0, 2);
        let mut seen = Vec::new();
        for_each_linear_solution(&system, &caps, |s| seen.push(s.to_vec())).unwrap();
        for pair in &seen {
            let a = pair[0].valuation(0);
            let b = pair[1].valuation(0);
            assert!(a == b || (a == ExtNat::Inf && b == ExtNat::Inf));
        }
        // (empty, empty), ([0..], [0..]), ([1..], [1..]), ([2..], [2..])
        assert_eq!(seen.len(), 4);
    }
}
