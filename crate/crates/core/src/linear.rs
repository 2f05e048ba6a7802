//! Tropical linear differential systems: formal minima of terms `a + x_i^(j)`
//! plus a free term, the twice-attained solution criterion, bounds on the
//! tail start of a minimal solution, and the general minimal-solution solver.

use std::collections::BTreeMap;
use std::fmt;

use crate::extnat::{ArithmeticOverflow, ExtNat};
use crate::nonlinear::{Monomial, NonlinearEquation, NonlinearSystem};
use crate::support::Support;

/// A derivative slot: variable `var` (0-based) at derivative order `order`.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Slot {
    pub var: usize,
    pub order: u64,
}

impl Slot {
    pub fn new(var: usize, order: u64) -> Slot {
        Slot { var, order }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Variables are printed 1-based, matching the file format.
        write!(f, "x{}^{}", self.var + 1, self.order)
    }
}

/// One tropical linear differential equation:
/// `min { coeff + x_i^(j), free }` over its stored slots.
///
/// At most one coefficient is kept per slot (duplicates merge by minimum at
/// construction); a slot with an infinite coefficient is simply absent.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearEquation {
    coeffs: BTreeMap<Slot, u64>,
    free: ExtNat,
}

fn merge_min(map: &mut BTreeMap<Slot, u64>, slot: Slot, coeff: u64) {
    map.entry(slot)
        .and_modify(|c| *c = (*c).min(coeff))
        .or_insert(coeff);
}

impl LinearEquation {
    pub fn new<C: Into<ExtNat>>(
        terms: impl IntoIterator<Item = (Slot, C)>,
        free: impl Into<ExtNat>,
    ) -> LinearEquation {
        let mut coeffs = BTreeMap::new();
        for (slot, coeff) in terms {
            if let ExtNat::Fin(c) = coeff.into() {
                merge_min(&mut coeffs, slot, c);
            }
        }
        LinearEquation { coeffs, free: free.into() }
    }

    /// An equation with an infinite free term.
    pub fn homogeneous<C: Into<ExtNat>>(
        terms: impl IntoIterator<Item = (Slot, C)>,
    ) -> LinearEquation {
        LinearEquation::new(terms, ExtNat::Inf)
    }

    /// The finite-coefficient terms, in slot order.
    pub fn terms(&self) -> impl Iterator<Item = (Slot, u64)> + '_ {
        self.coeffs.iter().map(|(&slot, &coeff)| (slot, coeff))
    }

    pub fn free(&self) -> ExtNat {
        self.free
    }

    pub fn is_homogeneous(&self) -> bool {
        self.free == ExtNat::Inf
    }

    pub fn max_order(&self) -> Option<u64> {
        self.coeffs.keys().map(|slot| slot.order).max()
    }

    /// The largest finite coefficient or free term, 0 if there is none.
    pub fn max_finite_value(&self) -> u64 {
        self.coeffs
            .values()
            .copied()
            .chain(self.free.finite())
            .max()
            .unwrap_or(0)
    }

    /// Substitutes valuations for the slots and classifies the resulting
    /// minimum: infinite or attained at least twice means satisfied; a finite
    /// minimum attained exactly once is a violation at the attaining term
    /// (the free term counts as one term).
    pub fn status(&self, supports: &[Support]) -> EquationStatus {
        self.status_with(&mut |var, order| supports[var].valuation(order))
    }

    pub(crate) fn status_with(
        &self,
        valuation: &mut impl FnMut(usize, u64) -> ExtNat,
    ) -> EquationStatus {
        status_from_terms(self.terms(), self.free, valuation)
    }

    /// The substituted minimum itself.
    pub fn min_value(&self, supports: &[Support]) -> ExtNat {
        let mut min = self.free;
        for (&slot, &coeff) in &self.coeffs {
            min = min.min(supports[slot.var].valuation(slot.order) + coeff);
        }
        min
    }

    /// The derivative of a homogeneous equation: each term `a + x^(j)` becomes
    /// `min { a-1 + x^(j), a + x^(j+1) }` when `a >= 1`, or `x^(j+1)` when
    /// `a = 0`; same-slot results merge by minimum.
    ///
    /// The derivative of a finite free term is undefined, so non-homogeneous
    /// equations are rejected.
    pub fn tropical_derivative(&self) -> Result<LinearEquation, DerivativeError> {
        if let ExtNat::Fin(free) = self.free {
            return Err(DerivativeError::NonHomogeneous { free });
        }
        let mut coeffs = BTreeMap::new();
        for (&slot, &a) in &self.coeffs {
            let shifted = Slot::new(slot.var, slot.order + 1);
            if a >= 1 {
                merge_min(&mut coeffs, slot, a - 1);
                merge_min(&mut coeffs, shifted, a);
            } else {
                merge_min(&mut coeffs, shifted, 0);
            }
        }
        Ok(LinearEquation { coeffs, free: ExtNat::Inf })
    }
}

/// Classification of one equation against a tuple of supports.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum EquationStatus {
    Satisfied,
    /// A finite minimum attained exactly once, at this slot.
    ViolatedAtSlot { slot: Slot, value: u64 },
    /// A finite minimum attained exactly once, at the free term.
    ViolatedAtFree { value: u64 },
}

/// The twice-attained test over any term stream; shared by the public
/// status call and the solvers' flattened equation snapshots.
pub(crate) fn status_from_terms(
    terms: impl Iterator<Item = (Slot, u64)>,
    free: ExtNat,
    valuation: &mut impl FnMut(usize, u64) -> ExtNat,
) -> EquationStatus {
    let mut min = ExtNat::Inf;
    let mut attained = 0u32;
    let mut at_slot: Option<Slot> = None;
    for (slot, coeff) in terms {
        let term = valuation(slot.var, slot.order) + coeff;
        if term < min {
            min = term;
            attained = 1;
            at_slot = Some(slot);
        } else if term == min && term.is_finite() {
            attained += 1;
        }
    }
    let mut at_free = false;
    if let ExtNat::Fin(free) = free {
        let term = ExtNat::Fin(free);
        if term < min {
            min = term;
            attained = 1;
            at_slot = None;
            at_free = true;
        } else if term == min {
            attained += 1;
        }
    }
    match min {
        ExtNat::Inf => EquationStatus::Satisfied,
        ExtNat::Fin(value) => {
            if attained >= 2 {
                EquationStatus::Satisfied
            } else if at_free {
                EquationStatus::ViolatedAtFree { value }
            } else {
                EquationStatus::ViolatedAtSlot { slot: at_slot.expect("finite minimum"), value }
            }
        }
    }
}

/// A flattened copy of an equation for the solvers' hot loops.
pub(crate) struct EquationSnapshot {
    pub(crate) terms: Vec<(Slot, u64)>,
    pub(crate) free: ExtNat,
}

impl EquationSnapshot {
    pub(crate) fn of(eq: &LinearEquation) -> EquationSnapshot {
        EquationSnapshot { terms: eq.terms().collect(), free: eq.free() }
    }

    pub(crate) fn status(
        &self,
        valuation: &mut impl FnMut(usize, u64) -> ExtNat,
    ) -> EquationStatus {
        status_from_terms(self.terms.iter().copied(), self.free, valuation)
    }
}

/// A system of tropical linear differential equations in `n` variables with
/// derivative orders up to `r`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearSystem {
    n: usize,
    r: u64,
    equations: Vec<LinearEquation>,
}

/// A slot outside the declared dimensions of a system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemError {
    pub equation: usize,
    pub slot: Slot,
    pub n: usize,
    pub r: u64,
}

impl fmt::Display for SystemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "equation {} uses slot {} outside the declared dimensions (n={}, r={})",
            self.equation + 1,
            self.slot,
            self.n,
            self.r
        )
    }
}

impl std::error::Error for SystemError {}

impl LinearSystem {
    pub fn new(
        n: usize,
        r: u64,
        equations: Vec<LinearEquation>,
    ) -> Result<LinearSystem, SystemError> {
        for (l, eq) in equations.iter().enumerate() {
            for (slot, _) in eq.terms() {
                if slot.var >= n || slot.order > r {
                    return Err(SystemError { equation: l, slot, n, r });
                }
            }
        }
        Ok(LinearSystem { n, r, equations })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    /// Number of equations.
    pub fn k(&self) -> usize {
        self.equations.len()
    }

    pub fn equations(&self) -> &[LinearEquation] {
        &self.equations
    }

    /// The coefficient bound M: the largest finite coefficient or free term
    /// appearing in the system, 0 if there is none. Always recomputed from
    /// the stored equations.
    pub fn max_coefficient(&self) -> u64 {
        self.equations
            .iter()
            .map(LinearEquation::max_finite_value)
            .max()
            .unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.equations.iter().all(LinearEquation::is_homogeneous)
    }

    /// True iff every equation is satisfied by the given supports.
    pub fn is_solution(&self, supports: &[Support]) -> bool {
        assert_eq!(supports.len(), self.n, "expected one support per variable");
        self.equations
            .iter()
            .all(|eq| eq.status(supports) == EquationStatus::Satisfied)
    }

    /// Embeds the system into the non-linear form: each slot becomes a
    /// singleton multiset, a finite free term an empty multiset. Satisfaction
    /// is preserved for every support family.
    pub fn to_nonlinear(&self) -> NonlinearSystem {
        let equations = self
            .equations
            .iter()
            .map(|eq| {
                let mut monomials: Vec<Monomial> =
                    eq.terms().map(|(slot, coeff)| Monomial::new(coeff, [slot])).collect();
                if let ExtNat::Fin(free) = eq.free {
                    monomials.push(Monomial::new(free, []));
                }
                NonlinearEquation::new(monomials)
            })
            .collect();
        NonlinearSystem::new(self.n, self.r, equations)
            .expect("slots were validated when the linear system was built")
    }
}

/// The derivative of an equation with a finite free term is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeError {
    NonHomogeneous { free: u64 },
}

impl fmt::Display for DerivativeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DerivativeError::NonHomogeneous { free } => write!(
                f,
                "cannot derive an equation with a finite free term ({free}); \
                 the derivative is defined for monomials only"
            ),
        }
    }
}

impl std::error::Error for DerivativeError {}

/// `(n-1)(M+r)+r`: the stated bound on the tail start of a minimal solution.
///
/// Known to be too small at `n = 1` (see [`bound_safe`], the default).
pub fn bound_paper(n: u64, r: u64, m: u64) -> Result<u64, ArithmeticOverflow> {
    n.saturating_sub(1)
        .checked_mul(m.checked_add(r).ok_or(ArithmeticOverflow)?)
        .and_then(|x| x.checked_add(r))
        .ok_or(ArithmeticOverflow)
}

/// `2n(M+r)+r`: a conservative tail-start bound that dominates
/// [`bound_paper`] and covers the `n = 1` case where the latter fails.
pub fn bound_safe(n: u64, r: u64, m: u64) -> Result<u64, ArithmeticOverflow> {
    n.checked_mul(2)
        .and_then(|x| x.checked_mul(m.checked_add(r)?))
        .and_then(|x| x.checked_add(r))
        .ok_or(ArithmeticOverflow)
}

/// Which tail-start bound initializes the solver state.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Default)]
pub enum BoundChoice {
    /// `(n-1)(M+r)+r`; retained for experimentation, wrong at `n = 1`.
    Paper,
    /// `2n(M+r)+r`; the default.
    #[default]
    Safe,
}

#[derive(Copy, Clone, Debug)]
pub struct SolveOptions {
    pub bound: BoundChoice,
    /// When false, only `discard_count` is tracked; the step trace stays empty.
    pub record_steps: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { bound: BoundChoice::Safe, record_steps: true }
    }
}

/// What a single solver step discarded from one variable's candidate set.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Discarded {
    Element(u64),
    /// The half-open range `[start, end)`; `end = None` means unbounded.
    Range { start: u64, end: Option<u64> },
}

impl fmt::Display for Discarded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Discarded::Element(s) => write!(f, "{s}"),
            Discarded::Range { start, end: Some(end) } => write!(f, "[{start},{end})"),
            Discarded::Range { start, end: None } => write!(f, "[{start},oo)"),
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum StepKind {
    /// Removed one element below r from the finite part.
    FiniteDiscard,
    /// Advanced the tail start by one.
    TailAdvance,
    /// Deleted the tail entirely.
    TailDrop,
    /// Advanced the tail start by p at once (univariate solver only).
    Jump,
}

/// One discard step of a solver run.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct StepRecord {
    pub kind: StepKind,
    pub variable: usize,
    pub equation: usize,
    pub discarded: Discarded,
    /// Present iff `kind == Jump`.
    pub jump_p: Option<u64>,
}

impl fmt::Display for StepRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            StepKind::FiniteDiscard => "discard",
            StepKind::TailAdvance => "advance",
            StepKind::TailDrop => "drop-tail",
            StepKind::Jump => "jump",
        };
        write!(
            f,
            "{kind} x{} {} (equation {})",
            self.variable + 1,
            self.discarded,
            self.equation + 1
        )?;
        if let Some(p) = self.jump_p {
            write!(f, " p={p}")?;
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SolveOutcome {
    Solvable {
        /// The minimal solution, one canonical support per variable: every
        /// solution of the system is contained in it componentwise.
        supports: Vec<Support>,
        /// All supports empty: the system admits only the infinite solution.
        only_infinite: bool,
    },
    Unsolvable {
        /// Index of the equation whose free term was the unique finite minimum.
        equation: usize,
    },
}

impl SolveOutcome {
    pub fn is_solvable(&self) -> bool {
        matches!(self, SolveOutcome::Solvable { .. })
    }

    pub fn supports(&self) -> Option<&[Support]> {
        match self {
            SolveOutcome::Solvable { supports, .. } => Some(supports),
            SolveOutcome::Unsolvable { .. } => None,
        }
    }
}

/// Per-kind step totals, tracked even when the full trace is not recorded.
#[derive(Copy, Clone, Default, PartialEq, Eq, Debug)]
pub struct StepCounts {
    pub finite_discards: u64,
    pub tail_advances: u64,
    pub tail_drops: u64,
    pub jumps: u64,
    /// The largest finite jump length, if any jump occurred.
    pub max_jump_p: Option<u64>,
}

impl StepCounts {
    pub(crate) fn record(&mut self, step: &StepRecord) {
        match step.kind {
            StepKind::FiniteDiscard => self.finite_discards += 1,
            StepKind::TailAdvance => self.tail_advances += 1,
            StepKind::TailDrop => self.tail_drops += 1,
            StepKind::Jump => {
                self.jumps += 1;
                self.max_jump_p = self.max_jump_p.max(step.jump_p);
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SolveReport {
    pub outcome: SolveOutcome,
    /// The discard trace, empty when step recording was disabled.
    pub steps: Vec<StepRecord>,
    /// Total number of discard steps taken (each step counts once).
    pub discard_count: u64,
    pub counts: StepCounts,
}

impl SolveReport {
    pub fn count_kind(&self, kind: StepKind) -> u64 {
        match kind {
            StepKind::FiniteDiscard => self.counts.finite_discards,
            StepKind::TailAdvance => self.counts.tail_advances,
            StepKind::TailDrop => self.counts.tail_drops,
            StepKind::Jump => self.counts.jumps,
        }
    }

    /// The largest finite jump length, if any jump occurred.
    pub fn max_jump_p(&self) -> Option<u64> {
        self.counts.max_jump_p
    }
}

/// The tail-start bound does not fit in 64 bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveError {
    BoundOverflow { n: u64, r: u64, m: u64 },
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::BoundOverflow { n, r, m } => write!(
                f,
                "the tail-start bound for n={n}, r={r}, M={m} does not fit in 64 bits"
            ),
        }
    }
}

impl std::error::Error for SolveError {}

/// Per-variable candidate set of the solver: the finite part below r plus an
/// optional tail `[m, cap]`. Valuations at orders `<= r` only depend on the
/// finite part and the tail start, so the cap never enters a valuation.
struct SolverState {
    cap: u64,
    present: Vec<Vec<bool>>,
    /// Per variable: least present finite element `>= j`, for `j = 0..=r`.
    next_finite: Vec<Vec<Option<u64>>>,
    tail: Vec<Option<u64>>,
}

fn rebuild_next(present: &[bool], next: &mut [Option<u64>]) {
    let r = present.len();
    next[r] = None;
    for j in (0..r).rev() {
        next[j] = if present[j] { Some(j as u64) } else { next[j + 1] };
    }
}

impl SolverState {
    fn full(n: usize, r: u64, cap: u64) -> SolverState {
        let present = vec![vec![true; r as usize]; n];
        let mut next_finite = vec![vec![None; r as usize + 1]; n];
        for var in 0..n {
            rebuild_next(&present[var], &mut next_finite[var]);
        }
        SolverState { cap, present, next_finite, tail: vec![Some(r); n] }
    }

    fn valuation(&self, var: usize, j: u64) -> ExtNat {
        // A finite witness is below r and therefore below any tail start.
        match (self.next_finite[var][j as usize], self.tail[var]) {
            (Some(s), _) => ExtNat::Fin(s - j),
            (None, Some(m)) => ExtNat::Fin(m - j),
            (None, None) => ExtNat::Inf,
        }
    }

    /// Discards the valuation witness at `(var, j0)`: the least remaining
    /// element `>= j0`. Finite elements are removed one at a time; at the tail
    /// the start advances, or the whole tail is deleted once it reaches the cap.
    fn discard_witness(&mut self, var: usize, j0: u64, equation: usize) -> StepRecord {
        match self.next_finite[var][j0 as usize] {
            Some(s) => {
                self.present[var][s as usize] = false;
                rebuild_next(&self.present[var], &mut self.next_finite[var]);
                StepRecord {
                    kind: StepKind::FiniteDiscard,
                    variable: var,
                    equation,
                    discarded: Discarded::Element(s),
                    jump_p: None,
                }
            }
            None => {
                let m = self.tail[var].expect("a finite violated minimum has a witness");
                if m < self.cap {
                    self.tail[var] = Some(m + 1);
                    StepRecord {
                        kind: StepKind::TailAdvance,
                        variable: var,
                        equation,
                        discarded: Discarded::Element(m),
                        jump_p: None,
                    }
                } else {
                    self.tail[var] = None;
                    StepRecord {
                        kind: StepKind::TailDrop,
                        variable: var,
                        equation,
                        discarded: Discarded::Range { start: m, end: None },
                        jump_p: None,
                    }
                }
            }
        }
    }

    fn to_supports(&self) -> Vec<Support> {
        (0..self.present.len())
            .map(|var| {
                let finite = self.present[var]
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p)
                    .map(|(s, _)| s as u64);
                Support::new(finite, self.tail[var])
            })
            .collect()
    }
}

/// Computes the minimal solution of a system, or detects unsolvability.
///
/// Every variable starts with the full candidate set `{0..N}` (finite part
/// `{0..r-1}` plus a tail capped at the chosen bound N). While some equation
/// has a finite minimum attained exactly once, the witness of that minimum is
/// discarded; every such discard is forced, so any solution stays contained
/// in the state. If the unique minimum is a free term the system has no
/// solution. On success the surviving state is the minimal solution.
pub fn solve_minimal(
    system: &LinearSystem,
    bound: BoundChoice,
) -> Result<SolveReport, SolveError> {
    solve_minimal_with(system, SolveOptions { bound, ..SolveOptions::default() })
}

pub fn solve_minimal_with(
    system: &LinearSystem,
    options: SolveOptions,
) -> Result<SolveReport, SolveError> {
    let n = system.n();
    let r = system.r();
    let m = system.max_coefficient();
    let cap = match options.bound {
        BoundChoice::Paper => bound_paper(n as u64, r, m),
        BoundChoice::Safe => bound_safe(n as u64, r, m),
    }
    .map_err(|_| SolveError::BoundOverflow { n: n as u64, r, m })?;

    let snapshots: Vec<EquationSnapshot> =
        system.equations().iter().map(EquationSnapshot::of).collect();
    let mut state = SolverState::full(n, r, cap);
    let mut steps = Vec::new();
    let mut discard_count = 0u64;
    let mut counts = StepCounts::default();

    'scan: loop {
        for (l, eq) in snapshots.iter().enumerate() {
            match eq.status(&mut |var, order| state.valuation(var, order)) {
                EquationStatus::Satisfied => continue,
                EquationStatus::ViolatedAtFree { .. } => {
                    return Ok(SolveReport {
                        outcome: SolveOutcome::Unsolvable { equation: l },
                        steps,
                        discard_count,
                        counts,
                    });
                }
                EquationStatus::ViolatedAtSlot { slot, .. } => {
                    let record = state.discard_witness(slot.var, slot.order, l);
                    discard_count += 1;
                    counts.record(&record);
                    if options.record_steps {
                        steps.push(record);
                    }
                    continue 'scan;
                }
            }
        }
        let supports = state.to_supports();
        let only_infinite = supports.iter().all(Support::is_empty);
        return Ok(SolveReport {
            outcome: SolveOutcome::Solvable { supports, only_infinite },
            steps,
            discard_count,
            counts,
        });
    }
}
