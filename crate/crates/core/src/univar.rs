//! The one-variable solver: finite-type discards plus jumps.
//!
//! For `n = 1` the general solver's tail advances can be batched: when every
//! violated equation pins its unique minimum on the tail start, the tail can
//! jump forward by the largest step that no equation's competing terms forbid,
//! replacing that many single-element discards. The answer is identical to
//! [`solve_minimal`](crate::linear::solve_minimal); the step count drops to
//! `O(r)`.

use std::fmt;

use crate::extnat::ExtNat;
use crate::linear::{
    Discarded, EquationStatus, LinearEquation, LinearSystem, SolveOutcome, SolveReport, StepKind,
    StepRecord,
};
use crate::support::Support;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnivarError {
    /// The solver only handles systems in one variable.
    NotUnivariate { n: usize },
    /// A jump was requested in a state that does not admit one.
    JumpPrecondition(String),
    /// A derived bound failed at runtime. This signals a gap in the bound
    /// reasoning, never silently continues.
    InternalBoundViolation(String),
}

impl fmt::Display for UnivarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnivarError::NotUnivariate { n } => {
                write!(f, "the jump solver requires exactly one variable, got n={n}")
            }
            UnivarError::JumpPrecondition(reason) => write!(f, "jump precondition failed: {reason}"),
            UnivarError::InternalBoundViolation(detail) => {
                write!(f, "internal invariant violated: {detail}")
            }
        }
    }
}

impl std::error::Error for UnivarError {}

/// The maximal admissible advance of the tail start for one violated equation.
///
/// Requires that `t`'s tail starts at `s0` and that the equation's unique
/// finite minimum sits at a slot whose valuation witness is `s0`. Competitors
/// are the terms whose witness lies below the tail start, plus the free term
/// when finite; the result is the gap between the nearest competitor and the
/// pivot term, at least 1, or infinity when no competitor exists.
pub fn jump_length(eq: &LinearEquation, t: &Support, s0: u64) -> Result<ExtNat, UnivarError> {
    if t.tail() != Some(s0) {
        return Err(UnivarError::JumpPrecondition(format!(
            "the state's tail start is {:?}, not s0 = {s0}",
            t.tail()
        )));
    }
    let supports = std::slice::from_ref(t);
    let (pivot, value) = match eq.status(supports) {
        EquationStatus::ViolatedAtSlot { slot, value } => (slot, value),
        other => {
            return Err(UnivarError::JumpPrecondition(format!(
                "the equation is not violated at a slot (status {other:?})"
            )))
        }
    };
    let witness = t
        .least_member_at_least(pivot.order)
        .expect("a violated slot has a finite valuation witness");
    if witness != s0 {
        return Err(UnivarError::JumpPrecondition(format!(
            "the violated slot is witnessed by {witness}, not by the tail start {s0}"
        )));
    }

    let mut nearest = eq.free();
    for (slot, coeff) in eq.terms() {
        if let Some(w) = t.least_member_at_least(slot.order) {
            if w < s0 {
                nearest = nearest.min(ExtNat::Fin(coeff) + (w - slot.order));
            }
        }
    }
    Ok(match nearest {
        ExtNat::Inf => ExtNat::Inf,
        // The pivot term is the unique minimum, so every competitor is
        // strictly above it and the gap is at least 1.
        ExtNat::Fin(c) => ExtNat::Fin(c - value),
    })
}

/// The admissible advance of one violated equation during a jump.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct JumpCandidate {
    pub equation: usize,
    /// The derivative order of the equation's unique-minimum slot.
    pub pivot_order: u64,
    pub p: ExtNat,
}

/// A planned jump: per-equation admissible advances and their maximum.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct JumpComputation {
    /// The current tail start s0.
    pub tail_start: u64,
    /// One entry per violated equation; every `p` is at least 1.
    pub candidates: Vec<JumpCandidate>,
    /// The maximum of the candidates' advances.
    pub p: ExtNat,
    /// The least-indexed equation attaining the maximum.
    pub chosen_equation: usize,
}

/// Plans a jump from the state `t`: every equation must be satisfied or
/// violated with its witness on the tail start, and at least one must be
/// violated.
pub fn plan_jump(system: &LinearSystem, t: &Support) -> Result<JumpComputation, UnivarError> {
    if system.n() != 1 {
        return Err(UnivarError::NotUnivariate { n: system.n() });
    }
    let s0 = t
        .tail()
        .ok_or_else(|| UnivarError::JumpPrecondition("the state has no tail".to_string()))?;
    let supports = std::slice::from_ref(t);
    let mut candidates = Vec::new();
    for (l, eq) in system.equations().iter().enumerate() {
        match eq.status(supports) {
            EquationStatus::Satisfied => {}
            EquationStatus::ViolatedAtFree { .. } => {
                return Err(UnivarError::JumpPrecondition(format!(
                    "equation {} is violated at its free term; the system is unsolvable",
                    l + 1
                )))
            }
            EquationStatus::ViolatedAtSlot { slot, .. } => {
                let witness = t
                    .least_member_at_least(slot.order)
                    .expect("a violated slot has a finite valuation witness");
                if witness != s0 {
                    return Err(UnivarError::JumpPrecondition(format!(
                        "equation {} admits the finite-type discard of {witness}",
                        l + 1
                    )));
                }
                let p = jump_length(eq, t, s0)?;
                candidates.push(JumpCandidate { equation: l, pivot_order: slot.order, p });
            }
        }
    }
    if candidates.is_empty() {
        return Err(UnivarError::JumpPrecondition("no equation is violated".to_string()));
    }
    let p = candidates.iter().map(|c| c.p).max().expect("nonempty");
    let chosen_equation =
        candidates.iter().find(|c| c.p == p).expect("maximum is attained").equation;
    Ok(JumpComputation { tail_start: s0, candidates, p, chosen_equation })
}

/// Per-step state of the univariate solver: the finite part below r plus an
/// uncapped tail. No explicit tail cap is needed: finite jumps are bounded by
/// the coefficient range and an infinite jump deletes the tail outright; a
/// violated bound surfaces as [`UnivarError::InternalBoundViolation`].
struct UniState {
    present: Vec<bool>,
    /// Least present finite element `>= j`, for `j = 0..=r`.
    next_finite: Vec<Option<u64>>,
    tail: Option<u64>,
}

impl UniState {
    fn full(r: u64) -> UniState {
        let present = vec![true; r as usize];
        let mut next_finite = vec![None; r as usize + 1];
        let top = present.len();
        rebuild_next_below(&present, &mut next_finite, top);
        UniState { present, next_finite, tail: Some(r) }
    }

    fn remove_finite(&mut self, s: u64) {
        self.present[s as usize] = false;
        // Witness pointers above s are unaffected by removing s.
        rebuild_next_below(&self.present, &mut self.next_finite, s as usize + 1);
    }

    fn to_support(&self) -> Support {
        let finite = self
            .present
            .iter()
            .enumerate()
            .filter(|(_, &p)| p)
            .map(|(s, _)| s as u64);
        Support::new(finite, self.tail)
    }
}

/// Recomputes `next[j]` for `j < top`, assuming entries at and above `top`
/// are current.
fn rebuild_next_below(present: &[bool], next: &mut [Option<u64>], top: usize) {
    if top > present.len() {
        next[present.len()] = None;
    }
    for j in (0..top.min(present.len())).rev() {
        next[j] = if present[j] { Some(j as u64) } else { next[j + 1] };
    }
}

/// Per-equation classification against the solver state, carrying what a
/// jump needs: the nearest competitor is the minimum over finite-witnessed
/// terms and the free term, matching [`jump_length`].
enum UniStatus {
    Satisfied,
    ViolatedAtFree,
    /// Unique minimum at a slot witnessed below r: a finite-type discard.
    ViolatedFiniteWitness { witness: u64 },
    /// Unique minimum at a tail-witnessed slot; `p = competitor - value`.
    ViolatedTailWitness { value: u64, competitor: ExtNat },
}

fn classify(snapshot: &crate::linear::EquationSnapshot, state: &UniState) -> UniStatus {
    let mut min = ExtNat::Inf;
    let mut attained = 0u32;
    let mut min_finite_witness: Option<u64> = None;
    let mut competitor = snapshot.free;
    for &(slot, coeff) in &snapshot.terms {
        let j = slot.order;
        let finite_witness = state.next_finite[j as usize];
        let term = match (finite_witness, state.tail) {
            (Some(s), _) => ExtNat::Fin(s - j) + coeff,
            (None, Some(m)) => ExtNat::Fin(m - j) + coeff,
            (None, None) => ExtNat::Inf,
        };
        if finite_witness.is_some() {
            competitor = competitor.min(term);
        }
        if term < min {
            min = term;
            attained = 1;
            min_finite_witness = finite_witness;
        } else if term == min && term.is_finite() {
            attained += 1;
        }
    }
    let mut at_free = false;
    if let ExtNat::Fin(free) = snapshot.free {
        let term = ExtNat::Fin(free);
        if term < min {
            min = term;
            attained = 1;
            at_free = true;
        } else if term == min {
            attained += 1;
        }
    }
    match min {
        ExtNat::Inf => UniStatus::Satisfied,
        ExtNat::Fin(value) => {
            if attained >= 2 {
                UniStatus::Satisfied
            } else if at_free {
                UniStatus::ViolatedAtFree
            } else {
                match min_finite_witness {
                    Some(witness) => UniStatus::ViolatedFiniteWitness { witness },
                    None => UniStatus::ViolatedTailWitness { value, competitor },
                }
            }
        }
    }
}

fn finish(outcome: SolveOutcome, steps: Vec<StepRecord>) -> SolveReport {
    let mut counts = crate::linear::StepCounts::default();
    for step in &steps {
        counts.record(step);
    }
    let discard_count = steps.len() as u64;
    SolveReport { outcome, steps, discard_count, counts }
}

/// Solves an `n = 1` system with the same outcome and minimal solution as the
/// general solver, in at most `2r + 2` steps.
///
/// Each round classifies every equation. A violated free term means the
/// system is unsolvable (discards only raise valuations, so the violation
/// would persist). Otherwise a finite-type discard is preferred: the least
/// violated equation whose unique minimum is witnessed below r gives up that
/// witness. When every violated equation pins its minimum on the tail start,
/// the tail jumps by the planned maximum, or is deleted when the jump is
/// unbounded.
pub fn solve_univar(system: &LinearSystem) -> Result<SolveReport, UnivarError> {
    if system.n() != 1 {
        return Err(UnivarError::NotUnivariate { n: system.n() });
    }
    let r = system.r();
    let m = system.max_coefficient();
    let step_limit = 2u64.saturating_mul(r).saturating_add(2);
    // A finite jump lands the tail term on a competitor: a finite-part term
    // bounds the new start by 2r + M - 1, the free term by r + M.
    let jump_limit = if r >= 1 {
        2u64.saturating_mul(r).saturating_add(m).saturating_sub(1)
    } else {
        r.saturating_add(m)
    };

    let snapshots: Vec<crate::linear::EquationSnapshot> =
        system.equations().iter().map(crate::linear::EquationSnapshot::of).collect();
    let mut state = UniState::full(r);
    let mut steps: Vec<StepRecord> = Vec::new();

    loop {
        let mut free_violated: Option<usize> = None;
        let mut finite_step: Option<(usize, u64)> = None;
        let mut any_violated = false;
        // The maximal admissible jump over the violated tail-witnessed
        // equations, with the least equation index attaining it.
        let mut jump: Option<(ExtNat, usize)> = None;
        for (l, eq) in snapshots.iter().enumerate() {
            match classify(eq, &state) {
                UniStatus::Satisfied => {}
                UniStatus::ViolatedAtFree => {
                    any_violated = true;
                    if free_violated.is_none() {
                        free_violated = Some(l);
                    }
                }
                UniStatus::ViolatedFiniteWitness { witness } => {
                    any_violated = true;
                    if finite_step.is_none() {
                        finite_step = Some((l, witness));
                    }
                }
                UniStatus::ViolatedTailWitness { value, competitor } => {
                    any_violated = true;
                    let p = match competitor {
                        ExtNat::Inf => ExtNat::Inf,
                        ExtNat::Fin(c) => ExtNat::Fin(c - value),
                    };
                    if jump.is_none_or(|(best, _)| p > best) {
                        jump = Some((p, l));
                    }
                }
            }
        }

        if !any_violated {
            let support = state.to_support();
            let only_infinite = support.is_empty();
            return Ok(finish(
                SolveOutcome::Solvable { supports: vec![support], only_infinite },
                steps,
            ));
        }
        if let Some(equation) = free_violated {
            return Ok(finish(SolveOutcome::Unsolvable { equation }, steps));
        }

        if let Some((equation, s)) = finite_step {
            state.remove_finite(s);
            steps.push(StepRecord {
                kind: StepKind::FiniteDiscard,
                variable: 0,
                equation,
                discarded: Discarded::Element(s),
                jump_p: None,
            });
        } else {
            let (p, equation) =
                jump.expect("some equation is violated with a tail-witnessed minimum");
            let s0 = state.tail.expect("a tail-witnessed minimum requires a tail");
            match p {
                ExtNat::Inf => {
                    state.tail = None;
                    steps.push(StepRecord {
                        kind: StepKind::TailDrop,
                        variable: 0,
                        equation,
                        discarded: Discarded::Range { start: s0, end: None },
                        jump_p: None,
                    });
                }
                ExtNat::Fin(p) => {
                    let new_tail = s0.checked_add(p).ok_or_else(|| {
                        UnivarError::InternalBoundViolation(format!(
                            "jump of {p} from tail start {s0} overflowed"
                        ))
                    })?;
                    if new_tail > jump_limit {
                        return Err(UnivarError::InternalBoundViolation(format!(
                            "a jump moved the tail start to {new_tail}, beyond the \
                             derivable limit {jump_limit} (r={r}, M={m})"
                        )));
                    }
                    state.tail = Some(new_tail);
                    steps.push(StepRecord {
                        kind: StepKind::Jump,
                        variable: 0,
                        equation,
                        discarded: Discarded::Range { start: s0, end: Some(new_tail) },
                        jump_p: Some(p),
                    });
                }
            }
        }

        if steps.len() as u64 > step_limit {
            return Err(UnivarError::InternalBoundViolation(format!(
                "step count {} exceeded the limit {step_limit} (r={r})",
                steps.len()
            )));
        }
    }
}
