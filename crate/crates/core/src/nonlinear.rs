//! Tropical non-linear differential equations: formal minima of monomials
//! `a_P + sum of x_i^(j) over a finite multiset P`, their evaluation, the
//! solution criterion, and certificate verification.

use std::collections::BTreeMap;
use std::fmt;

use crate::extnat::ExtNat;
use crate::linear::{Slot, SystemError};
use crate::support::Support;

/// A monomial `coeff + sum of the factor slots`, where `factors` is a
/// multiset (repetition allowed); the empty multiset is a free term.
/// Coefficients are finite: a monomial with an infinite coefficient is
/// simply absent from its equation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Monomial {
    coeff: u64,
    factors: Vec<Slot>,
}

impl Monomial {
    pub fn new(coeff: u64, factors: impl IntoIterator<Item = Slot>) -> Monomial {
        let mut factors: Vec<Slot> = factors.into_iter().collect();
        factors.sort_unstable();
        Monomial { coeff, factors }
    }

    pub fn coeff(&self) -> u64 {
        self.coeff
    }

    /// The factor multiset, sorted.
    pub fn factors(&self) -> &[Slot] {
        &self.factors
    }

    /// The multiset cardinality, counted with multiplicity.
    pub fn degree(&self) -> u64 {
        self.factors.len() as u64
    }

    pub fn is_free(&self) -> bool {
        self.factors.is_empty()
    }

    /// `coeff + sum of Val(i, j) over the factors`, infinity as soon as one
    /// factor valuation is infinite.
    pub fn value(&self, supports: &[Support]) -> ExtNat {
        self.value_with(&mut |var, order| supports[var].valuation(order))
    }

    pub(crate) fn value_with(
        &self,
        valuation: &mut impl FnMut(usize, u64) -> ExtNat,
    ) -> ExtNat {
        let mut acc = ExtNat::Fin(self.coeff);
        for slot in &self.factors {
            acc = acc + valuation(slot.var, slot.order);
            if acc == ExtNat::Inf {
                return ExtNat::Inf;
            }
        }
        acc
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coeff)?;
        for slot in &self.factors {
            write!(f, "*{slot}")?;
        }
        Ok(())
    }
}

/// Classification of one non-linear equation against a tuple of supports.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum NonlinearStatus {
    Satisfied,
    /// A finite minimum attained by exactly one monomial (by index).
    Violated { monomial: usize, value: u64 },
}

/// A formal minimum over monomials. Monomials with identical factor
/// multisets merge by minimum coefficient at construction, so "attained at
/// least twice" always counts distinct multisets.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NonlinearEquation {
    monomials: Vec<Monomial>,
}

impl NonlinearEquation {
    pub fn new(monomials: impl IntoIterator<Item = Monomial>) -> NonlinearEquation {
        let mut merged: BTreeMap<Vec<Slot>, u64> = BTreeMap::new();
        for m in monomials {
            merged
                .entry(m.factors)
                .and_modify(|c| *c = (*c).min(m.coeff))
                .or_insert(m.coeff);
        }
        let mut monomials: Vec<Monomial> = merged
            .into_iter()
            .map(|(factors, coeff)| Monomial { coeff, factors })
            .collect();
        // Factor-lex order with the free monomial last.
        monomials.sort_by_key(|m| m.factors.is_empty());
        NonlinearEquation { monomials }
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn status(&self, supports: &[Support]) -> NonlinearStatus {
        self.status_with(&mut |var, order| supports[var].valuation(order))
    }

    pub(crate) fn status_with(
        &self,
        valuation: &mut impl FnMut(usize, u64) -> ExtNat,
    ) -> NonlinearStatus {
        let mut min = ExtNat::Inf;
        let mut attained = 0u32;
        let mut at = 0usize;
        for (idx, m) in self.monomials.iter().enumerate() {
            let value = m.value_with(valuation);
            if value < min {
                min = value;
                attained = 1;
                at = idx;
            } else if value == min && value.is_finite() {
                attained += 1;
            }
        }
        match min {
            ExtNat::Inf => NonlinearStatus::Satisfied,
            ExtNat::Fin(value) => {
                if attained >= 2 {
                    NonlinearStatus::Satisfied
                } else {
                    NonlinearStatus::Violated { monomial: at, value }
                }
            }
        }
    }
}

/// A system of tropical non-linear differential equations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NonlinearSystem {
    n: usize,
    r: u64,
    equations: Vec<NonlinearEquation>,
}

impl NonlinearSystem {
    pub fn new(
        n: usize,
        r: u64,
        equations: Vec<NonlinearEquation>,
    ) -> Result<NonlinearSystem, SystemError> {
        for (l, eq) in equations.iter().enumerate() {
            for m in eq.monomials() {
                for &slot in m.factors() {
                    if slot.var >= n || slot.order > r {
                        return Err(SystemError { equation: l, slot, n, r });
                    }
                }
            }
        }
        Ok(NonlinearSystem { n, r, equations })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn k(&self) -> usize {
        self.equations.len()
    }

    pub fn equations(&self) -> &[NonlinearEquation] {
        &self.equations
    }

    /// The maximum monomial degree d; 0 for a system of pure free terms.
    pub fn degree(&self) -> u64 {
        self.equations
            .iter()
            .flat_map(|eq| eq.monomials())
            .map(Monomial::degree)
            .max()
            .unwrap_or(0)
    }

    /// The largest coefficient M, 0 if there is none. Recomputed from the
    /// stored equations.
    pub fn max_coefficient(&self) -> u64 {
        self.equations
            .iter()
            .flat_map(|eq| eq.monomials())
            .map(Monomial::coeff)
            .max()
            .unwrap_or(0)
    }

    /// True iff in every equation the minimum over monomial values is
    /// infinite or attained by at least two distinct monomials.
    pub fn is_solution(&self, supports: &[Support]) -> bool {
        assert_eq!(supports.len(), self.n, "expected one support per variable");
        self.equations
            .iter()
            .all(|eq| eq.status(supports) == NonlinearStatus::Satisfied)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundN1Error {
    /// The bound is only defined for systems of degree at least 1.
    ZeroDegree,
    /// The bound exceeds the 64-bit range, so it cannot serve as an
    /// enumeration or certificate cap.
    ResultTooLarge,
}

impl fmt::Display for BoundN1Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundN1Error::ZeroDegree => write!(f, "the certificate bound requires degree d >= 1"),
            BoundN1Error::ResultTooLarge => {
                write!(f, "the certificate bound does not fit in 64 bits")
            }
        }
    }
}

impl std::error::Error for BoundN1Error {}

/// `n! * (M + r*d) * d^n`: the bound on the tail start of a small solution,
/// and hence the certificate size cap for solvable non-linear systems.
pub fn bound_n1(n: u64, r: u64, m: u64, d: u64) -> Result<u64, BoundN1Error> {
    if d == 0 {
        return Err(BoundN1Error::ZeroDegree);
    }
    let mut factorial: u128 = 1;
    for i in 2..=n {
        factorial = factorial
            .checked_mul(i as u128)
            .ok_or(BoundN1Error::ResultTooLarge)?;
    }
    let base = (m as u128)
        .checked_add((r as u128).checked_mul(d as u128).ok_or(BoundN1Error::ResultTooLarge)?)
        .ok_or(BoundN1Error::ResultTooLarge)?;
    let mut power: u128 = 1;
    for _ in 0..n {
        power = power.checked_mul(d as u128).ok_or(BoundN1Error::ResultTooLarge)?;
    }
    let value = factorial
        .checked_mul(base)
        .and_then(|x| x.checked_mul(power))
        .ok_or(BoundN1Error::ResultTooLarge)?;
    u64::try_from(value).map_err(|_| BoundN1Error::ResultTooLarge)
}

/// Checks a solvability certificate: every finite part must lie in `[0, r]`
/// (inclusive), every tail start must be at most `tail_cap`, and the supports
/// must solve the system. Runs in time polynomial in the certificate and
/// system size.
pub fn verify_certificate(
    system: &NonlinearSystem,
    supports: &[Support],
    tail_cap: u64,
) -> bool {
    if supports.len() != system.n() {
        return false;
    }
    for s in supports {
        if s.finite_part().iter().any(|&e| e > system.r()) {
            return false;
        }
        if let Some(m) = s.tail() {
            if m > tail_cap {
                return false;
            }
        }
    }
    system.is_solution(supports)
}
