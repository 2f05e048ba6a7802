//! Supports of power series: subsets of the non-negative integers, stored as a
//! finite part plus an optional cofinite tail, and their valuations.
//!
//! A support `S` describes which exponents carry a nonzero coefficient. The
//! valuation `Val_S(j)` is the order at zero of the j-th derivative of a
//! series with support `S`: the least `s - j` over members `s >= j`, infinity
//! when no member qualifies.

use std::fmt;

use crate::extnat::ExtNat;

/// A subset of the non-negative integers.
///
/// Stored in normalized form: a strictly increasing finite part, plus an
/// optional tail start `m` meaning every integer `>= m` is a member. The
/// constructor drops finite elements `>= m` (they are already members via the
/// tail), so equal sets always compare equal structurally.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Support {
    finite: Vec<u64>,
    tail: Option<u64>,
}

impl Support {
    /// Builds a normalized support from any collection of members plus an
    /// optional cofinite tail. Duplicates and elements covered by the tail
    /// are dropped; membership is unchanged.
    pub fn new(finite: impl IntoIterator<Item = u64>, tail: Option<u64>) -> Support {
        let mut finite: Vec<u64> = match tail {
            Some(m) => finite.into_iter().filter(|&s| s < m).collect(),
            None => finite.into_iter().collect(),
        };
        finite.sort_unstable();
        finite.dedup();
        Support { finite, tail }
    }

    /// The empty set.
    pub fn empty() -> Support {
        Support { finite: Vec::new(), tail: None }
    }

    /// The cofinite set `[m, oo)`.
    pub fn from_tail(m: u64) -> Support {
        Support { finite: Vec::new(), tail: Some(m) }
    }

    pub fn is_empty(&self) -> bool {
        self.finite.is_empty() && self.tail.is_none()
    }

    /// The members below the tail start, strictly increasing.
    pub fn finite_part(&self) -> &[u64] {
        &self.finite
    }

    /// The tail start `m`, when the set contains all integers `>= m`.
    pub fn tail(&self) -> Option<u64> {
        self.tail
    }

    pub fn contains(&self, s: u64) -> bool {
        if let Some(m) = self.tail {
            if s >= m {
                return true;
            }
        }
        self.finite.binary_search(&s).is_ok()
    }

    /// The least member `>= j`, if any. This is the witness realizing
    /// `valuation(j)` when that valuation is finite.
    pub fn least_member_at_least(&self, j: u64) -> Option<u64> {
        let fin = match self.finite.binary_search(&j) {
            Ok(_) => Some(j),
            Err(pos) => self.finite.get(pos).copied(),
        };
        let tail = self.tail.map(|m| m.max(j));
        match (fin, tail) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (Some(a), None) => Some(a),
            (None, b) => b,
        }
    }

    /// `Val_S(j)`: the least `s - j` over members `s >= j`, infinity when no
    /// such member exists.
    pub fn valuation(&self, j: u64) -> ExtNat {
        match self.least_member_at_least(j) {
            Some(s) => ExtNat::Fin(s - j),
            None => ExtNat::Inf,
        }
    }

    /// The valuations for every derivative order `0..=r`.
    pub fn valuation_vector(&self, r: u64) -> ValuationVector {
        ValuationVector { entries: (0..=r).map(|j| self.valuation(j)).collect() }
    }

    /// Set union. The valuation of the join is the pointwise minimum of the
    /// operands' valuations.
    pub fn join(&self, other: &Support) -> Support {
        let tail = match (self.tail, other.tail) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, None) => a,
            (None, b) => b,
        };
        Support::new(
            self.finite.iter().chain(other.finite.iter()).copied(),
            tail,
        )
    }

    /// True iff every member of `self` is a member of `other`.
    pub fn is_subset(&self, other: &Support) -> bool {
        if !self.finite.iter().all(|&s| other.contains(s)) {
            return false;
        }
        match self.tail {
            None => true,
            Some(ms) => match other.tail {
                None => false,
                // Members of self's tail at or beyond other's tail start are
                // covered; the stretch in between must sit in other's finite part.
                Some(mt) => (ms..mt).all(|s| other.contains(s)),
            },
        }
    }

    /// Rewrites the set so that the finite part lies below `r` and any member
    /// `>= r` starts a cofinite tail (adding every larger integer). Membership
    /// may grow, but valuations at orders `0..=r` are unchanged; if no member
    /// reaches `r` the set is returned as is.
    pub fn canonicalize(&self, r: u64) -> Support {
        match self.least_member_at_least(r) {
            None => self.clone(),
            Some(m_new) => {
                let mut finite: Vec<u64> =
                    self.finite.iter().copied().filter(|&s| s < m_new).collect();
                if let Some(m_old) = self.tail {
                    // Old tail members below the new start become explicit.
                    finite.extend(m_old..m_new);
                }
                Support::new(finite, Some(m_new))
            }
        }
    }

    /// One past the largest finite element or tail start mentioned by either
    /// set. Beyond this horizon both valuations are determined by tails alone,
    /// so pointwise valuation comparisons need only range over `0..=horizon`.
    pub fn horizon(&self, other: &Support) -> u64 {
        let top = |s: &Support| {
            s.finite
                .last()
                .copied()
                .into_iter()
                .chain(s.tail)
                .max()
                .unwrap_or(0)
        };
        1 + top(self).max(top(other))
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "{{}}");
        }
        if !self.finite.is_empty() {
            write!(f, "{{")?;
            for (idx, s) in self.finite.iter().enumerate() {
                if idx > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{s}")?;
            }
            write!(f, "}}")?;
            if self.tail.is_some() {
                write!(f, "+")?;
            }
        }
        if let Some(m) = self.tail {
            write!(f, "[{m},oo)")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The valuations `Val_S(j)` for `j = 0..=r`, batched.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ValuationVector {
    entries: Vec<ExtNat>,
}

impl ValuationVector {
    pub fn entries(&self) -> &[ExtNat] {
        &self.entries
    }

    /// Entry `j`; panics if `j` exceeds the order the vector was built for.
    pub fn entry(&self, j: u64) -> ExtNat {
        self.entries[j as usize]
    }

    /// The largest order covered.
    pub fn max_order(&self) -> u64 {
        (self.entries.len() - 1) as u64
    }
}
