//! The tropical value domain: non-negative integers extended with infinity.

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

/// A non-negative integer extended with a distinguished infinity.
///
/// This is the domain of every coefficient and valuation in the crate.
/// `Inf` is absorbing under addition and is the identity of `min`
/// (via the derived total order, where `Inf` is the greatest element).
///
/// Finite values live in `u64`; addition never wraps. The `+` operator
/// panics on overflow, and [`ExtNat::checked_add`] is available where an
/// overflow must be reported instead.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ExtNat {
    Fin(u64),
    Inf,
}

impl ExtNat {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtNat::Fin(_))
    }

    /// The finite value, if any.
    pub fn finite(self) -> Option<u64> {
        match self {
            ExtNat::Fin(v) => Some(v),
            ExtNat::Inf => None,
        }
    }

    /// Overflow-reporting addition; `None` only when two finite values
    /// exceed `u64::MAX`.
    pub fn checked_add(self, rhs: ExtNat) -> Option<ExtNat> {
        match (self, rhs) {
            (ExtNat::Fin(a), ExtNat::Fin(b)) => a.checked_add(b).map(ExtNat::Fin),
            _ => Some(ExtNat::Inf),
        }
    }
}

impl From<u64> for ExtNat {
    fn from(v: u64) -> Self {
        ExtNat::Fin(v)
    }
}

impl Add for ExtNat {
    type Output = ExtNat;

    #[track_caller]
    fn add(self, rhs: ExtNat) -> ExtNat {
        self.checked_add(rhs)
            .expect("ExtNat addition overflowed u64")
    }
}

impl Add<u64> for ExtNat {
    type Output = ExtNat;

    #[track_caller]
    fn add(self, rhs: u64) -> ExtNat {
        self + ExtNat::Fin(rhs)
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Fin(v) => write!(f, "{v}"),
            ExtNat::Inf => write!(f, "inf"),
        }
    }
}

/// Error parsing an [`ExtNat`] from text (`"inf"` or a decimal `u64`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseExtNatError {
    pub input: String,
}

impl fmt::Display for ParseExtNatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "expected a non-negative integer or \"inf\", got {:?}", self.input)
    }
}

impl std::error::Error for ParseExtNatError {}

impl FromStr for ExtNat {
    type Err = ParseExtNatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "inf" {
            return Ok(ExtNat::Inf);
        }
        s.parse::<u64>()
            .map(ExtNat::Fin)
            .map_err(|_| ParseExtNatError { input: s.to_string() })
    }
}

/// Overflow in a checked arithmetic computation on `u64` quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArithmeticOverflow;

impl fmt::Display for ArithmeticOverflow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "arithmetic overflow: result does not fit in 64 bits")
    }
}

impl std::error::Error for ArithmeticOverflow {}
