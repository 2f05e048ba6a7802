//! proptest strategies shared by the unit tests of several modules.

use proptest::prelude::*;

use crate::extnat::ExtNat;
use crate::linear::{LinearEquation, LinearSystem, Slot};
use crate::support::Support;

pub fn arb_support() -> impl Strategy<Value = Support> {
    (
        proptest::collection::btree_set(0u64..10, 0..5),
        proptest::option::of(0u64..14),
    )
        .prop_map(|(finite, tail)| Support::new(finite, tail))
}

pub fn arb_supports(n: usize) -> impl Strategy<Value = Vec<Support>> {
    proptest::collection::vec(arb_support(), n..=n)
}

fn arb_equation(n: usize, r: u64, max_coeff: u64) -> impl Strategy<Value = LinearEquation> {
    let terms = proptest::collection::vec((0..n, 0..=r, 0..=max_coeff), 0..=4);
    let free = proptest::option::of(0..=max_coeff);
    (terms, free).prop_map(|(terms, free)| {
        LinearEquation::new(
            terms.into_iter().map(|(var, order, coeff)| (Slot::new(var, order), coeff)),
            free.map(ExtNat::Fin).unwrap_or(ExtNat::Inf),
        )
    })
}

pub fn arb_linear_system(
    max_n: usize,
    max_r: u64,
    max_k: usize,
    max_coeff: u64,
) -> impl Strategy<Value = LinearSystem> {
    (1..=max_n, 0..=max_r).prop_flat_map(move |(n, r)| {
        proptest::collection::vec(arb_equation(n, r, max_coeff), 1..=max_k)
            .prop_map(move |eqs| LinearSystem::new(n, r, eqs).expect("slots in range"))
    })
}
