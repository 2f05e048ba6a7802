//! File formats and instance generation shared by the `tropdiff` binary and
//! the test suites.

pub mod formats;
pub mod gen;
