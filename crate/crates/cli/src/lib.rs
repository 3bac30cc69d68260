//! Fixture loading, check suites and report rendering behind the `kgw`
//! binary.

pub mod fixture;
pub mod report;
pub mod suites;
