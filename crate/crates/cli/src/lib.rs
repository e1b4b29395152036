//! Verification harness for the cylindric cluster R-matrix engine: named
//! check suites, reports, and replay of oracle witnesses.

pub mod checks_exact;
pub mod checks_oracle;
pub mod checks_props;
pub mod config;
pub mod report;
pub mod suite;
