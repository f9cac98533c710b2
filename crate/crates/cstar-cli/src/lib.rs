//! Report builders behind the `cstar` binary.

pub mod report;
