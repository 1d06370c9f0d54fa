//! Oracle-model simulator for quantum collision and claw finding.
//!
//! Black-box functions count every evaluation ([`oracle`]); the solvers in
//! [`collision`], [`claw`] and [`baseline`] report their own query counts, and
//! the [`harness`] checks those against the counters while running seeded
//! Monte-Carlo sweeps.

pub mod baseline;
pub mod claw;
pub mod collision;
pub mod grover;
pub mod harness;
pub mod oracle;
pub mod table;
