//! Positivity and ultimate-positivity certificates for P-recursive sequences.
//!
//! The pipeline is: parse a [`recurrence::RecurrenceSpec`], normalize it,
//! build a [`witness::Witness`] from a ratio bracket `(p, q)`, scan for an
//! admissible window with [`prover::prove`], then [`certificate::emit`] a
//! certificate that [`certificate::check`] re-verifies from scratch.

pub mod exactmath;
pub mod recurrence;
pub mod spectrum;
pub mod witness;
pub mod prover;
pub mod certificate;
