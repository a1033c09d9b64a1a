//! Decision procedures for cyclic systems of dichotomic (±1) measurements.
//!
//! A cyclic system of rank n measures n two-valued properties q1..qn in n
//! overlapping contexts {q1,q2}, {q2,q3}, ..., {qn,q1}. Each property is
//! measured in exactly two contexts, and its two distributions need not agree
//! (signaling, context effects, or plain noise). This crate decides whether
//! such a system admits a maximally noncontextual description: a single joint
//! distribution over all 2n measurement copies that reproduces every observed
//! context and, across contexts, makes each property agree with itself with
//! the largest probability its two marginals allow.
//!
//! The crate is organised bottom-up:
//!
//! - [`rational`]: exact arithmetic helpers over [`rational::Rational`];
//! - [`sfunc`]: the odd/even signed-maximum functions the criteria are built
//!   from, plus interval-box range computation;
//! - [`model`]: system layouts, cycle decomposition, and validated systems;
//! - [`criterion`]: the rank-n decision criteria and interval verdicts;
//! - [`coupling`]: explicit witnessing joint distributions;
//! - [`oracle`]: an independent exact linear-programming feasibility check;
//! - [`stats`]: conservative moment boxes from replicated trial data, and an
//!   embedded reference dataset.
//!
//! Everything that feeds a verdict is computed in exact rational arithmetic;
//! floating point appears only in the t-distribution tail machinery of
//! [`stats`], whose outputs are conservative by construction.

#![no_std]
#![forbid(unsafe_code)]
// Error variants carry the exact rationals of the violated inequality; they
// are the user-facing product on cold paths, so their size is accepted.
#![allow(clippy::result_large_err)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod coupling;
pub mod criterion;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod sfunc;
pub mod stats;

pub use coupling::JointDistribution;
pub use criterion::Verdict;
pub use model::{CyclicSystem, SystemLayout};
pub use rational::Rational;
pub use sfunc::{IntervalBox, SignVector};
