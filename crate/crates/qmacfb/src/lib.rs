//! Achievable rate regions for quantum multiple-access channels with
//! measurement-generated classical feedback, plus a Monte Carlo simulator
//! of the underlying block-Markov coding schemes.
//!
//! Modules:
//! - [`qcore`]: density operators, Kraus channels, quantum instruments,
//!   and the quantum binary adder MAC.
//! - [`qinfo`]: von Neumann entropy, relative entropy, mutual information,
//!   and the hypothesis-testing divergence.
//! - [`ensemble`]: classical-quantum joint states built from an input
//!   ensemble, a channel, and a feedback instrument.
//! - [`regions`]: rate-bound evaluation, the adder closed form, and
//!   region-boundary tracing/comparison.
//! - [`codesim`]: multiplex Bayesian networks, random codebooks,
//!   typicality, and block-Markov scheme simulation.

pub mod codesim;
pub mod ensemble;
pub mod qcore;
pub mod qinfo;
pub mod regions;
