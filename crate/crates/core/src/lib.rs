//! Fixed-outage transmission rates over Rayleigh block-fading channels,
//! with and without hybrid-ARQ, plus a message-level protocol simulator.
//!
//! Module map: [`special`] holds the scalar special functions, [`channel`]
//! the per-block mutual-information law and its sums, [`outage`] the
//! fixed-length ε-outage capacity, [`harq`] the incremental-redundancy and
//! Chase-combining analysis, [`sim`] the Monte Carlo protocol simulator and
//! [`cli`] the CSV-producing command-line front end.

// `!(x > 0.0)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod cli;
pub mod error;
pub mod harq;
pub mod outage;
pub mod rng;
pub mod sim;
pub mod special;
