//! Solvers and verification oracles for the Bayesian persuasion problem.
//!
//! A sender who observes the state of nature commits to a signaling scheme;
//! a Bayesian receiver sees the signal and picks an action. This crate
//! computes optimal and approximately optimal incentive-compatible direct
//! schemes for four presentations of the prior:
//!
//! * explicit finite priors ([`exact`]),
//! * i.i.d. actions with an explicit type distribution ([`iid`] for the
//!   optimal symmetric scheme, [`approx`] for the independent
//!   `1 - 1/e` scheme),
//! * independent non-identical actions (expanded to explicit form, see
//!   [`exact::expand_product`]),
//! * black-box sampling oracles ([`blackbox`]).
//!
//! Every guarantee is paired with an independent oracle in [`verify`] and
//! [`khintchine`], so the solvers can be cross-checked at desk scale.
//!
//! The crate is `no_std` and only needs `alloc`. Randomized procedures take
//! an explicit `rand::Rng` so callers control seeding.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod approx;
pub mod blackbox;
pub mod error;
pub mod exact;
pub mod fixtures;
pub mod iid;
pub mod khintchine;
pub mod lp;
pub mod model;
mod num;
pub mod profile;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    audit, best_response, posterior, AuditReport, DirectScheme, ExplicitInstance, IidInstance,
    IndependentInstance, Marginal, PosteriorSummary, State,
};

/// Absolute tolerance used for receiver tie-breaking and IC certification.
pub const TIE_TOL: f64 = 1e-9;

/// Tolerance on probability vectors summing to one.
pub const PROB_SUM_TOL: f64 = 1e-12;
