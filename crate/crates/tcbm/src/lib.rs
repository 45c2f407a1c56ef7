//! Monte Carlo laboratory for time-changed Brownian motion.
//!
//! A Brownian motion `B` carries a positive continuous additive functional
//! `A_t = ∫_0^t f(B_s) ds` for a measure `μ = f·dm`; the right-continuous
//! inverse of `A` is a random clock, and `B` read on that clock is the
//! time-changed process.  The crate simulates these objects together with the
//! mirror coupling of two Brownian motions and estimates the quantities that
//! control the Hölder regularity of the α-resolvent of the time-changed
//! process: ball masses `μ(B(x,r)) ≤ K r^κ`, Green-function charges, meeting
//! and exit laws of the coupling, and the recursive exponent sequence
//! `r_n = (2-d+κ)(r_{n-1}+1)`.
//!
//! Everything is seeded: each path derives its generator from
//! `(master seed, stream salt, path index)`, and parallel reductions merge
//! fixed chunks in index order, so every estimate is a pure function of its
//! arguments regardless of worker count.

pub mod brownian;
pub mod coupling;
pub mod error;
pub mod green;
pub mod indices;
pub mod mc;
pub mod measures;
pub mod pcaf;
mod quad;
pub mod resolvent;

pub use error::{Error, Result};
