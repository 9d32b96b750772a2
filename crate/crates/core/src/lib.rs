//! U-statistics of Markov chain trajectories with explicit, computable
//! variance bounds under V-weighted total variation ergodicity.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod markov;
pub mod montecarlo;
pub mod par;
pub mod proof;
pub mod report;
pub mod ustat;

pub use error::{Error, Result};
