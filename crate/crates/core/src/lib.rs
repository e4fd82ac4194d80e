//! Weight-0 q-Euler and q-Bernoulli numbers, p-adic q-integrals, and
//! mechanical verification of the identities relating them.

pub mod arith;
pub mod cache;
pub mod cli;
pub mod error;
pub mod identities;
pub mod padic;
pub mod qintegral;
pub mod qspecial;
pub mod report;

pub use error::{Error, Result};
