//! Exact arithmetic: rationals, polynomials and rational functions in `q`,
//! and polynomials in `x` over `Q(q)`.

mod poly;
mod ratfunc;
mod rational;
mod xpoly;

pub use poly::{poly_gcd, PolyQ};
pub use ratfunc::RatFuncQ;
pub use rational::Rational;
pub use xpoly::XPolyQ;
