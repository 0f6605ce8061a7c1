//! The uncrossing game for skew-supermodular functions on bipartitions,
//! a polynomial Red strategy for it, and its application to uncrossing
//! dual solutions of cut-covering linear programs.

pub mod functions;
pub mod game;
pub mod ground;
pub mod lp;
pub mod redstrategy;
pub mod uncross;

/// Exact rational numbers used for all function values and weights.
pub type Rational = num_rational::BigRational;
