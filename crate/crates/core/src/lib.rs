//! Polynomial reasoning over `Z/2^d`: strong Gröbner bases, a decision
//! procedure for bit-vector polynomial constraints, and equational loop
//! invariant synthesis.

pub mod frontend;
pub mod groebner;
pub mod invgen;
pub mod linalg;
pub mod poly;
pub mod ring;
pub mod satcheck;
