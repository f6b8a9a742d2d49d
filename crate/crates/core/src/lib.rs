//! Combinatorial tools for biaccessible external angles of polynomial Julia
//! sets: exact circle arithmetic, invariant laminations, narrow preimages,
//! interval covers with their dimension bound, and core entropy.

pub mod circle;
pub mod cover;
pub mod entropy;
pub mod lamination;
pub mod narrow;
pub mod cli;
