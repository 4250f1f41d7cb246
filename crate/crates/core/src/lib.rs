//! Numerical tensor calculus for `(g, F, μ)`-manifolds and their
//! semi-invariant submanifolds.

pub mod catalog;
pub mod chart;
pub mod error;
pub mod expr;
pub mod integrability;
pub mod linalg;
pub mod report;
pub mod sampling;
pub mod structure;
pub mod semi_invariant;
pub mod specfile;
pub mod submanifold;
pub mod suite;
pub mod tolerance;
