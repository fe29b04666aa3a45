//! Lie-point symmetries of Ito and Stratonovich SDEs.

pub mod expr;
pub mod kozlov;
pub mod mc;
pub mod sde;
pub mod symmetry;
pub mod transform;
pub mod cli;
