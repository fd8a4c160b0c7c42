//! Iterative QUBO solvers for dense square linear systems.
//!
//! `A·x = b` is solved by repeatedly encoding the residual `‖A·x − b‖²`
//! over a binary lattice around the current guess, minimising the QUBO,
//! moving to the decoded point and shrinking the lattice. Three
//! geometries are provided:
//!
//! * square lattice with `R` bits per coordinate ([`drivers::solve_square`]),
//! * the `H = AᵀA`-conjugate rhombus, whose QUBO is diagonal and solved in
//!   closed form ([`drivers::solve_rhombus`]),
//! * a block-conjugate basis that splits the QUBO into independent
//!   sub-problems ([`drivers::solve_block`]).

pub mod drivers;
pub mod encode;
pub mod error;
pub mod geometry;
pub mod linsys;
pub mod solvers;

pub use error::{Error, Result};
