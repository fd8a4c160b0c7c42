//! Dense linear-algebra foundation: matrices, vectors, the residual
//! functional `f(x) = ‖A·x − b‖²`, text I/O and seeded instances.

pub mod io;
mod lu;
mod matrix;
mod rng;
mod system;

pub use lu::LuFactor;
pub use matrix::{DenseMatrix, Vector};
pub use rng::InstanceRng;
pub use system::{
    gram_matrix, random_instance, residual_norm_sq, LinearSystem, INSTANCE_ATTEMPTS,
    SINGULAR_PIVOT_TOL,
};

pub(crate) use matrix::{dot, ensure_len};
pub(crate) use system::gram_counted;
