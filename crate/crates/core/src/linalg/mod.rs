//! Dense complex linear algebra for small spin-space matrices.

mod eigh;
mod hessenberg;
mod matrix;

pub use eigh::{eigh, HermitianEigen};
pub use hessenberg::{balance, hessenberg_eigenvalues};
pub use matrix::{c64, vec_norm, ComplexMatrix};
