pub mod clifford;
pub mod error;
pub mod function;
pub mod jacobi;
pub mod lattice;
pub mod operators;
pub mod oracle;
pub mod verify;
pub mod zeta;

pub use clifford::{AlgebraSignature, Multivector, Paravector, Scalar, ScalarField};
pub use error::{Error, Result};
pub use lattice::{MultiIndex, PeriodLattice, Shell};
