//! Mixed determinantal polynomials and the greedy selection machinery built
//! on them: joint pavings of Hermitian tuples, restricted invertibility, and
//! quantitative commutator decompositions, with numerical certificates for
//! every bound the algorithms promise.

pub mod budget;
pub mod commutator;
pub mod constructions;
pub mod error;
pub mod generators;
pub mod io;
pub mod linalg;
pub mod mdp;
pub mod polynomial;
pub mod selection;
pub mod tol;
pub mod verify;

pub use budget::EnumerationBudget;
pub use error::{MdpError, Result};
pub use linalg::{ComplexMatrix, HermitianMatrix, HermitianTuple};
pub use num_complex::Complex64;
pub use polynomial::RealPolynomial;
