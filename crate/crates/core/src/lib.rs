//! Numerical laboratory for the Gaudin model.
//!
//! The crate cross-checks several descriptions of the same spectrum:
//! exact diagonalization of the Gaudin hamiltonians ([`gaudin`]), the
//! Bethe ansatz ([`bethe`]), the Miura transformation and opers ([`oper`]),
//! numerical monodromy of the associated Fuchsian equations
//! ([`monodromy`]) and Sklyanin's separation of variables ([`sov`]).

pub mod bethe;
pub mod error;
pub mod gaudin;
pub mod linalg;
pub mod monodromy;
pub mod ode;
pub mod oper;
pub mod poly;
pub mod ratfun;
pub mod repcore;
pub mod sov;

pub use error::{Error, Result};
pub use linalg::C64;
