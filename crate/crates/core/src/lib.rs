//! Numerical tools for non-additive quantum codes: Pauli algebra, code
//! subspaces and their Knill-Laflamme data, explicit code families, weight
//! enumerators, and a penalty optimizer for codes with prescribed signature
//! length.

pub mod codespace;
pub mod enumerators;
pub mod error;
pub mod exec;
pub mod families;
pub mod linalg;
pub mod operators;
pub mod optimizer;
pub mod pauli;
pub mod stabilizer;
pub mod sweep;
pub mod verify;

pub use codespace::{CodeSubspace, KlTensor, SignatureVector};
pub use error::{Error, Result};
pub use exec::Execution;
pub use nalgebra;
pub use operators::{DenseOperators, OperatorSet};
pub use pauli::{CMatrix, ErrorBasis, Pauli, PauliString, Phase, PhasedPauli, C64};
pub use stabilizer::StabilizerCode;
