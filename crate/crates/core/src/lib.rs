//! Statevector simulation of quantum Fisher information under scrambling and
//! qubit loss, with exact Haar-average theory to compare against.
//!
//! Basis convention throughout: qubit 0 is the least significant bit of the
//! basis index.

pub mod error;
pub mod experiments;
pub mod haar_theory;
pub mod linalg;
pub mod qfi;
pub mod scramblers;
pub mod statevec;

pub use error::{Error, Result};
pub use haar_theory::{f_a, f_b, weingarten_table, DimPair, Permutation, WeingartenTable};
pub use qfi::{qfi_mixed, qfi_pure, qfi_reduced, Axis, Generator, QfiOptions, QfiValue};
pub use scramblers::{ScramblerKind, ScramblerSpec};
pub use statevec::{Bipartition, DensityDerivative, DensityMatrix, PureState};
