//! Module norm, numerical range and numerical radius for adjointable
//! operators on finite-dimensional Hilbert C*-modules over abelian
//! C*-algebras.
//!
//! The algebra is realized by its finite Gelfand spectrum
//! ([`gelfand`]), the module as a direct sum of fibers ([`module_space`]),
//! and operators as block-diagonal families ([`operators`]). [`norms`]
//! computes ⫴T⫴, ω_o(T) and samples W_o(T), with Monte-Carlo oracles that
//! evaluate the defining suprema directly. [`verification`] turns each
//! inequality and structural property into an executable check, and
//! [`cx`] models C(X) on a discretized space.

pub mod cli;
pub mod cx;
pub mod error;
pub mod gelfand;
pub mod module_space;
pub mod norms;
pub mod operators;
pub mod verification;

pub use error::{Error, Result};
pub use gelfand::{AlgebraElement, CharacterSpace};
pub use module_space::{random_vector, ModuleShape, ModuleVector, SampleDistribution};
pub use operators::{Block, ModuleOperator};
