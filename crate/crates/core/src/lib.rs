//! Finite hypergroups built from conditional expectations on finite groups.
//!
//! The pipeline is: validate a [`group::GroupTable`], build a
//! [`expectation::ConditionalExpectation`] onto a block-constant
//! subalgebra, check its axioms and the construction hypotheses, construct
//! the [`hypergroup::HypergroupTable`] of structure constants, verify the
//! hypergroup axioms in both the measure and the comultiplication form,
//! and finally study the left regular representation: the complete
//! positivity of `μ ↦ Σ_s μ({s}) L_s ⊗ L_s` and the Banach-algebra
//! inequality for the Fourier space.
//!
//! All algebraic assembly uses exact rationals. Floating point appears
//! only in eigenvalue and singular value computations.

pub mod catalog;
pub mod error;
pub mod expectation;
pub mod fourier;
pub mod group;
pub mod hypergroup;
pub mod io;
mod numeric;
pub mod report;
pub mod representation;
pub mod scalar;

pub use error::{Error, Result};
pub use expectation::{BlockSystem, ConditionalExpectation};
pub use group::{Carrier, GroupTable, MeasureVector};
pub use hypergroup::HypergroupTable;
pub use report::{Report, Status};
