//! Invariants, volumes, coverings and exact integer solution counts for
//! decomposable forms: homogeneous integer forms that split into complex
//! linear factors.
//!
//! The crate decides finiteness of the real solution volume from a given
//! factorization, estimates that volume numerically, enumerates integer
//! solutions exactly at desk scale, constructs convex coverings of the
//! solution set and witness families for the infinite-volume case, and
//! exposes everything behind explicit, testable constants.

pub mod counting;
pub mod error;
pub mod forms;
pub mod geometry;
pub mod intmat;
pub mod invariants;
pub mod lattice;
pub mod linalg;
pub mod measure;
pub mod rat;

pub use error::{Error, Result};
