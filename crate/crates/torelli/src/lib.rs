//! Homology-level computations for Torelli groups of partitioned surfaces.
//!
//! The crate is organized around a chain of increasingly specialized layers:
//!
//! * [`intlinalg`] — exact integer linear algebra (Smith normal form,
//!   primitivity and summand tests, symplectic forms, transvections,
//!   symplectic basis completion).
//! * [`psurface`] — partitioned surfaces, the module `H1P` with its
//!   intersection pairing, and the standard capping model.
//! * [`mapclass`] — twist words acting on `H1P`, Torelli-membership
//!   certificates, point-push actions and their factorizations.
//! * [`tsur`] — the category of partitioned surfaces: embedding
//!   combinatorics, morphism conditions, retraction maps.
//! * [`isocomplex`] — the complex of unimodular isotropic lines, finite
//!   slices, links, ranks, and the Farey model.
//! * [`contraction`] — validated elementary homotopy moves and the loop
//!   contraction procedures, all emitting replayable traces.
//!
//! All integer arithmetic is arbitrary precision; there is no overflow
//! behavior anywhere in the crate.

pub mod contraction;
pub mod intlinalg;
pub mod isocomplex;
pub mod mapclass;
pub mod psurface;
pub mod tsur;
