//! Computational tools for finitely presented groups.
//!
//! The crate is organised bottom-up:
//!
//! * [`word`] — letters, alphabets, free reduction, shortlex order.
//! * [`presentation`] — group presentations, symmetrized closures, small
//!   cancellation metrics.
//! * [`lattice`] — integer lattice normal forms used by the abelianization
//!   filter.
//! * [`quotients`] — finite quotient homomorphism search (permutation and
//!   dihedral targets) used as a nontriviality filter.
//! * [`oracle`] — word-problem oracles: Dehn's algorithm for small
//!   cancellation presentations and a bounded-search oracle for everything
//!   else.
//! * [`area`] — exact van Kampen area computation with verifiable
//!   certificates.
//! * [`geometry`] — Dehn functions, their relative-to-cyclics refinements,
//!   ball indices, geodesic lengths, translation number bounds, and cyclic
//!   subgroup statistics.
//! * [`fibre`] — fibre products of a group with itself over a quotient,
//!   membership, distortion, and certificate lifting.
//! * [`conjugacy`] — conjugacy search, conjugator length statistics, the
//!   staged conjugator construction for fibre products, and cyclic
//!   semigroup membership.
//! * [`constructions`] — the small cancellation construction turning any
//!   finite presentation into a C'(1/6) group with prescribed quotient,
//!   trivial HNN extensions, and the composite construction.
//! * [`harness`] — seeded, reproducible experiment driver emitting JSON
//!   and CSV tables.

pub mod area;
pub mod conjugacy;
pub mod constructions;
pub mod fibre;
pub mod geometry;
pub mod harness;
pub mod lattice;
pub mod oracle;
pub mod presentation;
pub mod quotients;
pub mod word;

pub use word::{Alphabet, Letter, Word};
