//! Special partial matchings on finite posets and the topology of pircons.
//!
//! * [`poset`]: finite posets, intervals, products with the 2-chain, isomorphism.
//! * [`simplicial`]: order complexes, integer homology, discrete Morse matchings.
//! * [`spm`]: special partial matchings, lifting, search, pircon certificates.
//! * [`transform`]: zippers, removals, order projections and the conversion pipeline.
//! * [`coxeter`]: finite Coxeter groups, Bruhat order, twisted involutions and identities.
//! * [`quasiparabolic`]: scaled W-sets, quasiparabolic axioms and their Bruhat order.

pub mod coxeter;
pub mod limits;
pub mod poset;
pub mod quasiparabolic;
pub mod simplicial;
pub mod spm;
pub mod transform;

pub use limits::Limits;
pub use poset::{FinitePoset, IntervalHandle, Level, PosetError};
