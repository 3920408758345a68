pub mod cone;
pub mod error;
pub mod fan;
pub mod lattice;
pub mod semigroup;
pub mod group;
pub mod chow;
pub mod gtheory;
pub mod cli;
