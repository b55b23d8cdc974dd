//! Exact Fock-space realization of the level -1 toroidal Lie superalgebra of type `D(m,n)`.

pub mod field;
pub mod lattice;
pub mod lincomb;
pub mod ope;
pub mod parse;
pub mod report;
pub mod roots;
pub mod scalar;
pub mod suite;
pub mod table;
pub mod weyl;
