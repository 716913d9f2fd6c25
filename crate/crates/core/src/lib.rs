//! Exact computer algebra for derivations of Fermat rings
//! B_n^m = K[X1..Xn]/(X1^m1 + ⋯ + Xn^mn) over cyclotomic fields.
//!
//! The crate classifies linear derivations, decides local nilpotency,
//! computes rings of constants degree by degree and certifies Darboux
//! elements, all in exact arithmetic.

pub mod constants;
pub mod derivation;
pub mod exactla;
pub mod field;
pub mod linearder;
pub mod parse;
pub mod ring;
