//! Prime quadratic twists of elliptic curves with partial 2-torsion: a
//! mod-4 criterion on 2-adic logarithms of Heegner points, the prime sieves
//! it induces, and checks of every ingredient that can be verified at desk
//! scale.

pub mod arith;
pub mod curves;
pub mod padics;
pub mod formal_log;
pub mod congruence;
pub mod sieve;
pub mod heegner;
pub mod io;
