//! Exact desk-scale computations for higher-rank graphs, the dynamical
//! systems they generate, semidirect-product groupoids, Toeplitz creation
//! relations on Fock space and exact sequences of ideal supports.

pub mod diagonal;
pub mod duality;
pub mod dynsys;
pub mod fock;
pub mod groupoid;
pub mod ideals;
pub mod kgraph;
pub mod rational;
pub mod shape;
