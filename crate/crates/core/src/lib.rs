//! Decision procedures for clone-theoretic triviality properties of finite
//! reflexive digraphs: homomorphism enumeration with propagation, exhaustive
//! surjective/idempotent polymorphism deciders, pp-definability certificates
//! via gadgets, combinatorial bounds and verified witness constructions on
//! ordinal-sum posets, and the simplicial realisation of a digraph.

pub mod budget;
pub mod digraph;
pub mod families;
pub mod gadgets;
pub mod hom;
pub mod io;
pub mod ordinal;
pub mod poly;
pub mod topology;

mod search;

pub use budget::{BudgetStatus, SearchBudget, SearchStats};
pub use digraph::{ComponentPartition, Digraph, VertexTuple};
pub use poly::{Classification, OperationKind, OperationTable, Verdict};
