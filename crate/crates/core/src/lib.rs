//! Boolean-valued semantics for the finitely indexed fragment of infinitary
//! logic: evaluation, proof checking, consistency properties, and the
//! Boolean compactness pipeline.

pub mod balg;
pub mod budget;
pub mod bvmodel;
pub mod compact;
pub mod consprop;
pub mod forcing;
pub mod gen;
pub mod proofs;
pub mod syntax;

pub use balg::{BoolAlg, Elem, Filter, Poset};
pub use budget::Budget;
pub use bvmodel::{BValuedModel, BvError};
pub use syntax::{Formula, Signature, Term, Theory};
