//! An automatic inductive theorem prover for a small first-order functional
//! language. Deductive rewriting, abductive conjecturing and statistically
//! ranked induction are combined in one best-first search that emits
//! replayable proof scripts.

pub mod abduce;
pub mod deduct;
pub mod eval;
pub mod induct;
pub mod kernel;
pub mod mlfeat;
pub mod psl;
pub mod syntax;
pub mod unite;
