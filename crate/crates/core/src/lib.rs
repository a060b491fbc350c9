//! Model checking, search and proof checking for logics of knowing whether
//! and commonly knowing whether over finite Kripke models.

pub mod formula;
pub mod kripke;
pub mod semantics;
pub mod decision;
pub mod relations;
pub mod axiomatics;
pub mod games;
pub mod analysis;
