//! String diagrams with a dense tensor semantics and three independent ways
//! to differentiate them: rewrite rules on the diagrams themselves, dual
//! numbers threaded through the interpretation, and finite differences.

pub mod autodiff;
pub mod corpus;
pub mod cqmap;
pub mod diagram;
pub mod json;
pub mod rig;
pub mod tensor;
pub mod zx;
