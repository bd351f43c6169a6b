//! Pre/post-condition specifications, an equivalence checker with randomized and SMT
//! backends, and a tower-defense game whose blobs are driven by the checker's verdict.

pub mod dsl;
pub mod eval;
pub mod problem;
pub mod random_check;
pub mod verdict;
pub mod smt;
pub mod check;
pub mod game;
pub mod service;
