//! Exact solvers and instance generators for the list locally surjective
//! graph homomorphism problem LLSHom(H): a budgeted brute-force oracle,
//! closed-form solvers for the polynomial targets, a branch-and-decompose
//! engine for the path and 4-cycle targets, reductions between targets, a
//! witness verifier, and generators that turn CNF formulas into hard
//! instances with machine-checkable structure.

pub mod corpus;
pub mod forge;
pub mod graph;
pub mod instance;
pub mod io;
pub mod pattern;
pub mod solver;
pub mod subexp;
pub mod treewidth;
pub mod verify;
