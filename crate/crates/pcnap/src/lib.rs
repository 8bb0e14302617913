//! Solver library for the prize-collecting network activation problem.
//!
//! An instance assigns each candidate edge a monotone activation relation
//! over a finite weight set; choosing node weights activates edges, and the
//! goal is to meet pairwise connectivity requirements (edge, element or node
//! kind) or pay per-demand penalties, minimizing total node weight plus
//! penalties paid.
//!
//! The pipeline reduces high requirements to augmentation rounds, builds the
//! deficient biset family explicitly, solves a lifted LP relaxation in exact
//! rational arithmetic, drops demands by LP rounding, and covers the
//! remaining family with spiders found by a primal-dual scheme, with a
//! potential function driving the greedy loop. A brute-force oracle provides
//! ground truth at desk scale.

pub mod biset;
pub mod connectivity;
pub mod corpus;
pub mod error;
pub mod greedy;
pub mod instance;
pub mod lp;
pub mod oracle;
mod par;
pub mod rational;
pub mod solver;
pub mod spider;

pub use error::{Error, Result};
pub use rational::{Cost, Q};
