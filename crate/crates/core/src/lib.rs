//! Solver toolkit for the green capacitated time-dependent vehicle routing
//! problem with time windows.
//!
//! Vehicles leave a shared depot, serve every customer exactly once inside its
//! time window and return. Travel speed depends on the time-of-day bracket in
//! which an edge is started, and the objective prices fuel and emissions as a
//! function of distance, carried load and squared speed.
//!
//! * [`model`]: instance data, objective, timing and the constraint checker.
//! * [`encoding`]: the compact `node,level-node,level-...` solution string.
//! * [`sa`]: simulated annealing with four neighbourhood moves.
//! * [`exact`]: exhaustive depth-first oracle and LP-format model export.
//! * [`instgen`]: seeded random instances.
//!
//! The crate is `no_std` and only needs `alloc`; file formats, wall-clock
//! budgets and the command line live in the `greenroute` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod encoding;
pub mod exact;
pub mod instgen;
pub mod model;
pub mod sa;

pub use model::{Instance, ObjectiveBreakdown, Solution};
