//! Exact optimisation for small instances and a MILP exporter.

mod milp;
mod search;

pub use milp::{big_m, big_m_raw, export_milp, usable_edges, MilpCounts};
pub use search::{solve_exact, ExactResult, ExactStatus, NodeLimit, SearchBudget, Unlimited};
