pub mod instance;
pub mod solution;
pub mod trace;

pub use instance::{parse_instance, write_instance, ParseError};
pub use solution::{parse_solution, write_solution, SolutionFile, SolutionFileError};
pub use trace::{best_by_epoch, write_trace};
