//! File formats, the comparison harness and the command-line front end for
//! [`greenroute_core`].

pub mod cmd;
pub mod compare;
pub mod deadline;
pub mod io;
pub mod plot;

pub use deadline::Deadline;
