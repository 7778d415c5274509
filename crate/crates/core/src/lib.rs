pub mod error;
pub mod lattice;
pub mod git;
pub mod glsm;
pub mod polyhedral;
pub mod problem;
pub mod report;
pub mod visitor;
pub mod wallcross;

pub use error::{Error, Result};
