//! Graph layout by stress minimization.
//!
//! Two solvers share one objective: [`sgd`] moves vertex pairs in random
//! order under an annealed step width, [`smacof`] repositions one vertex at
//! a time by localized majorization. [`init`] provides random, classical
//! MDS and PivotMDS starting layouts; [`bench`] runs repeated experiments
//! over solver and initializer combinations.

pub mod bench;
pub mod error;
pub mod graph;
pub mod init;
pub mod layout;
pub mod sgd;
pub mod smacof;
pub mod stress;

pub use error::{Error, ParseError, Result};
pub use graph::{DistanceMatrix, Graph};
pub use layout::{Layout, Point};
pub use sgd::{RunOutcome, Schedule, SgdConfig};
pub use smacof::SmacofConfig;
