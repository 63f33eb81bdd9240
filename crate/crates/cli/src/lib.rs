//! Library side of the `latticetodd` command: input documents, reports, and
//! the commands that connect them.

pub mod commands;
pub mod document;
pub mod error;
pub mod report;

pub use document::{load, Input, PolytopeDocument};
pub use error::CliError;
pub use report::{CorpusReport, ReportDocument};
