use thiserror::Error;

/// Exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// The input is not a valid document.
pub const EXIT_SCHEMA: i32 = 2;
/// The geometry is unusable, or a computation was refused.
pub const EXIT_GEOMETRY: i32 = 3;
/// A resource cap was hit.
pub const EXIT_RESOURCE: i32 = 4;
/// Some identity failed to verify.
pub const EXIT_FAILED: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {0}: {1}")]
    Io(String, String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Library(#[from] latticetodd::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(..) | CliError::Schema(_) => EXIT_SCHEMA,
            CliError::Library(latticetodd::Error::Resource(_)) => EXIT_RESOURCE,
            CliError::Library(_) => EXIT_GEOMETRY,
        }
    }
}
