use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("physics error: {0}")]
    Physics(#[from] optoforce::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for bad input, 3 for invalid physics, 4 for a diverged integration.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Physics(optoforce::Error::Diverged { .. }) => 4,
            CliError::Physics(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}
