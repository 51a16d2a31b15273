use thiserror::Error;

/// Failures of a CLI command, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown example '{0}' (expected periodic, leslie or singular)")]
    UnknownExample(String),

    #[error("singular pencil: {0}")]
    SingularPencil(String),

    #[error("invalid order: {0}")]
    InvalidOrder(String),

    #[error("{0}")]
    Io(String),

    #[error(transparent)]
    Core(#[from] pencilk::Error),
}

impl CliError {
    /// 2 parse/input error, 3 invalid k, 4 singular or untractable,
    /// 5 ill-conditioned Drazin core, 6 inconsistent initial condition,
    /// 1 anything else.
    pub fn exit_code(&self) -> i32 {
        use pencilk::Error as E;
        match self {
            CliError::Parse(_) | CliError::Config(_) | CliError::UnknownExample(_) => 2,
            CliError::InvalidOrder(_) => 3,
            CliError::SingularPencil(_) => 4,
            CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                E::Shape { .. } | E::NonFinite { .. } => 2,
                E::InvalidOrder { .. } | E::NotAMember { .. } => 3,
                E::SingularPencil { .. } | E::Untractable | E::HypothesisViolated(_) => 4,
                E::IllConditionedCore { .. } => 5,
                E::Inconsistent { .. } => 6,
                _ => 1,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
