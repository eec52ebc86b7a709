use alloc::string::String;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("model is not of bounded variation")]
    NotBoundedVariation,
    #[error("root finding failed: {0}")]
    RootFindFailure(&'static str),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid model: {0}")]
    Model(String),
    #[error("quadrature did not reach tolerance {tolerance:e} (estimated error {estimate:e})")]
    Quadrature { tolerance: f64, estimate: f64 },
    #[error("no closed form available for this model")]
    NoClosedForm,
    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("dyadic depth {depth} is finer than the resolution floor {floor:e}")]
    DepthTooFine { depth: u32, floor: f64 },
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
