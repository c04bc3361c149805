use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("value count {got} does not match grid size {expected}")]
    SizeMismatch { got: usize, expected: usize },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("non-finite symbol value at frequency {xi:?}")]
    NonFiniteSymbol { xi: [f64; 3] },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("slope fit needs at least 3 positive points, got {0}")]
    DegenerateFit(usize),
    #[error("dyadic index {j} not resolvable on this grid (annulus exceeds Nyquist)")]
    UnresolvableDyadicIndex { j: i32 },
    #[error("atom construction failed: {0}")]
    AtomConstruction(String),
    #[error("quadrature truncation error {0} exceeds tolerance")]
    QuadratureTruncation(f64),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
