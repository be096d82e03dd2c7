use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    Parameter(String),

    #[error("size guard exceeded: {what} (limit {limit}, got {got}); pass force to override")]
    SizeGuard {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    #[error("unknown format `{0}`")]
    UnknownFormat(String),

    #[error("spectral product has imaginary residue {imag:e} against real part {real:e}")]
    ImaginaryResidue { real: f64, imag: f64 },

    #[error("edge list line {line}: {msg}")]
    EdgeList { line: usize, msg: String },

    /// A structural claim failed on a concrete instance.
    #[error("counterexample: {0}")]
    Counterexample(String),
}

pub type Result<T> = std::result::Result<T, Error>;
