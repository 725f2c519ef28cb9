use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid tolerance policy: {0}")]
    InvalidTolerance(String),

    #[error("not a phase: |{0}| deviates from 1")]
    NotAPhase(String),

    #[error("malformed modular data: {0}")]
    Malformed(String),

    #[error("invalid dimension row: S[0][{index}]/S[0][0] has imaginary part {imag:e}")]
    InvalidDimensionRow { index: usize, imag: f64 },

    #[error("not modular: S² is not a conjugation ({0})")]
    NotConjugation(String),

    #[error("Verlinde integrality violation at (i,j,k) = {triples:?}")]
    VerlindeIntegrality { triples: Vec<(usize, usize, usize)> },

    #[error("internal inconsistency: tau[{k}][{i}] = {measured:e} on a channel with N = 0")]
    InternalInconsistency { k: usize, i: usize, measured: f64 },

    #[error("FS indicator violation at object {index}: {reason}")]
    FsIndicator { index: usize, reason: String },

    #[error("realizability violation at (k,i) = ({k},{i}): {condition}")]
    Realizability { k: usize, i: usize, condition: String },

    #[error("not realizable: {0}")]
    NotRealizable(String),

    #[error("not modular for (n,p) = ({n},{p})")]
    PointedNotModular { n: usize, p: i64 },

    #[error("invalid explicit model {name}: {reason}")]
    InvalidModel { name: String, reason: String },

    #[error("invalid fusion ring: {0}")]
    InvalidFusionRing(String),

    #[error("fusion ring not transitive: cannot diagonalize uniquely")]
    NotTransitive,

    #[error("search bound exceeded: {0}")]
    SearchBound(String),

    #[error("unknown catalog entry or model: {0}")]
    UnknownName(String),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Parse and I/O failures, as opposed to mathematical ones.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::Io(_)
                | Error::Malformed(_)
                | Error::NotAPhase(_)
                | Error::InvalidTolerance(_)
                | Error::UnknownName(_)
                | Error::InvalidFusionRing(_)
        )
    }
}
