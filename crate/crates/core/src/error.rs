use thiserror::Error;

use crate::matrix::MatrixError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Matrix(#[from] MatrixError),

    #[error("expected {expected} {what}, got {got}")]
    LengthMismatch { what: &'static str, expected: usize, got: usize },
    #[error("pauli string has {got} qubits, hamiltonian has {expected}")]
    QubitCountMismatch { expected: usize, got: usize },
    #[error("{0} qubits exceeds the dense limit of {max}", max = crate::hamiltonian::MAX_DENSE_QUBITS)]
    TooManyQubits(usize),
    #[error("hamiltonian has no terms")]
    EmptyHamiltonian,
    #[error("hamiltonian has zero total weight")]
    ZeroHamiltonian,
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("unknown gate spec `{0}`")]
    UnknownSpec(String),
    #[error("gate `{spec}`: parameter {index} = {value} outside [{lo}, {hi}]")]
    ParamOutOfRange { spec: String, index: usize, value: f64, lo: f64, hi: f64 },
    #[error("gate `{spec}` expects {expected} parameters, got {got}")]
    ParamCount { spec: String, expected: usize, got: usize },
    #[error("gate `{spec}`: support {support:?} does not match the alphabet")]
    SupportMismatch { spec: String, support: Vec<usize> },
    #[error("invalid qubit support {0:?}")]
    InvalidSupport(Vec<usize>),
    #[error("gate alphabet is empty")]
    EmptyAlphabet,
    #[error("duration undefined for gate `{0}`")]
    UndefinedDuration(String),

    #[error("target is not unitary (max |U^dag U - I| = {0:e})")]
    NonUnitaryTarget(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }
}
