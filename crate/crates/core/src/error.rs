use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} = {value} outside the supported range (limit {limit})")]
    OutOfRange {
        what: &'static str,
        value: u64,
        limit: u64,
    },

    #[error("arithmetic overflow computing {0}")]
    Overflow(&'static str),

    #[error("moduli {0} and {1} are not coprime")]
    NotCoprime(u64, u64),

    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),

    #[error("modulus {0} is not square-free")]
    NotSquareFree(u64),

    #[error("(p - 1) = {} does not divide k = {k}", .p - 1)]
    EtaUndefined { k: u32, p: u64 },

    #[error("block is contained in a coset of the subgroup {divisor}Z_{modulus}")]
    CosetCondition { modulus: u64, divisor: u64 },

    #[error("precondition failed: {name} (measured {measured}, required {required})")]
    Precondition {
        name: String,
        measured: f64,
        required: f64,
    },

    #[error("exhaustive range exceeded: |Z(q)| = {size} > {cap}; use the randomized check")]
    ExhaustiveRange { size: usize, cap: usize },

    #[error("sigma_W({b}) = 0: {b} is not a k-th power residue mod {modulus}")]
    NotKthPower { b: u64, modulus: u64 },

    #[error("empty Bohr set for delta = {delta} with {frequencies} frequencies")]
    EmptyBohrSet { delta: f64, frequencies: usize },

    #[error("major arcs overlap: T = {t} <= 2Q^2 = {bound}")]
    ArcsOverlap { t: u64, bound: u64 },

    #[error("precision {requested} not reached by P = {prime}; best enclosure [{lower}, {upper}]")]
    PrecisionUnreached {
        requested: f64,
        prime: u64,
        lower: f64,
        upper: f64,
    },

    #[error("representation search failed: {0}")]
    RepresentationFailed(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
