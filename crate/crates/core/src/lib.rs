//! Non-malleable extractors, split-state non-malleable codes and two-round
//! privacy amplification, built from alternating extraction, independence
//! preserving mergers and correlation breakers with advice.
//!
//! Everything is evaluated at desk scale: widths are explicit `Schedule`
//! parameters, all randomness flows from named seeds, and statistical claims
//! are checked by the exact enumeration oracle in [`oracle`] (or by
//! Monte-Carlo with Hoeffding/DKW intervals where enumeration is infeasible).
//!
//! The main entry points are
//! * [`nmx::plan`] — resolve a parameter schedule for a named construction,
//! * [`nmx::snm_ext`] / [`nmx::tnm_ext`] — seeded / two-source non-malleable
//!   extraction under a schedule,
//! * [`nmcode::encode`] / [`nmcode::decode`] — the 2-split-state code,
//! * [`pamp::run_protocol`] — the two-round privacy amplification protocol.
//!
//! See the crate `examples/` directory for one runnable example per major
//! capability; the thin `nmext` binary exposes the same machinery as
//! subcommands (`plan`, `trace`, `encode`, `decode`, `tamper-bench`,
//! `pa-run`, `oracle-sd`).

pub mod advice;
pub mod altext;
pub mod bits;
pub mod breaker;
pub mod cli;
pub mod extract;
pub mod fields;
mod gf2x;
pub mod merge;
pub mod nmcode;
pub mod nmx;
pub mod oracle;
pub mod pamp;

pub use bits::{BitMatrix, BitVec};
pub use fields::FieldElem;

pub(crate) fn gf2x_is_zero(p: &[u64]) -> bool {
    gf2x::is_zero(p)
}

/// Crate-wide error type. Variant names follow the per-operation error
/// contracts; planner rejections carry the violated inequality verbatim.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("unsupported field width {0}: no irreducible modulus registered")]
    UnsupportedWidth(usize),
    #[error("width mismatch: {0}")]
    WidthMismatch(String),
    #[error("block mismatch: output width {m} does not divide input width {n}")]
    BlockMismatch { n: usize, m: usize },
    #[error("zero seed rejected")]
    ZeroSeed,
    #[error("linear system infeasible: rank(A|b) > rank(A)")]
    Infeasible,
    #[error("too many evaluation points: {n} > 2^{w}")]
    TooManyPoints { n: usize, w: usize },
    #[error("matrix search exhausted after {0} attempts")]
    SearchExhausted(usize),
    #[error("universe too small: need {t} distinct samples from [{n}]")]
    UniverseTooSmall { n: usize, t: usize },
    #[error("planner rejected: {0}")]
    PlannerReject(String),
    #[error("row count {0} is not a power of two and padding is disabled")]
    NotPowerOfTwo(usize),
    #[error("insufficient entropy, violated inequality: {inequality}")]
    InsufficientEntropy { inequality: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("advice length {l} outside allowed range [{lo}, {hi}]")]
    AdviceRangeError { l: usize, lo: usize, hi: usize },
    #[error("enumeration too large: {bits} input bits exceeds cap {cap}")]
    TooLarge { bits: usize, cap: usize },
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
