use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported multiplier k = {0} (expected 2, 3 or 6)")]
    UnsupportedK(u32),
    #[error("{a}·{b} + 4 is not a perfect square")]
    NotAD4Pair { a: String, b: String },
    #[error("not a D(4)-triple: {0}")]
    NotATriple(String),
    #[error("degenerate third element c = {0}")]
    DegenerateC(String),
    #[error("continued fraction no longer certified at {bits} bits")]
    PrecisionExhausted { bits: u32 },
    #[error("no convergent gave a positive eta after {tried} attempts")]
    NoUsefulConvergent { tried: usize },
    #[error("sequence declared integral produced a half-integer at index {index}")]
    HalfIntegerLeak { index: u64 },
    #[error("index {index} exceeds the exact-evaluation cap {cap}")]
    IndexCapExceeded { index: u64, cap: u64 },
    #[error("operation does not apply to family {0}")]
    UnsupportedFamily(String),
    #[error("r = {0} is too small for the congruence exclusion (needs r > 28)")]
    InapplicableSmallR(String),
    #[error("search window too large: {0}")]
    WindowTooLarge(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
}
