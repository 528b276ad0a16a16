//! Exact and certified arithmetic for the extension problem of the D(4)-pairs
//! `{a, ka}` with `k ∈ {2, 3, 6}`.
//!
//! The crate is layered bottom-up:
//!
//! * [`exactmath`]: integer square roots, outward-rounded fixed-point
//!   intervals ([`HpReal`]) and certified continued-fraction convergents.
//! * [`pell`], [`tuples`], [`sequences`]: the pair equation, the `c`-families,
//!   the regular extensions `d±` and every binary recurrence in play.
//! * [`gaps`], [`linforms`], [`reduction`]: congruence lower bounds, Matveev
//!   upper bounds and the Baker–Davenport reduction.
//! * [`oracle`]: brute-force ground truth, independent of the three modules
//!   above.
//! * [`pipeline`]: per-family orchestration and report formats.

pub mod error;
pub mod exactmath;
pub mod gaps;
pub mod linforms;
pub mod oracle;
pub mod pell;
pub mod pipeline;
pub mod reduction;
pub mod sequences;
pub mod tuples;

pub use error::{Error, Result};
pub use exactmath::{CfCursor, HpReal, PrecisionPolicy, Rounding};
pub use pell::{D4Pair, FundamentalSolution, Multiplier};
pub use tuples::{Family, SortedTriple, TripleCandidate};
