//! Shared fixtures for the criterion benchmarks.

use d4quad_core::pell::pair_at;
use d4quad_core::reduction::{build_reduction, sign_branches, ReductionInstance};
use d4quad_core::sequences::InitialKind;
use d4quad_core::tuples::c_family;
use d4quad_core::{Family, SortedTriple};
use num_bigint::BigInt;

/// The sorted triple {a_p, k·a_p, c} for one family member.
pub fn triple(k: u32, p: u32, family: &str) -> SortedTriple {
    let pair = pair_at(k, p).expect("supported k");
    let family: Family = family.parse().expect("family name");
    c_family(&pair, family).expect("nondegenerate c").sorted
}

/// Type a reduction instance at the given starting bound, first sign branch.
pub fn type_a_instance(k: u32, p: u32, family: &str, m: u64) -> ReductionInstance {
    let t = triple(k, p, family);
    let init = sign_branches(&t, InitialKind::TypeA)
        .into_iter()
        .next()
        .expect("at least one branch");
    build_reduction(&t, &init, &BigInt::from(m), 256).expect("instance")
}
