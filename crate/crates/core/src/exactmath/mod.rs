//! Exact integer primitives, outward-rounded high-precision reals and
//! continued-fraction machinery.

mod contfrac;
pub mod decimal;
mod hpreal;

pub use contfrac::CfCursor;
pub use hpreal::{HpReal, Rounding};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, Zero};

/// `⌊√n⌋`.
pub fn isqrt(n: &BigUint) -> BigUint {
    n.sqrt()
}

/// `⌈√n⌉`.
pub fn isqrt_ceil(n: &BigUint) -> BigUint {
    let s = n.sqrt();
    if &(&s * &s) == n {
        s
    } else {
        s + 1u32
    }
}

/// Returns the non-negative root when `n` is a perfect square.
pub fn is_perfect_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let m = n.magnitude();
    // quadratic residues mod 64 filter most non-squares cheaply
    let low = m.iter_u64_digits().next().unwrap_or(0) & 63;
    if (0x0202_0212_0203_0213u64 >> low) & 1 == 0 {
        return None;
    }
    let s = m.sqrt();
    if &(&s * &s) == m {
        Some(BigInt::from_biguint(Sign::Plus, s))
    } else {
        None
    }
}

pub fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

pub fn perfect_square_u128(n: u128) -> Option<u128> {
    if (0x0202_0212_0203_0213u64 >> (n & 63)) & 1 == 0 {
        return None;
    }
    let s = isqrt_u128(n);
    (s * s == n).then_some(s)
}

/// Working-precision schedule for certified computations.
///
/// Starts at `max(192, 2·log₂(6M) + 64)` bits, doubles on each escalation and
/// never exceeds `2²⁰` bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionPolicy {
    pub start_bits: u32,
    pub max_escalations: u32,
}

impl PrecisionPolicy {
    pub const FLOOR_BITS: u32 = 192;
    pub const CAP_BITS: u32 = 1 << 20;
    pub const MAX_ESCALATIONS: u32 = 5;

    pub fn for_bound(m: &BigInt) -> Self {
        let six_m: BigInt = m.abs() * 6u32 + 1u32;
        let log2 = six_m.bits() as u32;
        PrecisionPolicy {
            start_bits: Self::FLOOR_BITS.max(2 * log2 + 64),
            max_escalations: Self::MAX_ESCALATIONS,
        }
    }

    pub fn with_start(bits: u32) -> Self {
        PrecisionPolicy {
            start_bits: bits.clamp(64, Self::CAP_BITS),
            max_escalations: Self::MAX_ESCALATIONS,
        }
    }

    /// Precision of the `i`-th attempt (0 = initial), or `None` past the schedule.
    pub fn attempt(&self, i: u32) -> Option<u32> {
        if i > self.max_escalations {
            return None;
        }
        let bits = (self.start_bits as u64) << i;
        (bits <= Self::CAP_BITS as u64).then_some(bits as u32)
    }
}

pub(crate) fn pow2(bits: u64) -> BigInt {
    BigInt::one() << bits
}

/// Parses a plain decimal literal (`"11.7"`, `"3.36e13"`) into an exact ratio.
pub fn decimal_ratio(s: &str) -> Option<(BigInt, BigInt)> {
    let s = s.trim();
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
        None => (mantissa, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = digits.parse().ok()?;
    let mut den = BigInt::one();
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    if scale >= 0 {
        num *= num_traits::pow(ten, scale as usize);
    } else {
        den = num_traits::pow(ten, (-scale) as usize);
    }
    if den.is_zero() {
        return None;
    }
    Some((num, den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn isqrt_examples() {
        assert_eq!(isqrt(&big(0)), big(0));
        assert_eq!(isqrt(&big(3364)), big(58));
        assert_eq!(isqrt(&big(3363)), big(57));
        assert_eq!(isqrt_ceil(&big(3363)), big(58));
        assert_eq!(isqrt_ceil(&big(3364)), big(58));
    }

    #[test]
    fn perfect_square_examples() {
        assert_eq!(is_perfect_square(&BigInt::from(196)), Some(BigInt::from(14)));
        assert_eq!(is_perfect_square(&BigInt::from(-4)), None);
        assert_eq!(is_perfect_square(&BigInt::from(2)), None);
        assert_eq!(is_perfect_square(&BigInt::from(0)), Some(BigInt::from(0)));
        assert_eq!(perfect_square_u128(196), Some(14));
        assert_eq!(perfect_square_u128(197), None);
    }

    #[test]
    fn residue_filter_admits_every_square() {
        for n in 0u64..4096 {
            let sq = BigInt::from(n * n);
            assert_eq!(is_perfect_square(&sq), Some(BigInt::from(n)));
        }
    }

    #[test]
    fn u128_isqrt_at_the_top_of_the_range() {
        let n = u128::MAX;
        let s = isqrt_u128(n);
        assert!(s * s <= n);
        assert!((s + 1).checked_mul(s + 1).is_none());
    }

    #[test]
    fn precision_policy_schedule() {
        let p = PrecisionPolicy::for_bound(&BigInt::from(1u32));
        assert_eq!(p.start_bits, 192);
        let m: BigInt = "2600000000000000000000".parse().unwrap();
        let p = PrecisionPolicy::for_bound(&m);
        assert_eq!(p.start_bits, 2 * 74 + 64);
        assert_eq!(p.attempt(1), Some(p.start_bits * 2));
        assert_eq!(p.attempt(6), None);
        assert_eq!(PrecisionPolicy::with_start(1 << 19).attempt(2), None);
    }

    #[test]
    fn decimal_literals() {
        assert_eq!(decimal_ratio("11.7"), Some((117.into(), 10.into())));
        let (n, d) = decimal_ratio("3.36e13").unwrap();
        assert_eq!(n, BigInt::from(33_600_000_000_000u64) * &d);
        assert_eq!(decimal_ratio("0.0625"), Some((625.into(), 10000.into())));
        assert!(decimal_ratio("x").is_none());
    }

    proptest! {
        #[test]
        fn isqrt_brackets(digits in "[1-9][0-9]{0,40}") {
            let n: BigUint = digits.parse().unwrap();
            let s = isqrt(&n);
            prop_assert!(&s * &s <= n);
            let s1 = &s + 1u32;
            prop_assert!(&s1 * &s1 > n);
        }

        #[test]
        fn u128_matches_bigint(n in any::<u128>()) {
            let s = isqrt_u128(n);
            prop_assert_eq!(BigUint::from(s), isqrt(&BigUint::from(n)));
        }
    }
}
