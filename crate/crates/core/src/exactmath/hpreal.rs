use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{decimal_ratio, isqrt, isqrt_ceil, pow2};
use crate::error::{Error, Result};

/// Direction used when an interval has to be collapsed to a single number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    Down,
    Up,
    Nearest,
}

/// A real number known to lie in `[lo·2⁻ᵖ, hi·2⁻ᵖ]`.
///
/// Every operation rounds its lower endpoint toward −∞ and its upper endpoint
/// toward +∞, so the true value is always enclosed. Strict inequalities are
/// certified only when the enclosures are disjoint (see [`HpReal::is_positive`]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HpReal {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

fn shr_floor(n: &BigInt, s: u64) -> BigInt {
    n.div_floor(&pow2(s))
}

fn shr_ceil(n: &BigInt, s: u64) -> BigInt {
    -((-n).div_floor(&pow2(s)))
}

fn div_ceil(n: &BigInt, d: &BigInt) -> BigInt {
    -((-n).div_floor(d))
}

impl HpReal {
    fn from_parts(lo: BigInt, hi: BigInt, prec: u32) -> Self {
        debug_assert!(lo <= hi, "inverted enclosure");
        HpReal { lo, hi, prec }
    }

    pub fn from_int(n: &BigInt, prec: u32) -> Self {
        let v = n << prec as usize;
        HpReal::from_parts(v.clone(), v, prec)
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        HpReal::from_int(&BigInt::from(n), prec)
    }

    /// Encloses `num / den`.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let (num, den) = if den.is_negative() {
            (-num, -den)
        } else {
            (num.clone(), den.clone())
        };
        let scaled = num << prec as usize;
        let lo = scaled.div_floor(&den);
        let hi = div_ceil(&scaled, &den);
        HpReal::from_parts(lo, hi, prec)
    }

    pub fn from_decimal(s: &str, prec: u32) -> Option<Self> {
        decimal_ratio(s).map(|(n, d)| HpReal::from_ratio(&n, &d, prec))
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Scaled lower endpoint: the enclosure starts at `lo_scaled · 2⁻ᵖ`.
    pub fn lo_scaled(&self) -> &BigInt {
        &self.lo
    }

    pub fn hi_scaled(&self) -> &BigInt {
        &self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    /// Re-expresses the enclosure at another precision (exact when widening).
    pub fn to_prec(&self, prec: u32) -> Self {
        if prec >= self.prec {
            let s = (prec - self.prec) as usize;
            HpReal::from_parts(&self.lo << s, &self.hi << s, prec)
        } else {
            let s = (self.prec - prec) as u64;
            HpReal::from_parts(shr_floor(&self.lo, s), shr_ceil(&self.hi, s), prec)
        }
    }

    fn aligned(&self, other: &HpReal) -> (HpReal, HpReal) {
        let p = self.prec.max(other.prec);
        (self.to_prec(p), other.to_prec(p))
    }

    pub fn neg(&self) -> Self {
        HpReal::from_parts(-&self.hi, -&self.lo, self.prec)
    }

    pub fn add(&self, other: &HpReal) -> Self {
        let (a, b) = self.aligned(other);
        HpReal::from_parts(a.lo + b.lo, a.hi + b.hi, a.prec)
    }

    pub fn sub(&self, other: &HpReal) -> Self {
        let (a, b) = self.aligned(other);
        HpReal::from_parts(a.lo - b.hi, a.hi - b.lo, a.prec)
    }

    pub fn mul(&self, other: &HpReal) -> Self {
        let (a, b) = self.aligned(other);
        let cands = [&a.lo * &b.lo, &a.lo * &b.hi, &a.hi * &b.lo, &a.hi * &b.hi];
        let min = cands.iter().min().unwrap();
        let max = cands.iter().max().unwrap();
        let s = a.prec as u64;
        HpReal::from_parts(shr_floor(min, s), shr_ceil(max, s), a.prec)
    }

    /// Exact multiplication by an integer.
    pub fn mul_int(&self, n: &BigInt) -> Self {
        let (x, y) = (&self.lo * n, &self.hi * n);
        if n.is_negative() {
            HpReal::from_parts(y, x, self.prec)
        } else {
            HpReal::from_parts(x, y, self.prec)
        }
    }

    pub fn div(&self, other: &HpReal) -> Result<Self> {
        if !(other.is_positive() || other.is_negative()) {
            return Err(Error::Precondition("divisor enclosure contains zero".into()));
        }
        let (a, b) = self.aligned(other);
        let s = a.prec as usize;
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for n in [&a.lo, &a.hi] {
            let scaled = n << s;
            for d in [&b.lo, &b.hi] {
                let (q_lo, q_hi) = (scaled.div_floor(d), div_ceil(&scaled, d));
                lo = Some(lo.map_or(q_lo.clone(), |l| l.min(q_lo)));
                hi = Some(hi.map_or(q_hi.clone(), |h| h.max(q_hi)));
            }
        }
        Ok(HpReal::from_parts(lo.unwrap(), hi.unwrap(), a.prec))
    }

    pub fn recip(&self) -> Result<Self> {
        HpReal::from_i64(1, self.prec).div(self)
    }

    pub fn powi(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = HpReal::from_i64(1, self.prec);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.hi.is_negative() {
            return Err(Error::Precondition("square root of a negative number".into()));
        }
        let s = self.prec as usize;
        let lo = if self.lo.is_positive() {
            BigInt::from_biguint(Sign::Plus, isqrt(&(self.lo.magnitude() << s)))
        } else {
            BigInt::zero()
        };
        let hi = BigInt::from_biguint(Sign::Plus, isqrt_ceil(&(self.hi.magnitude() << s)));
        Ok(HpReal::from_parts(lo, hi, self.prec))
    }

    /// Natural logarithm; the enclosure must be strictly positive.
    pub fn ln(&self) -> Result<Self> {
        if !self.is_positive() {
            return Err(Error::Precondition("logarithm of a non-positive enclosure".into()));
        }
        let scale = self.prec as i64;
        let (lo, _) = ln_scaled(self.lo.magnitude(), scale, self.prec);
        let (_, hi) = ln_scaled(self.hi.magnitude(), scale, self.prec);
        Ok(HpReal::from_parts(lo, hi, self.prec))
    }

    /// `ln n` for a positive integer.
    pub fn ln_int(n: &BigInt, prec: u32) -> Result<Self> {
        if !n.is_positive() {
            return Err(Error::Precondition("logarithm of a non-positive integer".into()));
        }
        let (lo, hi) = ln_scaled(n.magnitude(), 0, prec);
        Ok(HpReal::from_parts(lo, hi, prec))
    }

    /// Euler's number.
    pub fn e(prec: u32) -> Self {
        let guard = 32u64;
        let w = prec as u64 + guard;
        let one = pow2(w);
        let mut term = one.clone();
        let mut sum = one.clone();
        let mut n = 1u64;
        while !term.is_zero() {
            term /= n;
            sum += &term;
            n += 1;
        }
        // each truncation loses < 1 ulp; the tail after a zero term is < 2 ulps
        let err = BigInt::from(n + 2);
        HpReal::from_parts(shr_floor(&(&sum - &err), guard), shr_ceil(&(&sum + &err), guard), prec)
    }

    pub fn abs(&self) -> Self {
        if self.lo.is_negative() && self.hi.is_positive() {
            HpReal::from_parts(BigInt::zero(), self.hi.clone().max(-&self.lo), self.prec)
        } else if self.hi.is_negative() || (self.hi.is_zero() && self.lo.is_negative()) {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Enclosure of `min(self, other)`.
    pub fn min(&self, other: &HpReal) -> Self {
        let (a, b) = self.aligned(other);
        HpReal::from_parts(a.lo.min(b.lo), a.hi.min(b.hi), a.prec)
    }

    pub fn max(&self, other: &HpReal) -> Self {
        let (a, b) = self.aligned(other);
        HpReal::from_parts(a.lo.max(b.lo), a.hi.max(b.hi), a.prec)
    }

    /// Certified `self > 0`.
    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    /// Certified `self < 0`.
    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// Certified `self < other`: upper end of `self` below lower end of `other`.
    pub fn definitely_lt(&self, other: &HpReal) -> bool {
        let (a, b) = self.aligned(other);
        a.hi < b.lo
    }

    pub fn definitely_gt(&self, other: &HpReal) -> bool {
        other.definitely_lt(self)
    }

    pub fn contains(&self, other: &HpReal) -> bool {
        let (a, b) = self.aligned(other);
        a.lo <= b.lo && b.hi <= a.hi
    }

    /// `⌊x⌋` if it is the same for the whole enclosure.
    pub fn certified_floor(&self) -> Option<BigInt> {
        let s = self.prec as u64;
        let (a, b) = (shr_floor(&self.lo, s), shr_floor(&self.hi, s));
        (a == b).then_some(a)
    }

    /// Largest possible `⌊x⌋` (a safe integer upper bound for x).
    pub fn floor_upper(&self) -> BigInt {
        shr_floor(&self.hi, self.prec as u64)
    }

    /// Smallest possible `⌈x⌉` (a safe integer lower bound for x, rounded up).
    pub fn ceil_lower(&self) -> BigInt {
        shr_ceil(&self.lo, self.prec as u64)
    }

    /// Enclosure of `‖x‖`, the distance to the nearest integer.
    pub fn dist_to_int(&self) -> Self {
        let unit = pow2(self.prec as u64);
        let half = &unit >> 1usize;
        let f = |n: &BigInt| -> BigInt {
            let r = n.mod_floor(&unit);
            if r <= half {
                r
            } else {
                &unit - r
            }
        };
        let (fl, fh) = (f(&self.lo), f(&self.hi));
        let contains_int = div_ceil(&self.lo, &unit) <= self.hi.div_floor(&unit);
        let shifted_lo = &self.lo - &half;
        let shifted_hi = &self.hi - &half;
        let contains_half = div_ceil(&shifted_lo, &unit) <= shifted_hi.div_floor(&unit);
        let lo = if contains_int {
            BigInt::zero()
        } else {
            fl.clone().min(fh.clone())
        };
        let hi = if contains_half { half } else { fl.max(fh) };
        HpReal::from_parts(lo, hi, self.prec)
    }

    /// Width of the enclosure as `log₂(hi − lo)` relative to 1, i.e. the number
    /// of bits still uncertain above the last place; `None` when exact.
    pub fn uncertain_bits(&self) -> Option<i64> {
        let w = &self.hi - &self.lo;
        if w.is_zero() {
            None
        } else {
            Some(w.bits() as i64 - self.prec as i64)
        }
    }

    /// Collapses to an `f64` rounded in the requested direction.
    pub fn to_f64(&self, rounding: Rounding) -> f64 {
        match rounding {
            Rounding::Down => scaled_to_f64(&self.lo, self.prec).next_down(),
            Rounding::Up => scaled_to_f64(&self.hi, self.prec).next_up(),
            Rounding::Nearest => scaled_to_f64(&((&self.lo + &self.hi) >> 1usize), self.prec),
        }
    }

    /// Midpoint as a decimal string with `digits` significant digits.
    pub fn to_sci(&self, digits: usize) -> String {
        let mid = (&self.lo + &self.hi) >> 1usize;
        format_scaled(&mid, self.prec, digits)
    }
}

fn scaled_to_f64(n: &BigInt, prec: u32) -> f64 {
    let bits = n.bits() as i64;
    if bits <= 60 {
        return n.to_f64().unwrap_or(0.0) * 2f64.powi(-(prec as i32));
    }
    let top = (n >> (bits - 60) as usize).to_f64().unwrap_or(0.0);
    let exp = bits - 60 - prec as i64;
    top * 2f64.powf(exp as f64)
}

fn format_scaled(n: &BigInt, prec: u32, digits: usize) -> String {
    if n.is_zero() {
        return "0".into();
    }
    // scale to an integer with enough decimal digits, then place the point
    let neg = n.is_negative();
    let mag = BigInt::from_biguint(Sign::Plus, n.magnitude().clone());
    let decimals = (prec as f64 * std::f64::consts::LOG10_2).ceil() as usize + digits;
    let ten_pow = num_traits::pow(BigInt::from(10u32), decimals);
    let int = (mag * ten_pow) >> prec as usize;
    let s = int.to_string();
    let exp10 = s.len() as i64 - decimals as i64 - 1;
    let mant: String = s.chars().take(digits.max(1)).collect();
    let (first, rest) = mant.split_at(1);
    let sign = if neg { "-" } else { "" };
    if rest.is_empty() {
        format!("{sign}{first}e{exp10}")
    } else {
        format!("{sign}{first}.{rest}e{exp10}")
    }
}

impl fmt::Display for HpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci(12))
    }
}

thread_local! {
    static LN2_CACHE: RefCell<HashMap<u64, BigInt>> = RefCell::new(HashMap::new());
}

/// `Σ tⁱ/(2i+1)` over odd powers for a fixed-point `t ∈ [0, 1/3]` at `w`
/// fractional bits. The result undershoots `atanh(t)` by at most `5n + 8` ulps,
/// `n` being the returned term count.
fn atanh_fixed(t: &BigInt, w: u64) -> (BigInt, u64) {
    let t2 = (t * t) >> w as usize;
    let mut pow = t.clone();
    let mut sum = BigInt::zero();
    let mut i = 0u64;
    while !pow.is_zero() {
        sum += &pow / (2 * i + 1);
        pow = (pow * &t2) >> w as usize;
        i += 1;
    }
    (sum, i)
}

fn ln2_fixed(w: u64) -> (BigInt, BigInt) {
    let sum = LN2_CACHE.with(|cache| {
        cache
            .borrow_mut()
            .entry(w)
            .or_insert_with(|| {
                let t = pow2(w) / 3u32;
                atanh_fixed(&t, w).0 * 2u32
            })
            .clone()
    });
    // 2·(5n + 8) from the series, plus 2 ulps from the rounded input 1/3
    let n = w / 3 + 2;
    (sum, BigInt::from(2 * (5 * n + 8) + 4))
}

/// Encloses `ln(n·2^-scale)` at `prec` fractional bits.
fn ln_scaled(n: &BigUint, scale: i64, prec: u32) -> (BigInt, BigInt) {
    debug_assert!(!n.is_zero());
    let nb = n.bits() as i64;
    let e = nb - 1 - scale;
    let e_bits = 64 - (e.unsigned_abs() + 1).leading_zeros() as u64;
    let guard = 64 + e_bits;
    let w = prec as u64 + guard;

    let n = BigInt::from_biguint(Sign::Plus, n.clone());
    let shift = w as i64 - (nb - 1);
    let y = if shift >= 0 {
        n << shift as usize
    } else {
        n >> (-shift) as usize
    };
    let one = pow2(w);
    let t = ((&y - &one) << w as usize) / (&y + &one);
    let (s, terms) = atanh_fixed(&t, w);
    let (ln2, ln2_err) = ln2_fixed(w);

    let center = BigInt::from(e) * &ln2 + s * 2u32;
    let err = BigInt::from(e.unsigned_abs()) * ln2_err + BigInt::from(2 * (5 * terms + 8) + 8);
    (shr_floor(&(&center - &err), guard), shr_ceil(&(&center + &err), guard))
}

impl HpReal {
    /// `2^k` as an exact enclosure.
    pub fn pow2(k: u32, prec: u32) -> Self {
        HpReal::from_int(&(BigInt::one() << k as usize), prec)
    }
}
