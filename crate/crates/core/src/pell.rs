//! The pair equation `r² − k·a² = 4` and the generalized Pellian
//! `a·Y² − b·X² = 4(a − b)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::is_perfect_square;

/// The multiplier `k` of a pair `{a, ka}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u32", try_from = "u32")]
pub enum Multiplier {
    Two,
    Three,
    Six,
}

impl Multiplier {
    pub const ALL: [Multiplier; 3] = [Multiplier::Two, Multiplier::Three, Multiplier::Six];

    pub fn value(self) -> u32 {
        match self {
            Multiplier::Two => 2,
            Multiplier::Three => 3,
            Multiplier::Six => 6,
        }
    }

    /// The fundamental solution `(r₁, a₁)` of `r² − k·a² = 4`.
    pub fn fundamental(self) -> (u32, u32) {
        match self {
            Multiplier::Two => (6, 4),
            Multiplier::Three => (4, 2),
            Multiplier::Six => (10, 4),
        }
    }
}

impl TryFrom<u32> for Multiplier {
    type Error = Error;

    fn try_from(k: u32) -> Result<Self> {
        match k {
            2 => Ok(Multiplier::Two),
            3 => Ok(Multiplier::Three),
            6 => Ok(Multiplier::Six),
            other => Err(Error::UnsupportedK(other)),
        }
    }
}

impl From<Multiplier> for u32 {
    fn from(k: Multiplier) -> u32 {
        k.value()
    }
}

impl fmt::Display for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// A D(4)-pair `{a, ka}` with `ka² + 4 = r²`, the `p`-th in its Pell orbit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct D4Pair {
    pub a: BigInt,
    pub k: Multiplier,
    pub r: BigInt,
    pub p: u32,
}

impl D4Pair {
    pub fn b(&self) -> BigInt {
        &self.a * self.k.value()
    }

    pub fn ab(&self) -> BigInt {
        &self.a * self.b()
    }
}

pub fn fundamental_pair(k: u32) -> Result<(BigInt, BigInt)> {
    let (r, a) = Multiplier::try_from(k)?.fundamental();
    Ok((r.into(), a.into()))
}

/// The `p`-th solution of `r² − k·a² = 4`, from
/// `(r_p + a_p√k)/2 = ((r₁ + a₁√k)/2)^p`.
pub fn pair_at(k: u32, p: u32) -> Result<D4Pair> {
    let k = Multiplier::try_from(k)?;
    if p == 0 {
        return Err(Error::Precondition("pair index p must be at least 1".into()));
    }
    Ok(PairOrbit::new(k).nth((p - 1) as usize).expect("orbit is infinite"))
}

/// Iterator over the pairs `p = 1, 2, …` of a multiplier.
#[derive(Debug, Clone)]
pub struct PairOrbit {
    k: Multiplier,
    r1: BigInt,
    prev: (BigInt, BigInt),
    cur: (BigInt, BigInt),
    p: u32,
}

impl PairOrbit {
    pub fn new(k: Multiplier) -> Self {
        let (r1, a1) = k.fundamental();
        PairOrbit {
            k,
            r1: r1.into(),
            prev: (BigInt::from(2), BigInt::zero()),
            cur: (r1.into(), a1.into()),
            p: 1,
        }
    }
}

impl Iterator for PairOrbit {
    type Item = D4Pair;

    fn next(&mut self) -> Option<D4Pair> {
        let out = D4Pair {
            a: self.cur.1.clone(),
            k: self.k,
            r: self.cur.0.clone(),
            p: self.p,
        };
        let next = (
            &self.r1 * &self.cur.0 - &self.prev.0,
            &self.r1 * &self.cur.1 - &self.prev.1,
        );
        self.prev = std::mem::replace(&mut self.cur, next);
        self.p += 1;
        Some(out)
    }
}

/// An element `(x + y√d)/2` of `ℤ[(1+√d)/2]`-style half-integer rings, stored
/// as the integer pair `(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfSurd {
    pub x: BigInt,
    pub y: BigInt,
    pub d: BigInt,
}

impl HalfSurd {
    pub fn new(x: BigInt, y: BigInt, d: BigInt) -> Self {
        HalfSurd { x, y, d }
    }

    pub fn one(d: BigInt) -> Self {
        HalfSurd::new(BigInt::from(2), BigInt::zero(), d)
    }

    pub fn mul(&self, other: &HalfSurd) -> HalfSurd {
        debug_assert_eq!(self.d, other.d);
        // (x + y√d)(x' + y'√d)/4 = ((xx' + dyy')/2 + (xy' + x'y)/2 √d)/2
        let x = &self.x * &other.x + &self.d * &self.y * &other.y;
        let y = &self.x * &other.y + &other.x * &self.y;
        debug_assert!(x.is_even() && y.is_even(), "product left the half-integer ring");
        HalfSurd::new(x / 2, y / 2, self.d.clone())
    }

    pub fn pow(&self, mut n: u32) -> HalfSurd {
        let mut base = self.clone();
        let mut acc = HalfSurd::one(self.d.clone());
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
}

/// A fundamental solution `(y₀, x₀)` of `a·Y² − b·X² = 4(a − b)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FundamentalSolution {
    pub y0: BigInt,
    pub x0: BigInt,
}

/// How [`fundamental_general_with`] produces its answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScanMode {
    /// Scan `x₀` over the full admissible range.
    #[default]
    Full,
    /// Return `{(±2, 2)}` directly when `b ≤ 6.85a`, after checking both
    /// solve the equation; falls back to a full scan otherwise.
    Shortcut,
}

pub fn fundamental_general(a: &BigInt, b: &BigInt) -> Result<Vec<FundamentalSolution>> {
    fundamental_general_with(a, b, ScanMode::Full)
}

/// Fundamental solutions of `a·Y² − b·X² = 4(a − b)` with
/// `1 ≤ x₀ ≤ √(a(b−a)/(r−2))` and `1 ≤ |y₀| ≤ √((r−2)(b−a)/a)`, restricted to
/// classes that extend `{a, b}`: `x₀² ≡ 4 (mod a)` and `y₀² ≡ 4 (mod b)`.
///
/// A full scan costs `O(√(a(b−a)/(r−2)))` square tests.
pub fn fundamental_general_with(a: &BigInt, b: &BigInt, mode: ScanMode) -> Result<Vec<FundamentalSolution>> {
    if !a.is_positive() || a >= b {
        return Err(Error::Precondition("need 0 < a < b".into()));
    }
    let r = is_perfect_square(&(a * b + 4)).ok_or_else(|| Error::NotAD4Pair {
        a: a.to_string(),
        b: b.to_string(),
    })?;
    let rhs = (a - b) * 4;
    let solves = |y: &BigInt, x: &BigInt| a * y * y - b * x * x == rhs;

    if mode == ScanMode::Shortcut && b * 100u32 <= a * 685u32 {
        let two = BigInt::from(2);
        if solves(&two, &two) {
            return Ok(vec![
                FundamentalSolution {
                    y0: two.clone(),
                    x0: two.clone(),
                },
                FundamentalSolution { y0: -&two, x0: two },
            ]);
        }
    }

    let r2 = &r - 2u32;
    let x_cap = a * (b - a); // x₀²(r − 2) ≤ a(b − a)
    let y_cap = &r2 * (b - a); // y₀²·a ≤ (r − 2)(b − a)
    let mut out = Vec::new();
    let mut x = BigInt::one();
    while &x * &x * &r2 <= x_cap {
        let num = b * &x * &x + &rhs;
        if num.is_positive() && num.is_multiple_of(a) {
            if let Some(y) = is_perfect_square(&(&num / a)) {
                // only classes whose members give an integral c = (x² − 4)/a
                let integral = (&x * &x - 4u32).is_multiple_of(a) && (&y * &y - 4u32).is_multiple_of(b);
                if !y.is_zero() && &y * &y * a <= y_cap && integral {
                    out.push(FundamentalSolution {
                        y0: y.clone(),
                        x0: x.clone(),
                    });
                    out.push(FundamentalSolution { y0: -y, x0: x.clone() });
                }
            }
        }
        x += 1u32;
    }
    Ok(out)
}
