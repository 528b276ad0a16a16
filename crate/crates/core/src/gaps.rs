//! Congruence-derived lower bounds on solution indices, and the exclusion of
//! the `s ≡ ±a (mod r)` branch for `c₂±`.
//!
//! Every bound is decided in exact integer arithmetic: the irrational
//! thresholds are squared away so no rounding is involved.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::decimal;
use crate::pell::{D4Pair, Multiplier};
use crate::tuples::{c_family, Branch, FamilyClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapKind {
    TypeAL,
    TypeBM,
    VwEvenM,
    VwOddM,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

/// A certified lower bound on an index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapBound {
    pub kind: GapKind,
    #[serde(with = "decimal")]
    pub value: BigInt,
    pub provenance: String,
}

fn isqrt(n: &BigInt) -> BigInt {
    n.sqrt()
}

/// Smallest `x ≥ start` with `pred(x)`, for a monotone predicate.
fn least_from(start: BigInt, pred: impl Fn(&BigInt) -> bool) -> BigInt {
    let mut x = start.max(BigInt::one());
    while x > BigInt::one() && pred(&(&x - 1u32)) {
        x -= 1u32;
    }
    while !pred(&x) {
        x += 1u32;
    }
    x
}

/// `⌈(−2 + √(4 + 3√a))/12⌉`, the least `l` with `((12l+2)² − 4)² ≥ 9a`.
pub fn lower_type_a(a: &BigInt) -> Result<BigInt> {
    if !a.is_positive() {
        return Err(Error::Precondition("a must be positive".into()));
    }
    let nine_a = a * 9u32;
    let holds = |l: &BigInt| {
        let u: BigInt = l * 12u32 + 2u32;
        let v = &u * &u - 4u32;
        &v * &v >= nine_a
    };
    let guess = (isqrt(&(isqrt(a) * 3u32 + 4u32)) - 2u32) / 12u32;
    Ok(least_from(guess, holds))
}

/// `⌊κ_k·a⌋ + 1` where `κ₂ = (3√2−4)/4`, `κ₃ = (2√3−3)/2`, `κ₆ = (5√6−12)/4`.
///
/// Only the `c₂±` families are covered.
pub fn lower_type_b(a: &BigInt, k: u32, class: FamilyClass) -> Result<BigInt> {
    let k = Multiplier::try_from(k)?;
    if class != FamilyClass::C2 {
        return Err(Error::UnsupportedFamily(format!(
            "{class}: the Type b gap covers c2 only"
        )));
    }
    if !a.is_positive() {
        return Err(Error::Precondition("a must be positive".into()));
    }
    let a2 = a * a;
    // κ·a = (√(q·a²) − m·a)/d, irrational, so ⌊κ·a⌋ = ⌊(⌊√(q·a²)⌋ − m·a)/d⌋
    let (q, m, d) = match k {
        Multiplier::Two => (18u32, 4u32, 4u32),
        Multiplier::Three => (12, 3, 2),
        Multiplier::Six => (150, 12, 4),
    };
    let num = isqrt(&(&a2 * q)) - a * m;
    Ok(num.div_floor(&BigInt::from(d)) + 1u32)
}

/// Least `m ≥ 1` with `m > 0.495·√(c/b)` (even) or `m² > 0.0625·√c/b` (odd).
pub fn lower_vw(b: &BigInt, c: &BigInt, parity: Parity) -> Result<BigInt> {
    if !b.is_positive() || !c.is_positive() {
        return Err(Error::Precondition("b and c must be positive".into()));
    }
    Ok(match parity {
        Parity::Even => {
            // 10⁶·b·m² > 245025·c
            let lhs = b * 1_000_000u32;
            let rhs = c * 245_025u32;
            let guess = isqrt(&(&rhs / &lhs));
            least_from(guess, |m| &lhs * m * m > rhs)
        }
        Parity::Odd => {
            // (16·b·m²)² > c
            let guess = isqrt(&isqrt(&(c / (b * b * 256u32))));
            least_from(guess, |m| {
                let v = b * m * m * 16u32;
                &v * &v > *c
            })
        }
    })
}

pub fn gap_type_a(a: &BigInt) -> Result<GapBound> {
    Ok(GapBound {
        kind: GapKind::TypeAL,
        value: lower_type_a(a)?,
        provenance: "l >= (-2 + sqrt(4 + 3 sqrt a))/12".into(),
    })
}

pub fn gap_type_b(a: &BigInt, k: u32) -> Result<GapBound> {
    Ok(GapBound {
        kind: GapKind::TypeBM,
        value: lower_type_b(a, k, FamilyClass::C2)?,
        provenance: format!("m > kappa_{k} a"),
    })
}

pub fn gap_vw(b: &BigInt, c: &BigInt, parity: Parity) -> Result<GapBound> {
    let (kind, provenance) = match parity {
        Parity::Even => (GapKind::VwEvenM, "m > 0.495 sqrt(c/b)"),
        Parity::Odd => (GapKind::VwOddM, "m^2 > 0.0625 sqrt(c)/b"),
    };
    Ok(GapBound {
        kind,
        value: lower_vw(b, c, parity)?,
        provenance: provenance.into(),
    })
}

/// Evidence that no `c₂±` triple over this pair has `s ≡ ±a (mod r)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExclusionCertificate {
    pub k: u32,
    pub p: u32,
    #[serde(with = "decimal")]
    pub r: BigInt,
    /// `4k + 4`, which `r` would have to divide.
    pub forced_divisor: u32,
    /// `s mod r` for `c₂⁺` and `c₂⁻`, checked to avoid `±a mod r`.
    #[serde(with = "decimal::vec")]
    pub s_residues: Vec<BigInt>,
}

pub fn exclusion_c2_s_congruence(pair: &D4Pair) -> Result<ExclusionCertificate> {
    let k = pair.k.value();
    if pair.r <= BigInt::from(28) {
        return Err(Error::InapplicableSmallR(format!("r = {} does not exceed 28", pair.r)));
    }
    let forced_divisor = 4 * k + 4;
    if (BigInt::from(forced_divisor) % &pair.r).to_u32() == Some(0) {
        return Err(Error::Precondition(format!("r = {} divides {forced_divisor}", pair.r)));
    }
    let a_res = pair.a.mod_floor(&pair.r);
    let neg_a_res = (-&pair.a).mod_floor(&pair.r);
    let mut s_residues = Vec::new();
    for br in Branch::BOTH {
        let cand = c_family(pair, FamilyClass::C2.with(br))?;
        let res = cand.s.mod_floor(&pair.r);
        if res == a_res || res == neg_a_res {
            return Err(Error::Precondition(format!("c2{}: s ≡ ±a (mod r)", br.symbol())));
        }
        s_residues.push(res);
    }
    Ok(ExclusionCertificate {
        k,
        p: pair.p,
        r: pair.r.clone(),
        forced_divisor,
        s_residues,
    })
}
