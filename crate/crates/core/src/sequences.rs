//! Binary recurrences `u_{i+2} = k·u_{i+1} − u_i` attached to a triple, with
//! exact and modular evaluation.
//!
//! Every sequence stores `2u` so that the half-integer terms of `T_ν`, `U_ν`
//! and the `½(…)` second terms stay in exact integer arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pell::D4Pair;
use crate::tuples::{c_family, d_pm, Branch, Family, SortedTriple};

/// Largest index `term` will iterate to.
pub const TERM_INDEX_CAP: u64 = 1_000_000;

/// `u₀, u₁` stored doubled, `u_{i+2} = coeff·u_{i+1} − u_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceSpec {
    pub coeff: BigInt,
    pub u0_doubled: BigInt,
    pub u1_doubled: BigInt,
    /// Whether every term is expected to be an integer.
    pub integral: bool,
}

impl RecurrenceSpec {
    pub fn new(coeff: BigInt, u0_doubled: BigInt, u1_doubled: BigInt, integral: bool) -> Self {
        RecurrenceSpec {
            coeff,
            u0_doubled,
            u1_doubled,
            integral,
        }
    }

    /// `u₀ = x`, `u₁ = (k·x + m·y)/2`: the shape shared by all the
    /// P, Q, A, B, v, w sequences.
    pub fn from_solution(coeff: &BigInt, x: &BigInt, m: &BigInt, y: &BigInt) -> Self {
        RecurrenceSpec::new(coeff.clone(), x * 2, coeff * x + m * y, true)
    }

    /// `2u_i`.
    pub fn term_doubled(&self, i: u64) -> Result<BigInt> {
        if i > TERM_INDEX_CAP {
            return Err(Error::IndexCapExceeded {
                index: i,
                cap: TERM_INDEX_CAP,
            });
        }
        let (mut u0, mut u1) = (self.u0_doubled.clone(), self.u1_doubled.clone());
        for _ in 0..i {
            let u2 = &self.coeff * &u1 - &u0;
            u0 = std::mem::replace(&mut u1, u2);
        }
        Ok(u0)
    }

    pub fn term(&self, i: u64) -> Result<BigInt> {
        halve(self.term_doubled(i)?, i, self.integral)
    }

    /// First `n` terms, checked for integrality.
    pub fn terms(&self, n: usize) -> Result<Vec<BigInt>> {
        let mut out = Vec::with_capacity(n);
        let (mut u0, mut u1) = (self.u0_doubled.clone(), self.u1_doubled.clone());
        for i in 0..n {
            let u2 = &self.coeff * &u1 - &u0;
            let cur = std::mem::replace(&mut u0, std::mem::replace(&mut u1, u2));
            out.push(halve(cur, i as u64, self.integral)?);
        }
        Ok(out)
    }

    /// `2u_i mod 2M`, via 2×2 matrix powers.
    pub fn term_doubled_mod(&self, i: u64, modulus: &BigInt) -> Result<BigInt> {
        if !modulus.is_positive() {
            return Err(Error::Precondition("modulus must be positive".into()));
        }
        let m2 = modulus * 2;
        // [u_{i+1}, u_i]ᵀ = [[k, −1], [1, 0]]^i · [u₁, u₀]ᵀ
        let k = self.coeff.mod_floor(&m2);
        let mut base = [[k, &m2 - 1u32], [BigInt::one(), BigInt::zero()]];
        let mut acc = [[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]];
        let mut e = i;
        while e > 0 {
            if e & 1 == 1 {
                acc = mat_mul(&acc, &base, &m2);
            }
            base = mat_mul(&base, &base, &m2);
            e >>= 1;
        }
        let v = &acc[1][0] * &self.u1_doubled + &acc[1][1] * &self.u0_doubled;
        Ok(v.mod_floor(&m2))
    }

    /// `u_i mod M` for an integral sequence.
    pub fn term_mod(&self, i: u64, modulus: &BigInt) -> Result<BigInt> {
        let d = self.term_doubled_mod(i, modulus)?;
        if d.is_odd() {
            return Err(Error::HalfIntegerLeak { index: i });
        }
        Ok(d / 2)
    }
}

fn halve(doubled: BigInt, index: u64, integral: bool) -> Result<BigInt> {
    if doubled.is_odd() {
        return Err(if integral {
            Error::HalfIntegerLeak { index }
        } else {
            Error::Precondition(format!("term {index} is a half-integer; use term_doubled"))
        });
    }
    Ok(doubled / 2)
}

fn mat_mul(x: &[[BigInt; 2]; 2], y: &[[BigInt; 2]; 2], m: &BigInt) -> [[BigInt; 2]; 2] {
    let e = |i: usize, j: usize| (&x[i][0] * &y[0][j] + &x[i][1] * &y[1][j]).mod_floor(m);
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// Which configuration of fundamental solutions a set of initial terms
/// describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    /// `P_l = Q_m` with `l, m` even.
    TypeA,
    /// `P_l = Q_m` with `m` odd.
    TypeB,
    /// `v_{2m} = w_{2n}`.
    VwEven,
    /// `v_{2m+1} = w_{2n+1}`.
    VwOdd,
}

/// Fundamental solutions `(z₀, x₀)`, `(z₁, y₁)`, `(y₂, x₂)` of the three
/// Pellian equations of a triple, in its sorted order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitialTermSet {
    pub kind: InitialKind,
    pub z0: BigInt,
    pub x0: BigInt,
    pub z1: BigInt,
    pub y1: BigInt,
    pub y2: BigInt,
    pub x2: BigInt,
}

impl InitialTermSet {
    /// `z₀ = ±2`, `x₀ = y₂ = x₂ = 2`.
    pub fn type_a(z0_sign: Branch) -> Self {
        let two = BigInt::from(2);
        InitialTermSet {
            kind: InitialKind::TypeA,
            z0: z0_sign.apply(two.clone()),
            x0: two.clone(),
            z1: z0_sign.apply(two.clone()),
            y1: two.clone(),
            y2: two.clone(),
            x2: two,
        }
    }

    /// `z₀ = ±t`, `x₀ = r`, `y₂ = ±2`, `x₂ = 2`.
    pub fn type_b(triple: &SortedTriple, z0_sign: Branch, y2_sign: Branch) -> Self {
        let two = BigInt::from(2);
        InitialTermSet {
            kind: InitialKind::TypeB,
            z0: z0_sign.apply(triple.t.clone()),
            x0: triple.r.clone(),
            z1: z0_sign.apply(triple.s.clone()),
            y1: triple.r.clone(),
            y2: y2_sign.apply(two.clone()),
            x2: two,
        }
    }

    /// `z₀ = z₁ = ±2`, `x₀ = y₁ = 2`.
    pub fn vw_even(sign: Branch) -> Self {
        InitialTermSet {
            kind: InitialKind::VwEven,
            ..Self::type_a(sign)
        }
    }

    /// `z₀ = ±t`, `z₁ = ±s` (same sign), `x₀ = y₁ = r`.
    pub fn vw_odd(triple: &SortedTriple, sign: Branch) -> Self {
        InitialTermSet {
            kind: InitialKind::VwOdd,
            ..Self::type_b(triple, sign, Branch::Plus)
        }
    }
}

/// `P_l`: `P₀ = x₂`, `P₁ = (r·x₂ + a·y₂)/2`.
pub fn p_sequence(tr: &SortedTriple, it: &InitialTermSet) -> RecurrenceSpec {
    RecurrenceSpec::from_solution(&tr.r, &it.x2, &tr.a, &it.y2)
}

/// `Q_m`: `Q₀ = x₀`, `Q₁ = (s·x₀ + a·z₀)/2`.
pub fn q_sequence(tr: &SortedTriple, it: &InitialTermSet) -> RecurrenceSpec {
    RecurrenceSpec::from_solution(&tr.s, &it.x0, &tr.a, &it.z0)
}

/// `A_n`: `A₀ = y₁`, `A₁ = (t·y₁ + b·z₁)/2`.
pub fn a_sequence(tr: &SortedTriple, it: &InitialTermSet) -> RecurrenceSpec {
    RecurrenceSpec::from_solution(&tr.t, &it.y1, &tr.b, &it.z1)
}

/// `B_l`: `B₀ = y₂`, `B₁ = (r·y₂ + b·x₂)/2`.
pub fn b_sequence(tr: &SortedTriple, it: &InitialTermSet) -> RecurrenceSpec {
    RecurrenceSpec::from_solution(&tr.r, &it.y2, &tr.b, &it.x2)
}

/// `v_m`: `v₀ = z₀`, `v₁ = (s·z₀ + c·x₀)/2`.
pub fn v_sequence(tr: &SortedTriple, z0: &BigInt, x0: &BigInt) -> RecurrenceSpec {
    RecurrenceSpec::from_solution(&tr.s, z0, &tr.c, x0)
}

/// `w_n`: `w₀ = z₁`, `w₁ = (t·z₁ + c·y₁)/2`.
pub fn w_sequence(tr: &SortedTriple, z1: &BigInt, y1: &BigInt) -> RecurrenceSpec {
    RecurrenceSpec::from_solution(&tr.t, z1, &tr.c, y1)
}

/// `((r + √(r²−4))/2)^ν = T_ν + U_ν√(r²−4)`, halves stored doubled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PellPowerPair {
    pub nu: u32,
    pub t_doubled: BigInt,
    pub u_doubled: BigInt,
}

pub fn t_sequence(r: &BigInt) -> RecurrenceSpec {
    RecurrenceSpec::new(r.clone(), BigInt::from(2), r.clone(), false)
}

pub fn u_sequence(r: &BigInt) -> RecurrenceSpec {
    RecurrenceSpec::new(r.clone(), BigInt::zero(), BigInt::one(), false)
}

pub fn pell_power(r: &BigInt, nu: u32) -> Result<PellPowerPair> {
    Ok(PellPowerPair {
        nu,
        t_doubled: t_sequence(r).term_doubled(nu as u64)?,
        u_doubled: u_sequence(r).term_doubled(nu as u64)?,
    })
}

impl PellPowerPair {
    /// `s_ν^± = 2T_ν ± 2aU_ν`.
    pub fn s(&self, a: &BigInt, branch: Branch) -> BigInt {
        &self.t_doubled + branch.apply(a * &self.u_doubled)
    }

    /// `t_ν^± = ±2T_ν + 2bU_ν`.
    pub fn t(&self, b: &BigInt, branch: Branch) -> BigInt {
        branch.apply(self.t_doubled.clone()) + b * &self.u_doubled
    }
}

/// The residue of `Q_{2m}` (or `P_{2l}`) predicted by the closed-form
/// congruence, modulo `a²` (`a` odd) or `a²/2` (`a` even).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceResidue {
    pub residue: BigInt,
    pub modulus: BigInt,
}

fn closed_form_residue(a: &BigInt, x0: &BigInt, lead: &BigInt, lin: &BigInt, m: u64) -> CongruenceResidue {
    let modulus: BigInt = if a.is_even() { a * a / 2 } else { a * a };
    let m = BigInt::from(m);
    let inner: BigInt = lead * &m * &m + lin * &m;
    // a·inner is even: either a is even or inner is
    let twice: BigInt = x0 * 2 + a * inner;
    debug_assert!(twice.is_even());
    CongruenceResidue {
        residue: (twice / 2u32).mod_floor(&modulus),
        modulus,
    }
}

/// `Q_{2m} ≡ x₀ + a(c·x₀·m² + s·z₀·m)/2`.
pub fn congruence_q2m(a: &BigInt, c: &BigInt, s: &BigInt, z0: &BigInt, x0: &BigInt, m: u64) -> CongruenceResidue {
    closed_form_residue(a, x0, &(c * x0), &(s * z0), m)
}

/// `P_{2l} ≡ x₂ + a(b·x₂·l² + r·y₂·l)/2`.
pub fn congruence_p2l(a: &BigInt, b: &BigInt, r: &BigInt, y2: &BigInt, x2: &BigInt, l: u64) -> CongruenceResidue {
    closed_form_residue(a, x2, &(b * x2), &(r * y2), l)
}

/// Checks the four index-shift identities of `v` and `w` for indices
/// `0..depth`:
///
/// `v[e, m] = v[−t, m+1]`, `v[−e, m+1] = v[t, m]`,
/// `w[e, n] = w[−s, n+1]`, `w[−e, n+1] = w[s, n]`, where `e = (cr − st)/2`
/// and each `z`-start carries its matching `x`- (resp. `y`-) companion.
pub fn shift_identity_check(tr: &SortedTriple, depth: usize) -> Result<bool> {
    if depth == 0 {
        return Ok(true);
    }
    let e = tr.shift_value();
    let x_e = (&tr.s * &tr.r - &tr.a * &tr.t) / 2;
    let y_e = (&tr.t * &tr.r - &tr.b * &tr.s) / 2;
    let n = depth + 1;
    let v = |z: BigInt, x: &BigInt| v_sequence(tr, &z, x).terms(n);
    let w = |z: BigInt, y: &BigInt| w_sequence(tr, &z, y).terms(n);

    let v_e = v(e.clone(), &x_e)?;
    let v_neg_t = v(-tr.t.clone(), &tr.r)?;
    let v_neg_e = v(-e.clone(), &x_e)?;
    let v_t = v(tr.t.clone(), &tr.r)?;
    let w_e = w(e.clone(), &y_e)?;
    let w_neg_s = w(-tr.s.clone(), &tr.r)?;
    let w_neg_e = w(-e, &y_e)?;
    let w_s = w(tr.s.clone(), &tr.r)?;
    Ok((0..depth).all(|i| {
        v_e[i] == v_neg_t[i + 1] && v_neg_e[i + 1] == v_t[i] && w_e[i] == w_neg_s[i + 1] && w_neg_e[i + 1] == w_s[i]
    }))
}

/// The extension produced by the solution `x = Q₁ = P_{ν+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrivialSolution {
    pub x: BigInt,
    pub d: BigInt,
}

/// `x = r(T_ν ± aU_ν) + a(bU_ν ± T_ν)` without any validity checks.
pub fn trivial_x(pair: &D4Pair, nu: u32, branch: Branch) -> Result<BigInt> {
    let pp = pell_power(&pair.r, nu)?;
    let b = pair.b();
    let s = pp.s(&pair.a, branch);
    let t = pp.t(&b, branch);
    // with s, t already doubled this is (r·s + a·t)/2
    Ok((&pair.r * s + &pair.a * t) / 2)
}

/// The trivial solution of `{a, ka, c_ν^±}` with `d = (x² − 4)/a`, which is
/// checked to be one of `d±` of the triple.
pub fn trivial_solution(pair: &D4Pair, nu: u32, branch: Branch) -> Result<TrivialSolution> {
    let family = Family::new(nu, branch).ok_or_else(|| Error::Precondition(format!("ν = {nu} is outside 1..=3")))?;
    let cand = c_family(pair, family)?;
    let x = trivial_x(pair, nu, branch)?;
    let (d, rem) = (&x * &x - 4u32).div_rem(&pair.a);
    if !rem.is_zero() {
        return Err(Error::Precondition(format!("(x² − 4)/a is not integral for x = {x}")));
    }
    let (dm, dp) = d_pm(&pair.a, &pair.b(), &cand.c)?;
    if d != dm && d != dp {
        return Err(Error::Precondition(format!(
            "d = {d} is neither d₋ = {dm} nor d₊ = {dp}"
        )));
    }
    Ok(TrivialSolution { x, d })
}
