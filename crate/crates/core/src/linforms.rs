//! Linear forms in three logarithms attached to `P_l = Q_m` and `v_m = w_n`,
//! Matveev's lower bound, and the index inequalities it produces.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::{decimal, HpReal};
use crate::gaps::{lower_type_a, lower_type_b, lower_vw, Parity};
use crate::pell::{pair_at, Multiplier};
use crate::sequences::{p_sequence, q_sequence, InitialKind, InitialTermSet};
use crate::tuples::{c_family, Branch, Family, FamilyClass, SortedTriple};

/// Default working precision for bound evaluation.
pub const DEFAULT_BITS: u32 = 256;

/// Upper end of the `p` scan in [`p_bound`]; far beyond every crossover.
pub const P_SCAN_LIMIT: u32 = 600;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// `Λ = l·log α − m·log β + log γ` from `P_l = Q_m`.
    Pq,
    /// `Λ = m·log β_s − n·log β_t + log γ'` from `v_m = w_n`.
    Vw,
}

/// A linear form over a sorted triple and a choice of initial terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearFormInstance {
    pub triple: SortedTriple,
    pub init: InitialTermSet,
    pub route: Route,
}

fn sqrt_int(n: &BigInt, prec: u32) -> Result<HpReal> {
    HpReal::from_int(n, prec).sqrt()
}

/// `log((u + √(xy))/2)`.
fn log_unit(u: &BigInt, x: &BigInt, y: &BigInt, prec: u32) -> Result<HpReal> {
    let v = HpReal::from_int(u, prec).add(&sqrt_int(&(x * y), prec)?);
    v.div(&HpReal::from_i64(2, prec))?.ln()
}

impl LinearFormInstance {
    pub fn pq(triple: SortedTriple, init: InitialTermSet) -> Self {
        LinearFormInstance {
            triple,
            init,
            route: Route::Pq,
        }
    }

    pub fn vw(triple: SortedTriple, init: InitialTermSet) -> Self {
        LinearFormInstance {
            triple,
            init,
            route: Route::Vw,
        }
    }

    /// Logarithm multiplying the first index: `log α` (PQ) or `log β_s` (VW).
    pub fn log_first(&self, prec: u32) -> Result<HpReal> {
        let t = &self.triple;
        match self.route {
            Route::Pq => log_unit(&t.r, &t.a, &t.b, prec),
            Route::Vw => log_unit(&t.s, &t.a, &t.c, prec),
        }
    }

    /// Logarithm multiplying the second index: `log β` (PQ) or `log β_t` (VW).
    pub fn log_second(&self, prec: u32) -> Result<HpReal> {
        let t = &self.triple;
        match self.route {
            Route::Pq => log_unit(&t.s, &t.a, &t.c, prec),
            Route::Vw => log_unit(&t.t, &t.b, &t.c, prec),
        }
    }

    /// `γ = √c(y₂√a + x₂√b) / (√b(z₀√a + x₀√c))` or
    /// `γ' = √b(x₀√c + z₀√a) / (√a(y₁√c + z₁√b))`.
    pub fn gamma(&self, prec: u32) -> Result<HpReal> {
        let t = &self.triple;
        let it = &self.init;
        let (sa, sb, sc) = (sqrt_int(&t.a, prec)?, sqrt_int(&t.b, prec)?, sqrt_int(&t.c, prec)?);
        let lin = |u: &BigInt, x: &HpReal, v: &BigInt, y: &HpReal| x.mul_int(u).add(&y.mul_int(v));
        let (num, den) = match self.route {
            Route::Pq => (
                sc.mul(&lin(&it.y2, &sa, &it.x2, &sb)),
                sb.mul(&lin(&it.z0, &sa, &it.x0, &sc)),
            ),
            Route::Vw => (
                sb.mul(&lin(&it.x0, &sc, &it.z0, &sa)),
                sa.mul(&lin(&it.y1, &sc, &it.z1, &sb)),
            ),
        };
        num.div(&den)
    }

    pub fn log_gamma(&self, prec: u32) -> Result<HpReal> {
        let g = self.gamma(prec)?;
        if !g.is_positive() {
            return Err(Error::Precondition("γ is not certified positive".into()));
        }
        g.ln()
    }

    /// `i·log(first) − j·log(second) + log γ`, evaluated with 64 guard bits
    /// since the three terms cancel almost completely at a solution.
    pub fn lambda(&self, i: u64, j: u64, prec: u32) -> Result<HpReal> {
        let w = prec + 64;
        Ok(self
            .log_first(w)?
            .mul_int(&BigInt::from(i))
            .sub(&self.log_second(w)?.mul_int(&BigInt::from(j)))
            .add(&self.log_gamma(w)?))
    }

    /// The four conjugates of `γ` (PQ route), `γ` itself first.
    pub fn gamma_conjugates(&self, prec: u32) -> Result<Vec<(HpReal, HpReal)>> {
        let t = &self.triple;
        let it = &self.init;
        let ab = sqrt_int(&(&t.a * &t.b), prec)?;
        let ac = sqrt_int(&(&t.a * &t.c), prec)?;
        let bc = sqrt_int(&(&t.b * &t.c), prec)?;
        // γ = (y₂√(ac) + x₂√(bc)) / (z₀√(ab) + x₀√(bc)); the Galois group flips
        // the signs of (√(ab), √(ac), √(bc)) with product +1
        let mut out = Vec::with_capacity(4);
        for (e_ab, e_ac, e_bc) in [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)] {
            let s = |v: &HpReal, e: i32| if e > 0 { v.clone() } else { v.neg() };
            let num = s(&ac, e_ac).mul_int(&it.y2).add(&s(&bc, e_bc).mul_int(&it.x2));
            let den = s(&ab, e_ab).mul_int(&it.z0).add(&s(&bc, e_bc).mul_int(&it.x0));
            out.push((num, den));
        }
        Ok(out)
    }

    /// A primitive integer polynomial vanishing on the conjugates of `γ`,
    /// highest degree first. Before removing the content its leading
    /// coefficient is `∏(z₀√(ab) ± x₀√(bc)) = 16b²(c − a)²`.
    pub fn gamma_polynomial(&self) -> Result<Vec<BigInt>> {
        if self.route != Route::Pq {
            return Err(Error::Precondition("γ polynomial is defined for the PQ route".into()));
        }
        let t = &self.triple;
        let it = &self.init;
        let m = [&it.y2, &it.x2, &it.z0, &it.x0]
            .into_iter()
            .map(|v| v.abs())
            .max()
            .unwrap();
        let prec = 4 * (m.bits() + t.c.bits()) as u32 + 128;
        let conj = self.gamma_conjugates(prec)?;
        // ∏ (den·X − num)
        let mut coeffs = vec![HpReal::from_i64(1, prec)];
        for (num, den) in &conj {
            let mut next = vec![HpReal::from_i64(0, prec); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i] = next[i].add(&c.mul(den));
                next[i + 1] = next[i + 1].sub(&c.mul(num));
            }
            coeffs = next;
        }
        let half = HpReal::from_ratio(&BigInt::one(), &BigInt::from(2), prec);
        let ints = coeffs
            .iter()
            .map(|c| c.add(&half).certified_floor())
            .collect::<Option<Vec<_>>>()
            .ok_or(Error::PrecisionExhausted { bits: prec })?;
        // az₀² − cx₀² = 4(a − c) makes the product of denominators 16b²(c − a)²
        let lead = (&t.c - &t.a) * (&t.c - &t.a) * &t.b * &t.b * 16u32;
        if ints[0] != lead {
            return Err(Error::Precondition("γ polynomial leading coefficient mismatch".into()));
        }
        let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        let sign = if ints[0].is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        Ok(ints.into_iter().map(|c| &c / &g * &sign).collect())
    }

    /// Upper bound for the absolute logarithmic height of `γ`:
    /// `(log a₀ + Σ log max(1, |γᵢ|))/4` with `a₀` the leading coefficient of
    /// [`gamma_polynomial`](Self::gamma_polynomial).
    pub fn height_gamma(&self, prec: u32) -> Result<HpReal> {
        let t = &self.triple;
        if t.c == t.a {
            return Err(Error::Precondition("c = a".into()));
        }
        let poly = self.gamma_polynomial()?;
        let one = HpReal::from_i64(1, prec);
        let mut sum = HpReal::ln_int(&poly[0], prec)?;
        for (num, den) in self.gamma_conjugates(prec)? {
            let v = num.div(&den)?.abs();
            sum = sum.add(&v.max(&one).ln()?);
        }
        sum.div(&HpReal::from_i64(4, prec))
    }
}

/// `min{(ej/2)^χ·30^{j+3}·j^{3.5}/χ, 2^{6j+20}}`.
pub fn matveev_c(j: u32, chi: u32, prec: u32) -> Result<HpReal> {
    if j == 0 || !(1..=2).contains(&chi) {
        return Err(Error::Precondition(format!(
            "need j ≥ 1 and χ ∈ {{1, 2}}, got ({j}, {chi})"
        )));
    }
    let jj = BigInt::from(j);
    let ej2 = HpReal::e(prec).mul_int(&jj).div(&HpReal::from_i64(2, prec))?;
    let j35 = HpReal::from_int(&(&jj * &jj * &jj), prec).mul(&sqrt_int(&jj, prec)?);
    let first = ej2
        .powi(chi)
        .mul_int(&num_traits::pow(BigInt::from(30), (j + 3) as usize))
        .mul(&j35)
        .div(&HpReal::from_i64(chi as i64, prec))?;
    let second = HpReal::from_int(&(BigInt::one() << (6 * j + 20) as usize), prec);
    Ok(first.min(&second))
}

/// Matveev data for one linear form with `j = 3`, `D = 4`.
#[derive(Debug, Clone)]
pub struct MatveevParams {
    pub degree: u32,
    pub a1: HpReal,
    pub a2: HpReal,
    pub a3: HpReal,
    pub b: BigInt,
    pub c: HpReal,
}

impl MatveevParams {
    pub fn new(inst: &LinearFormInstance, b: BigInt, prec: u32) -> Result<Self> {
        let d = 4;
        let two = BigInt::from(2);
        let floor = HpReal::from_decimal("0.16", prec).expect("literal");
        let a3 = inst
            .height_gamma(prec)?
            .mul_int(&BigInt::from(d))
            .max(&inst.log_gamma(prec)?.abs())
            .max(&floor);
        Ok(MatveevParams {
            degree: d,
            a1: inst.log_first(prec)?.mul_int(&two),
            a2: inst.log_second(prec)?.mul_int(&two),
            a3,
            b,
            c: matveev_c(3, 1, prec)?,
        })
    }

    /// Upper bound on `−log|Λ|`: `C·D²·A₁A₂A₃·log(eD)·log(eB)`.
    pub fn neg_log_lower_bound(&self) -> Result<HpReal> {
        let prec = self.c.prec();
        let d = BigInt::from(self.degree);
        let log_ed = HpReal::ln_int(&d, prec)?.add(&HpReal::from_i64(1, prec));
        let log_eb = HpReal::ln_int(&self.b, prec)?.add(&HpReal::from_i64(1, prec));
        Ok(self
            .c
            .mul_int(&(&d * &d))
            .mul(&self.a1)
            .mul(&self.a2)
            .mul(&self.a3)
            .mul(&log_ed)
            .mul(&log_eb))
    }
}

/// The upper bound on `Λ` for a solution with second index `m`:
/// `11.7·β^{−2m}` (Type a) or `4.4a²·β^{−2m}` (Type b).
pub fn lambda_bound(inst: &LinearFormInstance, m: u64, prec: u32) -> Result<HpReal> {
    if inst.route != Route::Pq {
        return Err(Error::Precondition("the Λ majorant belongs to the PQ route".into()));
    }
    if m == 0 {
        return Err(Error::Precondition("m must be at least 1".into()));
    }
    let factor = match inst.init.kind {
        InitialKind::TypeA => HpReal::from_decimal("11.7", prec).expect("literal"),
        InitialKind::TypeB => HpReal::from_decimal("4.4", prec)
            .expect("literal")
            .mul_int(&(&inst.triple.a * &inst.triple.a)),
        _ => return Err(Error::Precondition("initial terms are not of Type a or b".into())),
    };
    let t = &inst.triple;
    let beta = HpReal::from_int(&t.s, prec)
        .add(&sqrt_int(&(&t.a * &t.c), prec)?)
        .div(&HpReal::from_i64(2, prec))?;
    let exp = u32::try_from(2 * m).map_err(|_| Error::Precondition("m too large".into()))?;
    factor.div(&beta.powi(exp))
}

/// Shape of the left-hand side of an index inequality `f(n) < K·log²X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexForm {
    /// `n / log(e·n)`.
    LogEl,
    /// `n / log(n + 1)`.
    LogPlusOne,
}

impl IndexForm {
    fn eval(self, n: &BigInt, prec: u32) -> Result<HpReal> {
        let x = HpReal::from_int(n, prec);
        let den = match self {
            IndexForm::LogEl => HpReal::ln_int(n, prec)?.add(&HpReal::from_i64(1, prec)),
            IndexForm::LogPlusOne => HpReal::ln_int(&(n + 1u32), prec)?,
        };
        x.div(&den)
    }

    fn eval_f64(self, n: f64) -> f64 {
        match self {
            IndexForm::LogEl => n / (1.0 + n.ln()),
            IndexForm::LogPlusOne => n / (n + 1.0).ln(),
        }
    }
}

/// `f(n) < K·log²X` cannot be ruled out at this precision.
fn possibly_below(form: IndexForm, n: &BigInt, rhs: &HpReal) -> Result<bool> {
    Ok(!rhs.definitely_lt(&form.eval(n, rhs.prec())?))
}

fn index_rhs(k: &HpReal, x: &HpReal) -> Result<HpReal> {
    if !x.definitely_gt(&HpReal::from_i64(1, x.prec())) {
        return Err(Error::Precondition("X must exceed 1".into()));
    }
    let l = x.ln()?;
    Ok(k.mul(&l).mul(&l))
}

/// Largest `n ≥ 1` for which `f(n) < K·log²X` is not excluded; every `n`
/// above it provably violates the inequality.
pub fn solve_index_bound(k: &HpReal, x: &HpReal, form: IndexForm) -> Result<BigInt> {
    let rhs = index_rhs(k, x)?;
    let one = BigInt::one();
    if !possibly_below(form, &(&one + 1u32), &rhs)? {
        return Ok(one);
    }
    // f64 bracket, then certified bisection
    let target = rhs.to_f64(crate::exactmath::Rounding::Nearest);
    let (mut flo, mut fhi) = (1.0f64, 2.0f64);
    while form.eval_f64(fhi) < target {
        flo = fhi;
        fhi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (flo + fhi);
        if form.eval_f64(mid) < target {
            flo = mid;
        } else {
            fhi = mid;
        }
    }
    let approx = BigInt::from(flo as u128);
    let slack = (&approx >> 20usize) + 16u32;
    let mut lo = (&approx - &slack).max(&one + 1u32);
    while !possibly_below(form, &lo, &rhs)? {
        lo = (&lo / 2u32).max(&one + 1u32);
    }
    let mut hi = &approx + &slack;
    while possibly_below(form, &hi, &rhs)? {
        lo = hi.clone();
        hi *= 2u32;
    }
    while &hi - &lo > one {
        let mid: BigInt = (&lo + &hi) / 2u32;
        if possibly_below(form, &mid, &rhs)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Matveev-derived constant `K` for `P_l = Q_m` over `c₁⁺`/`c₂±`:
/// `C(3,1)·16·12·log(4e)/1.9` (Type a) or `/0.99` (Type b).
pub fn derived_index_constant(kind: InitialKind, prec: u32) -> Result<HpReal> {
    let decay = match kind {
        InitialKind::TypeA => "1.9",
        InitialKind::TypeB => "0.99",
        _ => return Err(Error::Precondition("constant is defined for Types a and b".into())),
    };
    let log4e = HpReal::ln_int(&BigInt::from(4), prec)?.add(&HpReal::from_i64(1, prec));
    matveev_c(3, 1, prec)?
        .mul_int(&BigInt::from(192))
        .mul(&log4e)
        .div(&HpReal::from_decimal(decay, prec).expect("literal"))
}

/// The constants of the index inequalities, as published.
pub mod constants {
    pub const TYPE_A: &str = "3.36e13";
    pub const TYPE_B: &str = "6.44e13";
    pub const C1_MINUS_K23: &str = "4.5e13";
    pub const C1_MINUS_K6: &str = "9e13";
    pub const VW: &str = "6.543e15";
}

/// `(K, X, form)` of the inequality that caps the index for this family and
/// solution type over `a`.
pub fn index_inequality(
    k: Multiplier,
    family: Family,
    kind: InitialKind,
    a: &BigInt,
    c: &BigInt,
    prec: u32,
) -> Result<(HpReal, HpReal, IndexForm)> {
    let lit = |s: &str| HpReal::from_decimal(s, prec).expect("literal");
    let c2 = HpReal::from_int(&(c * c), prec);
    let ten7_c2 = lit("10.7").mul(&c2);
    use FamilyClass::*;
    use InitialKind::*;
    Ok(match (family.class(), family.branch(), kind) {
        (C1, Branch::Minus, TypeA) => match k {
            Multiplier::Six => (
                lit(constants::C1_MINUS_K6),
                HpReal::from_int(&(a * 27u32), prec),
                IndexForm::LogEl,
            ),
            _ => (
                lit(constants::C1_MINUS_K23),
                HpReal::from_int(&(a * 72u32), prec),
                IndexForm::LogEl,
            ),
        },
        (C1, Branch::Plus, TypeA) | (C2, _, TypeA) => (lit(constants::TYPE_A), ten7_c2, IndexForm::LogEl),
        (C2, _, TypeB) => (lit(constants::TYPE_B), ten7_c2, IndexForm::LogEl),
        (C3, _, VwEven | VwOdd) => (lit(constants::VW), HpReal::from_int(c, prec), IndexForm::LogPlusOne),
        _ => {
            return Err(Error::UnsupportedFamily(format!(
                "no index inequality for {family} with {kind:?} solutions"
            )))
        }
    })
}

/// Lower bound on the index capped by [`index_inequality`]: `l` for Type a,
/// `m` for Type b, the full `v`-index `2m` / `2m+1` for the two VW parities.
pub fn gap_for(k: Multiplier, kind: InitialKind, triple: &SortedTriple, a: &BigInt) -> Result<BigInt> {
    Ok(match kind {
        InitialKind::TypeA => lower_type_a(&triple.a)?,
        InitialKind::TypeB => lower_type_b(a, k.value(), FamilyClass::C2)?,
        InitialKind::VwEven => lower_vw(&triple.b, &triple.c, Parity::Even)? * 2u32,
        InitialKind::VwOdd => lower_vw(&triple.b, &triple.c, Parity::Odd)? * 2u32 + 1u32,
    })
}

/// Absolute index bound at one pair: `l` (PQ) or the full `v`-index (VW).
pub fn index_cap_at(k: Multiplier, family: Family, kind: InitialKind, p: u32, prec: u32) -> Result<BigInt> {
    let pair = pair_at(k.value(), p)?;
    let cand = c_family(&pair, family)?;
    let (kk, x, form) = index_inequality(k, family, kind, &pair.a, &cand.c, prec)?;
    solve_index_bound(&kk, &x, form)
}

/// Range of `p` left open by one sign branch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchBound {
    pub family: Family,
    pub p_max: u32,
    /// Index bound at `p_max` in the units of [`gap_for`].
    #[serde(with = "decimal")]
    pub full_index_cap: BigInt,
}

/// Largest `p` at which the gap lower bound does not exceed the Matveev cap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PBound {
    pub k: Multiplier,
    pub class: FamilyClass,
    pub kind: InitialKind,
    pub p_max: u32,
    /// `l` cap (PQ) or `m` cap (VW, half the full index) at `p_max`.
    #[serde(with = "decimal")]
    pub index_cap: BigInt,
    #[serde(with = "decimal")]
    pub full_index_cap: BigInt,
    pub branches: Vec<BranchBound>,
}

fn branch_bound(k: Multiplier, family: Family, kind: InitialKind, prec: u32) -> Result<Option<BranchBound>> {
    let mut last: Option<(u32, HpReal, HpReal, IndexForm)> = None;
    for p in 1..=P_SCAN_LIMIT {
        let pair = pair_at(k.value(), p)?;
        let cand = match c_family(&pair, family) {
            Ok(c) => c,
            Err(Error::DegenerateC(_)) => continue,
            Err(e) => return Err(e),
        };
        let (kk, x, form) = index_inequality(k, family, kind, &pair.a, &cand.c, prec)?;
        let gap = gap_for(k, kind, &cand.sorted, &pair.a)?;
        let rhs = index_rhs(&kk, &x)?;
        if possibly_below(form, &gap, &rhs)? {
            last = Some((p, kk, x, form));
        } else if last.is_some() {
            break;
        }
    }
    last.map(|(p_max, kk, x, form)| {
        Ok(BranchBound {
            family,
            p_max,
            full_index_cap: solve_index_bound(&kk, &x, form)?,
        })
    })
    .transpose()
}

pub fn p_bound(k: u32, class: FamilyClass, kind: InitialKind) -> Result<PBound> {
    p_bound_with(k, class, kind, DEFAULT_BITS)
}

pub fn p_bound_with(k: u32, class: FamilyClass, kind: InitialKind, prec: u32) -> Result<PBound> {
    let k = Multiplier::try_from(k)?;
    let mut branches = Vec::new();
    for br in Branch::BOTH {
        if let Some(b) = branch_bound(k, class.with(br), kind, prec)? {
            branches.push(b);
        }
    }
    let best = branches
        .iter()
        .max_by(|x, y| x.p_max.cmp(&y.p_max).then(x.full_index_cap.cmp(&y.full_index_cap)))
        .ok_or_else(|| Error::Precondition("no admissible p".into()))?
        .clone();
    let index_cap = match kind {
        InitialKind::VwEven | InitialKind::VwOdd => &best.full_index_cap / 2u32,
        _ => best.full_index_cap.clone(),
    };
    Ok(PBound {
        k,
        class,
        kind,
        p_max: best.p_max,
        index_cap,
        full_index_cap: best.full_index_cap,
        branches,
    })
}

/// Where a known solution `x² = a·d + 4` of a sorted triple sits in the
/// `P`/`Q` sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionSite {
    pub init: InitialTermSet,
    pub l: u64,
    pub m: u64,
    pub x: BigInt,
}

/// All `(initial terms, l, m)` with `P_l = Q_m = √(a·d + 4)`, `l, m ≤ max_index`,
/// respecting the index parities of Types a and b.
pub fn locate_solution(triple: &SortedTriple, d: &BigInt, max_index: usize) -> Result<Vec<SolutionSite>> {
    let x = crate::exactmath::is_perfect_square(&(&triple.a * d + 4u32))
        .ok_or_else(|| Error::Precondition(format!("a·{d} + 4 is not a square")))?;
    let mut sets = vec![
        InitialTermSet::type_a(Branch::Plus),
        InitialTermSet::type_a(Branch::Minus),
    ];
    for z in Branch::BOTH {
        for y in Branch::BOTH {
            sets.push(InitialTermSet::type_b(triple, z, y));
        }
    }
    let mut out = Vec::new();
    for it in sets {
        let ps = p_sequence(triple, &it).terms(max_index + 1)?;
        let qs = q_sequence(triple, &it).terms(max_index + 1)?;
        for (l, pl) in ps.iter().enumerate() {
            for (m, qm) in qs.iter().enumerate() {
                if *pl != x || *qm != x {
                    continue;
                }
                let ok = match it.kind {
                    InitialKind::TypeA => l % 2 == 0 && m % 2 == 0,
                    _ => m % 2 == 1,
                };
                if ok {
                    out.push(SolutionSite {
                        init: it.clone(),
                        l: l as u64,
                        m: m as u64,
                        x: x.clone(),
                    });
                }
            }
        }
    }
    Ok(out)
}


#[cfg(test)]
mod table_tests {
    use super::*;

    fn check(k: u32, class: FamilyClass, kind: InitialKind, p: u32, cap: f64) {
        let b = p_bound(k, class, kind).unwrap();
        let got = b.index_cap.to_string().parse::<f64>().unwrap();
        eprintln!(
            "k={k} {class} {kind:?}: p_max={} cap={got:.3e} (published {p}, {cap:.3e})",
            b.p_max
        );
        assert!(b.p_max.abs_diff(p) <= 3);
        assert!(got <= 2.0 * cap && got >= cap / 2.0);
    }

    #[test]
    fn published_pq_table() {
        use FamilyClass::*;
        use InitialKind::*;
        for (k, class, kind, p, cap) in [
            (2, C1, TypeA, 111, 2.54e20),
            (3, C1, TypeA, 149, 2.56e20),
            (6, C1, TypeA, 85, 2.52e20),
            (2, C2, TypeA, 116, 2.57e21),
            (3, C2, TypeA, 156, 2.6e21),
            (6, C2, TypeA, 89, 2.56e21),
            (2, C2, TypeB, 28, 2.82e20),
            (3, C2, TypeB, 37, 2.75e20),
            (6, C2, TypeB, 22, 3e20),
        ] {
            check(k, class, kind, p, cap);
        }
    }

    #[test]
    fn published_vw_table() {
        use InitialKind::*;
        for (k, kind, p, cap) in [
            (2, VwEven, 14, 2.6e21),
            (3, VwEven, 19, 3e21),
            (6, VwEven, 11, 2.6e21),
            (2, VwOdd, 40, 2.1e22),
            (3, VwOdd, 54, 2.2e22),
            (6, VwOdd, 30, 2.1e22),
        ] {
            check(k, FamilyClass::C3, kind, p, cap);
        }
    }
}
