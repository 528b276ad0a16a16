//! Brute-force ground truth: exhaustive extension search, direct solution of
//! `P_l = Q_m` and `v_m = w_n` at small indices, and the `k = 4`, `k = 5`
//! sanity identities.
//!
//! Nothing here calls into the recurrence, bound or reduction modules; only
//! the integer helpers of [`crate::exactmath`] are shared.

use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::{decimal, is_perfect_square, isqrt_u128, perfect_square_u128};

/// Largest `l_max` accepted by [`solve_pq_small`].
pub const L_MAX_CAP: u64 = 10_000;

/// Candidate count beyond which [`extend_triple`] refuses to run.
const CANDIDATE_CAP: u128 = 200_000_000;

/// Largest modulus whose square roots of 4 are found by scanning.
const ROOT_SCAN_CAP: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchWindow {
    pub a_max: u64,
    pub c_max: u64,
    pub d_max: u64,
}

fn sq(n: &BigInt) -> Option<BigInt> {
    is_perfect_square(n)
}

fn is_sq(n: &BigInt) -> bool {
    !n.is_negative() && sq(n).is_some()
}

fn is_sq_u128(n: u128) -> bool {
    perfect_square_u128(n).is_some()
}

/// Is every product of two distinct elements plus 4 a square?
pub fn is_d4_set(elements: &[BigInt]) -> bool {
    elements
        .iter()
        .enumerate()
        .all(|(i, x)| elements[i + 1..].iter().all(|y| x != y && is_sq(&(x * y + 4u32))))
}

/// `d±` of a D(4)-triple, from `d± = a + b + c + (abc ± rst)/2`.
pub fn regular_extensions(a: &BigInt, b: &BigInt, c: &BigInt) -> Result<(BigInt, BigInt)> {
    let root = |x: &BigInt, y: &BigInt| {
        sq(&(x * y + 4u32)).ok_or_else(|| Error::NotATriple(format!("{x}·{y} + 4 is not a square")))
    };
    let rst = root(a, b)? * root(a, c)? * root(b, c)?;
    let abc = a * b * c;
    let sum = a + b + c;
    Ok((&sum + (&abc - &rst) / 2, sum + (abc + rst) / 2))
}

/// How a candidate `d` relates to a triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DClass {
    Zero,
    DMinus,
    DPlus,
    Irregular,
    /// `{a, b, c, d}` is not a D(4)-set (or `d` is not a positive integer).
    NotAnExtension,
}

impl DClass {
    pub fn label(self) -> &'static str {
        match self {
            DClass::Zero => "zero",
            DClass::DMinus => "d_minus",
            DClass::DPlus => "d_plus",
            DClass::Irregular => "irregular",
            DClass::NotAnExtension => "not_an_extension",
        }
    }
}

pub fn classify_d(triple: &[BigInt; 3], d: &BigInt) -> Result<DClass> {
    let [a, b, c] = triple;
    let (dm, dp) = regular_extensions(a, b, c)?;
    if d.is_zero() && dm.is_zero() {
        return Ok(DClass::DMinus);
    }
    if d.is_zero() {
        return Ok(DClass::Zero);
    }
    if !d.is_positive() || !is_d4_set(&[a.clone(), b.clone(), c.clone(), d.clone()]) {
        return Ok(DClass::NotAnExtension);
    }
    Ok(if *d == dm {
        DClass::DMinus
    } else if *d == dp {
        DClass::DPlus
    } else {
        DClass::Irregular
    })
}

/// `d` with `x² = e·d + 4` for the element `e`, classified against the triple.
pub fn classify_root(triple: &[BigInt; 3], e: &BigInt, x: &BigInt) -> Result<(Option<BigInt>, DClass)> {
    let (d, rem) = (x * x - 4u32).div_rem(e);
    if !rem.is_zero() {
        return Ok((None, DClass::NotAnExtension));
    }
    let class = classify_d(triple, &d)?;
    Ok((Some(d), class))
}

fn sorted3(a: &BigInt, b: &BigInt, c: &BigInt) -> [BigInt; 3] {
    let mut v = [a.clone(), b.clone(), c.clone()];
    v.sort();
    v
}

fn roots_of_four(m: u64) -> Vec<u64> {
    if m == 1 {
        return vec![0];
    }
    let m128 = m as u128;
    (0..m).filter(|&x| (x as u128 * x as u128) % m128 == 4 % m128).collect()
}

/// All `d ≤ d_max`, `d ∉ {a, b, c}`, extending `{a, b, c}` to a D(4)-quadruple.
///
/// Runs over `x` with `x² ≡ 4 (mod e)` for one element `e` (the largest one
/// when its residues can be scanned) and tests the other two products.
pub fn extend_triple(a: &BigInt, b: &BigInt, c: &BigInt, d_max: &BigInt) -> Result<Vec<BigInt>> {
    let t = sorted3(a, b, c);
    if !t[0].is_positive() || !is_d4_set(&t) {
        return Err(Error::NotATriple(format!("{{{a}, {b}, {c}}}")));
    }
    if !d_max.is_positive() {
        return Ok(Vec::new());
    }
    let (e, others) = match t[2].to_u64().filter(|&v| v <= ROOT_SCAN_CAP) {
        Some(_) => (t[2].clone(), [t[0].clone(), t[1].clone()]),
        None => (t[0].clone(), [t[1].clone(), t[2].clone()]),
    };
    let m = e
        .to_u64()
        .filter(|&v| v <= ROOT_SCAN_CAP)
        .ok_or_else(|| Error::WindowTooLarge(format!("smallest element {e} is too large to scan residues")))?;
    let x_max = (&e * d_max + 4u32).sqrt();
    let roots = roots_of_four(m);
    let per_root = &x_max / m + 1u32;
    let work = per_root
        .to_u128()
        .unwrap_or(u128::MAX)
        .saturating_mul(roots.len() as u128);
    if work > CANDIDATE_CAP {
        return Err(Error::WindowTooLarge(format!("about {work} candidates")));
    }
    let fast = (|| {
        let xm = x_max.to_u128()?;
        xm.checked_mul(xm)?;
        let o0 = others[0].to_u128()?;
        let o1 = others[1].to_u128()?;
        let dm = d_max.to_u128()?;
        o1.checked_mul(dm)?.checked_add(4)?;
        Some((xm, o0, o1))
    })();
    let excluded = |d: &BigInt| t.contains(d);
    let mut found = Vec::new();
    if let Some((xm, o0, o1)) = fast {
        let e = m as u128;
        for &r in &roots {
            let mut x = r as u128;
            while x <= xm {
                if x > 2 {
                    let d = (x * x - 4) / e;
                    if is_sq_u128(o0 * d + 4) && is_sq_u128(o1 * d + 4) {
                        found.push(BigInt::from(d));
                    }
                }
                x += e;
            }
        }
    } else {
        let step = BigInt::from(m);
        for &r in &roots {
            let mut x = BigInt::from(r);
            while x <= x_max {
                if x > BigInt::from(2) {
                    let d: BigInt = (&x * &x - 4u32) / &step;
                    if is_sq(&(&others[0] * &d + 4u32)) && is_sq(&(&others[1] * &d + 4u32)) {
                        found.push(d);
                    }
                }
                x += &step;
            }
        }
    }
    found.retain(|d| d <= d_max && !excluded(d));
    found.sort();
    found.dedup();
    Ok(found)
}

/// `u₀ = first`, `u₁ = second_doubled/2`, `u_{n+2} = coeff·u_{n+1} − u_n`,
/// every term kept doubled so half-integers never need rounding.
fn doubled_terms(coeff: &BigInt, first: &BigInt, second_doubled: &BigInt, n: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(n);
    let (mut u, mut v) = (first * 2u32, second_doubled.clone());
    for _ in 0..n {
        out.push(u.clone());
        let w = coeff * &v - &u;
        u = std::mem::replace(&mut v, w);
    }
    out
}

fn root_of(x: &BigInt, y: &BigInt) -> Result<BigInt> {
    sq(&(x * y + 4u32)).ok_or_else(|| Error::NotATriple(format!("{x}·{y} + 4 is not a square")))
}

/// Fundamental solutions feeding `P` and `Q`: `Q₀ = x₀`, `Q₁ = (s·x₀ + a·z₀)/2`,
/// `P₀ = x₂`, `P₁ = (r·x₂ + a·y₂)/2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PqStart {
    #[serde(with = "decimal")]
    pub z0: BigInt,
    #[serde(with = "decimal")]
    pub x0: BigInt,
    #[serde(with = "decimal")]
    pub y2: BigInt,
    #[serde(with = "decimal")]
    pub x2: BigInt,
}

/// Fundamental solutions feeding `v` and `w`: `v₀ = z₀`, `v₁ = (s·z₀ + c·x₀)/2`,
/// `w₀ = z₁`, `w₁ = (t·z₁ + c·y₁)/2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VwStart {
    #[serde(with = "decimal")]
    pub z0: BigInt,
    #[serde(with = "decimal")]
    pub x0: BigInt,
    #[serde(with = "decimal")]
    pub z1: BigInt,
    #[serde(with = "decimal")]
    pub y1: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PqSolution {
    pub l: u64,
    pub m: u64,
    #[serde(with = "decimal")]
    pub x: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VwSolution {
    pub m: u64,
    pub n: u64,
    #[serde(with = "decimal")]
    pub z: BigInt,
}

/// Index pairs where two doubled sequences agree, by sorting both and merging.
fn coincidences(left: &[BigInt], right: &[BigInt]) -> Vec<(usize, usize, BigInt)> {
    let mut l: Vec<(&BigInt, usize)> = left.iter().zip(0..).collect();
    let mut r: Vec<(&BigInt, usize)> = right.iter().zip(0..).collect();
    l.sort();
    r.sort();
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < l.len() && j < r.len() {
        match l[i].0.cmp(r[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                let v = l[i].0;
                let j_end = j + r[j..].iter().take_while(|(w, _)| *w == v).count();
                while i < l.len() && l[i].0 == v {
                    for &(_, rj) in &r[j..j_end] {
                        out.push((l[i].1, rj, v / 2));
                    }
                    i += 1;
                }
                j = j_end;
            }
        }
    }
    out.sort_by_key(|x| (x.0, x.1));
    out
}

fn pq_sequences(triple: &[BigInt; 3], start: &PqStart, n: usize) -> Result<(Vec<BigInt>, Vec<BigInt>)> {
    let [a, b, c] = triple;
    let r = root_of(a, b)?;
    let s = root_of(a, c)?;
    let p = doubled_terms(&r, &start.x2, &(&r * &start.x2 + a * &start.y2), n);
    let q = doubled_terms(&s, &start.x0, &(&s * &start.x0 + a * &start.z0), n);
    Ok((p, q))
}

/// Every `(l, m, x)` with `P_l = Q_m = x` and `m ≤ l ≤ l_max`.
pub fn solve_pq_small(triple: &[BigInt; 3], start: &PqStart, l_max: u64) -> Result<Vec<PqSolution>> {
    if l_max > L_MAX_CAP {
        return Err(Error::WindowTooLarge(format!("l_max = {l_max} exceeds {L_MAX_CAP}")));
    }
    let n = l_max as usize + 1;
    let (p, q) = pq_sequences(triple, start, n)?;
    Ok(coincidences(&p, &q)
        .into_iter()
        .filter(|(l, m, _)| m <= l)
        .map(|(l, m, x)| PqSolution {
            l: l as u64,
            m: m as u64,
            x,
        })
        .collect())
}

/// Every `(l, m, x)` with `P_l = Q_m = x` and `m ≤ m_max`, for any `l`:
/// `P` is generated until it is increasing and past every such `|Q_m|`.
pub fn solve_pq_low_m(triple: &[BigInt; 3], start: &PqStart, m_max: u64) -> Result<Vec<PqSolution>> {
    let [a, b, c] = triple;
    let r = root_of(a, b)?;
    let s = root_of(a, c)?;
    let q = doubled_terms(&s, &start.x0, &(&s * &start.x0 + a * &start.z0), m_max as usize + 1);
    let ceiling = q.iter().map(|v| v.abs()).max().unwrap_or_default();
    let mut p = Vec::new();
    let (mut u, mut v) = (&start.x2 * 2u32, &r * &start.x2 + a * &start.y2);
    loop {
        if p.len() as u64 > L_MAX_CAP {
            return Err(Error::WindowTooLarge("P never outgrew the Q values".into()));
        }
        let past = u.abs() > ceiling && v.abs() > u.abs() && u.sign() == v.sign();
        p.push(u.clone());
        if past {
            break;
        }
        let w = &r * &v - &u;
        u = std::mem::replace(&mut v, w);
    }
    Ok(coincidences(&p, &q)
        .into_iter()
        .map(|(l, m, x)| PqSolution {
            l: l as u64,
            m: m as u64,
            x,
        })
        .collect())
}

/// Every `(m, n, z)` with `v_m = w_n = z` and `m, n ≤ idx_max`.
pub fn solve_vw_small(triple: &[BigInt; 3], start: &VwStart, idx_max: u64) -> Result<Vec<VwSolution>> {
    if idx_max > L_MAX_CAP {
        return Err(Error::WindowTooLarge(format!(
            "index cap {idx_max} exceeds {L_MAX_CAP}"
        )));
    }
    let [a, b, c] = triple;
    let s = root_of(a, c)?;
    let t = root_of(b, c)?;
    let n = idx_max as usize + 1;
    let v = doubled_terms(&s, &start.z0, &(&s * &start.z0 + c * &start.x0), n);
    let w = doubled_terms(&t, &start.z1, &(&t * &start.z1 + c * &start.y1), n);
    Ok(coincidences(&v, &w)
        .into_iter()
        .map(|(m, n, z)| VwSolution {
            m: m as u64,
            n: n as u64,
            z,
        })
        .collect())
}

/// One extension found by the sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: u32,
    #[serde(with = "decimal")]
    pub a: BigInt,
    #[serde(with = "decimal")]
    pub b: BigInt,
    #[serde(with = "decimal")]
    pub c: BigInt,
    #[serde(with = "decimal")]
    pub d: BigInt,
    pub class: DClass,
    pub cell_micros: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub k: u32,
    pub window: SearchWindow,
    #[serde(with = "decimal::vec")]
    pub pair_smaller: Vec<BigInt>,
    pub triples: usize,
    pub rows: Vec<SweepRow>,
    pub irregular: usize,
    pub runtime_ms: u64,
}

/// Every `a ≤ a_max` with `k·a² + 4` a square.
pub fn pairs_with_multiplier(k: u32, a_max: u64) -> Vec<u64> {
    (1..=a_max)
        .filter(|&a| is_sq_u128(k as u128 * (a as u128) * (a as u128) + 4))
        .collect()
}

/// Every `c ≤ c_max`, `c ∉ {a, b}`, with `{a, b, c}` a D(4)-triple.
pub fn thirds(a: u64, b: u64, c_max: u64) -> Vec<u64> {
    let (a, b, cm) = (a as u128, b as u128, c_max as u128);
    let x_max = isqrt_u128(a * cm + 4);
    (3..=x_max)
        .filter_map(|x| {
            let n = x * x - 4;
            (n % a == 0).then_some(n / a)
        })
        .filter(|&c| c >= 1 && c <= cm && c != a && c != b && is_sq_u128(b * c + 4))
        .map(|c| c as u64)
        .collect()
}

/// Every D(4)-quadruple `{a, ka, c, d}` with `a ≤ a_max`, `c ≤ c_max`,
/// `d ≤ d_max`, classified against `d±` of `{a, ka, c}`.
pub fn quadruples_containing_pair(k: u32, a_max: u64, c_max: u64, d_max: u64) -> Result<SweepReport> {
    let started = Instant::now();
    let pairs = pairs_with_multiplier(k, a_max);
    let cells: Vec<(u64, u64, u64)> = pairs
        .iter()
        .flat_map(|&a| {
            thirds(a, k as u64 * a, c_max)
                .into_iter()
                .map(move |c| (a, k as u64 * a, c))
        })
        .collect();
    let d_cap = BigInt::from(d_max);
    let mut rows = cells
        .par_iter()
        .map(|&(a, b, c)| -> Result<Vec<SweepRow>> {
            let t0 = Instant::now();
            let (a, b, c) = (BigInt::from(a), BigInt::from(b), BigInt::from(c));
            let ds = extend_triple(&a, &b, &c, &d_cap)?;
            let triple = sorted3(&a, &b, &c);
            let classes = ds.iter().map(|d| classify_d(&triple, d)).collect::<Result<Vec<_>>>()?;
            let micros = t0.elapsed().as_micros() as u64;
            Ok(ds
                .into_iter()
                .zip(classes)
                .map(|(d, class)| SweepRow {
                    k,
                    a: a.clone(),
                    b: b.clone(),
                    c: c.clone(),
                    d,
                    class,
                    cell_micros: micros,
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect::<Vec<_>>();
    rows.sort_by(|x, y| (&x.a, &x.c, &x.d).cmp(&(&y.a, &y.c, &y.d)));
    let irregular = rows
        .iter()
        .filter(|r| !matches!(r.class, DClass::DMinus | DClass::DPlus))
        .count();
    Ok(SweepReport {
        k,
        window: SearchWindow { a_max, c_max, d_max },
        pair_smaller: pairs.into_iter().map(BigInt::from).collect(),
        triples: cells.len(),
        rows,
        irregular,
        runtime_ms: started.elapsed().as_millis() as u64,
    })
}

/// Positive solutions of `r² − 5a² = 4` with `r ≤ L_{2·n_max}`.
pub fn fibonacci_solutions(n_max: u32) -> Vec<(BigInt, BigInt)> {
    let (mut f, mut l) = (BigInt::from(0), BigInt::from(2));
    let (mut f1, mut l1) = (BigInt::from(1), BigInt::from(1));
    for _ in 0..2 * n_max {
        let f2 = &f + &f1;
        let l2 = &l + &l1;
        f = std::mem::replace(&mut f1, f2);
        l = std::mem::replace(&mut l1, l2);
    }
    let r_max = l;
    let mut out = Vec::new();
    let mut a = BigInt::from(1);
    loop {
        let r2: BigInt = &a * &a * 5u32 + 4u32;
        if r2 > &r_max * &r_max {
            break;
        }
        if let Some(r) = sq(&r2) {
            out.push((r, a.clone()));
        }
        a += 1u32;
    }
    out
}

/// `(L_{2n}, F_{2n})` for `n = 1..=n_max`.
pub fn lucas_fibonacci_even(n_max: u32) -> Vec<(BigInt, BigInt)> {
    let mut fib = vec![BigInt::from(0), BigInt::from(1)];
    let mut luc = vec![BigInt::from(2), BigInt::from(1)];
    while fib.len() <= 2 * n_max as usize {
        let i = fib.len();
        fib.push(&fib[i - 1] + &fib[i - 2]);
        luc.push(&luc[i - 1] + &luc[i - 2]);
    }
    (1..=n_max as usize)
        .map(|n| (luc[2 * n].clone(), fib[2 * n].clone()))
        .collect()
}

/// The solutions of `r² − 5a² = 4` up to `L_{2·n_max}` are exactly
/// `(L_{2n}, F_{2n})`.
pub fn fibonacci_check(n_max: u32) -> bool {
    fibonacci_solutions(n_max) == lucas_fibonacci_even(n_max)
}

/// `r² − 4a² = 4` has no solution with `a ≥ 1`, `r ≤ r_max`.
pub fn k4_check(r_max: u64) -> bool {
    (1..=r_max as u128).all(|r| {
        let n = r * r;
        n < 8 || (n - 4) % 4 != 0 || !is_sq_u128((n - 4) / 4)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn t3(a: i64, b: i64, c: i64) -> [BigInt; 3] {
        [big(a), big(b), big(c)]
    }

    #[test]
    fn extension_examples() {
        assert_eq!(
            extend_triple(&big(4), &big(8), &big(24), &big(1_000_000)).unwrap(),
            vec![big(840)]
        );
        assert_eq!(
            extend_triple(&big(1), &big(5), &big(12), &big(1000)).unwrap(),
            vec![big(96)]
        );
        // d₋ of this triple is 0, so only d₊ appears
        assert_eq!(
            extend_triple(&big(24), &big(48), &big(140), &big(1_000_000)).unwrap(),
            vec![big(161_704)]
        );
        assert!(extend_triple(&big(24), &big(48), &big(140), &big(161_703))
            .unwrap()
            .is_empty());
        assert!(matches!(
            extend_triple(&big(4), &big(8), &big(25), &big(10)),
            Err(Error::NotATriple(_))
        ));
    }

    #[test]
    fn scans_the_smallest_element_when_the_largest_is_huge() {
        // {4, 8, c} with c above the residue-scan cap: d₋ and d₊ are both found
        let c = big(1_119_638_520);
        let ds = extend_triple(&big(4), &big(8), &c, &big(40_000_000_000)).unwrap();
        assert_eq!(ds, vec![big(32_959_080), big(38_034_750_624)]);
        // products overflow u128 here, so the BigInt loop runs (brute force finds nothing)
        let c: BigInt = "3051519929713402294221039791280".parse().unwrap();
        assert!(extend_triple(&big(4), &big(8), &c, &big(10_000_000_000))
            .unwrap()
            .is_empty());
        let prev: BigInt = "89828359697991704817001174224".parse().unwrap();
        assert!(matches!(
            extend_triple(&big(4), &big(8), &c, &prev),
            Err(Error::WindowTooLarge(_))
        ));
    }

    #[test]
    fn regular_extension_formula() {
        assert_eq!(
            regular_extensions(&big(4), &big(8), &big(24)).unwrap(),
            (big(0), big(840))
        );
        assert_eq!(regular_extensions(&big(1), &big(5), &big(12)).unwrap().1, big(96));
        assert_eq!(classify_d(&t3(4, 8, 24), &big(840)).unwrap(), DClass::DPlus);
        assert_eq!(classify_d(&t3(4, 8, 24), &big(0)).unwrap(), DClass::DMinus);
        assert_eq!(classify_d(&t3(4, 8, 24), &big(5)).unwrap(), DClass::NotAnExtension);
    }

    #[test]
    fn pq_examples() {
        // {4, 8, 24}: r = 6, s = 10, t = 14
        let tb = PqStart {
            z0: big(14),
            x0: big(6),
            y2: big(2),
            x2: big(2),
        };
        let sols = solve_pq_small(&t3(4, 8, 24), &tb, 20).unwrap();
        assert!(sols.contains(&PqSolution { l: 2, m: 1, x: big(58) }), "{sols:?}");
        let ta = PqStart {
            z0: big(2),
            x0: big(2),
            y2: big(2),
            x2: big(2),
        };
        let sols = solve_pq_small(&t3(4, 8, 24), &ta, 20).unwrap();
        assert!(sols.contains(&PqSolution { l: 0, m: 0, x: big(2) }));
        assert!(solve_pq_small(&t3(4, 8, 24), &ta, L_MAX_CAP + 1).is_err());
    }

    #[test]
    fn low_m_search_sees_large_l() {
        let tb = PqStart {
            z0: big(14),
            x0: big(6),
            y2: big(2),
            x2: big(2),
        };
        let sols = solve_pq_low_m(&t3(4, 8, 24), &tb, 2).unwrap();
        assert!(sols.iter().any(|s| s.m == 1 && s.x == big(58)));
    }

    #[test]
    fn merge_handles_repeats() {
        let l = vec![big(4), big(2), big(4)];
        let r = vec![big(4), big(4), big(7)];
        let got = coincidences(&l, &r);
        assert_eq!(got.len(), 4);
        assert_eq!(got[0], (0, 0, big(2)));
    }

    #[test]
    fn vw_trivial_coincidence() {
        // v₀ = w₀ = ±2 always
        let st = VwStart {
            z0: big(2),
            x0: big(2),
            z1: big(2),
            y1: big(2),
        };
        let sols = solve_vw_small(&t3(4, 8, 24), &st, 6).unwrap();
        assert_eq!(sols[0], VwSolution { m: 0, n: 0, z: big(2) });
        for s in sols {
            let (_, class) = classify_root(&t3(4, 8, 24), &big(24), &s.z).unwrap();
            assert!(matches!(
                class,
                DClass::Zero | DClass::DMinus | DClass::DPlus | DClass::NotAnExtension
            ));
        }
    }

    #[test]
    fn known_pairs() {
        assert_eq!(pairs_with_multiplier(2, 300), vec![4, 24, 140]);
        assert_eq!(pairs_with_multiplier(3, 300), vec![2, 8, 30, 112]);
        assert_eq!(pairs_with_multiplier(6, 300), vec![4, 40]);
        assert!(pairs_with_multiplier(4, 10_000).is_empty());
    }

    #[test]
    fn small_sweep() {
        let rep = quadruples_containing_pair(2, 30, 10_000, 10_000_000).unwrap();
        assert!(rep.triples > 0);
        assert_eq!(rep.irregular, 0);
        assert!(rep
            .rows
            .iter()
            .any(|r| r.a == big(4) && r.c == big(24) && r.d == big(840)));
        let empty = quadruples_containing_pair(2, 0, 0, 0).unwrap();
        assert!(empty.rows.is_empty() && empty.triples == 0);
    }

    #[test]
    fn sanity_identities() {
        assert!(fibonacci_check(0));
        let five = lucas_fibonacci_even(5);
        let expect: Vec<_> = [(3, 1), (7, 3), (18, 8), (47, 21), (123, 55)]
            .iter()
            .map(|&(r, a)| (big(r), big(a)))
            .collect();
        assert_eq!(five, expect);
        assert_eq!(fibonacci_solutions(5), expect);
        assert!(fibonacci_check(12));
        assert!(k4_check(100_000));
    }

    #[test]
    fn no_even_odd_cross_coincidence() {
        // A_{2n} never meets B_{2l+1} on small triples, for either start type
        for tr in [t3(4, 8, 24), t3(24, 48, 140), t3(2, 6, 16), t3(4, 24, 48)] {
            let [a, b, c] = &tr;
            let r = root_of(a, b).unwrap();
            let s = root_of(a, c).unwrap();
            let t = root_of(b, c).unwrap();
            for (z1, y1, y2, x2) in [(big(2), big(2), big(2), big(2)), (s.clone(), r.clone(), big(2), big(2))] {
                for sg in [1, -1] {
                    let z1 = &z1 * sg;
                    let aa = doubled_terms(&t, &y1, &(&t * &y1 + b * &z1), 30);
                    let bb = doubled_terms(&r, &y2, &(&r * &y2 + b * &x2), 30);
                    for (i, j, _) in coincidences(&aa, &bb) {
                        assert!(!(i % 2 == 0 && j % 2 == 1 && i > 0), "{tr:?} A_{i} = B_{j}");
                    }
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn found_pq_solutions_are_regular(idx in 0usize..3, k in prop::sample::select(vec![2u32, 3, 6]), sg in prop::sample::select(vec![1i64, -1])) {
            let a = pairs_with_multiplier(k, 300)[idx.min(1)];
            let b = a * k as u64;
            for c in thirds(a, b, 200_000).into_iter().take(4) {
                let tr = sorted3(&big(a as i64), &big(b as i64), &big(c as i64));
                let [x, y, z] = &tr;
                let r = root_of(x, y).unwrap();
                let t = root_of(y, z).unwrap();
                for start in [
                    PqStart { z0: big(2 * sg), x0: big(2), y2: big(2), x2: big(2) },
                    PqStart { z0: &t * sg, x0: r.clone(), y2: big(2), x2: big(2) },
                ] {
                    for s in solve_pq_small(&tr, &start, 40).unwrap() {
                        let (_, class) = classify_root(&tr, x, &s.x).unwrap();
                        prop_assert!(class != DClass::Irregular, "{tr:?} {s:?}");
                    }
                }
            }
        }
    }
}
