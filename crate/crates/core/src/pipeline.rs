//! Per-family orchestration: index caps from the Matveev bounds, a reduction
//! per `(p, sign branch)`, gap comparisons and a brute-force sweep of whatever
//! small indices survive.

use std::fmt::Display;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::decimal;
use crate::gaps::{exclusion_c2_s_congruence, lower_type_a, lower_type_b, ExclusionCertificate};
use crate::linforms::{gap_for, index_cap_at, p_bound_with, DEFAULT_BITS, P_SCAN_LIMIT};
use crate::oracle::{self, DClass, PqStart, VwStart};
use crate::pell::{pair_at, Multiplier};
use crate::reduction::{branch_label, build_reduction, iterate_reduce, sign_branches, ReductionStep};
use crate::sequences::{InitialKind, InitialTermSet};
use crate::tuples::{c_family, Family, FamilyClass, SortedTriple};

/// Pairs with `b ≤ 10⁵` are outside the verified range.
pub const B_FLOOR: u64 = 100_000;

/// Indices `m ≤ LOW_M` are always swept directly, whatever the reduction says.
pub const LOW_M: u64 = 2;

/// Serializes integers (and anything else printable) as strings.
pub mod as_string {
    use std::fmt::Display;
    use std::str::FromStr;

    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T: FromStr, D: Deserializer<'de>>(d: D) -> Result<T, D::Error>
    where
        T::Err: std::fmt::Display,
    {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "REGULAR_CONFIRMED")]
    RegularConfirmed,
    #[serde(rename = "COUNTEREXAMPLE")]
    Counterexample,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

impl Verdict {
    /// The worse of two verdicts.
    fn join(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Counterexample, _) | (_, Counterexample) => Counterexample,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => RegularConfirmed,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::RegularConfirmed => "REGULAR_CONFIRMED",
            Verdict::Counterexample => "COUNTEREXAMPLE",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    /// Matveev cap on the reduced index at this `p`.
    #[serde(with = "decimal")]
    pub matveev_l: BigInt,
    #[serde(with = "decimal::option")]
    pub reduced_l: Option<BigInt>,
    #[serde(with = "decimal")]
    pub gap_lower: BigInt,
}

/// A coincidence found by the residual sweep. For the `v`/`w` route `l` and
/// `m` hold the `v` and `w` indices and `x` the common value `z`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Residual {
    #[serde(with = "as_string")]
    pub l: u64,
    #[serde(with = "as_string")]
    pub m: u64,
    #[serde(with = "decimal")]
    pub x: BigInt,
    #[serde(with = "decimal::option")]
    pub d: Option<BigInt>,
    pub d_class: DClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PRecord {
    #[serde(with = "as_string")]
    pub k: u32,
    pub family: Family,
    #[serde(with = "as_string")]
    pub p: u32,
    #[serde(with = "decimal")]
    pub a: BigInt,
    pub kind: InitialKind,
    pub branch: String,
    pub bounds: Bounds,
    pub reduction: Vec<ReductionStep>,
    pub residual: Vec<Residual>,
    /// `true` when the gap lower bound alone exceeds the reduced index.
    pub gap_closes: bool,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cause: Option<String>,
}

/// What happened for one solution type across the whole `p` range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindSummary {
    pub kind: InitialKind,
    #[serde(with = "as_string")]
    pub p_min: u32,
    #[serde(with = "as_string")]
    pub p_max: u32,
    #[serde(with = "decimal::option")]
    pub reduced_max: Option<BigInt>,
    #[serde(with = "as_string")]
    pub max_rounds: usize,
    /// Largest `p ≥ 1` whose gap lower bound does not exceed `reduced_max`.
    #[serde(with = "decimal::option")]
    pub gap_closure_p: Option<BigInt>,
    /// Largest `a` whose Type b gap bound does not exceed `reduced_max`.
    #[serde(with = "decimal::option")]
    pub type_b_a_max: Option<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    #[serde(with = "as_string")]
    pub k: u32,
    pub family: Family,
    #[serde(with = "as_string")]
    pub precision_bits: u32,
    pub kinds: Vec<KindSummary>,
    pub exclusion: Vec<ExclusionCertificate>,
    pub records: Vec<PRecord>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cause: Option<String>,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyOptions {
    pub precision_bits: u32,
    /// Overrides the first `p` (default: first pair with `b > 10⁵`).
    pub p_min: Option<u32>,
    /// Caps the last `p` below the Matveev-derived one.
    pub p_max: Option<u32>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            precision_bits: DEFAULT_BITS,
            p_min: None,
            p_max: None,
        }
    }
}

/// First `p` with `b = k·a_p > 10⁵`.
pub fn first_p(k: Multiplier) -> Result<u32> {
    let floor = BigInt::from(B_FLOOR);
    (1..=P_SCAN_LIMIT)
        .find(|&p| pair_at(k.value(), p).map(|pr| pr.b() > floor).unwrap_or(false))
        .ok_or_else(|| Error::Precondition("no pair above the b floor".into()))
}

/// Solution types the argument needs for a family.
pub fn kinds_for(class: FamilyClass) -> &'static [InitialKind] {
    match class {
        FamilyClass::C1 => &[InitialKind::TypeA],
        FamilyClass::C2 => &[InitialKind::TypeA, InitialKind::TypeB],
        FamilyClass::C3 => &[InitialKind::VwEven, InitialKind::VwOdd],
    }
}

pub fn verify_family(k: u32, family: Family) -> Result<VerificationReport> {
    verify_family_with(k, family, &VerifyOptions::default())
}

/// Runs the whole argument for one family. Module errors inside a `(p,
/// branch)` cell become INCONCLUSIVE records; only invalid arguments error.
pub fn verify_family_with(k: u32, family: Family, opts: &VerifyOptions) -> Result<VerificationReport> {
    let mult = Multiplier::try_from(k)?;
    let prec = opts.precision_bits;
    let p_min = opts.p_min.unwrap_or(first_p(mult)?);
    let mut records = Vec::new();
    let mut kinds = Vec::new();
    let mut exclusion = Vec::new();
    let mut cause = None;

    for &kind in kinds_for(family.class()) {
        let pb = match p_bound_with(k, family.class(), kind, prec) {
            Ok(pb) => pb,
            Err(e) => {
                cause.get_or_insert_with(|| format!("{kind:?}: p bound failed: {e}"));
                continue;
            }
        };
        let Some(branch) = pb.branches.iter().find(|b| b.family == family) else {
            continue;
        };
        let p_max = opts.p_max.map_or(branch.p_max, |cap| cap.min(branch.p_max));
        if kind == InitialKind::TypeB {
            for p in p_min..=p_max {
                match pair_at(k, p).and_then(|pr| exclusion_c2_s_congruence(&pr)) {
                    Ok(cert) => exclusion.push(cert),
                    Err(e) => {
                        cause.get_or_insert_with(|| format!("exclusion certificate at p = {p}: {e}"));
                    }
                }
            }
        }
        let mut kind_records: Vec<PRecord> = (p_min..=p_max)
            .into_par_iter()
            .map(|p| p_records(mult, family, kind, p, prec))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect();
        kind_records.sort_by_key(|r| r.p);
        let reduced_max = kind_records.iter().filter_map(|r| r.bounds.reduced_l.clone()).max();
        let max_rounds = kind_records
            .iter()
            .map(|r| r.reduction.iter().filter(|s| s.new_bound < s.m_in).count())
            .max()
            .unwrap_or(0);
        let gap_closure_p = match &reduced_max {
            Some(bound) => gap_closure_p(mult, family, kind, bound, prec)?,
            None => None,
        };
        let type_b_a_max = match (&reduced_max, kind) {
            (Some(bound), InitialKind::TypeB) => Some(type_b_a_max(k, bound)?),
            _ => None,
        };
        kinds.push(KindSummary {
            kind,
            p_min,
            p_max,
            reduced_max,
            max_rounds,
            gap_closure_p,
            type_b_a_max,
        });
        records.extend(kind_records);
    }

    let mut verdict = records.iter().fold(Verdict::RegularConfirmed, |v, r| v.join(r.verdict));
    if cause.is_some() {
        verdict = verdict.join(Verdict::Inconclusive);
    }
    if cause.is_none() && verdict != Verdict::RegularConfirmed {
        cause = records.iter().find(|r| r.verdict == verdict).map(|r| {
            format!(
                "p = {}, {:?} {}: {}",
                r.p,
                r.kind,
                r.branch,
                r.cause.clone().unwrap_or_default()
            )
        });
    }
    Ok(VerificationReport {
        k,
        family,
        precision_bits: prec,
        kinds,
        exclusion,
        records,
        verdict,
        cause,
    })
}

fn inconclusive(
    k: Multiplier,
    family: Family,
    kind: InitialKind,
    p: u32,
    a: BigInt,
    branch: String,
    e: impl Display,
) -> PRecord {
    PRecord {
        k: k.value(),
        family,
        p,
        a,
        kind,
        branch,
        bounds: Bounds {
            matveev_l: BigInt::from(0),
            reduced_l: None,
            gap_lower: BigInt::from(0),
        },
        reduction: Vec::new(),
        residual: Vec::new(),
        gap_closes: false,
        verdict: Verdict::Inconclusive,
        cause: Some(e.to_string()),
    }
}

fn p_records(k: Multiplier, family: Family, kind: InitialKind, p: u32, prec: u32) -> Vec<PRecord> {
    let setup = (|| -> Result<_> {
        let pair = pair_at(k.value(), p)?;
        let cand = c_family(&pair, family)?;
        let cap = index_cap_at(k, family, kind, p, prec)?;
        let gap = gap_for(k, kind, &cand.sorted, &pair.a)?;
        Ok((pair, cand, cap, gap))
    })();
    let (pair, cand, cap, gap) = match setup {
        Ok(v) => v,
        Err(e) => {
            let a = pair_at(k.value(), p).map(|pr| pr.a).unwrap_or_default();
            return vec![inconclusive(k, family, kind, p, a, "setup".into(), e)];
        }
    };
    sign_branches(&cand.sorted, kind)
        .into_iter()
        .map(|init| {
            let label = branch_label(&cand.sorted, &init);
            match branch_record(k, family, &cand.sorted, &init, p, &pair.a, &cap, &gap, prec) {
                Ok(r) => r,
                Err(e) => inconclusive(k, family, kind, p, pair.a.clone(), label, e),
            }
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn branch_record(
    k: Multiplier,
    family: Family,
    triple: &SortedTriple,
    init: &InitialTermSet,
    p: u32,
    a: &BigInt,
    cap: &BigInt,
    gap: &BigInt,
    prec: u32,
) -> Result<PRecord> {
    let builder = {
        let (tr, it) = (triple.clone(), init.clone());
        move |m: &BigInt, bits: u32| build_reduction(&tr, &it, m, bits)
    };
    let reduced = iterate_reduce(&builder, cap, Some(prec))?;
    let bound = reduced.final_bound.clone();
    let sweep_to: u64 = bound
        .clone()
        .try_into()
        .ok()
        .filter(|&b: &u64| b <= oracle::L_MAX_CAP)
        .ok_or_else(|| Error::WindowTooLarge(format!("reduced index {bound} is too large to sweep")))?;
    let residual = residual_sweep(triple, init, sweep_to)?;
    let verdict = if residual.iter().any(|r| r.d_class == DClass::Irregular) {
        Verdict::Counterexample
    } else {
        Verdict::RegularConfirmed
    };
    Ok(PRecord {
        k: k.value(),
        family,
        p,
        a: a.clone(),
        kind: init.kind,
        branch: branch_label(triple, init),
        bounds: Bounds {
            matveev_l: cap.clone(),
            reduced_l: Some(bound.clone()),
            gap_lower: gap.clone(),
        },
        reduction: reduced.steps,
        residual,
        gap_closes: *gap > bound,
        verdict,
        cause: (verdict == Verdict::Counterexample).then(|| "irregular extension found".to_string()),
    })
}

fn elements(tr: &SortedTriple) -> [BigInt; 3] {
    [tr.a.clone(), tr.b.clone(), tr.c.clone()]
}

/// Direct search of every coincidence the reduction leaves open.
pub fn residual_sweep(triple: &SortedTriple, init: &InitialTermSet, bound: u64) -> Result<Vec<Residual>> {
    let el = elements(triple);
    let mut out = Vec::new();
    match init.kind {
        InitialKind::TypeA | InitialKind::TypeB => {
            let start = PqStart {
                z0: init.z0.clone(),
                x0: init.x0.clone(),
                y2: init.y2.clone(),
                x2: init.x2.clone(),
            };
            let mut sols = oracle::solve_pq_small(&el, &start, bound.max(LOW_M))?;
            sols.extend(oracle::solve_pq_low_m(&el, &start, LOW_M)?);
            sols.sort_by_key(|s| (s.l, s.m));
            sols.dedup();
            for s in sols {
                let (d, d_class) = oracle::classify_root(&el, &triple.a, &s.x)?;
                out.push(Residual {
                    l: s.l,
                    m: s.m,
                    x: s.x,
                    d,
                    d_class,
                });
            }
        }
        InitialKind::VwEven | InitialKind::VwOdd => {
            let start = VwStart {
                z0: init.z0.clone(),
                x0: init.x0.clone(),
                z1: init.z1.clone(),
                y1: init.y1.clone(),
            };
            for s in oracle::solve_vw_small(&el, &start, bound.max(2 * LOW_M))? {
                let (d, d_class) = oracle::classify_root(&el, &triple.c, &s.z)?;
                out.push(Residual {
                    l: s.m,
                    m: s.n,
                    x: s.z,
                    d,
                    d_class,
                });
            }
        }
    }
    Ok(out)
}

/// Largest `p ≥ 1` at which the gap lower bound is at most `bound`; the gap
/// grows with `p`, so every larger `p` is closed by the gap alone.
pub fn gap_closure_p(
    k: Multiplier,
    family: Family,
    kind: InitialKind,
    bound: &BigInt,
    _prec: u32,
) -> Result<Option<BigInt>> {
    let mut last = None;
    for p in 1..=P_SCAN_LIMIT {
        let pair = pair_at(k.value(), p)?;
        let cand = match c_family(&pair, family) {
            Ok(c) => c,
            Err(Error::DegenerateC(_)) => continue,
            Err(e) => return Err(e),
        };
        let gap = gap_for(k, kind, &cand.sorted, &pair.a)?;
        if gap <= *bound {
            last = Some(BigInt::from(p));
        } else if last.is_some() {
            break;
        }
    }
    Ok(last)
}

/// Largest `a` with the Type b lower bound at most `bound`.
pub fn type_b_a_max(k: u32, bound: &BigInt) -> Result<BigInt> {
    let below = |a: &BigInt| lower_type_b(a, k, FamilyClass::C2).map(|g| g <= *bound);
    let mut hi = BigInt::from(1);
    while below(&hi)? {
        hi *= 2u32;
    }
    let mut lo = BigInt::from(0);
    while &hi - &lo > BigInt::from(1) {
        let mid: BigInt = (&lo + &hi) / 2u32;
        if below(&mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Largest `p` with `lower_type_a(a_p) ≤ bound`, the residual range of the
/// Type a closure.
pub fn type_a_closure_p(k: Multiplier, bound: &BigInt) -> Result<u32> {
    let mut last = 0;
    for p in 1..=P_SCAN_LIMIT {
        if lower_type_a(&pair_at(k.value(), p)?.a)? <= *bound {
            last = p;
        } else {
            break;
        }
    }
    Ok(last)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn starting_pairs() {
        assert_eq!(first_p(Multiplier::Two).unwrap(), 7);
        assert_eq!(first_p(Multiplier::Three).unwrap(), 9);
        assert_eq!(first_p(Multiplier::Six).unwrap(), 5);
    }

    #[test]
    fn rejects_other_multipliers() {
        assert_eq!(verify_family(5, Family::C1Plus).unwrap_err(), Error::UnsupportedK(5));
    }

    #[test]
    fn closures_from_the_published_index_bound() {
        let five = BigInt::from(5);
        let caps: Vec<u32> = Multiplier::ALL
            .iter()
            .map(|&k| type_a_closure_p(k, &five).unwrap())
            .collect();
        assert_eq!(caps, vec![8, 11, 6]);
        let a_max: Vec<BigInt> = [2, 3, 6].iter().map(|&k| type_b_a_max(k, &five).unwrap()).collect();
        assert!(a_max.iter().all(|a| *a <= BigInt::from(98)), "{a_max:?}");
    }

    #[test]
    fn small_window_confirms() {
        let opts = VerifyOptions {
            p_max: Some(9),
            ..Default::default()
        };
        let rep = verify_family_with(2, Family::C2Minus, &opts).unwrap();
        assert_eq!(rep.verdict, Verdict::RegularConfirmed, "{:?}", rep.cause);
        assert_eq!(rep.kinds.len(), 2);
        // 3 values of p, 2 Type a and 4 Type b branches each
        assert_eq!(rep.records.len(), 3 * 6);
        assert_eq!(rep.exclusion.len(), 3);
        for r in &rep.records {
            assert!(r.bounds.reduced_l.as_ref().unwrap() <= &BigInt::from(8));
            for res in &r.residual {
                assert!(matches!(
                    res.d_class,
                    DClass::Zero | DClass::DMinus | DClass::DPlus | DClass::NotAnExtension
                ));
            }
        }
        // the trivial extension shows up in a Type b branch with z0 = +t
        assert!(rep.records.iter().any(|r| r.kind == InitialKind::TypeB
            && r.residual
                .iter()
                .any(|x| x.m == 1 && matches!(x.d_class, DClass::DMinus | DClass::DPlus))));
    }

    #[test]
    fn report_json_is_stringly() {
        let opts = VerifyOptions {
            p_max: Some(7),
            ..Default::default()
        };
        let rep = verify_family_with(2, Family::C1Plus, &opts).unwrap();
        let v: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(v["k"], "2");
        assert_eq!(v["family"], "c1+");
        let rec = &v["records"][0];
        for key in ["k", "family", "p", "a", "bounds", "reduction", "residual", "verdict"] {
            assert!(rec.get(key).is_some(), "missing {key}");
        }
        assert!(rec["bounds"]["matveev_l"].is_string());
        assert!(rec["reduction"][0]["q"].is_string());
        assert!(rec["reduction"][0]["eta_sign"].is_string());
        assert_eq!(v["verdict"], "REGULAR_CONFIRMED");
        let back: VerificationReport = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(back, rep);
    }
}
