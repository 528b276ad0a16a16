//! Baker–Davenport reduction of an absolute index bound `M` for inequalities
//! `0 < |n·κ − m + μ| < A·B^{−n}`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::{decimal, CfCursor, HpReal, PrecisionPolicy};
use crate::linforms::{LinearFormInstance, Route};
use crate::sequences::{InitialKind, InitialTermSet};
use crate::tuples::{Branch, SortedTriple};

/// Convergents tried per precision level before giving up.
pub const CONVERGENT_RETRIES: usize = 50;

/// Upper limit on reduction rounds in [`iterate_reduce`].
pub const MAX_ROUNDS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionRoute {
    PqTypeA,
    PqTypeB,
    Vw,
}

#[derive(Debug, Clone)]
pub struct ReductionInstance {
    pub kappa: HpReal,
    pub mu: HpReal,
    pub a: HpReal,
    pub b: HpReal,
    /// `log B`, kept alongside `B` to avoid recomputing it.
    pub log_b: HpReal,
    pub m: BigInt,
    pub route: ReductionRoute,
    /// Which initial terms produced `μ`, e.g. `z0=-t,y2=+2`.
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaSign {
    Positive,
    NotPositive,
}

/// One reduction round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStep {
    #[serde(with = "decimal")]
    pub m_in: BigInt,
    #[serde(with = "decimal")]
    pub q: BigInt,
    pub eta_sign: EtaSign,
    /// `η` to a few significant digits, for reports only.
    pub eta: String,
    pub convergents_tried: usize,
    pub precision_bits: u32,
    #[serde(with = "decimal")]
    pub new_bound: BigInt,
    /// Set when the step used [`shifted_reduce`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<Shift>,
}

/// A small `(l₀, m₀)` at which `l₀κ − m₀ + μ` vanishes to working precision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shift {
    pub l0: u64,
    #[serde(with = "decimal")]
    pub m0: BigInt,
}

#[derive(Debug, Clone)]
pub struct ReductionOutcome {
    pub new_bound: BigInt,
    pub p: BigInt,
    pub q: BigInt,
    pub eta: HpReal,
    pub convergents_tried: usize,
    pub steps: Vec<ReductionStep>,
}

/// One Baker–Davenport reduction step: the first convergent `p/q` of `κ`
/// with `q > 6M` and `η = ‖μq‖ − M‖κq‖ > 0` (certified) gives
/// `n ≤ ⌊log(Aq/η)/log B⌋`.
pub fn dp_reduce(inst: &ReductionInstance) -> Result<ReductionOutcome> {
    if inst.m < BigInt::one() {
        return Err(Error::Precondition("M must be at least 1".into()));
    }
    let prec = inst.kappa.prec();
    let mut cursor = CfCursor::new(&inst.kappa)?;
    let mut q_min: BigInt = &inst.m * 6u32;
    for tried in 1..=CONVERGENT_RETRIES {
        let (p, q) = cursor.next_convergent(&q_min)?;
        let eta = inst
            .mu
            .mul_int(&q)
            .dist_to_int()
            .sub(&inst.kappa.mul_int(&q).dist_to_int().mul_int(&inst.m));
        if eta.is_positive() {
            let ratio = inst.a.mul_int(&q).div(&eta)?;
            let new_bound = ratio.ln()?.div(&inst.log_b)?.floor_upper().max(BigInt::zero());
            let step = ReductionStep {
                m_in: inst.m.clone(),
                q: q.clone(),
                eta_sign: EtaSign::Positive,
                eta: eta.to_sci(6),
                convergents_tried: tried,
                precision_bits: prec,
                new_bound: new_bound.clone(),
                shift: None,
            };
            return Ok(ReductionOutcome {
                new_bound,
                p,
                q,
                eta,
                convergents_tried: tried,
                steps: vec![step],
            });
        }
        q_min = q;
    }
    Err(Error::NoUsefulConvergent {
        tried: CONVERGENT_RETRIES,
    })
}

/// Largest `l₀` tried by [`shifted_reduce`].
pub const SHIFT_SEARCH: u64 = 64;

/// Reduction for an instance whose form nearly vanishes at a genuine small
/// solution `(l₀, m₀)`, where [`dp_reduce`] can never find `η > 0`.
///
/// With `δ = l₀κ − m₀ + μ` and `n = l − l₀`, any solution has
/// `|nκ − (m − m₀)| < A·B^{−l} + |δ|`. If `q_K ≤ M < q_{K+1}`, every
/// `0 < |n| < q_{K+1}` has `|nκ − m'| ≥ D = |q_Kκ − p_K|`, so `|δ| < D/2`
/// forces `l < log(2A/D)/log B`. The bound returned never drops below `l₀`.
pub fn shifted_reduce(inst: &ReductionInstance) -> Result<ReductionOutcome> {
    if inst.m < BigInt::one() {
        return Err(Error::Precondition("M must be at least 1".into()));
    }
    let prec = inst.kappa.prec();
    let mut cursor = CfCursor::new(&inst.kappa)?;
    let zero = BigInt::zero();
    let mut below: Option<(BigInt, BigInt)> = None;
    let mut tried = 0;
    loop {
        let (p, q) = cursor.next_convergent(&zero)?;
        tried += 1;
        if q > inst.m {
            break;
        }
        below = Some((p, q));
    }
    let (p_k, q_k) = below.ok_or_else(|| Error::Precondition("no convergent with q ≤ M".into()))?;
    let dist = inst.kappa.mul_int(&q_k).sub(&HpReal::from_int(&p_k, prec)).abs();
    if !dist.is_positive() {
        return Err(Error::PrecisionExhausted { bits: prec });
    }
    let half = dist.div(&HpReal::from_i64(2, prec))?;
    let l_cap = inst.m.clone().min(BigInt::from(SHIFT_SEARCH));
    let mut l0 = 0u64;
    let shift = loop {
        if BigInt::from(l0) > l_cap {
            return Err(Error::Precondition(
                "the form does not vanish at any small index".into(),
            ));
        }
        let val = inst.kappa.mul_int(&BigInt::from(l0)).add(&inst.mu);
        let m0 = val
            .add(&HpReal::from_ratio(&BigInt::one(), &BigInt::from(2), prec))
            .floor_upper();
        let delta = val.sub(&HpReal::from_int(&m0, prec)).abs();
        if delta.definitely_lt(&half) {
            break Shift { l0, m0 };
        }
        l0 += 1;
    };
    let ratio = inst.a.mul_int(&BigInt::from(2)).div(&dist)?;
    let new_bound = ratio.ln()?.div(&inst.log_b)?.floor_upper().max(BigInt::from(shift.l0));
    let step = ReductionStep {
        m_in: inst.m.clone(),
        q: q_k.clone(),
        eta_sign: EtaSign::Positive,
        eta: dist.to_sci(6),
        convergents_tried: tried,
        precision_bits: prec,
        new_bound: new_bound.clone(),
        shift: Some(shift),
    };
    Ok(ReductionOutcome {
        new_bound,
        p: p_k,
        q: q_k,
        eta: dist,
        convergents_tried: tried,
        steps: vec![step],
    })
}

/// Rebuilds an instance at a requested precision.
pub trait InstanceBuilder {
    fn build(&self, m: &BigInt, prec: u32) -> Result<ReductionInstance>;
}

impl<F: Fn(&BigInt, u32) -> Result<ReductionInstance>> InstanceBuilder for F {
    fn build(&self, m: &BigInt, prec: u32) -> Result<ReductionInstance> {
        self(m, prec)
    }
}

/// Runs [`dp_reduce`] and [`shifted_reduce`] on the same instance and keeps
/// the smaller bound (both are valid). Precision doubles while neither
/// succeeds.
pub fn dp_reduce_escalating(
    builder: &dyn InstanceBuilder,
    m: &BigInt,
    policy: PrecisionPolicy,
) -> Result<ReductionOutcome> {
    let mut last = Error::PrecisionExhausted {
        bits: policy.start_bits,
    };
    let mut i = 0;
    while let Some(bits) = policy.attempt(i) {
        let inst = builder.build(m, bits)?;
        let plain = match dp_reduce(&inst) {
            Ok(out) => Some(out),
            Err(e @ (Error::NoUsefulConvergent { .. } | Error::PrecisionExhausted { .. })) => {
                last = e;
                None
            }
            Err(e) => return Err(e),
        };
        let shifted = match shifted_reduce(&inst) {
            Ok(out) => Some(out),
            Err(Error::Precondition(_)) => None,
            Err(e @ Error::PrecisionExhausted { .. }) => {
                last = e;
                None
            }
            Err(e) => return Err(e),
        };
        match (plain, shifted) {
            (Some(a), Some(b)) => return Ok(if b.new_bound < a.new_bound { b } else { a }),
            (Some(a), None) | (None, Some(a)) => return Ok(a),
            (None, None) => {}
        }
        i += 1;
    }
    Err(last)
}

#[derive(Debug, Clone)]
pub struct IteratedReduction {
    pub initial_bound: BigInt,
    pub final_bound: BigInt,
    /// Rounds that lowered the bound.
    pub iterations: usize,
    pub steps: Vec<ReductionStep>,
}

/// Repeats the reduction with `M ← new bound` until it stops decreasing.
pub fn iterate_reduce(
    builder: &dyn InstanceBuilder,
    m0: &BigInt,
    start_bits: Option<u32>,
) -> Result<IteratedReduction> {
    let mut m = m0.clone();
    let mut steps = Vec::new();
    let mut iterations = 0;
    while m > BigInt::one() && steps.len() < MAX_ROUNDS {
        let policy = match start_bits {
            Some(b) => PrecisionPolicy::with_start(b.max(PrecisionPolicy::for_bound(&m).start_bits)),
            None => PrecisionPolicy::for_bound(&m),
        };
        let out = dp_reduce_escalating(builder, &m, policy)?;
        steps.extend(out.steps);
        if out.new_bound >= m {
            break;
        }
        m = out.new_bound;
        iterations += 1;
    }
    Ok(IteratedReduction {
        initial_bound: m0.clone(),
        final_bound: m,
        iterations,
        steps,
    })
}

/// Reduction instance for `P_l = Q_m` (`0 < lκ − m + μ < A·α^{−l}`) or
/// `v_m = w_n` (`|mκ − n + μ| < A·β_s^{−2m}`).
pub fn build_reduction(
    triple: &SortedTriple,
    init: &InitialTermSet,
    m: &BigInt,
    prec: u32,
) -> Result<ReductionInstance> {
    let (route, lf) = match init.kind {
        InitialKind::TypeA => (
            ReductionRoute::PqTypeA,
            LinearFormInstance::pq(triple.clone(), init.clone()),
        ),
        InitialKind::TypeB => (
            ReductionRoute::PqTypeB,
            LinearFormInstance::pq(triple.clone(), init.clone()),
        ),
        InitialKind::VwEven | InitialKind::VwOdd => {
            (ReductionRoute::Vw, LinearFormInstance::vw(triple.clone(), init.clone()))
        }
    };
    let first = lf.log_first(prec)?;
    let second = lf.log_second(prec)?;
    let kappa = first.div(&second)?;
    let mu = lf.log_gamma(prec)?.div(&second)?;
    let lit = |s: &str| HpReal::from_decimal(s, prec).expect("literal");
    let a = match route {
        ReductionRoute::PqTypeA => lit("11.7"),
        ReductionRoute::PqTypeB => lit("4.4").mul_int(&(&triple.a * &triple.a)),
        ReductionRoute::Vw => HpReal::from_int(&(&triple.a * &triple.c * 2u32), prec),
    }
    .div(&second)?;
    let two = HpReal::from_i64(2, prec);
    let (b, log_b) = match lf.route {
        Route::Pq => {
            let alpha = HpReal::from_int(&triple.r, prec)
                .add(&HpReal::from_int(&(&triple.a * &triple.b), prec).sqrt()?)
                .div(&two)?;
            (alpha, first)
        }
        Route::Vw => {
            let bs = HpReal::from_int(&triple.s, prec)
                .add(&HpReal::from_int(&(&triple.a * &triple.c), prec).sqrt()?)
                .div(&two)?;
            (bs.mul(&bs), first.mul_int(&BigInt::from(2)))
        }
    };
    Ok(ReductionInstance {
        kappa,
        mu,
        a,
        b,
        log_b,
        m: m.clone(),
        route,
        label: branch_label(triple, init),
    })
}

fn signed(v: &BigInt, name: &str, t: &SortedTriple) -> String {
    let mag = v.magnitude();
    let sym = if v.sign() == num_bigint::Sign::Minus { '-' } else { '+' };
    let named = [("t", &t.t), ("s", &t.s), ("r", &t.r)]
        .into_iter()
        .find(|(_, x)| x.magnitude() == mag && mag > &2u32.into())
        .map(|(n, _)| n.to_string())
        .unwrap_or_else(|| mag.to_string());
    format!("{name}={sym}{named}")
}

/// `z0=±…,y2=±2` style label of the sign choices in a set of initial terms.
pub fn branch_label(t: &SortedTriple, it: &InitialTermSet) -> String {
    match it.kind {
        InitialKind::TypeA => signed(&it.z0, "z0", t),
        InitialKind::TypeB => format!("{},{}", signed(&it.z0, "z0", t), signed(&it.y2, "y2", t)),
        InitialKind::VwEven | InitialKind::VwOdd => format!("{},{}", signed(&it.z0, "z0", t), signed(&it.z1, "z1", t)),
    }
}

/// Every sign choice of a solution type, one instance each.
pub fn sign_branches(triple: &SortedTriple, kind: InitialKind) -> Vec<InitialTermSet> {
    match kind {
        InitialKind::TypeA => Branch::BOTH.iter().map(|&s| InitialTermSet::type_a(s)).collect(),
        InitialKind::TypeB => Branch::BOTH
            .iter()
            .flat_map(|&z| Branch::BOTH.iter().map(move |&y| InitialTermSet::type_b(triple, z, y)))
            .collect(),
        InitialKind::VwEven => Branch::BOTH.iter().map(|&s| InitialTermSet::vw_even(s)).collect(),
        InitialKind::VwOdd => Branch::BOTH
            .iter()
            .map(|&s| InitialTermSet::vw_odd(triple, s))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linforms::index_cap_at;
    use crate::pell::{pair_at, Multiplier};
    use crate::sequences::trivial_solution;
    use crate::tuples::{c_family, Family};

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn kappa_for_4_8_24() {
        let tr = SortedTriple::new(&big(4), &big(8), &big(24)).unwrap();
        let inst = build_reduction(&tr, &InitialTermSet::type_a(Branch::Plus), &big(10), 256).unwrap();
        let k = inst.kappa.to_f64(crate::exactmath::Rounding::Nearest);
        let expect = (3.0 + 2.0 * 2f64.sqrt()).ln() / (5.0 + 2.0 * 6f64.sqrt()).ln();
        assert!((k - expect).abs() < 1e-14);
        assert_eq!(inst.route, ReductionRoute::PqTypeA);
        assert_eq!(inst.label, "z0=+2");
    }

    #[test]
    fn sign_enumeration() {
        let tr = SortedTriple::new(&big(4), &big(8), &big(24)).unwrap();
        assert_eq!(sign_branches(&tr, InitialKind::TypeB).len(), 4);
        assert_eq!(sign_branches(&tr, InitialKind::TypeA).len(), 2);
        let labels: Vec<_> = sign_branches(&tr, InitialKind::TypeB)
            .iter()
            .map(|it| branch_label(&tr, it))
            .collect();
        assert!(labels.contains(&"z0=-t,y2=+2".to_string()));
    }

    #[test]
    fn reduces_the_first_c1_instance() {
        let pair = pair_at(2, 7).unwrap();
        let cand = c_family(&pair, Family::C1Plus).unwrap();
        let m = index_cap_at(Multiplier::Two, Family::C1Plus, InitialKind::TypeA, 7, 256).unwrap();
        for it in sign_branches(&cand.sorted, InitialKind::TypeA) {
            let tr = cand.sorted.clone();
            let builder = move |m: &BigInt, bits: u32| build_reduction(&tr, &it, m, bits);
            let out = iterate_reduce(&builder, &m, None).unwrap();
            assert!(out.final_bound <= big(8), "{}", out.final_bound);
            assert!(out.iterations <= 3);
            assert!(out.steps.iter().all(|s| s.eta_sign == EtaSign::Positive));
        }
    }

    #[test]
    fn vanishing_form_needs_the_shift() {
        // c₁⁺ has s = r + a, so with z0 = −2 P₂ = Q₂ = r(r + a) − 2 at every p
        let pair = pair_at(2, 17).unwrap();
        let cand = c_family(&pair, Family::C1Plus).unwrap();
        let m = index_cap_at(Multiplier::Two, Family::C1Plus, InitialKind::TypeA, 17, 256).unwrap();
        let it = InitialTermSet::type_a(Branch::Minus);
        let inst = build_reduction(&cand.sorted, &it, &m, 256).unwrap();
        // the plain reduction only succeeds far out, once δ·q is no longer negligible
        if let Ok(plain) = dp_reduce(&inst) {
            assert!(plain.convergents_tried > 10);
        }
        let out = shifted_reduce(&inst).unwrap();
        assert_eq!(out.steps[0].shift, Some(Shift { l0: 2, m0: big(2) }));
        assert!(out.new_bound >= big(2) && out.new_bound <= big(8), "{}", out.new_bound);
        let tr = cand.sorted.clone();
        let builder = move |m: &BigInt, bits: u32| build_reduction(&tr, &it, m, bits);
        let it_out = iterate_reduce(&builder, &m, None).unwrap();
        assert!(it_out.final_bound >= big(2) && it_out.final_bound <= big(8));
        // no shift exists for a generic instance
        let plain = build_reduction(&cand.sorted, &InitialTermSet::type_a(Branch::Plus), &m, 256).unwrap();
        assert!(matches!(shifted_reduce(&plain), Err(Error::Precondition(_))));
    }

    #[test]
    fn unit_bound_needs_no_work() {
        let tr = SortedTriple::new(&big(4), &big(8), &big(24)).unwrap();
        let it = InitialTermSet::type_a(Branch::Plus);
        let builder = move |m: &BigInt, bits: u32| build_reduction(&tr, &it, m, bits);
        let out = iterate_reduce(&builder, &big(1), None).unwrap();
        assert_eq!(out.final_bound, big(1));
        assert!(out.steps.is_empty());
    }

    #[test]
    fn rational_kappa_is_rejected() {
        let tr = SortedTriple::new(&big(4), &big(8), &big(24)).unwrap();
        let mut inst = build_reduction(&tr, &InitialTermSet::type_a(Branch::Plus), &big(10), 128).unwrap();
        inst.kappa = HpReal::from_ratio(&big(1), &big(2), 128);
        assert_eq!(dp_reduce(&inst).unwrap_err(), Error::NoUsefulConvergent { tried: 0 });
    }

    #[test]
    fn retries_until_eta_is_positive() {
        // μ = 0 makes η = −M‖κq‖ < 0 for every convergent
        let tr = SortedTriple::new(&big(4), &big(8), &big(24)).unwrap();
        let mut inst = build_reduction(&tr, &InitialTermSet::type_a(Branch::Plus), &big(10), 512).unwrap();
        inst.mu = HpReal::from_i64(0, 512);
        assert_eq!(
            dp_reduce(&inst).unwrap_err(),
            Error::NoUsefulConvergent {
                tried: CONVERGENT_RETRIES
            }
        );
        // μ = 1/q1 nearly cancels at the first convergent, so later ones are needed
        let base = build_reduction(&tr, &InitialTermSet::type_a(Branch::Plus), &big(10), 512).unwrap();
        let mut cursor = CfCursor::new(&base.kappa).unwrap();
        let (_, q1) = cursor.next_convergent(&big(60)).unwrap();
        let mut inst = base.clone();
        inst.mu = HpReal::from_ratio(&big(1), &q1, 512);
        let out = dp_reduce(&inst).unwrap();
        assert!(out.convergents_tried >= 2, "{}", out.convergents_tried);
    }

    #[test]
    fn reduction_keeps_known_solutions() {
        for k in Multiplier::ALL {
            for p in 2..6 {
                let pair = pair_at(k.value(), p).unwrap();
                for fam in [Family::C1Plus, Family::C2Plus, Family::C2Minus, Family::C3Plus] {
                    let sol = trivial_solution(&pair, fam.nu(), fam.branch()).unwrap();
                    let cand = c_family(&pair, fam).unwrap();
                    for site in crate::linforms::locate_solution(&cand.sorted, &sol.d, 8).unwrap() {
                        let tr = cand.sorted.clone();
                        let it = site.init.clone();
                        let builder = move |m: &BigInt, bits: u32| build_reduction(&tr, &it, m, bits);
                        let out = iterate_reduce(&builder, &big(1000), None).unwrap();
                        assert!(out.final_bound >= BigInt::from(site.l), "k={k} p={p} {fam}");
                    }
                }
            }
        }
    }

    #[test]
    fn doubled_precision_agrees() {
        let pair = pair_at(3, 9).unwrap();
        let cand = c_family(&pair, Family::C2Minus).unwrap();
        let m: BigInt = "2600000000000000000000".parse().unwrap();
        let it = InitialTermSet::type_a(Branch::Minus);
        let lo = dp_reduce(&build_reduction(&cand.sorted, &it, &m, 256).unwrap()).unwrap();
        let hi = dp_reduce(&build_reduction(&cand.sorted, &it, &m, 512).unwrap()).unwrap();
        assert_eq!(lo.new_bound, hi.new_bound);
        assert!(hi.eta.is_positive());
    }
}
