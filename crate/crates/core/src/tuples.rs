//! D(4)-tuples, the regular extensions `d±` and the three `c`-families.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::is_perfect_square;
use crate::pell::{D4Pair, HalfSurd};

/// Sign of a `±` branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Plus, Branch::Minus];

    pub fn signum(self) -> i32 {
        match self {
            Branch::Plus => 1,
            Branch::Minus => -1,
        }
    }

    pub fn apply(self, n: BigInt) -> BigInt {
        match self {
            Branch::Plus => n,
            Branch::Minus => -n,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Branch::Plus => '+',
            Branch::Minus => '-',
        }
    }
}

/// The families `c_ν^±`, `ν ∈ {1, 2, 3}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Family {
    C1Plus,
    C1Minus,
    C2Plus,
    C2Minus,
    C3Plus,
    C3Minus,
}

/// A family without its sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyClass {
    C1,
    C2,
    C3,
}

impl FamilyClass {
    pub const ALL: [FamilyClass; 3] = [FamilyClass::C1, FamilyClass::C2, FamilyClass::C3];

    pub fn nu(self) -> u32 {
        match self {
            FamilyClass::C1 => 1,
            FamilyClass::C2 => 2,
            FamilyClass::C3 => 3,
        }
    }

    pub fn with(self, branch: Branch) -> Family {
        Family::new(self.nu(), branch).expect("nu in range")
    }
}

impl FromStr for FamilyClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "c1" => Ok(FamilyClass::C1),
            "c2" => Ok(FamilyClass::C2),
            "c3" => Ok(FamilyClass::C3),
            other => Err(Error::Parse(format!("unknown family class {other:?}"))),
        }
    }
}

impl fmt::Display for FamilyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.nu())
    }
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::C1Plus,
        Family::C1Minus,
        Family::C2Plus,
        Family::C2Minus,
        Family::C3Plus,
        Family::C3Minus,
    ];

    pub fn new(nu: u32, branch: Branch) -> Option<Family> {
        Some(match (nu, branch) {
            (1, Branch::Plus) => Family::C1Plus,
            (1, Branch::Minus) => Family::C1Minus,
            (2, Branch::Plus) => Family::C2Plus,
            (2, Branch::Minus) => Family::C2Minus,
            (3, Branch::Plus) => Family::C3Plus,
            (3, Branch::Minus) => Family::C3Minus,
            _ => return None,
        })
    }

    pub fn nu(self) -> u32 {
        self.class().nu()
    }

    pub fn class(self) -> FamilyClass {
        match self {
            Family::C1Plus | Family::C1Minus => FamilyClass::C1,
            Family::C2Plus | Family::C2Minus => FamilyClass::C2,
            Family::C3Plus | Family::C3Minus => FamilyClass::C3,
        }
    }

    pub fn branch(self) -> Branch {
        match self {
            Family::C1Plus | Family::C2Plus | Family::C3Plus => Branch::Plus,
            _ => Branch::Minus,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}{}", self.nu(), self.branch().symbol())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase().replace('−', "-");
        let (class, sign) = t.split_at(t.len().saturating_sub(1));
        let branch = match sign {
            "+" => Branch::Plus,
            "-" => Branch::Minus,
            _ => return Err(Error::Parse(format!("family {s:?} needs a trailing + or -"))),
        };
        Ok(class.parse::<FamilyClass>()?.with(branch))
    }
}

impl From<Family> for String {
    fn from(f: Family) -> String {
        f.to_string()
    }
}

impl TryFrom<String> for Family {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// A D(4)-triple stored in ascending order, with the three square roots
/// `r = √(ab+4)`, `s = √(ac+4)`, `t = √(bc+4)` of its sorted elements.
///
/// Everything downstream addresses elements by position in this order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SortedTriple {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub r: BigInt,
    pub s: BigInt,
    pub t: BigInt,
}

fn root4(x: &BigInt, y: &BigInt) -> Option<BigInt> {
    is_perfect_square(&(x * y + 4))
}

impl SortedTriple {
    pub fn new(x: &BigInt, y: &BigInt, z: &BigInt) -> Result<Self> {
        let mut v = [x.clone(), y.clone(), z.clone()];
        v.sort();
        let [a, b, c] = v;
        if !a.is_positive() || a == b || b == c {
            return Err(Error::NotATriple(format!(
                "elements must be distinct positive integers: {{{a}, {b}, {c}}}"
            )));
        }
        let missing = |x: &BigInt, y: &BigInt| Error::NotATriple(format!("{x}·{y} + 4 is not a square"));
        let r = root4(&a, &b).ok_or_else(|| missing(&a, &b))?;
        let s = root4(&a, &c).ok_or_else(|| missing(&a, &c))?;
        let t = root4(&b, &c).ok_or_else(|| missing(&b, &c))?;
        Ok(SortedTriple { a, b, c, r, s, t })
    }

    pub fn elements(&self) -> [BigInt; 3] {
        [self.a.clone(), self.b.clone(), self.c.clone()]
    }

    /// `(cr − st)/2`, the auxiliary initial value of the `v`/`w` sequences.
    pub fn shift_value(&self) -> BigInt {
        (&self.c * &self.r - &self.s * &self.t) / 2
    }

    pub fn d_pm(&self) -> (BigInt, BigInt) {
        let sum = &self.a + &self.b + &self.c;
        let abc = &self.a * &self.b * &self.c;
        let rst = &self.r * &self.s * &self.t;
        let minus = &sum + (&abc - &rst) / 2;
        let plus = sum + (abc + rst) / 2;
        (minus, plus)
    }

    pub fn to_decimal_strings(&self) -> Vec<String> {
        self.elements().iter().map(|n| n.to_string()).collect()
    }
}

/// Name of an element in the original `{a, b = ka, c}` labelling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    A,
    B,
    C,
}

/// A pair `{a, ka}` together with a third element from one of the families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleCandidate {
    pub pair: D4Pair,
    pub family: Family,
    pub c: BigInt,
    /// `√(ac + 4)` in the original labelling.
    pub s: BigInt,
    /// `√(bc + 4)` in the original labelling.
    pub t: BigInt,
    pub sorted: SortedTriple,
    /// `roles[i]` is the original name of `sorted.elements()[i]`.
    pub roles: [Role; 3],
}

impl TripleCandidate {
    pub fn role_order(&self) -> String {
        self.roles
            .iter()
            .map(|r| match r {
                Role::A => 'a',
                Role::B => 'b',
                Role::C => 'c',
            })
            .collect()
    }
}

/// Both regular extensions of a D(4)-triple (any order).
pub fn d_pm(a: &BigInt, b: &BigInt, c: &BigInt) -> Result<(BigInt, BigInt)> {
    Ok(SortedTriple::new(a, b, c)?.d_pm())
}

/// `c_ν^±` by its explicit closed form.
pub fn c_closed_form(pair: &D4Pair, family: Family) -> BigInt {
    let a = &pair.a;
    let b = pair.b();
    let r = &pair.r;
    let ab = a * &b;
    let sg = family.branch();
    let c1 = a + &b + sg.apply(r * 2);
    match family.nu() {
        1 => c1,
        2 => (&ab + 4) * c1 - sg.apply(r * 4),
        _ => (&ab * &ab + &ab * 6 + 9) * c1 - sg.apply(r * 4 * (ab + 3)),
    }
}

/// `c_ν^±` from the general expression in `ℤ[√(ab)]`:
/// with `((r + √(ab))/2)^{2ν} = (X + Y√(ab))/2`,
/// `c = ((a + b)(X − 2) ± 2ab·Y)/(ab)`.
pub fn c_general(pair: &D4Pair, nu: u32, branch: Branch) -> BigInt {
    let a = &pair.a;
    let b = pair.b();
    let d = a * &b;
    let unit = HalfSurd::new(pair.r.clone(), BigInt::from(1), d.clone());
    let pw = unit.pow(2 * nu);
    let num: BigInt = (a + &b) * (&pw.x - 2) + branch.apply(&d * 2 * &pw.y);
    debug_assert!(num.is_multiple_of(&d));
    num / d
}

pub fn c_family(pair: &D4Pair, family: Family) -> Result<TripleCandidate> {
    let c = c_closed_form(pair, family);
    if !c.is_positive() {
        return Err(Error::DegenerateC(c.to_string()));
    }
    let general = c_general(pair, family.nu(), family.branch());
    if general != c {
        return Err(Error::Precondition(format!(
            "closed form {c} disagrees with general form {general} for {family}"
        )));
    }
    let a = &pair.a;
    let b = pair.b();
    let sorted = SortedTriple::new(a, &b, &c)?;
    let s = root4(a, &c).expect("checked by SortedTriple");
    let t = root4(&b, &c).expect("checked by SortedTriple");
    let mut tagged = [(a.clone(), Role::A), (b, Role::B), (c.clone(), Role::C)];
    tagged.sort();
    let roles = tagged.map(|(_, r)| r);
    Ok(TripleCandidate {
        pair: pair.clone(),
        family,
        c,
        s,
        t,
        sorted,
        roles,
    })
}

/// True iff every pairwise product plus `n` is a perfect square.
pub fn check_tuple_n(elements: &[BigInt], n: i64) -> bool {
    let mut v = elements.to_vec();
    v.sort();
    v.dedup();
    if v.len() != elements.len() || v.len() < 2 || v.iter().any(|x| !x.is_positive()) {
        return false;
    }
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if is_perfect_square(&(&v[i] * &v[j] + n)).is_none() {
                return false;
            }
        }
    }
    true
}

/// D(4) property of a set.
pub fn check_tuple(elements: &[BigInt]) -> bool {
    check_tuple_n(elements, 4)
}

/// Whether a D(4)-quadruple is regular: some element equals `d₊` (or a
/// positive `d₋`) of the other three.
pub fn is_regular(quadruple: &[BigInt; 4]) -> Result<bool> {
    if !check_tuple(quadruple) {
        return Err(Error::Precondition("input is not a D(4)-quadruple".into()));
    }
    for i in 0..4 {
        let rest: Vec<&BigInt> = (0..4).filter(|&j| j != i).map(|j| &quadruple[j]).collect();
        let (dm, dp) = d_pm(rest[0], rest[1], rest[2])?;
        if quadruple[i] == dp || (dm.is_positive() && quadruple[i] == dm) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// An extension `d` of a triple with its three square roots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadrupleWitness {
    #[serde(with = "crate::exactmath::decimal")]
    pub d: BigInt,
    #[serde(with = "crate::exactmath::decimal")]
    pub x: BigInt,
    #[serde(with = "crate::exactmath::decimal")]
    pub y: BigInt,
    #[serde(with = "crate::exactmath::decimal")]
    pub z: BigInt,
}

impl QuadrupleWitness {
    /// Witness for `{a, b, c, d}` in sorted-triple order, if `d` extends it.
    pub fn new(triple: &SortedTriple, d: &BigInt) -> Option<Self> {
        if !d.is_positive() || triple.elements().contains(d) {
            return None;
        }
        Some(QuadrupleWitness {
            d: d.clone(),
            x: root4(&triple.a, d)?,
            y: root4(&triple.b, d)?,
            z: root4(&triple.c, d)?,
        })
    }
}

/// How an extension relates to the regular ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionClass {
    Zero,
    DMinus,
    DPlus,
    Irregular,
}

impl ExtensionClass {
    pub fn of(triple: &SortedTriple, d: &BigInt) -> ExtensionClass {
        let (dm, dp) = triple.d_pm();
        if d.is_zero() {
            ExtensionClass::Zero
        } else if d == &dp {
            ExtensionClass::DPlus
        } else if d == &dm {
            ExtensionClass::DMinus
        } else {
            ExtensionClass::Irregular
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ExtensionClass::Zero => "zero",
            ExtensionClass::DMinus => "d_minus",
            ExtensionClass::DPlus => "d_plus",
            ExtensionClass::Irregular => "irregular",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pell::{pair_at, Multiplier, PairOrbit};

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn set(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| big(x)).collect()
    }

    #[test]
    fn regular_extensions() {
        assert_eq!(d_pm(&big(1), &big(5), &big(12)).unwrap(), (big(0), big(96)));
        assert_eq!(d_pm(&big(4), &big(8), &big(24)).unwrap(), (big(0), big(840)));
        assert_eq!(d_pm(&big(24), &big(48), &big(140)).unwrap(), (big(0), big(161_704)));
        assert!(matches!(d_pm(&big(1), &big(3), &big(5)), Err(Error::NotATriple(_))));
    }

    #[test]
    fn family_examples() {
        let p2 = pair_at(2, 2).unwrap();
        let t = c_family(&p2, Family::C1Plus).unwrap();
        assert_eq!((t.c.clone(), t.s.clone(), t.t.clone()), (big(140), big(58), big(82)));
        assert_eq!(t.role_order(), "abc");
        assert_eq!(c_family(&p2, Family::C2Plus).unwrap().c, big(161_704));
        let p1 = pair_at(2, 1).unwrap();
        assert_eq!(c_family(&p1, Family::C1Minus), Err(Error::DegenerateC("0".into())));
    }

    #[test]
    fn c1_minus_ordering() {
        for k in Multiplier::ALL {
            for pair in PairOrbit::new(k).take(12) {
                let Ok(t) = c_family(&pair, Family::C1Minus) else {
                    assert_eq!(pair.p, 1);
                    continue;
                };
                match k {
                    Multiplier::Six => {
                        assert!(pair.a < t.c && t.c < pair.b());
                        assert_eq!(t.roles, [Role::A, Role::C, Role::B]);
                    }
                    _ => {
                        assert!(t.c < pair.a);
                        assert_eq!(t.roles, [Role::C, Role::A, Role::B]);
                    }
                }
            }
        }
    }

    #[test]
    fn check_tuple_examples() {
        assert!(check_tuple(&set(&[1, 5, 12, 96])));
        assert!(check_tuple(&set(&[4, 8, 24, 840])));
        assert!(!check_tuple(&set(&[1, 3])));
        assert!(!check_tuple(&set(&[4, 4, 8])));
        assert!(check_tuple_n(&set(&[1, 3, 8, 120]), 1));
    }

    #[test]
    fn regularity_examples() {
        assert!(is_regular(&[big(1), big(5), big(12), big(96)]).unwrap());
        assert!(is_regular(&[big(4), big(8), big(24), big(840)]).unwrap());
        assert!(is_regular(&[big(24), big(48), big(140), big(161_704)]).unwrap());
        assert!(is_regular(&[big(4), big(8), big(24), big(140)]).is_err());
    }

    #[test]
    fn family_invariants() {
        for k in Multiplier::ALL {
            for pair in PairOrbit::new(k).take(25) {
                for fam in Family::ALL {
                    let Ok(t) = c_family(&pair, fam) else { continue };
                    let tr = &t.sorted;
                    let prod = (&tr.a * &tr.b + 4) * (&tr.a * &tr.c + 4) * (&tr.b * &tr.c + 4);
                    let rst = &tr.r * &tr.s * &tr.t;
                    assert_eq!(prod, &rst * &rst);
                    let (dm, dp) = tr.d_pm();
                    assert!(dp > tr.c);
                    assert!(!dm.is_negative());
                    let mut quad = tr.elements().to_vec();
                    quad.push(dp.clone());
                    assert!(check_tuple(&quad), "{fam} k={k} p={}", pair.p);
                    if dm.is_positive() {
                        assert!(dm < tr.c);
                        let mut q2 = tr.elements().to_vec();
                        q2.push(dm);
                        assert!(check_tuple(&q2));
                    }
                    if fam.nu() == 3 {
                        let a5 = num_traits::pow(pair.a.clone(), 5);
                        assert!(t.c < a5 * 519u32);
                    }
                }
            }
        }
    }

    #[test]
    fn general_form_agrees_for_all_nu() {
        for k in Multiplier::ALL {
            for pair in PairOrbit::new(k).take(40) {
                for fam in Family::ALL {
                    assert_eq!(c_closed_form(&pair, fam), c_general(&pair, fam.nu(), fam.branch()));
                }
            }
        }
    }

    #[test]
    fn family_parsing() {
        assert_eq!("c1+".parse::<Family>().unwrap(), Family::C1Plus);
        assert_eq!("C2-".parse::<Family>().unwrap(), Family::C2Minus);
        assert_eq!("c3−".parse::<Family>().unwrap(), Family::C3Minus);
        assert!("c4+".parse::<Family>().is_err());
        assert!("c1".parse::<Family>().is_err());
        assert_eq!(Family::C2Minus.to_string(), "c2-");
    }

    #[test]
    fn witness_and_classes() {
        let t = SortedTriple::new(&big(4), &big(8), &big(24)).unwrap();
        let w = QuadrupleWitness::new(&t, &big(840)).unwrap();
        assert_eq!((w.x, w.y, w.z), (big(58), big(82), big(142)));
        assert!(QuadrupleWitness::new(&t, &big(24)).is_none());
        assert_eq!(ExtensionClass::of(&t, &big(840)), ExtensionClass::DPlus);
        assert_eq!(ExtensionClass::of(&t, &big(0)), ExtensionClass::Zero);
        assert_eq!(ExtensionClass::of(&t, &big(5)), ExtensionClass::Irregular);
    }
}
