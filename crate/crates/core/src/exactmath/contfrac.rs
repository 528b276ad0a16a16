use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{pow2, HpReal};
use crate::error::{Error, Result};

/// Streams the convergents of a real number known only through an enclosure.
///
/// Euclid's algorithm runs on both endpoints at once. A partial quotient is
/// emitted only while both endpoints agree on it and neither has terminated,
/// which makes every emitted convergent a convergent of every number in the
/// enclosure.
#[derive(Debug, Clone)]
pub struct CfCursor {
    bits: u32,
    lo: (BigInt, BigInt),
    hi: (BigInt, BigInt),
    quotients: Vec<BigInt>,
    // (p_{n-1}, q_{n-1}), (p_n, q_n)
    prev: (BigInt, BigInt),
    cur: (BigInt, BigInt),
}

impl CfCursor {
    pub fn new(target: &HpReal) -> Result<Self> {
        if target.is_exact() {
            // an exactly representable target is rational at this precision
            return Err(Error::NoUsefulConvergent { tried: 0 });
        }
        let den = pow2(target.prec() as u64);
        Ok(CfCursor {
            bits: target.prec(),
            lo: (target.lo_scaled().clone(), den.clone()),
            hi: (target.hi_scaled().clone(), den),
            quotients: Vec::new(),
            prev: (BigInt::zero(), BigInt::one()),
            cur: (BigInt::one(), BigInt::zero()),
        })
    }

    pub fn quotients(&self) -> &[BigInt] {
        &self.quotients
    }

    /// The most recently emitted convergent `(p, q)`, if any.
    pub fn current(&self) -> Option<(&BigInt, &BigInt)> {
        (!self.quotients.is_empty()).then_some((&self.cur.0, &self.cur.1))
    }

    fn step(&mut self) -> Result<()> {
        let (n1, d1) = &self.lo;
        let (n2, d2) = &self.hi;
        let (a1, r1) = n1.div_mod_floor(d1);
        let (a2, r2) = n2.div_mod_floor(d2);
        if a1 != a2 || r1.is_zero() || r2.is_zero() {
            return Err(Error::PrecisionExhausted { bits: self.bits });
        }
        self.lo = (d1.clone(), r1);
        self.hi = (d2.clone(), r2);
        let p = &a1 * &self.cur.0 + &self.prev.0;
        let q = &a1 * &self.cur.1 + &self.prev.1;
        self.prev = std::mem::replace(&mut self.cur, (p, q));
        self.quotients.push(a1);
        Ok(())
    }

    /// Advances to the next convergent whose denominator exceeds `q_min`.
    pub fn next_convergent(&mut self, q_min: &BigInt) -> Result<(BigInt, BigInt)> {
        loop {
            self.step()?;
            if &self.cur.1 > q_min {
                return Ok(self.cur.clone());
            }
        }
    }
}
