use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::padic::{ep_exp, prime_power, ExpBase, PadicInt, Valuation};

/// A finite sum `sum_j a_j E_p(j)` with integer `a_j` and integer (possibly
/// negative) weights `j`. Since `E_p(1)` is transcendental, such a sum is zero
/// exactly when every `a_j` is zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExpCombination {
    entries: BTreeMap<i64, BigInt>,
}

impl ExpCombination {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::term(0, c)
    }

    /// `c * E_p(weight)`.
    pub fn term(weight: i64, c: impl Into<BigInt>) -> Self {
        let mut out = Self::zero();
        out.add_term(weight, c.into());
        out
    }

    pub fn from_entries<I: IntoIterator<Item = (i64, BigInt)>>(entries: I) -> Self {
        let mut out = Self::zero();
        for (w, c) in entries {
            out.add_term(w, c);
        }
        out
    }

    pub fn add_term(&mut self, weight: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.entries.entry(weight).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.entries.remove(&weight);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.entries.iter().map(|(w, c)| (*w, c))
    }

    pub fn get(&self, weight: i64) -> Option<&BigInt> {
        self.entries.get(&weight)
    }

    /// The integer value when only the weight-0 entry is present.
    pub fn as_integer(&self) -> Option<BigInt> {
        match self.entries.len() {
            0 => Some(BigInt::zero()),
            1 => self.entries.get(&0).cloned(),
            _ => None,
        }
    }

    /// Largest absolute coefficient.
    pub fn height(&self) -> BigInt {
        self.entries
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in other.iter() {
            out.add_term(w, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        ExpCombination {
            entries: self.entries.iter().map(|(w, c)| (*w, -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (w1, c1) in self.iter() {
            for (w2, c2) in other.iter() {
                out.add_term(w1 + w2, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        ExpCombination {
            entries: self.entries.iter().map(|(w, c)| (*w, c * k)).collect(),
        }
    }

    /// Multiplies by `E_p(shift)`.
    pub fn shift(&self, shift: i64) -> Self {
        ExpCombination {
            entries: self.entries.iter().map(|(w, c)| (w + shift, c.clone())).collect(),
        }
    }

    /// Exact division of every coefficient by `k`.
    pub fn div_exact(&self, k: &BigInt) -> Option<Self> {
        let mut entries = BTreeMap::new();
        for (w, c) in self.iter() {
            let (q, r) = c.div_rem(k);
            if !r.is_zero() {
                return None;
            }
            entries.insert(w, q);
        }
        Some(ExpCombination { entries })
    }

    /// Residue modulo `p^N` using the series for every weight.
    pub fn value(&self, prime: u64, precision: u32) -> PadicInt {
        let modulus = prime_power(prime, precision);
        let mut acc = BigInt::zero();
        for (w, c) in self.iter() {
            let e = ep_exp(&PadicInt::new(prime, precision, w));
            acc += c * e.residue();
        }
        PadicInt::new(prime, precision, acc.mod_floor(&modulus))
    }

    /// Residue modulo `p^N` through a precomputed `E_p(1)`.
    pub fn value_with(&self, base: &ExpBase) -> BigInt {
        let mut acc = BigInt::zero();
        for (w, c) in self.iter() {
            acc += c * base.exp_residue(w);
        }
        acc.mod_floor(base.modulus())
    }

    /// True valuation of a nonzero combination, found by doubling the precision
    /// from `start` until a nonzero residue appears.
    pub fn valuation(&self, prime: u64, start: u32) -> Result<Valuation> {
        if self.is_zero() {
            return Err(Error::Domain(
                "valuation of an exact zero is infinite".into(),
            ));
        }
        let mut n = start.max(1);
        loop {
            let v = self.value(prime, n).valuation();
            if v.is_exact() {
                return Ok(v);
            }
            n = n.checked_mul(2).ok_or_else(|| {
                Error::Internal("precision overflow while computing a valuation".into())
            })?;
        }
    }
}

impl fmt::Display for ExpCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.entries.iter().rev().enumerate() {
            let abs = c.abs();
            match (i, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if *w == 0 {
                write!(f, "{abs}")?;
            } else {
                write!(f, "{abs}*E({w})")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation_removes_entries() {
        let a = ExpCombination::term(2, 1).add(&ExpCombination::term(2, -1));
        assert!(a.is_zero());
    }

    #[test]
    fn both_value_routes_agree() {
        let c = ExpCombination::from_entries([(3, BigInt::from(2)), (-1, BigInt::from(-5))]);
        let base = ExpBase::new(5, 7);
        assert_eq!(&c.value_with(&base), c.value(5, 7).residue());
    }

    #[test]
    fn valuation_of_e_p_minus_one() {
        let c = ExpCombination::from_entries([(1, BigInt::from(1)), (0, BigInt::from(-1))]);
        assert_eq!(c.valuation(5, 1).unwrap(), Valuation::Exact(1));
        assert!(ExpCombination::zero().valuation(5, 4).is_err());
    }

    #[test]
    fn display() {
        let c = ExpCombination::from_entries([(1, BigInt::from(3)), (0, BigInt::from(-1))]);
        assert_eq!(c.to_string(), "3*E(1) - 1");
    }
}
