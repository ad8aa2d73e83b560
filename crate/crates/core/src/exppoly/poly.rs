use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::ExpCombination;
use crate::error::{Error, Result};
use crate::padic::{ep_exp, exp_scale, prime_power, ExpBase, PadicInt, Valuation};

/// Exponent tuple `(a_1..a_n, b_1..b_n)` of `x^a E(x)^b`, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(arity: usize) -> Self {
        Monomial(vec![0; 2 * arity])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn divide(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An exponential polynomial `P(x_1..x_n, E_p(x_1)..E_p(x_n))`.
///
/// Coefficients are [`ExpCombination`]s so that constants `E_p(m)` produced by
/// linear substitutions stay exact; ordinary integer coefficients live at weight 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExpPoly {
    arity: usize,
    prime: u64,
    terms: BTreeMap<Monomial, ExpCombination>,
}

impl ExpPoly {
    pub fn zero(arity: usize, prime: u64) -> Self {
        ExpPoly {
            arity,
            prime,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(arity: usize, prime: u64, c: impl Into<BigInt>) -> Self {
        Self::constant_combination(arity, prime, ExpCombination::constant(c))
    }

    pub fn constant_combination(arity: usize, prime: u64, c: ExpCombination) -> Self {
        let mut out = Self::zero(arity, prime);
        out.add_term(Monomial::one(arity), c);
        out
    }

    /// The variable `x_{i+1}`.
    pub fn x(arity: usize, prime: u64, i: usize) -> Self {
        assert!(i < arity);
        let mut m = Monomial::one(arity);
        m.0[i] = 1;
        Self::monomial(arity, prime, m, ExpCombination::constant(1))
    }

    /// The exponential `E(x_{i+1})`.
    pub fn y(arity: usize, prime: u64, i: usize) -> Self {
        assert!(i < arity);
        let mut m = Monomial::one(arity);
        m.0[arity + i] = 1;
        Self::monomial(arity, prime, m, ExpCombination::constant(1))
    }

    pub fn monomial(arity: usize, prime: u64, m: Monomial, c: ExpCombination) -> Self {
        assert_eq!(m.0.len(), 2 * arity, "exponent tuple length must be 2n");
        let mut out = Self::zero(arity, prime);
        out.add_term(m, c);
        out
    }

    pub fn from_terms<I>(arity: usize, prime: u64, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, ExpCombination)>,
    {
        let mut out = Self::zero(arity, prime);
        for (e, c) in terms {
            if e.len() != 2 * arity {
                return Err(Error::Usage(format!(
                    "exponent tuple of length {} for arity {arity}",
                    e.len()
                )));
            }
            out.add_term(Monomial(e), c);
        }
        Ok(out)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: ExpCombination) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing = existing.add(&c);
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in increasing graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &ExpCombination)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Largest absolute integer appearing in any coefficient.
    pub fn height(&self) -> BigInt {
        self.terms
            .values()
            .map(ExpCombination::height)
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// True when every coefficient is an ordinary integer.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.as_integer().is_some())
    }

    /// The constant combination, for arity 0 (or the constant term in general).
    pub fn constant_term(&self) -> ExpCombination {
        self.terms
            .get(&Monomial::one(self.arity))
            .cloned()
            .unwrap_or_default()
    }

    pub(crate) fn check_compatible(&self, other: &ExpPoly) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::Usage(format!(
                "arity mismatch: {} vs {}",
                self.arity, other.arity
            )));
        }
        if self.prime != other.prime {
            return Err(Error::Usage(format!(
                "prime mismatch: {} vs {}",
                self.prime, other.prime
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &ExpPoly) -> Result<ExpPoly> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms.iter() {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &ExpPoly) -> Result<ExpPoly> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &ExpPoly) -> Result<ExpPoly> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.arity, self.prime);
        for (m1, c1) in self.terms.iter() {
            for (m2, c2) in other.terms.iter() {
                out.add_term(m1.mul(m2), c1.mul(c2));
            }
        }
        Ok(out)
    }

    fn neg_ref(&self) -> ExpPoly {
        ExpPoly {
            arity: self.arity,
            prime: self.prime,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> ExpPoly {
        let mut out = Self::zero(self.arity, self.prime);
        for (m, c) in self.terms.iter() {
            out.add_term(m.clone(), c.scale(k));
        }
        out
    }

    pub fn pow(&self, e: u32) -> ExpPoly {
        let mut acc = Self::constant(self.arity, self.prime, 1);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative in `x_{i+1}`, using `dE(x)/dx = c E(x)` with
    /// `c = p` (`c = 4` when `p = 2`).
    pub fn derivative(&self, i: usize) -> Result<ExpPoly> {
        if i >= self.arity {
            return Err(Error::Usage(format!(
                "variable index {} out of range for arity {}",
                i + 1,
                self.arity
            )));
        }
        let scale = BigInt::from(exp_scale(self.prime));
        let n = self.arity;
        let mut out = Self::zero(n, self.prime);
        for (m, c) in self.terms.iter() {
            let a = m.0[i];
            if a > 0 {
                let mut dm = m.clone();
                dm.0[i] -= 1;
                out.add_term(dm, c.scale(&BigInt::from(a)));
            }
            let b = m.0[n + i];
            if b > 0 {
                out.add_term(m.clone(), c.scale(&(&scale * BigInt::from(b))));
            }
        }
        Ok(out)
    }

    /// Value at a truncated point, substituting `E_p(point_i)` for `E(x_i)`.
    /// The precision is the minimum over the point.
    pub fn evaluate(&self, point: &[PadicInt]) -> Result<PadicInt> {
        let n = point
            .iter()
            .map(PadicInt::precision)
            .min()
            .ok_or_else(|| Error::Usage("empty point; use evaluate_at with a precision".into()))?;
        self.evaluate_at(point, n)
    }

    /// Value at a truncated point at an explicit precision (needed for arity 0).
    pub fn evaluate_at(&self, point: &[PadicInt], precision: u32) -> Result<PadicInt> {
        if point.len() != self.arity {
            return Err(Error::Usage(format!(
                "point of length {} for arity {}",
                point.len(),
                self.arity
            )));
        }
        if let Some(q) = point.iter().find(|q| q.prime() != self.prime) {
            return Err(Error::Usage(format!(
                "point over Z_{} for a polynomial over Z_{}",
                q.prime(),
                self.prime
            )));
        }
        if point.iter().any(|q| q.precision() < precision) {
            return Err(Error::Usage("point precision below requested precision".into()));
        }
        let prime = self.prime;
        let modulus = prime_power(prime, precision);
        let xs: Vec<BigInt> = point.iter().map(|q| q.residue().mod_floor(&modulus)).collect();
        let ys: Vec<BigInt> = point
            .iter()
            .map(|q| ep_exp(&q.with_precision(precision)).residue().clone())
            .collect();
        let mut weights: BTreeMap<i64, BigInt> = BTreeMap::new();
        let mut acc = BigInt::zero();
        for (m, c) in self.terms.iter() {
            let mut coeff = BigInt::zero();
            for (w, a) in c.iter() {
                let e = weights
                    .entry(w)
                    .or_insert_with(|| ep_exp(&PadicInt::new(prime, precision, w)).residue().clone());
                coeff += a * &*e;
            }
            let mut v = coeff.mod_floor(&modulus);
            for (k, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let base = if k < self.arity { &xs[k] } else { &ys[k - self.arity] };
                v = (v * base.modpow(&BigInt::from(e), &modulus)).mod_floor(&modulus);
            }
            acc += v;
        }
        Ok(PadicInt::new(prime, precision, acc))
    }

    /// Exact value at an integer point as a combination `sum_j a_j E_p(j)`.
    pub fn exact_collect(&self, t: &[i64]) -> Result<ExpCombination> {
        if t.len() != self.arity {
            return Err(Error::Usage(format!(
                "point of length {} for arity {}",
                t.len(),
                self.arity
            )));
        }
        let n = self.arity;
        let ts: Vec<BigInt> = t.iter().map(|&v| BigInt::from(v)).collect();
        let mut out = ExpCombination::zero();
        for (m, c) in self.terms.iter() {
            let mut xprod = BigInt::one();
            for (k, &e) in m.0[..n].iter().enumerate() {
                if e > 0 {
                    xprod *= num_traits::pow(ts[k].clone(), e as usize);
                }
            }
            if xprod.is_zero() {
                continue;
            }
            let mut w0 = 0i64;
            for (k, &b) in m.0[n..].iter().enumerate() {
                w0 = w0
                    .checked_add((b as i64).checked_mul(t[k]).ok_or_else(overflow)?)
                    .ok_or_else(overflow)?;
            }
            for (w, a) in c.iter() {
                out.add_term(w.checked_add(w0).ok_or_else(overflow)?, a * &xprod);
            }
        }
        Ok(out)
    }

    /// Residue at an integer point through a precomputed base, `exact_collect` then evaluation.
    pub fn value_at_integer(&self, t: &[i64], base: &ExpBase) -> Result<BigInt> {
        Ok(self.exact_collect(t)?.value_with(base))
    }

    /// Exact zero test at an integer point.
    pub fn is_zero_at_integer(&self, t: &[i64]) -> Result<bool> {
        Ok(self.exact_collect(t)?.is_zero())
    }

    /// The true valuation of a nonzero value at an integer point.
    pub fn valuation_at_integer(&self, t: &[i64]) -> Result<Valuation> {
        let c = self.exact_collect(t)?;
        if c.is_zero() {
            return Err(Error::Domain(format!(
                "{self} vanishes exactly at {t:?}; its valuation is infinite"
            )));
        }
        c.valuation(self.prime, 8)
    }

    /// Exact quotient by an integer-coefficient divisor, if it divides.
    pub fn div_exact(&self, divisor: &ExpPoly) -> Result<Option<ExpPoly>> {
        self.check_compatible(divisor)?;
        let (lead_m, lead_c) = match divisor.terms.iter().next_back() {
            Some(t) => t,
            None => return Err(Error::Domain("division by zero polynomial".into())),
        };
        let lead_int = lead_c
            .as_integer()
            .ok_or_else(|| Error::Unsupported("divisor must have integer coefficients".into()))?;
        let mut rem = self.clone();
        let mut quotient = Self::zero(self.arity, self.prime);
        while let Some((m, c)) = rem.terms.iter().next_back() {
            let qm = match m.divide(lead_m) {
                Some(qm) => qm,
                None => return Ok(None),
            };
            let qc = match c.div_exact(&lead_int) {
                Some(qc) => qc,
                None => return Ok(None),
            };
            let step = Self::monomial(self.arity, self.prime, qm, qc);
            rem = rem.try_sub(&step.try_mul(divisor)?)?;
            quotient = quotient.try_add(&step)?;
        }
        Ok(Some(quotient))
    }

    /// Relabels variables into a larger arity (`map[i]` is the new index of `x_{i+1}`).
    pub fn embed(&self, arity: usize, map: &[usize]) -> Result<ExpPoly> {
        if map.len() != self.arity || map.iter().any(|&j| j >= arity) {
            return Err(Error::Usage("invalid variable embedding".into()));
        }
        let mut out = Self::zero(arity, self.prime);
        for (m, c) in self.terms.iter() {
            let mut e = vec![0; 2 * arity];
            for (i, &j) in map.iter().enumerate() {
                e[j] += m.0[i];
                e[arity + j] += m.0[self.arity + i];
            }
            out.add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }
}

fn overflow() -> Error {
    Error::Unsupported("exponential weight overflow at integer point".into())
}

impl Add for &ExpPoly {
    type Output = ExpPoly;
    fn add(self, rhs: &ExpPoly) -> ExpPoly {
        self.try_add(rhs).expect("incompatible exponential polynomials")
    }
}

impl Sub for &ExpPoly {
    type Output = ExpPoly;
    fn sub(self, rhs: &ExpPoly) -> ExpPoly {
        self.try_sub(rhs).expect("incompatible exponential polynomials")
    }
}

impl Mul for &ExpPoly {
    type Output = ExpPoly;
    fn mul(self, rhs: &ExpPoly) -> ExpPoly {
        self.try_mul(rhs).expect("incompatible exponential polynomials")
    }
}

impl Neg for &ExpPoly {
    type Output = ExpPoly;
    fn neg(self) -> ExpPoly {
        self.neg_ref()
    }
}

fn write_factors(f: &mut fmt::Formatter<'_>, m: &Monomial, arity: usize) -> fmt::Result {
    let mut first = true;
    for (k, &e) in m.0.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        if k < arity {
            write!(f, "x{}", k + 1)?;
        } else {
            write!(f, "E(x{})", k - arity + 1)?;
        }
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

/// Canonical text: terms in decreasing graded-lex order, `c * x1^a1*...*E(x1)^b1*...`.
impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let constant = m.degree() == 0;
            match c.as_integer() {
                Some(k) => {
                    let neg = k.is_negative();
                    match (i, neg) {
                        (0, true) => write!(f, "-")?,
                        (0, false) => {}
                        (_, true) => write!(f, " - ")?,
                        (_, false) => write!(f, " + ")?,
                    }
                    write!(f, "{}", k.abs())?;
                }
                None => {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "({c})")?;
                }
            }
            if !constant {
                write!(f, " * ")?;
                write_factors(f, m, self.arity)?;
            }
        }
        Ok(())
    }
}

/// A nonempty list of exponential polynomials over the same variables and prime.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExpSystem {
    arity: usize,
    prime: u64,
    members: Vec<ExpPoly>,
}

impl ExpSystem {
    pub fn new(members: Vec<ExpPoly>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::Usage("a system needs at least one member".into()))?;
        let (arity, prime) = (first.arity(), first.prime());
        for m in &members {
            first.check_compatible(m)?;
        }
        Ok(ExpSystem {
            arity,
            prime,
            members,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn members(&self) -> &[ExpPoly] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_square(&self) -> bool {
        self.members.len() == self.arity
    }
}
