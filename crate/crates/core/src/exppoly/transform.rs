use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{ExpCombination, ExpPoly, Monomial};
use crate::error::{Error, Result};

/// Exponential polynomial whose `E(x_i)` exponents may be negative. Only used
/// as an intermediate form; [`LaurentExpPoly::clear_units`] turns it back into
/// an [`ExpPoly`] by multiplying with the unit `prod E(x_i)^{s_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct LaurentExpPoly {
    arity: usize,
    prime: u64,
    terms: BTreeMap<(Vec<u32>, Vec<i64>), ExpCombination>,
}

impl LaurentExpPoly {
    pub(crate) fn zero(arity: usize, prime: u64) -> Self {
        LaurentExpPoly {
            arity,
            prime,
            terms: BTreeMap::new(),
        }
    }

    pub(crate) fn constant(arity: usize, prime: u64, c: ExpCombination) -> Self {
        let mut out = Self::zero(arity, prime);
        out.add_term(vec![0; arity], vec![0; arity], c);
        out
    }

    pub(crate) fn x(arity: usize, prime: u64, i: usize) -> Self {
        let mut a = vec![0; arity];
        a[i] = 1;
        let mut out = Self::zero(arity, prime);
        out.add_term(a, vec![0; arity], ExpCombination::constant(1));
        out
    }

    /// `E(sum_j coeffs[j] x_j + c)` for integer coefficients.
    pub(crate) fn exp_affine(arity: usize, prime: u64, coeffs: &[i64], c: i64) -> Self {
        let mut out = Self::zero(arity, prime);
        out.add_term(vec![0; arity], coeffs.to_vec(), ExpCombination::term(c, 1));
        out
    }

    pub(crate) fn add_term(&mut self, a: Vec<u32>, b: Vec<i64>, c: ExpCombination) {
        if c.is_zero() {
            return;
        }
        let key = (a, b);
        let merged = match self.terms.remove(&key) {
            Some(existing) => existing.add(&c),
            None => c,
        };
        if !merged.is_zero() {
            self.terms.insert(key, merged);
        }
    }

    pub(crate) fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((a, b), c) in other.terms.iter() {
            out.add_term(a.clone(), b.clone(), c.clone());
        }
        out
    }

    pub(crate) fn neg(&self) -> Self {
        LaurentExpPoly {
            arity: self.arity,
            prime: self.prime,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c.neg())).collect(),
        }
    }

    pub(crate) fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.arity, self.prime);
        for ((a1, b1), c1) in self.terms.iter() {
            for ((a2, b2), c2) in other.terms.iter() {
                let a = a1.iter().zip(a2).map(|(x, y)| x + y).collect();
                let b = b1.iter().zip(b2).map(|(x, y)| x + y).collect();
                out.add_term(a, b, c1.mul(c2));
            }
        }
        out
    }

    pub(crate) fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(self.arity, self.prime, ExpCombination::constant(1));
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `Some((coeffs, constant))` when this is an affine integer form
    /// `sum coeffs[j] x_j + constant` with integer coefficients.
    pub(crate) fn as_affine(&self) -> Option<(Vec<i64>, i64)> {
        let mut coeffs = vec![0i64; self.arity];
        let mut constant = 0i64;
        for ((a, b), c) in self.terms.iter() {
            if b.iter().any(|&e| e != 0) {
                return None;
            }
            let k: i64 = c.as_integer()?.try_into().ok()?;
            match a.iter().sum::<u32>() {
                0 => constant = k,
                1 => {
                    let i = a.iter().position(|&e| e == 1)?;
                    coeffs[i] = k;
                }
                _ => return None,
            }
        }
        Some((coeffs, constant))
    }

    /// Multiplies by `prod E(x_i)^{s_i}` with the smallest `s_i >= 0` making all
    /// exponents non-negative. Returns the polynomial and the shifts `s`.
    pub(crate) fn clear_units(&self) -> (ExpPoly, Vec<u32>) {
        let n = self.arity;
        let mut shift = vec![0u32; n];
        for (_, b) in self.terms.keys() {
            for (s, &e) in shift.iter_mut().zip(b) {
                if e < 0 {
                    *s = (*s).max((-e) as u32);
                }
            }
        }
        let mut out = ExpPoly::zero(n, self.prime);
        for ((a, b), c) in self.terms.iter() {
            let mut e = a.clone();
            e.extend(b.iter().zip(&shift).map(|(&x, &s)| (x + s as i64) as u32));
            out.add_term(Monomial(e), c.clone());
        }
        (out, shift)
    }
}

impl From<&ExpPoly> for LaurentExpPoly {
    fn from(f: &ExpPoly) -> Self {
        let n = f.arity();
        let mut out = LaurentExpPoly::zero(n, f.prime());
        for (m, c) in f.terms() {
            let a = m.0[..n].to_vec();
            let b = m.0[n..].iter().map(|&e| e as i64).collect();
            out.add_term(a, b, c.clone());
        }
        out
    }
}

/// A relation `m_1 x_1 + ... + m_n x_n = m_0` whose eliminated variable has coefficient `+1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearRelation {
    constant: i64,
    coefficients: Vec<i64>,
    eliminated: usize,
}

impl LinearRelation {
    /// Normalizes `sum coefficients[i] x_i = constant`: divides by the content,
    /// eliminates the first variable with coefficient `+-1` and flips signs so
    /// that coefficient is `+1`.
    pub fn new(coefficients: Vec<i64>, constant: i64) -> Result<Self> {
        if coefficients.iter().all(|&c| c == 0) {
            return Err(Error::Usage("a relation needs a nonzero variable coefficient".into()));
        }
        let g = coefficients
            .iter()
            .fold(constant.unsigned_abs(), |g, &c| g.gcd(&c.unsigned_abs())) as i64;
        let mut coefficients: Vec<i64> = coefficients.iter().map(|c| c / g).collect();
        let mut constant = constant / g;
        let eliminated = coefficients
            .iter()
            .position(|c| c.abs() == 1)
            .ok_or_else(|| {
                Error::Unsupported("relation has no unimodular variable coefficient".into())
            })?;
        if coefficients[eliminated] < 0 {
            coefficients.iter_mut().for_each(|c| *c = -*c);
            constant = -constant;
        }
        Ok(LinearRelation {
            constant,
            coefficients,
            eliminated,
        })
    }

    /// Rebuilds a stored relation, checking it is already normalized.
    pub fn from_parts(coefficients: Vec<i64>, constant: i64, eliminated: usize) -> Result<Self> {
        let r = Self::new(coefficients.clone(), constant)?;
        if r.coefficients != coefficients || r.constant != constant || r.eliminated != eliminated {
            return Err(Error::Usage("relation is not in normal form".into()));
        }
        Ok(r)
    }

    pub fn arity(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    pub fn constant(&self) -> i64 {
        self.constant
    }

    pub fn eliminated(&self) -> usize {
        self.eliminated
    }

    /// Largest absolute value among the constant and the coefficients of the
    /// variables that remain.
    pub fn height(&self) -> u64 {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != self.eliminated)
            .map(|(_, c)| c.unsigned_abs())
            .chain(std::iter::once(self.constant.unsigned_abs()))
            .max()
            .unwrap_or(0)
    }

    /// Value of the eliminated variable given the remaining ones (in order).
    pub fn solve(&self, rest: &[i64]) -> i64 {
        let mut v = self.constant;
        let mut k = 0;
        for (j, &c) in self.coefficients.iter().enumerate() {
            if j == self.eliminated {
                continue;
            }
            v -= c * rest[k];
            k += 1;
        }
        v
    }

    /// The full point obtained by inserting the eliminated coordinate.
    pub fn expand_point(&self, rest: &[i64]) -> Vec<i64> {
        let mut out = rest.to_vec();
        out.insert(self.eliminated, self.solve(rest));
        out
    }
}

impl fmt::Display for LinearRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{} = {}", self.eliminated + 1, self.constant)?;
        for (j, &c) in self.coefficients.iter().enumerate() {
            if j == self.eliminated || c == 0 {
                continue;
            }
            let sign = if c > 0 { '-' } else { '+' };
            write!(f, " {sign} {}*x{}", c.abs(), j + 1)?;
        }
        Ok(())
    }
}

impl ExpPoly {
    /// `F^2 + p G^2`, which vanishes exactly where both `F` and `G` do.
    pub fn squash(&self, other: &ExpPoly) -> Result<ExpPoly> {
        self.check_compatible(other)?;
        let p = BigInt::from(self.prime());
        self.pow(2).try_add(&other.pow(2).scale(&p))
    }

    /// Left fold of [`ExpPoly::squash`] over a nonempty list.
    pub fn squash_all(polys: &[ExpPoly]) -> Result<ExpPoly> {
        let (first, rest) = polys
            .split_first()
            .ok_or_else(|| Error::Usage("nothing to squash".into()))?;
        rest.iter().try_fold(first.clone(), |acc, g| acc.squash(g))
    }

    /// Eliminates a variable using `rel`; see [`ExpPoly::substitute_linear_with_shift`].
    pub fn substitute_linear(&self, rel: &LinearRelation) -> Result<ExpPoly> {
        Ok(self.substitute_linear_with_shift(rel)?.0)
    }

    /// Eliminates the relation's variable. `E(x_e)` becomes
    /// `E(m_0) prod_j E(x_j)^{-m_j}`; negative exponents are cleared by the unit
    /// factor `prod E(x_j)^{s_j}`, whose exponents `s` are returned. At an integer
    /// point `t'` the result equals `E(sum s_j t'_j)` times the original value at
    /// the expanded point.
    pub fn substitute_linear_with_shift(
        &self,
        rel: &LinearRelation,
    ) -> Result<(ExpPoly, Vec<u32>)> {
        let n = self.arity();
        if rel.arity() != n {
            return Err(Error::Usage(format!(
                "relation over {} variables applied to arity {n}",
                rel.arity()
            )));
        }
        let e = rel.eliminated();
        if rel.coefficients()[e] != 1 {
            return Err(Error::Unsupported("eliminated coefficient must be 1".into()));
        }
        let m = n - 1;
        let prime = self.prime();
        let rest: Vec<usize> = (0..n).filter(|&j| j != e).collect();

        // x_e = m0 - sum_{j != e} m_j x_j over the remaining variables
        let mut x_sub = LaurentExpPoly::constant(m, prime, ExpCombination::constant(rel.constant()));
        let mut y_coeffs = vec![0i64; m];
        for (k, &j) in rest.iter().enumerate() {
            let c = rel.coefficients()[j];
            if c != 0 {
                let mut term = LaurentExpPoly::x(m, prime, k);
                term = term.mul(&LaurentExpPoly::constant(m, prime, ExpCombination::constant(-c)));
                x_sub = x_sub.add(&term);
            }
            y_coeffs[k] = -c;
        }
        let y_sub = LaurentExpPoly::exp_affine(m, prime, &y_coeffs, rel.constant());

        let mut out = LaurentExpPoly::zero(m, prime);
        for (mono, c) in self.terms() {
            let ex = &mono.0;
            let a: Vec<u32> = rest.iter().map(|&j| ex[j]).collect();
            let b: Vec<i64> = rest.iter().map(|&j| ex[n + j] as i64).collect();
            let mut term = LaurentExpPoly::zero(m, prime);
            term.add_term(a, b, c.clone());
            if ex[e] > 0 {
                term = term.mul(&x_sub.pow(ex[e]));
            }
            if ex[n + e] > 0 {
                term = term.mul(&y_sub.pow(ex[n + e]));
            }
            out = out.add(&term);
        }
        Ok(out.clear_units())
    }
}

/// `E(sum shift_j t_j)` weight for an integer point.
pub fn unit_shift_weight(shift: &[u32], t: &[i64]) -> i64 {
    shift.iter().zip(t).map(|(&s, &v)| s as i64 * v).sum()
}

/// Greatest common divisor of the integer coefficients (1 for non-integral input).
pub fn content(f: &ExpPoly) -> BigInt {
    let mut g = BigInt::zero();
    for (_, c) in f.terms() {
        for (_, a) in c.iter() {
            g = g.gcd(a);
        }
    }
    if g.is_zero() {
        BigInt::one()
    } else {
        g.abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_normalization() {
        let r = LinearRelation::new(vec![-1, 2], 3).unwrap();
        assert_eq!(r.coefficients(), &[1, -2]);
        assert_eq!(r.constant(), -3);
        assert_eq!(r.eliminated(), 0);
        let r = LinearRelation::new(vec![2, 4], 6).unwrap();
        assert_eq!(r.coefficients(), &[1, 2]);
        assert!(matches!(
            LinearRelation::new(vec![2, 3], 1),
            Err(Error::Unsupported(_))
        ));
        assert_eq!(LinearRelation::new(vec![1, 1], 1).unwrap().to_string(), "x1 = 1 - 1*x2");
    }

    #[test]
    fn substitution_examples() {
        let p = 5;
        let y1 = ExpPoly::y(1, p, 0);
        let f = &y1 - &ExpPoly::constant(1, p, 1);
        let r = LinearRelation::new(vec![1], 0).unwrap();
        let g = f.substitute_linear(&r).unwrap();
        assert_eq!(g.arity(), 0);
        assert!(g.is_zero());

        let f = &ExpPoly::x(2, p, 0) + &ExpPoly::x(2, p, 1);
        let r = LinearRelation::new(vec![1, 1], 0).unwrap();
        assert!(f.substitute_linear(&r).unwrap().is_zero());

        // x1 = 1 - x2
        let f = &ExpPoly::y(2, p, 0) * &ExpPoly::y(2, p, 1);
        let r = LinearRelation::from_parts(vec![1, 1], 1, 0).unwrap();
        let (g, shift) = f.substitute_linear_with_shift(&r).unwrap();
        assert_eq!(shift, vec![0]);
        assert_eq!(g, ExpPoly::constant_combination(1, p, ExpCombination::term(1, 1)));
    }

    #[test]
    fn negative_exponents_are_cleared() {
        let p = 5;
        let f = ExpPoly::y(2, p, 1);
        // x2 = 1 - x1
        let r = LinearRelation::new(vec![1, 1], 1).unwrap();
        assert_eq!(r.eliminated(), 0);
        let (g, shift) = f.substitute_linear_with_shift(&r).unwrap();
        // eliminating x1: E(x2) stays, nothing negative
        assert_eq!(shift, vec![0]);
        assert_eq!(g, ExpPoly::y(1, p, 0));

        let f = ExpPoly::y(2, p, 0);
        let (g, shift) = f.substitute_linear_with_shift(&r).unwrap();
        assert_eq!(shift, vec![1]);
        assert_eq!(g, ExpPoly::constant_combination(1, p, ExpCombination::term(1, 1)));
    }

    #[test]
    fn squash_examples() {
        let p = 5;
        let x1 = ExpPoly::x(2, p, 0);
        let x2 = ExpPoly::x(2, p, 1);
        assert_eq!(x1.squash(&ExpPoly::zero(2, p)).unwrap(), x1.pow(2));
        let s = x1.squash(&x2).unwrap();
        assert!(s.is_zero_at_integer(&[0, 0]).unwrap());
        assert_eq!(s.exact_collect(&[1, 0]).unwrap(), ExpCombination::constant(1));
        assert_eq!(
            s.valuation_at_integer(&[5, 5]).unwrap(),
            crate::padic::Valuation::Exact(2)
        );
    }
}
