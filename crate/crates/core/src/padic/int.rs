use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `p^n` as a big integer.
pub fn prime_power(prime: u64, n: u32) -> BigInt {
    num_traits::pow(BigInt::from(prime), n as usize)
}

/// Exponent of the largest power of `prime` dividing `value`; `None` for zero.
pub fn int_valuation(value: &BigInt, prime: u64) -> Option<u32> {
    if value.is_zero() {
        return None;
    }
    let p = BigInt::from(prime);
    let mut v = value.abs();
    let mut k = 0;
    loop {
        let (q, r) = v.div_rem(&p);
        if !r.is_zero() {
            return Some(k);
        }
        v = q;
        k += 1;
    }
}

/// Splits a nonzero integer into `(v_p(value), value / p^v)`.
pub fn split_prime_part(value: &BigInt, prime: u64) -> (u32, BigInt) {
    let p = BigInt::from(prime);
    let mut v = value.clone();
    let mut k = 0;
    while !v.is_zero() && (&v % &p).is_zero() {
        v /= &p;
        k += 1;
    }
    (k, v)
}

/// p-adic valuation of a truncated value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    /// The value is exactly divisible by `p^k` and not by `p^(k+1)`.
    Exact(u32),
    /// The value vanishes at the precision it was computed at.
    AtLeast(u32),
}

impl Valuation {
    /// Lower bound carried by this valuation.
    pub fn lower_bound(self) -> u32 {
        match self {
            Valuation::Exact(k) | Valuation::AtLeast(k) => k,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Valuation::Exact(_))
    }

    /// True when the valuation is known to be strictly greater than `bound`.
    pub fn exceeds(self, bound: u32) -> bool {
        match self {
            Valuation::Exact(k) => k > bound,
            Valuation::AtLeast(n) => n > bound,
        }
    }

    /// True when the valuation is known to be at least `bound`.
    pub fn at_least(self, bound: u32) -> bool {
        self.lower_bound() >= bound
    }

    /// Minimum of two valuations (valuation of a sum is at least this).
    pub fn min(self, other: Valuation) -> Valuation {
        if self.lower_bound() < other.lower_bound() {
            self
        } else if other.lower_bound() < self.lower_bound() {
            other
        } else if self.is_exact() {
            self
        } else {
            other
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(k) => write!(f, "{k}"),
            Valuation::AtLeast(n) => write!(f, ">={n}"),
        }
    }
}

/// An element of `Z_p` known modulo `p^N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicInt {
    prime: u64,
    precision: u32,
    modulus: BigInt,
    residue: BigInt,
}

impl PadicInt {
    /// Reduces an arbitrary integer modulo `p^precision`.
    pub fn new(prime: u64, precision: u32, value: impl Into<BigInt>) -> Self {
        assert!(prime >= 2, "prime must be at least 2");
        assert!(precision >= 1, "precision must be at least 1");
        let modulus = prime_power(prime, precision);
        let residue = value.into().mod_floor(&modulus);
        PadicInt {
            prime,
            precision,
            modulus,
            residue,
        }
    }

    pub(crate) fn with_modulus(prime: u64, precision: u32, modulus: &BigInt, value: BigInt) -> Self {
        PadicInt {
            prime,
            precision,
            residue: value.mod_floor(modulus),
            modulus: modulus.clone(),
        }
    }

    pub fn zero(prime: u64, precision: u32) -> Self {
        Self::new(prime, precision, 0)
    }

    pub fn one(prime: u64, precision: u32) -> Self {
        Self::new(prime, precision, 1)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Canonical representative in `[0, p^N)`.
    pub fn residue(&self) -> &BigInt {
        &self.residue
    }

    /// `p^N`.
    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.residue.is_zero()
    }

    /// Reduces to a lower precision. Asking for a higher one is a usage error.
    pub fn reduce(&self, precision: u32) -> Result<PadicInt> {
        if precision > self.precision {
            return Err(Error::Usage(format!(
                "cannot raise precision from {} to {precision}",
                self.precision
            )));
        }
        Ok(PadicInt::new(self.prime, precision, self.residue.clone()))
    }

    /// Reinterprets the residue at another precision (lifting by the canonical representative).
    pub fn with_precision(&self, precision: u32) -> PadicInt {
        PadicInt::new(self.prime, precision, self.residue.clone())
    }

    fn coerce(&self, other: &PadicInt) -> Result<(u32, BigInt)> {
        if self.prime != other.prime {
            return Err(Error::Usage(format!(
                "mismatched primes {} and {}",
                self.prime, other.prime
            )));
        }
        let n = self.precision.min(other.precision);
        let modulus = if n == self.precision {
            self.modulus.clone()
        } else {
            other.modulus.clone()
        };
        Ok((n, modulus))
    }

    pub fn add(&self, other: &PadicInt) -> Result<PadicInt> {
        let (n, m) = self.coerce(other)?;
        Ok(PadicInt::with_modulus(self.prime, n, &m, &self.residue + &other.residue))
    }

    pub fn sub(&self, other: &PadicInt) -> Result<PadicInt> {
        let (n, m) = self.coerce(other)?;
        Ok(PadicInt::with_modulus(self.prime, n, &m, &self.residue - &other.residue))
    }

    pub fn mul(&self, other: &PadicInt) -> Result<PadicInt> {
        let (n, m) = self.coerce(other)?;
        Ok(PadicInt::with_modulus(self.prime, n, &m, &self.residue * &other.residue))
    }

    pub fn neg(&self) -> PadicInt {
        PadicInt::with_modulus(self.prime, self.precision, &self.modulus, -&self.residue)
    }

    pub fn mul_int(&self, k: &BigInt) -> PadicInt {
        PadicInt::with_modulus(self.prime, self.precision, &self.modulus, &self.residue * k)
    }

    pub fn pow(&self, e: u64) -> PadicInt {
        PadicInt {
            prime: self.prime,
            precision: self.precision,
            residue: self.residue.modpow(&BigInt::from(e), &self.modulus),
            modulus: self.modulus.clone(),
        }
    }

    pub fn valuation(&self) -> Valuation {
        match int_valuation(&self.residue, self.prime) {
            Some(k) => Valuation::Exact(k),
            None => Valuation::AtLeast(self.precision),
        }
    }

    /// Inverse of a unit of `Z_p`.
    pub fn unit_inverse(&self) -> Result<PadicInt> {
        if self.valuation() != Valuation::Exact(0) {
            return Err(Error::Domain(format!(
                "{} is not a unit of Z_{}",
                self, self.prime
            )));
        }
        let inv = mod_inverse(&self.residue, &self.modulus)
            .ok_or_else(|| Error::Internal("unit without modular inverse".into()))?;
        Ok(PadicInt::with_modulus(self.prime, self.precision, &self.modulus, inv))
    }

    /// Residue as `u64` when it fits.
    pub fn to_u64(&self) -> Option<u64> {
        self.residue.to_u64()
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}^{})", self.residue, self.prime, self.precision)
    }
}

/// Inverse of `a` modulo `m` via the extended Euclidean algorithm.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}
