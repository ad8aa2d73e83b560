//! The exponential `E_p(x) = exp(p x)` (and `exp(4x)` for `p = 2`) on truncated `Z_p`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::int::{mod_inverse, prime_power, split_prime_part, PadicInt};

/// The constant `c` with `E_p(x) = exp(c x)`.
pub fn exp_scale(prime: u64) -> u64 {
    if prime == 2 {
        4
    } else {
        prime
    }
}

/// Number of series terms kept at precision `n`: every term of index `>= M` has valuation `>= n`.
pub fn truncation_bound(prime: u64, n: u32) -> u32 {
    if prime == 2 {
        n
    } else {
        let num = n as u64 * (prime - 1);
        let den = prime - 2;
        num.div_ceil(den) as u32
    }
}

/// `v_p(k!)` by Legendre's formula.
pub fn factorial_valuation(prime: u64, k: u64) -> u32 {
    let mut total = 0u64;
    let mut q = k / prime;
    while q > 0 {
        total += q;
        q /= prime;
    }
    total as u32
}

/// Internal precision used while summing the series for output precision `n`.
pub(crate) fn padded_precision(prime: u64, n: u32) -> u32 {
    let m = truncation_bound(prime, n) as u64;
    n + factorial_valuation(prime, m.saturating_sub(1))
}

/// Iterates `(k, p-part exponent of k!, inverse of the unit part of k! mod p^n)` for `k < M`.
pub(crate) struct FactorialSplits {
    prime: u64,
    out_modulus: BigInt,
    k: u64,
    v: u32,
    unit_inv: BigInt,
}

impl FactorialSplits {
    pub(crate) fn new(prime: u64, n: u32) -> Self {
        FactorialSplits {
            prime,
            out_modulus: prime_power(prime, n),
            k: 0,
            v: 0,
            unit_inv: BigInt::one(),
        }
    }

    /// Advances to the next `k`, returning `(v_p(k!), inverse of k!/p^v mod p^n)`.
    pub(crate) fn next_split(&mut self) -> (u32, BigInt) {
        if self.k > 0 {
            let (vk, uk) = split_prime_part(&BigInt::from(self.k), self.prime);
            self.v += vk;
            let inv = mod_inverse(&uk, &self.out_modulus).expect("unit part of k is a unit");
            self.unit_inv = (&self.unit_inv * inv).mod_floor(&self.out_modulus);
        }
        self.k += 1;
        (self.v, self.unit_inv.clone())
    }
}

/// `E_p(x)` reduced modulo `p^N`, with `N` the precision of `x`.
pub fn ep_exp(x: &PadicInt) -> PadicInt {
    let prime = x.prime();
    let n = x.precision();
    let terms = truncation_bound(prime, n);
    let work = padded_precision(prime, n);
    let work_mod = prime_power(prime, work);
    let out_mod = x.modulus().clone();
    let scaled = (x.residue() * BigInt::from(exp_scale(prime))).mod_floor(&work_mod);

    let mut splits = FactorialSplits::new(prime, n);
    let mut power = BigInt::one();
    let mut sum = BigInt::zero();
    for k in 0..terms {
        if k > 0 {
            power = (&power * &scaled).mod_floor(&work_mod);
        }
        let (v, inv_unit) = splits.next_split();
        let reduced = &power / prime_power(prime, v);
        sum += reduced * inv_unit;
    }
    PadicInt::with_modulus(prime, n, &out_mod, sum)
}

/// `E_p(1)` and its inverse at one precision; evaluates `E_p(j)` for integers `j`
/// through the homomorphism `E_p(j) = E_p(1)^j`.
#[derive(Clone, Debug)]
pub struct ExpBase {
    prime: u64,
    precision: u32,
    modulus: BigInt,
    e1: BigInt,
    e1_inv: BigInt,
}

impl ExpBase {
    /// Computed once per `(prime, precision)` and shared afterwards.
    pub fn new(prime: u64, precision: u32) -> Self {
        static CACHE: OnceLock<Mutex<HashMap<(u64, u32), ExpBase>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(b) = cache.lock().expect("exp base cache poisoned").get(&(prime, precision)) {
            return b.clone();
        }
        let b = Self::compute(prime, precision);
        cache
            .lock()
            .expect("exp base cache poisoned")
            .insert((prime, precision), b.clone());
        b
    }

    fn compute(prime: u64, precision: u32) -> Self {
        let e1 = ep_exp(&PadicInt::new(prime, precision, 1));
        let e1_inv = e1.unit_inverse().expect("E_p takes unit values");
        ExpBase {
            prime,
            precision,
            modulus: e1.modulus().clone(),
            e1: e1.residue().clone(),
            e1_inv: e1_inv.residue().clone(),
        }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    /// Residue of `E_p(j)` as an integer in `[0, p^N)`.
    pub fn exp_residue(&self, j: i64) -> BigInt {
        match j.cmp(&0) {
            std::cmp::Ordering::Equal => BigInt::one(),
            std::cmp::Ordering::Greater => self.e1.modpow(&BigInt::from(j), &self.modulus),
            std::cmp::Ordering::Less => self.e1_inv.modpow(&BigInt::from(-j), &self.modulus),
        }
    }

    pub fn exp_int(&self, j: i64) -> PadicInt {
        PadicInt::with_modulus(self.prime, self.precision, &self.modulus, self.exp_residue(j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_zero_is_one() {
        for p in [2, 3, 5, 7] {
            assert_eq!(ep_exp(&PadicInt::zero(p, 6)), PadicInt::one(p, 6));
        }
    }

    #[test]
    fn first_order_agreement_mod_p_squared() {
        for a in 0..25 {
            let x = PadicInt::new(5, 2, a);
            assert_eq!(ep_exp(&x), PadicInt::new(5, 2, 1 + 5 * a));
        }
    }

    #[test]
    fn truncation_bounds() {
        assert_eq!(truncation_bound(3, 10), 20);
        assert_eq!(truncation_bound(5, 10), 14);
        assert_eq!(truncation_bound(2, 10), 10);
        assert_eq!(factorial_valuation(5, 25), 6);
    }

    #[test]
    fn base_matches_series() {
        let base = ExpBase::new(7, 9);
        for j in -12i64..12 {
            assert_eq!(base.exp_int(j), ep_exp(&PadicInt::new(7, 9, j)));
        }
    }
}
