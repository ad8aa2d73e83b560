//! Arithmetic in `Z_p[X]/(Q)` for a monic integral `Q`, and the coordinate
//! ("decomposition") functions of `E_p(x alpha^i)` in the basis `1, alpha, ..., alpha^(d-1)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::exp::{exp_scale, padded_precision, truncation_bound, FactorialSplits};
use super::int::{prime_power, PadicInt};
use crate::error::{Error, Result};

/// A monic integer polynomial `Q`, coefficients listed from the constant term up.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtModulus {
    coefficients: Vec<BigInt>,
}

impl ExtModulus {
    pub fn new<I, T>(coefficients: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        let coefficients: Vec<BigInt> = coefficients.into_iter().map(Into::into).collect();
        if coefficients.len() < 2 {
            return Err(Error::Usage("extension modulus must have degree >= 1".into()));
        }
        if !coefficients.last().unwrap().is_one() {
            return Err(Error::Usage("extension modulus must be monic".into()));
        }
        Ok(ExtModulus { coefficients })
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    /// Reduces an integer coordinate vector of any length modulo `Q` and `m`.
    fn reduce(&self, mut poly: Vec<BigInt>, m: &BigInt) -> Vec<BigInt> {
        let d = self.degree();
        while poly.len() > d {
            let lead = poly.pop().unwrap();
            if lead.is_zero() {
                continue;
            }
            let shift = poly.len() - d;
            for (j, c) in self.coefficients[..d].iter().enumerate() {
                poly[shift + j] -= &lead * c;
            }
        }
        poly.resize(d, BigInt::zero());
        poly.into_iter().map(|c| c.mod_floor(m)).collect()
    }

    fn mul_raw(&self, a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        self.reduce(out, m)
    }
}

/// An element of `Z_p[alpha]`, `alpha` a root of the modulus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtElem {
    modulus: ExtModulus,
    coords: Vec<PadicInt>,
}

impl ExtElem {
    pub fn new(modulus: &ExtModulus, coords: Vec<PadicInt>) -> Result<Self> {
        if coords.len() != modulus.degree() {
            return Err(Error::Usage(format!(
                "expected {} coordinates, got {}",
                modulus.degree(),
                coords.len()
            )));
        }
        let (p, n) = (coords[0].prime(), coords[0].precision());
        if coords.iter().any(|c| c.prime() != p || c.precision() != n) {
            return Err(Error::Usage("coordinates must share prime and precision".into()));
        }
        Ok(ExtElem {
            modulus: modulus.clone(),
            coords,
        })
    }

    fn from_ints(modulus: &ExtModulus, prime: u64, precision: u32, ints: Vec<BigInt>) -> Self {
        let m = prime_power(prime, precision);
        ExtElem {
            modulus: modulus.clone(),
            coords: ints
                .into_iter()
                .map(|c| PadicInt::with_modulus(prime, precision, &m, c))
                .collect(),
        }
    }

    /// Embeds a base element as `(a, 0, ..., 0)`.
    pub fn from_base(modulus: &ExtModulus, a: &PadicInt) -> Self {
        let mut ints = vec![BigInt::zero(); modulus.degree()];
        ints[0] = a.residue().clone();
        Self::from_ints(modulus, a.prime(), a.precision(), ints)
    }

    pub fn one(modulus: &ExtModulus, prime: u64, precision: u32) -> Self {
        Self::from_base(modulus, &PadicInt::one(prime, precision))
    }

    /// `alpha^i` reduced by the modulus.
    pub fn alpha_pow(modulus: &ExtModulus, prime: u64, precision: u32, i: usize) -> Self {
        let m = prime_power(prime, precision);
        let mut raw = vec![BigInt::zero(); i + 1];
        raw[i] = BigInt::one();
        Self::from_ints(modulus, prime, precision, modulus.reduce(raw, &m))
    }

    pub fn modulus(&self) -> &ExtModulus {
        &self.modulus
    }

    pub fn coords(&self) -> &[PadicInt] {
        &self.coords
    }

    pub fn prime(&self) -> u64 {
        self.coords[0].prime()
    }

    pub fn precision(&self) -> u32 {
        self.coords[0].precision()
    }

    fn check(&self, other: &ExtElem) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::Usage("extension moduli differ".into()));
        }
        if self.prime() != other.prime() {
            return Err(Error::Usage("mismatched primes".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &ExtElem) -> Result<ExtElem> {
        self.check(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(ExtElem {
            modulus: self.modulus.clone(),
            coords,
        })
    }

    pub fn sub(&self, other: &ExtElem) -> Result<ExtElem> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ExtElem {
        ExtElem {
            modulus: self.modulus.clone(),
            coords: self.coords.iter().map(PadicInt::neg).collect(),
        }
    }

    pub fn mul(&self, other: &ExtElem) -> Result<ExtElem> {
        self.check(other)?;
        let n = self.precision().min(other.precision());
        let m = prime_power(self.prime(), n);
        let a: Vec<BigInt> = self.coords.iter().map(|c| c.residue().clone()).collect();
        let b: Vec<BigInt> = other.coords.iter().map(|c| c.residue().clone()).collect();
        let raw = self.modulus.mul_raw(&a, &b, &m);
        Ok(Self::from_ints(&self.modulus, self.prime(), n, raw))
    }

    pub fn scale(&self, k: &PadicInt) -> Result<ExtElem> {
        let coords = self
            .coords
            .iter()
            .map(|c| c.mul(k))
            .collect::<Result<Vec<_>>>()?;
        Ok(ExtElem {
            modulus: self.modulus.clone(),
            coords,
        })
    }
}

impl fmt::Display for ExtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", c.residue())?;
        }
        write!(f, ") (mod {}^{})", self.prime(), self.precision())
    }
}

/// `E_p(x alpha^i)` in `Z_p[alpha]`, truncated with the same bound as [`super::ep_exp`].
pub fn ext_exp(modulus: &ExtModulus, x: &PadicInt, i: usize) -> Result<ExtElem> {
    let d = modulus.degree();
    if i >= d {
        return Err(Error::Usage(format!("basis index {i} out of range for degree {d}")));
    }
    let prime = x.prime();
    let n = x.precision();
    let work = padded_precision(prime, n);
    let work_mod = prime_power(prime, work);
    let out_mod = x.modulus().clone();

    let alpha_i = ExtElem::alpha_pow(modulus, prime, work, i);
    let c = x.residue() * BigInt::from(exp_scale(prime));
    let z: Vec<BigInt> = alpha_i
        .coords
        .iter()
        .map(|a| (a.residue() * &c).mod_floor(&work_mod))
        .collect();

    let mut splits = FactorialSplits::new(prime, n);
    let mut power: Vec<BigInt> = vec![BigInt::zero(); d];
    power[0] = BigInt::one();
    let mut sum = vec![BigInt::zero(); d];
    for k in 0..truncation_bound(prime, n) {
        if k > 0 {
            power = modulus.mul_raw(&power, &z, &work_mod);
        }
        let (v, inv_unit) = splits.next_split();
        let pv = prime_power(prime, v);
        for (s, c) in sum.iter_mut().zip(&power) {
            *s += (c / &pv) * &inv_unit;
        }
    }
    let sum = sum.into_iter().map(|s| s.mod_floor(&out_mod)).collect();
    Ok(ExtElem::from_ints(modulus, prime, n, sum))
}

/// The coordinates `(c_{0,i}(x), ..., c_{d-1,i}(x))` of `E_p(x alpha^i)`.
pub fn decompose(modulus: &ExtModulus, x: &PadicInt, i: usize) -> Result<Vec<PadicInt>> {
    Ok(ext_exp(modulus, x, i)?.coords)
}

/// `sum_j coords[j] * root^j`: the image of an element under `alpha -> root`.
pub fn eval_at_root(coords: &[PadicInt], root: &PadicInt) -> Result<PadicInt> {
    let mut acc = PadicInt::zero(root.prime(), root.precision());
    for c in coords.iter().rev() {
        acc = acc.mul(root)?.add(c)?;
    }
    Ok(acc)
}

/// Checks the Vandermonde relation between the decomposition functions and the
/// exponentials at the conjugates: for every supplied root `r` of the modulus,
/// `sum_j c_{j,i}(x) r^j = E_p(x r^i)`.
pub fn vandermonde_check(
    modulus: &ExtModulus,
    x: &PadicInt,
    i: usize,
    roots: &[PadicInt],
) -> Result<bool> {
    let coords = decompose(modulus, x, i)?;
    for r in roots {
        let q_at_r = eval_at_root(
            &modulus
                .coefficients()
                .iter()
                .map(|c| PadicInt::new(r.prime(), r.precision(), c.clone()))
                .collect::<Vec<_>>(),
            r,
        )?;
        if !q_at_r.is_zero() {
            return Err(Error::Domain(format!("{r} is not a root of the modulus")));
        }
        let lhs = eval_at_root(&coords, r)?;
        let rhs = super::ep_exp(&x.mul(&r.pow(i as u64))?);
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q6() -> ExtModulus {
        ExtModulus::new([-6, 0, 1]).unwrap()
    }

    fn elem(q: &ExtModulus, n: u32, c: [i64; 2]) -> ExtElem {
        ExtElem::new(q, c.iter().map(|&v| PadicInt::new(5, n, v)).collect()).unwrap()
    }

    #[test]
    fn modulus_validation() {
        assert!(ExtModulus::new([1]).is_err());
        assert!(ExtModulus::new([1, 2]).is_err());
    }

    #[test]
    fn alpha_squared_reduces() {
        let q = q6();
        let a = elem(&q, 3, [0, 1]);
        assert_eq!(a.mul(&a).unwrap(), elem(&q, 3, [6, 0]));
        let one = ExtElem::one(&q, 5, 3);
        assert_eq!(a.mul(&one).unwrap(), a);
    }

    #[test]
    fn conjugate_product() {
        let q = q6();
        let x = elem(&q, 2, [1, 1]);
        let y = elem(&q, 2, [1, -1]);
        assert_eq!(x.mul(&y).unwrap(), elem(&q, 2, [20, 0]));
    }

    #[test]
    fn moduli_must_match() {
        let a = elem(&q6(), 2, [1, 1]);
        let other = ExtModulus::new([-7, 0, 1]).unwrap();
        let b = ExtElem::new(&other, vec![PadicInt::new(5, 2, 1); 2]).unwrap();
        assert!(a.mul(&b).is_err());
    }

    #[test]
    fn ext_exp_base_cases() {
        let q = q6();
        let zero = PadicInt::zero(5, 4);
        for i in 0..2 {
            assert_eq!(ext_exp(&q, &zero, i).unwrap(), ExtElem::one(&q, 5, 4));
        }
        let x = PadicInt::new(5, 4, 17);
        let d = decompose(&q, &x, 0).unwrap();
        assert_eq!(d[0], super::super::ep_exp(&x));
        assert!(d[1].is_zero());
        assert!(ext_exp(&q, &x, 2).is_err());
    }
}
