use num_bigint::BigInt;
use num_integer::Integer;

use super::{ExpPoly, ExpSystem};
use crate::error::{Error, Result};
use crate::linalg;
use crate::padic::{prime_power, PadicInt};

/// Symbolic Jacobian: entry `(i, j)` is `d f_i / d x_{cols[j]}`.
pub fn jacobian_polys(system: &ExpSystem, cols: &[usize]) -> Result<Vec<Vec<ExpPoly>>> {
    system
        .members()
        .iter()
        .map(|f| cols.iter().map(|&j| f.derivative(j)).collect())
        .collect()
}

/// Jacobian matrix of a system evaluated at a truncated point.
pub fn jacobian_matrix(system: &ExpSystem, point: &[PadicInt]) -> Result<Vec<Vec<PadicInt>>> {
    let cols: Vec<usize> = (0..system.arity()).collect();
    jacobian_polys(system, &cols)?
        .iter()
        .map(|row| row.iter().map(|d| d.evaluate(point)).collect())
        .collect()
}

/// Determinant of a square matrix of residues, modulo the smallest precision.
pub fn det_padic(matrix: &[Vec<PadicInt>], prime: u64) -> Result<PadicInt> {
    let precision = matrix
        .iter()
        .flatten()
        .map(PadicInt::precision)
        .min()
        .ok_or_else(|| Error::Usage("empty matrix".into()))?;
    if matrix.iter().any(|r| r.len() != matrix.len()) {
        return Err(Error::Usage("determinant of a non-square matrix".into()));
    }
    let ints: Vec<Vec<BigInt>> = matrix
        .iter()
        .map(|r| r.iter().map(|q| q.residue().clone()).collect())
        .collect();
    let d = linalg::det(&ints).mod_floor(&prime_power(prime, precision));
    Ok(PadicInt::new(prime, precision, d))
}

/// `det J(point)` for a square system.
pub fn jacobian(system: &ExpSystem, point: &[PadicInt]) -> Result<PadicInt> {
    if !system.is_square() {
        return Err(Error::Usage(format!(
            "Jacobian determinant needs a square system, got {} members in {} variables",
            system.len(),
            system.arity()
        )));
    }
    det_padic(&jacobian_matrix(system, point)?, system.prime())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_examples() {
        let p = 5;
        let x = |i| ExpPoly::x(2, p, i);
        let sys = ExpSystem::new(vec![&x(0) + &x(1), &x(0) - &x(1)]).unwrap();
        let pt = [PadicInt::new(p, 4, 0), PadicInt::new(p, 4, 0)];
        assert_eq!(jacobian(&sys, &pt).unwrap().residue(), &BigInt::from(625 - 2));

        let y = ExpPoly::y(1, p, 0);
        let sys = ExpSystem::new(vec![&y - &ExpPoly::constant(1, p, 1)]).unwrap();
        let d = jacobian(&sys, &[PadicInt::new(p, 3, 0)]).unwrap();
        assert_eq!(d.residue(), &BigInt::from(5));
        assert_eq!(d.valuation(), crate::padic::Valuation::Exact(1));

        let sys = ExpSystem::new(vec![x(0)]).unwrap();
        assert!(matches!(jacobian(&sys, &pt), Err(Error::Usage(_))));
    }
}
