//! Analytic Hensel lemma: a checkable certificate that a square system has a
//! unique root near an integer center, a Newton lifter that computes it, and
//! first-order implicit-function data.
//!
//! For a square system `f` and center `a`, if `det J_f(a) != 0` and
//! `v(f(a)) > 2 v(det J_f(a)) + r`, then there is a unique root `b` with
//! `v(b - a) > v(det J_f(a)) + r`.

use num_bigint::BigInt;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::exppoly::{det_padic, jacobian_polys, ExpCombination, ExpPoly, ExpSystem};
use crate::linalg;
use crate::padic::{int_valuation, prime_power, ExpBase, PadicInt, Valuation};

/// Default cap on precision escalation in [`check_hensel`].
pub const DEFAULT_PRECISION_CAP: u32 = 256;

/// Data witnessing the Hensel condition at an integer center.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HenselCertificate {
    system: ExpSystem,
    center: Vec<i64>,
    slack: u32,
    det_valuation: u32,
    residual_valuations: Vec<Valuation>,
    precision_used: u32,
}

impl HenselCertificate {
    pub fn system(&self) -> &ExpSystem {
        &self.system
    }

    pub fn center(&self) -> &[i64] {
        &self.center
    }

    pub fn slack(&self) -> u32 {
        self.slack
    }

    pub fn det_valuation(&self) -> u32 {
        self.det_valuation
    }

    pub fn residual_valuations(&self) -> &[Valuation] {
        &self.residual_valuations
    }

    pub fn precision_used(&self) -> u32 {
        self.precision_used
    }

    /// The bound every residual valuation must exceed.
    pub fn bound(&self) -> u32 {
        2 * self.det_valuation + self.slack
    }

    /// The isolating radius: the root `b` satisfies `v(b - center) > radius`.
    pub fn radius(&self) -> u32 {
        self.det_valuation + self.slack
    }
}

/// Output of [`newton_lift`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftResult {
    /// Approximation of the root.
    pub approx_root: Vec<PadicInt>,
    /// `v(f(approx_root)) >= guaranteed_precision`; the exact root agrees with
    /// `approx_root` to `guaranteed_precision - det_valuation` digits.
    pub guaranteed_precision: u32,
    /// Minimum residual valuation before each step and after the last one.
    pub trace: Vec<u32>,
}

fn truncated_valuation(residue: &BigInt, prime: u64, precision: u32) -> Valuation {
    match int_valuation(residue, prime) {
        Some(k) if k < precision => Valuation::Exact(k),
        _ => Valuation::AtLeast(precision),
    }
}

/// Determinant of a matrix over `Z[E(1), E(-1)]` by cofactor expansion.
fn det_combination(m: &[Vec<ExpCombination>]) -> ExpCombination {
    match m.len() {
        0 => ExpCombination::constant(1),
        1 => m[0][0].clone(),
        n => {
            let mut acc = ExpCombination::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<ExpCombination>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(k, _)| *k != j)
                            .map(|(_, c)| c.clone())
                            .collect()
                    })
                    .collect();
                let term = m[0][j].mul(&det_combination(&minor));
                acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

/// Result of probing a square system at an integer center.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Probe {
    /// `v(det J(center))`, or `None` when the determinant is exactly zero or
    /// its valuation reaches the precision cap.
    pub det_valuation: Option<u32>,
    /// Residual valuations truncated at the probe precision.
    pub residuals: Vec<Valuation>,
}

impl Probe {
    /// Largest slack `r` for which the Hensel condition holds, if any.
    pub fn max_slack(&self) -> Option<u32> {
        let v = self.det_valuation?;
        let k = self
            .residuals
            .iter()
            .map(|r| r.lower_bound())
            .min()
            .unwrap_or(u32::MAX);
        k.checked_sub(2 * v + 1)
    }
}

/// Reusable Hensel checker for one square system; caches the symbolic
/// Jacobian and the exponential bases for every precision it visits.
#[derive(Clone, Debug)]
pub struct HenselChecker {
    system: ExpSystem,
    jacobian: Vec<Vec<ExpPoly>>,
    start: u32,
    cap: u32,
    bases: Vec<ExpBase>,
}

impl HenselChecker {
    /// Precisions visited are `start * 2^k <= cap`.
    pub fn new(system: &ExpSystem, start: u32, cap: u32) -> Result<Self> {
        if !system.is_square() {
            return Err(Error::Usage(format!(
                "Hensel lifting needs a square system, got {} members in {} variables",
                system.len(),
                system.arity()
            )));
        }
        if start == 0 || start > cap {
            return Err(Error::Usage(format!(
                "invalid precision range {start}..={cap}"
            )));
        }
        let cols: Vec<usize> = (0..system.arity()).collect();
        let jacobian = jacobian_polys(system, &cols)?;
        let mut bases = Vec::new();
        let mut n = start;
        while n <= cap {
            bases.push(ExpBase::new(system.prime(), n));
            match n.checked_mul(2) {
                Some(m) => n = m,
                None => break,
            }
        }
        Ok(HenselChecker {
            system: system.clone(),
            jacobian,
            start,
            cap,
            bases,
        })
    }

    pub fn system(&self) -> &ExpSystem {
        &self.system
    }

    fn base_for(&self, min: u32) -> Option<&ExpBase> {
        self.bases.iter().find(|b| b.precision() >= min)
    }

    fn det_at(&self, center: &[i64]) -> Result<Option<u32>> {
        let entries = self
            .jacobian
            .iter()
            .map(|row| row.iter().map(|d| d.exact_collect(center)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        let det = det_combination(&entries);
        if det.is_zero() {
            return Ok(None);
        }
        for base in &self.bases {
            if let Valuation::Exact(v) =
                truncated_valuation(&det.value_with(base), self.system.prime(), base.precision())
            {
                return Ok(Some(v));
            }
        }
        Ok(None)
    }

    fn residuals_at(&self, center: &[i64], base: &ExpBase) -> Result<Vec<Valuation>> {
        self.system
            .members()
            .iter()
            .map(|f| {
                let r = f.value_at_integer(center, base)?;
                Ok(truncated_valuation(&r, self.system.prime(), base.precision()))
            })
            .collect()
    }

    /// Determinant valuation and residual valuations at the starting precision.
    pub fn probe(&self, center: &[i64]) -> Result<Probe> {
        self.check_arity(center)?;
        Ok(Probe {
            det_valuation: self.det_at(center)?,
            residuals: self.residuals_at(center, &self.bases[0])?,
        })
    }

    fn check_arity(&self, center: &[i64]) -> Result<()> {
        if center.len() != self.system.arity() {
            return Err(Error::Usage(format!(
                "center of length {} for arity {}",
                center.len(),
                self.system.arity()
            )));
        }
        Ok(())
    }

    /// The Hensel certificate at `center` with slack `r`, if the condition holds
    /// at some precision `start * 2^k <= cap`. The recorded precision is the
    /// smallest such one.
    pub fn check(&self, center: &[i64], slack: u32) -> Result<Option<HenselCertificate>> {
        self.check_arity(center)?;
        let Some(v) = self.det_at(center)? else {
            return Ok(None);
        };
        let bound = 2 * v + slack;
        let Some(base) = self.base_for(bound + 1) else {
            return Ok(None);
        };
        let residuals = self.residuals_at(center, base)?;
        if !residuals.iter().all(|r| r.exceeds(bound)) {
            return Ok(None);
        }
        Ok(Some(HenselCertificate {
            system: self.system.clone(),
            center: center.to_vec(),
            slack,
            det_valuation: v,
            residual_valuations: residuals,
            precision_used: base.precision(),
        }))
    }

    pub fn start(&self) -> u32 {
        self.start
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }
}

/// Checks the Hensel condition at an integer center, escalating precision
/// from `precision` by doubling up to `cap`. Absence is `Ok(None)`.
pub fn check_hensel(
    system: &ExpSystem,
    center: &[i64],
    slack: u32,
    precision: u32,
    cap: u32,
) -> Result<Option<HenselCertificate>> {
    HenselChecker::new(system, precision, cap.max(precision))?.check(center, slack)
}

fn residual_vector(system: &ExpSystem, point: &[PadicInt], precision: u32) -> Result<Vec<BigInt>> {
    system
        .members()
        .iter()
        .map(|f| Ok(f.evaluate_at(point, precision)?.residue().clone()))
        .collect()
}

fn min_valuation(values: &[BigInt], prime: u64, trust: u32) -> u32 {
    values
        .iter()
        .map(|r| truncated_valuation(r, prime, trust).lower_bound())
        .min()
        .unwrap_or(trust)
}

/// Newton iteration `b <- b - J(b)^{-1} f(b)` from the certificate's center
/// until every residual has valuation at least `target`.
pub fn newton_lift(cert: &HenselCertificate, target: u32) -> Result<LiftResult> {
    let system = &cert.system;
    let p = system.prime();
    let n = system.arity();
    let v = cert.det_valuation;
    let work = target.max(cert.precision_used) + 2 * v + 2;
    let trust = work - v;
    let modulus = prime_power(p, work);
    let cols: Vec<usize> = (0..n).collect();
    let jac = jacobian_polys(system, &cols)?;

    let mut point: Vec<PadicInt> = cert.center.iter().map(|&c| PadicInt::new(p, work, c)).collect();
    let mut residuals = residual_vector(system, &point, work)?;
    let mut k = min_valuation(&residuals, p, trust);
    let mut trace = vec![k];
    while k < target {
        let matrix: Vec<Vec<BigInt>> = jac
            .iter()
            .map(|row| {
                row.iter()
                    .map(|d| Ok(d.evaluate_at(&point, work)?.residue().clone()))
                    .collect()
            })
            .collect::<Result<_>>()?;
        let det = linalg::det(&matrix).mod_floor(&modulus);
        let dv = int_valuation(&det, p).filter(|&d| d == v).ok_or_else(|| {
            Error::Internal(format!(
                "Jacobian valuation changed during lifting (expected {v})"
            ))
        })?;
        let unit = PadicInt::new(p, work, &det / prime_power(p, dv)).unit_inverse()?;
        let adj_f = linalg::mul_vec(&linalg::adjugate(&matrix), &residuals);
        let pv = prime_power(p, dv);
        let mut next = Vec::with_capacity(n);
        for (b, num) in point.iter().zip(adj_f) {
            let num = num.mod_floor(&modulus);
            if !(&num % &pv).eq(&BigInt::from(0)) {
                return Err(Error::Internal("Newton correction is not integral".into()));
            }
            let delta = (num / &pv * unit.residue()).mod_floor(&modulus);
            next.push(PadicInt::new(p, work, b.residue() - delta));
        }
        point = next;
        residuals = residual_vector(system, &point, work)?;
        let k_next = min_valuation(&residuals, p, trust);
        if k_next <= k {
            return Err(Error::Internal(format!(
                "Newton step stalled at residual valuation {k}"
            )));
        }
        if k > 2 * v && k_next < (2 * (k - v)).min(trust) {
            return Err(Error::Internal(format!(
                "Newton step from valuation {k} reached only {k_next}"
            )));
        }
        k = k_next;
        trace.push(k);
    }

    let radius = cert.radius();
    for (b, &c) in point.iter().zip(&cert.center) {
        let diff = b.sub(&PadicInt::new(p, work, c))?;
        if !diff.valuation().exceeds(radius) {
            return Err(Error::Internal(
                "lifted root left the isolating neighborhood".into(),
            ));
        }
    }
    Ok(LiftResult {
        approx_root: point,
        guaranteed_precision: k.min(trust),
        trace,
    })
}

/// First-order implicit-function data `Dg = -A_y^{-1} A_x` for a system of
/// `m` members in `l + m` variables vanishing at `point`, where the last `m`
/// variables are solved for. Entries are returned at precision
/// `precision - 2 v(det A_y)`.
pub fn implicit_jacobian(
    system: &ExpSystem,
    point: &[i64],
    precision: u32,
) -> Result<Vec<Vec<PadicInt>>> {
    let m = system.len();
    let arity = system.arity();
    if m > arity || point.len() != arity {
        return Err(Error::Usage(format!(
            "{m} members in {arity} variables at a point of length {}",
            point.len()
        )));
    }
    let l = arity - m;
    let p = system.prime();
    let base = ExpBase::new(p, precision);
    for f in system.members() {
        if !f.value_at_integer(point, &base)?.eq(&BigInt::from(0)) {
            return Err(Error::Domain("system does not vanish at the point".into()));
        }
    }
    let evaluate = |cols: Vec<usize>| -> Result<Vec<Vec<BigInt>>> {
        jacobian_polys(system, &cols)?
            .iter()
            .map(|row| row.iter().map(|d| d.value_at_integer(point, &base)).collect())
            .collect()
    };
    let a_x = evaluate((0..l).collect())?;
    let a_y = evaluate((l..arity).collect())?;
    let to_padic = |rows: &[Vec<BigInt>]| -> Vec<Vec<PadicInt>> {
        rows.iter()
            .map(|r| r.iter().map(|v| PadicInt::new(p, precision, v.clone())).collect())
            .collect()
    };
    let det = det_padic(&to_padic(&a_y), p)?;
    let v = match det.valuation() {
        Valuation::Exact(v) if 2 * v < precision => v,
        _ => {
            return Err(Error::Domain(format!(
                "the solved block is singular at precision {precision}"
            )))
        }
    };
    let out_precision = precision - 2 * v;
    let out_modulus = prime_power(p, out_precision);
    let pv = prime_power(p, v);
    let unit = PadicInt::new(p, precision, det.residue() / &pv).unit_inverse()?;
    let prod = linalg::mul_mat(&linalg::adjugate(&a_y), &a_x);
    let modulus = prime_power(p, precision);
    prod.iter()
        .map(|row| {
            row.iter()
                .map(|e| {
                    let e = e.mod_floor(&modulus);
                    let (q, r) = e.div_rem(&pv);
                    if r != BigInt::from(0) {
                        return Err(Error::Domain("implicit derivative is not integral".into()));
                    }
                    let val = (-(q * unit.residue())).mod_floor(&out_modulus);
                    Ok(PadicInt::new(p, out_precision, val))
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq6() -> ExpSystem {
        let x = ExpPoly::x(1, 5, 0);
        ExpSystem::new(vec![&x.pow(2) - &ExpPoly::constant(1, 5, 6)]).unwrap()
    }

    #[test]
    fn check_examples() {
        let c = check_hensel(&sq6(), &[1], 0, 32, 256).unwrap().unwrap();
        assert_eq!(c.det_valuation(), 0);
        assert_eq!(c.residual_valuations(), &[Valuation::Exact(1)]);
        assert_eq!(c.precision_used(), 32);
        assert!(check_hensel(&sq6(), &[2], 0, 32, 256).unwrap().is_none());

        let y = ExpPoly::y(1, 5, 0);
        let sys = ExpSystem::new(vec![&y - &ExpPoly::constant(1, 5, 1)]).unwrap();
        let c = check_hensel(&sys, &[0], 0, 1, 256).unwrap().unwrap();
        assert_eq!(c.det_valuation(), 1);
        assert_eq!(c.residual_valuations(), &[Valuation::AtLeast(4)]);
        assert_eq!(c.precision_used(), 4);
    }

    #[test]
    fn escalation_respects_cap() {
        let y = ExpPoly::y(1, 5, 0);
        let sys = ExpSystem::new(vec![&y - &ExpPoly::constant(1, 5, 1)]).unwrap();
        assert!(check_hensel(&sys, &[0], 10, 4, 8).unwrap().is_none());
        assert!(check_hensel(&sys, &[0], 10, 4, 16).unwrap().is_some());
    }

    #[test]
    fn lift_square_root_of_six() {
        let c = check_hensel(&sq6(), &[1], 0, 8, 256).unwrap().unwrap();
        let r = newton_lift(&c, 20).unwrap();
        let b = &r.approx_root[0];
        let m = prime_power(5, 20);
        assert_eq!((b.residue() * b.residue() - BigInt::from(6)).mod_floor(&m), BigInt::from(0));
        assert!(r.guaranteed_precision >= 20);
        assert_eq!(r.trace[0], 1);
    }

    #[test]
    fn lift_exact_root_is_immediate() {
        let y = ExpPoly::y(1, 5, 0);
        let sys = ExpSystem::new(vec![&y - &ExpPoly::constant(1, 5, 1)]).unwrap();
        let c = check_hensel(&sys, &[0], 0, 4, 256).unwrap().unwrap();
        let r = newton_lift(&c, 30).unwrap();
        assert!(r.approx_root[0].is_zero());
        assert_eq!(r.trace.len(), 1);
    }

    #[test]
    fn lift_two_variables() {
        let p = 5;
        let x1 = ExpPoly::x(2, p, 0);
        let y2 = ExpPoly::y(2, p, 1);
        let f = &x1.pow(2) - &(&y2 * &ExpPoly::constant(2, p, 6));
        let sys = ExpSystem::new(vec![f, ExpPoly::x(2, p, 1)]).unwrap();
        let c = check_hensel(&sys, &[1, 0], 0, 8, 256).unwrap().unwrap();
        let r = newton_lift(&c, 15).unwrap();
        assert!(r.approx_root[1].is_zero());
        let b = r.approx_root[0].residue();
        let m = prime_power(p, 15);
        assert_eq!((b * b - BigInt::from(6)).mod_floor(&m), BigInt::from(0));
    }

    #[test]
    fn implicit_examples() {
        let p = 5;
        let x = |i| ExpPoly::x(2, p, i);
        let sys = ExpSystem::new(vec![&x(1) - &x(0).scale(&BigInt::from(p))]).unwrap();
        let d = implicit_jacobian(&sys, &[0, 0], 10).unwrap();
        assert_eq!(d[0][0].residue(), &BigInt::from(5));

        let sys = ExpSystem::new(vec![&x(1) - &x(0)]).unwrap();
        let d = implicit_jacobian(&sys, &[3, 3], 10).unwrap();
        assert_eq!(d[0][0].residue(), &BigInt::from(1));

        let y1 = ExpPoly::y(2, p, 0);
        let f = &(&(&x(1) * &y1) - &x(1)) - &x(0).scale(&BigInt::from(p));
        let sys = ExpSystem::new(vec![f]).unwrap();
        assert!(matches!(
            implicit_jacobian(&sys, &[0, 0], 10),
            Err(Error::Domain(_))
        ));
    }
}
