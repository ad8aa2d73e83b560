//! Replays a certificate document from its raw data. Values are recomputed
//! through the power-series route of [`ExpPoly::evaluate_at`], and refutations
//! are replayed by a separate residue enumeration, so nothing here shares the
//! search code of the engine.

use num_bigint::BigInt;
use num_integer::Integer;

use super::document::{
    BallDoc, CertificateDocument, HenselWitnessDoc, Payload, PolyDoc, RefutationDoc, SatDoc,
    WitnessDoc, FORMAT,
};
use super::normalize::{normalize, NormalForm};
use super::parse::parse;
use crate::engine::Budget;
use crate::error::{Error, Result};
use crate::exppoly::{det_padic, jacobian_matrix, ExpPoly, ExpSystem};
use crate::padic::{prime_power, PadicInt, Valuation};

/// Outcome of [`verify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verification {
    Accepted,
    Rejected(String),
}

impl Verification {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verification::Accepted)
    }
}

struct Reject(String);

impl From<Error> for Reject {
    fn from(e: Error) -> Self {
        Reject(e.to_string())
    }
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(Reject(format!($($msg)+)));
        }
    };
}

type Check = std::result::Result<(), Reject>;

/// Sanity limit on exponents and weights of decoded polynomials.
const MAX_EXPONENT: u32 = 1 << 16;

/// Re-checks every claim of the document. Only internal failures are errors;
/// every unsupported or false claim is a rejection.
pub fn verify(doc: &CertificateDocument) -> Result<Verification> {
    match check_document(doc) {
        Ok(()) => Ok(Verification::Accepted),
        Err(Reject(reason)) => Ok(Verification::Rejected(reason)),
    }
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn check_document(doc: &CertificateDocument) -> Check {
    ensure!(doc.format == FORMAT, "unknown format `{}`", doc.format);
    ensure!(is_prime(doc.prime), "{} is not prime", doc.prime);
    ensure!(
        doc.verdict == doc.certificate.label(),
        "verdict `{}` does not match a {} payload",
        doc.verdict,
        doc.certificate.label()
    );
    doc.budget.validate()?;
    let nf = normalize(&parse(&doc.sentence)?, doc.prime)?;
    match &doc.certificate {
        Payload::Sat(s) => check_sat(doc, &nf, s),
        Payload::Unsat(u) => {
            ensure!(
                u.refutations.len() == nf.disjuncts.len(),
                "{} refutations for {} disjuncts",
                u.refutations.len(),
                nf.disjuncts.len()
            );
            for (i, (d, r)) in nf.disjuncts.iter().zip(&u.refutations).enumerate() {
                ensure!(d.disequations.is_empty(), "disjunct {i} has disequations");
                let eq = d
                    .equations
                    .first()
                    .cloned()
                    .unwrap_or_else(|| ExpPoly::zero(nf.arity(), nf.prime));
                let whole = BallDoc {
                    center: vec![0; nf.arity()],
                    radius: 0,
                };
                check_refutation(r, &whole, &eq, nf.prime, &doc.budget)?;
            }
            Ok(())
        }
        Payload::Unknown(_) => Ok(()),
    }
}

fn check_sat(doc: &CertificateDocument, nf: &NormalForm, s: &SatDoc) -> Check {
    ensure!(s.disjunct < nf.disjuncts.len(), "no disjunct {}", s.disjunct);
    let engine = nf.to_engine();
    let d = &engine[s.disjunct];
    let mut p = d.equation.clone();
    let mut diseqs = d.disequations.clone();
    for (i, r) in s.chain.iter().enumerate() {
        let rel = r.decode()?;
        ensure!(
            rel.arity() == p.arity(),
            "relation {i} has arity {}, expected {}",
            rel.arity(),
            p.arity()
        );
        p = p.substitute_linear(&rel)?;
        diseqs = diseqs
            .iter()
            .map(|f| f.substitute_linear(&rel))
            .collect::<Result<_>>()?;
    }
    match &s.witness {
        WitnessDoc::ExactZero => {
            ensure!(p.is_zero(), "the substituted equation is not identically zero");
            if !diseqs.is_empty() {
                ensure!(p.arity() == 0, "disequations remain over free variables");
                for (j, f) in diseqs.iter().enumerate() {
                    ensure!(
                        !f.exact_collect(&[])?.is_zero(),
                        "disequation {j} is exactly zero"
                    );
                }
            }
            Ok(())
        }
        WitnessDoc::Hensel(w) => check_hensel_witness(doc, &p, &diseqs, w),
    }
}

fn decode_all(polys: &[PolyDoc], prime: u64, arity: usize) -> std::result::Result<Vec<ExpPoly>, Reject> {
    polys
        .iter()
        .map(|f| {
            ensure!(
                f.terms.iter().all(|t| t.exponents.iter().all(|&e| e <= MAX_EXPONENT)
                    && t.coefficient.iter().all(|(w, _)| w.unsigned_abs() <= MAX_EXPONENT as u64)),
                "exponent or weight beyond {MAX_EXPONENT}"
            );
            let f = f.decode(prime)?;
            ensure!(f.arity() == arity, "polynomial of arity {} in arity {arity}", f.arity());
            Ok(f)
        })
        .collect()
}

fn check_ball(ball: &BallDoc, prime: u64, arity: usize, budget: &Budget) -> Check {
    ensure!(ball.center.len() == arity, "ball of arity {}", ball.center.len());
    ensure!(
        ball.radius <= budget.max_radius,
        "ball radius {} exceeds the budget",
        ball.radius
    );
    let q = prime_power(prime, ball.radius);
    for &c in &ball.center {
        ensure!(
            c >= 0 && BigInt::from(c) < q,
            "ball center {c} is not reduced modulo p^{}",
            ball.radius
        );
    }
    Ok(())
}

fn check_hensel_witness(
    doc: &CertificateDocument,
    p: &ExpPoly,
    diseqs: &[ExpPoly],
    w: &HenselWitnessDoc,
) -> Check {
    let (n, prime) = (p.arity(), p.prime());
    ensure!(n > 0, "Hensel witness over zero variables");
    let r = decode_all(std::slice::from_ref(&w.identity.multiplier), prime, n)?.remove(0);
    let members = decode_all(&w.identity.members, prime, n)?;
    let cofactors = decode_all(&w.identity.cofactors, prime, n)?;
    ensure!(members.len() == n, "{} members for {n} variables", members.len());
    ensure!(cofactors.len() == n, "{} cofactors for {n} members", cofactors.len());

    let mut rhs = ExpPoly::zero(n, prime);
    for (m, s) in members.iter().zip(&cofactors) {
        rhs = &rhs + &(m * s);
    }
    ensure!(&r * p == rhs, "cofactor identity does not expand");

    check_ball(&w.ball, prime, n, &doc.budget)?;
    let h = &w.hensel;
    let t = w.ball.radius;
    ensure!(h.slack == t, "slack {} differs from ball radius {t}", h.slack);
    ensure!(h.center.len() == n, "center of arity {}", h.center.len());
    let q = prime_power(prime, t);
    for (c, a) in h.center.iter().zip(&w.ball.center) {
        ensure!(
            (BigInt::from(*c) - a).mod_floor(&q) == BigInt::from(0),
            "center outside the ball"
        );
    }
    let height = h.center.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0);
    ensure!(
        height <= doc.budget.max_center_height as u64,
        "center height {height} exceeds the budget"
    );

    let system = ExpSystem::new(members.clone())?;
    let (start, cap) = (doc.budget.precision, doc.budget.hensel_precision_cap);
    let v = det_valuation(&system, &h.center, start, cap)?;
    ensure!(
        v == Some(h.det_valuation),
        "determinant valuation is {v:?}, not {}",
        h.det_valuation
    );
    let bound = 2 * h.det_valuation + t;
    let mut canonical = start;
    while canonical <= bound {
        canonical *= 2;
    }
    ensure!(
        h.precision_used == canonical && canonical <= cap,
        "precision {} is not the first doubling of {start} above {bound}",
        h.precision_used
    );
    let residuals = residual_valuations(&system, &h.center, h.precision_used)?;
    let recorded: Vec<Valuation> = h.residual_valuations.iter().map(|&v| v.into()).collect();
    ensure!(
        residuals == recorded,
        "residual valuations are {residuals:?}, not {recorded:?}"
    );
    ensure!(
        residuals.iter().all(|r| r.exceeds(bound)),
        "residuals do not exceed 2v + r = {bound}"
    );

    for earlier in centers_before(prime, &w.ball, &h.center) {
        let Some(v) = det_valuation(&system, &earlier, start, cap)? else {
            continue;
        };
        let res = residual_valuations(&system, &earlier, start)?;
        ensure!(
            !res.iter().all(|r| r.exceeds(2 * v + t)),
            "center {earlier:?} precedes {:?} and also qualifies",
            h.center
        );
    }

    ensure!(
        w.no_root_evidence.len() == 1 + diseqs.len(),
        "{} refutations for the multiplier and {} disequations",
        w.no_root_evidence.len(),
        diseqs.len()
    );
    for (e, f) in w.no_root_evidence.iter().zip(std::iter::once(&r).chain(diseqs)) {
        check_refutation(e, &w.ball, f, prime, &doc.budget)?;
    }
    Ok(())
}

fn point(center: &[i64], prime: u64, precision: u32) -> Vec<PadicInt> {
    center
        .iter()
        .map(|&c| PadicInt::new(prime, precision, c))
        .collect()
}

/// `v(det J(center))` found by doubling from `start` up to `cap`.
fn det_valuation(system: &ExpSystem, center: &[i64], start: u32, cap: u32) -> Result<Option<u32>> {
    let mut n = start;
    while n <= cap {
        let m = jacobian_matrix(system, &point(center, system.prime(), n))?;
        if let Valuation::Exact(v) = det_padic(&m, system.prime())?.valuation() {
            return Ok(Some(v));
        }
        n *= 2;
    }
    Ok(None)
}

fn residual_valuations(system: &ExpSystem, center: &[i64], precision: u32) -> Result<Vec<Valuation>> {
    let pt = point(center, system.prime(), precision);
    system
        .members()
        .iter()
        .map(|f| Ok(f.evaluate_at(&pt, precision)?.valuation()))
        .collect()
}

/// Integer points of the ball strictly before `center` in the order by
/// height `max |c_i|`, then lexicographically.
fn centers_before(prime: u64, ball: &BallDoc, center: &[i64]) -> Vec<Vec<i64>> {
    let h = center.iter().map(|c| c.abs()).max().unwrap_or(0);
    let q = prime_power(prime, ball.radius);
    let coords: Vec<Vec<i64>> = ball
        .center
        .iter()
        .map(|&a| {
            (-h..=h)
                .filter(|&c| (BigInt::from(c) - a).mod_floor(&q) == BigInt::from(0))
                .collect()
        })
        .collect();
    let mut all: Vec<Vec<i64>> = vec![Vec::new()];
    for cs in &coords {
        all = all
            .iter()
            .flat_map(|prefix| {
                cs.iter().map(move |&c| {
                    let mut v = prefix.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    let key = |v: &Vec<i64>| (v.iter().map(|c| c.abs()).max().unwrap_or(0), v.clone());
    let target = key(&center.to_vec());
    all.into_iter().filter(|v| key(v) < target).collect()
}

/// The first level `s >= t` at which no residue modulo `p^(s+1)` in the ball
/// is a common zero of `system` modulo `p^(s+1)`, searching up to `max`.
fn first_refuted_level(system: &[ExpPoly], ball: &BallDoc, prime: u64, max: u32) -> Result<Option<u32>> {
    let n = ball.center.len();
    let mut survivors: Vec<Vec<BigInt>> = vec![ball.center.iter().map(|&c| BigInt::from(c)).collect()];
    for level in ball.radius..=max {
        let step = prime_power(prime, level);
        let mut next = Vec::new();
        for b in &survivors {
            for code in 0..prime.pow(n as u32) {
                let mut digits = code;
                let lifted: Vec<BigInt> = b
                    .iter()
                    .map(|c| {
                        let k = digits % prime;
                        digits /= prime;
                        c + &step * k
                    })
                    .collect();
                let pt: Vec<PadicInt> = lifted
                    .iter()
                    .map(|c| PadicInt::new(prime, level + 1, c.clone()))
                    .collect();
                let mut all_zero = true;
                for f in system {
                    if !f.evaluate_at(&pt, level + 1)?.is_zero() {
                        all_zero = false;
                        break;
                    }
                }
                if all_zero {
                    next.push(lifted);
                }
            }
        }
        if next.is_empty() {
            return Ok(Some(level));
        }
        survivors = next;
    }
    Ok(None)
}

fn check_refutation(
    r: &RefutationDoc,
    ball: &BallDoc,
    expected: &ExpPoly,
    prime: u64,
    budget: &Budget,
) -> Check {
    ensure!(r.ball == *ball, "refutation ball differs from the certificate ball");
    check_ball(&r.ball, prime, expected.arity(), budget)?;
    ensure!(r.level <= budget.max_level, "level {} exceeds the budget", r.level);
    let system = decode_all(&r.system, prime, expected.arity())?;
    ensure!(
        system.len() == 1 && system[0] == *expected,
        "refuted system is not the expected polynomial"
    );
    ensure!(r.level >= r.ball.radius, "level below the ball radius");
    let first = first_refuted_level(&system, &r.ball, prime, r.level)?;
    ensure!(
        first == Some(r.level),
        "level {} is not the first refuting level (replay: {first:?})",
        r.level
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::decide_existential;
    use crate::frontend::document::{CertificateDocument, ValuationDoc};

    fn emit(sentence: &str) -> CertificateDocument {
        let nf = normalize(&parse(sentence).unwrap(), 5).unwrap();
        let b = Budget::default();
        let v = decide_existential(&nf.to_engine(), &b).unwrap();
        CertificateDocument::new(sentence, 5, &b, &v, 0)
    }

    #[test]
    fn accepts_emitted_documents() {
        for s in ["x1*x1 = 6", "x1*x1 + 5 = 0", "x1 * x1 = 6 & x1 != 1", "E(x1) = 1", "x1 - x2 = 0"] {
            let d = emit(s);
            assert_ne!(d.verdict, "unknown", "{s}");
            assert_eq!(verify(&d).unwrap(), Verification::Accepted, "{s}");
        }
    }

    #[test]
    fn rejects_tampering() {
        let mut d = emit("x1*x1 = 6");
        let Payload::Sat(s) = &mut d.certificate else { panic!() };
        let WitnessDoc::Hensel(w) = &mut s.witness else { panic!() };
        w.hensel.residual_valuations[0] = match w.hensel.residual_valuations[0] {
            ValuationDoc::Exact(k) => ValuationDoc::Exact(k - 1),
            ValuationDoc::AtLeast(k) => ValuationDoc::AtLeast(k - 1),
        };
        assert!(!verify(&d).unwrap().is_accepted());

        let mut d = emit("x1*x1 + 5 = 0");
        let Payload::Unsat(u) = &mut d.certificate else { panic!() };
        assert_eq!(u.refutations[0].level, 1);
        u.refutations[0].level = 0;
        assert!(!verify(&d).unwrap().is_accepted());

        let mut d = emit("x1*x1 + 5 = 0");
        d.verdict = "sat".into();
        assert!(!verify(&d).unwrap().is_accepted());
    }
}
