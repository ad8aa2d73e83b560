use std::collections::BTreeMap;
use std::time::Instant;

use log::info;
use num_bigint::BigInt;

use super::config::Config;
use super::document::CertificateDocument;
use super::normalize::{atom_polynomial, normalize};
use super::parse::{parse, parse_term, Relation, Term};
use crate::engine::{decide_existential, decide_positive, no_root_search, Ball, UnsatCertificate};
use crate::error::{Error, Result};
use crate::exppoly::ExpSystem;
use crate::hensel::{check_hensel, newton_lift, HenselCertificate, LiftResult};
use crate::padic::{ep_exp, PadicInt};

pub const EXIT_SAT: i32 = 0;
pub const EXIT_UNSAT: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;

/// Process exit status for an error; always above the verdict codes.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Io(_) | Error::Usage(_) => 3,
        Error::Syntax { .. } | Error::UnknownIdentifier { .. } | Error::Unsupported(_) => 4,
        Error::Format(_) => 5,
        Error::Domain(_) | Error::Internal(_) => 6,
    }
}

/// Exit status for a document's verdict.
pub fn verdict_exit_code(doc: &CertificateDocument) -> i32 {
    match doc.verdict.as_str() {
        "sat" => EXIT_SAT,
        "unsat" => EXIT_UNSAT,
        _ => EXIT_UNKNOWN,
    }
}

/// Parses, normalizes and decides a sentence, producing its certificate document.
pub fn run_decide(sentence: &str, config: &Config) -> Result<CertificateDocument> {
    config.validate()?;
    let started = Instant::now();
    let nf = normalize(&parse(sentence)?, config.prime)?;
    info!(
        "{} disjunct(s) over {} variable(s)",
        nf.disjuncts.len(),
        nf.arity()
    );
    let disjuncts = nf.to_engine();
    let verdict = if disjuncts.len() == 1 && !nf.has_disequations() {
        decide_positive(&disjuncts[0].equation, &config.budget)?
    } else {
        decide_existential(&disjuncts, &config.budget)?
    };
    info!("verdict: {}", verdict.label());
    let elapsed = started.elapsed().as_millis() as u64;
    Ok(CertificateDocument::new(
        sentence,
        config.prime,
        &config.budget,
        &verdict,
        elapsed,
    ))
}

fn eval_padic(term: &Term, point: &BTreeMap<u32, BigInt>, prime: u64, n: u32) -> Result<PadicInt> {
    let rec = |t: &Term| eval_padic(t, point, prime, n);
    match term {
        Term::Int(v) => Ok(PadicInt::new(prime, n, v.clone())),
        Term::Var(i) => point
            .get(i)
            .map(|v| PadicInt::new(prime, n, v.clone()))
            .ok_or_else(|| Error::Usage(format!("no value given for x{i}"))),
        Term::Neg(t) => Ok(rec(t)?.neg()),
        Term::Add(a, b) => rec(a)?.add(&rec(b)?),
        Term::Sub(a, b) => rec(a)?.sub(&rec(b)?),
        Term::Mul(a, b) => rec(a)?.mul(&rec(b)?),
        Term::Exp(t) => Ok(ep_exp(&rec(t)?)),
    }
}

/// Value of a term modulo `p^precision` at the given assignment.
pub fn eval_term(
    text: &str,
    point: &BTreeMap<u32, BigInt>,
    prime: u64,
    precision: u32,
) -> Result<PadicInt> {
    eval_padic(&parse_term(text)?, point, prime, precision)
}

/// The members of a single conjunction of equations, unsquashed, over the
/// variables it mentions in increasing index order.
pub fn equation_system(text: &str, prime: u64) -> Result<(Vec<u32>, ExpSystem)> {
    let ast = parse(text)?;
    let [clause] = ast.clauses.as_slice() else {
        return Err(Error::Usage("expected a single conjunction of equations".into()));
    };
    let members = clause
        .iter()
        .map(|a| {
            if a.relation != Relation::Eq {
                return Err(Error::Usage("expected equations only".into()));
            }
            atom_polynomial(&a.lhs, &a.rhs, &ast.variables, prime)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((ast.variables.clone(), ExpSystem::new(members)?))
}

/// Refutes a system of equations on the ball `center + p^radius`.
pub fn run_no_root(
    text: &str,
    center: &[i64],
    radius: u32,
    config: &Config,
) -> Result<Option<UnsatCertificate>> {
    config.validate()?;
    let (_, system) = equation_system(text, config.prime)?;
    if center.len() != system.arity() {
        return Err(Error::Usage(format!(
            "ball center of length {} for {} variable(s)",
            center.len(),
            system.arity()
        )));
    }
    let ball = Ball::new(config.prime, center, radius)?;
    no_root_search(&system, &ball, &config.budget)
}

/// Checks the Hensel condition for a square system at an integer center and
/// lifts the root to `target` digits.
pub fn run_lift(
    text: &str,
    center: &[i64],
    slack: u32,
    target: u32,
    config: &Config,
) -> Result<Option<(HenselCertificate, LiftResult)>> {
    config.validate()?;
    let (_, system) = equation_system(text, config.prime)?;
    let b = &config.budget;
    let Some(cert) = check_hensel(&system, center, slack, b.precision, b.hensel_precision_cap)?
    else {
        return Ok(None);
    };
    let lift = newton_lift(&cert, target)?;
    Ok(Some((cert, lift)))
}
