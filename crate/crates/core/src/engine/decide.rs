use log::info;

use super::driver::{Driver, DriverOutcome};
use super::no_root::{LevelOutcome, NoRootSearch};
use super::{poly_system, Ball, Budget, Progress, SatCertificate, UnsatCertificate, Verdict};
use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;

/// One disjunct of a normalized sentence: `equation = 0` and every disequation `!= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disjunct {
    pub equation: ExpPoly,
    pub disequations: Vec<ExpPoly>,
}

enum Race {
    Sat(SatCertificate),
    Unsat(UnsatCertificate),
    Unknown,
}

/// Alternates one refutation level with one driver size until one side
/// produces a certificate or both run out of budget. A refutation found in
/// the same slice as an existence certificate wins.
fn race(d: &Disjunct, budget: &Budget, refute: bool, progress: &mut Progress) -> Result<Race> {
    let arity = d.equation.arity();
    let mut refuter = refute.then(|| {
        NoRootSearch::new(
            &poly_system(&d.equation),
            &Ball::whole(arity),
            budget.max_level,
            budget.max_steps,
        )
    });
    let mut driver = Driver::new(&d.equation, &d.disequations, budget)?;
    let mut driver_open = true;
    let outcome = loop {
        let mut refuter_open = false;
        if let Some(r) = refuter.as_mut() {
            match r.step_level()? {
                LevelOutcome::Refuted(c) => break Race::Unsat(c),
                LevelOutcome::Open => refuter_open = true,
                LevelOutcome::Exhausted => {}
            }
        }
        if driver_open {
            match driver.run_size()? {
                DriverOutcome::Found(c) => break Race::Sat(c),
                DriverOutcome::Continue => {}
                DriverOutcome::Exhausted => driver_open = false,
            }
        }
        if !refuter_open && !driver_open {
            break Race::Unknown;
        }
    };
    if let Some(r) = &refuter {
        progress.refutation_steps += r.steps();
        progress.levels_completed = progress
            .levels_completed
            .max(r.levels_done().map_or(0, |l| l + 1));
    }
    progress.existence_steps += driver.meter.steps;
    progress.identities_checked += driver.meter.identities;
    progress.centers_probed += driver.meter.probes;
    progress.nodes_visited += driver.nodes_visited();
    progress.sizes_completed = progress.sizes_completed.max(driver.sizes_completed());
    Ok(outcome)
}

/// Decides `exists x. P(x) = 0` within the budget.
pub fn decide_positive(p: &ExpPoly, budget: &Budget) -> Result<Verdict> {
    decide_existential(
        &[Disjunct {
            equation: p.clone(),
            disequations: Vec::new(),
        }],
        budget,
    )
}

/// Decides a disjunction of systems. Any satisfiable disjunct gives Sat; Unsat
/// is reported only when every disjunct is disequation-free and its equation
/// is refuted on the whole space.
pub fn decide_existential(disjuncts: &[Disjunct], budget: &Budget) -> Result<Verdict> {
    budget.validate()?;
    if disjuncts.is_empty() {
        return Err(Error::Usage("no disjuncts to decide".into()));
    }
    let mut progress = Progress::default();
    let mut refutations = Vec::new();
    let mut all_refuted = true;
    for (i, d) in disjuncts.iter().enumerate() {
        let refute = d.disequations.is_empty();
        match race(d, budget, refute, &mut progress)? {
            Race::Sat(certificate) => {
                info!("disjunct {i}: sat");
                return Ok(Verdict::Sat {
                    disjunct: i,
                    certificate,
                });
            }
            Race::Unsat(c) => {
                info!("disjunct {i}: refuted at level {}", c.level);
                refutations.push(c);
            }
            Race::Unknown => {
                info!("disjunct {i}: unknown");
                all_refuted = false;
            }
        }
        if !refute {
            all_refuted = false;
        }
    }
    if all_refuted {
        Ok(Verdict::Unsat(refutations))
    } else {
        Ok(Verdict::Unknown(progress))
    }
}
