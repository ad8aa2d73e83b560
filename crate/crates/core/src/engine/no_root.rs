use log::debug;

use super::{Ball, Budget, UnsatCertificate};
use crate::error::Result;
use crate::exppoly::ExpSystem;
use crate::padic::ExpBase;
use crate::par;

/// State of an incremental refutation of a system on a ball.
///
/// Level `s` considers every residue `b mod p^(s+1)` in the ball and keeps the
/// survivors, where all members vanish modulo `p^(s+1)`. A root in the ball
/// reduces to a survivor at every level, and survivors at level `s+1` reduce
/// to survivors at level `s`, so each level only lifts the previous survivors.
#[derive(Clone, Debug)]
pub struct NoRootSearch {
    system: ExpSystem,
    ball: Ball,
    next_level: u32,
    max_level: u32,
    survivors: Vec<Vec<i64>>,
    steps: u64,
    max_steps: u64,
    out_of_steps: bool,
    status: Status,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Status {
    Open,
    Refuted(u32),
    Exhausted,
}

/// Outcome of advancing a [`NoRootSearch`] by one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LevelOutcome {
    Refuted(UnsatCertificate),
    Open,
    Exhausted,
}

impl NoRootSearch {
    pub fn new(system: &ExpSystem, ball: &Ball, max_level: u32, max_steps: u64) -> Self {
        NoRootSearch {
            system: system.clone(),
            ball: ball.clone(),
            next_level: ball.radius(),
            max_level,
            survivors: vec![ball.center().to_vec()],
            steps: 0,
            max_steps,
            out_of_steps: false,
            status: Status::Open,
        }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Whether the search stopped on its step budget rather than its level cap.
    pub fn out_of_steps(&self) -> bool {
        self.out_of_steps
    }

    /// Highest level fully processed, if any.
    pub fn levels_done(&self) -> Option<u32> {
        self.next_level.checked_sub(1).filter(|&l| l >= self.ball.radius())
    }

    fn certificate(&self, level: u32) -> UnsatCertificate {
        UnsatCertificate {
            ball: self.ball.clone(),
            level,
            system: self.system.clone(),
        }
    }

    /// Processes the next level.
    pub fn step_level(&mut self) -> Result<LevelOutcome> {
        match self.status {
            Status::Refuted(s) => return Ok(LevelOutcome::Refuted(self.certificate(s))),
            Status::Exhausted => return Ok(LevelOutcome::Exhausted),
            Status::Open => {}
        }
        let s = self.next_level;
        let p = self.system.prime();
        let n = self.system.arity();
        let lifts = (p as u128).pow(n as u32);
        let count = self.survivors.len() as u128 * lifts;
        if s > self.max_level || self.steps as u128 + count > self.max_steps as u128 {
            self.out_of_steps = s <= self.max_level;
            self.status = Status::Exhausted;
            return Ok(LevelOutcome::Exhausted);
        }
        self.steps += count as u64;
        let step = (p as i64).pow(s);
        let mut candidates = Vec::with_capacity(count as usize);
        for b in &self.survivors {
            for k in 0..lifts as u64 {
                let mut digits = k;
                let mut c = b.clone();
                for ci in c.iter_mut() {
                    *ci += step * (digits % p) as i64;
                    digits /= p;
                }
                candidates.push(c);
            }
        }
        let base = ExpBase::new(p, s + 1);
        let system = &self.system;
        let keep = par::map(&candidates, |b| -> Result<bool> {
            for f in system.members() {
                if f.value_at_integer(b, &base)? != num_bigint::BigInt::from(0) {
                    return Ok(false);
                }
            }
            Ok(true)
        });
        let mut survivors = Vec::new();
        for (b, k) in candidates.into_iter().zip(keep) {
            if k? {
                survivors.push(b);
            }
        }
        debug!("level {s}: {} survivors", survivors.len());
        self.survivors = survivors;
        self.next_level = s + 1;
        if self.survivors.is_empty() {
            self.status = Status::Refuted(s);
            return Ok(LevelOutcome::Refuted(self.certificate(s)));
        }
        Ok(LevelOutcome::Open)
    }

    /// Runs until refuted or out of budget.
    pub fn run(&mut self) -> Result<Option<UnsatCertificate>> {
        loop {
            match self.step_level()? {
                LevelOutcome::Refuted(c) => return Ok(Some(c)),
                LevelOutcome::Exhausted => return Ok(None),
                LevelOutcome::Open => {}
            }
        }
    }
}

/// Refutes `system` on `ball` at the smallest level `s <= budget.max_level`
/// where every residue modulo `p^(s+1)` in the ball leaves some member nonzero.
pub fn no_root_search(
    system: &ExpSystem,
    ball: &Ball,
    budget: &Budget,
) -> Result<Option<UnsatCertificate>> {
    NoRootSearch::new(system, ball, budget.max_level, budget.max_steps).run()
}
