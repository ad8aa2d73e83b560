use std::collections::{HashMap, HashSet};
use std::ops::ControlFlow;

use log::debug;

use super::cofactor::{identity_pool, visit_new_tuples, CofactorIdentity};
use super::no_root::NoRootSearch;
use super::{poly_system, Ball, Budget, HenselWitness, SatCertificate, SatKind, UnsatCertificate};
use crate::error::{Error, Result};
use crate::exppoly::{ExpPoly, ExpSystem};
use crate::hensel::{HenselCertificate, HenselChecker};
use crate::padic::prime_power;
use crate::par;

/// Integer points of `ball` with every coordinate in `[-height, height]`, in
/// fair order: by height `max |c_i|`, then lexicographically.
pub fn fair_centers(prime: u64, ball: &Ball, height: u32) -> Vec<Vec<i64>> {
    let q = prime_power(prime, ball.radius());
    let q = i64::try_from(q).unwrap_or(i64::MAX);
    let h = height as i64;
    let per_coord: Vec<Vec<i64>> = ball
        .center()
        .iter()
        .map(|&a| {
            let first = a - ((a + h) / q) * q;
            let mut v = Vec::new();
            let mut c = first;
            while c <= h {
                if c >= -h {
                    v.push(c);
                }
                c = match c.checked_add(q) {
                    Some(c) => c,
                    None => break,
                };
            }
            v
        })
        .collect();
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for coords in &per_coord {
        let mut next = Vec::with_capacity(out.len() * coords.len());
        for prefix in &out {
            for &c in coords {
                let mut t = prefix.clone();
                t.push(c);
                next.push(t);
            }
        }
        out = next;
    }
    out.sort_by(|a, b| {
        let ha = a.iter().map(|c| c.unsigned_abs()).max();
        let hb = b.iter().map(|c| c.unsigned_abs()).max();
        ha.cmp(&hb).then_with(|| a.cmp(b))
    });
    out
}

/// The first Hensel certificate with slack `t` at an integer center in `ball`,
/// scanning centers in fair order up to the budget's center height.
pub fn hensel_scan(
    system: &ExpSystem,
    ball: &Ball,
    budget: &Budget,
) -> Result<Option<HenselCertificate>> {
    let checker = HenselChecker::new(system, budget.precision, budget.hensel_precision_cap)?;
    for c in fair_centers(system.prime(), ball, budget.max_center_height) {
        if let Some(cert) = checker.check(&c, ball.radius())? {
            return Ok(Some(cert));
        }
    }
    Ok(None)
}

struct Subsystem {
    checker: HenselChecker,
    slack: HashMap<Vec<i64>, Option<u32>>,
}

struct Stored {
    identity: CofactorIdentity,
    subsystem: usize,
}

pub(crate) enum SizeOutcome {
    Found(Box<HenselWitness>),
    Continue,
    Exhausted,
}

/// Counters shared by every search a driver runs.
#[derive(Clone, Debug, Default)]
pub(crate) struct Meter {
    pub steps: u64,
    pub max_steps: u64,
    pub identities: u64,
    pub probes: u64,
}

impl Meter {
    pub(crate) fn new(max_steps: u64) -> Self {
        Meter {
            max_steps,
            ..Default::default()
        }
    }

    fn tick(&mut self, n: u64) -> bool {
        if self.steps + n > self.max_steps {
            self.steps = self.max_steps;
            return false;
        }
        self.steps += n;
        true
    }
}

const PROBE_CHUNK: usize = 32;

/// Dovetailed search for a cofactor identity, a ball, a Hensel center in the
/// ball and refutations of `R` and every disequation on the ball.
pub(crate) struct ExistenceSearch {
    target: ExpPoly,
    disequations: Vec<ExpPoly>,
    budget: Budget,
    pool: Vec<ExpPoly>,
    bounds: Vec<usize>,
    identities: Vec<Stored>,
    subsystems: Vec<Subsystem>,
    subsystem_index: HashMap<Vec<ExpPoly>, usize>,
    dead: HashSet<(usize, Ball)>,
    evidence: HashMap<(ExpPoly, Ball), Option<UnsatCertificate>>,
    centers: HashMap<(Ball, u32), Vec<Vec<i64>>>,
    next_size: u32,
}

impl ExistenceSearch {
    pub(crate) fn new(target: &ExpPoly, disequations: &[ExpPoly], budget: &Budget) -> Result<Self> {
        if target.arity() == 0 {
            return Err(Error::Usage("existence search needs at least one variable".into()));
        }
        for d in disequations {
            target.try_add(d)?;
        }
        Ok(ExistenceSearch {
            target: target.clone(),
            disequations: disequations.to_vec(),
            budget: budget.clone(),
            pool: Vec::new(),
            bounds: Vec::new(),
            identities: Vec::new(),
            subsystems: Vec::new(),
            subsystem_index: HashMap::new(),
            dead: HashSet::new(),
            evidence: HashMap::new(),
            centers: HashMap::new(),
            next_size: 0,
        })
    }

    fn arity(&self) -> usize {
        self.target.arity()
    }

    fn prime(&self) -> u64 {
        self.target.prime()
    }

    /// Runs every size up to and including `k` not yet run.
    pub(crate) fn run_through(&mut self, k: u32, meter: &mut Meter) -> Result<SizeOutcome> {
        while self.next_size <= k {
            match self.run_size(self.next_size, meter)? {
                SizeOutcome::Continue => self.next_size += 1,
                other => return Ok(other),
            }
        }
        Ok(SizeOutcome::Continue)
    }

    fn run_size(&mut self, k: u32, meter: &mut Meter) -> Result<SizeOutcome> {
        let n = self.arity();
        let layer = identity_pool(
            n,
            self.prime(),
            self.budget.max_degree,
            self.budget.max_coeff_height,
            k,
        );
        let prev = self.bounds.last().copied().unwrap_or(0);
        self.pool.extend(layer.iter().cloned());
        self.bounds.push(self.pool.len());
        let cur = self.pool.len();

        let height = self.budget.center_height_at(self.prime(), k);
        let height_grew = k == 0 || height > self.budget.center_height_at(self.prime(), k - 1);

        // identities from earlier sizes: new radius, or new centers
        for j in 0..self.identities.len() {
            let radii: Vec<u32> = if height_grew {
                (0..=k.min(self.budget.max_radius)).collect()
            } else if k <= self.budget.max_radius {
                vec![k]
            } else {
                Vec::new()
            };
            if let Some(outcome) = self.try_radii(j, &radii, height, meter)? {
                return Ok(outcome);
            }
        }

        // slots: R, R_1..R_n, S_1..S_{n-1}
        let mut lo = vec![prev];
        let mut hi = vec![cur];
        let other_lo = if k == 0 { 0 } else { 1 + prev };
        for _ in 0..(2 * n - 1) {
            lo.push(other_lo);
            hi.push(1 + cur);
        }
        let radii: Vec<u32> = (0..=k.min(self.budget.max_radius)).collect();
        let mut result: Result<Option<SizeOutcome>> = Ok(None);
        let _ = visit_new_tuples::<()>(&lo, &hi, &mut |idx| {
            if !meter.tick(1) {
                result = Ok(Some(SizeOutcome::Exhausted));
                return ControlFlow::Break(());
            }
            let Some(id) = self.build_identity(idx) else {
                return ControlFlow::Continue(());
            };
            meter.identities += 1;
            let step = self
                .store(id)
                .and_then(|j| self.try_radii(j, &radii, height, meter));
            match step {
                Ok(None) => ControlFlow::Continue(()),
                other => {
                    result = other;
                    ControlFlow::Break(())
                }
            }
        });
        if let Some(outcome) = result? {
            return Ok(outcome);
        }
        debug!(
            "size {k}: {} identities, {} steps",
            self.identities.len(),
            meter.steps
        );
        Ok(SizeOutcome::Continue)
    }

    fn try_radii(
        &mut self,
        j: usize,
        radii: &[u32],
        height: u32,
        meter: &mut Meter,
    ) -> Result<Option<SizeOutcome>> {
        let n = self.arity();
        for &t in radii {
            let q = (self.prime() as i64).pow(t);
            let balls = q.pow(n as u32);
            for code in 0..balls {
                let mut c = Vec::with_capacity(n);
                let mut rest = code;
                for _ in 0..n {
                    c.push(rest % q);
                    rest /= q;
                }
                c.reverse();
                let ball = Ball::new(self.prime(), &c, t)?;
                match self.try_ball(j, &ball, height, meter)? {
                    BallOutcome::Found(w) => return Ok(Some(SizeOutcome::Found(w))),
                    BallOutcome::Exhausted => return Ok(Some(SizeOutcome::Exhausted)),
                    BallOutcome::Nothing => {}
                }
            }
        }
        Ok(None)
    }

    fn slot_poly(&self, idx: usize, first: Option<&ExpPoly>) -> Option<ExpPoly> {
        match (idx, first) {
            (0, Some(p)) => Some(p.clone()),
            (0, None) => None,
            (i, _) => Some(self.pool[i - 1].clone()),
        }
    }

    fn build_identity(&self, idx: &[usize]) -> Option<CofactorIdentity> {
        let n = self.arity();
        let (p, prime) = (&self.target, self.prime());
        let r = self.pool[idx[0]].clone();
        let member_idx = &idx[1..=n];
        if member_idx.windows(2).any(|w| w[0] >= w[1]) {
            return None;
        }
        let members: Vec<ExpPoly> = member_idx
            .iter()
            .map(|&i| self.slot_poly(i, Some(p)).expect("member slot"))
            .collect();
        if members
            .iter()
            .any(|m| m.total_degree() == 0 || *m == r)
        {
            return None;
        }
        let mut cofactors: Vec<ExpPoly> = idx[n + 1..]
            .iter()
            .map(|&i| self.slot_poly(i, None).unwrap_or_else(|| ExpPoly::zero(n, prime)))
            .collect();
        let mut rest = r.try_mul(p).ok()?;
        for (m, s) in members.iter().zip(&cofactors) {
            rest = rest.try_sub(&m.try_mul(s).ok()?).ok()?;
        }
        let last = members.last().expect("n >= 1");
        let s_last = if last.is_integral() {
            rest.div_exact(last).ok()??
        } else if cofactors.iter().all(ExpPoly::is_zero) && last == p {
            r.clone()
        } else {
            return None;
        };
        cofactors.push(s_last);
        Some(CofactorIdentity {
            multiplier: r,
            members,
            cofactors,
        })
    }

    fn store(&mut self, identity: CofactorIdentity) -> Result<usize> {
        let key = identity.members.clone();
        let subsystem = match self.subsystem_index.get(&key) {
            Some(&i) => i,
            None => {
                let system = ExpSystem::new(key.clone())?;
                let checker = HenselChecker::new(
                    &system,
                    self.budget.precision,
                    self.budget.hensel_precision_cap,
                )?;
                self.subsystems.push(Subsystem {
                    checker,
                    slack: HashMap::new(),
                });
                self.subsystem_index.insert(key, self.subsystems.len() - 1);
                self.subsystems.len() - 1
            }
        };
        self.identities.push(Stored {
            identity,
            subsystem,
        });
        Ok(self.identities.len() - 1)
    }

    fn first_center(
        &mut self,
        subsystem: usize,
        ball: &Ball,
        height: u32,
        meter: &mut Meter,
    ) -> Result<Option<Option<Vec<i64>>>> {
        let prime = self.prime();
        let centers = self
            .centers
            .entry((ball.clone(), height))
            .or_insert_with(|| fair_centers(prime, ball, height))
            .clone();
        let t = ball.radius();
        let sub = &mut self.subsystems[subsystem];
        let mut i = 0;
        while i < centers.len() {
            let chunk_end = (i + PROBE_CHUNK).min(centers.len());
            let missing: Vec<Vec<i64>> = centers[i..chunk_end]
                .iter()
                .filter(|c| !sub.slack.contains_key(*c))
                .cloned()
                .collect();
            if !missing.is_empty() {
                if !meter.tick(missing.len() as u64) {
                    return Ok(None);
                }
                meter.probes += missing.len() as u64;
                let checker = &sub.checker;
                let results = par::map(&missing, |c| checker.probe(c).map(|p| p.max_slack()));
                for (c, r) in missing.into_iter().zip(results) {
                    sub.slack.insert(c, r?);
                }
            }
            for c in &centers[i..chunk_end] {
                if matches!(sub.slack[c], Some(s) if s >= t) {
                    return Ok(Some(Some(c.clone())));
                }
            }
            i = chunk_end;
        }
        Ok(Some(None))
    }

    fn refute(
        &mut self,
        f: &ExpPoly,
        ball: &Ball,
        meter: &mut Meter,
    ) -> Result<Option<Option<UnsatCertificate>>> {
        let key = (f.clone(), ball.clone());
        if let Some(r) = self.evidence.get(&key) {
            return Ok(Some(r.clone()));
        }
        let allowance = meter.max_steps - meter.steps;
        let mut search = NoRootSearch::new(&poly_system(f), ball, self.budget.max_level, allowance);
        let result = search.run()?;
        meter.tick(search.steps());
        if search.out_of_steps() {
            meter.steps = meter.max_steps;
            return Ok(None);
        }
        self.evidence.insert(key, result.clone());
        Ok(Some(result))
    }

    fn try_ball(
        &mut self,
        j: usize,
        ball: &Ball,
        height: u32,
        meter: &mut Meter,
    ) -> Result<BallOutcome> {
        if self.dead.contains(&(j, ball.clone())) {
            return Ok(BallOutcome::Nothing);
        }
        let subsystem = self.identities[j].subsystem;
        let center = match self.first_center(subsystem, ball, height, meter)? {
            None => return Ok(BallOutcome::Exhausted),
            Some(None) => return Ok(BallOutcome::Nothing),
            Some(Some(c)) => c,
        };
        let mut evidence = Vec::new();
        let checks: Vec<ExpPoly> = std::iter::once(self.identities[j].identity.multiplier.clone())
            .chain(self.disequations.iter().cloned())
            .collect();
        for f in &checks {
            match self.refute(f, ball, meter)? {
                None => return Ok(BallOutcome::Exhausted),
                Some(None) => {
                    self.dead.insert((j, ball.clone()));
                    return Ok(BallOutcome::Nothing);
                }
                Some(Some(cert)) => evidence.push(cert),
            }
        }
        let hensel = self.subsystems[subsystem]
            .checker
            .check(&center, ball.radius())?
            .ok_or_else(|| Error::Internal("probe and Hensel check disagree".into()))?;
        Ok(BallOutcome::Found(Box::new(HenselWitness {
            identity: self.identities[j].identity.clone(),
            hensel,
            ball: ball.clone(),
            no_root_evidence: evidence,
        })))
    }
}

enum BallOutcome {
    Found(Box<HenselWitness>),
    Nothing,
    Exhausted,
}

/// Searches for a Hensel-type existence certificate for `target = 0` together
/// with `disequations != 0`, without linear substitutions.
pub fn existence_search(
    target: &ExpPoly,
    disequations: &[ExpPoly],
    budget: &Budget,
) -> Result<Option<SatCertificate>> {
    let mut search = ExistenceSearch::new(target, disequations, budget)?;
    let mut meter = Meter::new(budget.max_steps);
    match search.run_through(budget.max_size(target.prime()), &mut meter)? {
        SizeOutcome::Found(w) => Ok(Some(SatCertificate {
            chain: Vec::new(),
            kind: SatKind::Hensel(w),
        })),
        _ => Ok(None),
    }
}
