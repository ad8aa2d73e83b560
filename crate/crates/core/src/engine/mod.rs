//! Budgeted semi-decision procedures: exhaustive residue refutation on balls,
//! cofactor-identity search with Hensel certificates, the linear-relation
//! driver and the race between them.

mod cofactor;
mod decide;
mod driver;
mod existence;
mod no_root;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exppoly::{ExpPoly, ExpSystem, LinearRelation};
use crate::hensel::{HenselCertificate, DEFAULT_PRECISION_CAP};
use crate::padic::prime_power;

pub use cofactor::{identity_pool, verify_cofactor, CofactorIdentity};
pub use decide::{decide_existential, decide_positive, Disjunct};
pub use driver::linear_relation_driver;
pub use existence::{existence_search, fair_centers, hensel_scan};
pub use no_root::{no_root_search, LevelOutcome, NoRootSearch};

/// Search limits. Every enumeration is bounded by one of these fields.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budget {
    /// Total degree of pool polynomials in cofactor identities.
    pub max_degree: u32,
    /// Coefficient height of pool polynomials and linear relations.
    pub max_coeff_height: u32,
    /// Height of integer Hensel centers.
    pub max_center_height: u32,
    /// Largest ball radius exponent `t`.
    pub max_radius: u32,
    /// Largest residue level `s` in refutations.
    pub max_level: u32,
    /// Enumeration ticks per search side.
    pub max_steps: u64,
    /// Starting precision for Hensel checks.
    pub precision: u32,
    /// Precision cap for Hensel escalation.
    pub hensel_precision_cap: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_degree: 1,
            max_coeff_height: 2,
            max_center_height: 64,
            max_radius: 2,
            max_level: 8,
            max_steps: 4000,
            precision: 32,
            hensel_precision_cap: DEFAULT_PRECISION_CAP,
        }
    }
}

impl Budget {
    pub fn validate(&self) -> Result<()> {
        if self.precision == 0 || self.precision > self.hensel_precision_cap {
            return Err(Error::Config(format!(
                "precision {} must be in 1..={}",
                self.precision, self.hensel_precision_cap
            )));
        }
        Ok(())
    }

    /// Center height admitted at dovetail size `k`: enough to cover every
    /// residue class modulo `p^(k+1)`, capped by the budget.
    pub fn center_height_at(&self, prime: u64, k: u32) -> u32 {
        let cover = prime
            .checked_pow(k + 1)
            .map(|q| (q - 1) / 2)
            .unwrap_or(u64::MAX);
        cover.min(self.max_center_height as u64) as u32
    }

    /// Last dovetail size at which some dimension still grows.
    pub fn max_size(&self, prime: u64) -> u32 {
        let mut k_center = 0;
        while self.center_height_at(prime, k_center) < self.max_center_height {
            k_center += 1;
        }
        self.max_degree
            .max(self.max_coeff_height.saturating_sub(1))
            .max(self.max_radius)
            .max(k_center)
    }
}

/// The ball `center + p^t Z_p^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ball {
    center: Vec<i64>,
    radius: u32,
}

impl Ball {
    /// Reduces the center modulo `p^t`.
    pub fn new(prime: u64, center: &[i64], radius: u32) -> Result<Self> {
        let q = prime_power(prime, radius);
        let center = center
            .iter()
            .map(|&c| {
                i64::try_from(BigInt::from(c).mod_floor(&q))
                    .map_err(|_| Error::Usage("ball radius too large".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Ball { center, radius })
    }

    pub fn whole(arity: usize) -> Self {
        Ball {
            center: vec![0; arity],
            radius: 0,
        }
    }

    pub fn center(&self) -> &[i64] {
        &self.center
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn arity(&self) -> usize {
        self.center.len()
    }

    /// Whether the integer point lies in the ball.
    pub fn contains(&self, prime: u64, point: &[i64]) -> bool {
        let q = prime_power(prime, self.radius);
        point.len() == self.center.len()
            && point
                .iter()
                .zip(&self.center)
                .all(|(&a, &c)| (BigInt::from(a) - c).mod_floor(&q) == BigInt::from(0))
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.center.iter().map(i64::to_string).collect();
        write!(f, "({}) + p^{}", c.join(", "), self.radius)
    }
}

/// Every point of the ball has some member nonzero modulo `p^(level+1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnsatCertificate {
    pub ball: Ball,
    pub level: u32,
    pub system: ExpSystem,
}

/// Existence of a root, either through Hensel data or an exact zero after
/// linear substitutions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatCertificate {
    /// Relations applied in order, each over the arity left by the previous one.
    pub chain: Vec<LinearRelation>,
    pub kind: SatKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatKind {
    Hensel(Box<HenselWitness>),
    /// The fully substituted equation is the zero constant.
    ExactZero,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HenselWitness {
    pub identity: CofactorIdentity,
    pub hensel: HenselCertificate,
    pub ball: Ball,
    /// Refutation of `R` on the ball, then of each disequation.
    pub no_root_evidence: Vec<UnsatCertificate>,
}

impl HenselWitness {
    /// The square subsystem `R_1..R_n`.
    pub fn subsystem(&self) -> &ExpSystem {
        self.hensel.system()
    }
}

/// Progress counters reported with every verdict.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Progress {
    pub existence_steps: u64,
    pub refutation_steps: u64,
    pub sizes_completed: u32,
    pub levels_completed: u32,
    pub identities_checked: u64,
    pub centers_probed: u64,
    pub nodes_visited: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Sat {
        disjunct: usize,
        certificate: SatCertificate,
    },
    /// One refutation of the equation part of each disjunct.
    Unsat(Vec<UnsatCertificate>),
    Unknown(Progress),
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Sat { .. } => "sat",
            Verdict::Unsat(_) => "unsat",
            Verdict::Unknown(_) => "unknown",
        }
    }
}

pub(crate) fn poly_system(f: &ExpPoly) -> ExpSystem {
    ExpSystem::new(vec![f.clone()]).expect("a single member is a valid system")
}
