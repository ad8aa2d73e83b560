//! JSON certificate documents. Field order is fixed by declaration order, big
//! integers are decimal strings and polynomial terms are listed in increasing
//! monomial order, so equal verdicts serialize to identical bytes.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::engine::{Ball, Budget, Progress, SatKind, UnsatCertificate, Verdict};
use crate::error::{Error, Result};
use crate::exppoly::{ExpCombination, ExpPoly, LinearRelation};
use crate::padic::Valuation;

pub const FORMAT: &str = "padic-exp-certificate/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDocument {
    pub format: String,
    pub tool_version: String,
    pub sentence: String,
    pub prime: u64,
    pub budget: Budget,
    pub verdict: String,
    pub certificate: Payload,
    /// Not covered by determinism; everything else is.
    pub wall_time_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Payload {
    Sat(SatDoc),
    Unsat(UnsatDoc),
    Unknown(Progress),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SatDoc {
    pub disjunct: usize,
    pub chain: Vec<RelationDoc>,
    pub witness: WitnessDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum WitnessDoc {
    ExactZero,
    Hensel(Box<HenselWitnessDoc>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HenselWitnessDoc {
    pub identity: IdentityDoc,
    pub ball: BallDoc,
    pub hensel: HenselDoc,
    pub no_root_evidence: Vec<RefutationDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityDoc {
    pub multiplier: PolyDoc,
    pub members: Vec<PolyDoc>,
    pub cofactors: Vec<PolyDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HenselDoc {
    pub center: Vec<i64>,
    pub slack: u32,
    pub det_valuation: u32,
    pub residual_valuations: Vec<ValuationDoc>,
    pub precision_used: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ValuationDoc {
    Exact(u32),
    AtLeast(u32),
}

impl From<Valuation> for ValuationDoc {
    fn from(v: Valuation) -> Self {
        match v {
            Valuation::Exact(k) => ValuationDoc::Exact(k),
            Valuation::AtLeast(n) => ValuationDoc::AtLeast(n),
        }
    }
}

impl From<ValuationDoc> for Valuation {
    fn from(v: ValuationDoc) -> Self {
        match v {
            ValuationDoc::Exact(k) => Valuation::Exact(k),
            ValuationDoc::AtLeast(n) => Valuation::AtLeast(n),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallDoc {
    pub center: Vec<i64>,
    pub radius: u32,
}

impl From<&Ball> for BallDoc {
    fn from(b: &Ball) -> Self {
        BallDoc {
            center: b.center().to_vec(),
            radius: b.radius(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefutationDoc {
    pub ball: BallDoc,
    pub level: u32,
    pub system: Vec<PolyDoc>,
}

impl From<&UnsatCertificate> for RefutationDoc {
    fn from(c: &UnsatCertificate) -> Self {
        RefutationDoc {
            ball: BallDoc::from(&c.ball),
            level: c.level,
            system: c.system.members().iter().map(PolyDoc::from).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnsatDoc {
    /// One refutation per disjunct, in order.
    pub refutations: Vec<RefutationDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationDoc {
    pub coefficients: Vec<i64>,
    pub constant: i64,
    pub eliminated: usize,
}

impl From<&LinearRelation> for RelationDoc {
    fn from(r: &LinearRelation) -> Self {
        RelationDoc {
            coefficients: r.coefficients().to_vec(),
            constant: r.constant(),
            eliminated: r.eliminated(),
        }
    }
}

impl RelationDoc {
    pub fn decode(&self) -> Result<LinearRelation> {
        LinearRelation::from_parts(self.coefficients.clone(), self.constant, self.eliminated)
    }
}

/// Sparse polynomial: each term is an exponent tuple `(a_1..a_n, b_1..b_n)`
/// and a coefficient given as `[weight, decimal]` pairs for `sum c_j E(j)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyDoc {
    pub arity: usize,
    pub terms: Vec<TermDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub exponents: Vec<u32>,
    pub coefficient: Vec<(i64, String)>,
}

impl From<&ExpPoly> for PolyDoc {
    fn from(f: &ExpPoly) -> Self {
        PolyDoc {
            arity: f.arity(),
            terms: f
                .terms()
                .map(|(m, c)| TermDoc {
                    exponents: m.exponents().to_vec(),
                    coefficient: c.iter().map(|(w, a)| (w, a.to_string())).collect(),
                })
                .collect(),
        }
    }
}

impl PolyDoc {
    /// Decodes a polynomial in canonical form: terms strictly increasing,
    /// weights strictly increasing, no zero coefficients.
    pub fn decode(&self, prime: u64) -> Result<ExpPoly> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if t.coefficient.is_empty() {
                return Err(Error::Format("term with an empty coefficient".into()));
            }
            if t.coefficient.windows(2).any(|w| w[0].0 >= w[1].0) {
                return Err(Error::Format("coefficient weights not strictly increasing".into()));
            }
            let mut c = ExpCombination::zero();
            for (w, a) in &t.coefficient {
                let a: BigInt = a
                    .parse()
                    .map_err(|_| Error::Format(format!("`{a}` is not a decimal integer")))?;
                if a == BigInt::from(0) {
                    return Err(Error::Format("zero coefficient in a term".into()));
                }
                c.add_term(*w, a);
            }
            terms.push((t.exponents.clone(), c));
        }
        let f = ExpPoly::from_terms(self.arity, prime, terms)?;
        if PolyDoc::from(&f) != *self {
            return Err(Error::Format("polynomial terms are not in canonical order".into()));
        }
        Ok(f)
    }
}

fn sat_doc(disjunct: usize, cert: &crate::engine::SatCertificate) -> SatDoc {
    let witness = match &cert.kind {
        SatKind::ExactZero => WitnessDoc::ExactZero,
        SatKind::Hensel(w) => {
            let h = &w.hensel;
            WitnessDoc::Hensel(Box::new(HenselWitnessDoc {
                identity: IdentityDoc {
                    multiplier: PolyDoc::from(&w.identity.multiplier),
                    members: w.identity.members.iter().map(PolyDoc::from).collect(),
                    cofactors: w.identity.cofactors.iter().map(PolyDoc::from).collect(),
                },
                ball: BallDoc::from(&w.ball),
                hensel: HenselDoc {
                    center: h.center().to_vec(),
                    slack: h.slack(),
                    det_valuation: h.det_valuation(),
                    residual_valuations: h
                        .residual_valuations()
                        .iter()
                        .map(|&v| v.into())
                        .collect(),
                    precision_used: h.precision_used(),
                },
                no_root_evidence: w.no_root_evidence.iter().map(RefutationDoc::from).collect(),
            }))
        }
    };
    SatDoc {
        disjunct,
        chain: cert.chain.iter().map(RelationDoc::from).collect(),
        witness,
    }
}

impl Payload {
    pub fn from_verdict(verdict: &Verdict) -> Self {
        match verdict {
            Verdict::Sat {
                disjunct,
                certificate,
            } => Payload::Sat(sat_doc(*disjunct, certificate)),
            Verdict::Unsat(cs) => Payload::Unsat(UnsatDoc {
                refutations: cs.iter().map(RefutationDoc::from).collect(),
            }),
            Verdict::Unknown(p) => Payload::Unknown(p.clone()),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Payload::Sat(_) => "sat",
            Payload::Unsat(_) => "unsat",
            Payload::Unknown(_) => "unknown",
        }
    }
}

impl CertificateDocument {
    pub fn new(
        sentence: &str,
        prime: u64,
        budget: &Budget,
        verdict: &Verdict,
        wall_time_ms: u64,
    ) -> Self {
        CertificateDocument {
            format: FORMAT.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            sentence: sentence.to_string(),
            prime,
            budget: budget.clone(),
            verdict: verdict.label().to_string(),
            certificate: Payload::from_verdict(verdict),
            wall_time_ms,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    /// The serialized payload without the wall time, for reproducibility checks.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut d = self.clone();
        d.wall_time_ms = 0;
        serde_json::to_vec(&d).expect("documents always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_round_trip_and_canonical_form() {
        let p = 5;
        let x = ExpPoly::x(1, p, 0);
        let y = ExpPoly::y(1, p, 0);
        let f = &(&x.pow(2) - &ExpPoly::constant(1, p, 6)) + &y.scale(&BigInt::from(-3));
        let doc = PolyDoc::from(&f);
        assert_eq!(doc.decode(p).unwrap(), f);

        let mut swapped = doc.clone();
        swapped.terms.swap(0, 1);
        assert!(swapped.decode(p).is_err());
        let mut zero = doc.clone();
        zero.terms[0].coefficient[0].1 = "0".into();
        assert!(zero.decode(p).is_err());
        let mut bad = doc;
        bad.terms[0].coefficient[0].1 = "x".into();
        assert!(matches!(bad.decode(p), Err(Error::Format(_))));
    }

    #[test]
    fn json_key_order_is_fixed() {
        let b = Budget::default();
        let d = CertificateDocument::new("x1 = 0", 5, &b, &Verdict::Unknown(Progress::default()), 7);
        let text = d.to_json();
        let keys = ["\"format\"", "\"tool_version\"", "\"sentence\"", "\"prime\"", "\"budget\"", "\"verdict\"", "\"certificate\"", "\"wall_time_ms\""];
        let positions: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(CertificateDocument::from_json(&text).unwrap(), d);
        assert!(matches!(
            CertificateDocument::from_json("{\"format\": 1}"),
            Err(Error::Format(_))
        ));
    }
}
