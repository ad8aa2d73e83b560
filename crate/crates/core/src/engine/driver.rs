use std::collections::BTreeSet;

use super::existence::{ExistenceSearch, Meter, SizeOutcome};
use super::{Budget, SatCertificate, SatKind};
use crate::error::Result;
use crate::exppoly::{ExpPoly, LinearRelation};

/// Normalized relations over `arity` variables whose height is exactly `height`,
/// in canonical order.
pub(crate) fn relations_of_height(arity: usize, height: u32) -> Vec<LinearRelation> {
    let h = height as i64;
    let mut out = BTreeSet::new();
    for e in 0..arity {
        let others = arity - 1;
        let span = (2 * h + 1) as u64;
        let total = span.pow(others as u32 + 1);
        for code in 0..total {
            let mut digits = code;
            let mut coeffs = Vec::with_capacity(arity);
            for j in 0..arity {
                if j == e {
                    coeffs.push(1);
                } else {
                    coeffs.push((digits % span) as i64 - h);
                    digits /= span;
                }
            }
            let constant = (digits % span) as i64 - h;
            if let Ok(r) = LinearRelation::new(coeffs, constant) {
                if r.height() == height as u64 {
                    out.insert(r);
                }
            }
        }
    }
    let mut v: Vec<LinearRelation> = out.into_iter().collect();
    v.sort_by_key(|r| {
        (
            r.eliminated(),
            r.constant().unsigned_abs(),
            r.constant() < 0,
            r.coefficients().to_vec(),
        )
    });
    v
}

struct Node {
    chain: Vec<LinearRelation>,
    height: u32,
    target: ExpPoly,
    disequations: Vec<ExpPoly>,
    search: Option<ExistenceSearch>,
    settled: bool,
}

impl Node {
    fn arity(&self) -> usize {
        self.target.arity()
    }

    /// Sat when the equation vanishes identically and the disequations are
    /// nonzero constants (or absent).
    fn exact_zero(&self) -> bool {
        self.target.is_zero()
            && (self.disequations.is_empty()
                || (self.arity() == 0 && self.disequations.iter().all(|d| !d.is_zero())))
    }
}

pub(crate) enum DriverOutcome {
    Found(SatCertificate),
    Continue,
    Exhausted,
}

/// Dovetails existence searches over the equation and all of its images under
/// chains of linear substitutions.
pub(crate) struct Driver {
    budget: Budget,
    nodes: Vec<Node>,
    pub(crate) meter: Meter,
    next_size: u32,
    exhausted: bool,
}

impl Driver {
    pub(crate) fn new(target: &ExpPoly, disequations: &[ExpPoly], budget: &Budget) -> Result<Self> {
        let root = Self::node(Vec::new(), 0, target.clone(), disequations.to_vec(), budget)?;
        Ok(Driver {
            budget: budget.clone(),
            nodes: vec![root],
            meter: Meter::new(budget.max_steps),
            next_size: 0,
            exhausted: false,
        })
    }

    fn node(
        chain: Vec<LinearRelation>,
        height: u32,
        target: ExpPoly,
        disequations: Vec<ExpPoly>,
        budget: &Budget,
    ) -> Result<Node> {
        let search = if target.arity() > 0 {
            Some(ExistenceSearch::new(&target, &disequations, budget)?)
        } else {
            None
        };
        Ok(Node {
            chain,
            height,
            target,
            disequations,
            search,
            settled: false,
        })
    }

    pub(crate) fn nodes_visited(&self) -> u64 {
        self.nodes.len() as u64
    }

    pub(crate) fn sizes_completed(&self) -> u32 {
        self.next_size
    }

    pub(crate) fn done(&self) -> bool {
        self.exhausted || self.next_size > self.budget.max_size(self.nodes[0].target.prime())
    }

    /// Adds the nodes whose chain height is exactly `k`: children of new nodes
    /// through any relation of height `<= k`, children of older nodes through
    /// relations of height `k`.
    fn grow(&mut self, k: u32) -> Result<()> {
        if k > self.budget.max_coeff_height {
            return Ok(());
        }
        let mut i = 0;
        while i < self.nodes.len() {
            let (arity, node_height) = (self.nodes[i].arity(), self.nodes[i].height);
            if arity > 0 {
                let heights: Vec<u32> = if node_height == k {
                    (0..=k).collect()
                } else {
                    vec![k]
                };
                for h in heights {
                    for rel in relations_of_height(arity, h) {
                        let parent = &self.nodes[i];
                        let target = parent.target.substitute_linear(&rel)?;
                        let disequations = parent
                            .disequations
                            .iter()
                            .map(|d| d.substitute_linear(&rel))
                            .collect::<Result<Vec<_>>>()?;
                        let mut chain = parent.chain.clone();
                        chain.push(rel);
                        let height = node_height.max(h);
                        let node = Self::node(chain, height, target, disequations, &self.budget)?;
                        self.nodes.push(node);
                    }
                }
            }
            i += 1;
        }
        Ok(())
    }

    /// Runs dovetail size `k` on every node, lowest arity first.
    pub(crate) fn run_size(&mut self) -> Result<DriverOutcome> {
        if self.done() {
            return Ok(DriverOutcome::Exhausted);
        }
        let k = self.next_size;
        self.grow(k)?;
        for node in self.nodes.iter_mut().filter(|n| !n.settled) {
            if node.exact_zero() {
                return Ok(DriverOutcome::Found(SatCertificate {
                    chain: node.chain.clone(),
                    kind: SatKind::ExactZero,
                }));
            }
            if node.arity() == 0 {
                node.settled = true;
            }
        }
        let mut order: Vec<usize> = (0..self.nodes.len()).collect();
        order.sort_by_key(|&i| (self.nodes[i].arity(), self.nodes[i].height, i));
        for i in order {
            let node = &mut self.nodes[i];
            if node.settled {
                continue;
            }
            let Some(search) = node.search.as_mut() else {
                node.settled = true;
                continue;
            };
            match search.run_through(k, &mut self.meter)? {
                SizeOutcome::Found(w) => {
                    return Ok(DriverOutcome::Found(SatCertificate {
                        chain: node.chain.clone(),
                        kind: SatKind::Hensel(w),
                    }))
                }
                SizeOutcome::Exhausted => {
                    self.exhausted = true;
                    return Ok(DriverOutcome::Exhausted);
                }
                SizeOutcome::Continue => {}
            }
        }
        self.next_size += 1;
        Ok(DriverOutcome::Continue)
    }
}

/// Runs the driver through every size of the budget.
pub fn linear_relation_driver(
    target: &ExpPoly,
    disequations: &[ExpPoly],
    budget: &Budget,
) -> Result<Option<SatCertificate>> {
    let mut driver = Driver::new(target, disequations, budget)?;
    loop {
        match driver.run_size()? {
            DriverOutcome::Found(c) => return Ok(Some(c)),
            DriverOutcome::Exhausted => return Ok(None),
            DriverOutcome::Continue => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_counts() {
        let r0 = relations_of_height(1, 0);
        assert_eq!(r0.len(), 1);
        assert_eq!(r0[0].to_string(), "x1 = 0");
        let r1 = relations_of_height(1, 1);
        assert_eq!(r1.iter().map(|r| r.constant()).collect::<Vec<_>>(), vec![1, -1]);
        assert!(relations_of_height(2, 1)
            .iter()
            .any(|r| r.to_string() == "x1 = 0 + 1*x2"));
    }

    #[test]
    fn driver_examples() {
        let b = Budget::default();
        let p = 5;
        let y = ExpPoly::y(1, p, 0);
        let c = linear_relation_driver(&(&y - &ExpPoly::constant(1, p, 1)), &[], &b)
            .unwrap()
            .unwrap();
        assert_eq!(c.kind, SatKind::ExactZero);
        assert_eq!(c.chain.len(), 1);
        assert_eq!(c.chain[0].to_string(), "x1 = 0");

        let f = &ExpPoly::x(2, p, 0) - &ExpPoly::x(2, p, 1);
        let c = linear_relation_driver(&f, &[], &b).unwrap().unwrap();
        assert_eq!(c.kind, SatKind::ExactZero);
        assert!(!c.chain.is_empty());

        let x = ExpPoly::x(1, p, 0);
        let f = &x.pow(2) - &ExpPoly::constant(1, p, 6);
        let c = linear_relation_driver(&f, &[], &b).unwrap().unwrap();
        assert!(c.chain.is_empty());
    }
}
