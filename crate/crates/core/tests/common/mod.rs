#![allow(dead_code)]

use num_bigint::BigInt;
use padic_exp::exppoly::{ExpCombination, ExpPoly};
use proptest::prelude::*;

pub const PRIMES: [u64; 4] = [2, 3, 5, 7];

/// Random exponential polynomial with small exponents and coefficients,
/// optionally with `E(j)` weights in the coefficients.
pub fn exp_poly(arity: usize, prime: u64, max_exp: u32, weights: bool) -> impl Strategy<Value = ExpPoly> {
    let term = (
        proptest::collection::vec(0..=max_exp, 2 * arity),
        -4i64..=4,
        if weights { -2i64..=2 } else { 0i64..=0 },
    );
    proptest::collection::vec(term, 0..5).prop_map(move |terms| {
        ExpPoly::from_terms(
            arity,
            prime,
            terms
                .into_iter()
                .map(|(e, c, w)| (e, ExpCombination::term(w, BigInt::from(c)))),
        )
        .unwrap()
    })
}

pub fn prime() -> impl Strategy<Value = u64> {
    proptest::sample::select(PRIMES.to_vec())
}

use padic_exp::frontend::parse::{Atom, Position, Relation, SentenceAst, Term};

fn bx(t: Term) -> Box<Term> {
    Box::new(t)
}

fn affine(vars: u32) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        (0i64..=3).prop_map(|v| Term::Int(v.into())),
        (1..=vars).prop_map(Term::Var),
    ];
    (leaf.clone(), leaf, 0u8..3).prop_map(|(a, b, op)| match op {
        0 => a,
        1 => Term::Add(bx(a), bx(b)),
        _ => Term::Neg(bx(a)),
    })
}

/// Random term over `x1..x_vars` whose `E` arguments are affine.
pub fn term(vars: u32) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        3 => (0i64..=6).prop_map(|v| Term::Int(v.into())),
        3 => (1..=vars).prop_map(Term::Var),
        1 => affine(vars).prop_map(|a| Term::Exp(bx(a))),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::Neg(bx(t))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::Add(bx(a), bx(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::Sub(bx(a), bx(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Term::Mul(bx(a), bx(b))),
        ]
    })
}

/// Random sentence with up to three clauses of up to three atoms.
pub fn sentence(vars: u32) -> impl Strategy<Value = SentenceAst> {
    let atom = (term(vars), any::<bool>(), term(vars)).prop_map(|(lhs, eq, rhs)| Atom {
        lhs,
        relation: if eq { Relation::Eq } else { Relation::Ne },
        rhs,
        position: Position::default(),
    });
    proptest::collection::vec(proptest::collection::vec(atom, 1..=3), 1..=3).prop_map(|clauses| {
        let mut ast = SentenceAst {
            variables: Vec::new(),
            clauses,
        };
        ast.variables = padic_exp::frontend::parse(&ast.to_string())
            .expect("printed sentences parse")
            .variables;
        ast
    })
}
