use num_bigint::BigInt;

use super::parse::{Relation, SentenceAst, Term};
use crate::engine::Disjunct;
use crate::error::{Error, Result};
use crate::exppoly::{ExpCombination, ExpPoly, LaurentExpPoly};

/// A sentence as a disjunction of systems over a common set of variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub prime: u64,
    /// Source indices of the variables; position `i` is `x_{i+1}` of every polynomial.
    pub variables: Vec<u32>,
    pub disjuncts: Vec<NormalDisjunct>,
}

/// `equations` has at most one member, the squash of the clause's equations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalDisjunct {
    pub equations: Vec<ExpPoly>,
    pub disequations: Vec<ExpPoly>,
}

impl NormalForm {
    pub fn arity(&self) -> usize {
        self.variables.len()
    }

    pub fn has_disequations(&self) -> bool {
        self.disjuncts.iter().any(|d| !d.disequations.is_empty())
    }

    /// Engine input; a disjunct without equations gets the zero equation.
    pub fn to_engine(&self) -> Vec<Disjunct> {
        self.disjuncts
            .iter()
            .map(|d| Disjunct {
                equation: d
                    .equations
                    .first()
                    .cloned()
                    .unwrap_or_else(|| ExpPoly::zero(self.arity(), self.prime)),
                disequations: d.disequations.clone(),
            })
            .collect()
    }
}

fn to_laurent(term: &Term, vars: &[u32], prime: u64) -> Result<LaurentExpPoly> {
    let n = vars.len();
    Ok(match term {
        Term::Int(v) => LaurentExpPoly::constant(n, prime, ExpCombination::constant(v.clone())),
        Term::Var(i) => {
            let pos = vars
                .binary_search(i)
                .map_err(|_| Error::Internal(format!("variable x{i} missing from the variable list")))?;
            LaurentExpPoly::x(n, prime, pos)
        }
        Term::Neg(t) => to_laurent(t, vars, prime)?.neg(),
        Term::Add(a, b) => to_laurent(a, vars, prime)?.add(&to_laurent(b, vars, prime)?),
        Term::Sub(a, b) => to_laurent(a, vars, prime)?.add(&to_laurent(b, vars, prime)?.neg()),
        Term::Mul(a, b) => to_laurent(a, vars, prime)?.mul(&to_laurent(b, vars, prime)?),
        Term::Exp(t) => {
            let (coeffs, c) = to_laurent(t, vars, prime)?.as_affine().ok_or_else(|| {
                Error::Unsupported(format!(
                    "E({t}): only affine integer arguments are expressible as exponential polynomials"
                ))
            })?;
            LaurentExpPoly::exp_affine(n, prime, &coeffs, c)
        }
    })
}

/// The polynomial `lhs - rhs`, times a unit `prod E(x_i)^{s_i}` when negative
/// exponents of `E` occur. The zero set is unchanged.
pub fn atom_polynomial(lhs: &Term, rhs: &Term, vars: &[u32], prime: u64) -> Result<ExpPoly> {
    let diff = to_laurent(lhs, vars, prime)?.add(&to_laurent(rhs, vars, prime)?.neg());
    Ok(diff.clear_units().0)
}

/// Converts every atom to `f = 0` or `f != 0` and squashes each clause's
/// equations into one polynomial.
pub fn normalize(ast: &SentenceAst, prime: u64) -> Result<NormalForm> {
    let vars = &ast.variables;
    let mut disjuncts = Vec::with_capacity(ast.clauses.len());
    for clause in &ast.clauses {
        let mut equations = Vec::new();
        let mut disequations = Vec::new();
        for atom in clause {
            let f = atom_polynomial(&atom.lhs, &atom.rhs, vars, prime)?;
            match atom.relation {
                Relation::Eq => equations.push(f),
                Relation::Ne => disequations.push(f),
            }
        }
        if !equations.is_empty() {
            equations = vec![ExpPoly::squash_all(&equations)?];
        }
        disjuncts.push(NormalDisjunct {
            equations,
            disequations,
        });
    }
    Ok(NormalForm {
        prime,
        variables: vars.clone(),
        disjuncts,
    })
}

/// Exact value of a term at an integer point, as a combination of `E_p(j)`.
pub fn eval_term_exact(term: &Term, vars: &[u32], point: &[i64]) -> Result<ExpCombination> {
    let rec = |t: &Term| eval_term_exact(t, vars, point);
    Ok(match term {
        Term::Int(v) => ExpCombination::constant(v.clone()),
        Term::Var(i) => {
            let pos = vars
                .binary_search(i)
                .map_err(|_| Error::Usage(format!("no value for x{i}")))?;
            ExpCombination::constant(point[pos])
        }
        Term::Neg(t) => rec(t)?.neg(),
        Term::Add(a, b) => rec(a)?.add(&rec(b)?),
        Term::Sub(a, b) => rec(a)?.sub(&rec(b)?),
        Term::Mul(a, b) => rec(a)?.mul(&rec(b)?),
        Term::Exp(t) => {
            let arg = rec(t)?
                .as_integer()
                .ok_or_else(|| Error::Unsupported(format!("E({t}) at a non-integer argument")))?;
            let w = i64::try_from(arg)
                .map_err(|_| Error::Unsupported("exponential weight overflow".into()))?;
            ExpCombination::term(w, BigInt::from(1))
        }
    })
}

/// Truth of the sentence at an integer point, decided exactly.
pub fn holds_at(ast: &SentenceAst, point: &[i64]) -> Result<bool> {
    for clause in &ast.clauses {
        let mut all = true;
        for atom in clause {
            let v = eval_term_exact(&atom.lhs, &ast.variables, point)?
                .sub(&eval_term_exact(&atom.rhs, &ast.variables, point)?);
            let ok = match atom.relation {
                Relation::Eq => v.is_zero(),
                Relation::Ne => !v.is_zero(),
            };
            if !ok {
                all = false;
                break;
            }
        }
        if all {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse::parse;

    fn nf(s: &str) -> NormalForm {
        normalize(&parse(s).unwrap(), 5).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let f = nf("x1 = 0 & x2 = 0");
        assert_eq!(f.disjuncts.len(), 1);
        let x1 = ExpPoly::x(2, 5, 0);
        let x2 = ExpPoly::x(2, 5, 1);
        let expected = &x1.pow(2) + &x2.pow(2).scale(&BigInt::from(5));
        assert_eq!(f.disjuncts[0].equations, vec![expected]);

        assert_eq!(nf("x1 = 0 | x2 = 0").disjuncts.len(), 2);

        let f = nf("E(x1) != 1");
        assert!(f.disjuncts[0].equations.is_empty());
        assert_eq!(f.disjuncts[0].disequations.len(), 1);
        assert!(f.to_engine()[0].equation.is_zero());
    }

    #[test]
    fn variables_are_renumbered_by_index() {
        let f = nf("x7 - x3 = 0");
        assert_eq!(f.variables, vec![3, 7]);
        let expected = &ExpPoly::x(2, 5, 1) - &ExpPoly::x(2, 5, 0);
        assert_eq!(f.disjuncts[0].equations[0], expected);
    }

    #[test]
    fn negative_exponents_are_cleared() {
        let f = nf("E(-x1) = 1");
        let y = ExpPoly::y(1, 5, 0);
        assert_eq!(f.disjuncts[0].equations[0], &ExpPoly::constant(1, 5, 1) - &y);
    }

    #[test]
    fn non_affine_exponent_is_unsupported() {
        let ast = parse("E(x1 * x1) = 1").unwrap();
        assert!(matches!(normalize(&ast, 5), Err(Error::Unsupported(_))));
        let ast = parse("E(E(x1)) = 1").unwrap();
        assert!(matches!(normalize(&ast, 5), Err(Error::Unsupported(_))));
        assert!(normalize(&parse("E(2*(x1 - 3)) = 1").unwrap(), 5).is_ok());
    }

    #[test]
    fn exact_truth() {
        let ast = parse("x1 * x1 = 4 & x1 != 2").unwrap();
        assert!(holds_at(&ast, &[-2]).unwrap());
        assert!(!holds_at(&ast, &[2]).unwrap());
        let ast = parse("E(x1) * E(-x1) = 1").unwrap();
        assert!(holds_at(&ast, &[3]).unwrap());
    }
}
