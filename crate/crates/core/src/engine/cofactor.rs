use std::collections::HashMap;
use std::ops::ControlFlow;
use std::sync::{Arc, Mutex, OnceLock};

use crate::exppoly::{ExpCombination, ExpPoly, Monomial};

/// An identity `R * P = sum_i R_i * S_i`. At a common root of the `R_i` where
/// `R` does not vanish, `P` vanishes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CofactorIdentity {
    pub multiplier: ExpPoly,
    pub members: Vec<ExpPoly>,
    pub cofactors: Vec<ExpPoly>,
}

impl CofactorIdentity {
    /// `R = 1, R_1 = P, S_1 = 1`.
    pub fn trivial(p: &ExpPoly) -> Self {
        let one = ExpPoly::constant(p.arity(), p.prime(), 1);
        CofactorIdentity {
            multiplier: one.clone(),
            members: vec![p.clone()],
            cofactors: vec![one],
        }
    }
}

/// Checks the identity by expanding both sides.
pub fn verify_cofactor(id: &CofactorIdentity, p: &ExpPoly) -> bool {
    if id.members.len() != id.cofactors.len() || id.members.is_empty() {
        return false;
    }
    let lhs = match id.multiplier.try_mul(p) {
        Ok(v) => v,
        Err(_) => return false,
    };
    let mut rhs = ExpPoly::zero(p.arity(), p.prime());
    for (r, s) in id.members.iter().zip(&id.cofactors) {
        match r.try_mul(s).and_then(|t| rhs.try_add(&t)) {
            Ok(v) => rhs = v,
            Err(_) => return false,
        }
    }
    lhs == rhs
}

fn monomials(arity: usize, max_degree: u32) -> Vec<Monomial> {
    fn rec(vars: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == vars {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(vars, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(2 * arity, max_degree, &mut Vec::new(), &mut out);
    let mut ms: Vec<Monomial> = out.into_iter().map(Monomial).collect();
    ms.sort();
    ms
}

/// Most terms a pool polynomial may have.
pub const POOL_MAX_TERMS: usize = 3;

type PoolKey = (usize, u64, u32, u32, u32);

fn pool_cache() -> &'static Mutex<HashMap<PoolKey, Arc<Vec<ExpPoly>>>> {
    static CACHE: OnceLock<Mutex<HashMap<PoolKey, Arc<Vec<ExpPoly>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Integer polynomials of size exactly `k`, where size is
/// `max(total degree, height - 1)`, restricted to total degree `<= max_degree`,
/// height `<= max_height`, at most [`POOL_MAX_TERMS`] terms and a positive
/// leading coefficient. Ordered by (degree, height, terms, support, coefficients).
pub fn identity_pool(
    arity: usize,
    prime: u64,
    max_degree: u32,
    max_height: u32,
    k: u32,
) -> Arc<Vec<ExpPoly>> {
    let key = (arity, prime, max_degree, max_height, k);
    if let Some(p) = pool_cache().lock().expect("pool cache poisoned").get(&key) {
        return p.clone();
    }
    let pool = Arc::new(build_pool(arity, prime, max_degree, max_height, k));
    pool_cache()
        .lock()
        .expect("pool cache poisoned")
        .insert(key, pool.clone());
    pool
}

/// Degree, height, term count and terms of a pool polynomial.
type PoolEntry = (u32, i64, usize, Vec<(Monomial, i64)>);

fn build_pool(arity: usize, prime: u64, max_degree: u32, max_height: u32, k: u32) -> Vec<ExpPoly> {
    let degree = k.min(max_degree);
    let height = (k + 1).min(max_height) as i64;
    if height == 0 {
        return Vec::new();
    }
    let ms = monomials(arity, degree);
    let mut entries: Vec<PoolEntry> = Vec::new();
    let mut support = Vec::new();
    let emit = |support: &[usize], entries: &mut Vec<_>| {
        let t = support.len();
        let combos = (2 * height as usize).pow(t as u32);
        for mut code in 0..combos {
            let mut terms = Vec::with_capacity(t);
            for &i in support {
                let d = (code % (2 * height as usize)) as i64;
                code /= 2 * height as usize;
                let c = if d < height { d - height } else { d - height + 1 };
                terms.push((ms[i].clone(), c));
            }
            let lead = terms.iter().max_by(|a, b| a.0.cmp(&b.0)).map(|t| t.1).unwrap_or(0);
            if lead <= 0 {
                continue;
            }
            let deg = terms.iter().map(|t| t.0.degree()).max().unwrap_or(0);
            let h = terms.iter().map(|t| t.1.abs()).max().unwrap_or(0);
            if deg.max(h as u32 - 1) != k {
                continue;
            }
            entries.push((deg, h, t, terms));
        }
    };
    fn subsets(
        n: usize,
        max: usize,
        start: usize,
        cur: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]),
    ) {
        if !cur.is_empty() {
            f(cur);
        }
        if cur.len() == max {
            return;
        }
        for i in start..n {
            cur.push(i);
            subsets(n, max, i + 1, cur, f);
            cur.pop();
        }
    }
    subsets(ms.len(), POOL_MAX_TERMS, 0, &mut support, &mut |s| emit(s, &mut entries));
    entries.sort_by(|a, b| {
        (a.0, a.1, a.2)
            .cmp(&(b.0, b.1, b.2))
            .then_with(|| {
                let ka: Vec<_> = a.3.iter().map(|t| (&t.0, t.1)).collect();
                let kb: Vec<_> = b.3.iter().map(|t| (&t.0, t.1)).collect();
                ka.cmp(&kb)
            })
    });
    entries
        .into_iter()
        .map(|(_, _, _, terms)| {
            let mut f = ExpPoly::zero(arity, prime);
            for (m, c) in terms {
                f = f
                    .try_add(&ExpPoly::monomial(arity, prime, m, ExpCombination::constant(c)))
                    .expect("same arity and prime");
            }
            f
        })
        .collect()
}

/// Visits, in lexicographic order, the index tuples with `idx[i] < hi[i]` for
/// all `i` and `idx[i] >= lo[i]` for some `i`.
pub(crate) fn visit_new_tuples<B>(
    lo: &[usize],
    hi: &[usize],
    f: &mut dyn FnMut(&[usize]) -> ControlFlow<B>,
) -> ControlFlow<B> {
    fn rec<B>(
        pos: usize,
        big: bool,
        lo: &[usize],
        hi: &[usize],
        idx: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]) -> ControlFlow<B>,
    ) -> ControlFlow<B> {
        if pos == hi.len() {
            return if big { f(idx) } else { ControlFlow::Continue(()) };
        }
        let later_can_be_big = (pos + 1..hi.len()).any(|j| lo[j] < hi[j]);
        let start = if big || later_can_be_big { 0 } else { lo[pos] };
        for i in start..hi[pos] {
            idx.push(i);
            let r = rec(pos + 1, big || i >= lo[pos], lo, hi, idx, f);
            idx.pop();
            r?;
        }
        ControlFlow::Continue(())
    }
    rec(0, false, lo, hi, &mut Vec::new(), f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cofactor_examples() {
        let p = 5;
        let x = ExpPoly::x(1, p, 0);
        let f = &x.pow(2) - &ExpPoly::constant(1, p, 6);
        assert!(verify_cofactor(&CofactorIdentity::trivial(&f), &f));
        let mut bad = CofactorIdentity::trivial(&f);
        bad.members[0] = &f + &ExpPoly::constant(1, p, 1);
        assert!(!verify_cofactor(&bad, &f));
        let y = ExpPoly::y(1, p, 0);
        let id = CofactorIdentity {
            multiplier: y.clone(),
            members: vec![&y * &f],
            cofactors: vec![ExpPoly::constant(1, p, 1)],
        };
        assert!(verify_cofactor(&id, &f));
    }

    #[test]
    fn pool_sizes() {
        let p0 = identity_pool(1, 5, 2, 2, 0);
        assert_eq!(p0.len(), 1);
        assert_eq!(p0[0], ExpPoly::constant(1, 5, 1));
        let p1 = identity_pool(1, 5, 2, 2, 1);
        // degree <= 1, height <= 2, excluding size 0 and non-positive leads
        assert_eq!(p1.len(), (5usize.pow(3) - 1) / 2 - 1);
        assert!(p1.iter().all(|f| f.total_degree() <= 1));
        assert!(identity_pool(1, 5, 1, 2, 2).is_empty());
    }

    #[test]
    fn new_tuples_are_exactly_the_shell() {
        let mut seen = Vec::new();
        let _ = visit_new_tuples::<()>(&[1, 2], &[3, 3], &mut |t| {
            seen.push(t.to_vec());
            ControlFlow::Continue(())
        });
        let mut expected = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                if a >= 1 || b >= 2 {
                    expected.push(vec![a, b]);
                }
            }
        }
        assert_eq!(seen, expected);
    }
}
