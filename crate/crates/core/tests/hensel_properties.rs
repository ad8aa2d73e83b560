mod common;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use padic_exp::exppoly::{ExpPoly, ExpSystem};
use padic_exp::hensel::{check_hensel, implicit_jacobian, newton_lift};
use padic_exp::padic::{mod_inverse, prime_power, PadicInt};
use proptest::prelude::*;

/// `F - F(c) + p^k m`: residual `p^k m` at `c`.
fn shifted(f: &ExpPoly, c: i64, k: u32, m: i64) -> ExpPoly {
    let p = f.prime();
    let at_c = ExpPoly::constant_combination(1, p, f.exact_collect(&[c]).unwrap());
    let tail = ExpPoly::constant(1, p, prime_power(p, k) * m);
    &(f - &at_c) + &tail
}

fn small_prime() -> impl Strategy<Value = u64> {
    proptest::sample::select(vec![3u64, 5])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lifted_roots_are_roots(
        (f, p) in common::prime().prop_flat_map(|p| (common::exp_poly(1, p, 2, true), Just(p))),
        c in -6i64..=6,
        k in 1u32..=6,
        m in -5i64..=5,
    ) {
        let g = shifted(&(&f + &ExpPoly::x(1, p, 0)), c, k, m);
        let system = ExpSystem::new(vec![g.clone()]).unwrap();
        let Some(cert) = check_hensel(&system, &[c], 0, 8, 256).unwrap() else {
            return Ok(());
        };
        let lift = newton_lift(&cert, 30).unwrap();
        let v = cert.det_valuation();
        let n = 30;
        let point: Vec<PadicInt> = lift.approx_root.iter().map(|b| b.with_precision(n)).collect();
        prop_assert!(g.evaluate_at(&point, n).unwrap().valuation().at_least(n));
        for w in lift.trace.windows(2) {
            prop_assert!(w[1] > w[0]);
            if w[0] > 2 * v {
                prop_assert!(w[1] >= 2 * (w[0] - v) || w[1] >= lift.guaranteed_precision);
            }
        }
    }

    #[test]
    fn root_class_is_unique_near_the_center(
        (f, p) in small_prime().prop_flat_map(|p| (common::exp_poly(1, p, 2, false), Just(p))),
        c in -6i64..=6,
        k in 1u32..=4,
        m in -5i64..=5,
        slack in 0u32..=2,
    ) {
        let g = shifted(&(&f + &ExpPoly::x(1, p, 0)), c, k, m);
        let system = ExpSystem::new(vec![g.clone()]).unwrap();
        let Some(cert) = check_hensel(&system, &[c], slack, 8, 256).unwrap() else {
            return Ok(());
        };
        prop_assume!(cert.det_valuation() == 0);
        let q = prime_power(p, 4);
        let near = prime_power(p, cert.radius() + 1);
        let q64 = i64::try_from(&q).unwrap();
        let hits = (0..q64)
            .filter(|&b| (BigInt::from(b - c)).mod_floor(&near).is_zero())
            .filter(|&b| {
                g.evaluate_at(&[PadicInt::new(p, 4, b)], 4).unwrap().is_zero()
            })
            .count();
        prop_assert_eq!(hits, 1);
    }

    #[test]
    fn implicit_jacobian_matches_rational_solve(
        p in small_prime(),
        l in 1usize..=2,
        m in 1usize..=2,
        entries in proptest::collection::vec(-3i64..=3, 16),
    ) {
        let n = l + m;
        let a: Vec<Vec<i64>> = (0..m).map(|i| (0..n).map(|j| entries[i * 4 + j]).collect()).collect();
        let members: Vec<ExpPoly> = a
            .iter()
            .map(|row| {
                row.iter().enumerate().fold(ExpPoly::zero(n, p), |acc, (j, &c)| {
                    &acc + &ExpPoly::x(n, p, j).scale(&BigInt::from(c))
                })
            })
            .collect();
        let system = ExpSystem::new(members).unwrap();
        let precision = 12;

        let rat = |v: i64| BigRational::from_integer(BigInt::from(v));
        let ay: Vec<Vec<BigRational>> = a.iter().map(|r| r[l..].iter().map(|&v| rat(v)).collect()).collect();
        let ax: Vec<Vec<BigRational>> = a.iter().map(|r| r[..l].iter().map(|&v| rat(v)).collect()).collect();
        let Some(inv) = invert(&ay) else {
            prop_assert!(implicit_jacobian(&system, &vec![0; n], precision).is_err());
            return Ok(());
        };
        let det_v = det_valuation(&ay, p);
        let result = implicit_jacobian(&system, &vec![0; n], precision);
        if 2 * det_v >= precision {
            prop_assert!(result.is_err());
            return Ok(());
        }
        let expected: Vec<Vec<BigRational>> = (0..m)
            .map(|i| {
                (0..l)
                    .map(|j| -(0..m).map(|k| &inv[i][k] * &ax[k][j]).fold(BigRational::zero(), |s, t| s + t))
                    .collect()
            })
            .collect();
        let integral = expected.iter().flatten().all(|e| !e.denom().is_multiple_of(&BigInt::from(p)));
        if !integral {
            prop_assert!(result.is_err());
            return Ok(());
        }
        let got = result.unwrap();
        let out_mod = prime_power(p, precision - 2 * det_v);
        for (row_e, row_g) in expected.iter().zip(&got) {
            for (e, g) in row_e.iter().zip(row_g) {
                let want = (e.numer() * mod_inverse(e.denom(), &out_mod).unwrap()).mod_floor(&out_mod);
                prop_assert_eq!(g.residue(), &want);
            }
        }
    }
}

fn invert(a: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let d = m[col][col].clone();
        for v in m[col].iter_mut() {
            *v = &*v / &d;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot_row = m[col].clone();
                for (x, y) in m[r].iter_mut().zip(&pivot_row) {
                    *x = &*x - &f * y;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn det_valuation(a: &[Vec<BigRational>], p: u64) -> u32 {
    let det = match a.len() {
        1 => a[0][0].clone(),
        _ => &a[0][0] * &a[1][1] - &a[0][1] * &a[1][0],
    };
    let mut v = 0;
    let mut d = det.numer().abs();
    while d.is_multiple_of(&BigInt::from(p)) {
        d /= p;
        v += 1;
    }
    v
}
