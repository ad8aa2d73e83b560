mod common;

use num_bigint::BigInt;
use padic_exp::padic::{decompose, ep_exp, ext_exp, ExtElem, ExtModulus, PadicInt, Valuation};
use proptest::prelude::*;

fn residue(p: u64, n: u32, v: u64) -> PadicInt {
    PadicInt::new(p, n, v)
}

proptest! {
    #[test]
    fn exp_is_a_homomorphism(p in common::prime(), n in 1u32..=16, a in any::<u64>(), b in any::<u64>()) {
        let (a, b) = (residue(p, n, a), residue(p, n, b));
        prop_assert_eq!(ep_exp(&a.add(&b).unwrap()), ep_exp(&a).mul(&ep_exp(&b)).unwrap());
    }

    #[test]
    fn exp_lands_in_principal_units(p in common::prime(), n in 2u32..=16, a in any::<u64>()) {
        let e = ep_exp(&residue(p, n, a));
        prop_assert_eq!(e.valuation(), Valuation::Exact(0));
        let m = if p == 2 { 4u32 } else { p as u32 };
        prop_assert_eq!(e.residue() % m, BigInt::from(1));
    }

    #[test]
    fn exp_is_precision_coherent(p in common::prime(), n in 1u32..=12, extra in 1u32..=12, a in any::<u64>()) {
        let hi = ep_exp(&residue(p, n + extra, a));
        prop_assert_eq!(hi.reduce(n).unwrap(), ep_exp(&residue(p, n, a)));
    }

    #[test]
    fn ring_laws(p in common::prime(), n in 1u32..=20, a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (a, b, c) = (residue(p, n, a), residue(p, n, b), residue(p, n, c));
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
        prop_assert_eq!(
            a.mul(&b.add(&c).unwrap()).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
        );
        prop_assert!(a.sub(&a).unwrap().is_zero());
    }

    #[test]
    fn decomposition_reconstructs(x in any::<u64>(), y in any::<u64>(), i in 0usize..3, cubic in any::<bool>()) {
        let (p, n) = (5, 8);
        let q = if cubic {
            ExtModulus::new([-2, 0, 0, 1]).unwrap()
        } else {
            ExtModulus::new([-6, 0, 1]).unwrap()
        };
        let i = i % q.degree();
        let (x, y) = (residue(p, n, x), residue(p, n, y));
        let coords = decompose(&q, &x, i).unwrap();
        let mut sum = ExtElem::new(&q, vec![PadicInt::zero(p, n); q.degree()]).unwrap();
        for (j, c) in coords.iter().enumerate() {
            sum = sum.add(&ExtElem::alpha_pow(&q, p, n, j).scale(c).unwrap()).unwrap();
        }
        prop_assert_eq!(&sum, &ext_exp(&q, &x, i).unwrap());
        let lhs = ext_exp(&q, &x.add(&y).unwrap(), i).unwrap();
        let rhs = ext_exp(&q, &x, i).unwrap().mul(&ext_exp(&q, &y, i).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
