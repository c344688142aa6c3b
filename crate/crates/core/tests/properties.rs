//! Property tests for the p-adic kernels and the zeta evaluators.

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use padic_zeta::character::DirichletCharacter;
use padic_zeta::euler::EulerTable;
use padic_zeta::fermionic::alternating_power_sum;
use padic_zeta::padic::{
    angle, omega_v, power_st, rational, teichmuller, ExactRational, PadicContext, PadicNumber,
};
use padic_zeta::zeta_char::zeta_char;
use padic_zeta::zeta_czp::ZetaEngine;

const PRIMES: [u64; 3] = [3, 5, 7];
const PREC: u32 = 12;

fn ctx(p: u64) -> PadicContext {
    PadicContext::new(p, PREC, 4).unwrap()
}

/// `u · p^k` with `u` a random integer prime to p.
fn nonzero_rational() -> impl Strategy<Value = (u64, ExactRational)> {
    (0..3usize, 1i64..1_000_000, -3i32..=3, 1i64..50).prop_map(|(pi, u, k, d)| {
        let p = PRIMES[pi];
        let pi64 = p as i64;
        let u = if u % pi64 == 0 { u + 1 } else { u };
        let d = if d % pi64 == 0 { d + 1 } else { d };
        let scale = BigRational::from_integer(BigInt::from(pi64)).pow(k);
        (p, rational(u, d) * scale)
    })
}

fn unit_rational() -> impl Strategy<Value = (u64, ExactRational)> {
    nonzero_rational().prop_map(|(p, q)| {
        let v = padic_zeta::padic::valuation_rational(&q, p as u32).unwrap();
        (p, q / BigRational::from_integer(BigInt::from(p)).pow(v as i32))
    })
}

/// A random element of Z_p given by an integer below `p^12`.
fn zp_element(p: u64) -> impl Strategy<Value = i64> {
    0..(p as i64).pow(12)
}

fn czp_rational() -> impl Strategy<Value = (u64, ExactRational)> {
    (0..3usize, 1i64..100_000, 1u32..=3, any::<bool>()).prop_map(|(pi, u, k, neg)| {
        let p = PRIMES[pi] as i64;
        let u = if u % p == 0 { u + 1 } else { u };
        let u = if neg { -u } else { u };
        (p as u64, rational(u, p.pow(k)))
    })
}

fn full(a: &PadicNumber, b: &PadicNumber) -> bool {
    let k = a.absprec().unwrap_or(i64::MAX).min(b.absprec().unwrap_or(i64::MAX));
    a.agreement_depth(b).map_or(true, |d| d >= k)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn omega_v_times_angle_is_x((p, q) in nonzero_rational()) {
        let c = ctx(p);
        let x = c.from_rational(&q);
        let w = omega_v(&x).unwrap();
        let a = angle(&x).unwrap();
        prop_assert!(full(&w.mul(&a), &x));
    }

    #[test]
    fn angle_is_one_mod_p((p, q) in nonzero_rational()) {
        let c = ctx(p);
        let a = angle(&c.from_rational(&q)).unwrap();
        prop_assert_eq!(a.valuation(), Some(0));
        prop_assert_eq!(a.residue(), Some(1));
    }

    #[test]
    fn teichmuller_is_root_of_unity((p, q) in unit_rational()) {
        let c = ctx(p);
        let x = c.from_rational(&q);
        let w = teichmuller(&x).unwrap();
        prop_assert!(w.pow(p as i64 - 1).unwrap().eq_to_precision(&c.one(), PREC as i64));
        prop_assert_eq!(w.residue(), x.residue());
    }

    #[test]
    fn omega_v_is_locally_constant((p, q) in unit_rational(), k in 1i64..8, d in 0i64..1000) {
        let c = ctx(p);
        let x = c.from_rational(&q);
        let y = x.add(&c.integer(d).shift(k));
        prop_assert_eq!(omega_v(&x).unwrap(), omega_v(&y).unwrap());
    }

    #[test]
    fn power_is_multiplicative((p, q) in nonzero_rational(), s in 0i64..1_000_000_000, t in -1_000_000i64..1_000_000) {
        let c = ctx(p);
        let x = c.from_rational(&q);
        let (sp, tp) = (c.integer(s), c.integer(t));
        let lhs = power_st(&x, &sp.add(&tp)).unwrap();
        let rhs = power_st(&x, &sp).unwrap().mul(&power_st(&x, &tp).unwrap());
        prop_assert!(full(&lhs, &rhs));
    }

    #[test]
    fn integer_powers_match_repeated_products((p, q) in nonzero_rational(), m in 0i64..12) {
        let c = ctx(p);
        let a = angle(&c.from_rational(&q)).unwrap();
        let x = c.from_rational(&q);
        prop_assert!(full(&power_st(&x, &c.integer(m)).unwrap(), &a.pow(m).unwrap()));
    }

    #[test]
    fn json_round_trip((p, q) in nonzero_rational(), k in 0i64..6) {
        let c = ctx(p);
        for x in [c.from_rational(&q), c.zero(), c.zero_to(k)] {
            let text = serde_json::to_string(&x.to_json()).unwrap();
            prop_assert_eq!(PadicNumber::parse_json(&text, &c).unwrap(), x);
        }
    }

    #[test]
    fn precision_is_honest((p, a) in nonzero_rational(), b in 1i64..10_000, s in -5i64..5) {
        let lo = ctx(p);
        let hi = lo.with_workprec(PREC + 8).unwrap();
        let bq = rational(b, 7) + rational(1, p as i64);
        let ops = |c: &PadicContext| -> Vec<PadicNumber> {
            let x = c.from_rational(&a);
            let y = c.from_rational(&bq);
            vec![
                x.add(&y),
                x.sub(&y),
                x.mul(&y),
                x.div(&y).unwrap(),
                power_st(&x, &c.integer(s)).unwrap(),
                angle(&x.add(&y)).unwrap(),
            ]
        };
        for (l, h) in ops(&lo).iter().zip(ops(&hi)) {
            let h = h.with_context(&lo).unwrap();
            let claimed = l.absprec().unwrap_or(i64::MAX);
            prop_assert!(l.agreement_depth(&h).map_or(true, |d| d >= claimed), "{} vs {}", l, h);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn zeta_at_one_is_one((p, q) in czp_rational()) {
        let c = ctx(p);
        let e = ZetaEngine::new(&c);
        let z = e.zeta_czp(&c.one(), &c.from_rational(&q)).unwrap();
        prop_assert!(z.eq_to_precision(&c.one(), PREC as i64));
    }

    #[test]
    fn angle_of_shift_factors((p, q) in czp_rational(), a in 0i64..10_000) {
        // ⟨x+a⟩ = ⟨x⟩(1 + a/x) for x in CZ_p and a in Z_p.
        let c = ctx(p);
        let x = c.from_rational(&q);
        let y = x.add(&c.integer(a));
        let rhs = angle(&x).unwrap().mul(&c.one().add(&c.integer(a).div(&x).unwrap()));
        prop_assert!(full(&angle(&y).unwrap(), &rhs));
    }

    #[test]
    fn zeta_precision_is_honest((p, q) in czp_rational(), s in zp_element(3)) {
        let lo = ctx(p);
        let hi = lo.with_workprec(PREC + 8).unwrap();
        let eval = |c: &PadicContext| ZetaEngine::new(c).zeta_czp(&c.integer(s), &c.from_rational(&q)).unwrap();
        let l = eval(&lo);
        let h = eval(&hi).with_context(&lo).unwrap();
        prop_assert!(l.agreement_depth(&h).map_or(true, |d| d >= l.absprec().unwrap_or(i64::MAX)));
    }

    #[test]
    fn zeta_char_reflection(pi in 0..3usize, v in 1u32..=2, k in 0i64..6, s in -3i64..4, x in 0i64..40) {
        let p = PRIMES[pi];
        let c = ctx(p);
        let e = ZetaEngine::new(&c);
        let chi = DirichletCharacter::new(p as u32, v, k).unwrap();
        let sp = c.integer(s);
        let lhs = zeta_char(&e, &chi, &sp, &c.integer(1 - x)).unwrap();
        let rhs = zeta_char(&e, &chi, &sp, &c.integer(x)).unwrap().mul_int(chi.parity());
        prop_assert!(full(&lhs, &rhs));
    }

    #[test]
    fn alternating_power_sum_is_literal(m in 0usize..10, rho in 1u64..200, num in -20i64..20, den in 1i64..6) {
        let t = EulerTable::build(12);
        let x = rational(num, den);
        let mut literal = BigRational::from_integer(BigInt::from(0));
        for a in 0..rho {
            let term = num_traits::pow(&x + BigRational::from_integer(BigInt::from(a)), m);
            literal = if a % 2 == 0 { literal + term } else { literal - term };
        }
        prop_assert_eq!(alternating_power_sum(&t, m, rho, &x).unwrap(), literal);
    }

    #[test]
    fn euler_polynomials_shift_and_reflect(m in 0usize..16, num in -50i64..50, den in 1i64..9) {
        let t = EulerTable::build(16);
        let x = rational(num, den);
        let one = rational(1, 1);
        let shift = t.euler_poly_eval(m, &(&x + &one)).unwrap() + t.euler_poly_eval(m, &x).unwrap();
        prop_assert_eq!(shift, rational(2, 1) * num_traits::pow(x.clone(), m));
        let sign = if m % 2 == 0 { one.clone() } else { -one.clone() };
        prop_assert_eq!(t.euler_poly_eval(m, &(&one - &x)).unwrap(), sign * t.euler_poly_eval(m, &x).unwrap());
    }
}
