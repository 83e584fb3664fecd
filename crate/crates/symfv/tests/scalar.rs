use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use symfv::linalg::{matmul, rot_z, Mat3};
use symfv::scalar::*;

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

#[test]
fn rationals_field_is_degree_one() {
    let q = field_rationals();
    assert_eq!(q.degree(), 1);
    assert!(q.is_rational());
    let x = Scalar::from_coeffs(&q, vec![rat(3, 4)]);
    assert_eq!(x, Scalar::frac(3, 4));
    assert_eq!(Scalar::from_int(-2).sign(), -1);
}

#[test]
fn golden_ratio_identities() {
    let g = field_golden();
    let phi = g.theta();
    assert!((&(&phi * &phi) - &phi - Scalar::one()).is_zero());
    assert_eq!((&phi - &Scalar::frac(8, 5)).sign(), 1);
    assert_eq!((&phi - &Scalar::frac(13, 8)).sign(), -1);
    assert_eq!(Scalar::one() / phi.clone(), &phi - &Scalar::one());
    assert_eq!(&phi * &(&phi - &Scalar::one()), Scalar::one());
}

#[test]
fn angle_field_values() {
    let f4 = field_for_angle(4).unwrap();
    let (c, s) = cos_sin(&f4, 1, 4).unwrap();
    assert_eq!(c, Scalar::zero());
    assert_eq!(s, Scalar::one());

    let f3 = field_for_angle(3).unwrap();
    let (c, _) = cos_sin(&f3, 1, 3).unwrap();
    assert_eq!(c, Scalar::frac(-1, 2));

    let f5 = field_for_angle(5).unwrap();
    let (c, _) = cos_sin(&f5, 1, 5).unwrap();
    let four = Scalar::from_int(4);
    let two = Scalar::from_int(2);
    assert!((&(&four * &(&c * &c)) + &(&two * &c) - Scalar::one()).is_zero());
    // cos(2π/5) + cos(4π/5) = −1/2.
    let (c2, _) = cos_sin(&f5, 2, 5).unwrap();
    assert_eq!(&c + &c2, Scalar::frac(-1, 2));
    assert!((c.to_f64() - (2.0 * std::f64::consts::PI / 5.0).cos()).abs() < 1e-14);
}

#[test]
fn sign_of_two_cos_two_pi_over_seven() {
    let f = field_2cos(7).unwrap();
    let x = &f.theta() - &Scalar::one();
    assert_eq!(x.sign(), 1);
    // 2cos(2π/7) ≈ 1.2469796037174670610500097680; check the enclosure.
    let (lo, hi) = f.theta().approx(&rat(1, 1_000_000_000_000_000));
    assert!(lo <= rat(12469796037174671, 10_000_000_000_000_000));
    assert!(hi >= rat(12469796037174670, 10_000_000_000_000_000));
}

#[test]
fn approx_intervals_are_tight_and_nested() {
    let phi = field_golden().theta();
    let (lo, hi) = phi.approx(&rat(1, 1_000_000));
    assert!(&hi - &lo <= rat(1, 1_000_000));
    assert!(lo <= rat(1618034, 1_000_000) && hi >= rat(1618033, 1_000_000));
    let (lo2, hi2) = phi.approx(&rat(1, 1_000_000_000_000));
    let mid = (&lo2 + &hi2) / rat(2, 1);
    assert!(lo <= mid && mid <= hi);
    let third = Scalar::frac(1, 3);
    assert_eq!(third.approx(&rat(1, 10)), (rat(1, 3), rat(1, 3)));
}

#[test]
fn rotation_matrices_have_exact_order() {
    for n in 1..=12u64 {
        let f = field_for_angle(n).unwrap();
        let (c, s) = cos_sin(&f, 1, n).unwrap();
        let r = rot_z(&c, &s);
        let mut acc = Mat3::identity();
        for k in 1..=n {
            acc = matmul(&acc, &r);
            assert_eq!(acc == Mat3::identity(), k == n, "n={n} k={k}");
        }
    }
}

#[test]
fn minimal_polynomials_of_small_cosines() {
    // 2cos(2π/5) = (√5 − 1)/2 has minimal polynomial x² + x − 1.
    let f = field_2cos(5).unwrap();
    let want: Vec<BigInt> = vec![(-1).into(), 1.into(), 1.into()];
    assert_eq!(f.min_poly(), &want[..]);
    // 2cos(2π/7): x³ + x² − 2x − 1.
    let f = field_2cos(7).unwrap();
    let want: Vec<BigInt> = vec![(-1).into(), (-2).into(), 1.into(), 1.into()];
    assert_eq!(f.min_poly(), &want[..]);
    assert_eq!(field_2cos(40).unwrap().degree(), 8);
}

#[test]
fn degree_cap_is_enforced() {
    assert!(matches!(field_for_angle_capped(50, 8), Err(ScalarError::DegreeCap { .. })));
}

#[test]
fn invalid_descriptors_are_rejected() {
    // x² − 2 has no root in (2, 3).
    let r = FieldDescriptor::new(vec![(-2).into(), 0.into(), 1.into()], (rat(2, 1), rat(3, 1)), "bad");
    assert!(r.is_err());
    // x³ − x has three roots in (−2, 2).
    let r = FieldDescriptor::new(vec![0.into(), (-1).into(), 0.into(), 1.into()], (rat(-2, 1), rat(2, 1)), "bad");
    assert!(r.is_err());
}

#[test]
fn division_by_zero_and_field_mismatch() {
    assert_eq!(Scalar::one().checked_div(&Scalar::zero()), Err(ScalarError::DivisionByZero));
    let a = field_golden().theta();
    let b = field_2cos(7).unwrap().theta();
    assert!(matches!(a.checked_add(&b), Err(ScalarError::FieldMismatch(..))));
}

#[test]
fn json_round_trip() {
    let f = field_2cos(16).unwrap();
    let x = &f.theta() * &Scalar::frac(-7, 3) + Scalar::frac(1, 2);
    let j = x.to_json(&f);
    assert_eq!(Scalar::from_json(&j, &f).unwrap(), x);
    let fj = field_to_json(&f);
    let g = field_from_json(&fj).unwrap();
    assert!(g.same_as(&f));
    assert_eq!(fj["iso"].as_array().unwrap().len(), 2);
}

#[test]
fn decimal_rendering_is_exactly_rounded() {
    assert_eq!(Scalar::frac(2, 3).to_decimal(4), "0.6667");
    assert_eq!(Scalar::frac(-1, 8).to_decimal(2), "-0.13");
    assert_eq!(field_golden().theta().to_decimal(12), "1.618033988750");
    assert_eq!(Scalar::from_int(3).to_decimal(0), "3");
}

fn arb_elem() -> impl Strategy<Value = Scalar> {
    let f = field_2cos(9).unwrap();
    prop::collection::vec((-20i64..20, 1i64..6), 3).prop_map(move |cs| {
        Scalar::from_coeffs(&f, cs.into_iter().map(|(p, q)| rat(p, q)).collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in arb_elem(), b in arb_elem(), c in arb_elem()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        if !a.is_zero() {
            prop_assert_eq!(&a / &a, Scalar::one());
            prop_assert_eq!(&(&b / &a) * &a, b.clone());
        }
    }

    #[test]
    fn sign_is_multiplicative_and_odd(a in arb_elem(), b in arb_elem()) {
        prop_assert_eq!((&a * &b).sign(), a.sign() * b.sign());
        prop_assert_eq!((-&a).sign(), -a.sign());
        let fa = a.to_f64();
        if fa.abs() > 1e-9 {
            prop_assert_eq!(a.sign() as f64, fa.signum());
        }
        let s = &a + &b;
        let eps = rat(1, 1_000_000);
        let (lo, hi) = s.approx(&eps);
        if s.sign() > 0 { prop_assert!(hi > rat(0, 1)); }
        if s.sign() < 0 { prop_assert!(lo < rat(0, 1)); }
    }
}
