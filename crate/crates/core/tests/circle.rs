mod common;

use biaccess::circle::*;
use common::int_tau;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn angle() -> impl Strategy<Value = (i64, i64)> {
    (1i64..=500).prop_flat_map(|q| (0..q, Just(q)))
}

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

#[test]
fn shorter_arc_through_zero_matches_grid_scan() {
    // Scan the grid of 1/96 for points inside the arc from 7/8 to 1/8 both
    // ways round; only the short way has 0 inside.
    let (a, b) = (Angle::frac(7, 8), Angle::frac(1, 8));
    let short: Vec<i64> = (0..96).filter(|&k| shorter_arc_contains(&Angle::frac(k, 96), &a, &b).unwrap()).collect();
    let expected: Vec<i64> = (0..96).filter(|k| !(12..=84).contains(k)).collect();
    assert_eq!(short, expected);
    assert!(shorter_arc_contains(&Angle::zero(), &a, &b).unwrap());
}

#[test]
fn local_expansion_is_exhaustive_to_denominator_64() {
    let mut angles = Vec::new();
    for q in 1..=64 {
        for p in 0..q {
            let a = Angle::frac(p, q);
            if *a.denominator() == BigInt::from(q) {
                angles.push(a);
            }
        }
    }
    for d in [2u32, 3] {
        let deg = Degree::new(d).unwrap();
        let limit = BigRational::new(1.into(), BigInt::from(2 * d));
        for x in &angles {
            for y in &angles {
                let t = tau(x, y);
                if t <= limit {
                    assert_eq!(tau(&x.mul_by(deg), &y.mul_by(deg)), t * BigInt::from(d), "{x} {y} d={d}");
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn preimages_are_evenly_spaced_and_map_back((p, q) in angle(), d in 2u32..9) {
        let t = Angle::frac(p, q);
        let pre = preimages(&t, d).unwrap();
        prop_assert_eq!(pre.len(), d as usize);
        for (i, x) in pre.iter().enumerate() {
            prop_assert_eq!(&mul_by_d(x, d).unwrap(), &t);
            let next = &pre[(i + 1) % pre.len()];
            prop_assert_eq!(x.ccw_to(next), ratio(1, i64::from(d)));
        }
    }

    #[test]
    fn tau_agrees_with_integer_model((p1, q1) in angle(), (p2, q2) in angle()) {
        let q = q1 * q2;
        let want = ratio(int_tau(q, p1 * q2, p2 * q1), q);
        prop_assert_eq!(tau(&Angle::frac(p1, q1), &Angle::frac(p2, q2)), want);
    }

    #[test]
    fn tau_is_a_metric((p1, q1) in angle(), (p2, q2) in angle(), (p3, q3) in angle()) {
        let (a, b, c) = (Angle::frac(p1, q1), Angle::frac(p2, q2), Angle::frac(p3, q3));
        prop_assert_eq!(tau(&a, &b), tau(&b, &a));
        prop_assert_eq!(tau(&a, &b) == ratio(0, 1), a == b);
        prop_assert!(tau(&a, &b) <= tau(&a, &c) + tau(&c, &b));
        prop_assert!(tau(&a, &b) <= ratio(1, 2));
    }

    #[test]
    fn angles_are_reduced((p, q) in (-1000i64..1000, 1i64..1000)) {
        let t = Angle::frac(p, q);
        prop_assert!(t.as_ratio() >= &ratio(0, 1) && t.as_ratio() < &ratio(1, 1));
        prop_assert_eq!(t.to_string().parse::<Angle>().unwrap(), t);
    }

    #[test]
    fn arc_complement_lengths((p1, q1) in angle(), (p2, q2) in angle()) {
        let (a, b) = (Angle::frac(p1, q1), Angle::frac(p2, q2));
        prop_assume!(a != b);
        let arc = ArcInterval::new(a, b).unwrap();
        prop_assert_eq!(arc.length() + arc.complement().length(), ratio(1, 1));
    }
}
