use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{forward, leaves_cross, Lamination, LaminationError, Leaf};
use crate::circle::{Angle, Degree};

/// Pull a leaf back under doubling, using `critical` (a diameter) to pick
/// the pairing.
///
/// The pairing whose leaves avoid crossing the critical chord wins. When
/// both pairings avoid it (a leaf ending at the critical value, whose
/// preimages then sit on the chord itself) the narrow pairing is taken.
pub fn quadratic_pullback(leaf: &Leaf, critical: &Leaf) -> Result<[Leaf; 2], LaminationError> {
    let pa = leaf.a().preimages(Degree::TWO);
    let pb = leaf.b().preimages(Degree::TWO);
    let mk = |x: &Angle, y: &Angle| Leaf::new(x.clone(), y.clone()).expect("preimages of distinct angles differ");
    let straight = [mk(&pa[0], &pb[0]), mk(&pa[1], &pb[1])];
    let swapped = [mk(&pa[0], &pb[1]), mk(&pa[1], &pb[0])];
    let clear = |p: &[Leaf; 2]| p.iter().all(|l| !leaves_cross(l, critical));
    match (clear(&straight), clear(&swapped)) {
        (true, false) => Ok(straight),
        (false, true) => Ok(swapped),
        (true, true) => {
            if swapped[0].length() < straight[0].length() {
                Ok(swapped)
            } else {
                Ok(straight)
            }
        }
        (false, false) => Err(LaminationError::Critical { leaf: leaf.clone() }),
    }
}

/// Iterated pullback of the major leaf `{theta/2, (theta+1)/2}` under doubling.
///
/// Generation 0 is the major leaf; generation `k+1` holds the two pullbacks
/// of every generation-`k` leaf, chosen so that nothing crosses the major
/// leaf.
pub fn build_quadratic_lamination(theta: &Angle, depth: usize) -> Result<Lamination, LaminationError> {
    if theta.is_zero() {
        return Err(LaminationError::ZeroAngle);
    }
    let two = Degree::TWO;
    let major = {
        let pre = theta.preimages(two);
        Leaf::new(pre[0].clone(), pre[1].clone())?
    };
    let mut lam = Lamination::empty(two);
    lam.set_critical_chord(major.clone());
    lam.push_generation(vec![(major.clone(), None)]);
    for k in 0..depth {
        let range = lam.generation_range(k);
        let mut next = Vec::with_capacity(2 * range.len());
        for idx in range {
            let leaf = &lam.record(idx).leaf;
            for child in quadratic_pullback(leaf, &major)? {
                next.push((child, Some(idx)));
            }
        }
        lam.push_generation(next);
    }
    Ok(lam)
}

/// The lamination of the degree-`d` Chebyshev polynomial: leaves `{t, 1-t}`.
///
/// Seeded by the invariant leaf `{1/(d+1), d/(d+1)}`, whose endpoints are
/// swapped by `t -> d*t`. Each pullback pairs every preimage `x` with `1-x`;
/// leaves already present in an earlier generation are not repeated.
pub fn chebyshev_lamination(d: u32, depth: usize) -> Result<Lamination, LaminationError> {
    let degree = Degree::new(d)?;
    let seed = Leaf::new(Angle::frac(1, i64::from(d) + 1), Angle::frac(i64::from(d), i64::from(d) + 1))?;
    let one = BigRational::from_integer(BigInt::from(1));
    let mut lam = Lamination::empty(degree);
    let mut seen: HashSet<Leaf> = HashSet::new();
    seen.insert(seed.clone());
    lam.push_generation(vec![(seed, None)]);
    for k in 0..depth {
        let mut next = Vec::new();
        for idx in lam.generation_range(k) {
            let leaf = &lam.record(idx).leaf;
            for x in leaf.a().preimages(degree) {
                let mirror = Angle::from_ratio(&one - x.as_ratio());
                let child = Leaf::new(x, mirror)?;
                debug_assert_eq!(forward(&child, degree).leaf(), Some(leaf));
                if seen.insert(child.clone()) {
                    next.push((child, Some(idx)));
                }
            }
        }
        lam.push_generation(next);
    }
    Ok(lam)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(lam: &Lamination, k: usize) -> Vec<Leaf> {
        let mut v: Vec<Leaf> = lam.generation(k).iter().map(|r| r.leaf.clone()).collect();
        v.sort();
        v
    }

    #[test]
    fn chebyshev_angle_major_leaf() {
        let lam = build_quadratic_lamination(&Angle::frac(1, 2), 0).unwrap();
        assert_eq!(gen(&lam, 0), vec![Leaf::frac(1, 4, 3, 4)]);
        assert!(lam.record(0).critical);
    }

    #[test]
    fn zero_angle_is_rejected() {
        assert_eq!(build_quadratic_lamination(&Angle::zero(), 3).unwrap_err(), LaminationError::ZeroAngle);
    }

    #[test]
    fn airplane_generation_two_has_four_leaves() {
        let lam = build_quadratic_lamination(&Angle::frac(3, 7), 2).unwrap();
        assert_eq!(lam.generation(2).len(), 4);
    }

    #[test]
    fn chebyshev_seed_and_first_pullback() {
        let lam = chebyshev_lamination(2, 0).unwrap();
        assert_eq!(gen(&lam, 0), vec![Leaf::frac(1, 3, 2, 3)]);
        let lam = chebyshev_lamination(2, 1).unwrap();
        assert_eq!(gen(&lam, 1), vec![Leaf::frac(1, 6, 5, 6)]);
        assert_eq!(lam.len(), 2);
    }

    #[test]
    fn chebyshev_higher_degree_is_symmetric_and_invariant() {
        for d in [3, 4, 5] {
            let lam = chebyshev_lamination(d, 3).unwrap();
            lam.check_forward_invariance().unwrap();
            for l in lam.leaves() {
                let s = Angle::from_ratio(l.a().as_ratio() + l.b().as_ratio());
                assert!(s.is_zero(), "{l}");
            }
        }
    }
}
