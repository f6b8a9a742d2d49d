//! Independent reference implementations used as test oracles.
//!
//! Angles here are integers modulo a fixed `M`, so nothing below shares code
//! with the rational arithmetic in the library.

#![allow(dead_code)]

use biaccess::circle::Angle;
use biaccess::lamination::Leaf;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Leaf as `(a, b)` numerators over `m`, with `(b - a) mod m <= m/2`.
pub type IntLeaf = (i128, i128);

pub fn canon(m: i128, x: i128, y: i128) -> IntLeaf {
    let l = (y - x).rem_euclid(m);
    if 2 * l < m {
        (x, y)
    } else if 2 * l > m {
        (y, x)
    } else {
        (x.min(y), x.max(y))
    }
}

pub fn len(m: i128, l: IntLeaf) -> i128 {
    (l.1 - l.0).rem_euclid(m)
}

pub fn inside(m: i128, t: i128, a: i128, b: i128) -> bool {
    t != a && t != b && (t - a).rem_euclid(m) < (b - a).rem_euclid(m)
}

pub fn cross(m: i128, l1: IntLeaf, l2: IntLeaf) -> bool {
    let (a, b) = l1;
    let (c, d) = l2;
    if a == c || a == d || b == c || b == d {
        return false;
    }
    inside(m, c, a, b) != inside(m, d, a, b)
}

/// Quadratic lamination built by the literal rule: every candidate pairing is
/// tested against every leaf accumulated so far; ties go to the shorter
/// leaves. Quadratic in the leaf count, so keep `depth` small.
pub struct RefLamination {
    pub m: i128,
    pub gens: Vec<Vec<IntLeaf>>,
}

pub fn reference_quadratic(p: i128, q: i128, depth: u32) -> RefLamination {
    let m = q << (depth + 1);
    let th = p * (m / q);
    let half = m / 2;
    let crit = canon(m, th / 2, th / 2 + half);
    let mut all = vec![crit];
    let mut gens = vec![vec![crit]];
    for _ in 0..depth {
        let mut next = Vec::new();
        for &(a, b) in gens.last().unwrap() {
            let pa = [a / 2, a / 2 + half];
            let pb = [b / 2, b / 2 + half];
            let mut cands: Vec<[IntLeaf; 2]> = Vec::new();
            for swap in [false, true] {
                let ls = if swap {
                    [canon(m, pa[0], pb[1]), canon(m, pa[1], pb[0])]
                } else {
                    [canon(m, pa[0], pb[0]), canon(m, pa[1], pb[1])]
                };
                if cross(m, ls[0], ls[1]) {
                    continue;
                }
                let ok = ls.iter().all(|&l| all.iter().chain(&next).all(|&c| c != l && !cross(m, l, c)));
                if ok {
                    cands.push(ls);
                }
            }
            assert!(!cands.is_empty(), "no consistent pullback of {:?}", (a, b));
            cands.sort_by_key(|c| len(m, c[0]));
            next.extend_from_slice(&cands[0]);
        }
        all.extend_from_slice(&next);
        gens.push(next);
    }
    RefLamination { m, gens }
}

pub fn to_int(m: i128, t: &Angle) -> i128 {
    let num = t.numerator() * BigInt::from(m);
    assert!((&num % t.denominator()).is_zero(), "{t} is not on the 1/{m} grid");
    (num / t.denominator()).to_i128().unwrap()
}

pub fn leaf_to_int(m: i128, l: &Leaf) -> IntLeaf {
    canon(m, to_int(m, l.a()), to_int(m, l.b()))
}

/// `tau` on integers mod `q`.
pub fn int_tau(q: i64, a: i64, b: i64) -> i64 {
    let x = (b - a).rem_euclid(q);
    x.min(q - x)
}

/// `ln 2 = sum_{k>=1} 1/(k 2^k)`, truncated with error below `2^-terms`.
pub fn ln2_series(terms: u32) -> BigRational {
    let mut sum = BigRational::zero();
    let mut pow = BigInt::one();
    for k in 1..=terms {
        pow *= 2;
        sum += BigRational::new(BigInt::one(), BigInt::from(k) * &pow);
    }
    sum
}

/// `1 - 3 d^-N / (N ln d)` for `d = 2`, evaluated in exact rationals around
/// a series value of `ln 2`.
pub fn bound_d2(n: u32) -> f64 {
    let ln2 = ln2_series(80);
    let dn = BigInt::from(2).pow(n);
    let x = BigRational::one() - BigRational::new(BigInt::from(3), dn) / (BigRational::from_integer(n.into()) * ln2);
    x.to_f64().unwrap()
}

/// Brute-force snap: scan levels and every cell on each level.
pub fn brute_snap(d: i128, start: (i128, i128), length: (i128, i128)) -> (u32, i128) {
    // start and length as fractions p/q.
    for n in 1..40u32 {
        let cells = d.pow(n);
        let mut best: Option<(i128, i128)> = None;
        for k in 0..cells {
            // offset of cell start from arc start, measured ccw, as a fraction over cells*start.1*length.1
            let den = cells * start.1 * length.1;
            let cell_start = k * start.1 * length.1;
            let arc_start = start.0 * cells * length.1;
            let off = (cell_start - arc_start).rem_euclid(den);
            let arc_len = length.0 * cells * start.1;
            if off + start.1 * length.1 <= arc_len && best.is_none_or(|(o, _)| off < o) {
                best = Some((off, k));
            }
        }
        if let Some((_, k)) = best {
            return (n, k);
        }
    }
    panic!("no cell found");
}

/// Brute-force cover counts: for each scale `m`, test each level-`m` cell
/// against every family cell at levels `N..=m`.
pub fn brute_cover_counts(d: u64, n0: u32, gens: &[Vec<u64>], upto: usize) -> Vec<u64> {
    let mut out = Vec::new();
    for m in 0..=(n0 as usize + upto) {
        let cells = d.pow(m as u32);
        let mut uncovered = 0;
        for j in 0..cells {
            let covered = gens.iter().enumerate().any(|(g, cs)| {
                let level = n0 as usize + g;
                level <= m && cs.contains(&(j / d.pow((m - level) as u32)))
            });
            if !covered {
                uncovered += 1;
            }
        }
        out.push(uncovered);
    }
    out
}
