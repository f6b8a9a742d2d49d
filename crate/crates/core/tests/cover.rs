mod common;

use biaccess::circle::{Angle, ArcInterval, Degree};
use biaccess::cover::*;
use biaccess::lamination::{build_quadratic_lamination, find_unnested_triple};
use biaccess::narrow::narrow_generations;
use common::*;
use num_traits::ToPrimitive;
use proptest::prelude::*;

fn cells(d: u32, n: u32, idx: [u64; 3]) -> [ArcInterval; 3] {
    idx.map(|index| GridCell { level: n, index }.arc(Degree::new(d).unwrap()))
}

fn lex(d: u32, n: u32, depth: usize) -> IntervalFamily {
    build_families(cells(d, n, [0, 1, 2]), d, depth, DeletionOracle::Lex).unwrap()
}

fn generations(fam: &IntervalFamily) -> Vec<Vec<u64>> {
    (0..=fam.depth()).map(|n| fam.cells(n).map(|c| c.index).collect()).collect()
}

#[test]
fn snap_examples() {
    let c = snap_to_grid(&ArcInterval::new(Angle::frac(1, 3), Angle::frac(2, 3)).unwrap(), 2).unwrap();
    assert_eq!((c.level, c.index), (3, 3));
    assert_eq!(c.arc(Degree::TWO), ArcInterval::new(Angle::frac(3, 8), Angle::frac(1, 2)).unwrap());
    let whole = ArcInterval::new(Angle::zero(), Angle::frac(1, 2)).unwrap();
    let c = snap_to_grid(&whole, 2).unwrap();
    assert_eq!(c.arc(Degree::TWO), whole);
}

proptest! {
    #[test]
    fn snap_agrees_with_scan(d in 2u32..4, q in 2i128..40, p in 0i128..40, lq in 2i128..30, lp in 1i128..30) {
        prop_assume!(p < q && lp < lq);
        let arc = ArcInterval::new(Angle::frac(p as i64, q as i64), Angle::frac((p * lq + lp * q) as i64, (q * lq) as i64)).unwrap();
        let cell = snap_to_grid(&arc, d).unwrap();
        let (n, k) = brute_snap(i128::from(d), (p, q), (lp, lq));
        prop_assert_eq!((cell.level, i128::from(cell.index as i64)), (n, k));
        prop_assert!(arc.contains_arc(&cell.arc(Degree::new(d).unwrap())));
    }
}

#[test]
fn lex_family_sizes() {
    for d in [2u32, 3, 5] {
        for n in [2u32, 3] {
            let depth = if d == 5 { 5 } else { 8 };
            let fam = lex(d, n, depth);
            let want: Vec<usize> = (0..=depth as u32).map(|k| d.pow(k) as usize + 2).collect();
            assert_eq!(fam.sizes(), want, "d={d} N={n}");
            assert!(fam.deletions()[1..].iter().all(|&x| x == 2 * (d as usize - 1)));
        }
    }
}

#[test]
fn keep_family_triples() {
    let fam = build_families(cells(3, 2, [0, 3, 6]), 3, 4, DeletionOracle::Keep).unwrap();
    assert_eq!(fam.sizes(), vec![3, 9, 27, 81, 243]);
}

#[test]
fn generations_map_onto_their_parents() {
    for d in [2u32, 3] {
        let fam = lex(d, 2, 5);
        let deg = Degree::new(d).unwrap();
        for n in 1..=fam.depth() {
            let prev: Vec<ArcInterval> = fam.arcs(n - 1);
            for c in fam.arcs(n) {
                let image = ArcInterval::new(c.start().mul_by(deg), c.end().mul_by(deg)).unwrap();
                assert!(prev.contains(&image));
            }
            let arcs = fam.arcs(n);
            for (i, x) in arcs.iter().enumerate() {
                assert!(arcs[i + 1..].iter().all(|y| x.disjoint(y)));
            }
        }
    }
}

#[test]
fn rejects_bad_bases() {
    let d = Degree::TWO;
    let mixed = [GridCell { level: 2, index: 0 }.arc(d), GridCell { level: 3, index: 4 }.arc(d), GridCell { level: 2, index: 3 }.arc(d)];
    assert!(matches!(build_families(mixed, 2, 1, DeletionOracle::Lex), Err(CoverError::NotACell(_))));
    let overlap = cells(2, 2, [0, 0, 1]);
    assert!(matches!(build_families(overlap, 2, 1, DeletionOracle::Lex), Err(CoverError::Overlap(..))));
    assert!(matches!(build_families(cells(2, 2, [0, 1, 2]), 2, 70, DeletionOracle::Lex), Err(CoverError::Overflow(_))));
}

#[test]
fn cover_counts_match_scan() {
    for (d, n, depth) in [(2u32, 2u32, 6usize), (2, 3, 5), (3, 2, 4), (5, 2, 2)] {
        let fam = lex(d, n, depth);
        let seq = cover_counts(&fam, depth).unwrap();
        assert_eq!(seq.counts, brute_cover_counts(u64::from(d), n, &generations(&fam), depth), "d={d} N={n}");
        seq.check_recurrence().unwrap();
    }
}

#[test]
fn recurrence_violation_is_reported() {
    let seq = CoverSequence { degree: Degree::new(3).unwrap(), base_exponent: 1, counts: vec![1, 3, 12] };
    assert!(matches!(seq.check_recurrence(), Err(CoverError::Recurrence { m: 1, got: 12, bound: 11 })));
}

#[test]
fn bound_matches_series_oracle() {
    for n in 2..=12 {
        assert!((minkowski_bound(2, n).unwrap() - bound_d2(n)).abs() < 1e-12, "N={n}");
    }
    for d in [2u32, 3, 5] {
        let mut last = f64::NEG_INFINITY;
        for n in 2..=10 {
            let b = minkowski_bound(d, n).unwrap();
            assert!(b < 1.0 && b > last);
            last = b;
        }
    }
    assert!(matches!(minkowski_bound(2, 0), Err(CoverError::ZeroExponent)));
}

#[test]
fn fit_recovers_exact_lines() {
    let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
    let ys: Vec<f64> = xs.iter().map(|x| 0.75 * x - 2.0).collect();
    let fit = fit_line(&xs, &ys).unwrap();
    assert!((fit.slope - 0.75).abs() < 1e-14 && (fit.intercept + 2.0).abs() < 1e-12);
    assert!(fit.stderr < 1e-12);
    assert_eq!(fit_line(&xs, &[3.0; 5]).unwrap().slope, 0.0);
    assert!(fit_line(&[1.0], &[1.0]).is_none());
}

#[test]
fn model_sequences_have_expected_growth() {
    // c_m = 2^m gives slope 1; c_m = 3^m read in base 9 gives 1/2.
    let full = CoverSequence { degree: Degree::TWO, base_exponent: 1, counts: (0..12).map(|m| 1u64 << m).collect() };
    assert!((dimension_from_counts(&full, 0.0).unwrap().slope - 1.0).abs() < 1e-12);
    let half = CoverSequence { degree: Degree::new(9).unwrap(), base_exponent: 1, counts: (0..10).map(|m| 3u64.pow(m)).collect() };
    assert!((dimension_from_counts(&half, 0.3).unwrap().slope - 0.5).abs() < 1e-12);
    let zero = CoverSequence { degree: Degree::TWO, base_exponent: 1, counts: vec![1, 2, 0, 1] };
    assert!(matches!(dimension_from_counts(&zero, 0.0), Err(CoverError::ZeroCount(2))));
}

#[test]
fn airplane_narrow_cover() {
    let lam = build_quadratic_lamination(&Angle::frac(3, 7), 16).unwrap();
    let t = find_unnested_triple(&lam).unwrap();
    let fam = narrow_generations(&t.leaves, &lam, 13).unwrap();
    let ifam = narrow_interval_family(&fam, &lam, 13, 5).unwrap();
    assert_eq!(ifam.base_exponent(), 5);
    assert_eq!(ifam.sizes(), fam.counts());
    let seq = cover_counts(&ifam, 13).unwrap();
    assert_eq!(
        seq.counts,
        vec![1, 2, 4, 8, 16, 29, 52, 94, 171, 313, 574, 1054, 1937, 3561, 6548, 12042, 22147, 40733, 74918]
    );
    let fit = dimension_from_counts(&seq, 0.5).unwrap();
    assert!(fit.slope < minkowski_bound(2, 5).unwrap());
    let gens = generations(&ifam);
    assert_eq!(brute_cover_counts(2, 5, &gens[..=8], 8), seq.counts[..=13].to_vec());
    for n in 0..=ifam.depth() {
        for arc in ifam.arcs(n) {
            let len = arc.length().to_f64().unwrap();
            assert!((len - 2f64.powi(-(5 + n as i32))).abs() < 1e-18);
        }
    }
}
