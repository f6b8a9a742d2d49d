mod common;

use biaccess::circle::Angle;
use biaccess::lamination::{build_quadratic_lamination, find_unnested_triple, Lamination, Leaf};
use biaccess::narrow::*;
use common::*;

fn airplane(depth: usize) -> (Lamination, NarrowFamily) {
    let lam = build_quadratic_lamination(&Angle::frac(3, 7), depth).unwrap();
    let t = find_unnested_triple(&lam).unwrap();
    let deepest = t.indices.iter().map(|&i| lam.record(i).generation).max().unwrap();
    let fam = narrow_generations(&t.leaves, &lam, depth - deepest).unwrap();
    (lam, fam)
}

#[test]
fn counts_match_integer_model() {
    let depth = 9;
    let (lam, fam) = airplane(depth);
    let r = reference_quadratic(3, 7, depth as u32);
    // Narrow descendants by brute force: leaves one generation down that map
    // onto a member and have half its length.
    let m = r.m;
    let mut current: Vec<(usize, IntLeaf)> =
        fam.base().iter().map(|l| (lam.record(lam.index_of(l).unwrap()).generation, leaf_to_int(m, l))).collect();
    let mut counts = vec![current.len()];
    for _ in 1..fam.generations().len() {
        let mut next = Vec::new();
        for &(g, (a, b)) in &current {
            for &c in &r.gens[g + 1] {
                let image = canon(m, (2 * c.0).rem_euclid(m), (2 * c.1).rem_euclid(m));
                if image == (a, b) && 2 * len(m, c) == len(m, (a, b)) && !next.contains(&(g + 1, c)) {
                    next.push((g + 1, c));
                }
            }
        }
        counts.push(next.len());
        current = next;
    }
    assert_eq!(fam.counts(), counts);
}

#[test]
fn recurrence_and_exactness() {
    let (_, fam) = airplane(12);
    let s = fam.counts();
    assert_eq!(s[0], 3);
    assert!(s[1] >= 4);
    for w in s.windows(2) {
        assert!(w[1] as i64 >= 2 * w[0] as i64 - 2);
    }
    assert!(fam.check_exact_lengths());
    fam.check_recurrence().unwrap();
}

#[test]
fn members_of_a_generation_are_disjoint() {
    let (_, fam) = airplane(12);
    for gen in fam.generations() {
        for (i, x) in gen.iter().enumerate() {
            for y in &gen[i + 1..] {
                assert!(x.leaf.short_arc().disjoint(&y.leaf.short_arc()), "{} {}", x.leaf, y.leaf);
            }
        }
    }
}

#[test]
fn membership_depth_follows_a_chain() {
    let (_, fam) = airplane(10);
    // Follow the first member down and take a point deep inside the last one.
    let mut chain = vec![fam.generations()[0][0].clone()];
    for gen in &fam.generations()[1..] {
        let last = chain.last().unwrap();
        if let Some(m) = gen.iter().find(|m| last.leaf.short_arc().contains_arc(&m.leaf.short_arc())) {
            chain.push(m.clone());
        }
    }
    assert_eq!(chain.len(), fam.generations().len());
    let inner = &chain.last().unwrap().leaf;
    let mid = Angle::from_ratio(inner.a().as_ratio() + inner.length() / num_bigint::BigInt::from(2));
    assert_eq!(e_membership_depth(&mid, &fam), chain.len());
    let witness = e_membership_chain(&mid, &fam);
    assert!(witness.windows(2).all(|w| w[0].length() > w[1].length()));
}

#[test]
fn endpoint_of_base_leaf_is_not_inside_it() {
    let (_, fam) = airplane(8);
    let leaf = &fam.base()[0];
    assert!(!fam.generations()[0].iter().any(|m| m.leaf.strictly_surrounds(leaf.a())));
}

#[test]
fn witnessed_angles_have_no_long_leaf_escaping() {
    let (lam, fam) = airplane(10);
    for gen in fam.generations().iter().skip(1) {
        for m in gen.iter().take(4) {
            let mid = Angle::from_ratio(m.leaf.a().as_ratio() + m.leaf.length() / num_bigint::BigInt::from(2));
            let arc = m.leaf.short_arc();
            for l in lam.leaves() {
                if l.has_endpoint(&mid) && l.length() > m.leaf.length() {
                    let other = if l.a() == &mid { l.b() } else { l.a() };
                    assert!(arc.contains(other), "{l} escapes {}", m.leaf);
                }
            }
        }
    }
}

#[test]
fn rejects_nested_or_missing_bases() {
    let lam = build_quadratic_lamination(&Angle::frac(3, 7), 6).unwrap();
    let nested = [Leaf::frac(1, 8, 3, 8), Leaf::frac(1, 4, 5, 16), Leaf::frac(5, 8, 3, 4)];
    assert_eq!(narrow_generations(&nested, &lam, 1).unwrap_err(), NarrowError::NotUnnested);
    let foreign = [Leaf::frac(1, 16, 1, 8), Leaf::frac(1, 4, 5, 16), Leaf::frac(5, 8, 3, 4)];
    assert!(matches!(narrow_generations(&foreign, &lam, 1), Err(NarrowError::MissingLeaf(_))));
}
