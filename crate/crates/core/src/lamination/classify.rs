use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;

use super::{Lamination, LaminationError, Leaf};
use crate::circle::{self, Angle};

/// Three leaves whose closed shorter arcs are pairwise disjoint, listed in
/// counterclockwise order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnnestedTriple {
    pub leaves: [Leaf; 3],
    /// Lamination indices of the three leaves.
    pub indices: [usize; 3],
    /// Smallest generation prefix in which the triple exists.
    pub depth: usize,
}

/// The three cases for the set of biaccessible angles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Trichotomy {
    NoBiaccess,
    /// Every leaf is symmetric under `t -> c - t`.
    Interval { center: Angle },
    ThreeEndpoints(Box<UnnestedTriple>),
}

impl Trichotomy {
    pub fn label(&self) -> &'static str {
        match self {
            Trichotomy::NoBiaccess => "NoBiaccess",
            Trichotomy::Interval { .. } => "Interval",
            Trichotomy::ThreeEndpoints(_) => "ThreeEndpoints",
        }
    }
}

/// Whether the leaves are pairwise un-nested: each shorter arc is shorter than
/// a half and the closed shorter arcs are pairwise disjoint.
pub fn is_unnested(leaves: &[Leaf]) -> bool {
    if leaves.iter().any(Leaf::is_diameter) {
        return false;
    }
    leaves
        .iter()
        .enumerate()
        .all(|(i, x)| leaves[i + 1..].iter().all(|y| x.short_arc().closure_disjoint(&y.short_arc())))
}

struct Span {
    start: Angle,
    len: BigRational,
}

/// Find two closed arcs among `spans` that are disjoint from each other and
/// from the closed arc `spans[pivot]`.
fn pair_outside(spans: &[Span], pivot: usize) -> Option<(usize, usize)> {
    let p = &spans[pivot];
    let one = BigRational::from_integer(1.into());
    // Linear coordinates on the complement, measured from the pivot's start.
    let mut min_right: Option<(BigRational, usize)> = None;
    let mut max_left: Option<(BigRational, usize)> = None;
    for (j, s) in spans.iter().enumerate() {
        if j == pivot {
            continue;
        }
        let left = p.start.ccw_to(&s.start);
        let right = &left + &s.len;
        if left <= p.len || right >= one {
            continue;
        }
        if min_right.as_ref().is_none_or(|(r, _)| &right < r) {
            min_right = Some((right, j));
        }
        if max_left.as_ref().is_none_or(|(l, _)| &left > l) {
            max_left = Some((left, j));
        }
    }
    match (min_right, max_left) {
        (Some((r, i)), Some((l, j))) if r < l => Some((i, j)),
        _ => None,
    }
}

/// Search for an un-nested triple, scanning generation prefixes `0..=k` in
/// increasing `k` so that the shallowest triple is returned.
///
/// Each prefix scan is quadratic in the number of leaves.
pub fn find_unnested_triple(lam: &Lamination) -> Option<UnnestedTriple> {
    let half = circle::half();
    let mut spans = Vec::new();
    let mut ids = Vec::new();
    for k in 0..lam.generation_count() {
        for idx in lam.generation_range(k) {
            let leaf = &lam.record(idx).leaf;
            let len = leaf.length();
            if len < half {
                spans.push(Span { start: leaf.a().clone(), len });
                ids.push(idx);
            }
        }
        for pivot in 0..spans.len() {
            if let Some((i, j)) = pair_outside(&spans, pivot) {
                let mut indices = [ids[pivot], ids[i], ids[j]];
                // Order counterclockwise from the pivot.
                let base = lam.record(ids[pivot]).leaf.a().clone();
                indices[1..].sort_by_key(|&x| base.ccw_to(lam.record(x).leaf.a()));
                let leaves = indices.map(|x| lam.record(x).leaf.clone());
                debug_assert!(is_unnested(&leaves));
                return Some(UnnestedTriple { leaves, indices, depth: k });
            }
        }
    }
    None
}

/// Classify the finite lamination into one of the three cases.
pub fn classify_trichotomy(lam: &Lamination) -> Result<Trichotomy, LaminationError> {
    if lam.is_empty() {
        return Ok(Trichotomy::NoBiaccess);
    }
    if lam.depth() < 3 {
        return Err(LaminationError::TooShallow(lam.depth()));
    }
    if let Some(center) = symmetry_center(lam) {
        return Ok(Trichotomy::Interval { center });
    }
    match find_unnested_triple(lam) {
        Some(t) => Ok(Trichotomy::ThreeEndpoints(Box::new(t))),
        None => Err(LaminationError::Inconclusive(lam.depth())),
    }
}

/// The common value `c = a + b` if every leaf is symmetric about it and the
/// two fixed points of `t -> c - t` are never endpoints.
fn symmetry_center(lam: &Lamination) -> Option<Angle> {
    let first = &lam.record(0).leaf;
    let c = Angle::from_ratio(first.a().as_ratio() + first.b().as_ratio());
    let fix1 = Angle::from_ratio(c.as_ratio() / BigRational::from_integer(2.into()));
    let fix2 = fix1.shifted(&circle::half());
    let ok = lam.leaves().all(|l| {
        Angle::from_ratio(l.a().as_ratio() + l.b().as_ratio()) == c && !l.has_endpoint(&fix1) && !l.has_endpoint(&fix2)
    });
    ok.then_some(c)
}

/// Longest chain of leaves from increasing generations, with strictly
/// decreasing lengths, whose open shorter arcs contain `t`.
///
/// Returns `None` when no leaf's shorter arc contains `t`.
pub fn j_endpoint_witness(t: &Angle, lam: &Lamination) -> Option<Vec<Leaf>> {
    let hits: Vec<(usize, BigRational, &Leaf)> = lam
        .records()
        .iter()
        .filter(|r| r.leaf.strictly_surrounds(t))
        .map(|r| (r.generation, r.leaf.length(), &r.leaf))
        .collect();
    if hits.is_empty() {
        return None;
    }
    // Records are stored by generation, so a left-to-right DP suffices.
    let n = hits.len();
    let mut best = vec![1usize; n];
    let mut prev = vec![usize::MAX; n];
    for i in 0..n {
        for j in 0..i {
            if hits[j].0 < hits[i].0 && hits[j].1 > hits[i].1 && best[j] + 1 > best[i] {
                best[i] = best[j] + 1;
                prev[i] = j;
            }
        }
    }
    let mut i = (0..n).max_by_key(|&i| (best[i], std::cmp::Reverse(i))).unwrap();
    let mut chain = vec![hits[i].2.clone()];
    while prev[i] != usize::MAX {
        i = prev[i];
        chain.push(hits[i].2.clone());
    }
    chain.reverse();
    Some(chain)
}

/// Endpoint classes of size at least three: angles joined through chains of
/// leaves sharing endpoints. Each class is listed counterclockwise from 0.
pub fn polygons(lam: &Lamination) -> Vec<Vec<Angle>> {
    let mut id: BTreeMap<&Angle, usize> = BTreeMap::new();
    for l in lam.leaves() {
        for e in l.endpoints() {
            let n = id.len();
            id.entry(e).or_insert(n);
        }
    }
    let mut parent: Vec<usize> = (0..id.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for l in lam.leaves() {
        let x = find(&mut parent, id[l.a()]);
        let y = find(&mut parent, id[l.b()]);
        parent[x] = y;
    }
    let mut classes: BTreeMap<usize, BTreeSet<Angle>> = BTreeMap::new();
    for (angle, &i) in &id {
        let root = find(&mut parent, i);
        classes.entry(root).or_default().insert((*angle).clone());
    }
    let mut out: Vec<Vec<Angle>> =
        classes.into_values().filter(|c| c.len() >= 3).map(|c| c.into_iter().collect()).collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::Degree;
    use crate::lamination::{build_quadratic_lamination, chebyshev_lamination};

    #[test]
    fn chebyshev_has_no_triple_and_is_interval() {
        let lam = chebyshev_lamination(2, 4).unwrap();
        assert!(find_unnested_triple(&lam).is_none());
        assert_eq!(classify_trichotomy(&lam).unwrap(), Trichotomy::Interval { center: Angle::zero() });
    }

    #[test]
    fn empty_is_no_biaccess() {
        let lam = Lamination::empty(Degree::TWO);
        assert_eq!(classify_trichotomy(&lam).unwrap(), Trichotomy::NoBiaccess);
    }

    #[test]
    fn shallow_is_rejected() {
        let lam = build_quadratic_lamination(&Angle::frac(3, 7), 2).unwrap();
        assert_eq!(classify_trichotomy(&lam).unwrap_err(), LaminationError::TooShallow(2));
    }

    #[test]
    fn airplane_is_three_endpoints() {
        let lam = build_quadratic_lamination(&Angle::frac(3, 7), 6).unwrap();
        match classify_trichotomy(&lam).unwrap() {
            Trichotomy::ThreeEndpoints(t) => assert!(is_unnested(&t.leaves)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn witness_excludes_own_leaf() {
        let lam = build_quadratic_lamination(&Angle::frac(1, 3), 4).unwrap();
        let major = lam.record(0).leaf.clone();
        if let Some(chain) = j_endpoint_witness(major.a(), &lam) {
            assert!(!chain.contains(&major));
        }
        assert!(!major.strictly_surrounds(major.a()));
    }

    #[test]
    fn triangle_is_a_polygon() {
        let lam = Lamination::from_generations(
            Degree::new(3).unwrap(),
            vec![vec![Leaf::frac(0, 1, 1, 3), Leaf::frac(1, 3, 2, 3), Leaf::frac(2, 3, 0, 1)]],
        )
        .unwrap();
        assert_eq!(polygons(&lam), vec![vec![Angle::zero(), Angle::frac(1, 3), Angle::frac(2, 3)]]);
    }
}
