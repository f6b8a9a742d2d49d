//! Narrow preimages of an un-nested triple and the counts they generate.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::circle::{Angle, CircleError, Degree};
use crate::lamination::{forward, is_unnested, Lamination, Leaf};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NarrowError {
    #[error(transparent)]
    Circle(#[from] CircleError),
    #[error("{child} does not map onto {parent}")]
    NotAChild { parent: Leaf, child: Leaf },
    #[error("the base leaves are not pairwise un-nested")]
    NotUnnested,
    #[error("{0} is not a leaf of the lamination")]
    MissingLeaf(Leaf),
    #[error("{requested} narrow generations need lamination depth {needed}, have {available}")]
    InsufficientDepth { requested: usize, needed: usize, available: usize },
    #[error("s_{next} = {got} is below d*s_{k} - 2(d-1) = {bound}", next = .k + 1)]
    Recurrence { k: usize, got: usize, bound: i64 },
}

/// Whether `child`, a preimage of `parent`, has exactly `1/d` of its length.
pub fn is_narrow_child(parent: &Leaf, child: &Leaf, d: u32) -> Result<bool, NarrowError> {
    let degree = Degree::new(d)?;
    if forward(child, degree).leaf() != Some(parent) {
        return Err(NarrowError::NotAChild { parent: parent.clone(), child: child.clone() });
    }
    Ok(narrow(parent, child, degree))
}

fn narrow(parent: &Leaf, child: &Leaf, d: Degree) -> bool {
    child.length() * BigRational::from_integer(d.as_bigint()) == parent.length()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NarrowMember {
    /// Index into the lamination.
    pub index: usize,
    pub leaf: Leaf,
    /// Which base leaf (0, 1 or 2) this member descends from.
    pub ancestor: usize,
}

#[derive(Debug, Clone)]
pub struct NarrowFamily {
    degree: Degree,
    base: [Leaf; 3],
    generations: Vec<Vec<NarrowMember>>,
}

impl NarrowFamily {
    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn base(&self) -> &[Leaf; 3] {
        &self.base
    }

    pub fn generations(&self) -> &[Vec<NarrowMember>] {
        &self.generations
    }

    /// `s_k` for each computed generation.
    pub fn counts(&self) -> Vec<usize> {
        self.generations.iter().map(Vec::len).collect()
    }

    /// Rows `(k, s_k, d*s_{k-1} - 2(d-1), slack)` for `k >= 1`.
    pub fn recurrence_rows(&self) -> Vec<(usize, usize, i64, i64)> {
        let d = i64::from(self.degree.get());
        let s = self.counts();
        (1..s.len())
            .map(|k| {
                let bound = d * s[k - 1] as i64 - 2 * (d - 1);
                (k, s[k], bound, s[k] as i64 - bound)
            })
            .collect()
    }

    pub fn check_recurrence(&self) -> Result<(), NarrowError> {
        for (k, got, bound, slack) in self.recurrence_rows() {
            if slack < 0 {
                return Err(NarrowError::Recurrence { k: k - 1, got, bound });
            }
        }
        Ok(())
    }

    /// Every generation-`k` member has length `l0 / d^k` for its ancestor's `l0`.
    pub fn check_exact_lengths(&self) -> bool {
        let d = BigRational::from_integer(self.degree.as_bigint());
        let mut scale = BigRational::from_integer(BigInt::from(1));
        for gen in &self.generations {
            for m in gen {
                if m.leaf.length() * &scale != self.base[m.ancestor].length() {
                    return false;
                }
            }
            scale *= &d;
        }
        true
    }
}

/// Follow narrow children of the triple through `n` generations of `lam`.
///
/// Each generation's counts are checked against `s_{k+1} >= d*s_k - 2(d-1)`.
pub fn narrow_generations(triple: &[Leaf; 3], lam: &Lamination, n: usize) -> Result<NarrowFamily, NarrowError> {
    if !is_unnested(triple) {
        return Err(NarrowError::NotUnnested);
    }
    let degree = lam.degree();
    let mut base = Vec::with_capacity(3);
    let mut deepest = 0;
    for (ancestor, leaf) in triple.iter().enumerate() {
        let index = lam.index_of(leaf).ok_or_else(|| NarrowError::MissingLeaf(leaf.clone()))?;
        deepest = deepest.max(lam.record(index).generation);
        base.push(NarrowMember { index, leaf: leaf.clone(), ancestor });
    }
    if deepest + n > lam.depth() {
        return Err(NarrowError::InsufficientDepth { requested: n, needed: deepest + n, available: lam.depth() });
    }
    let mut generations = vec![base];
    for _ in 0..n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for m in generations.last().unwrap() {
            for &c in lam.children(m.index) {
                let child = &lam.record(c).leaf;
                if narrow(&m.leaf, child, degree) && seen.insert(c) {
                    next.push(NarrowMember { index: c, leaf: child.clone(), ancestor: m.ancestor });
                }
            }
        }
        generations.push(next);
    }
    let fam = NarrowFamily { degree, base: triple.clone(), generations };
    fam.check_recurrence()?;
    Ok(fam)
}

/// Number of generations with a member whose open shorter arc contains `t`.
pub fn e_membership_depth(t: &Angle, fam: &NarrowFamily) -> usize {
    fam.generations.iter().filter(|g| g.iter().any(|m| m.leaf.strictly_surrounds(t))).count()
}

/// The innermost member containing `t` in each generation, outermost first.
pub fn e_membership_chain(t: &Angle, fam: &NarrowFamily) -> Vec<Leaf> {
    fam.generations
        .iter()
        .filter_map(|g| g.iter().find(|m| m.leaf.strictly_surrounds(t)).map(|m| m.leaf.clone()))
        .collect()
}
