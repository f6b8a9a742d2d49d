//! Leaves, laminations, and the queries built on top of them.
//!
//! A [`Leaf`] is an unordered pair of distinct angles: the combinatorial
//! shadow of two external rays landing at a common point. A [`Lamination`]
//! is a finite, generation-stratified family of pairwise non-crossing
//! leaves, where every leaf past generation 0 maps forward onto a leaf of
//! the previous generation.

mod build;
mod classify;
mod render;
mod text;

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::circle::{self, Angle, ArcInterval, CircleError, Degree};

pub use build::{build_quadratic_lamination, chebyshev_lamination, quadratic_pullback};
pub use classify::{
    classify_trichotomy, find_unnested_triple, is_unnested, j_endpoint_witness, polygons, Trichotomy,
    UnnestedTriple,
};
pub use render::{render_svg, ChordStyle};
pub use text::{parse_lamination, write_lamination};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaminationError {
    #[error(transparent)]
    Circle(#[from] CircleError),
    #[error("a leaf needs two distinct endpoints, got {0} twice")]
    DegenerateLeaf(Angle),
    #[error("more than one non-crossing pullback of {leaf} is consistent with the context")]
    Ambiguous { leaf: Leaf },
    #[error("no non-crossing pullback of {leaf} exists; its preimages collapse onto a critical chord")]
    Critical { leaf: Leaf },
    #[error("the major leaf needs a nonzero angle")]
    ZeroAngle,
    #[error("leaf {leaf} of generation {generation} does not map onto a leaf of generation {}", .generation - 1)]
    ForwardInvariance { leaf: Leaf, generation: usize },
    #[error("leaves {0} and {1} cross")]
    Crossing(Leaf, Leaf),
    #[error("leaf {leaf} appears twice (generation {generation})")]
    Duplicate { leaf: Leaf, generation: usize },
    #[error("the trichotomy needs a lamination of depth at least 3, got {0}")]
    TooShallow(usize),
    #[error("neither the interval pattern nor an un-nested triple is certified at depth {0}")]
    Inconclusive(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Unordered pair of distinct angles.
///
/// Stored so that the counterclockwise arc from `a` to `b` is the shorter
/// one. Diameters (length exactly 1/2) put the numerically smaller endpoint
/// first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Leaf {
    a: Angle,
    b: Angle,
}

impl Leaf {
    pub fn new(x: Angle, y: Angle) -> Result<Self, LaminationError> {
        if x == y {
            return Err(LaminationError::DegenerateLeaf(x));
        }
        let l = x.ccw_to(&y);
        let half = circle::half();
        let (a, b) = if l < half {
            (x, y)
        } else if l > half {
            (y, x)
        } else if x < y {
            (x, y)
        } else {
            (y, x)
        };
        Ok(Leaf { a, b })
    }

    /// Convenience constructor from small fractions.
    pub fn frac(p1: i64, q1: i64, p2: i64, q2: i64) -> Self {
        Leaf::new(Angle::frac(p1, q1), Angle::frac(p2, q2)).expect("distinct endpoints")
    }

    pub fn a(&self) -> &Angle {
        &self.a
    }

    pub fn b(&self) -> &Angle {
        &self.b
    }

    pub fn endpoints(&self) -> [&Angle; 2] {
        [&self.a, &self.b]
    }

    /// `tau(a, b)`, in `(0, 1/2]`.
    pub fn length(&self) -> BigRational {
        self.a.ccw_to(&self.b)
    }

    pub fn is_diameter(&self) -> bool {
        self.length() == circle::half()
    }

    /// The arc counterclockwise from `a` to `b`: the shorter side, or one
    /// of the two halves for a diameter.
    pub fn short_arc(&self) -> ArcInterval {
        ArcInterval::new(self.a.clone(), self.b.clone()).expect("leaf endpoints are distinct")
    }

    pub fn has_endpoint(&self, t: &Angle) -> bool {
        &self.a == t || &self.b == t
    }

    pub fn shares_endpoint(&self, other: &Leaf) -> bool {
        self.has_endpoint(&other.a) || self.has_endpoint(&other.b)
    }

    /// Whether `t` lies strictly inside the shorter arc. Diameters contain nothing.
    pub fn strictly_surrounds(&self, t: &Angle) -> bool {
        !self.is_diameter() && self.short_arc().contains(t)
    }
}

impl fmt::Display for Leaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", self.a, self.b)
    }
}

impl fmt::Debug for Leaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// True iff the endpoints of `l2` strictly interleave those of `l1`.
pub fn leaves_cross(l1: &Leaf, l2: &Leaf) -> bool {
    if l1.shares_endpoint(l2) {
        return false;
    }
    let len = l1.a.ccw_to(&l1.b);
    (l1.a.ccw_to(&l2.a) < len) != (l1.a.ccw_to(&l2.b) < len)
}

/// Forward image of a leaf under `t -> d*t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ForwardImage {
    Leaf(Leaf),
    /// Both endpoints land on the same angle: the leaf is critical.
    Degenerate(Angle),
}

impl ForwardImage {
    pub fn leaf(&self) -> Option<&Leaf> {
        match self {
            ForwardImage::Leaf(l) => Some(l),
            ForwardImage::Degenerate(_) => None,
        }
    }
}

pub fn forward_leaf(l: &Leaf, d: u32) -> Result<ForwardImage, CircleError> {
    Ok(forward(l, Degree::new(d)?))
}

pub(crate) fn forward(l: &Leaf, d: Degree) -> ForwardImage {
    let x = l.a.mul_by(d);
    let y = l.b.mul_by(d);
    if x == y {
        ForwardImage::Degenerate(x)
    } else {
        ForwardImage::Leaf(Leaf { a: x, b: y }.canonical())
    }
}

impl Leaf {
    fn canonical(self) -> Leaf {
        Leaf::new(self.a, self.b).expect("distinct endpoints")
    }
}

/// All pairings of the `d` preimages of `l.a` with those of `l.b` whose
/// leaves are mutually non-crossing, cross nothing in `context`, and do not
/// duplicate a context leaf.
pub fn consistent_pullbacks(l: &Leaf, d: Degree, context: &[Leaf]) -> Vec<Vec<Leaf>> {
    let pa = l.a.preimages(d);
    let pb = l.b.preimages(d);
    let n = d.get() as usize;
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let leaves: Vec<Leaf> = (0..n)
            .map(|i| Leaf::new(pa[i].clone(), pb[perm[i]].clone()).expect("preimages of distinct angles differ"))
            .collect();
        let internal_ok = leaves
            .iter()
            .enumerate()
            .all(|(i, x)| leaves[i + 1..].iter().all(|y| !leaves_cross(x, y)));
        let context_ok = leaves
            .iter()
            .all(|x| context.iter().all(|c| c != x && !leaves_cross(x, c)));
        if internal_ok && context_ok {
            out.push(leaves);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    out
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// The unique pullback of `l` that is consistent with `context`.
pub fn pullback_leaf(l: &Leaf, d: u32, context: &[Leaf]) -> Result<Vec<Leaf>, LaminationError> {
    let d = Degree::new(d)?;
    let mut found = consistent_pullbacks(l, d, context);
    match found.len() {
        0 => Err(LaminationError::Critical { leaf: l.clone() }),
        1 => Ok(found.pop().unwrap()),
        _ => Err(LaminationError::Ambiguous { leaf: l.clone() }),
    }
}

/// One leaf of a lamination with its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafRecord {
    pub leaf: Leaf,
    pub generation: usize,
    /// Index of the forward image in the previous generation.
    pub parent: Option<usize>,
    /// The forward image is a single point.
    pub critical: bool,
}

#[derive(Debug, Clone)]
pub struct Lamination {
    degree: Degree,
    records: Vec<LeafRecord>,
    /// `starts[k]..starts[k+1]` are the indices of generation `k`.
    starts: Vec<usize>,
    children: Vec<Vec<usize>>,
    critical_chord: Option<Leaf>,
}

impl Lamination {
    pub fn empty(degree: Degree) -> Self {
        Lamination { degree, records: Vec::new(), starts: vec![0], children: Vec::new(), critical_chord: None }
    }

    /// Assemble a lamination from explicit generations, linking each leaf to
    /// its forward image in the previous generation.
    pub fn from_generations(degree: Degree, generations: Vec<Vec<Leaf>>) -> Result<Self, LaminationError> {
        let mut lam = Lamination::empty(degree);
        let mut seen: HashMap<Leaf, usize> = HashMap::new();
        for (k, gen) in generations.into_iter().enumerate() {
            let prev: HashMap<&Leaf, usize> = match k {
                0 => HashMap::new(),
                _ => lam.generation_range(k - 1).map(|i| (&lam.records[i].leaf, i)).collect(),
            };
            let mut records = Vec::with_capacity(gen.len());
            for leaf in gen {
                if let Some(&g) = seen.get(&leaf) {
                    return Err(LaminationError::Duplicate { leaf, generation: g });
                }
                let parent = if k == 0 {
                    None
                } else {
                    let image = forward(&leaf, degree);
                    match image.leaf().and_then(|img| prev.get(img)) {
                        Some(&i) => Some(i),
                        None => return Err(LaminationError::ForwardInvariance { leaf, generation: k }),
                    }
                };
                seen.insert(leaf.clone(), k);
                records.push((leaf, parent));
            }
            lam.push_generation(records);
        }
        Ok(lam)
    }

    pub(crate) fn push_generation(&mut self, leaves: Vec<(Leaf, Option<usize>)>) {
        let generation = self.starts.len() - 1;
        for (leaf, parent) in leaves {
            let critical = matches!(forward(&leaf, self.degree), ForwardImage::Degenerate(_));
            let idx = self.records.len();
            if let Some(p) = parent {
                self.children[p].push(idx);
            }
            self.records.push(LeafRecord { leaf, generation, parent, critical });
            self.children.push(Vec::new());
        }
        self.starts.push(self.records.len());
    }

    pub(crate) fn set_critical_chord(&mut self, chord: Leaf) {
        self.critical_chord = Some(chord);
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    /// The chord used to disambiguate pullbacks, when the lamination was
    /// built from one.
    pub fn critical_chord(&self) -> Option<&Leaf> {
        self.critical_chord.as_ref()
    }

    /// Number of generations.
    pub fn generation_count(&self) -> usize {
        self.starts.len() - 1
    }

    /// Index of the last generation (0 for a single generation or an empty
    /// lamination).
    pub fn depth(&self) -> usize {
        self.generation_count().saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[LeafRecord] {
        &self.records
    }

    pub fn record(&self, idx: usize) -> &LeafRecord {
        &self.records[idx]
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Leaf> + '_ {
        self.records.iter().map(|r| &r.leaf)
    }

    pub fn generation_range(&self, k: usize) -> std::ops::Range<usize> {
        if k + 1 >= self.starts.len() {
            return 0..0;
        }
        self.starts[k]..self.starts[k + 1]
    }

    pub fn generation(&self, k: usize) -> &[LeafRecord] {
        &self.records[self.generation_range(k)]
    }

    /// Leaves of generations `0..=k`.
    pub fn up_to_generation(&self, k: usize) -> &[LeafRecord] {
        let end = self.starts[(k + 1).min(self.starts.len() - 1)];
        &self.records[..end]
    }

    pub fn children(&self, idx: usize) -> &[usize] {
        &self.children[idx]
    }

    pub fn index_of(&self, leaf: &Leaf) -> Option<usize> {
        self.records.iter().position(|r| &r.leaf == leaf)
    }

    /// Check forward invariance of every parent link.
    pub fn check_forward_invariance(&self) -> Result<(), LaminationError> {
        for r in &self.records {
            if let Some(p) = r.parent {
                let parent = &self.records[p];
                let ok = parent.generation + 1 == r.generation
                    && forward(&r.leaf, self.degree).leaf() == Some(&parent.leaf);
                if !ok {
                    return Err(LaminationError::ForwardInvariance { leaf: r.leaf.clone(), generation: r.generation });
                }
            } else if r.generation > 0 {
                return Err(LaminationError::ForwardInvariance { leaf: r.leaf.clone(), generation: r.generation });
            }
        }
        Ok(())
    }

    /// Exhaustive pairwise crossing check (quadratic in the leaf count).
    pub fn check_non_crossing(&self) -> Result<(), LaminationError> {
        self.check_non_crossing_upto(self.depth())
    }

    /// Pairwise crossing check over generations `0..=k`.
    pub fn check_non_crossing_upto(&self, k: usize) -> Result<(), LaminationError> {
        let recs = self.up_to_generation(k);
        let Some(m) = common_denominator(recs.iter().map(|r| &r.leaf)) else {
            for (i, x) in recs.iter().enumerate() {
                for y in &recs[i + 1..] {
                    if leaves_cross(&x.leaf, &y.leaf) {
                        return Err(LaminationError::Crossing(x.leaf.clone(), y.leaf.clone()));
                    }
                }
            }
            return Ok(());
        };
        // Same test on integer numerators over a common denominator.
        let ints: Vec<(i128, i128)> = recs.iter().map(|r| (scaled(&r.leaf.a, m), scaled(&r.leaf.b, m))).collect();
        let inside = |t: i128, a: i128, b: i128| (t - a).rem_euclid(m) < (b - a).rem_euclid(m);
        for (i, &(a, b)) in ints.iter().enumerate() {
            for (j, &(c, d)) in ints.iter().enumerate().skip(i + 1) {
                if a == c || a == d || b == c || b == d {
                    continue;
                }
                if inside(c, a, b) != inside(d, a, b) {
                    return Err(LaminationError::Crossing(recs[i].leaf.clone(), recs[j].leaf.clone()));
                }
            }
        }
        Ok(())
    }
}

/// Least common denominator of all endpoints, if it fits in an `i128`.
fn common_denominator<'a>(leaves: impl Iterator<Item = &'a Leaf>) -> Option<i128> {
    let mut m = BigInt::from(1);
    for l in leaves {
        for e in l.endpoints() {
            m = m.lcm(e.denominator());
        }
    }
    m.to_i128().filter(|&v| v < i128::MAX / 4)
}

fn scaled(t: &Angle, m: i128) -> i128 {
    (t.numerator() * BigInt::from(m) / t.denominator()).to_i128().expect("fits by construction")
}
