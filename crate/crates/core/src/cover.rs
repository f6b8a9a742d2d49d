//! Interval families on the `d`-adic grid, their cover counts, and dimension
//! estimates.

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::circle::{self, Angle, ArcInterval, CircleError, Degree};
use crate::lamination::{Lamination, Leaf};
use crate::narrow::NarrowFamily;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error(transparent)]
    Circle(#[from] CircleError),
    #[error("base interval {0} is not a grid cell of length d^-N")]
    NotACell(ArcInterval),
    #[error("base intervals {0} and {1} overlap")]
    Overlap(ArcInterval, ArcInterval),
    #[error("base exponent must be at least 1")]
    ZeroExponent,
    #[error("grid level {0} does not fit in 64 bits")]
    Overflow(u32),
    #[error("requested {requested} generations, only {available} available")]
    InsufficientDepth { requested: usize, available: usize },
    #[error("the deletion oracle removed {deleted} intervals in generation {generation}, more than 2(d-1)")]
    TooManyDeletions { generation: usize, deleted: usize },
    #[error("{0} is not contained in a leaf of the narrow family")]
    NoHost(ArcInterval),
    #[error("c_{next} = {got} exceeds d*c_{m} + 2(d-2) = {bound}", next = .m + 1)]
    Recurrence { m: usize, got: u64, bound: u64 },
    #[error("d^N = {0} must exceed 3")]
    TrivialBound(u64),
    #[error("need at least {need} usable points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("count at index {0} is zero")]
    ZeroCount(usize),
}

/// The cell `(index/d^level, (index+1)/d^level)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridCell {
    pub level: u32,
    pub index: u64,
}

impl GridCell {
    pub fn arc(&self, d: Degree) -> ArcInterval {
        let start = BigRational::new(BigInt::from(self.index), circle::big_pow(d.get(), self.level));
        let end = &start + circle::inv_pow(d, self.level);
        ArcInterval::new(Angle::from_ratio(start), Angle::from_ratio(end)).expect("cells have positive length")
    }

    /// The `d` preimages under `t -> d*t`, one level finer.
    pub fn preimages(&self, d: Degree) -> impl Iterator<Item = GridCell> {
        let step = u64::from(d.get()).pow(self.level);
        let (level, index) = (self.level + 1, self.index);
        (0..u64::from(d.get())).map(move |k| GridCell { level, index: index + k * step })
    }
}

/// The first cell of the coarsest grid that fits inside `arc`, together with
/// its level. Containment is of open arcs, so an aligned cell snaps to itself.
pub fn snap_to_grid(arc: &ArcInterval, d: u32) -> Result<GridCell, CoverError> {
    let d = Degree::new(d)?;
    Ok((1..).find_map(|n| snap_at(arc, d, n)).expect("some level fits"))
}

/// The first cell of level `n` counterclockwise from the start of `arc` that
/// fits inside it.
pub fn snap_at(arc: &ArcInterval, d: Degree, n: u32) -> Option<GridCell> {
    let scale = BigRational::from_integer(circle::big_pow(d.get(), n));
    let start = arc.start().as_ratio() * &scale;
    let end = &start + arc.length() * &scale;
    let k = start.ceil();
    if k.clone() + BigRational::from_integer(1.into()) > end {
        return None;
    }
    let modulus = circle::big_pow(d.get(), n);
    let index = (k.to_integer() % &modulus).try_into().ok()?;
    Some(GridCell { level: n, index })
}

/// How preimage intervals are dropped between generations.
#[derive(Debug, Clone, Copy)]
pub enum DeletionOracle<'a> {
    /// Drop the `2(d-1)` preimages with the smallest indices.
    Lex,
    /// Keep every preimage.
    Keep,
    /// Keep the preimages that lie inside a narrow child of the leaf hosting
    /// their parent interval. `hosts[i]` is the lamination index of the leaf
    /// containing base interval `i`.
    Narrow { lam: &'a Lamination, hosts: [usize; 3] },
}

/// Generations of grid cells: generation `n` lives on level `N + n`.
#[derive(Debug, Clone)]
pub struct IntervalFamily {
    degree: Degree,
    base_exponent: u32,
    generations: Vec<Vec<u64>>,
    deletions: Vec<usize>,
}

impl IntervalFamily {
    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn base_exponent(&self) -> u32 {
        self.base_exponent
    }

    pub fn depth(&self) -> usize {
        self.generations.len() - 1
    }

    /// `|I_n|` for every generation.
    pub fn sizes(&self) -> Vec<usize> {
        self.generations.iter().map(Vec::len).collect()
    }

    /// Deleted preimages per generation (generation 0 has none).
    pub fn deletions(&self) -> &[usize] {
        &self.deletions
    }

    pub fn cells(&self, n: usize) -> impl Iterator<Item = GridCell> + '_ {
        let level = self.base_exponent + n as u32;
        self.generations[n].iter().map(move |&index| GridCell { level, index })
    }

    pub fn arcs(&self, n: usize) -> Vec<ArcInterval> {
        self.cells(n).map(|c| c.arc(self.degree)).collect()
    }
}

fn checked_pow(d: Degree, level: u32) -> Result<u64, CoverError> {
    u64::from(d.get()).checked_pow(level).filter(|&v| v < 1 << 62).ok_or(CoverError::Overflow(level))
}

fn base_cells(base: &[ArcInterval; 3], d: Degree) -> Result<(u32, [u64; 3]), CoverError> {
    let len = base[0].length();
    let n = (1..64)
        .find(|&n| circle::inv_pow(d, n) == len)
        .ok_or_else(|| CoverError::NotACell(base[0].clone()))?;
    let mut cells = [0; 3];
    for (i, arc) in base.iter().enumerate() {
        let cell = snap_at(arc, d, n).filter(|c| &c.arc(d) == arc).ok_or_else(|| CoverError::NotACell(arc.clone()))?;
        cells[i] = cell.index;
        for prev in &base[..i] {
            if !prev.disjoint(arc) {
                return Err(CoverError::Overlap(prev.clone(), arc.clone()));
            }
        }
    }
    Ok((n, cells))
}

/// Iterated preimages of three disjoint grid cells of length `d^-N`, with the
/// oracle removing up to `2(d-1)` intervals per generation.
pub fn build_families(
    base: [ArcInterval; 3],
    d: u32,
    depth: usize,
    oracle: DeletionOracle<'_>,
) -> Result<IntervalFamily, CoverError> {
    let degree = Degree::new(d)?;
    let (n0, cells) = base_cells(&base, degree)?;
    checked_pow(degree, n0 + depth as u32)?;
    let max_deleted = 2 * (d as usize - 1);
    let mut generations = vec![cells.to_vec()];
    let mut deletions = vec![0];
    let mut hosts: Vec<usize> = match oracle {
        DeletionOracle::Narrow { lam, hosts } => {
            let deepest = hosts.iter().map(|&h| lam.record(h).generation).max().unwrap_or(0);
            if deepest + depth > lam.depth() {
                return Err(CoverError::InsufficientDepth { requested: deepest + depth, available: lam.depth() });
            }
            hosts.to_vec()
        }
        _ => Vec::new(),
    };
    for k in 0..depth {
        let level = n0 + k as u32;
        let prev = &generations[k];
        let mut next: Vec<u64> = Vec::with_capacity(prev.len() * d as usize);
        match oracle {
            DeletionOracle::Lex | DeletionOracle::Keep => {
                // Preimage i of cell j is j + i*d^level, so runs over i stay sorted.
                let step = checked_pow(degree, level)?;
                for i in 0..u64::from(d) {
                    next.extend(prev.iter().map(|&j| j + i * step));
                }
                if !next.is_sorted() {
                    next.sort_unstable();
                }
                if matches!(oracle, DeletionOracle::Lex) {
                    next.drain(..max_deleted.min(next.len()));
                }
            }
            DeletionOracle::Narrow { lam, .. } => {
                let mut next_hosts = Vec::with_capacity(next.capacity());
                for (&index, &host) in prev.iter().zip(&hosts) {
                    let parent = &lam.record(host).leaf;
                    let kids: Vec<(usize, ArcInterval)> = lam
                        .children(host)
                        .iter()
                        .map(|&c| (c, &lam.record(c).leaf))
                        .filter(|(_, l)| is_narrow(parent, l, degree))
                        .map(|(c, l)| (c, l.short_arc()))
                        .collect();
                    for cell in (GridCell { level, index }).preimages(degree) {
                        let arc = cell.arc(degree);
                        if let Some((c, _)) = kids.iter().find(|(_, a)| a.contains_arc(&arc)) {
                            next.push(cell.index);
                            next_hosts.push(*c);
                        }
                    }
                }
                hosts = next_hosts;
            }
        }
        let deleted = prev.len() * d as usize - next.len();
        if deleted > max_deleted {
            return Err(CoverError::TooManyDeletions { generation: k + 1, deleted });
        }
        deletions.push(deleted);
        generations.push(next);
    }
    Ok(IntervalFamily { degree, base_exponent: n0, generations, deletions })
}

fn is_narrow(parent: &Leaf, child: &Leaf, d: Degree) -> bool {
    child.length() * BigRational::from_integer(d.as_bigint()) == parent.length()
}

/// Snap the narrow family's base leaves to a common grid level, at least
/// `min_exponent`, and follow their narrow descendants.
pub fn narrow_interval_family(
    fam: &NarrowFamily,
    lam: &Lamination,
    depth: usize,
    min_exponent: u32,
) -> Result<IntervalFamily, CoverError> {
    let d = fam.degree();
    let arcs = fam.base().clone().map(|l| l.short_arc());
    let mut n = min_exponent.max(1);
    for arc in &arcs {
        n = n.max(snap_to_grid(arc, d.get())?.level);
    }
    let cells = arcs.clone().map(|a| snap_at(&a, d, n).expect("a finer grid still fits"));
    let base = cells.map(|c| c.arc(d));
    let mut hosts = [0; 3];
    for (i, m) in fam.generations()[0].iter().enumerate() {
        if !m.leaf.short_arc().contains_arc(&base[i]) {
            return Err(CoverError::NoHost(base[i].clone()));
        }
        hosts[i] = m.index;
    }
    build_families(base, d.get(), depth, DeletionOracle::Narrow { lam, hosts })
}

/// `c_m` for scales `m = 0..=N+upto`: the number of level-`m` cells not
/// inside the union of generations `0..=m-N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverSequence {
    pub degree: Degree,
    pub base_exponent: u32,
    pub counts: Vec<u64>,
}

impl CoverSequence {
    /// `d*c_m + 2(d-2)` for each `m` with a successor.
    pub fn recurrence_bounds(&self) -> Vec<u64> {
        let d = u64::from(self.degree.get());
        self.counts.iter().map(|c| d * c + 2 * (d - 2)).collect()
    }

    pub fn check_recurrence(&self) -> Result<(), CoverError> {
        let bounds = self.recurrence_bounds();
        for (m, (&bound, &got)) in bounds.iter().zip(&self.counts[1..]).enumerate() {
            if got > bound {
                return Err(CoverError::Recurrence { m, got, bound });
            }
        }
        Ok(())
    }
}

/// Merge sorted half-open intervals into `acc`, both sorted and disjoint.
fn merge(acc: Vec<(u64, u64)>, new: Vec<(u64, u64)>) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> = Vec::with_capacity(acc.len() + new.len());
    let (mut i, mut j) = (0, 0);
    while i < acc.len() || j < new.len() {
        let next = if j == new.len() || (i < acc.len() && acc[i].0 <= new[j].0) {
            i += 1;
            acc[i - 1]
        } else {
            j += 1;
            new[j - 1]
        };
        match out.last_mut() {
            Some(last) if next.0 <= last.1 => last.1 = last.1.max(next.1),
            _ => out.push(next),
        }
    }
    out
}

pub fn cover_counts(fam: &IntervalFamily, upto: usize) -> Result<CoverSequence, CoverError> {
    if upto > fam.depth() {
        return Err(CoverError::InsufficientDepth { requested: upto, available: fam.depth() });
    }
    let d = fam.degree;
    let n0 = fam.base_exponent as usize;
    let finest = (n0 + upto) as u32;
    let total = checked_pow(d, finest)?;
    let mut covered: Vec<(u64, u64)> = Vec::new();
    let mut measure = 0u64;
    let mut counts = Vec::with_capacity(n0 + upto + 1);
    for m in 0..=n0 + upto {
        if m >= n0 {
            let level = m as u32;
            let width = checked_pow(d, finest - level)?;
            let mut new: Vec<(u64, u64)> =
                fam.generations[m - n0].iter().map(|&i| (i * width, (i + 1) * width)).collect();
            new.sort_unstable();
            covered = merge(covered, new);
            measure = covered.iter().map(|(a, b)| b - a).sum();
        }
        let cell = checked_pow(d, finest - m as u32)?;
        counts.push((total - measure) / cell);
    }
    let seq = CoverSequence { degree: d, base_exponent: fam.base_exponent, counts };
    seq.check_recurrence()?;
    Ok(seq)
}

/// `1 - 3 d^-N / (N ln d)`.
pub fn minkowski_bound(d: u32, n: u32) -> Result<f64, CoverError> {
    let degree = Degree::new(d)?;
    if n == 0 {
        return Err(CoverError::ZeroExponent);
    }
    let dn = u64::from(d).checked_pow(n);
    if let Some(v) = dn.filter(|&v| v <= 3) {
        return Err(CoverError::TrivialBound(v));
    }
    let dn = f64::from(d).powi(n as i32);
    Ok(1.0 - 3.0 / dn / (f64::from(n) * degree.ln()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; zero when the fit is exact or has two points.
    pub stderr: f64,
    pub points: usize,
}

/// Ordinary least squares `y = slope * x + intercept`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    // Shift by the first point so that constant data fits with slope exactly 0.
    let (x0, y0) = (xs[0], ys[0]);
    let xs: Vec<f64> = xs.iter().map(|x| x - x0).collect();
    let ys: Vec<f64> = ys.iter().map(|y| y - y0).collect();
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let local = my - slope * mx;
    let intercept = y0 + local - slope * x0;
    let stderr = if n > 2 {
        let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - slope * x - local).powi(2)).sum();
        (rss / (n - 2) as f64 / sxx).sqrt()
    } else {
        0.0
    };
    Some(LinearFit { slope, intercept, stderr, points: n })
}

fn burn_start(len: usize, burn_in: f64) -> usize {
    ((len as f64 * burn_in.clamp(0.0, 1.0)).floor() as usize).min(len)
}

/// Slope of `ln c_m` against `m ln d` after discarding the first `burn_in`
/// fraction of scales.
pub fn dimension_from_counts(seq: &CoverSequence, burn_in: f64) -> Result<LinearFit, CoverError> {
    if seq.counts.len() < 4 {
        return Err(CoverError::TooFewPoints { need: 4, got: seq.counts.len() });
    }
    let ln_d = seq.degree.ln();
    let start = burn_start(seq.counts.len(), burn_in);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (m, &c) in seq.counts.iter().enumerate().skip(start) {
        if c == 0 {
            return Err(CoverError::ZeroCount(m));
        }
        xs.push(m as f64 * ln_d);
        ys.push((c as f64).ln());
    }
    fit_line(&xs, &ys).ok_or(CoverError::TooFewPoints { need: 2, got: xs.len() })
}

/// `L_n`: leaves of generation at most `n` with length at least `1/(2d)`.
pub fn leaf_census(lam: &Lamination, depth: usize) -> Vec<u64> {
    let d = lam.degree();
    let floor = BigRational::new(1.into(), BigInt::from(2 * d.get()));
    let mut per_gen = vec![0u64; depth + 1];
    for r in lam.records() {
        if r.generation <= depth && r.leaf.length() >= floor {
            per_gen[r.generation] += 1;
        }
    }
    per_gen
        .iter()
        .scan(0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

/// Growth exponent of the long-leaf census: slope of `ln L_n` against
/// `n ln d` over the tail after `burn_in`, skipping empty entries.
pub fn leaf_census_dimension(lam: &Lamination, depth: usize, burn_in: f64) -> Result<LinearFit, CoverError> {
    if depth > lam.depth() {
        return Err(CoverError::InsufficientDepth { requested: depth, available: lam.depth() });
    }
    let census = leaf_census(lam, depth);
    let mut distinct: Vec<u64> = census.iter().copied().filter(|&c| c > 0).collect();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(CoverError::TooFewPoints { need: 2, got: distinct.len() });
    }
    let ln_d = lam.degree().ln();
    let start = burn_start(census.len(), burn_in);
    let (xs, ys): (Vec<f64>, Vec<f64>) = census
        .iter()
        .enumerate()
        .skip(start)
        .filter(|(_, &c)| c > 0)
        .map(|(n, &c)| (n as f64 * ln_d, (c as f64).ln()))
        .unzip();
    fit_line(&xs, &ys).ok_or(CoverError::TooFewPoints { need: 2, got: xs.len() })
}
