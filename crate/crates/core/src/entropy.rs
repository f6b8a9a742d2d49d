//! Spectral radius of nonnegative transition matrices and the predicted
//! dimension `H / ln d`.

use std::fmt;
use std::str::FromStr;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use thiserror::Error;

use crate::circle::{CircleError, Degree};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntropyError {
    #[error(transparent)]
    Circle(#[from] CircleError),
    #[error("matrix must be square and nonempty")]
    NotSquare,
    #[error("matrix has no positive entry")]
    Zero,
    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },
    #[error("unknown preset {0:?} (expected chebyshev, basilica or airplane)")]
    UnknownPreset(String),
    #[error("power iteration did not converge; last estimates {0} and {1}")]
    NonConvergence(f64, f64),
    #[error("spectral radius {radius} lies outside the row-sum bounds [{min}, {max}]")]
    RowSumBound { radius: f64, min: f64, max: f64 },
}

/// Square matrix of nonnegative integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionMatrix {
    size: usize,
    entries: Vec<u64>,
}

impl TransitionMatrix {
    pub fn new(rows: Vec<Vec<u64>>) -> Result<Self, EntropyError> {
        let size = rows.len();
        if size == 0 || rows.iter().any(|r| r.len() != size) {
            return Err(EntropyError::NotSquare);
        }
        let entries: Vec<u64> = rows.into_iter().flatten().collect();
        if entries.iter().all(|&e| e == 0) {
            return Err(EntropyError::Zero);
        }
        Ok(TransitionMatrix { size, entries })
    }

    pub fn preset(name: &str) -> Result<Self, EntropyError> {
        let rows = match name {
            "chebyshev" => vec![vec![2]],
            "basilica" => vec![vec![1]],
            "airplane" => vec![vec![0, 1], vec![1, 1]],
            _ => return Err(EntropyError::UnknownPreset(name.to_string())),
        };
        TransitionMatrix::new(rows)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.size + j]
    }

    pub fn scaled(&self, k: u64) -> Self {
        TransitionMatrix { size: self.size, entries: self.entries.iter().map(|e| e * k).collect() }
    }

    fn row_sum(&self, i: usize) -> u64 {
        self.entries[i * self.size..(i + 1) * self.size].iter().sum()
    }

    fn block(&self, nodes: &[usize]) -> Vec<Vec<f64>> {
        nodes.iter().map(|&i| nodes.iter().map(|&j| self.get(i, j) as f64).collect()).collect()
    }
}

impl FromStr for TransitionMatrix {
    type Err = EntropyError;

    /// Rows of whitespace-separated integers; blank lines and `#` comments
    /// are skipped.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut rows = Vec::new();
        for (i, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|x| x.parse::<u64>().map_err(|e| EntropyError::Parse { row: i + 1, message: format!("{x:?}: {e}") }))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        TransitionMatrix::new(rows)
    }
}

impl fmt::Display for TransitionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.size {
            let row: Vec<String> = (0..self.size).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerConfig {
    pub max_iterations: usize,
    /// Relative gap between the Collatz-Wielandt bounds at which to stop.
    pub tolerance: f64,
}

impl Default for PowerConfig {
    fn default() -> Self {
        PowerConfig { max_iterations: 200_000, tolerance: 1e-13 }
    }
}

/// Perron root of an irreducible block, via power iteration on `B + I`.
fn block_radius(b: &[Vec<f64>], cfg: PowerConfig) -> Result<f64, EntropyError> {
    let m = b.len();
    if m == 1 {
        return Ok(b[0][0]);
    }
    let mut x = vec![1.0; m];
    let mut last = (f64::NAN, f64::NAN);
    let mut best_gap = f64::INFINITY;
    let mut stalled = 0;
    for _ in 0..cfg.max_iterations {
        let y: Vec<f64> = (0..m).map(|i| x[i] + b[i].iter().zip(&x).map(|(a, v)| a * v).sum::<f64>()).collect();
        let ratios = y.iter().zip(&x).map(|(a, v)| a / v);
        let lo = ratios.clone().fold(f64::INFINITY, f64::min);
        let hi = ratios.fold(0.0, f64::max);
        if hi - lo <= cfg.tolerance * hi {
            return Ok((lo + hi) / 2.0 - 1.0);
        }
        last = (lo - 1.0, hi - 1.0);
        let gap = hi - lo;
        if gap < best_gap * (1.0 - 1e-12) {
            best_gap = gap;
            stalled = 0;
        } else {
            stalled += 1;
        }
        let norm = y.iter().cloned().fold(0.0, f64::max);
        x = y.into_iter().map(|v| v / norm).collect();
        if stalled > 50 {
            for (i, v) in x.iter_mut().enumerate() {
                *v += 1e-3 * (i + 1) as f64 / m as f64;
            }
            stalled = 0;
            best_gap = f64::INFINITY;
        }
    }
    Err(EntropyError::NonConvergence(last.0, last.1))
}

pub fn spectral_radius(m: &TransitionMatrix) -> Result<f64, EntropyError> {
    spectral_radius_with(m, PowerConfig::default())
}

/// Maximum Perron root over the strongly connected components.
pub fn spectral_radius_with(m: &TransitionMatrix, cfg: PowerConfig) -> Result<f64, EntropyError> {
    let mut g = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..m.size).map(|_| g.add_node(())).collect();
    for i in 0..m.size {
        for j in 0..m.size {
            if m.get(i, j) > 0 {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let mut radius: f64 = 0.0;
    for scc in tarjan_scc(&g) {
        let mut idx: Vec<usize> = scc.iter().map(|n| n.index()).collect();
        idx.sort_unstable();
        if idx.len() == 1 && m.get(idx[0], idx[0]) == 0 {
            continue;
        }
        radius = radius.max(block_radius(&m.block(&idx), cfg)?);
    }
    check_row_sums(m, radius)?;
    Ok(radius)
}

/// Perron bounds: with every row nonzero, the radius lies between the
/// smallest and largest row sums.
fn check_row_sums(m: &TransitionMatrix, radius: f64) -> Result<(), EntropyError> {
    let sums: Vec<u64> = (0..m.size).map(|i| m.row_sum(i)).collect();
    let max = *sums.iter().max().unwrap() as f64;
    let min = if sums.contains(&0) { 0.0 } else { *sums.iter().min().unwrap() as f64 };
    let slack = 1e-9 * max.max(1.0);
    if radius < min - slack || radius > max + slack {
        return Err(EntropyError::RowSumBound { radius, min, max });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyReport {
    pub spectral_radius: f64,
    pub core_entropy: f64,
    pub predicted_dimension: f64,
}

impl EntropyReport {
    /// Soft check that the prediction is a dimension.
    pub fn in_unit_interval(&self) -> bool {
        (0.0..=1.0 + 1e-12).contains(&self.predicted_dimension)
    }
}

pub fn entropy_report(m: &TransitionMatrix, d: u32) -> Result<EntropyReport, EntropyError> {
    let d = Degree::new(d)?;
    let spectral_radius = spectral_radius(m)?;
    let core_entropy = if spectral_radius <= 1.0 { 0.0 } else { spectral_radius.ln() };
    Ok(EntropyReport { spectral_radius, core_entropy, predicted_dimension: core_entropy / d.ln() })
}
