use std::io::{self, BufRead, Write};

use super::{Lamination, LaminationError, Leaf};
use crate::circle::{Angle, Degree};

pub const HEADER: &str = "# lamination-v1";

/// One leaf per line as `p1/q1 p2/q2 gen=k`, sorted by generation then first
/// endpoint, after a `# lamination-v1 degree=d` header.
pub fn write_lamination<W: Write>(lam: &Lamination, out: &mut W) -> io::Result<()> {
    writeln!(out, "{HEADER} degree={}", lam.degree())?;
    let mut rows: Vec<_> = lam.records().iter().map(|r| (r.generation, &r.leaf)).collect();
    rows.sort();
    for (k, leaf) in rows {
        writeln!(out, "{} {} gen={k}", leaf.a(), leaf.b())?;
    }
    Ok(())
}

pub fn parse_lamination<R: BufRead>(input: R) -> Result<Lamination, LaminationError> {
    let err = |line: usize, message: String| LaminationError::Parse { line, message };
    let mut degree = None;
    let mut generations: Vec<Vec<Leaf>> = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let n = i + 1;
        let line = line.map_err(|e| err(n, e.to_string()))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix(HEADER) {
            let d = rest
                .trim()
                .strip_prefix("degree=")
                .ok_or_else(|| err(n, "header needs degree=d".into()))?
                .parse::<u32>()
                .map_err(|e| err(n, format!("degree: {e}")))?;
            degree = Some(Degree::new(d).map_err(|e| err(n, e.to_string()))?);
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [x, y, g] = fields[..] else {
            return Err(err(n, format!("expected 3 fields, found {}", fields.len())));
        };
        let x: Angle = x.parse().map_err(|e| err(n, format!("first endpoint: {e}")))?;
        let y: Angle = y.parse().map_err(|e| err(n, format!("second endpoint: {e}")))?;
        let k: usize = g
            .strip_prefix("gen=")
            .ok_or_else(|| err(n, format!("expected gen=k, found {g:?}")))?
            .parse()
            .map_err(|e| err(n, format!("generation: {e}")))?;
        if k > generations.len() {
            return Err(err(n, format!("generation {k} appears before generation {}", generations.len())));
        }
        if k == generations.len() {
            generations.push(Vec::new());
        }
        generations[k].push(Leaf::new(x, y).map_err(|e| err(n, e.to_string()))?);
    }
    let degree = degree.ok_or_else(|| err(0, "missing lamination-v1 header".into()))?;
    Lamination::from_generations(degree, generations)
}
