use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    BuildArgs, CaseArgs, CliError, Command, ConfigFile, CoverArgs, DeletionMode, EntropyArgs, NarrowArgs, Preset,
    RenderArgs, VerifyArgs, EXIT_ASSERTION, EXIT_PASS,
};
use crate::circle::{self, tau, Angle, Degree};
use crate::cover::{
    build_families, cover_counts, dimension_from_counts, leaf_census_dimension, minkowski_bound,
    narrow_interval_family, CoverSequence, DeletionOracle, GridCell, IntervalFamily,
};
use crate::entropy::{entropy_report, TransitionMatrix};
use crate::lamination::{
    build_quadratic_lamination, chebyshev_lamination, classify_trichotomy, find_unnested_triple,
    parse_lamination, render_svg, write_lamination, ChordStyle, Lamination, Trichotomy,
};
use crate::narrow::{narrow_generations, NarrowFamily};

const DEFAULT_MAX_DEPTH: usize = 22;
const DEFAULT_BURN_IN: f64 = 0.25;
const DEFAULT_RNG_SEED: u64 = 0x5eed;
const TAU_SAMPLES: usize = 10_000;
/// Deepest prefix checked pairwise for crossings.
const CROSSING_CHECK_DEPTH: usize = 10;

pub fn dispatch(command: Command, mut cfg: ConfigFile) -> Result<u8, CliError> {
    match command {
        Command::Build(a) => build(a, &mut cfg),
        Command::Narrow(a) => narrow(a, &mut cfg),
        Command::Cover(a) => cover(a, &mut cfg),
        Command::Entropy(a) => entropy(a, &mut cfg),
        Command::Verify(a) => verify(a, &mut cfg),
        Command::Render(a) => render(a, &mut cfg),
    }
}

enum Seed {
    Quadratic(Angle),
    Chebyshev,
}

struct Case {
    seed: Seed,
    degree: Degree,
    depth: usize,
    /// Entropy preset describing the same polynomial, when known.
    entropy_preset: Option<&'static str>,
}

impl Case {
    fn resolve(args: CaseArgs, cfg: &mut ConfigFile, default_depth: usize) -> Result<Case, CliError> {
        let theta: Option<String> = cfg.pick(args.theta, "theta")?;
        let preset: Option<Preset> = cfg.pick(args.preset, "preset")?;
        let degree: Option<u32> = cfg.pick(args.degree, "degree")?;
        let depth = cfg.pick(args.depth, "depth")?.unwrap_or(default_depth);
        let cap = cfg.pick(args.max_depth, "max-depth")?.unwrap_or(DEFAULT_MAX_DEPTH);
        if depth > cap {
            return Err(CliError::usage(format!("depth {depth} exceeds the cap {cap} (raise --max-depth)")));
        }
        let degree = Degree::new(degree.unwrap_or(2))?;
        let quadratic = |t: Angle| -> Result<Seed, CliError> {
            if degree != Degree::TWO {
                return Err(CliError::usage("theta seeds build quadratic laminations; use --degree 2"));
            }
            Ok(Seed::Quadratic(t))
        };
        let seed = match (theta, preset) {
            (Some(_), Some(_)) => return Err(CliError::usage("give either --theta or --preset, not both")),
            (None, None) => return Err(CliError::usage("one of --theta or --preset is required")),
            (None, Some(Preset::Chebyshev)) => Seed::Chebyshev,
            (None, Some(Preset::Basilica)) => quadratic(Angle::frac(1, 3))?,
            (None, Some(Preset::Airplane)) => quadratic(Angle::frac(3, 7))?,
            (Some(t), None) => quadratic(t.parse().map_err(|e| CliError::usage(format!("theta: {e}")))?)?,
        };
        let entropy_preset = match &seed {
            Seed::Chebyshev => Some("chebyshev"),
            Seed::Quadratic(t) if *t == Angle::frac(1, 2) => Some("chebyshev"),
            Seed::Quadratic(t) if *t == Angle::frac(1, 3) || *t == Angle::frac(2, 3) => Some("basilica"),
            Seed::Quadratic(t) if *t == Angle::frac(3, 7) || *t == Angle::frac(4, 7) => Some("airplane"),
            Seed::Quadratic(_) => None,
        };
        Ok(Case { seed, degree, depth, entropy_preset })
    }

    fn lamination(&self) -> Result<Lamination, CliError> {
        Ok(match &self.seed {
            Seed::Quadratic(t) => build_quadratic_lamination(t, self.depth)?,
            Seed::Chebyshev => chebyshev_lamination(self.degree.get(), self.depth)?,
        })
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn style(geodesic: bool) -> ChordStyle {
    if geodesic {
        ChordStyle::Geodesic
    } else {
        ChordStyle::Straight
    }
}

fn write_svg(lam: &Lamination, path: &Path, style: ChordStyle) -> Result<(), CliError> {
    let mut w = create(path)?;
    render_svg(lam, &mut w, style)?;
    w.flush()?;
    Ok(())
}

fn build(a: BuildArgs, cfg: &mut ConfigFile) -> Result<u8, CliError> {
    let case = Case::resolve(a.case, cfg, 6)?;
    let out = cfg.pick(a.out, "out")?;
    let svg = cfg.pick(a.svg, "svg")?;
    let geodesic = cfg.pick_switch(a.geodesic, "geodesic")?;
    std::mem::take(cfg).finish()?;
    let lam = case.lamination()?;
    let mut text = Vec::new();
    write_lamination(&lam, &mut text)?;
    emit(out.as_deref(), &String::from_utf8(text).expect("ascii"))?;
    if let Some(p) = svg {
        write_svg(&lam, &p, style(geodesic))?;
    }
    Ok(EXIT_PASS)
}

fn render(a: RenderArgs, cfg: &mut ConfigFile) -> Result<u8, CliError> {
    let input: Option<std::path::PathBuf> = cfg.pick(a.input, "input")?;
    let svg = cfg.pick(a.svg, "svg")?;
    let geodesic = cfg.pick_switch(a.geodesic, "geodesic")?;
    std::mem::take(cfg).finish()?;
    let input = input.ok_or_else(|| CliError::usage("--input is required"))?;
    let file = File::open(&input).map_err(|e| CliError::usage(format!("{}: {e}", input.display())))?;
    let lam = parse_lamination(BufReader::new(file))?;
    match svg {
        Some(p) => write_svg(&lam, &p, style(geodesic))?,
        None => {
            let mut buf = Vec::new();
            render_svg(&lam, &mut buf, style(geodesic))?;
            std::io::stdout().write_all(&buf)?;
        }
    }
    Ok(EXIT_PASS)
}

fn triple_family(lam: &Lamination) -> Result<NarrowFamily, CliError> {
    let triple =
        find_unnested_triple(lam).ok_or_else(|| CliError::assertion("no un-nested triple in the lamination"))?;
    let deepest = triple.indices.iter().map(|&i| lam.record(i).generation).max().unwrap_or(0);
    Ok(narrow_generations(&triple.leaves, lam, lam.depth() - deepest)?)
}

fn narrow_csv(fam: &NarrowFamily) -> String {
    let mut s = String::from("# schema: narrow-v1\nk,s_k,bound,slack\n");
    writeln!(s, "0,{},,", fam.counts()[0]).unwrap();
    for (k, sk, bound, slack) in fam.recurrence_rows() {
        writeln!(s, "{k},{sk},{bound},{slack}").unwrap();
    }
    s
}

fn narrow(a: NarrowArgs, cfg: &mut ConfigFile) -> Result<u8, CliError> {
    let case = Case::resolve(a.case, cfg, 16)?;
    let csv = cfg.pick(a.csv, "csv")?;
    std::mem::take(cfg).finish()?;
    let lam = case.lamination()?;
    let fam = triple_family(&lam)?;
    emit(csv.as_deref(), &narrow_csv(&fam))?;
    Ok(EXIT_PASS)
}

fn cover_csv(fam: &IntervalFamily, seq: &CoverSequence, summary: &[(String, String)]) -> String {
    let n0 = fam.base_exponent() as usize;
    let sizes = fam.sizes();
    let bounds = seq.recurrence_bounds();
    let mut s = String::from("# schema: cover-v1\nn,intervals,c_n,bound_rhs\n");
    for (m, c) in seq.counts.iter().enumerate() {
        let size = m.checked_sub(n0).and_then(|g| sizes.get(g)).map(ToString::to_string).unwrap_or_default();
        let rhs = m.checked_sub(1).map(|p| bounds[p].to_string()).unwrap_or_default();
        writeln!(s, "{m},{size},{c},{rhs}").unwrap();
    }
    for (k, v) in summary {
        writeln!(s, "# {k}={v}").unwrap();
    }
    s
}

fn parse_cells(text: &str) -> Result<Vec<u64>, CliError> {
    text.split(',')
        .map(|x| x.trim().parse::<u64>().map_err(|e| CliError::usage(format!("cells: {x:?}: {e}"))))
        .collect()
}

fn cover(a: CoverArgs, cfg: &mut ConfigFile) -> Result<u8, CliError> {
    let mode = cfg.pick(a.deletion_mode, "deletion-mode")?.unwrap_or(DeletionMode::Lex);
    let exponent: Option<u32> = cfg.pick(a.base_exponent, "base-exponent")?;
    let burn_in = cfg.pick(a.burn_in, "burn-in")?.unwrap_or(DEFAULT_BURN_IN);
    let cells: Option<String> = cfg.pick(a.cells, "cells")?;
    let csv = cfg.pick(a.csv, "csv")?;
    let (fam, depth) = if mode == DeletionMode::Narrow {
        let case = Case::resolve(a.case, cfg, 16)?;
        std::mem::take(cfg).finish()?;
        if cells.is_some() {
            return Err(CliError::usage("--cells does not apply to the narrow deletion mode"));
        }
        let lam = case.lamination()?;
        let nfam = triple_family(&lam)?;
        let depth = nfam.generations().len() - 1;
        (narrow_interval_family(&nfam, &lam, depth, exponent.unwrap_or(1))?, depth)
    } else {
        let d: u32 = cfg.pick(a.case.degree, "degree")?.unwrap_or(2);
        let depth: usize = cfg.pick(a.case.depth, "depth")?.unwrap_or(10);
        let cap = cfg.pick(a.case.max_depth, "max-depth")?.unwrap_or(DEFAULT_MAX_DEPTH);
        std::mem::take(cfg).finish()?;
        if a.case.theta.is_some() || a.case.preset.is_some() {
            return Err(CliError::usage("--theta and --preset only apply to the narrow deletion mode"));
        }
        if depth > cap {
            return Err(CliError::usage(format!("depth {depth} exceeds the cap {cap} (raise --max-depth)")));
        }
        let degree = Degree::new(d)?;
        let n = exponent.unwrap_or(3);
        let size = u64::from(d).checked_pow(n).ok_or_else(|| CliError::usage("base exponent too large"))?;
        let idx = match cells {
            Some(t) => parse_cells(&t)?,
            None => vec![0, size / 3, 2 * size / 3],
        };
        let [i, j, k] = idx[..] else {
            return Err(CliError::usage(format!("cells: expected 3 indices, got {}", idx.len())));
        };
        let base = [i, j, k].map(|index| GridCell { level: n, index: index % size }.arc(degree));
        let oracle = if mode == DeletionMode::Lex { DeletionOracle::Lex } else { DeletionOracle::Keep };
        (build_families(base, d, depth, oracle)?, depth)
    };
    let seq = cover_counts(&fam, depth)?;
    let mut summary = Vec::new();
    let fit = dimension_from_counts(&seq, burn_in)?;
    summary.push(("base_exponent".to_string(), fam.base_exponent().to_string()));
    summary.push(("slope".to_string(), format!("{:.6}", fit.slope)));
    summary.push(("stderr".to_string(), format!("{:.6}", fit.stderr)));
    if let Ok(b) = minkowski_bound(fam.degree().get(), fam.base_exponent()) {
        summary.push(("bound".to_string(), format!("{b:.6}")));
    }
    emit(csv.as_deref(), &cover_csv(&fam, &seq, &summary))?;
    Ok(EXIT_PASS)
}

fn entropy(a: EntropyArgs, cfg: &mut ConfigFile) -> Result<u8, CliError> {
    let preset: Option<Preset> = cfg.pick(a.preset, "preset")?;
    let matrix: Option<std::path::PathBuf> = cfg.pick(a.matrix, "matrix")?;
    let d = cfg.pick(a.degree, "degree")?.unwrap_or(2);
    std::mem::take(cfg).finish()?;
    let m = match (preset, matrix) {
        (Some(p), None) => TransitionMatrix::preset(p.name())?,
        (None, Some(path)) => std::fs::read_to_string(&path)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?
            .parse()?,
        _ => return Err(CliError::usage("give exactly one of --preset or --matrix")),
    };
    let r = entropy_report(&m, d)?;
    if !r.in_unit_interval() {
        eprintln!("warning: predicted dimension {} lies outside [0, 1]", r.predicted_dimension);
    }
    print!(
        "# schema: entropy-v1\nspectral_radius,core_entropy,predicted_dimension\n{:.12},{:.12},{:.12}\n",
        r.spectral_radius, r.core_entropy, r.predicted_dimension
    );
    Ok(EXIT_PASS)
}

struct Report {
    rows: Vec<(String, String, String, bool)>,
}

impl Report {
    fn check(&mut self, name: &str, value: impl ToString, expected: impl ToString, pass: bool) -> bool {
        self.rows.push((name.to_string(), value.to_string(), expected.to_string(), pass));
        pass
    }

    fn csv(&self) -> String {
        let mut s = String::from("# schema: verify-v1\ncheck,value,expected,status\n");
        for (name, value, expected, pass) in &self.rows {
            writeln!(s, "{name},{value},{expected},{}", if *pass { "pass" } else { "FAIL" }).unwrap();
        }
        s
    }

    fn first_failure(&self) -> Option<&str> {
        self.rows.iter().find(|r| !r.3).map(|r| r.0.as_str())
    }
}

fn random_angle(rng: &mut ChaCha8Rng) -> Angle {
    let q: i64 = rng.gen_range(1..=1000);
    Angle::frac(rng.gen_range(0..q), q)
}

/// Count violations of the metric axioms for `tau` on sampled triples.
pub(crate) fn tau_axiom_violations(seed: u64, samples: usize) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = circle::half();
    let zero = BigRational::from_integer(0.into());
    let mut bad = 0;
    for _ in 0..samples {
        let (a, b, c) = (random_angle(&mut rng), random_angle(&mut rng), random_angle(&mut rng));
        let ab = tau(&a, &b);
        let ok = ab == tau(&b, &a)
            && ab >= zero
            && ab <= half
            && (ab == zero) == (a == b)
            && tau(&a, &a) == zero
            && ab <= tau(&a, &c) + tau(&c, &b);
        bad += usize::from(!ok);
    }
    bad
}

fn verify(a: VerifyArgs, cfg: &mut ConfigFile) -> Result<u8, CliError> {
    let case = Case::resolve(a.case, cfg, 16)?;
    let burn_in = cfg.pick(a.burn_in, "burn-in")?.unwrap_or(DEFAULT_BURN_IN);
    let seed = cfg.pick(a.rng_seed, "rng-seed")?.unwrap_or(DEFAULT_RNG_SEED);
    let csv = cfg.pick(a.csv, "csv")?;
    std::mem::take(cfg).finish()?;

    let mut rep = Report { rows: Vec::new() };
    let lam = case.lamination()?;
    rep.check("leaves", lam.len(), "", true);
    let forward = lam.check_forward_invariance().is_ok();
    rep.check("forward_invariance", forward, true, forward);
    let crossing = lam.check_non_crossing_upto(CROSSING_CHECK_DEPTH);
    let value = crossing.as_ref().err().map_or("none".to_string(), ToString::to_string);
    rep.check("crossings", value, "none", crossing.is_ok());
    let tau_bad = tau_axiom_violations(seed, TAU_SAMPLES);
    rep.check("tau_axiom_violations", tau_bad, 0, tau_bad == 0);

    let census = leaf_census_dimension(&lam, lam.depth(), burn_in)?.slope;
    let class = classify_trichotomy(&lam);
    match &class {
        Ok(c) => {
            rep.check("classification", c.label(), "", true);
        }
        Err(e) => {
            rep.check("classification", e, "", false);
        }
    }
    rep.check("census_dimension", format!("{census:.6}"), "", true);
    match class {
        Ok(Trichotomy::Interval { .. }) => {
            rep.check("interval_full_dimension", format!("{census:.6}"), ">=0.9", census >= 0.9);
        }
        Ok(Trichotomy::ThreeEndpoints(_)) => {
            rep.check("census_below_one", format!("{census:.6}"), "<1", census < 1.0);
            verify_three_endpoints(&lam, burn_in, &mut rep)?;
        }
        _ => {}
    }
    if let Some(p) = case.entropy_preset {
        let eta = entropy_report(&TransitionMatrix::preset(p)?, case.degree.get())?.predicted_dimension;
        rep.check("entropy_prediction", format!("{eta:.6}"), p, true);
        let gap = (census - eta).abs();
        rep.check("census_vs_entropy", format!("{gap:.6}"), "<=0.1", gap <= 0.1);
    }

    emit(csv.as_deref(), &rep.csv())?;
    match rep.first_failure() {
        None => Ok(EXIT_PASS),
        Some(name) => {
            eprintln!("assertion failed: {name}");
            Ok(EXIT_ASSERTION)
        }
    }
}

fn verify_three_endpoints(lam: &Lamination, burn_in: f64, rep: &mut Report) -> Result<(), CliError> {
    let d = lam.degree().get() as usize;
    let fam = match triple_family(lam) {
        Ok(f) => f,
        Err(e) => {
            rep.check("narrow_recurrence", e, "", false);
            return Ok(());
        }
    };
    let s = fam.counts();
    let counts = s.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
    rep.check("narrow_recurrence", counts, "s_k+1>=d*s_k-2(d-1)", true);
    rep.check("narrow_s0", s[0], 3, s[0] == 3);
    if s.len() > 1 {
        rep.check("narrow_s1", s[1], format!(">={}", d + 2), s[1] >= d + 2);
    }
    let depth = s.len() - 1;
    let ifam = narrow_interval_family(&fam, lam, depth, 1)?;
    rep.check("interval_counts", ifam.sizes() == s, "|I_n|=s_n", ifam.sizes() == s);
    let seq = match cover_counts(&ifam, depth) {
        Ok(seq) => {
            rep.check("cover_recurrence", true, true, true);
            seq
        }
        Err(e) => {
            rep.check("cover_recurrence", e, "", false);
            return Ok(());
        }
    };
    let fit = dimension_from_counts(&seq, burn_in)?;
    let n = ifam.base_exponent();
    rep.check("cover_dimension", format!("{:.6}", fit.slope), "<1", fit.slope < 1.0);
    match minkowski_bound(lam.degree().get(), n) {
        Ok(b) => {
            rep.check("cover_below_bound", format!("{:.6}", fit.slope), format!("<{b:.6} (N={n})"), fit.slope < b);
        }
        Err(e) => {
            rep.check("cover_below_bound", e, "", false);
        }
    }
    Ok(())
}
