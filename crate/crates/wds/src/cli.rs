//! Command-line front end. Each subcommand wires file parsing to one
//! checker, solver or certifier and emits a single machine-readable report;
//! `corpus` replays stored command lines against frozen expected outputs.
//!
//! Exit codes: 0 for any completed computation regardless of verdict, 2 for
//! unusable input (bad flags, unreadable files, malformed codes).

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::angle::{parse_rat, Rat, RatJson};
use crate::certify::{
    certify_alternating, certify_metric_cusps, certify_triangulated, Coefficient, SurgerySpec,
};
use crate::cusp_geom::{
    horoball_profile, ideal_triangle_third_integral, short_slopes_euclidean, CuspLattice,
};
use crate::diagram::parse_pd;
use crate::pattern::{
    build_sphere_patterns, enumerate_admissible_bounded, min_normal_area, tetrahedron_pattern,
    verify_angled_spine,
};
use crate::report::{AggregateReport, CaseOutcome, Report, ReportKind};
use crate::triangulation::{
    cusp_triangulation, gcd, parse_angles, parse_triangulation, short_slopes, slope_length_bound,
    solve_angle_structure, verify_angles, AngleAssignment, GluingData, SlopeClass,
};

#[derive(Debug, Parser)]
#[command(name = "wds", version, about = "Combinatorial Dehn surgery certificates")]
pub struct Cli {
    /// Render a plain-text table instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Certify surgery coefficients on an alternating link diagram.
    CertifyDiagram {
        /// Planar diagram code file ('#' lines are comments).
        #[arg(long)]
        pd: PathBuf,
        /// Coefficient per component, e.g. "K1=1/5"; repeatable or
        /// comma-separated. Unlisted components stay unfilled.
        #[arg(long)]
        surgery: Vec<String>,
    },
    /// Certify surgery slopes on an angled ideal triangulation.
    CertifyTri {
        #[arg(long)]
        tri: PathBuf,
        /// Angle file or "uniform:r" (units of pi).
        #[arg(long)]
        angles: String,
        /// Slope per cusp, e.g. "K1=1/5"; every cusp must be listed.
        #[arg(long)]
        surgery: Vec<String>,
    },
    /// Certify slopes against the Euclidean length-6 test on given cusp
    /// lattices (one "mx,my,lx,ly" per cusp).
    CertifyCusps {
        #[arg(long)]
        lattice: Vec<String>,
        #[arg(long)]
        surgery: Vec<String>,
    },
    /// Verify an angle assignment exactly (tet sums, ranges, edge classes).
    CheckAngles {
        #[arg(long)]
        tri: PathBuf,
        #[arg(long)]
        angles: String,
    },
    /// Decide feasibility of a positive angle structure and print one.
    SolveAngles {
        #[arg(long)]
        tri: PathBuf,
    },
    /// Exact lower bound for one slope's combinatorial length on a cusp.
    SlopeLength {
        #[arg(long)]
        tri: PathBuf,
        #[arg(long)]
        angles: String,
        #[arg(long, default_value_t = 0)]
        cusp: usize,
        /// "p/q" or a bare integer.
        #[arg(long)]
        slope: String,
    },
    /// All slopes below a length threshold: combinatorial (--tri, threshold
    /// in units of pi) or Euclidean (--lattice).
    ShortSlopes {
        #[arg(long)]
        tri: Option<PathBuf>,
        #[arg(long)]
        angles: Option<String>,
        #[arg(long)]
        lattice: Option<String>,
        #[arg(long)]
        threshold: String,
        #[arg(long, default_value_t = 0)]
        cusp: usize,
    },
    /// Enumerate admissible normal curves on sphere patterns, from a
    /// diagram's spine or a single tetrahedron pattern.
    Curves {
        #[arg(long)]
        pd: Option<PathBuf>,
        #[arg(long)]
        angles: Option<String>,
        /// Three dihedral angles "a,b,c" (units of pi) for one tetrahedron.
        #[arg(long)]
        tet: Option<String>,
        /// Cap on arcs per gap in the enumeration.
        #[arg(long, default_value_t = 1)]
        max_weight: usize,
    },
    /// Horoball packing profile of the extremal cusp cross-section.
    CuspProfile {
        /// Integrate the visible-gap density (the one-third constant).
        #[arg(long)]
        integral: bool,
        /// Evaluate the profile at one height instead.
        #[arg(long)]
        z: Option<f64>,
    },
    /// Replay every stored case in a directory and diff against sidecars.
    Corpus {
        #[arg(long)]
        dir: PathBuf,
    },
}

/// Parses and executes one command line. Relative input paths resolve
/// against `base` when given, but reports echo them as written so output
/// does not depend on the invocation directory.
pub fn run(args: &[String], base: Option<&Path>) -> Output {
    let echo = args.join(" ");
    let mut full = vec!["wds".to_string()];
    full.extend_from_slice(args);
    match Cli::try_parse_from(&full) {
        Ok(cli) => execute(&cli, echo, base),
        Err(e) => Output::Single(
            Report::new(echo).input_error(format!("usage: {}", e.kind())),
        ),
    }
}

pub enum Output {
    Single(Report),
    Aggregate(AggregateReport),
}

impl Output {
    pub fn exit_status(&self) -> i32 {
        match self {
            Output::Single(r) => r.exit_status,
            Output::Aggregate(a) => a.exit_status,
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            Output::Single(r) => r.to_json(),
            Output::Aggregate(a) => a.to_json(),
        }
    }

    pub fn render(&self, pretty: bool) -> String {
        match (self, pretty) {
            (Output::Single(r), false) => r.to_json(),
            (Output::Single(r), true) => r.render_text(),
            (Output::Aggregate(a), false) => a.to_json(),
            (Output::Aggregate(a), true) => a.render_text(),
        }
    }
}

pub fn execute(cli: &Cli, echo: String, base: Option<&Path>) -> Output {
    match &cli.command {
        Cmd::Corpus { dir } => {
            let resolved = resolve(base, dir);
            Output::Aggregate(corpus_run(&resolved, echo))
        }
        other => Output::Single(single(other, echo, base)),
    }
}

fn resolve(base: Option<&Path>, p: &Path) -> PathBuf {
    match base {
        Some(b) if p.is_relative() => b.join(p),
        _ => p.to_path_buf(),
    }
}

fn read_input(report: &mut Report, base: Option<&Path>, p: &Path) -> Result<String, String> {
    let resolved = resolve(base, p);
    let bytes = std::fs::read(&resolved).map_err(|e| format!("{}: {e}", p.display()))?;
    report.record_input(&p.display().to_string(), &bytes);
    String::from_utf8(bytes).map_err(|_| format!("{}: not UTF-8", p.display()))
}

/// Strips '#' comment lines so diagram files can carry a header.
fn strip_comments(text: &str) -> String {
    text.lines().filter(|l| !l.trim_start().starts_with('#')).collect::<Vec<_>>().join("\n")
}

/// "K3=1/5" -> (2, Coefficient). Tokens may be comma-separated.
fn parse_surgery(tokens: &[String]) -> Result<Vec<(usize, Coefficient)>, String> {
    let mut out = Vec::new();
    for token in tokens.iter().flat_map(|t| t.split(',')) {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        let (name, frac) = token
            .split_once('=')
            .ok_or_else(|| format!("surgery token {token:?}: expected K<i>=p/q"))?;
        let idx: usize = name
            .trim()
            .strip_prefix('K')
            .and_then(|n| n.parse().ok())
            .filter(|&n| n >= 1)
            .ok_or_else(|| format!("surgery token {token:?}: component must be K1, K2, ..."))?;
        let coeff = Coefficient::parse(frac).map_err(|e| format!("surgery token {token:?}: {e}"))?;
        out.push((idx - 1, coeff));
    }
    Ok(out)
}

fn surgery_spec(tokens: &[String], components: usize) -> Result<SurgerySpec, String> {
    let mut coefficients = vec![Coefficient { p: 1, q: 0 }; components];
    for (idx, coeff) in parse_surgery(tokens)? {
        if idx >= components {
            return Err(format!("component K{} out of range (diagram has {})", idx + 1, components));
        }
        coefficients[idx] = coeff;
    }
    Ok(SurgerySpec { coefficients })
}

fn surgery_slopes(tokens: &[String], cusps: usize) -> Result<Vec<SlopeClass>, String> {
    let mut slots: Vec<Option<SlopeClass>> = vec![None; cusps];
    for (idx, c) in parse_surgery(tokens)? {
        if idx >= cusps {
            return Err(format!("cusp K{} out of range ({} cusps)", idx + 1, cusps));
        }
        if (c.p, c.q) == (0, 0) || gcd(c.p.unsigned_abs(), c.q.unsigned_abs()) != 1 {
            return Err(format!("slope {}/{} is not primitive", c.p, c.q));
        }
        slots[idx] = Some(SlopeClass::new(c.p, c.q));
    }
    slots
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| format!("no slope for cusp K{}", i + 1)))
        .collect()
}

/// Angle source: "uniform:r" or a file of per-tet triples.
fn angle_assignment(
    report: &mut Report,
    base: Option<&Path>,
    source: &str,
    tet_count: usize,
) -> Result<AngleAssignment, String> {
    if let Some(r) = source.strip_prefix("uniform:") {
        let r = parse_rat(r).ok_or_else(|| format!("bad rational {r:?}"))?;
        let entry: RatJson = (&r).into();
        return Ok(AngleAssignment { tets: vec![[entry.clone(), entry.clone(), entry]; tet_count] });
    }
    let text = read_input(report, base, Path::new(source))?;
    parse_angles(&text, tet_count).map_err(|e| e.to_string())
}

fn edge_angles(
    report: &mut Report,
    base: Option<&Path>,
    source: &str,
    edge_count: usize,
) -> Result<Vec<Rat>, String> {
    if let Some(r) = source.strip_prefix("uniform:") {
        let r = parse_rat(r).ok_or_else(|| format!("bad rational {r:?}"))?;
        return Ok(vec![r; edge_count]);
    }
    let text = read_input(report, base, Path::new(source))?;
    let vals: Option<Vec<Rat>> = strip_comments(&text).split_whitespace().map(parse_rat).collect();
    let vals = vals.ok_or_else(|| format!("{source}: expected whitespace-separated rationals"))?;
    if vals.len() != edge_count {
        return Err(format!("{source}: expected {edge_count} edge angles, got {}", vals.len()));
    }
    Ok(vals)
}

fn parse_lattice(token: &str) -> Result<CuspLattice, String> {
    let nums: Result<Vec<f64>, _> = token.split(',').map(|t| t.trim().parse::<f64>()).collect();
    let nums = nums.map_err(|e| format!("lattice {token:?}: {e}"))?;
    if nums.len() != 4 {
        return Err(format!("lattice {token:?}: expected mx,my,lx,ly"));
    }
    CuspLattice::new((nums[0], nums[1]), (nums[2], nums[3])).map_err(|e| e.to_string())
}

fn load_triangulation(
    report: &mut Report,
    base: Option<&Path>,
    tri: &Path,
) -> Result<GluingData, String> {
    let text = read_input(report, base, tri)?;
    parse_triangulation(&text).map_err(|e| e.to_string())
}

fn single(cmd: &Cmd, echo: String, base: Option<&Path>) -> Report {
    let mut report = Report::new(echo);
    let result = single_result(cmd, &mut report, base);
    match result {
        Ok(value) => {
            report.result = value;
            report
        }
        Err(message) => report.input_error(message),
    }
}

fn single_result(cmd: &Cmd, report: &mut Report, base: Option<&Path>) -> Result<Value, String> {
    match cmd {
        Cmd::CertifyDiagram { pd, surgery } => {
            let text = read_input(report, base, pd)?;
            let d = parse_pd(&strip_comments(&text)).map_err(|e| e.to_string())?;
            let spec = surgery_spec(surgery, d.component_count)?;
            let cert = certify_alternating(&d, &spec).map_err(|e| e.to_string())?;
            Ok(cert.to_json())
        }
        Cmd::CertifyTri { tri, angles, surgery } => {
            let gluing = load_triangulation(report, base, tri)?;
            let assignment = angle_assignment(report, base, angles, gluing.tet_count)?;
            let cusps = cusp_triangulation(&gluing, &assignment).map_err(|e| e.to_string())?;
            let slopes = surgery_slopes(surgery, cusps.len())?;
            let cert =
                certify_triangulated(&gluing, &assignment, &slopes).map_err(|e| e.to_string())?;
            Ok(cert.to_json())
        }
        Cmd::CertifyCusps { lattice, surgery } => {
            let lattices: Result<Vec<_>, _> = lattice.iter().map(|t| parse_lattice(t)).collect();
            let lattices = lattices?;
            let slopes = surgery_slopes(surgery, lattices.len())?;
            let pairs: Vec<(i64, i64)> = slopes.iter().map(|s| (s.p, s.q)).collect();
            let cert = certify_metric_cusps(&lattices, &pairs).map_err(|e| e.to_string())?;
            Ok(cert.to_json())
        }
        Cmd::CheckAngles { tri, angles } => {
            let gluing = load_triangulation(report, base, tri)?;
            let assignment = angle_assignment(report, base, angles, gluing.tet_count)?;
            let violations = verify_angles(&gluing, &assignment);
            Ok(json!({
                "ok": violations.is_empty(),
                "violations": violations,
            }))
        }
        Cmd::SolveAngles { tri } => {
            let gluing = load_triangulation(report, base, tri)?;
            match solve_angle_structure(&gluing) {
                Some(assignment) => Ok(json!({"feasible": true, "angles": assignment})),
                None => Ok(json!({"feasible": false})),
            }
        }
        Cmd::SlopeLength { tri, angles, cusp, slope } => {
            let gluing = load_triangulation(report, base, tri)?;
            let assignment = angle_assignment(report, base, angles, gluing.tet_count)?;
            let cusps = cusp_triangulation(&gluing, &assignment).map_err(|e| e.to_string())?;
            let cusp = cusps
                .get(*cusp)
                .ok_or_else(|| format!("cusp {cusp} out of range ({} cusps)", cusps.len()))?;
            let c = Coefficient::parse(slope).map_err(|e| format!("slope {slope:?}: {e}"))?;
            if (c.p, c.q) == (0, 0) {
                return Err("slope 0/0 is not a slope".into());
            }
            let bound = slope_length_bound(cusp, SlopeClass::new(c.p, c.q));
            Ok(json!({"bound": bound, "units": "pi"}))
        }
        Cmd::ShortSlopes { tri, angles, lattice, threshold, cusp } => match (tri, lattice) {
            (Some(tri), None) => {
                let gluing = load_triangulation(report, base, tri)?;
                let source = angles.as_deref().ok_or("short-slopes --tri needs --angles")?;
                let assignment = angle_assignment(report, base, source, gluing.tet_count)?;
                let cusps = cusp_triangulation(&gluing, &assignment).map_err(|e| e.to_string())?;
                let cusp = cusps
                    .get(*cusp)
                    .ok_or_else(|| format!("cusp {cusp} out of range ({} cusps)", cusps.len()))?;
                let bound =
                    parse_rat(threshold).ok_or_else(|| format!("bad rational {threshold:?}"))?;
                let found = short_slopes(cusp, &bound);
                Ok(json!({
                    "threshold": RatJson::from(&bound),
                    "units": "pi",
                    "slopes": found,
                }))
            }
            (None, Some(lattice)) => {
                let lat = parse_lattice(lattice)?;
                let bound: f64 =
                    threshold.parse().map_err(|e| format!("bad threshold {threshold:?}: {e}"))?;
                let found = short_slopes_euclidean(&lat, bound);
                let rows: Vec<Value> =
                    found.iter().map(|&((p, q), len)| json!({"slope": [p, q], "length": len})).collect();
                Ok(json!({"threshold": bound, "units": "euclidean", "slopes": rows}))
            }
            _ => Err("short-slopes needs exactly one of --tri or --lattice".into()),
        },
        Cmd::Curves { pd, angles, tet, max_weight } => match (pd, tet) {
            (Some(pd), None) => {
                let text = read_input(report, base, pd)?;
                let d = parse_pd(&strip_comments(&text)).map_err(|e| e.to_string())?;
                let source = angles.as_deref().unwrap_or("uniform:1/2");
                let ea = edge_angles(report, base, source, d.edge_count())?;
                let pres = build_sphere_patterns(&d, &ea).map_err(|e| e.to_string())?;
                let spine = verify_angled_spine(&pres);
                let mut patterns = Vec::new();
                for pat in &pres.patterns {
                    let curves = enumerate_admissible_bounded(pat, *max_weight);
                    let min = min_normal_area(pat);
                    patterns.push(json!({
                        "gates": pat.gates.len(),
                        "admissible_curves": curves.len(),
                        "min_normal_area": min.map(|(a, _)| a),
                    }));
                }
                Ok(json!({"spine_ok": spine.is_ok(), "patterns": patterns}))
            }
            (None, Some(tet)) => {
                let vals: Option<Vec<Rat>> = tet.split(',').map(parse_rat).collect();
                let vals = vals.filter(|v| v.len() == 3).ok_or("--tet needs three rationals")?;
                let pat = tetrahedron_pattern(&[vals[0].clone(), vals[1].clone(), vals[2].clone()])
                    .map_err(|e| e.to_string())?;
                let curves = enumerate_admissible_bounded(&pat, *max_weight);
                let min = min_normal_area(&pat);
                Ok(json!({
                    "gates": pat.gates.len(),
                    "admissible_curves": curves.len(),
                    "curves": curves.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
                    "min_normal_area": min.map(|(a, _)| a),
                }))
            }
            _ => Err("curves needs exactly one of --pd or --tet".into()),
        },
        Cmd::CuspProfile { integral, z } => {
            let mut out = serde_json::Map::new();
            if *integral {
                out.insert("integral".into(), json!(ideal_triangle_third_integral()));
            }
            if let Some(z) = z {
                let p = horoball_profile(*z).map_err(|e| e.to_string())?;
                out.insert("profile".into(), json!(p));
            }
            if out.is_empty() {
                return Err("cusp-profile needs --integral and/or --z".into());
            }
            Ok(Value::Object(out))
        }
        Cmd::Corpus { .. } => unreachable!("handled in execute"),
    }
}

// ---------------------------------------------------------------------------
// Corpus replay

/// A case is a `<name>.case` file holding one stored command line (tokens
/// split on whitespace, paths relative to the corpus directory) and a
/// `<name>.expected.json` sidecar with the frozen single-line JSON report.
/// Cases run independently — a bad case fails alone — and in parallel up to
/// WDS_THREADS, with output order fixed by case name.
pub fn corpus_run(dir: &Path, echo: String) -> AggregateReport {
    let mut names: Vec<String> = match std::fs::read_dir(dir) {
        Ok(entries) => entries
            .filter_map(|e| e.ok())
            .filter_map(|e| {
                e.file_name().to_str()?.strip_suffix(".case").map(|s| s.to_string())
            })
            .collect(),
        Err(e) => {
            let mut agg = AggregateReport::new(echo, Vec::new());
            agg.exit_status = 2;
            agg.cases.push(CaseOutcome {
                name: dir.display().to_string(),
                passed: false,
                detail: format!("unreadable directory: {e}"),
            });
            return AggregateReport { kind: ReportKind::Aggregate, failed: 1, ..agg };
        }
    };
    names.sort();
    let threads = std::env::var("WDS_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .or_else(|| std::thread::available_parallelism().ok().map(|n| n.get()))
        .unwrap_or(1)
        .min(names.len().max(1));
    let mut outcomes: Vec<Option<CaseOutcome>> = vec![None; names.len()];
    if names.is_empty() {
        return AggregateReport::new(echo, Vec::new());
    }
    std::thread::scope(|scope| {
        let chunks: Vec<_> = outcomes.chunks_mut(names.len().div_ceil(threads)).collect();
        for (chunk_idx, chunk) in chunks.into_iter().enumerate() {
            let names = &names;
            let start = chunk_idx * names.len().div_ceil(threads);
            scope.spawn(move || {
                for (offset, slot) in chunk.iter_mut().enumerate() {
                    *slot = Some(run_case(dir, &names[start + offset]));
                }
            });
        }
    });
    AggregateReport::new(echo, outcomes.into_iter().map(|o| o.unwrap()).collect())
}

fn run_case(dir: &Path, name: &str) -> CaseOutcome {
    let fail = |detail: String| CaseOutcome { name: name.into(), passed: false, detail };
    let case_path = dir.join(format!("{name}.case"));
    let expected_path = dir.join(format!("{name}.expected.json"));
    let case_text = match std::fs::read_to_string(&case_path) {
        Ok(t) => t,
        Err(e) => return fail(format!("unreadable case file: {e}")),
    };
    let args: Vec<String> = strip_comments(&case_text)
        .split_whitespace()
        .map(|s| s.to_string())
        .collect();
    if args.iter().any(|a| a == "corpus") {
        return fail("nested corpus runs are not allowed".into());
    }
    let expected = match std::fs::read(&expected_path) {
        Ok(b) => b,
        Err(e) => return fail(format!("unreadable sidecar: {e}")),
    };
    let output = run(&args, Some(dir));
    let got = output.to_json();
    if got.as_bytes() == expected.as_slice() {
        CaseOutcome { name: name.into(), passed: true, detail: "output matches".into() }
    } else {
        fail(format!("output differs from sidecar ({} vs {} bytes)", got.len(), expected.len()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> Output {
        let owned: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        run(&owned, None)
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_str(&["no-such-command"]).exit_status(), 2);
        assert_eq!(run_str(&["certify-diagram"]).exit_status(), 2);
        assert_eq!(run_str(&["certify-diagram", "--pd", "/nonexistent.pd"]).exit_status(), 2);
    }

    #[test]
    fn profile_integral_runs() {
        let out = run_str(&["cusp-profile", "--integral"]);
        assert_eq!(out.exit_status(), 0);
        let json = out.to_json();
        assert!(json.contains("1.04719"), "{json}");
    }

    #[test]
    fn surgery_grammar() {
        let toks = vec!["K1=1/5,K3=2".to_string(), "K2=0/1".to_string()];
        let parsed = parse_surgery(&toks).unwrap();
        assert_eq!(parsed.len(), 3);
        assert_eq!(parsed[0], (0, Coefficient { p: 1, q: 5 }));
        assert_eq!(parsed[1], (2, Coefficient { p: 2, q: 1 }));
        assert!(parse_surgery(&["K0=1/2".to_string()]).is_err());
        assert!(parse_surgery(&["1/2".to_string()]).is_err());
    }

    #[test]
    fn empty_corpus_is_ok() {
        let dir = std::env::temp_dir().join("wds-empty-corpus");
        std::fs::create_dir_all(&dir).unwrap();
        let agg = corpus_run(&dir, "corpus".into());
        assert_eq!(agg.exit_status, 0);
        assert!(agg.cases.is_empty());
    }
}
