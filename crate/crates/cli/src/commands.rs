use std::collections::HashSet;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use geomatch::curve::{path_energy, path_length, speed_profile, CurvePath};
use geomatch::geodesic::geodesic_shoot;
use geomatch::matching::{dp_grid, dp_match, optimal_match, uniform_grid, verticality_ratio, Matching, StopReason};
use geomatch::stats::{cluster, distance_matrix, karcher_mean, Cut, DistanceMatrix, Linkage};
use geomatch::Curve;
use log::{info, warn};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::converge::{convergence_study, Family};
use crate::error::{CliError, CliResult};
use crate::generate::{generate, Generator};
use crate::io::{
    fmt_f64, load_curves, load_one, num, nums, save_curves, save_path, write_json, write_table, CurveSet, LoadOptions,
    NamedCurve,
};

#[derive(Parser, Debug)]
#[command(name = "geomatch", version, about = "Elastic shape analysis of curves in R^d, S^2 and H^2")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub config: RunConfig,
    /// Directory the results are written to.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Shoot the geodesic between two parameterized curves.
    Geodesic(PairArgs),
    /// Optimal matching by alternating shooting and horizontal projection.
    Match(PairArgs),
    /// Matching by dynamic programming on the sample grid.
    DpMatch(PairArgs),
    /// Unmatched, optimally matched and dynamic-programming geodesics side by side.
    Compare(PairArgs),
    /// Matrix of pairwise shape distances.
    Dist(SetArgs),
    /// Karcher mean of a set of curves.
    Mean(SetArgs),
    /// Agglomerative clustering on shape distances.
    Cluster(ClusterArgs),
    /// Write a synthetic curve set.
    Gen(GenArgs),
    /// Energy of an analytic path under grid refinement.
    Converge(ConvergeArgs),
}

/// Curves are given as `file` (first curve) or `file#name`.
#[derive(Args, Debug)]
pub struct PairArgs {
    pub source: String,
    pub target: String,
}

/// Curve files or `file#name` selections; every curve of a file is used.
#[derive(Args, Debug)]
pub struct SetArgs {
    #[arg(required = true)]
    pub inputs: Vec<String>,
}

#[derive(Args, Debug)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub set: SetArgs,
    #[arg(long, default_value = "average")]
    pub linkage: Linkage,
    /// Number of clusters to cut the dendrogram into.
    #[arg(long, conflicts_with = "height")]
    pub clusters: Option<usize>,
    /// Cut the dendrogram at this merge height instead.
    #[arg(long)]
    pub height: Option<f64>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    pub kind: Generator,
    /// Edges per curve; each generator has its own default.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ConvergeArgs {
    pub family: Family,
    /// Ascending curve grid sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [8usize, 16, 32, 64])]
    pub ns: Vec<usize>,
}

fn config_record(c: &RunConfig) -> Value {
    json!({
        "steps": c.steps,
        "tol": num(c.tol),
        "max_iter": c.max_iter,
        "match_iter": c.match_iter,
        "mean_iter": c.mean_iter,
        "hor_tol": num(c.hor_tol),
        "square": c.square,
        "upsample": c.upsample,
        "relaxed_edges": c.relaxed_edges,
        "seed": c.seed,
        "manifold": c.manifold.map(|m| m.to_string()),
    })
}

fn stop_name(s: StopReason) -> &'static str {
    match s {
        StopReason::TargetSettled => "target-settled",
        StopReason::NoDecrease => "no-decrease",
        StopReason::ShootingFailed => "shooting-failed",
        StopReason::Budget => "budget",
        StopReason::SinglePass => "single-pass",
    }
}

fn write_lines(path: &Path, header: &str, lines: impl IntoIterator<Item = String>) -> CliResult<()> {
    let mut text = String::from(header);
    text.push('\n');
    for l in lines {
        text.push_str(&l);
        text.push('\n');
    }
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn s_grid(p: &CurvePath<f64>, values: &[f64]) -> Vec<Vec<f64>> {
    let m = p.steps() as f64;
    let offset = if values.len() == p.steps() { 0.5 } else { 0.0 };
    values
        .iter()
        .enumerate()
        .map(|(j, &v)| vec![(j as f64 + offset) / m, v])
        .collect()
}

fn rel(out: &Path, p: &Path) -> String {
    p.strip_prefix(out).unwrap_or(p).display().to_string()
}

struct PathSummary {
    length: f64,
    energy: f64,
    max_verticality: f64,
    verticality: Vec<f64>,
}

/// Saves a path with its speed and verticality traces under `stem`.
fn emit_path(out: &Path, stem: &str, p: &CurvePath<f64>, files: &mut Vec<String>) -> CliResult<PathSummary> {
    let manifest = save_path(out, stem, p)?;
    files.push(rel(out, &manifest));
    let speed = speed_profile(p)?;
    let file = out.join(format!("{stem}_speed.csv"));
    write_table(&file, &["s", "speed"], s_grid(p, &speed))?;
    files.push(rel(out, &file));
    let verticality = verticality_ratio(p)?;
    let file = out.join(format!("{stem}_verticality.csv"));
    write_table(&file, &["s", "ratio"], s_grid(p, &verticality))?;
    files.push(rel(out, &file));
    Ok(PathSummary {
        length: path_length(p)?,
        energy: path_energy(p)?,
        max_verticality: verticality.iter().copied().fold(0.0, f64::max),
        verticality,
    })
}

fn emit_matching(out: &Path, stem: &str, source: &Curve, m: &Matching<f64>, files: &mut Vec<String>) -> CliResult<()> {
    let n = m.phi.len() - 1;
    let file = out.join(format!("{stem}_phi.csv"));
    write_table(
        &file,
        &["t", "phi"],
        uniform_grid::<f64>(n).into_iter().zip(&m.phi).map(|(t, &p)| vec![t, p]),
    )?;
    files.push(rel(out, &file));
    let set = CurveSet::new(
        m.matched.manifold(),
        vec![NamedCurve {
            name: "matched".into(),
            curve: m.matched.clone(),
        }],
    )?;
    files.push(rel(out, &save_curves(out, &format!("{stem}_matched"), &set)?));
    // segments joining α0(k/n) to the matched point α1(φ(k/n))
    let d = source.manifold().coord_dim();
    let mut header: Vec<String> = (0..d).map(|i| format!("x{i}")).collect();
    header.extend((0..d).map(|i| format!("y{i}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let file = out.join(format!("{stem}_lines.csv"));
    write_table(
        &file,
        &header,
        source.points().iter().zip(m.matched.points()).map(|(a, b)| {
            let mut row = a.as_slice().to_vec();
            row.extend_from_slice(b.as_slice());
            row
        }),
    )?;
    files.push(rel(out, &file));
    let file = out.join(format!("{stem}_history.csv"));
    write_table(
        &file,
        &["iteration", "length"],
        m.length_history.iter().enumerate().map(|(i, &l)| vec![(i + 1) as f64, l]),
    )?;
    files.push(rel(out, &file));
    Ok(())
}

fn matching_record(m: &Matching<f64>, summary: &PathSummary) -> Value {
    json!({
        "length": num(summary.length),
        "energy": num(summary.energy),
        "iterations": m.iterations,
        "stop": stop_name(m.stop),
        "converged": m.converged(),
        "max_verticality": num(summary.max_verticality),
        "length_history": nums(&m.length_history),
        "horizontal_lengths": nums(&m.horizontal_lengths),
    })
}

fn load_pair(args: &PairArgs, opts: &LoadOptions) -> CliResult<(NamedCurve, NamedCurve)> {
    let a = load_one(&args.source, opts)?;
    let b = load_one(&args.target, opts)?;
    a.curve.check_compatible(&b.curve)?;
    Ok((a, b))
}

fn load_set(args: &SetArgs, opts: &LoadOptions) -> CliResult<(Vec<String>, Vec<Curve>)> {
    let mut picked: Vec<(String, NamedCurve)> = Vec::new();
    for spec in &args.inputs {
        let stem = Path::new(spec.split('#').next().unwrap_or(spec))
            .file_stem()
            .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
        if spec.contains('#') {
            picked.push((stem, load_one(spec, opts)?));
        } else {
            let set = load_curves(Path::new(spec), opts)?;
            picked.extend(set.curves.into_iter().map(|c| (stem.clone(), c)));
        }
    }
    let mut seen = HashSet::new();
    let unique = picked.iter().all(|(_, c)| seen.insert(c.name.clone()));
    let labels = picked
        .iter()
        .map(|(stem, c)| if unique { c.name.clone() } else { format!("{stem}.{}", c.name) })
        .collect();
    let curves: Vec<Curve> = picked.into_iter().map(|(_, c)| c.curve).collect();
    if let Some(first) = curves.first() {
        for c in &curves[1..] {
            first.check_compatible(c)?;
        }
    }
    Ok((labels, curves))
}

fn emit_matrix(out: &Path, m: &DistanceMatrix, files: &mut Vec<String>) -> CliResult<()> {
    let file = out.join("matrix.csv");
    let header = std::iter::once("label".to_string()).chain(m.labels.iter().cloned()).collect::<Vec<_>>().join(",");
    let lines = (0..m.len()).map(|i| {
        let cells: Vec<String> = (0..m.len()).map(|j| fmt_f64(m.get(i, j))).collect();
        format!("{},{}", m.labels[i], cells.join(","))
    });
    write_lines(&file, &header, lines)?;
    files.push(rel(out, &file));
    Ok(())
}

/// Runs one subcommand and writes `manifest.json` in the output directory.
/// Returns the manifest path.
pub fn run(cli: &Cli) -> CliResult<PathBuf> {
    let cfg = &cli.config;
    cfg.validate()?;
    let out = cli.out.as_path();
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let load = cfg.load();
    let mut files = Vec::new();
    let (name, result) = match &cli.command {
        Command::Geodesic(args) => {
            let (a, b) = load_pair(args, &load)?;
            let rep = geodesic_shoot(&a.curve, &b.curve, &cfg.shoot())?;
            if !rep.converged {
                warn!("shooting stopped with gap {:.3e}", rep.gaps.last().copied().unwrap_or(f64::NAN));
            }
            let s = emit_path(out, "geodesic", &rep.path, &mut files)?;
            let gaps = out.join("gaps.csv");
            write_table(&gaps, &["iteration", "gap"], rep.gaps.iter().enumerate().map(|(i, &g)| vec![i as f64, g]))?;
            files.push(rel(out, &gaps));
            let result = json!({
                "source": a.name,
                "target": b.name,
                "converged": rep.converged,
                "iterations": rep.iterations,
                "jacobian_builds": rep.jacobian_builds,
                "tolerance": num(rep.tol),
                "length": num(s.length),
                "energy": num(s.energy),
                "max_verticality": num(s.max_verticality),
            });
            ("geodesic", result)
        }
        Command::Match(args) => {
            let (a, b) = load_pair(args, &load)?;
            let (path, m) = optimal_match(&a.curve, &b.curve, &cfg.matching())?;
            let s = emit_path(out, "geodesic", &path, &mut files)?;
            emit_matching(out, "match", &a.curve, &m, &mut files)?;
            ("match", matching_record(&m, &s))
        }
        Command::DpMatch(args) => {
            let (a, b) = load_pair(args, &load)?;
            let grid = dp_grid(&a.curve, &b.curve, cfg.square)?;
            let (path, m) = dp_match(&a.curve, &b.curve, cfg.square, &cfg.shoot())?;
            let s = emit_path(out, "geodesic", &path, &mut files)?;
            emit_matching(out, "dp", &a.curve, &m, &mut files)?;
            let mut record = matching_record(&m, &s);
            let n = grid.size - 1;
            record["square"] = json!(cfg.square);
            record["cost"] = num(grid.cost_at(n, n));
            record["grid_path"] = json!(grid.path().iter().map(|&(i, j)| [i, j]).collect::<Vec<_>>());
            ("dp-match", record)
        }
        Command::Compare(args) => {
            let (a, b) = load_pair(args, &load)?;
            let raw = geodesic_shoot(&a.curve, &b.curve, &cfg.shoot())?;
            let s_raw = emit_path(out, "unmatched", &raw.path, &mut files)?;
            let (om_path, om) = optimal_match(&a.curve, &b.curve, &cfg.matching())?;
            let s_om = emit_path(out, "optimal", &om_path, &mut files)?;
            emit_matching(out, "optimal", &a.curve, &om, &mut files)?;
            let (dp_path, dp) = dp_match(&a.curve, &b.curve, cfg.square, &cfg.shoot())?;
            let s_dp = emit_path(out, "dp", &dp_path, &mut files)?;
            emit_matching(out, "dp", &a.curve, &dp, &mut files)?;
            let trace = out.join("verticality.csv");
            let rows = (0..s_raw.verticality.len()).map(|j| {
                let s = j as f64 / raw.path.steps() as f64;
                vec![s, s_raw.verticality[j], s_om.verticality[j], s_dp.verticality[j]]
            });
            write_table(&trace, &["s", "unmatched", "optimal", "dp"], rows)?;
            files.push(rel(out, &trace));
            let gap = (s_om.length - s_dp.length).abs() / s_dp.length;
            let result = json!({
                "source": a.name,
                "target": b.name,
                "unmatched": {
                    "length": num(s_raw.length),
                    "energy": num(s_raw.energy),
                    "converged": raw.converged,
                    "max_verticality": num(s_raw.max_verticality),
                },
                "optimal": matching_record(&om, &s_om),
                "dp": matching_record(&dp, &s_dp),
                "relative_gap": num(gap),
            });
            ("compare", result)
        }
        Command::Dist(args) => {
            let (labels, curves) = load_set(args, &load)?;
            let m = distance_matrix(&curves, labels, &cfg.matching())?;
            emit_matrix(out, &m, &mut files)?;
            ("dist", json!({"labels": m.labels, "values": nums(&m.values)}))
        }
        Command::Mean(args) => {
            let (labels, curves) = load_set(args, &load)?;
            let k = karcher_mean(&curves, &cfg.karcher())?;
            let mean = CurveSet::new(
                k.mean.manifold(),
                vec![NamedCurve {
                    name: "mean".into(),
                    curve: k.mean.clone(),
                }],
            )?;
            files.push(rel(out, &save_curves(out, "mean", &mean)?));
            let reps = labels
                .iter()
                .zip(&k.representatives)
                .map(|(l, c)| NamedCurve {
                    name: l.clone(),
                    curve: c.clone(),
                })
                .collect();
            let reps = CurveSet::new(k.mean.manifold(), reps)?;
            files.push(rel(out, &save_curves(out, "representatives", &reps)?));
            let hist = out.join("mean_history.csv");
            write_table(
                &hist,
                &["estimate", "gradient_norm", "objective"],
                k.gradient_norms
                    .iter()
                    .zip(&k.objective)
                    .enumerate()
                    .map(|(i, (&g, &o))| vec![i as f64, g, o]),
            )?;
            files.push(rel(out, &hist));
            let result = json!({
                "curves": labels,
                "iterations": k.iterations,
                "converged": k.converged,
                "gradient_norms": nums(&k.gradient_norms),
                "objective": nums(&k.objective),
            });
            ("mean", result)
        }
        Command::Cluster(args) => {
            let (labels, curves) = load_set(&args.set, &load)?;
            let m = distance_matrix(&curves, labels, &cfg.matching())?;
            emit_matrix(out, &m, &mut files)?;
            let cut = match (args.clusters, args.height) {
                (_, Some(h)) => Cut::Height(h),
                (k, None) => Cut::Clusters(k.unwrap_or(2)),
            };
            let cl = cluster(&m, args.linkage, cut)?;
            let file = out.join("assignments.csv");
            write_lines(
                &file,
                "label,cluster",
                m.labels.iter().zip(&cl.assignment).map(|(l, c)| format!("{l},{c}")),
            )?;
            files.push(rel(out, &file));
            let file = out.join("dendrogram.csv");
            write_lines(
                &file,
                "a,b,height,size",
                cl.dendrogram
                    .merges
                    .iter()
                    .map(|g| format!("{},{},{},{}", g.a, g.b, fmt_f64(g.height), g.size)),
            )?;
            files.push(rel(out, &file));
            let result = json!({
                "labels": m.labels,
                "linkage": args.linkage.as_str(),
                "assignment": cl.assignment,
                "merges": cl.dendrogram.merges.iter().map(|g| json!({
                    "a": g.a, "b": g.b, "height": num(g.height), "size": g.size,
                })).collect::<Vec<_>>(),
            });
            ("cluster", result)
        }
        Command::Gen(args) => {
            let set = generate(args.kind, args.n, cfg.seed)?;
            files.push(rel(out, &save_curves(out, args.kind.as_str(), &set)?));
            let result = json!({
                "generator": args.kind.as_str(),
                "manifold": set.manifold.to_string(),
                "n": set.curves[0].curve.n(),
                "curves": set.curves.iter().map(|c| c.name.clone()).collect::<Vec<_>>(),
            });
            ("gen", result)
        }
        Command::Converge(args) => {
            let study = convergence_study(args.family, &args.ns, cfg.steps)?;
            let file = out.join("convergence.csv");
            write_lines(
                &file,
                "n,energy,error",
                study
                    .rows
                    .iter()
                    .map(|r| format!("{},{},{}", r.n, fmt_f64(r.energy), fmt_f64(r.error))),
            )?;
            files.push(rel(out, &file));
            let result = json!({
                "family": args.family.as_str(),
                "reference_n": study.reference_n,
                "reference_energy": num(study.reference),
                "n": study.rows.iter().map(|r| r.n).collect::<Vec<_>>(),
                "energy": study.rows.iter().map(|r| num(r.energy)).collect::<Vec<_>>(),
                "error": study.rows.iter().map(|r| num(r.error)).collect::<Vec<_>>(),
                "slope": study.slope.map_or(Value::Null, num),
                "errors_settle": study.errors_settle(1.1),
            });
            ("converge", result)
        }
    };
    let manifest = out.join("manifest.json");
    write_json(
        &manifest,
        &json!({
            "command": name,
            "config": config_record(cfg),
            "result": result,
            "files": files,
        }),
    )?;
    info!("{name}: wrote {}", manifest.display());
    Ok(manifest)
}
