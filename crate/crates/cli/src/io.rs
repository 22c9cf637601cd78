//! Curve files: a JSON manifest naming one CSV coordinate block per curve.
//!
//! ```text
//! shapes.json          {"format": 1, "kind": "curves", "manifold": "sphere2",
//!                       "curves": [{"name": "a", "file": "shapes/a.csv"}]}
//! shapes/a.csv         x0,x1,x2
//!                      0.0000000000000000e0,0.0000000000000000e0,1.0000000000000000e0
//! ```
//!
//! Path manifests (`"kind": "path:<geodesic|horizontal|raw>"`) add the path parameter `s` to every
//! entry and store velocities next to the coordinates (`v0,v1,…`).

use std::fs;
use std::path::{Path, PathBuf};

use geomatch::curve::{CurvePath, CurveTangent, DiscreteCurve, EdgePolicy, PathKind};
use geomatch::linalg::Vector;
use geomatch::{Curve, GeomError, ManifoldSpec};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

pub const FORMAT_VERSION: u32 = 1;

/// Largest deviation from the unit sphere a row may have before loading
/// rejects it instead of renormalizing.
pub const SPHERE_DRIFT: f64 = 1e-6;

/// Fixed-width scientific notation with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON number written with [`fmt_f64`]; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    serde_json::from_str(&fmt_f64(x)).expect("formatted float is valid JSON")
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct NamedCurve {
    pub name: String,
    pub curve: Curve,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveSet {
    pub manifold: ManifoldSpec,
    pub curves: Vec<NamedCurve>,
}

impl CurveSet {
    pub fn new(manifold: ManifoldSpec, curves: Vec<NamedCurve>) -> CliResult<Self> {
        if let Some(bad) = curves.iter().find(|c| c.curve.manifold() != manifold) {
            return Err(CliError::Invalid(format!(
                "curve `{}` lives on {}, the set on {manifold}",
                bad.name,
                bad.curve.manifold()
            )));
        }
        Ok(Self { manifold, curves })
    }

    pub fn get(&self, name: &str) -> Option<&Curve> {
        self.curves.iter().find(|c| c.name == name).map(|c| &c.curve)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct LoadOptions {
    pub policy: EdgePolicy,
    /// Manifold of bare CSV files; Euclidean of the column count if absent.
    pub manifold: Option<ManifoldSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    format: u32,
    kind: String,
    manifold: String,
    curves: Vec<Entry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    name: String,
    file: String,
    #[serde(default)]
    s: Option<f64>,
}

struct Row {
    line: u64,
    values: Vec<f64>,
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_json(path: &Path, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    write_text(path, &text)
}

/// Writes a numeric CSV table with a header line.
pub fn write_table<I>(path: &Path, header: &[&str], rows: I) -> CliResult<()>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    write_text(path, &text)
}

fn read_rows(path: &Path) -> CliResult<Vec<Row>> {
    let text = read_text(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Row {
            path: path.into(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let first = record.get(0).unwrap_or("");
        if i == 0 && first.starts_with(|c: char| c.is_ascii_alphabetic()) {
            continue;
        }
        let values = record
            .iter()
            .map(|cell| cell.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Row {
                path: path.into(),
                line,
                message: format!("malformed number: {e}"),
            })?;
        rows.push(Row { line, values });
    }
    Ok(rows)
}

fn row_error(path: &Path, line: u64, message: impl Into<String>) -> CliError {
    CliError::Row {
        path: path.into(),
        line,
        message: message.into(),
    }
}

/// Checks one coordinate row against the model invariants.
fn check_row(m: ManifoldSpec, path: &Path, row: &Row, width: usize) -> CliResult<Vector<f64>> {
    if row.values.len() != width {
        return Err(row_error(
            path,
            row.line,
            format!("expected {width} columns, found {}", row.values.len()),
        ));
    }
    let coords = Vector::from_slice(&row.values[..m.coord_dim()]);
    if m == ManifoldSpec::Sphere2 {
        let drift = (coords.norm() - 1.0).abs();
        if !(drift < SPHERE_DRIFT) {
            return Err(row_error(path, row.line, format!("point is {drift:.3e} off the unit sphere")));
        }
    }
    m.validate_coords(&coords).map_err(|e| row_error(path, row.line, e.to_string()))
}

fn build_curve(m: ManifoldSpec, path: &Path, rows: &[Row], policy: EdgePolicy) -> CliResult<Curve> {
    if rows.len() < 2 {
        return Err(CliError::Manifest {
            path: path.into(),
            message: format!("a curve needs at least 2 points, found {}", rows.len()),
        });
    }
    let points = rows
        .iter()
        .map(|r| check_row(m, path, r, m.coord_dim()))
        .collect::<CliResult<Vec<_>>>()?;
    DiscreteCurve::with_policy(m, points, policy).map_err(|e| match e {
        GeomError::DegenerateEdge { index } => row_error(path, rows[index + 1].line, e.to_string()),
        other => CliError::Geom(other),
    })
}

fn parse_manifest(path: &Path) -> CliResult<(Manifest, ManifoldSpec)> {
    let manifest: Manifest = serde_json::from_str(&read_text(path)?).map_err(|e| CliError::Manifest {
        path: path.into(),
        message: e.to_string(),
    })?;
    if manifest.format != FORMAT_VERSION {
        return Err(CliError::Manifest {
            path: path.into(),
            message: format!("unsupported format version {}", manifest.format),
        });
    }
    let m = manifest.manifold.parse().map_err(|e: GeomError| CliError::Manifest {
        path: path.into(),
        message: e.to_string(),
    })?;
    Ok((manifest, m))
}

fn entry_path(manifest: &Path, file: &str) -> PathBuf {
    manifest.parent().unwrap_or(Path::new("")).join(file)
}

/// Loads a curve manifest (`.json`) or a single bare CSV curve.
pub fn load_curves(path: &Path, opts: &LoadOptions) -> CliResult<CurveSet> {
    if path.extension().is_some_and(|e| e == "json") {
        let (manifest, m) = parse_manifest(path)?;
        if manifest.kind != "curves" {
            return Err(CliError::Manifest {
                path: path.into(),
                message: format!("expected a curve set, found kind `{}`", manifest.kind),
            });
        }
        if let Some(hint) = opts.manifold.filter(|&h| h != m) {
            return Err(CliError::Manifest {
                path: path.into(),
                message: format!("manifold {m} does not match the requested {hint}"),
            });
        }
        let curves = manifest
            .curves
            .iter()
            .map(|e| {
                let file = entry_path(path, &e.file);
                let curve = build_curve(m, &file, &read_rows(&file)?, opts.policy)?;
                Ok(NamedCurve {
                    name: e.name.clone(),
                    curve,
                })
            })
            .collect::<CliResult<Vec<_>>>()?;
        return CurveSet::new(m, curves);
    }
    let rows = read_rows(path)?;
    let m = match opts.manifold {
        Some(m) => m,
        None => {
            let d = rows.first().map_or(0, |r| r.values.len());
            ManifoldSpec::euclidean(d)?
        }
    };
    let name = path
        .file_stem()
        .map_or_else(|| "curve".to_string(), |s| s.to_string_lossy().into_owned());
    let curve = build_curve(m, path, &rows, opts.policy)?;
    CurveSet::new(m, vec![NamedCurve { name, curve }])
}

/// Resolves `file` or `file#name` to one curve (the first if unnamed).
pub fn load_one(spec: &str, opts: &LoadOptions) -> CliResult<NamedCurve> {
    let (file, name) = match spec.rsplit_once('#') {
        Some((f, n)) => (f, Some(n)),
        None => (spec, None),
    };
    let set = load_curves(Path::new(file), opts)?;
    let found = match name {
        Some(n) => set.curves.into_iter().find(|c| c.name == n),
        None => set.curves.into_iter().next(),
    };
    found.ok_or_else(|| CliError::Invalid(format!("no curve `{}` in {file}", name.unwrap_or("?"))))
}

fn check_name(name: &str) -> CliResult<()> {
    let ok = !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
        && !name.starts_with('.');
    if ok {
        Ok(())
    } else {
        Err(CliError::Invalid(format!("curve name `{name}` is not a safe file name")))
    }
}

fn coord_header(prefix: char, d: usize) -> Vec<String> {
    (0..d).map(|i| format!("{prefix}{i}")).collect()
}

fn curve_rows(c: &Curve, w: Option<&CurveTangent<f64>>) -> Vec<Vec<f64>> {
    c.points()
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let mut row = p.as_slice().to_vec();
            if let Some(w) = w {
                row.extend_from_slice(w.vecs[k].as_slice());
            }
            row
        })
        .collect()
}

/// Writes `<dir>/<stem>.json` and one CSV per curve under `<dir>/<stem>/`.
/// Returns the manifest path.
pub fn save_curves(dir: &Path, stem: &str, set: &CurveSet) -> CliResult<PathBuf> {
    check_name(stem)?;
    let header = coord_header('x', set.manifold.coord_dim());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut entries = Vec::new();
    for c in &set.curves {
        check_name(&c.name)?;
        let rel = format!("{stem}/{}.csv", c.name);
        write_table(&dir.join(&rel), &header, curve_rows(&c.curve, None))?;
        entries.push(json!({"name": c.name, "file": rel}));
    }
    let manifest = dir.join(format!("{stem}.json"));
    write_json(
        &manifest,
        &json!({
            "format": FORMAT_VERSION,
            "kind": "curves",
            "manifold": set.manifold.to_string(),
            "curves": entries,
        }),
    )?;
    Ok(manifest)
}

/// Writes a path as one curve file per sample `s = j/m`, with velocities
/// when the path stores them.
pub fn save_path(dir: &Path, stem: &str, p: &CurvePath<f64>) -> CliResult<PathBuf> {
    check_name(stem)?;
    let d = p.manifold.coord_dim();
    let mut header = coord_header('x', d);
    if p.velocities.is_some() {
        header.extend(coord_header('v', d));
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let m = p.steps();
    let width = m.to_string().len();
    let mut entries = Vec::new();
    for (j, c) in p.curves.iter().enumerate() {
        let rel = format!("{stem}/s{j:0width$}.csv");
        let w = p.velocities.as_ref().map(|v| &v[j]);
        write_table(&dir.join(&rel), &header, curve_rows(c, w))?;
        entries.push(json!({"name": format!("s{j:0width$}"), "file": rel, "s": num(j as f64 / m as f64)}));
    }
    let manifest = dir.join(format!("{stem}.json"));
    write_json(
        &manifest,
        &json!({
            "format": FORMAT_VERSION,
            "kind": format!("path:{}", p.kind.as_str()),
            "manifold": p.manifold.to_string(),
            "curves": entries,
        }),
    )?;
    Ok(manifest)
}

/// Reloads a path written by [`save_path`] and checks the shared size,
/// the manifold and the uniform `s` grid.
pub fn load_path(path: &Path) -> CliResult<CurvePath<f64>> {
    let (manifest, m) = parse_manifest(path)?;
    let bad = |message: String| CliError::Manifest {
        path: path.into(),
        message,
    };
    let kind = match manifest.kind.as_str() {
        "path:geodesic" => PathKind::Geodesic,
        "path:horizontal" => PathKind::Horizontal,
        "path:raw" => PathKind::Raw,
        other => return Err(bad(format!("expected a path, found kind `{other}`"))),
    };
    let steps = manifest.curves.len().saturating_sub(1);
    if steps == 0 {
        return Err(bad("a path needs at least two curves".into()));
    }
    let d = m.coord_dim();
    let mut curves = Vec::with_capacity(steps + 1);
    let mut velocities = Vec::with_capacity(steps + 1);
    let mut with_velocity = None;
    for (j, e) in manifest.curves.iter().enumerate() {
        let s = e.s.ok_or_else(|| bad(format!("entry {j} has no `s`")))?;
        if (s - j as f64 / steps as f64).abs() > 1e-12 {
            return Err(bad(format!("entry {j} has s = {s}, not on the uniform grid")));
        }
        let file = entry_path(path, &e.file);
        let rows = read_rows(&file)?;
        let width = rows.first().map_or(d, |r| r.values.len());
        let has_v = width == 2 * d;
        if *with_velocity.get_or_insert(has_v) != has_v {
            return Err(bad(format!("entry {j} disagrees on stored velocities")));
        }
        let points = rows
            .iter()
            .map(|r| check_row(m, &file, r, if has_v { 2 * d } else { d }))
            .collect::<CliResult<Vec<_>>>()?;
        let curve = match DiscreteCurve::new(m, points.clone()) {
            Err(GeomError::DegenerateEdge { .. }) if m.is_flat() => DiscreteCurve::with_policy(m, points, EdgePolicy::Relaxed),
            other => other,
        };
        curves.push(curve?);
        if has_v {
            velocities.push(CurveTangent {
                vecs: rows.iter().map(|r| Vector::from_slice(&r.values[d..])).collect(),
            });
        }
    }
    let velocities = with_velocity.unwrap_or(false).then_some(velocities);
    Ok(CurvePath::new(curves, velocities, kind)?)
}
