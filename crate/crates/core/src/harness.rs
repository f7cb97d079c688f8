//! Corpus configuration, tolerances and report emission.
//!
//! A corpus file is a flat `key = value` text file. Entries are separated by
//! blank lines and `#` starts a comment:
//!
//! ```text
//! id = square
//! source = square
//! cells = 100
//! alpha = 1
//! K = 0
//!
//! id = cap
//! source = spherical-cap
//! radius = 0.6
//! level = 5
//! K = 1
//! ```
//!
//! `source` is either a built-in generator (`disk`, `square`, `rectangle`,
//! `ellipse`, `hyperbolic-polygon`, `spherical-cap`, `warped-disk`) or
//! `mesh:<path>`, with relative paths resolved against the config file.
//!
//! Tolerances use the same syntax; `SGL_TOL_OVERRIDE` may name such a file.

use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::gap::{self, BoundOptions, Evaluation, GapBoundReport, Verdict};
use crate::mesh::{generate, MeshDomain};
use crate::par;
use crate::spaceform::CurvaturePair;
use crate::warped::{Warp, WarpedSurface};

/// Environment variable naming a tolerance override file.
pub const TOL_OVERRIDE_VAR: &str = "SGL_TOL_OVERRIDE";

/// Every numerical tolerance used by the pipelines.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relative eigen-residual `‖Kx − λMx‖ / (λ‖Mx‖)` accepted from a solver.
    pub eigen_residual: f64,
    /// Relative margin on `gap ≤ bound` before a domain counts as violating.
    pub verdict_margin: f64,
    /// Relative sharpness accepted for meshed balls.
    pub sharpness_margin: f64,
    /// Relative sharpness accepted for balls through the radial pipeline.
    pub radial_sharpness: f64,
    /// Balance residual `|X(p)| / ∫u₁²`.
    pub balance: f64,
    /// Monotonicity certification of the test profiles.
    pub certification: f64,
    /// Relative slack in the symmetrized chain and min-max checks.
    pub chain: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eigen_residual: 1e-8,
            verdict_margin: 0.01,
            sharpness_margin: 0.02,
            radial_sharpness: 1e-6,
            balance: 1e-7,
            certification: 1e-7,
            chain: 1e-3,
        }
    }
}

impl Tolerances {
    pub const KEYS: [&'static str; 7] = [
        "eigen_residual",
        "verdict_margin",
        "sharpness_margin",
        "radial_sharpness",
        "balance",
        "certification",
        "chain",
    ];

    fn slot(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "eigen_residual" => &mut self.eigen_residual,
            "verdict_margin" => &mut self.verdict_margin,
            "sharpness_margin" => &mut self.sharpness_margin,
            "radial_sharpness" => &mut self.radial_sharpness,
            "balance" => &mut self.balance,
            "certification" => &mut self.certification,
            "chain" => &mut self.chain,
            _ => return None,
        })
    }

    /// Defaults overridden by the `key = value` lines of `text`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut tol = Self::default();
        for (line, key, value) in key_values(text)? {
            let v = parse_f64(line, &key, &value)?;
            if !(v >= 0.0) {
                return Err(Error::Parse { line, msg: format!("tolerance '{key}' must be nonnegative") });
            }
            *tol.slot(&key).ok_or_else(|| Error::Parse {
                line,
                msg: format!("unknown tolerance '{key}' (expected one of {})", Self::KEYS.join(", ")),
            })? = v;
        }
        Ok(tol)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read tolerance file {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Defaults, or the file named by `SGL_TOL_OVERRIDE` when it is set.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(TOL_OVERRIDE_VAR) {
            Some(p) if !p.is_empty() => Self::read(PathBuf::from(p)),
            _ => Ok(Self::default()),
        }
    }
}

/// `(line, key, value)` for every non-blank, non-comment line.
fn key_values(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let (k, v) = l
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: i + 1, msg: format!("expected 'key = value', found '{l}'") })?;
        out.push((i + 1, k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64> {
    match value.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::Parse { line, msg: format!("'{key}' expects a finite number, found '{value}'") }),
    }
}

/// Where a corpus domain comes from.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Source {
    Mesh { path: PathBuf },
    Disk { k: f64, radius: f64, level: usize },
    Square { cells: usize },
    Rectangle { width: f64, height: f64, cells: usize },
    Ellipse { a: f64, b: f64, level: usize },
    HyperbolicPolygon { k: f64, sides: usize, circumradius: f64, level: usize },
    SphericalCap { k: f64, radius: f64, level: usize },
    /// Disk of radius `radius` about the pole of `dr² + (r + a r³)² dθ²`.
    WarpedDisk { a: f64, radius: f64 },
}

impl Source {
    pub const GENERATORS: [&'static str; 7] =
        ["disk", "square", "rectangle", "ellipse", "hyperbolic-polygon", "spherical-cap", "warped-disk"];

    /// Builds a source from a generator name and its parameters. Missing
    /// parameters take documented defaults; unknown ones are rejected.
    pub fn from_params(name: &str, params: &BTreeMap<String, String>) -> Result<Self> {
        let mut p = Params { map: params, used: BTreeSet::new() };
        let src = match name {
            "disk" => Source::Disk { k: p.f("k", 0.0)?, radius: p.f("radius", 1.0)?, level: p.u("level", 5)? },
            "square" => Source::Square { cells: p.u("cells", 100)? },
            "rectangle" => Source::Rectangle {
                width: p.f("width", 1.0)?,
                height: p.f("height", 2.0)?,
                cells: p.u("cells", 70)?,
            },
            "ellipse" => Source::Ellipse { a: p.f("a", 1.5)?, b: p.f("b", 1.0)?, level: p.u("level", 5)? },
            "hyperbolic-polygon" => {
                let k = p.f("k", -1.0)?;
                if !(k < 0.0) {
                    return Err(Error::invalid(format!("hyperbolic-polygon needs k < 0, got {k}")));
                }
                Source::HyperbolicPolygon {
                    k,
                    sides: p.u("sides", 5)?,
                    circumradius: p.f("circumradius", 1.0)?,
                    level: p.u("level", 5)?,
                }
            }
            "spherical-cap" => {
                let k = p.f("k", 1.0)?;
                if !(k > 0.0) {
                    return Err(Error::invalid(format!("spherical-cap needs k > 0, got {k}")));
                }
                Source::SphericalCap { k, radius: p.f("radius", 0.6)?, level: p.u("level", 5)? }
            }
            "warped-disk" => Source::WarpedDisk { a: p.f("a", 0.1)?, radius: p.f("radius", 1.0)? },
            other => {
                return Err(Error::invalid(format!(
                    "unknown generator '{other}' (expected mesh:<path> or one of {})",
                    Self::GENERATORS.join(", ")
                )))
            }
        };
        if let Some(extra) = params.keys().find(|k| !p.used.contains(k.as_str())) {
            return Err(Error::invalid(format!("unknown parameter '{extra}' for generator '{name}'")));
        }
        Ok(src)
    }

    /// Curvature of the ambient space (the upper curvature for warped disks).
    pub fn ambient_curvature(&self) -> Result<f64> {
        Ok(match self {
            Source::Mesh { path } => MeshDomain::read(path)?.curvature(),
            Source::Disk { k, .. } | Source::HyperbolicPolygon { k, .. } | Source::SphericalCap { k, .. } => *k,
            Source::Square { .. } | Source::Rectangle { .. } | Source::Ellipse { .. } => 0.0,
            Source::WarpedDisk { a, radius } => WarpedSurface::new(Warp::Cubic(*a), *radius)?.curvature_range().1,
        })
    }

    /// The mesh for mesh-based sources; `None` for warped disks.
    pub fn mesh(&self) -> Result<Option<MeshDomain>> {
        Ok(Some(match self {
            Source::Mesh { path } => MeshDomain::read(path)?,
            Source::Disk { k, radius, level } => generate::geodesic_disk(*k, *radius, *level)?,
            Source::Square { cells } => generate::unit_square(*cells)?,
            Source::Rectangle { width, height, cells } => generate::rectangle(*width, *height, *cells)?,
            Source::Ellipse { a, b, level } => generate::ellipse(*a, *b, *level)?,
            Source::HyperbolicPolygon { k, sides, circumradius, level } => {
                generate::regular_polygon(*k, *sides, *circumradius, *level)?
            }
            Source::SphericalCap { k, radius, level } => generate::geodesic_disk(*k, *radius, *level)?,
            Source::WarpedDisk { .. } => return Ok(None),
        }))
    }

    /// Runs the matching pipeline.
    pub fn evaluate(&self, alpha: f64, pair: &CurvaturePair, opts: &BoundOptions) -> Result<Evaluation> {
        match self {
            Source::WarpedDisk { a, radius } => {
                let ws = WarpedSurface::new(Warp::Cubic(*a), *radius)?;
                gap::evaluate_warped(&ws, *radius, alpha, pair, opts)
            }
            _ => gap::evaluate_mesh(&self.mesh()?.expect("mesh source"), alpha, pair, opts),
        }
    }
}

struct Params<'a> {
    map: &'a BTreeMap<String, String>,
    used: BTreeSet<&'static str>,
}

impl Params<'_> {
    fn f(&mut self, key: &'static str, default: f64) -> Result<f64> {
        self.used.insert(key);
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => match v.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => Err(Error::invalid(format!("parameter '{key}' expects a number, found '{v}'"))),
            },
        }
    }

    fn u(&mut self, key: &'static str, default: usize) -> Result<usize> {
        self.used.insert(key);
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<usize>()
                .map_err(|_| Error::invalid(format!("parameter '{key}' expects a nonnegative integer, found '{v}'"))),
        }
    }
}

/// The outcome an entry is expected to produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Expected {
    Holds,
    /// The bound is not certified: either a violated verdict or a hypothesis
    /// (curvature witness, hemisphere, hull) rejected before evaluation.
    Violated,
    Ineligible,
}

impl std::str::FromStr for Expected {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "holds" => Ok(Expected::Holds),
            "violated" => Ok(Expected::Violated),
            "ineligible" => Ok(Expected::Ineligible),
            _ => Err(Error::invalid(format!("expected must be holds, violated or ineligible, got '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorpusEntry {
    pub id: String,
    pub source: Source,
    pub alpha: f64,
    /// Declared lower curvature bound `K`.
    pub k_lower: f64,
    /// Declared upper curvature bound; the ambient curvature when absent.
    pub k_upper: Option<f64>,
    pub expected: Option<Expected>,
}

/// Keys an entry block may carry besides generator parameters.
const ENTRY_KEYS: [&str; 6] = ["id", "source", "alpha", "K", "k_upper", "expected"];

impl CorpusEntry {
    fn from_block(block: &[(usize, String, String)], base: &Path) -> Result<Self> {
        let first = block[0].0;
        let mut seen = BTreeMap::new();
        for (line, k, v) in block {
            if seen.insert(k.clone(), v.clone()).is_some() {
                return Err(Error::Parse { line: *line, msg: format!("duplicate key '{k}'") });
            }
        }
        let wrap = |e: Error| match e {
            Error::Parse { .. } => e,
            other => Error::Parse { line: first, msg: other.to_string() },
        };
        let id = seen.get("id").cloned().ok_or_else(|| Error::Parse { line: first, msg: "entry has no 'id'".into() })?;
        if id.is_empty() || id.contains(',') || id.contains('"') {
            return Err(Error::Parse { line: first, msg: format!("invalid id '{id}'") });
        }
        let src = seen
            .get("source")
            .cloned()
            .ok_or_else(|| Error::Parse { line: first, msg: format!("entry '{id}' has no 'source'") })?;
        let line_of = |key: &str| block.iter().find(|b| b.1 == key).map_or(first, |b| b.0);
        let params: BTreeMap<String, String> =
            seen.iter().filter(|(k, _)| !ENTRY_KEYS.contains(&k.as_str())).map(|(k, v)| (k.clone(), v.clone())).collect();
        let source = match src.strip_prefix("mesh:") {
            Some(p) => {
                if let Some(extra) = params.keys().next() {
                    return Err(Error::Parse {
                        line: line_of(extra),
                        msg: format!("unknown key '{extra}' for a mesh source"),
                    });
                }
                let p = Path::new(p.trim());
                Source::Mesh { path: if p.is_absolute() { p.to_path_buf() } else { base.join(p) } }
            }
            None => Source::from_params(&src, &params).map_err(wrap)?,
        };
        let num = |key: &str| -> Result<Option<f64>> {
            seen.get(key).map(|v| parse_f64(line_of(key), key, v)).transpose()
        };
        let alpha = num("alpha")?.unwrap_or(1.0);
        let k_lower = num("K")?.ok_or_else(|| Error::Parse { line: first, msg: format!("entry '{id}' has no 'K'") })?;
        let k_upper = num("k_upper")?;
        // Mesh files are read lazily, so only generated sources are checked here.
        if !matches!(source, Source::Mesh { .. }) {
            let k = match k_upper {
                Some(k) => k,
                None => source.ambient_curvature().map_err(wrap)?,
            };
            CurvaturePair::new(k, k_lower).map_err(|e| Error::Parse { line: line_of("K"), msg: e.to_string() })?;
        }
        let expected = seen
            .get("expected")
            .map(|v| v.parse::<Expected>().map_err(|e| Error::Parse { line: line_of("expected"), msg: e.to_string() }))
            .transpose()?;
        Ok(Self { id, source, alpha, k_lower, k_upper, expected })
    }

    /// The curvature pair; the upper curvature defaults to the ambient one.
    pub fn pair(&self) -> Result<CurvaturePair> {
        let k_upper = match self.k_upper {
            Some(k) => k,
            None => self.source.ambient_curvature()?,
        };
        CurvaturePair::new(k_upper, self.k_lower)
    }

    pub fn evaluate(&self, opts: &BoundOptions) -> Result<Evaluation> {
        self.source.evaluate(self.alpha, &self.pair()?, opts)
    }
}

/// Parses a corpus file; `base` resolves relative mesh paths.
pub fn parse_corpus(text: &str, base: &Path) -> Result<Vec<CorpusEntry>> {
    let mut blocks: Vec<Vec<(usize, String, String)>> = vec![Vec::new()];
    for (i, raw) in text.lines().enumerate() {
        let l = raw.split('#').next().unwrap_or("").trim();
        if raw.trim().is_empty() {
            if !blocks.last().unwrap().is_empty() {
                blocks.push(Vec::new());
            }
            continue;
        }
        if l.is_empty() {
            continue;
        }
        let (k, v) = l
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: i + 1, msg: format!("expected 'key = value', found '{l}'") })?;
        blocks.last_mut().unwrap().push((i + 1, k.trim().to_string(), v.trim().to_string()));
    }
    let mut entries = Vec::new();
    let mut ids = BTreeMap::new();
    for b in blocks.iter().filter(|b| !b.is_empty()) {
        let e = CorpusEntry::from_block(b, base)?;
        if let Some(prev) = ids.insert(e.id.clone(), b[0].0) {
            return Err(Error::Parse { line: b[0].0, msg: format!("id '{}' already used at line {prev}", e.id) });
        }
        entries.push(e);
    }
    entries.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(entries)
}

pub fn read_corpus(path: impl AsRef<Path>) -> Result<Vec<CorpusEntry>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("cannot read corpus file {}: {e}", path.display())))?;
    parse_corpus(&text, path.parent().unwrap_or(Path::new(".")))
}

/// How one entry came out.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Outcome {
    Evaluated { report: GapBoundReport },
    Ineligible { message: String },
    Error { message: String },
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Evaluated { report } => match report.verdict {
                Verdict::Holds => "holds",
                Verdict::Violated => "violated",
            },
            Outcome::Ineligible { .. } => "ineligible",
            Outcome::Error { .. } => "error",
        }
    }

    fn from_result(r: Result<GapBoundReport>) -> Self {
        match r {
            Ok(report) => Outcome::Evaluated { report },
            Err(Error::Ineligible(message)) => Outcome::Ineligible { message },
            Err(e) => Outcome::Error { message: e.to_string() },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EntryResult {
    pub id: String,
    pub expected: Option<Expected>,
    pub outcome: Outcome,
}

impl EntryResult {
    /// Unexpected outcomes make the corpus fail. Without an expectation the
    /// entry is expected to hold.
    pub fn as_expected(&self) -> bool {
        match (self.expected.unwrap_or(Expected::Holds), &self.outcome) {
            (Expected::Holds, Outcome::Evaluated { report }) => report.verdict == Verdict::Holds,
            (Expected::Violated, Outcome::Evaluated { report }) => report.verdict == Verdict::Violated,
            (Expected::Violated | Expected::Ineligible, Outcome::Ineligible { .. }) => true,
            _ => false,
        }
    }

    pub fn csv_row(&self) -> String {
        match &self.outcome {
            Outcome::Evaluated { report } => format!("{},{}", self.id, report.csv_row()),
            other => {
                let cells: Vec<&str> = GapBoundReport::FIELDS
                    .iter()
                    .map(|f| if *f == "verdict" { other.label() } else { "" })
                    .collect();
                format!("{},{}", self.id, cells.join(","))
            }
        }
    }
}

/// Header of corpus CSV output: `id` followed by the report fields.
pub fn corpus_csv_header() -> String {
    format!("id,{}", GapBoundReport::csv_header())
}

pub fn run_entry(entry: &CorpusEntry, opts: &BoundOptions) -> EntryResult {
    EntryResult {
        id: entry.id.clone(),
        expected: entry.expected,
        outcome: Outcome::from_result(entry.evaluate(opts).map(|e| e.report)),
    }
}

/// Evaluates all entries in parallel; results come back in id order.
pub fn run_corpus(entries: &[CorpusEntry], opts: &BoundOptions) -> CorpusRun {
    let mut results = par::map(entries, |e| run_entry(e, opts));
    results.sort_by(|a, b| a.id.cmp(&b.id));
    CorpusRun { results }
}

#[derive(Clone, Debug, Serialize)]
pub struct CorpusRun {
    pub results: Vec<EntryResult>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub holds: usize,
    pub violated: usize,
    pub ineligible: usize,
    pub errors: usize,
    pub unexpected: usize,
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "holds={} violated={} ineligible={} errors={} unexpected={}",
            self.holds, self.violated, self.ineligible, self.errors, self.unexpected
        )
    }
}

impl CorpusRun {
    pub fn csv(&self) -> String {
        let mut s = corpus_csv_header();
        s.push('\n');
        for r in &self.results {
            s.push_str(&r.csv_row());
            s.push('\n');
        }
        s
    }

    pub fn summary(&self) -> Summary {
        let mut s = Summary::default();
        for r in &self.results {
            match r.outcome.label() {
                "holds" => s.holds += 1,
                "violated" => s.violated += 1,
                "ineligible" => s.ineligible += 1,
                _ => s.errors += 1,
            }
            if !r.as_expected() {
                s.unexpected += 1;
            }
        }
        s
    }

    /// Human-readable table: one line per entry plus the counts.
    pub fn summary_table(&self) -> String {
        let w = self.results.iter().map(|r| r.id.len()).max().unwrap_or(2).max(2);
        let mut s = format!("{:<w$}  {:<10}  {:>14}  note\n", "id", "outcome", "slack");
        for r in &self.results {
            let (slack, note) = match &r.outcome {
                Outcome::Evaluated { report } => (format!("{:.4e}", report.relative_slack), String::new()),
                Outcome::Ineligible { message } | Outcome::Error { message } => ("-".into(), message.clone()),
            };
            let flag = if r.as_expected() { "" } else { " [unexpected]" };
            s.push_str(&format!("{:<w$}  {:<10}  {:>14}  {note}{flag}\n", r.id, r.outcome.label(), slack));
        }
        s.push_str(&self.summary().to_string());
        s.push('\n');
        s
    }

    /// `0` when every entry is as expected, `1` when an unexpected verdict
    /// occurred, `2` when an unexpected input or eligibility error occurred.
    pub fn exit_code(&self) -> i32 {
        self.results
            .iter()
            .filter(|r| !r.as_expected())
            .map(|r| match r.outcome {
                Outcome::Evaluated { .. } => 1,
                _ => 2,
            })
            .max()
            .unwrap_or(0)
    }
}

/// Exit code for a single evaluation error.
pub fn error_exit_code(e: &Error) -> i32 {
    if e.is_input_error() {
        2
    } else {
        1
    }
}
