//! `sgl`: check the fundamental-gap bound on geodesic balls, mesh files and
//! corpora of domains.
//!
//! Exit codes: 0 success, 1 verdict failure, 2 input or eligibility error.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sgl::gap::{self, BoundOptions, GapBoundReport, Verdict};
use sgl::harness::{self, Source, Tolerances};
use sgl::mesh::{C1Range, MeshDomain};
use sgl::{CurvaturePair, Error};

#[derive(Parser)]
#[command(name = "sgl", version, about = "Upper bounds on the Dirichlet eigenvalue gap in curved spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Radial pipeline on a geodesic ball B_R in the n-dimensional spaceform of curvature k.
    VerifyBall {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        k: f64,
        #[arg(long = "R")]
        radius: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Full pipeline on a mesh file.
    VerifyDomain {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Lower curvature bound K.
        #[arg(long = "K", allow_hyphen_values = true)]
        k_lower: f64,
        /// Upper curvature bound; defaults to the mesh curvature.
        #[arg(long = "k-upper", allow_hyphen_values = true)]
        k_upper: Option<f64>,
        /// Maximize C₁ over the hull instead of the domain.
        #[arg(long)]
        hull_c1: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Evaluate every entry of a corpus file.
    Corpus {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Also write the CSV to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a generated mesh, e.g. `gen-mesh square cells=20 --out sq.mesh`.
    GenMesh {
        generator: String,
        /// Generator parameters as key=value.
        params: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            harness::error_exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}

fn options(hull_c1: bool) -> sgl::Result<BoundOptions> {
    Ok(BoundOptions {
        tolerances: Tolerances::from_env()?,
        c1_range: if hull_c1 { C1Range::Hull } else { C1Range::Domain },
        ..BoundOptions::default()
    })
}

fn emit(report: &GapBoundReport, format: Format, out: Option<&Path>) -> sgl::Result<()> {
    let text = match format {
        Format::Csv => format!("{}\n{}\n", GapBoundReport::csv_header(), report.csv_row()),
        Format::Json => format!("{}\n", report.to_json()),
    };
    print!("{text}");
    if let Some(p) = out {
        std::fs::write(p, &text)?;
    }
    Ok(())
}

fn run(cmd: Command) -> sgl::Result<i32> {
    match cmd {
        Command::VerifyBall { n, k, radius, format } => {
            let tol = Tolerances::from_env()?;
            let r = gap::evaluate_ball(n, k, radius, &tol)?;
            emit(&r, format, None)?;
            let sharp = r.relative_slack.abs() <= tol.radial_sharpness;
            eprintln!(
                "lambda1 = {:.12}\nlambda2 = {:.12}\ngap     = {:.12}\nbound   = {:.12}\nslack   = {:.3e} ({})",
                r.lambda1,
                r.lambda2,
                r.gap,
                r.bound_rhs,
                r.relative_slack,
                if sharp { "sharp" } else { "not sharp" }
            );
            Ok(if sharp { 0 } else { 1 })
        }
        Command::VerifyDomain { mesh, alpha, k_lower, k_upper, hull_c1, out, format } => {
            let m = MeshDomain::read(&mesh).map_err(|e| match e {
                Error::Parse { line, msg } => {
                    Error::Invalid(format!("SGLMESH parse error in {}: line {line}: {msg}", mesh.display()))
                }
                Error::Io(io) => Error::Invalid(format!("cannot read {}: {io}", mesh.display())),
                other => other,
            })?;
            if k_lower > m.curvature() {
                return Err(Error::Ineligible(format!(
                    "curvature witness failed: declared K = {k_lower} exceeds the mesh curvature {}",
                    m.curvature()
                )));
            }
            let pair = CurvaturePair::new(k_upper.unwrap_or(m.curvature()), k_lower)?;
            let ev = gap::evaluate_mesh(&m, alpha, &pair, &options(hull_c1)?)?;
            emit(&ev.report, format, out.as_deref())?;
            Ok(match ev.report.verdict {
                Verdict::Holds => 0,
                Verdict::Violated => 1,
            })
        }
        Command::Corpus { config, jobs, out } => {
            let entries = harness::read_corpus(&config)?;
            let opts = options(false)?;
            let run = match jobs {
                Some(j) => rayon::ThreadPoolBuilder::new()
                    .num_threads(j.max(1))
                    .build()
                    .map_err(|e| Error::Invalid(format!("cannot start {j} workers: {e}")))?
                    .install(|| harness::run_corpus(&entries, &opts)),
                None => harness::run_corpus(&entries, &opts),
            };
            let csv = run.csv();
            print!("{csv}");
            if let Some(p) = out {
                std::fs::write(p, &csv)?;
            }
            eprint!("{}", run.summary_table());
            Ok(run.exit_code())
        }
        Command::GenMesh { generator, params, out } => {
            let mut map = BTreeMap::new();
            for p in &params {
                let (k, v) = p
                    .split_once('=')
                    .ok_or_else(|| Error::Invalid(format!("expected key=value, found '{p}'")))?;
                map.insert(k.trim().to_string(), v.trim().to_string());
            }
            let source = Source::from_params(&generator, &map)?;
            let mesh = source
                .mesh()?
                .ok_or_else(|| Error::Invalid(format!("'{generator}' is not a mesh generator")))?;
            match out {
                Some(p) => mesh.write(std::io::BufWriter::new(std::fs::File::create(p)?))?,
                None => {
                    let stdout = std::io::stdout();
                    let mut lock = stdout.lock();
                    mesh.write(&mut lock)?;
                    lock.flush()?;
                }
            }
            Ok(0)
        }
    }
}
