use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use pseudogram::cli_io::{
    chirotope_json, covectors_json, gen, read_arrangement, render, render_trace, write_arrangement, GenKind, GenSpec,
    RenderSpec, View,
};
use pseudogram::frames::{coord_frame, orthonormalize_path, parseval_check, Frame};
use pseudogram::oriented_matroid::{check_chirotope_axioms, check_covector_axioms, om_consistency};
use pseudogram::straighten::{pipeline, DeformationTrace, PipelineOptions};
use pseudogram::{arrangement::arrangement_dist, tolerance, Arrangement, Error, Result};

/// Rank-3 weighted pseudocircle arrangements: validation, oriented-matroid
/// data and straightening.
#[derive(Parser)]
#[command(name = "pseudogram", version)]
struct Cli {
    #[command(flatten)]
    io: IoArgs,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct IoArgs {
    /// Input JSON file; stdin when absent.
    #[arg(long = "in", global = true)]
    input: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, env = "PSEUDOGRAM_SEED", default_value_t = 0)]
    seed: u64,
    /// Incidence tolerance.
    #[arg(long, global = true, default_value_t = tolerance::EPS_GEO)]
    tolerance: f64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validity report; exit 1 if the arrangement is invalid.
    Validate,
    /// All covectors as sign strings.
    Covectors,
    /// Chirotope as [i, j, k, sign] rows.
    Chirotope,
    /// Covector axioms, chirotope axioms and their consistency.
    OmCheck,
    /// The coordinate rotation of a basis.
    Coord {
        #[arg(long, value_parser = parse_basis)]
        basis: [usize; 3],
    },
    /// Weighted Fréchet distance to a second arrangement.
    Distance {
        #[arg(long)]
        other: PathBuf,
    },
    /// Straighten to a Parseval frame.
    Straighten {
        #[arg(long, default_value_t = 20)]
        frames: usize,
        /// Where to write the deformation trace.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_parser = parse_basis)]
        basis: Option<[usize; 3]>,
    },
    /// Point of the orthonormalization path of a frame.
    Orthonormalize {
        #[arg(long, default_value_t = 1.0)]
        t: f64,
    },
    /// Generate an arrangement.
    Gen {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 0.05)]
        amplitude: f64,
    },
    /// SVG of an arrangement, or one SVG per frame of a trace.
    Render {
        #[arg(long, value_enum, default_value_t = ViewArg::SphereOrthographicNorth)]
        view: ViewArg,
        #[arg(long, default_value_t = 512)]
        width: u32,
        #[arg(long, default_value_t = 512)]
        height: u32,
        #[arg(long)]
        labels: bool,
        /// Output directory for trace input.
        #[arg(long)]
        frames_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    RandomCircles,
    Perturbed,
    NonPappus,
}

#[derive(Clone, Copy, ValueEnum)]
enum ViewArg {
    SphereOrthographicNorth,
    SphereOrthographicSouth,
    Chart,
}

fn io_err(path: &std::path::Path, source: io::Error) -> Error {
    Error::Io { path: path.display().to_string(), source }
}

fn read_text(path: &Option<PathBuf>) -> Result<String> {
    match path {
        Some(p) => fs::read_to_string(p).map_err(|e| io_err(p, e)),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(|e| io_err("<stdin>".as_ref(), e))?;
            Ok(s)
        }
    }
}

fn write_text(path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| io_err(p, e)),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| io_err("<stdout>".as_ref(), e)),
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable output") + "\n"
}

/// Parses `i,j,k`.
fn parse_basis(s: &str) -> std::result::Result<[usize; 3], String> {
    let v: Vec<usize> = s.split(',').map(|x| x.trim().parse().map_err(|e| format!("{x:?}: {e}"))).collect::<std::result::Result<_, _>>()?;
    <[usize; 3]>::try_from(v).map_err(|v| format!("expected three indices, got {}", v.len()))
}

/// Runs the command, returning the exit code for outcomes that are not errors.
fn run(cli: Cli) -> Result<u8> {
    let io = &cli.io;
    let arrangement = || -> Result<Arrangement> { read_arrangement(&read_text(&io.input)?) };
    match cli.cmd {
        Cmd::Validate => {
            let report = arrangement()?.validate()?;
            write_text(&io.out, &pretty(&report))?;
            return Ok(if report.valid { 0 } else { 1 });
        }
        Cmd::Covectors => write_text(&io.out, &pretty(&covectors_json(&arrangement()?.covectors()?)))?,
        Cmd::Chirotope => write_text(&io.out, &pretty(&chirotope_json(&arrangement()?.chirotope()?)))?,
        Cmd::OmCheck => {
            let a = arrangement()?;
            let (x, chi) = (a.covectors()?, a.chirotope()?);
            let cov = check_covector_axioms(&x);
            let chir = check_chirotope_axioms(&chi);
            let consistent = om_consistency(&x, &chi);
            let ok = cov.ok && chir.ok && consistent;
            write_text(&io.out, &pretty(&json!({"covector_axioms": cov, "chirotope_axioms": chir, "consistent": consistent})))?;
            return Ok(if ok { 0 } else { 1 });
        }
        Cmd::Coord { basis } => {
            let q = coord_frame(basis, &arrangement()?)?;
            write_text(&io.out, &pretty(&q))?;
        }
        Cmd::Distance { other } => {
            let b = read_arrangement(&fs::read_to_string(&other).map_err(|e| io_err(&other, e))?)?;
            write_text(&io.out, &pretty(&json!({"distance": arrangement_dist(&arrangement()?, &b)?})))?;
        }
        Cmd::Straighten { frames, trace, basis } => {
            let opts = PipelineOptions { frames, basis, validate_frames: true };
            let (f, tr) = pipeline(&arrangement()?, &opts)?;
            if let Some(p) = trace {
                fs::write(&p, pretty(&tr)).map_err(|e| io_err(&p, e))?;
            }
            write_text(&io.out, &pretty(&f))?;
            if !tr.all_valid() {
                eprintln!("warning: some trace frames failed validation");
                return Ok(1);
            }
        }
        Cmd::Orthonormalize { t } => {
            let f: Frame = serde_json::from_str(&read_text(&io.input)?)?;
            let g = orthonormalize_path(&f, t)?;
            if t == 1.0 && !parseval_check(&g).0 {
                return Err(Error::Degenerate { stage: "orthonormalize", detail: "result is not Parseval".into() });
            }
            write_text(&io.out, &pretty(&g))?;
        }
        Cmd::Gen { kind, n, amplitude } => {
            let kind = match kind {
                KindArg::RandomCircles => GenKind::RandomCircles,
                KindArg::Perturbed => GenKind::Perturbed,
                KindArg::NonPappus => GenKind::NonPappus,
            };
            let a = gen(&GenSpec { kind, n, amplitude, seed: io.seed })?;
            write_text(&io.out, &(write_arrangement(&a) + "\n"))?;
        }
        Cmd::Render { view, width, height, labels, frames_dir } => {
            let view = match view {
                ViewArg::SphereOrthographicNorth => View::SphereOrthographicNorth,
                ViewArg::SphereOrthographicSouth => View::SphereOrthographicSouth,
                ViewArg::Chart => View::Chart,
            };
            let spec = RenderSpec { view, width, height, labels, ..RenderSpec::default() };
            let text = read_text(&io.input)?;
            let value: serde_json::Value = serde_json::from_str(&text)?;
            if value.get("frames").is_some() {
                let trace: DeformationTrace = serde_json::from_value(value)?;
                let dir = frames_dir.ok_or_else(|| Error::InvalidInput("trace input needs --frames-dir".into()))?;
                let written = render_trace(&trace, &spec, &dir)?;
                eprintln!("wrote {} files to {}", written.len(), dir.display());
            } else {
                write_text(&io.out, &render(&read_arrangement(&text)?, &spec)?)?;
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 3 } else { 0 });
        }
    };
    let eps = cli.io.tolerance;
    if !(eps.is_finite() && eps > 0.0) {
        eprintln!("error: --tolerance must be a positive number");
        return ExitCode::from(3);
    }
    match tolerance::with_geo(eps, || run(cli)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
