//! `scpoly`: command-line front end for Schwarz–Christoffel polygons.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure,
//! 4 solver non-convergence. Errors are reported as a JSON object on stderr.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use scpoly::charts::{moduli_chart, moduli_unchart};
use scpoly::geometry::find_multiwound_witness;
use scpoly::paramsolve::solve_parameter_problem;
use scpoly::render::{render_map, render_svg, RenderStyle};
use scpoly::scmap::forward;
use scpoly::sweep::{sweep, SweepConfig};
use scpoly::{ChartPoint, Error, LabelledPolygon, ScMap, SolveOptions, DEFAULT_TOL};

#[derive(Parser)]
#[command(name = "scpoly", version, about = "Schwarz–Christoffel maps of labelled immersed polygons")]
struct Cli {
    /// Quadrature / solver tolerance.
    #[arg(long, global = true, env = "SCPOLY_TOL", default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

/// A JSON payload: a file path, `-` for stdin, or the JSON text itself.
#[derive(Args)]
struct Input {
    #[arg(default_value = "-")]
    input: String,
}

#[derive(Subcommand)]
enum Command {
    /// Chart point to polygon (A = 1, B = 0).
    Forward(Input),
    /// Polygon to normalized map, chart point and solver report.
    Invert {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 200)]
        max_iterations: usize,
    },
    /// Random simplicity sweep over the chart cube.
    Sweep {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long = "box", default_value_t = 3.0)]
        chart_box: f64,
        #[arg(long, default_value_t = 4096)]
        budget: usize,
    },
    /// SVG of a polygon or map.
    Render {
        #[command(flatten)]
        input: Input,
        /// Half-plane grid lines to map (maps only).
        #[arg(long, default_value_t = 0)]
        grid: usize,
        #[arg(long, default_value_t = 64)]
        grid_samples: usize,
        /// Mark a point, given as `x,y`.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        witness: Option<Complex64>,
        /// Search for and mark a point of winding number at least 2.
        #[arg(long, conflicts_with = "witness")]
        find_witness: bool,
        #[arg(long)]
        labels: bool,
        #[arg(long, default_value_t = 600.0)]
        width: f64,
    },
    /// Evaluate a map at half-plane points given as `[[re, im], ...]`.
    Eval {
        map: String,
        points: String,
    },
    /// Map to chart point.
    Chart(Input),
    /// Chart point to normalized map (A = 1, B = 0).
    Unchart(Input),
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
    detail: Option<Value>,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Failure { code: 2, kind: "validation", message: message.into(), detail: None }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::NoConvergence(_) | Error::SolveFailed(_) => (4, "non_convergence"),
            e if e.is_validation() => (2, "validation"),
            _ => (3, "numerical"),
        };
        let detail = match &e {
            Error::SolveFailed(report) => serde_json::to_value(report).ok(),
            _ => None,
        };
        Failure { code, kind, message: e.to_string(), detail }
    }
}

type Outcome = Result<String, Failure>;

fn parse_point(s: &str) -> Result<Complex64, String> {
    let (x, y) = s.split_once(',').ok_or("expected x,y")?;
    let p = Complex64::new(x.trim().parse().map_err(|_| "bad x")?, y.trim().parse().map_err(|_| "bad y")?);
    if p.re.is_finite() && p.im.is_finite() { Ok(p) } else { Err("point must be finite".into()) }
}

fn read_text(src: &str) -> Result<String, Failure> {
    let trimmed = src.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(src.to_string());
    }
    if src == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| Failure::validation(format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(src).map_err(|e| Failure::validation(format!("{src}: {e}")))
}

fn parse<T: serde::de::DeserializeOwned>(src: &str, what: &str) -> Result<T, Failure> {
    serde_json::from_str(&read_text(src)?).map_err(|e| Failure::validation(format!("invalid {what} JSON: {e}")))
}

fn to_json<T: Serialize>(value: &T) -> Outcome {
    serde_json::to_string(value).map_err(|e| Failure::validation(e.to_string()))
}

fn check_tol(tol: f64) -> Result<(), Failure> {
    if tol > 0.0 && tol < 1e-2 {
        Ok(())
    } else {
        Err(Failure::validation(format!("tolerance {tol} must lie in (0, 0.01)")))
    }
}

fn run(cli: &Cli) -> Outcome {
    check_tol(cli.tol)?;
    let tol = cli.tol;
    match &cli.command {
        Command::Forward(input) => {
            let chart: ChartPoint = parse(&input.input, "chart point")?;
            let (z, a) = moduli_unchart(&chart)?;
            to_json(&forward(&z, &a, tol)?)
        }
        Command::Invert { input, max_iterations } => {
            let poly: LabelledPolygon = parse(&input.input, "polygon")?;
            let opts = SolveOptions {
                max_iterations: *max_iterations,
                residual_tol: tol,
                quadrature_tol: tol / 10.0,
                initial_gaps: None,
            };
            let sol = solve_parameter_problem(&poly, &opts)?.into_result()?;
            let chart = moduli_chart(&sol.map)?;
            to_json(&json!({ "map": sol.map, "chart": chart, "report": sol.report }))
        }
        Command::Sweep { n, samples, chart_box, budget } => {
            let cfg =
                SweepConfig { n: *n, samples: *samples, seed: cli.seed, chart_box: *chart_box, budget: *budget, tol };
            to_json(&sweep(&cfg)?)
        }
        Command::Render { input, grid, grid_samples, witness, find_witness, labels, width } => {
            if !(*width > 0.0 && width.is_finite()) {
                return Err(Failure::validation("width must be positive"));
            }
            let value: Value = parse(&input.input, "polygon or map")?;
            let mut style = RenderStyle {
                width: *width,
                label_vertices: *labels,
                witness: *witness,
                grid_lines: *grid,
                grid_samples: *grid_samples,
                ..Default::default()
            };
            let invalid = |e: serde_json::Error| Failure::validation(format!("invalid input JSON: {e}"));
            if value.get("prevertices").is_some() {
                let map: ScMap = serde_json::from_value(value).map_err(invalid)?;
                if *find_witness {
                    style.witness = find_multiwound_witness(&map.polygon(tol)?, 4096);
                }
                Ok(render_map(&map, &style, tol)?)
            } else {
                if *grid > 0 {
                    return Err(Failure::validation("--grid needs a map, not a polygon"));
                }
                let poly: LabelledPolygon = serde_json::from_value(value).map_err(invalid)?;
                if *find_witness {
                    style.witness = find_multiwound_witness(&poly, 4096);
                }
                Ok(render_svg(&poly, &[], &style))
            }
        }
        Command::Eval { map, points } => {
            let map: ScMap = parse(map, "map")?;
            let points: Vec<[f64; 2]> = parse(points, "point list")?;
            let z: Vec<Complex64> = points.iter().map(|p| Complex64::new(p[0], p[1])).collect();
            let w = map.evaluate_many(&z, tol)?;
            to_json(&w.iter().map(|w| [w.re, w.im]).collect::<Vec<_>>())
        }
        Command::Chart(input) => {
            let map: ScMap = parse(&input.input, "map")?;
            to_json(&moduli_chart(&map)?)
        }
        Command::Unchart(input) => {
            let chart: ChartPoint = parse(&input.input, "chart point")?;
            let (z, a) = moduli_unchart(&chart)?;
            to_json(&ScMap::bare(z, a)?)
        }
    }
}

fn emit(cli: &Cli, mut text: String) -> Result<(), Failure> {
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::validation(format!("{}: {e}", path.display()))),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::validation(e.to_string())),
    }
}

fn report(f: &Failure) -> ExitCode {
    let mut body = json!({ "error": { "kind": f.kind, "message": f.message } });
    if let Some(d) = &f.detail {
        body["error"]["report"] = d.clone();
    }
    eprintln!("{body}");
    ExitCode::from(f.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    // Any panic is a bug; still answer with a JSON error and exit code 3.
    std::panic::set_hook(Box::new(|_| {}));
    let result = std::panic::catch_unwind(|| run(&cli)).unwrap_or_else(|payload| {
        let message = payload
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "internal error".into());
        Err(Failure { code: 3, kind: "internal", message, detail: None })
    });
    match result.and_then(|text| emit(&cli, text)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report(&f),
    }
}
