//! `descartes`: real-root isolation, condition analysis, random polynomial
//! generation and Monte Carlo experiments from the command line.
//!
//! Coefficients are always given lowest degree first: `"c0 c1 ... cd"`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use descartes_core::condition::{separation_lower_bound, DEFAULT_MAX_GRID, DEFAULT_REL_TOL};
use descartes_core::experiments::{
    default_t_grid, run_cond_tail, run_instance_bound, run_rho_check, run_steps_scaling,
    ExperimentReport, DEFAULT_INSTANCE_CONSTANT, DEFAULT_SEED,
};
use descartes_core::oracle::DEFAULT_TOL;
use descartes_core::regions::{disk_family, rho_upper_bound, MEMBERSHIP_MARGIN};
use descartes_core::{
    global_cond_bracket, isolate_all, isolate_unit, numeric_roots, parse_polynomials, Error,
    IntPolynomial, IsolationResult, RandomModel,
};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(
    name = "descartes",
    version,
    about = "Descartes real-root isolation for integer polynomials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Isolate the real roots of each input polynomial (all of R by default).
    Isolate {
        #[command(flatten)]
        input: PolyInput,
        /// Only roots in (-1, 1).
        #[arg(long)]
        unit: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Condition bracket, separation bound and root counts near [-1, 1].
    Analyze {
        #[command(flatten)]
        input: PolyInput,
        #[arg(long, default_value_t = DEFAULT_REL_TOL)]
        rel_tol: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_GRID)]
        max_grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample random polynomials, one per line.
    Gen {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a Monte Carlo experiment.
    Experiment {
        #[arg(value_enum)]
        kind: ExperimentKind,
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated degrees; defaults to --degree.
        #[arg(long, value_delimiter = ',')]
        degrees: Vec<usize>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Comma-separated thresholds for cond-tail; defaults to 2, 4, ..., 2^(tau+1).
        #[arg(long, value_delimiter = ',')]
        t_grid: Vec<f64>,
        /// Pass threshold for the instance experiment.
        #[arg(long, default_value_t = DEFAULT_INSTANCE_CONSTANT)]
        constant: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Write <kind>.csv and <kind>.json here instead of printing.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        /// Include wall-clock times (output is then not reproducible).
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Args, Debug)]
struct PolyInput {
    /// Inline coefficients "c0 c1 ... cd".
    #[arg(long, allow_hyphen_values = true, conflicts_with = "file")]
    coeffs: Option<String>,
    /// File with one polynomial per line; `#` starts a comment line.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ModelArgs {
    #[arg(long, value_enum, default_value_t = ModelName::Uniform)]
    model: ModelName,
    #[arg(long, default_value_t = 16)]
    degree: usize,
    #[arg(long, default_value_t = 32)]
    bitsize: u64,
    /// Support indices, e.g. "0,1,5,9,10".
    #[arg(long)]
    support: Option<String>,
    /// Sign pattern, one of + or - per coefficient, e.g. "+-+".
    #[arg(long)]
    signs: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<i64>,
    /// File whose first polynomial is the smoothed model's center.
    #[arg(long)]
    base_poly: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModelName {
    Uniform,
    Support,
    Signs,
    Exactbits,
    Smoothed,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ExperimentKind {
    Steps,
    CondTail,
    Rho,
    Instance,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. }
            | Error::Io(_)
            | Error::InvalidModel(_)
            | Error::InvalidArgument(_) => Failure::Usage(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Isolate { input, unit, out } => {
            let mut lines = Vec::new();
            for f in read_polynomials(&input)? {
                let res = if unit {
                    isolate_unit(&f)?
                } else {
                    isolate_all(&f)?
                };
                lines.push(isolation_json(&res).to_string());
            }
            emit(out.as_deref(), &lines.join("\n"))
        }
        Command::Analyze {
            input,
            rel_tol,
            max_grid,
            out,
        } => {
            let mut lines = Vec::new();
            for f in read_polynomials(&input)? {
                lines.push(analyze(&f, rel_tol, max_grid)?.to_string());
            }
            emit(out.as_deref(), &lines.join("\n"))
        }
        Command::Gen {
            model,
            seed,
            count,
            out,
        } => {
            let m = build_model(&model)?;
            let lines: Vec<String> = (0..count).map(|i| m.sample(seed, i).to_string()).collect();
            emit(out.as_deref(), &lines.join("\n"))
        }
        Command::Experiment {
            kind,
            model,
            degrees,
            trials,
            seed,
            t_grid,
            constant,
            format,
            out_dir,
            threads,
            timing,
        } => {
            let m = build_model(&model)?;
            let degrees = if degrees.is_empty() {
                vec![model.degree]
            } else {
                degrees
            };
            let job = || experiment(kind, &m, &degrees, trials, seed, &t_grid, constant, timing);
            let rep = match threads {
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Failure::Usage(e.to_string()))?
                    .install(job)?,
                None => job()?,
            };
            let name = kind
                .to_possible_value()
                .map(|v| v.get_name().to_string())
                .unwrap_or_default();
            match out_dir {
                Some(dir) => {
                    fs::create_dir_all(&dir).map_err(|e| Failure::Usage(e.to_string()))?;
                    write_file(&dir.join(format!("{name}.csv")), &rep.to_csv()?)?;
                    write_file(&dir.join(format!("{name}.json")), &rep.summary_json()?)?;
                    Ok(())
                }
                None => match format {
                    Format::Csv => emit(None, rep.to_csv()?.trim_end()),
                    Format::Json => emit(None, &rep.summary_json()?),
                },
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn experiment(
    kind: ExperimentKind,
    model: &RandomModel,
    degrees: &[usize],
    trials: usize,
    seed: u64,
    t_grid: &[f64],
    constant: f64,
    timing: bool,
) -> Result<ExperimentReport, Failure> {
    if kind == ExperimentKind::Steps {
        return Ok(run_steps_scaling(model, degrees, trials, seed, timing)?);
    }
    let mut reports = Vec::new();
    for &d in degrees {
        let rep = match kind {
            ExperimentKind::CondTail => {
                let grid = if t_grid.is_empty() {
                    default_t_grid(model.with_degree(d)?.tau_bound())
                } else {
                    t_grid.to_vec()
                };
                run_cond_tail(model, d, trials, &grid, seed, timing)?
            }
            ExperimentKind::Rho => run_rho_check(model, d, trials, seed, timing)?,
            ExperimentKind::Instance => {
                run_instance_bound(model, d, trials, seed, constant, timing)?
            }
            ExperimentKind::Steps => unreachable!(),
        };
        reports.push(rep);
    }
    ExperimentReport::merge(reports).ok_or_else(|| Failure::Usage("no degrees given".into()))
}

fn read_polynomials(input: &PolyInput) -> Result<Vec<IntPolynomial>, Failure> {
    let text = match (&input.coeffs, &input.file) {
        (Some(c), None) => c.clone(),
        (None, Some(path)) => fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        _ => {
            return Err(Failure::Usage(
                "give exactly one of --coeffs or --file".into(),
            ))
        }
    };
    let polys = parse_polynomials(&text)?;
    if polys.is_empty() {
        return Err(Failure::Usage("no polynomial in input".into()));
    }
    Ok(polys)
}

fn build_model(args: &ModelArgs) -> Result<RandomModel, Failure> {
    let (d, tau) = (args.degree, args.bitsize);
    let model = match args.model {
        ModelName::Uniform => RandomModel::uniform(d, tau)?,
        ModelName::Exactbits => RandomModel::exact_bits(d, tau)?,
        ModelName::Support => {
            let raw = args
                .support
                .as_deref()
                .ok_or_else(|| Failure::Usage("--support is required".into()))?;
            let support = raw
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::Usage(format!("--support: {e}")))?;
            RandomModel::support(d, tau, support)?
        }
        ModelName::Signs => {
            let raw = args
                .signs
                .as_deref()
                .ok_or_else(|| Failure::Usage("--signs is required".into()))?;
            let signs = raw
                .chars()
                .map(|c| match c {
                    '+' => Ok(1),
                    '-' => Ok(-1),
                    other => Err(Failure::Usage(format!(
                        "--signs: unexpected character {other:?}"
                    ))),
                })
                .collect::<Result<Vec<i8>, _>>()?;
            RandomModel::signs(d, tau, signs)?
        }
        ModelName::Smoothed => {
            let sigma = args
                .sigma
                .ok_or_else(|| Failure::Usage("--sigma is required".into()))?;
            let path = args
                .base_poly
                .as_ref()
                .ok_or_else(|| Failure::Usage("--base-poly is required".into()))?;
            let input = PolyInput {
                coeffs: None,
                file: Some(path.clone()),
            };
            let center = read_polynomials(&input)?.swap_remove(0);
            RandomModel::smoothed(center, sigma, RandomModel::uniform(d, tau)?)?
        }
    };
    Ok(model)
}

fn isolation_json(res: &IsolationResult) -> Value {
    let intervals: Vec<Value> = res
        .intervals
        .iter()
        .map(|j| {
            let (a, b) = j.approx_bounds();
            json!({
                "lo": j.lo,
                "hi": j.hi,
                "inverted": j.inverted,
                "approx": [finite_or_null(a), finite_or_null(b)],
            })
        })
        .collect();
    let exact: Vec<Value> = res
        .exact_roots
        .iter()
        .map(|r| json!({"num": r.value.num().to_string(), "exp": r.value.exp(), "inverted": r.inverted, "approx": r.approx()}))
        .collect();
    json!({
        "intervals": intervals,
        "exact_roots": exact,
        "trace": {
            "node_count": res.trace.node_count,
            "depth": res.trace.depth,
            "width_per_depth": res.trace.width_per_depth,
        },
    })
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn analyze(f: &IntPolynomial, rel_tol: f64, max_grid: usize) -> Result<Value, Failure> {
    let bracket = global_cond_bracket(f, rel_tol, max_grid)?;
    let separation = match separation_lower_bound(f.degree(), &bracket) {
        Ok(s) => json!({"bound": s.bound, "eps": s.eps}),
        Err(Error::UnboundedCondition) => Value::Null,
        Err(e) => return Err(e.into()),
    };
    let (rho_bound, rho_count) = if f.degree() >= 2 {
        let roots = numeric_roots(f, DEFAULT_TOL)?;
        let range = disk_family(f.degree())?.count(&roots.roots, MEMBERSHIP_MARGIN);
        (
            finite_or_null(rho_upper_bound(f)?),
            json!({"min": range.min, "max": range.max}),
        )
    } else {
        (Value::Null, Value::Null)
    };
    Ok(json!({
        "degree": f.degree(),
        "cond": {
            "lower": finite_or_null(bracket.lower),
            "upper": finite_or_null(bracket.upper),
            "lg_upper": finite_or_null(bracket.upper.log2()),
            "grid_size": bracket.grid_size,
            "delta": bracket.delta,
            "achieved": bracket.achieved,
        },
        "separation": separation,
        "rho_bound": rho_bound,
        "rho_count": rho_count,
    }))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => write_file(path, &format!("{text}\n")),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}
