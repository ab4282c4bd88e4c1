//! `magtool`: magnitude of finite metric spaces from the command line.

use clap::{Args, Parser, Subcommand, ValueEnum};
use magspace::extrapolate::ExtrapolationConfig;
use magspace::genericity::{certify_line, leading_coefficient_probe, witness_space};
use magspace::io::{space_to_csv, space_to_json, write_space_file};
use magspace::lines::{line_limit_magnitude, BlockPartition, LineSpec};
use magspace::magnitude::{magnitude, magnitude_function, WeightingStatus};
use magspace::space::{complete_graph, join, wedge, FiniteMetricSpace};
use magspace_cli::repro::{
    self, default_s_grid, repro_all, repro_nowhere_continuity_standard,
    repro_one_point_failures, repro_perturbed_joins, repro_pointwise_limit_curves, CurveFamily,
    ReproReport,
};
use magspace_cli::spacearg::{parse_index_list, parse_space_arg};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "magtool",
    about = "Magnitude of finite metric spaces: weightings, magnitude functions, limits along lines, and continuity certificates",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args, Clone, Debug)]
struct GridArgs {
    /// Largest grid parameter
    #[arg(long, default_value_t = 0.2)]
    t0: f64,
    /// Geometric ratio between grid parameters
    #[arg(long, default_value_t = 0.7)]
    rho: f64,
    /// Number of grid parameters before flooring
    #[arg(long, default_value_t = 20)]
    steps: usize,
    /// Grid floor
    #[arg(long, default_value_t = 1e-3)]
    t_min: f64,
    /// Polynomial fit degree
    #[arg(long, default_value_t = 4)]
    degree: usize,
    /// Discard grid points with a worse condition estimate
    #[arg(long, default_value_t = 1e10)]
    max_condition: f64,
}

impl GridArgs {
    fn config(&self) -> ExtrapolationConfig {
        ExtrapolationConfig {
            t0: self.t0,
            rho: self.rho,
            steps: self.steps,
            t_min: self.t_min,
            fit_degree: self.degree,
            max_condition: self.max_condition,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate a distance matrix as a metric space
    Validate {
        /// Space file (JSON/CSV) or inline kn:N / scale:T:SPEC
        space: String,
    },
    /// Magnitude, weighting status, and solver diagnostics of a space
    Mag {
        space: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Magnitude function over a geometric scale grid, as CSV
    Magfun {
        space: String,
        #[arg(long, default_value_t = 0.01)]
        t_min: f64,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        /// Write to a file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Construct spaces and print them
    Make {
        #[command(subcommand)]
        what: MakeCommand,
    },
    /// Extrapolate the magnitude limit along a line
    LineLimit {
        /// Target space
        #[arg(long)]
        x: String,
        /// Domain space
        #[arg(long)]
        y: String,
        /// Comma-separated fiber map: one x-index per y point
        #[arg(long)]
        fiber: String,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the genericity polynomial of a line and certify it
    Fpoly {
        /// Target space
        #[arg(long)]
        x: String,
        /// Comma-separated fiber map (defines the block sizes)
        #[arg(long)]
        fiber: String,
        /// Domain space; omit with --witness
        #[arg(long)]
        y: Option<String>,
        /// Evaluate at the non-vanishing witness instead of a domain space
        #[arg(long)]
        witness: bool,
        /// Also measure the leading coefficients numerically
        #[arg(long)]
        probe: bool,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Rebuild the worked examples and limit formulas
    Repro {
        #[command(subcommand)]
        which: ReproCommand,
    },
}

#[derive(Subcommand)]
enum MakeCommand {
    /// Complete graph on n vertices
    Kn {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        scale: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scale a space
    Scale {
        space: String,
        #[arg(long)]
        t: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Wedge two spaces at basepoints
    Wedge {
        a: String,
        b: String,
        #[arg(long, default_value_t = 0)]
        a_base: usize,
        #[arg(long, default_value_t = 0)]
        b_base: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distance-ell join of two spaces
    Join {
        a: String,
        b: String,
        #[arg(long)]
        ell: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Witness block matrix for a target space and block sizes
    Witness {
        x: String,
        /// Comma-separated block sizes, e.g. 2,1
        #[arg(long)]
        partition: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Debug)]
struct ReproOutputArgs {
    /// Write per-case artifacts into this directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the pass/fail tolerance of every case
    #[arg(long)]
    tol: Option<f64>,
    /// Report format for the summary
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand)]
enum ReproCommand {
    /// Scaled-space limits 6/5 and 7/6 (plus the K_2 control)
    OnePoint {
        #[command(flatten)]
        output: ReproOutputArgs,
    },
    /// Wedge-perturbation limits |X| + 1/5 for the standard targets
    Nowhere {
        #[command(flatten)]
        output: ReproOutputArgs,
    },
    /// Perturbed-join limits over a list of alphas
    Perturb {
        /// Comma-separated alpha values
        #[arg(long, default_value = "0,0.5,1,2,10")]
        alpha: String,
        #[command(flatten)]
        output: ReproOutputArgs,
    },
    /// Pointwise-limit curves for a family and alpha
    Curves {
        #[arg(long, default_value = "join")]
        family: String,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        /// Verify the curve numerically (needs alpha 6/5 or 7/6)
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        output: ReproOutputArgs,
    },
    /// Every case, with a summary table
    All {
        #[command(flatten)]
        output: ReproOutputArgs,
    },
}

enum CliError {
    Usage(String),
    Computation(String),
}

impl CliError {
    fn usage<S: Into<String>>(msg: S) -> Self {
        CliError::Usage(msg.into())
    }

    fn computation<S: Into<String>>(msg: S) -> Self {
        CliError::Computation(msg.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as "errors" with success status
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Computation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load_space(arg: &str) -> Result<FiniteMetricSpace, CliError> {
    parse_space_arg(arg).map_err(CliError::Computation)
}

fn emit_space(
    x: &FiniteMetricSpace,
    format: Format,
    out: Option<&PathBuf>,
) -> Result<(), CliError> {
    match out {
        Some(path) => {
            write_space_file(path, x).map_err(|e| CliError::computation(e.to_string()))
        }
        None => {
            let text = match format {
                Format::Csv => space_to_csv(x),
                _ => space_to_json(x),
            };
            println!("{text}");
            Ok(())
        }
    }
}

fn status_name(s: WeightingStatus) -> &'static str {
    match s {
        WeightingStatus::Unique => "unique",
        WeightingStatus::NonUnique => "non-unique",
        WeightingStatus::Undefined => "undefined",
    }
}

fn print_reports(reports: Vec<ReproReport>, output: &ReproOutputArgs) -> Result<(), CliError> {
    let reports: Vec<ReproReport> = match output.tol {
        Some(tol) => reports.iter().map(|r| r.rejudged(tol)).collect(),
        None => reports,
    };
    match output.format {
        Format::Json => {
            let text =
                serde_json::to_string_pretty(&reports).expect("reports serialize");
            println!("{text}");
        }
        _ => print!("{}", repro::format_report_table(&reports)),
    }
    if reports.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(CliError::computation("some reproduction cases failed"))
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Validate { space } => {
            let x = load_space(&space)?;
            println!(
                "valid metric space: {} points, diameter {}",
                x.n(),
                x.diam()
            );
            Ok(())
        }
        Command::Mag { space, format } => {
            let x = load_space(&space)?;
            let r = magnitude(&x);
            match format {
                Format::Json => {
                    let text = serde_json::to_string_pretty(&r)
                        .expect("result serializes");
                    println!("{text}");
                }
                _ => {
                    match r.value {
                        Some(v) => println!("magnitude: {v}"),
                        None => println!("magnitude: undefined"),
                    }
                    println!("status: {}", status_name(r.status));
                    println!("residual: {}", r.residual);
                    println!("condition_estimate: {}", r.condition_estimate);
                }
            }
            Ok(())
        }
        Command::Magfun {
            space,
            t_min,
            t_max,
            steps,
            out,
        } => {
            if t_min <= 0.0 || t_max <= t_min || steps < 2 {
                return Err(CliError::usage(
                    "need 0 < t-min < t-max and at least 2 steps",
                ));
            }
            let x = load_space(&space)?;
            let ratio = t_max / t_min;
            let grid: Vec<f64> = (0..steps)
                .map(|k| t_min * ratio.powf(k as f64 / (steps - 1) as f64))
                .collect();
            let rows = magnitude_function(&x, &grid)
                .map_err(|e| CliError::computation(e.to_string()))?;
            let mut text = String::from("t,magnitude,status\n");
            for (t, r) in rows {
                let value = match r.value {
                    Some(v) => format!("{v}"),
                    None => "nan".to_string(),
                };
                text.push_str(&format!("{t},{value},{}\n", status_name(r.status)));
            }
            match out {
                Some(path) => std::fs::write(path, text)
                    .map_err(|e| CliError::computation(e.to_string()))?,
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Make { what } => run_make(what),
        Command::LineLimit {
            x,
            y,
            fiber,
            grid,
            out,
        } => {
            let x = load_space(&x)?;
            let y = load_space(&y)?;
            let fiber = parse_index_list(&fiber).map_err(CliError::Usage)?;
            let line = LineSpec::new(x, y, fiber)
                .map_err(|e| CliError::computation(e.to_string()))?;
            let est = line_limit_magnitude(&line, &grid.config())
                .map_err(|e| CliError::computation(e.to_string()))?;
            let per_t: Vec<_> = est
                .condition_flags
                .iter()
                .map(|d| {
                    json!({
                        "t": d.t,
                        "condition_estimate": d.condition_estimate,
                        "status": status_name(d.status),
                        "used": d.used,
                    })
                })
                .collect();
            let doc = json!({
                "value": est.value,
                "error_estimate": est.error_estimate,
                "fit_degree": est.fit_degree,
                "t_grid": est.t_grid_used,
                "per_t_magnitudes": per_t,
            });
            let text = serde_json::to_string_pretty(&doc).expect("json serializes");
            match out {
                Some(path) => std::fs::write(path, text)
                    .map_err(|e| CliError::computation(e.to_string()))?,
                None => println!("{text}"),
            }
            Ok(())
        }
        Command::Fpoly {
            x,
            fiber,
            y,
            witness,
            probe,
            grid,
        } => run_fpoly(&x, &fiber, y.as_deref(), witness, probe, &grid),
        Command::Repro { which } => run_repro(which),
    }
}

fn run_make(what: MakeCommand) -> Result<(), CliError> {
    match what {
        MakeCommand::Kn {
            n,
            scale,
            format,
            out,
        } => {
            let mut x = complete_graph(n).map_err(|e| CliError::computation(e.to_string()))?;
            if let Some(t) = scale {
                x = x.scale(t).map_err(|e| CliError::computation(e.to_string()))?;
            }
            emit_space(&x, format, out.as_ref())
        }
        MakeCommand::Scale {
            space,
            t,
            format,
            out,
        } => {
            let x = load_space(&space)?
                .scale(t)
                .map_err(|e| CliError::computation(e.to_string()))?;
            emit_space(&x, format, out.as_ref())
        }
        MakeCommand::Wedge {
            a,
            b,
            a_base,
            b_base,
            format,
            out,
        } => {
            let a = load_space(&a)?;
            let b = load_space(&b)?;
            let w = wedge(&a, a_base, &b, b_base)
                .map_err(|e| CliError::computation(e.to_string()))?;
            emit_space(&w, format, out.as_ref())
        }
        MakeCommand::Join {
            a,
            b,
            ell,
            format,
            out,
        } => {
            let a = load_space(&a)?;
            let b = load_space(&b)?;
            let j = join(&a, &b, ell).map_err(|e| CliError::computation(e.to_string()))?;
            emit_space(&j, format, out.as_ref())
        }
        MakeCommand::Witness { x, partition, out } => {
            let x = load_space(&x)?;
            let sizes = parse_index_list(&partition).map_err(CliError::Usage)?;
            let partition =
                BlockPartition::new(sizes).map_err(|e| CliError::usage(e.to_string()))?;
            if partition.len() != x.n() {
                return Err(CliError::usage(format!(
                    "partition has {} blocks but the target has {} points",
                    partition.len(),
                    x.n()
                )));
            }
            let (matrix, metric_flag) = witness_space(&x, &partition);
            let rows: Vec<Vec<f64>> = (0..matrix.n_rows())
                .map(|i| matrix.row(i).to_vec())
                .collect();
            let doc = json!({
                "dist": rows,
                "metric": metric_flag,
                "block_sizes": partition.sizes(),
            });
            let text = serde_json::to_string_pretty(&doc).expect("json serializes");
            if !metric_flag {
                eprintln!("note: witness is not a metric (some target distance is below 1/2)");
            }
            match out {
                Some(path) => std::fs::write(path, text)
                    .map_err(|e| CliError::computation(e.to_string()))?,
                None => println!("{text}"),
            }
            Ok(())
        }
    }
}

fn run_fpoly(
    x_arg: &str,
    fiber_arg: &str,
    y_arg: Option<&str>,
    witness: bool,
    probe: bool,
    grid: &GridArgs,
) -> Result<(), CliError> {
    use magspace::genericity::f_polynomial_eval;

    let x = load_space(x_arg)?;
    let fiber = parse_index_list(fiber_arg).map_err(CliError::Usage)?;

    let y = match (y_arg, witness) {
        (Some(_), true) => {
            return Err(CliError::usage("--y and --witness are mutually exclusive"))
        }
        (Some(y_arg), false) => load_space(y_arg)?,
        (None, true) => {
            let partition = BlockPartition::from_fiber(&fiber, x.n())
                .map_err(|e| CliError::usage(e.to_string()))?;
            let (matrix, metric_flag) = witness_space(&x, &partition);
            if !metric_flag {
                // the polynomial value is still well defined at the witness;
                // only a line needs a genuine metric
                let sorted_fiber = sorted_block_fiber(&partition);
                let f = f_polynomial_eval(&x, &partition, &matrix)
                    .map_err(|e| CliError::computation(e.to_string()))?;
                let doc = json!({
                    "f_value": f,
                    "n_minus_m": partition.total() - x.n(),
                    "witness_is_metric": false,
                    "fiber": sorted_fiber,
                });
                println!(
                    "{}",
                    serde_json::to_string_pretty(&doc).expect("json serializes")
                );
                if probe {
                    return Err(CliError::computation(
                        "cannot probe: the witness is not a metric space",
                    ));
                }
                return Ok(());
            }
            let rows: Vec<Vec<f64>> = (0..matrix.n_rows())
                .map(|i| matrix.row(i).to_vec())
                .collect();
            FiniteMetricSpace::new(&rows, None)
                .map_err(|e| CliError::computation(e.to_string()))?
        }
        (None, false) => {
            return Err(CliError::usage("need either --y or --witness"))
        }
    };

    let fiber = if witness {
        let partition = BlockPartition::from_fiber(&fiber, x.n())
            .map_err(|e| CliError::usage(e.to_string()))?;
        sorted_block_fiber(&partition)
    } else {
        fiber
    };

    let line = LineSpec::new(x, y, fiber).map_err(|e| CliError::computation(e.to_string()))?;
    let cert = certify_line(&line).map_err(|e| CliError::computation(e.to_string()))?;
    let mut doc = serde_json::to_value(&cert).expect("certificate serializes");
    if probe {
        let p = leading_coefficient_probe(&line, &grid.config())
            .map_err(|e| CliError::computation(e.to_string()))?;
        let obj = doc.as_object_mut().expect("certificate is an object");
        obj.insert(
            "det_leading_measured".into(),
            json!(p.det_leading_measured),
        );
        obj.insert(
            "adj_leading_measured".into(),
            json!(p.adj_leading_measured),
        );
        obj.insert("precision_limited".into(), json!(p.precision_limited));
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&doc).expect("json serializes")
    );
    Ok(())
}

/// Fiber map in block order for a partition: r_0 zeros, r_1 ones, ...
fn sorted_block_fiber(partition: &BlockPartition) -> Vec<usize> {
    let mut fiber = Vec::with_capacity(partition.total());
    for (i, &r) in partition.sizes().iter().enumerate() {
        fiber.extend(std::iter::repeat_n(i, r));
    }
    fiber
}

fn run_repro(which: ReproCommand) -> Result<(), CliError> {
    match which {
        ReproCommand::OnePoint { output } => {
            let reports = repro_one_point_failures(output.out.as_deref())
                .map_err(|e| CliError::computation(e.to_string()))?;
            print_reports(reports, &output)
        }
        ReproCommand::Nowhere { output } => {
            let reports = repro_nowhere_continuity_standard()
                .map_err(|e| CliError::computation(e.to_string()))?;
            print_reports(reports, &output)
        }
        ReproCommand::Perturb { alpha, output } => {
            let alphas: Result<Vec<f64>, _> = alpha
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect();
            let alphas = alphas
                .map_err(|_| CliError::usage(format!("bad alpha list `{alpha}`")))?;
            let reports = repro_perturbed_joins(&alphas, output.out.as_deref())
                .map_err(|e| CliError::computation(e.to_string()))?;
            print_reports(reports, &output)
        }
        ReproCommand::Curves {
            family,
            alpha,
            verify,
            output,
        } => {
            let family = match family.as_str() {
                "join" => CurveFamily::Join,
                "wedge" => CurveFamily::Wedge,
                other => {
                    return Err(CliError::usage(format!(
                        "unknown family `{other}` (expected join or wedge)"
                    )))
                }
            };
            let grid = default_s_grid();
            let (curve, report) =
                repro_pointwise_limit_curves(family, alpha, &grid, output.out.as_deref())
                    .map_err(|e| CliError::computation(e.to_string()))?;
            if output.out.is_none() && output.format != Format::Json {
                print!("{}", curve.to_csv());
            }
            if let Some(s) = curve.singularity {
                eprintln!("singularity bracketed at s = {s}");
            }
            if verify && repro::constructible_alpha_space(alpha).is_none() {
                return Err(CliError::computation(
                    repro::ReproError::AlphaNotConstructible { alpha }.to_string(),
                ));
            }
            print_reports(vec![report], &output)
        }
        ReproCommand::All { output } => {
            let reports = repro_all(output.out.as_deref())
                .map_err(|e| CliError::computation(e.to_string()))?;
            print_reports(reports, &output)
        }
    }
}
