//! Batch front-end behind the `betapoly` binary.
//!
//! Every subcommand prints one record per line, JSON-lines by default or CSV
//! with `--format csv`. Floats are written with 17 significant digits and
//! column order is fixed per subcommand; see [`columns`].
//!
//! Exit codes: 0 success, 1 solver or internal failure, 2 usage or domain
//! error, 3 statistical regression (`|z| > 4`), 4 tolerance not reached.

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::asympt;
use crate::exactvol::{expected_volume_ratio, QuadratureReport};
use crate::intrinsics::{expected_intrinsic_ratio, reduce};
use crate::mcgeom::{self, Estimate};
use crate::{BetaModel, Error, Result, SampleSize};

/// Seed used by the Monte Carlo subcommands when `--seed` is absent.
pub const DEFAULT_SEED: u64 = 20_190_611;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_REGRESSION: i32 = 3;
pub const EXIT_TOLERANCE: i32 = 4;

/// `|z|` beyond which a Monte Carlo comparison counts as a regression.
pub const Z_LIMIT: f64 = 4.0;

const MC_MAX_D: u32 = 12;
const MC_MAX_N: u64 = 500;

#[derive(Parser, Debug)]
#[command(name = "betapoly", version, about = "Expected volumes and vertex counts of beta random polytopes")]
pub struct Cli {
    /// Seed for the Monte Carlo subcommands.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    #[arg(long, global = true, help = "Output format", value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Jsonl,
    Csv,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct SizeArgs {
    /// Number of points.
    #[arg(long)]
    pub n: Option<u64>,
    /// Natural log of the number of points.
    #[arg(long = "log-n", allow_negative_numbers = true)]
    pub log_n: Option<f64>,
    /// Threshold parameter: ln n = (d/2 + beta) ln(d / 2x).
    #[arg(long, allow_negative_numbers = true)]
    pub x: Option<f64>,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct SweepArgs {
    #[arg(long, help = "Threshold parameters, comma separated", value_delimiter = ',', num_args = 0.., allow_negative_numbers = true)]
    pub x: Option<Vec<f64>>,
    #[arg(long = "log-n", help = "Natural logs of the number of points, comma separated", value_delimiter = ',', num_args = 0.., allow_negative_numbers = true)]
    pub log_n: Option<Vec<f64>>,
}

#[derive(Args, Debug, Clone)]
pub struct McArgs {
    /// Allow Monte Carlo runs with d > 12 or n > 500.
    #[arg(long)]
    pub force: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact expected volume ratio.
    Exact {
        #[arg(long, help = "Dimension")]
        d: u32,
        #[arg(long, help = "Beta parameter, > -1 (-1 is the sphere)", allow_negative_numbers = true)]
        beta: f64,
        #[command(flatten)]
        size: SizeArgs,
        #[arg(long, help = "Requested relative accuracy", default_value_t = 1e-9)]
        rel_tol: f64,
    },
    /// Exact ratio against the limit e^-x over a grid of dimensions and sizes.
    Curve {
        #[arg(long, help = "Dimensions, comma separated", value_delimiter = ',', num_args = 0.., required = true)]
        d: Vec<u32>,
        #[arg(long, help = "Beta parameter, > -1 (-1 is the sphere)", allow_negative_numbers = true)]
        beta: f64,
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, help = "Requested relative accuracy", default_value_t = 1e-9)]
        rel_tol: f64,
    },
    /// Exact ratio against the hit-or-miss Monte Carlo estimate.
    Compare {
        #[arg(long, help = "Dimension")]
        d: u32,
        #[arg(long, help = "Beta parameter, > -1 (-1 is the sphere)", allow_negative_numbers = true)]
        beta: f64,
        #[arg(long, help = "Number of points")]
        n: u64,
        #[arg(long, help = "Monte Carlo trials", default_value_t = 10_000)]
        trials: u64,
        #[arg(long, help = "Uniform probes per hull", default_value_t = 1_000)]
        probes: u64,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Monte Carlo vertex count against the Efron prediction (beta = 0).
    Vertices {
        #[arg(long, help = "Dimension")]
        d: u32,
        #[arg(long, help = "Number of points")]
        n: u64,
        #[arg(
            long,
            help = "Beta parameter, > -1 (-1 is the sphere)",
            allow_negative_numbers = true,
            default_value_t = 0.0
        )]
        beta: f64,
        #[arg(long, help = "Monte Carlo trials", default_value_t = 10_000)]
        trials: u64,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Wendel bound, identity value, and Monte Carlo origin containment.
    Wendel {
        #[arg(long, help = "Number of points")]
        n: u64,
        #[arg(long, help = "Dimension")]
        d: u32,
        #[arg(
            long,
            help = "Beta parameter, > -1 (-1 is the sphere)",
            allow_negative_numbers = true,
            default_value_t = 0.0
        )]
        beta: f64,
        #[arg(long, help = "Monte Carlo trials", default_value_t = 10_000)]
        trials: u64,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Expected intrinsic volume ratio E V_k(P) / V_k(B^d).
    Intrinsic {
        #[arg(long, help = "Dimension")]
        d: u32,
        #[arg(long, help = "Intrinsic volume index, 1 <= k <= d")]
        k: u32,
        #[arg(long, help = "Beta parameter, > -1 (-1 is the sphere)", allow_negative_numbers = true)]
        beta: f64,
        #[command(flatten)]
        size: SizeArgs,
        #[arg(long, help = "Requested relative accuracy", default_value_t = 1e-9)]
        rel_tol: f64,
    },
}

/// One output cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Int(u64),
    Float(f64),
    Text(String),
    Null,
}

impl Field {
    fn opt_float(x: Option<f64>) -> Field {
        x.map_or(Field::Null, Field::Float)
    }

    fn csv_text(&self) -> String {
        match self {
            Field::Int(v) => v.to_string(),
            Field::Float(v) if v.is_finite() => format!("{v:.16e}"),
            Field::Float(v) => v.to_string(),
            Field::Text(s) => s.clone(),
            Field::Null => String::new(),
        }
    }

    fn json_text(&self) -> String {
        match self {
            Field::Int(v) => v.to_string(),
            Field::Float(v) if v.is_finite() => format!("{v:.16e}"),
            Field::Float(_) | Field::Null => "null".into(),
            Field::Text(s) => serde_json::Value::String(s.clone()).to_string(),
        }
    }
}

/// One line of output: the command, its parameters, the seed for Monte
/// Carlo commands, the outputs, and the wall time.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub command: &'static str,
    pub params: Vec<(&'static str, Field)>,
    pub seed: Option<u64>,
    pub outputs: Vec<(&'static str, Field)>,
    pub wall_time_s: f64,
}

impl RunRecord {
    fn cells(&self) -> Vec<(&'static str, Field)> {
        if self.command == "curve" {
            return self.params.iter().chain(&self.outputs).cloned().collect();
        }
        let mut cells = vec![("command", Field::Text(self.command.into()))];
        cells.extend(self.params.iter().cloned());
        if let Some(seed) = self.seed {
            cells.push(("seed", Field::Int(seed)));
        }
        cells.extend(self.outputs.iter().cloned());
        cells.push(("wall_time_s", Field::Float(self.wall_time_s)));
        cells
    }

    pub fn column_names(&self) -> Vec<&'static str> {
        self.cells().into_iter().map(|(k, _)| k).collect()
    }

    pub fn to_json_line(&self) -> String {
        let body: Vec<String> = self.cells().iter().map(|(k, v)| format!("\"{k}\":{}", v.json_text())).collect();
        format!("{{{}}}", body.join(","))
    }

    pub fn csv_values(&self) -> Vec<String> {
        self.cells().iter().map(|(_, v)| v.csv_text()).collect()
    }

    pub fn get(&self, key: &str) -> Option<&Field> {
        self.params.iter().chain(&self.outputs).find(|(k, _)| *k == key).map(|(_, v)| v)
    }
}

/// The fixed column list of a subcommand.
pub fn columns(command: &str) -> Option<&'static [&'static str]> {
    Some(match command {
        "exact" => &[
            "command",
            "d",
            "beta",
            "n",
            "log_n",
            "x",
            "rel_tol",
            "ratio",
            "log_integral",
            "mode_h",
            "window_lo",
            "window_hi",
            "nodes_used",
            "rel_error_estimate",
            "method",
            "wall_time_s",
        ],
        "curve" => &["d", "beta", "log_n", "x", "ratio_exact", "ratio_predicted", "rel_error_estimate", "error"],
        "compare" => &[
            "command",
            "d",
            "beta",
            "n",
            "trials",
            "probes",
            "seed",
            "ratio_exact",
            "ratio_mc",
            "std_error",
            "z_score",
            "wall_time_s",
        ],
        "vertices" => &[
            "command",
            "d",
            "beta",
            "n",
            "trials",
            "seed",
            "vertices_mc",
            "std_error",
            "vertices_efron",
            "z_score",
            "wall_time_s",
        ],
        "wendel" => &[
            "command",
            "n",
            "d",
            "beta",
            "trials",
            "seed",
            "bound",
            "identity",
            "containment_mc",
            "std_error",
            "z_score",
            "wall_time_s",
        ],
        "intrinsic" => &[
            "command",
            "d",
            "k",
            "beta",
            "n",
            "log_n",
            "x",
            "rel_tol",
            "reduced_d",
            "reduced_beta",
            "ratio",
            "log_integral",
            "mode_h",
            "window_lo",
            "window_hi",
            "nodes_used",
            "rel_error_estimate",
            "method",
            "wall_time_s",
        ],
        _ => return None,
    })
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) => EXIT_USAGE,
        Error::ToleranceNotReached { .. } => EXIT_TOLERANCE,
        Error::SolverFailure(_) | Error::InvariantViolation(_) | Error::Internal(_) => EXIT_FAILURE,
    }
}

/// Parses `args` (including the program name), runs the subcommand and
/// writes records to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    let outcome = match execute(&cli) {
        Ok(outcome) => outcome,
        Err(e) => {
            let _ = writeln!(err, "betapoly: {e}");
            return exit_code(&e);
        }
    };
    if let Err(e) = emit(&outcome.records, cli.format, out) {
        let _ = writeln!(err, "betapoly: cannot write output: {e}");
        return EXIT_FAILURE;
    }
    for line in &outcome.warnings {
        let _ = writeln!(err, "betapoly: {line}");
    }
    outcome.code
}

pub struct Outcome {
    pub records: Vec<RunRecord>,
    pub warnings: Vec<String>,
    pub code: i32,
}

impl Outcome {
    fn single(record: RunRecord) -> Outcome {
        Outcome { records: vec![record], warnings: Vec::new(), code: EXIT_OK }
    }

    fn checked(record: RunRecord, z: f64) -> Outcome {
        let mut o = Outcome::single(record);
        if !(z.abs() <= Z_LIMIT) {
            o.warnings.push(format!("statistical regression: |z| = {} exceeds {Z_LIMIT}", z.abs()));
            o.code = EXIT_REGRESSION;
        }
        o
    }
}

pub fn emit(records: &[RunRecord], format: Format, out: &mut dyn Write) -> std::io::Result<()> {
    match format {
        Format::Jsonl => {
            for r in records {
                writeln!(out, "{}", r.to_json_line())?;
            }
            Ok(())
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            if let Some(first) = records.first() {
                w.write_record(first.column_names())?;
            }
            for r in records {
                w.write_record(r.csv_values())?;
            }
            w.flush()
        }
    }
}

/// Runs a parsed command line without writing anything.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let started = Instant::now();
    let seed = cli.seed;
    match &cli.command {
        Command::Exact { d, beta, size, rel_tol } => {
            let model = BetaModel::new(*d, *beta)?;
            let (sample, x) = resolve_size(&model, size)?;
            let (ratio, report) = expected_volume_ratio(&model, &sample, *rel_tol)?;
            let mut outputs = vec![("ratio", Field::Float(ratio))];
            outputs.extend(report_fields(&report));
            Ok(Outcome::single(RunRecord {
                command: "exact",
                params: vec![
                    ("d", Field::Int(u64::from(*d))),
                    ("beta", Field::Float(*beta)),
                    ("n", sample.exact_n().map_or(Field::Null, Field::Int)),
                    ("log_n", Field::Float(sample.log_n())),
                    ("x", Field::opt_float(x)),
                    ("rel_tol", Field::Float(*rel_tol)),
                ],
                seed: None,
                outputs,
                wall_time_s: started.elapsed().as_secs_f64(),
            }))
        }
        Command::Curve { d, beta, sweep, rel_tol } => curve(d, *beta, sweep, *rel_tol),
        Command::Compare { d, beta, n, trials, probes, mc } => {
            let model = BetaModel::new(*d, *beta)?;
            guard(*d, *n, mc)?;
            let sample = SampleSize::exact(*n)?;
            sample.check_for(&model)?;
            let (exact, _) = expected_volume_ratio(&model, &sample, 1e-9)?;
            let est = mcgeom::mc_volume_ratio(&model, *n as usize, *trials, *probes, seed)?;
            let z = est.z_score(exact);
            let record = RunRecord {
                command: "compare",
                params: vec![
                    ("d", Field::Int(u64::from(*d))),
                    ("beta", Field::Float(*beta)),
                    ("n", Field::Int(*n)),
                    ("trials", Field::Int(*trials)),
                    ("probes", Field::Int(*probes)),
                ],
                seed: Some(seed),
                outputs: vec![("ratio_exact", Field::Float(exact))]
                    .into_iter()
                    .chain(estimate_fields("ratio_mc", &est, z))
                    .collect(),
                wall_time_s: started.elapsed().as_secs_f64(),
            };
            Ok(Outcome::checked(record, z))
        }
        Command::Vertices { d, n, beta, trials, mc } => {
            let model = BetaModel::new(*d, *beta)?;
            if *beta != 0.0 {
                return Err(Error::Domain(format!("vertices requires beta = 0, got beta = {beta}")));
            }
            guard(*d, *n, mc)?;
            let prediction = efron_prediction(&model, *n)?;
            let est = mcgeom::mc_vertex_count(&model, *n as usize, *trials, seed)?;
            let z = est.z_score(prediction);
            let record = RunRecord {
                command: "vertices",
                params: vec![
                    ("d", Field::Int(u64::from(*d))),
                    ("beta", Field::Float(*beta)),
                    ("n", Field::Int(*n)),
                    ("trials", Field::Int(*trials)),
                ],
                seed: Some(seed),
                outputs: vec![
                    ("vertices_mc", Field::Float(est.value)),
                    ("std_error", Field::Float(est.std_error)),
                    ("vertices_efron", Field::Float(prediction)),
                    ("z_score", Field::Float(z)),
                ],
                wall_time_s: started.elapsed().as_secs_f64(),
            };
            Ok(Outcome::checked(record, z))
        }
        Command::Wendel { n, d, beta, trials, mc } => {
            let model = BetaModel::new(*d, *beta)?;
            guard(*d, *n, mc)?;
            let bound = mcgeom::wendel_probability(*n, u64::from(*d))?;
            let identity = mcgeom::wendel_identity(*n, u64::from(*d))?;
            let est = mcgeom::mc_origin_containment(&model, *n as usize, *trials, seed)?;
            let z = est.z_score(identity);
            let record = RunRecord {
                command: "wendel",
                params: vec![
                    ("n", Field::Int(*n)),
                    ("d", Field::Int(u64::from(*d))),
                    ("beta", Field::Float(*beta)),
                    ("trials", Field::Int(*trials)),
                ],
                seed: Some(seed),
                outputs: vec![("bound", Field::Float(bound)), ("identity", Field::Float(identity))]
                    .into_iter()
                    .chain(estimate_fields("containment_mc", &est, z))
                    .collect(),
                wall_time_s: started.elapsed().as_secs_f64(),
            };
            Ok(Outcome::checked(record, z))
        }
        Command::Intrinsic { d, k, beta, size, rel_tol } => {
            BetaModel::new(*d, *beta)?;
            let (d_red, beta_red) = reduce(*d, *k, *beta)?;
            let reduced = BetaModel::new(d_red, beta_red)?;
            let (sample, x) = resolve_size(&reduced, size)?;
            let (ratio, report) = expected_intrinsic_ratio(*d, *k, *beta, &sample, *rel_tol)?;
            let mut outputs = vec![
                ("reduced_d", Field::Int(u64::from(d_red))),
                ("reduced_beta", Field::Float(beta_red)),
                ("ratio", Field::Float(ratio)),
            ];
            outputs.extend(report_fields(&report));
            Ok(Outcome::single(RunRecord {
                command: "intrinsic",
                params: vec![
                    ("d", Field::Int(u64::from(*d))),
                    ("k", Field::Int(u64::from(*k))),
                    ("beta", Field::Float(*beta)),
                    ("n", sample.exact_n().map_or(Field::Null, Field::Int)),
                    ("log_n", Field::Float(sample.log_n())),
                    ("x", Field::opt_float(x)),
                    ("rel_tol", Field::Float(*rel_tol)),
                ],
                seed: None,
                outputs,
                wall_time_s: started.elapsed().as_secs_f64(),
            }))
        }
    }
}

/// Turns the `--n` / `--log-n` / `--x` triple into a sample size plus the
/// threshold parameter when one is defined.
fn resolve_size(model: &BetaModel, size: &SizeArgs) -> Result<(SampleSize, Option<f64>)> {
    let (d, beta) = (model.d(), model.beta());
    let sample = match (size.n, size.log_n, size.x) {
        (Some(n), None, None) => SampleSize::exact(n)?,
        (None, Some(l), None) => SampleSize::from_log(l)?,
        (None, None, Some(x)) => SampleSize::from_log(asympt::threshold_log_n(d, beta, x)?)?,
        _ => return Err(Error::Domain("exactly one of --n, --log-n, --x is required".into())),
    };
    sample.check_for(model)?;
    let x = size.x.or_else(|| asympt::x_of(d, beta, sample.log_n()).ok());
    Ok((sample, x))
}

fn report_fields(report: &QuadratureReport) -> Vec<(&'static str, Field)> {
    vec![
        ("log_integral", Field::Float(report.log_integral)),
        ("mode_h", Field::opt_float(report.mode_h)),
        ("window_lo", Field::Float(report.window.0)),
        ("window_hi", Field::Float(report.window.1)),
        ("nodes_used", Field::Int(report.nodes_used as u64)),
        ("rel_error_estimate", Field::Float(report.rel_error_estimate)),
        ("method", Field::Text(report.method.to_string())),
    ]
}

fn estimate_fields(name: &'static str, est: &Estimate, z: f64) -> Vec<(&'static str, Field)> {
    vec![(name, Field::Float(est.value)), ("std_error", Field::Float(est.std_error)), ("z_score", Field::Float(z))]
}

fn guard(d: u32, n: u64, mc: &McArgs) -> Result<()> {
    if !mc.force && (d > MC_MAX_D || n > MC_MAX_N) {
        return Err(Error::Domain(format!(
            "Monte Carlo limited to d <= {MC_MAX_D} and n <= {MC_MAX_N} (got d = {d}, n = {n}); pass --force to override"
        )));
    }
    Ok(())
}

/// `n (1 - E vol(P_{n-1}) / kappa_d)`; fewer than `d + 1` points span no volume.
pub fn efron_prediction(model: &BetaModel, n: u64) -> Result<f64> {
    if n < u64::from(model.d()) + 1 {
        return Err(Error::Domain(format!("need n >= d + 1, got n = {n}, d = {}", model.d())));
    }
    let previous = n - 1;
    let ratio = if previous < u64::from(model.d()) + 1 {
        0.0
    } else {
        expected_volume_ratio(model, &SampleSize::exact(previous)?, 1e-10)?.0
    };
    Ok(n as f64 * (1.0 - ratio))
}

fn curve(ds: &[u32], beta: f64, sweep: &SweepArgs, rel_tol: f64) -> Result<Outcome> {
    let (values, by_x) = match (&sweep.x, &sweep.log_n) {
        (Some(xs), None) => (xs, true),
        (None, Some(ls)) => (ls, false),
        _ => return Err(Error::Domain("exactly one of --x, --log-n is required".into())),
    };
    if ds.is_empty() || values.is_empty() {
        return Err(Error::Domain("curve needs non-empty --d and --x/--log-n lists".into()));
    }
    let grid: Vec<(u32, f64)> = ds.iter().flat_map(|&d| values.iter().map(move |&v| (d, v))).collect();
    let rows: Vec<(RunRecord, Option<Error>)> =
        grid.par_iter().map(|&(d, v)| curve_row(d, beta, v, by_x, rel_tol)).collect();
    let first_error = rows.iter().find_map(|(_, e)| e.clone());
    let succeeded = rows.iter().filter(|(_, e)| e.is_none()).count();
    let code = match (succeeded, &first_error) {
        (0, Some(e)) => exit_code(e),
        _ => EXIT_OK,
    };
    let warnings = grid
        .iter()
        .zip(&rows)
        .filter_map(|((d, v), (_, e))| e.as_ref().map(|e| format!("row d = {d}, value = {v}: {e}")))
        .collect();
    Ok(Outcome { records: rows.into_iter().map(|(r, _)| r).collect(), warnings, code })
}

fn curve_row(d: u32, beta: f64, value: f64, by_x: bool, rel_tol: f64) -> (RunRecord, Option<Error>) {
    let started = Instant::now();
    let log_n = if by_x { asympt::threshold_log_n(d, beta, value) } else { Ok(value) };
    let x = if by_x { Some(value) } else { asympt::x_of(d, beta, value).ok() };
    let computed = log_n.clone().and_then(|log_n| {
        let model = BetaModel::new(d, beta)?;
        let predicted = asympt::predicted_ratio(d, beta, log_n)?;
        let sample = SampleSize::from_log(log_n)?;
        sample.check_for(&model)?;
        let (ratio, report) = expected_volume_ratio(&model, &sample, rel_tol)?;
        Ok((ratio, predicted, report.rel_error_estimate))
    });
    let (outputs, error) = match computed {
        Ok((ratio, predicted, rel)) => (
            vec![
                ("ratio_exact", Field::Float(ratio)),
                ("ratio_predicted", Field::Float(predicted)),
                ("rel_error_estimate", Field::Float(rel)),
                ("error", Field::Null),
            ],
            None,
        ),
        Err(e) => (
            vec![
                ("ratio_exact", Field::Null),
                ("ratio_predicted", Field::opt_float(x.map(|x| (-x).exp()))),
                ("rel_error_estimate", Field::Null),
                ("error", Field::Text(e.to_string())),
            ],
            Some(e),
        ),
    };
    let record = RunRecord {
        command: "curve",
        params: vec![
            ("d", Field::Int(u64::from(d))),
            ("beta", Field::Float(beta)),
            ("log_n", Field::opt_float(log_n.ok())),
            ("x", Field::opt_float(x)),
        ],
        seed: None,
        outputs,
        wall_time_s: started.elapsed().as_secs_f64(),
    };
    (record, error)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("betapoly").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn size_flags_are_mutually_exclusive() {
        assert_eq!(run_args(&["exact", "--d", "3", "--beta", "0"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["exact", "--d", "3", "--beta", "0", "--n", "5", "--x", "1"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["exact", "--d", "3", "--beta", "0", "--n", "5", "--log-n", "2"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["exact", "--d", "3", "--beta", "0", "--log-n", "2.5"]).0, EXIT_OK);
    }

    #[test]
    fn columns_match_records() {
        for args in [
            vec!["exact", "--d", "3", "--beta", "0", "--n", "6"],
            vec!["intrinsic", "--d", "6", "--k", "3", "--beta", "0", "--n", "20"],
            vec!["compare", "--d", "2", "--beta", "0", "--n", "3", "--trials", "200", "--probes", "50"],
            vec!["vertices", "--d", "2", "--n", "5", "--trials", "50"],
            vec!["wendel", "--n", "4", "--d", "2", "--trials", "200"],
            vec!["curve", "--d", "10", "--beta", "0", "--x", "1"],
        ] {
            let cli = Cli::try_parse_from(std::iter::once("betapoly").chain(args.iter().copied())).unwrap();
            let outcome = execute(&cli).unwrap();
            let record = &outcome.records[0];
            assert_eq!(record.column_names(), columns(args[0]).unwrap(), "{}", args[0]);
        }
    }

    #[test]
    fn floats_round_trip_through_json() {
        let r = RunRecord {
            command: "exact",
            params: vec![("beta", Field::Float(0.1)), ("x", Field::Float(std::f64::consts::PI / 7.0))],
            seed: None,
            outputs: vec![("ratio", Field::Float(1.0 / 3.0)), ("tiny", Field::Float(5e-324))],
            wall_time_s: 0.25,
        };
        let v: serde_json::Value = serde_json::from_str(&r.to_json_line()).unwrap();
        assert_eq!(v["beta"].as_f64(), Some(0.1));
        assert_eq!(v["x"].as_f64(), Some(std::f64::consts::PI / 7.0));
        assert_eq!(v["ratio"].as_f64(), Some(1.0 / 3.0));
        assert_eq!(v["tiny"].as_f64(), Some(5e-324));
        let csv: Vec<f64> = r.csv_values()[1..5].iter().map(|s| s.parse().unwrap()).collect();
        assert_eq!(csv, vec![0.1, std::f64::consts::PI / 7.0, 1.0 / 3.0, 5e-324]);
    }

    #[test]
    fn guard_blocks_large_mc_runs() {
        let (code, _, err) = run_args(&["compare", "--d", "20", "--beta", "0", "--n", "30"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--force"));
        assert_eq!(run_args(&["wendel", "--n", "600", "--d", "2"]).0, EXIT_USAGE);
    }

    #[test]
    fn error_kinds_map_to_exit_codes() {
        assert_eq!(exit_code(&Error::Domain("x".into())), EXIT_USAGE);
        let tol = Error::ToleranceNotReached { estimate: 0.5, rel_error: 1e-3, requested: 1e-9 };
        assert_eq!(exit_code(&tol), EXIT_TOLERANCE);
        assert_eq!(exit_code(&Error::SolverFailure("x".into())), EXIT_FAILURE);
    }

    #[test]
    fn efron_prediction_for_simplex() {
        let m = BetaModel::new(3, 0.0).unwrap();
        assert_eq!(efron_prediction(&m, 4).unwrap(), 4.0);
        assert!(efron_prediction(&m, 3).is_err());
    }
}
