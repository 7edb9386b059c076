//! Command-line front end: every library operation behind one binary with
//! line-delimited structured output and deterministic, seeded verification.

mod opspec;
mod output;

use clap::{Parser, Subcommand, ValueEnum};
use omega_calc::verify::{self, Mutation, Suite};
use omega_calc::{
    bracket_number, deformed_derivative, eigen_series, inverse_derivative_stats,
    DerivativeConfig, EigenfunctionEvaluator, InverseConfig, MobiusMatrix, OmegaOperator,
    RealFunction,
};
use output::OutputRecord;

const EXIT_OK: i32 = 0;
const EXIT_VERIFY_FAILED: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_NUMERIC: i32 = 3;

#[derive(Parser)]
#[command(
    name = "omega-calc",
    version,
    about = "Deformed-derivative operator calculus: apply operators, take derivatives,\n\
             evaluate eigenfunctions, and run the seeded verification suites."
)]
struct Cli {
    /// Output format (csv is meant for --sweep tables)
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
enum EigenMethod {
    Product,
    Series,
}

#[derive(Subcommand)]
enum Command {
    /// Apply an operator's point map, its exact inverse, or its orbit
    Apply {
        /// Operator spec: translation:h=, dilation:q=, power:lambda=,k=, twoparam:lambda=,mu=
        #[arg(long)]
        op: String,
        #[arg(long, allow_negative_numbers = true)]
        x: Option<f64>,
        /// Sweep over points: x=start:stop:count
        #[arg(long, conflicts_with = "x")]
        sweep: Option<String>,
        /// Apply the exact inverse map instead
        #[arg(long)]
        inverse: bool,
        /// Iterate the map this many times; emits the whole orbit
        #[arg(long, value_name = "J_MAX")]
        orbit: Option<usize>,
    },
    /// Deformed derivative of an expression at a point
    Derive {
        #[arg(long)]
        op: String,
        /// Function of x, e.g. "x^2" or "exp(-x)*sin(x)"
        #[arg(long)]
        f: String,
        #[arg(long, allow_negative_numbers = true)]
        x: Option<f64>,
        #[arg(long, conflicts_with = "x")]
        sweep: Option<String>,
        #[arg(long, default_value_t = 1e-12)]
        singular_eps: f64,
        #[arg(long, default_value_t = 1e-6)]
        fd_step: f64,
    },
    /// Inverse deformed derivative (truncated operator series)
    InverseDerive {
        #[arg(long)]
        op: String,
        #[arg(long)]
        f: String,
        #[arg(long, allow_negative_numbers = true)]
        x: Option<f64>,
        #[arg(long, conflicts_with = "x")]
        sweep: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        max_terms: usize,
        #[arg(long, default_value_t = 1e-12)]
        tail_tol: f64,
    },
    /// Eigenfunction of the deformed derivative with eigenvalue one
    Eigen {
        #[arg(long)]
        op: String,
        #[arg(long, allow_negative_numbers = true)]
        x: Option<f64>,
        #[arg(long, conflicts_with = "x")]
        sweep: Option<String>,
        #[arg(long, value_enum, default_value_t = EigenMethod::Product)]
        method: EigenMethod,
        #[arg(long, default_value_t = 1e-14)]
        product_tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_factors: usize,
        /// Series depth (series method only)
        #[arg(long, default_value_t = 20)]
        j_max: usize,
        #[arg(long, default_value_t = 10_000)]
        max_terms: usize,
        #[arg(long, default_value_t = 1e-12)]
        tail_tol: f64,
    },
    /// Bracket number [[n]](x) for the power deformation
    Bracket {
        #[arg(long)]
        n: u32,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long)]
        k: u32,
        #[arg(long, allow_negative_numbers = true)]
        x: Option<f64>,
        #[arg(long, conflicts_with = "x")]
        sweep: Option<String>,
    },
    /// Composite fractional-linear map: matrix, determinant, both action routes
    Mobius {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, allow_negative_numbers = true)]
        h: f64,
        #[arg(long, allow_negative_numbers = true)]
        x: Option<f64>,
        #[arg(long, conflicts_with = "x")]
        sweep: Option<String>,
    },
    /// Run the seeded verification suites
    Verify {
        /// all, leibniz, chain, inverse, eigen, mobius, or limits
        #[arg(long, default_value = "all")]
        suite: String,
        /// Defaults to OMEGA_CALC_SEED, then 0
        #[arg(long)]
        seed: Option<u64>,
        /// Inject a named sign error; the suites must detect it (see CONTRIBUTING.md)
        #[arg(long, default_value = "none")]
        mutate: String,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(message) => {
            eprintln!("error: {message}");
            std::process::exit(EXIT_USAGE);
        }
    }
}

fn run(cli: Cli) -> Result<i32, String> {
    let (records, exit) = match cli.command {
        Command::Apply { op, x, sweep, inverse, orbit } => {
            numeric_exit(cmd_apply(&op, points(x, &sweep)?, inverse, orbit)?)
        }
        Command::Derive { op, f, x, sweep, singular_eps, fd_step } => {
            let cfg = DerivativeConfig { singular_eps, fd_step };
            numeric_exit(cmd_derive(&op, &f, points(x, &sweep)?, &cfg)?)
        }
        Command::InverseDerive { op, f, x, sweep, max_terms, tail_tol } => {
            let cfg = InverseConfig { max_terms, tail_tol };
            numeric_exit(cmd_inverse_derive(&op, &f, points(x, &sweep)?, &cfg)?)
        }
        Command::Eigen { op, x, sweep, method, product_tol, max_factors, j_max, max_terms, tail_tol } => {
            let series_cfg = InverseConfig { max_terms, tail_tol };
            numeric_exit(cmd_eigen(
                &op,
                points(x, &sweep)?,
                method,
                product_tol,
                max_factors,
                j_max,
                &series_cfg,
            )?)
        }
        Command::Bracket { n, lambda, k, x, sweep } => {
            numeric_exit(cmd_bracket(n, lambda, k, points(x, &sweep)?))
        }
        Command::Mobius { lambda, q, h, x, sweep } => {
            numeric_exit(cmd_mobius(lambda, q, h, points(x, &sweep)?))
        }
        Command::Verify { suite, seed, mutate } => cmd_verify(&suite, seed, &mutate)?,
    };
    emit(&records, cli.format);
    Ok(exit)
}

fn numeric_exit(records: Vec<OutputRecord>) -> (Vec<OutputRecord>, i32) {
    let exit = if records.iter().any(OutputRecord::is_error) {
        EXIT_NUMERIC
    } else {
        EXIT_OK
    };
    (records, exit)
}

fn points(x: Option<f64>, sweep: &Option<String>) -> Result<Vec<f64>, String> {
    match (x, sweep) {
        (Some(value), None) => Ok(vec![value]),
        (None, Some(spec)) => opspec::parse_sweep(spec),
        (None, None) => Err("one of --x or --sweep is required".into()),
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    }
}

fn parse_expression(text: &str) -> Result<RealFunction, String> {
    let expr = omega_calc::parse(text).map_err(|e| e.to_string())?;
    Ok(RealFunction::from_expr(expr))
}

fn emit(records: &[OutputRecord], format: Format) {
    use std::io::Write;
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let result = (|| -> std::io::Result<()> {
        match format {
            Format::Json => {
                for record in records {
                    writeln!(out, "{}", record.to_json())?;
                }
            }
            Format::Csv => {
                writeln!(out, "{}", OutputRecord::CSV_HEADER)?;
                for record in records {
                    writeln!(out, "{}", record.to_csv_row())?;
                }
            }
        }
        out.flush()
    })();
    // a closed pipe downstream is not our error
    if let Err(e) = result {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
            std::process::exit(EXIT_NUMERIC);
        }
    }
}

fn cmd_apply(
    spec: &str,
    xs: Vec<f64>,
    inverse: bool,
    orbit: Option<usize>,
) -> Result<Vec<OutputRecord>, String> {
    let op = opspec::parse_operator(spec)?;
    let mut records = Vec::new();
    for x in xs {
        let mut record = OutputRecord::new("apply")
            .input("op", spec)
            .input("x", x)
            .input("inverse", inverse);
        if let Some(j_max) = orbit {
            let walker = if inverse { op.inverse() } else { op };
            let orbit = walker.orbit(x, j_max);
            record = record
                .input("orbit", j_max as u64)
                .with_value(*orbit.points.last().expect("orbit holds the seed"))
                .diag("points", orbit.points.clone())
                .diag("complete", orbit.complete);
        } else {
            let result = if inverse { op.inverse_apply(x) } else { op.apply(x) };
            record = match result {
                Ok(value) => record.with_value(value),
                Err(e) => record.with_error(e),
            };
        }
        records.push(record);
    }
    Ok(records)
}

fn cmd_derive(
    spec: &str,
    f_text: &str,
    xs: Vec<f64>,
    cfg: &DerivativeConfig,
) -> Result<Vec<OutputRecord>, String> {
    let op = opspec::parse_operator(spec)?;
    let f = parse_expression(f_text)?;
    let mut records = Vec::new();
    for x in xs {
        let mut record = OutputRecord::new("derive")
            .input("op", spec)
            .input("f", f_text)
            .input("x", x);
        record = match deformed_derivative(&op, &f, x, cfg) {
            Ok(value) => {
                let wx = op.apply(x).expect("derivative already applied the map");
                record
                    .with_value(value)
                    .diag("omega_x", wx)
                    .diag("denominator", wx - x)
                    .diag("singular_fallback", (wx - x).abs() < cfg.singular_eps)
            }
            Err(e) => record.with_error(e),
        };
        records.push(record);
    }
    Ok(records)
}

fn cmd_inverse_derive(
    spec: &str,
    f_text: &str,
    xs: Vec<f64>,
    cfg: &InverseConfig,
) -> Result<Vec<OutputRecord>, String> {
    let op = opspec::parse_operator(spec)?;
    let f = parse_expression(f_text)?;
    let mut records = Vec::new();
    for x in xs {
        let mut record = OutputRecord::new("inverse-derive")
            .input("op", spec)
            .input("f", f_text)
            .input("x", x);
        record = match inverse_derivative_stats(&op, &f, x, cfg) {
            Ok(eval) => record
                .with_value(eval.value)
                .diag("terms", eval.terms as u64)
                .diag("last_term", eval.last_term)
                .diag("converged", true),
            Err(e) => record.with_error(e).diag("converged", false),
        };
        records.push(record);
    }
    Ok(records)
}

fn cmd_eigen(
    spec: &str,
    xs: Vec<f64>,
    method: EigenMethod,
    product_tol: f64,
    max_factors: usize,
    j_max: usize,
    series_cfg: &InverseConfig,
) -> Result<Vec<OutputRecord>, String> {
    let op = opspec::parse_operator(spec)?;
    if product_tol <= 0.0 || max_factors == 0 {
        return Err("--product-tol must be positive and --max-factors at least 1".into());
    }
    if j_max == 0 {
        return Err("--j-max must be at least 1".into());
    }
    let mut records = Vec::new();
    for x in xs {
        let record = OutputRecord::new("eigen")
            .input("op", spec)
            .input("x", x)
            .input("method", match method {
                EigenMethod::Product => "product",
                EigenMethod::Series => "series",
            });
        let record = match method {
            EigenMethod::Product => {
                let ev = EigenfunctionEvaluator::with_tolerances(op, product_tol, max_factors);
                match ev.product(x) {
                    Ok(eval) => record
                        .with_value(eval.value)
                        .diag("factors", eval.factors as u64)
                        .diag("last_deviation", eval.last_deviation)
                        .diag("converged", true),
                    Err(e) => record.with_error(e).diag("converged", false),
                }
            }
            EigenMethod::Series => match eigen_series(&op, x, series_cfg, j_max) {
                Ok(eval) => record
                    .with_value(eval.value)
                    .diag("terms", (j_max + 1) as u64)
                    .diag("last_term", eval.last_term)
                    .diag("grid_len", eval.grid_len as u64)
                    .diag("converged", true),
                Err(e) => record.with_error(e).diag("converged", false),
            },
        };
        records.push(record);
    }
    Ok(records)
}

fn cmd_bracket(n: u32, lambda: f64, k: u32, xs: Vec<f64>) -> Vec<OutputRecord> {
    let mut records = Vec::new();
    for x in xs {
        let record = OutputRecord::new("bracket")
            .input("n", n as u64)
            .input("lambda", lambda)
            .input("k", k as u64)
            .input("x", x);
        records.push(match bracket_number(n, lambda, k, x) {
            Ok(value) => record.with_value(value),
            Err(e) => record.with_error(e),
        });
    }
    records
}

fn cmd_mobius(lambda: f64, q: f64, h: f64, xs: Vec<f64>) -> Vec<OutputRecord> {
    let mut records = Vec::new();
    for x in xs {
        let record = OutputRecord::new("mobius")
            .input("lambda", lambda)
            .input("q", q)
            .input("h", h)
            .input("x", x);
        records.push(mobius_record(record, lambda, q, h, x));
    }
    records
}

fn mobius_record(record: OutputRecord, lambda: f64, q: f64, h: f64, x: f64) -> OutputRecord {
    let matrix = match MobiusMatrix::composite(lambda, q, h) {
        Ok(m) => m,
        Err(e) => return record.with_error(e),
    };
    let (a, b, c, d) = matrix.entries();
    let record = record
        .diag("a", a)
        .diag("b", b)
        .diag("c", c)
        .diag("d", d)
        .diag("det", matrix.det());
    let matrix_action = match matrix.act(x) {
        Ok(v) => v,
        Err(e) => return record.with_error(e),
    };
    let operator_action = (|| -> omega_calc::Result<f64> {
        let shifted = OmegaOperator::translation(h)?.apply(x)?;
        let scaled = if q == 1.0 {
            shifted
        } else {
            OmegaOperator::dilation(q)?.apply(shifted)?
        };
        OmegaOperator::power_deformation(lambda, 1)?.apply(scaled)
    })();
    match operator_action {
        Ok(op_value) => record
            .with_value(matrix_action)
            .diag("matrix_action", matrix_action)
            .diag("operator_action", op_value)
            .diag("residual", (matrix_action - op_value).abs()),
        Err(e) => record.with_error(e).diag("matrix_action", matrix_action),
    }
}

fn cmd_verify(
    suite_arg: &str,
    seed_flag: Option<u64>,
    mutate_arg: &str,
) -> Result<(Vec<OutputRecord>, i32), String> {
    let suites: Vec<Suite> = if suite_arg == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![Suite::from_name(suite_arg).ok_or_else(|| {
            format!("unknown suite '{suite_arg}' (all, leibniz, chain, inverse, eigen, mobius, limits)")
        })?]
    };
    let mutation = Mutation::from_name(mutate_arg)
        .ok_or_else(|| format!("unknown mutation '{mutate_arg}'"))?;
    let seed = match seed_flag {
        Some(seed) => seed,
        None => match std::env::var("OMEGA_CALC_SEED") {
            Ok(text) => text
                .parse::<u64>()
                .map_err(|_| format!("OMEGA_CALC_SEED '{text}' is not an unsigned integer"))?,
            Err(_) => 0,
        },
    };
    let mut records = Vec::new();
    let mut total_failures = 0usize;
    for suite in suites {
        for report in verify::run_suite_mutated(suite, seed, mutation) {
            total_failures += report.failures;
            records.push(
                OutputRecord::new("verify")
                    .input("suite", report.suite)
                    .input("seed", seed)
                    .input("mutation", mutation.name())
                    .with_value(report.failures as f64)
                    .diag("check", report.check)
                    .diag("cases", report.cases as u64)
                    .diag("skipped", report.skipped as u64)
                    .diag("failures", report.failures as u64)
                    .diag("max_error", report.max_error)
                    .diag("tolerance", report.tolerance)
                    .diag("pass", report.passed()),
            );
        }
    }
    let exit = if total_failures > 0 { EXIT_VERIFY_FAILED } else { EXIT_OK };
    Ok((records, exit))
}
