use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use curvjet::config::{parse_metric, parse_point, parse_tolerance, OutputFormat, RunConfig};
use curvjet::{curvature_dump, fit_dump, json, runner, CliError};
use curvjet_core::verify::Tolerances;

/// Curvature engine and verification suite for analytic metrics.
#[derive(Parser)]
#[command(name = "curvjet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suite described by a TOML config.
    Verify(VerifyArgs),
    /// Dump the curvature pack of one metric at one point.
    Curvature(CurvatureArgs),
    /// Fit the recurrence at one point and dump the derived identities.
    FitRecurrence(FitArgs),
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `output_path`; stdout when neither is given.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    format: Option<OutputFormat>,
    #[arg(long)]
    seed: Option<u64>,
    /// NAME=VALUE, repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    #[arg(long)]
    kappa: Option<f64>,
}

#[derive(Args)]
struct PointArgs {
    /// e.g. `robertson_walker:n=4,k=0,q=power(0.5)`.
    #[arg(long)]
    metric: String,
    /// Comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CurvatureArgs {
    #[command(flatten)]
    at: PointArgs,
    /// Jet order, 2 to 4.
    #[arg(long, default_value_t = 3)]
    order: usize,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    at: PointArgs,
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
}

fn emit(text: &str, path: Option<&PathBuf>) -> Result<(), CliError> {
    match path {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verify(args: VerifyArgs) -> Result<u8, CliError> {
    let mut config = RunConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(kappa) = args.kappa {
        if !(kappa.is_finite() && kappa != 0.0) {
            return Err(CliError::Invalid {
                field: "--kappa".into(),
                message: "must be finite and non-zero".into(),
            });
        }
        config.kappa = kappa;
    }
    for t in &args.tol {
        config.override_tolerance(t)?;
    }
    if let Some(f) = args.format {
        config.output_format = f;
    }
    let output = args.output.or_else(|| config.output_path.clone());
    let report = runner::run(&config);
    let text = match config.output_format {
        OutputFormat::Json => report.to_json(),
        OutputFormat::Csv => report.to_csv(),
    };
    emit(&text, output.as_ref())?;
    let s = &report.summary;
    eprintln!(
        "{} checks: {} pass, {} fail, {} error, {} not applicable, {} exploratory",
        s.checks, s.pass, s.fail, s.error, s.not_applicable, s.exploratory
    );
    Ok(report.exit_code())
}

fn tolerances(overrides: &[String]) -> Result<Tolerances, CliError> {
    let mut tol = Tolerances::default();
    for t in overrides {
        let (name, value) = parse_tolerance(t)?;
        tol.set(&name, value)?;
    }
    Ok(tol)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(args) => verify(args),
        Command::Curvature(args) => (|| {
            let spec = parse_metric(&args.at.metric)?;
            let p = parse_point(&args.at.point)?;
            let v = curvature_dump(&spec, &p, args.order)?;
            emit(&json::to_string(&v), args.at.output.as_ref()).map(|_| 0)
        })(),
        Command::FitRecurrence(args) => (|| {
            let spec = parse_metric(&args.at.metric)?;
            let p = parse_point(&args.at.point)?;
            let v = fit_dump(&spec, &p, &tolerances(&args.tol)?)?;
            emit(&json::to_string(&v), args.at.output.as_ref()).map(|_| 0)
        })(),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
