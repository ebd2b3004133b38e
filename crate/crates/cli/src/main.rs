//! `curv`: JSON front end for the curvature library.
//!
//! Exit codes: 0 success, 1 data error, 2 usage error, 3 verification failure.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use curvature::chart::Connection;
use curvature::decompose::{a_decompose, singer_thorpe, w_decompose, Mode};
use curvature::io;
use curvature::sampling::{default_samples, empirical_dimension_seeded, sample, SampleSpec, SpaceTag};
use curvature::verify::{check_names, run_invariant_suite, SuiteConfig};
use curvature::Error;

#[derive(Parser)]
#[command(name = "curv", version, about = "Curvature tensor decompositions, sampling and chart checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Report {
    Curvature,
    Triple,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a tensor document into W-, A- or Singer-Thorpe components.
    Decompose {
        #[arg(long, value_parser = parse_mode)]
        mode: Mode,
        #[arg(long)]
        input: PathBuf,
        /// Write the document here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Draw one seeded element of a space.
    Sample {
        #[arg(long, value_parser = parse_tag)]
        space: SpaceTag,
        #[arg(long)]
        dim: usize,
        #[arg(long, value_parser = parse_signature)]
        signature: (usize, usize),
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Empirical dimensions of every named space against the formulas.
    Dims {
        #[arg(long)]
        dim: usize,
        #[arg(long, value_parser = parse_signature)]
        signature: (usize, usize),
        /// Samples per space (default: twice the formula dimension plus 8).
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the invariant suite, or one named check of it.
    Verify {
        #[arg(long)]
        suite: Option<String>,
        /// Without --dim, runs n = 3 and 4.
        #[arg(long)]
        dim: Option<usize>,
        /// Without --signature, runs (n,0) and (n-1,1).
        #[arg(long, value_parser = parse_signature, requires = "dim")]
        signature: Option<(usize, usize)>,
        #[arg(long, default_value_t = 32)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Curvature of a polynomial chart at a point.
    Chart {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, value_enum, default_value_t = Report::Curvature)]
        report: Report,
    },
}

fn parse_signature(s: &str) -> Result<(usize, usize), String> {
    let (p, q) = s.split_once(',').ok_or("expected P,Q")?;
    let p = p.trim().parse().map_err(|_| format!("bad P in `{s}`"))?;
    let q = q.trim().parse().map_err(|_| format!("bad Q in `{s}`"))?;
    Ok((p, q))
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|_| format!("expected one of w, a, st; got `{s}`"))
}

fn parse_tag(s: &str) -> Result<SpaceTag, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Outcome {
    Ok,
    VerificationFailed,
}

fn emit(v: &Value) {
    println!("{}", io::to_pretty(v));
}

fn run(command: Command) -> Result<Outcome, Error> {
    match command {
        Command::Decompose { mode, input, output } => {
            let (r, g) = io::parse_tensor(&read(&input)?)?;
            let res = match mode {
                Mode::W => w_decompose(&r, &g)?,
                Mode::A => a_decompose(&r, &g)?,
                Mode::SingerThorpe => singer_thorpe(&r, &g)?,
            };
            let doc = io::decomposition_document(&res, &g);
            match output {
                Some(path) => fs::write(&path, io::to_pretty(&doc) + "\n").map_err(|e| io_error(&path, e))?,
                None => emit(&doc),
            }
        }
        Command::Sample {
            space,
            dim,
            signature,
            seed,
        } => {
            let r = sample(&SampleSpec {
                space,
                dim,
                signature,
                seed,
            })?;
            let g = curvature::ScalarProduct::standard(signature.0, signature.1)?;
            emit(&io::TensorDocument::new(&r, &g).to_value());
        }
        Command::Dims {
            dim,
            signature,
            samples,
            seed,
        } => {
            let mut reports = Vec::new();
            for tag in SpaceTag::all() {
                let k = samples.unwrap_or_else(|| default_samples(tag, dim));
                let rep = empirical_dimension_seeded(tag, dim, signature, k, seed)?;
                let mut v = serde_json::to_value(&rep)?;
                v["matches_formula"] = json!(rep.formula_dim == Some(rep.empirical_dim));
                reports.push(v);
            }
            emit(&json!({
                "dim": dim,
                "signature": [signature.0, signature.1],
                "seed": seed,
                "reports": reports,
            }));
        }
        Command::Verify {
            suite,
            dim,
            signature,
            samples,
            seed,
            tol,
        } => {
            let config = match (dim, signature) {
                (Some(n), Some(sig)) => SuiteConfig::single(n, sig, samples, seed, tol),
                (Some(n), None) => SuiteConfig::for_dims(&[n], samples, seed, tol),
                (None, _) => SuiteConfig::for_dims(&[3, 4], samples, seed, tol),
            };
            for case in &config.cases {
                if case.dim < 3 {
                    return Err(Error::DimensionTooSmall(case.dim));
                }
                if case.signature.0 + case.signature.1 != case.dim {
                    return Err(Error::DimensionMismatch {
                        expected: case.dim,
                        found: case.signature.0 + case.signature.1,
                    });
                }
            }
            let report = run_invariant_suite(&config, suite.as_deref())?;
            println!("{}", report.to_json());
            if !report.all_passed() {
                eprintln!("failed checks: {}", report.failures().join(", "));
                return Ok(Outcome::VerificationFailed);
            }
        }
        Command::Chart { input, point, report } => {
            let chart = io::parse_chart(&read(&input)?)?;
            let x = io::parse_point(&point)?;
            match report {
                Report::Curvature => {
                    let g = curvature::ScalarProduct::new(chart.metric_at(&x)?)
                        .map_err(|_| Error::DegenerateAtPoint { det: 0.0 })?;
                    let lc = chart.curvature_at(&x, Connection::LeviCivita)?;
                    let nabla = chart.curvature_at(&x, Connection::Nabla)?;
                    let star = chart.curvature_at(&x, Connection::NablaStar)?;
                    emit(&io::curvature_document(
                        &x,
                        &g,
                        &[("levi_civita", &lc), ("nabla", &nabla), ("nabla_star", &star)],
                    ));
                }
                Report::Triple => emit(&io::triple_document(&chart.conjugate_triple_report(&x)?)?),
            }
        }
    }
    Ok(Outcome::Ok)
}

fn read(path: &PathBuf) -> Result<Vec<u8>, Error> {
    fs::read(path).map_err(|e| io_error(path, e))
}

fn io_error(path: &std::path::Path, e: std::io::Error) -> Error {
    Error::Schema {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Verify { suite: Some(name), .. } = &cli.command {
        if !check_names().contains(&name.as_str()) {
            Cli::command()
                .error(
                    ErrorKind::InvalidValue,
                    format!("unknown suite `{name}`; known: {}", check_names().join(", ")),
                )
                .exit();
        }
    }
    match run(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
