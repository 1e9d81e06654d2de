//! `gsh`: exact pm-graph invariants, theta numerics, periods and height assembly.
//!
//! Exit codes: 0 success, 1 invalid input or usage, 2 an identity or
//! consistency check failed, 3 a numerical computation failed.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use gsh_core::genus3::{scan_twogon, Genus3Report};
use gsh_core::heights::{
    assemble, conjecture_report, graph_autofill, kappa_sweep, HeightError, PlaceTable,
};
use gsh_core::periods::{
    curve_from_kappa, curve_from_n, hyperelliptic_reference, small_period_matrix, PeriodError, PeriodParams,
};
use gsh_core::rational::{format_rational, parse_rational, to_f64};
use gsh_core::siegel::{
    chi18_tilde, even_characteristics, hodge_norm_chi18_prime, theta_null, EvalParams, OmegaFile, SiegelError,
    SiegelPoint,
};
use gsh_core::{InvariantReport, PmGraph};
use num_complex::Complex64;
use serde_json::json;

#[derive(Parser)]
#[command(name = "gsh", version, about = "Gross-Schoen height toolkit for genus-three curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Polarized metrized graphs.
    #[command(subcommand)]
    Graph(GraphCommand),
    /// Theta constants and the modular form chi_18.
    #[command(subcommand)]
    Theta(ThetaCommand),
    /// Period matrices of y^4 = x(x-1)(x-kappa) and of y^2 = x^8 - 1.
    Periods(PeriodsArgs),
    /// Height identities over place tables.
    #[command(subcommand)]
    Height(HeightCommand),
}

#[derive(Subcommand)]
enum GraphCommand {
    Validate { file: PathBuf },
    /// Split into wedge components (blocks with contracted complements).
    Decompose { file: PathBuf },
    Invariants {
        file: PathBuf,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
    },
    Genus3 { file: PathBuf },
    /// CSV of the two-gon local bound B and its positivity witness.
    ScanTwogon {
        #[arg(long, default_value_t = 200)]
        m_max: u64,
    },
}

#[derive(Subcommand)]
enum ThetaCommand {
    /// All even theta constants, and chi~_18 in genus three.
    Eval {
        #[arg(long)]
        omega: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    NormChi18 {
        #[arg(long)]
        omega: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct CurveChoice {
    /// Cross ratio, e.g. 1/2 or -0.25.
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<String>,
    /// Uses kappa = 1/n.
    #[arg(long, allow_hyphen_values = true)]
    n: Option<String>,
    #[arg(long)]
    hyperelliptic_ref: bool,
}

#[derive(Args)]
struct PeriodsArgs {
    #[command(flatten)]
    curve: CurveChoice,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
}

#[derive(Subcommand)]
enum HeightCommand {
    /// Gross-Schoen height and the identity checks a place table allows.
    Assemble {
        #[arg(long)]
        places: PathBuf,
    },
    /// F(n) = -(1/18) log ||chi'_18||(C_n) for a list of n.
    Sweep {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lower bounds for the admissible self-intersection.
    Report {
        #[arg(long)]
        places: PathBuf,
    },
}

enum Failure {
    Input(anyhow::Error),
    Inconsistent(String),
    Numeric(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn siegel_failure(e: SiegelError) -> Failure {
    match e {
        SiegelError::TruncationRadiusExceeded { .. } | SiegelError::SingularDenominator => Failure::Numeric(e.into()),
        other => Failure::Input(other.into()),
    }
}

fn period_failure(e: PeriodError) -> Failure {
    match e {
        PeriodError::DegenerateParameter(_) | PeriodError::UnsupportedCurve(_) | PeriodError::CoincidentBranchPoints(..) => {
            Failure::Input(e.into())
        }
        PeriodError::Siegel(s) => siegel_failure(s),
        other => Failure::Numeric(other.into()),
    }
}

fn height_failure(e: HeightError) -> Failure {
    match e {
        HeightError::FieldConflict { .. } => Failure::Inconsistent(e.to_string()),
        HeightError::Siegel(s) => siegel_failure(s),
        HeightError::Period(p) => period_failure(p),
        other => Failure::Input(other.into()),
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_or_print(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            emit(text);
            Ok(())
        }
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn print_json(value: &impl serde::Serialize) {
    emit(&(serde_json::to_string_pretty(value).expect("serializable output") + "\n"));
}

fn load_graph(path: &Path) -> anyhow::Result<PmGraph> {
    Ok(PmGraph::from_json(&read(path)?)?)
}

fn load_omega(path: &Path) -> Result<SiegelPoint, Failure> {
    let text = read(path)?;
    let file: OmegaFile = serde_json::from_str(&text).map_err(|e| Failure::Input(anyhow!("{}: {e}", path.display())))?;
    file.to_point().map_err(|e| Failure::Input(e.into()))
}

fn eval_params(tol: f64) -> Result<EvalParams, Failure> {
    let p = EvalParams::with_tol(tol);
    p.validate().map_err(|e| Failure::Input(e.into()))?;
    Ok(p)
}

fn parse_real(text: &str) -> anyhow::Result<f64> {
    match parse_rational(text) {
        Ok(r) => Ok(to_f64(&r)),
        Err(_) => text.trim().parse::<f64>().map_err(|_| anyhow!("not a number: {text}")),
    }
}

fn graph(cmd: GraphCommand) -> Outcome {
    match cmd {
        GraphCommand::Validate { file } => {
            let g = load_graph(&file)?;
            print_json(&json!({
                "valid": true,
                "genus": g.genus(),
                "vertices": g.vertices().len(),
                "edges": g.edges().len(),
                "total_length": format_rational(&g.total_length()),
                "has_eliminable_vertices": g.has_eliminable_vertices(),
            }));
            Ok(())
        }
        GraphCommand::Decompose { file } => {
            let g = load_graph(&file)?;
            let parts: Vec<_> = g
                .wedge_decompose()
                .into_iter()
                .map(|c| json!({"genus": c.genus(), "graph": c}))
                .collect();
            print_json(&parts);
            Ok(())
        }
        GraphCommand::Invariants { file, csv, .. } => {
            let g = load_graph(&file)?;
            let report = InvariantReport::compute(&g);
            if csv {
                emit(&format!("{}\n{}\n", InvariantReport::CSV_HEADER, report.to_csv_row()));
            } else {
                print_json(&report);
            }
            if !report.is_consistent() {
                return Err(Failure::Inconsistent("invariant identities fail".into()));
            }
            Ok(())
        }
        GraphCommand::Genus3 { file } => {
            let g = load_graph(&file)?;
            let report = Genus3Report::compute(&g).map_err(|e| Failure::Input(e.into()))?;
            print_json(&report);
            Ok(())
        }
        GraphCommand::ScanTwogon { m_max } => {
            let rows = scan_twogon(m_max);
            let mut s = String::from("m1,m2,B,witness\n");
            let mut bad = 0;
            for r in &rows {
                if r.bound <= num_traits::Zero::zero() || r.witness <= num_traits::Zero::zero() {
                    bad += 1;
                }
                writeln!(s, "{},{},{},{}", r.m1, r.m2, format_rational(&r.bound), format_rational(&r.witness)).unwrap();
            }
            emit(&s);
            if bad > 0 {
                return Err(Failure::Inconsistent(format!("{bad} non-positive rows")));
            }
            Ok(())
        }
    }
}

fn theta(cmd: ThetaCommand) -> Outcome {
    match cmd {
        ThetaCommand::Eval { omega, tol } => {
            let point = load_omega(&omega)?;
            let params = eval_params(tol)?;
            let mut constants = Vec::new();
            for ch in even_characteristics(point.genus()) {
                let t = theta_null(&ch, &point, &params).map_err(siegel_failure)?;
                constants.push(json!({"characteristic": ch.to_string(), "re": t.re, "im": t.im}));
            }
            let chi = if point.genus() == 3 {
                let c = chi18_tilde(&point, &params).map_err(siegel_failure)?;
                Some(json!({"re": c.value.re, "im": c.value.im, "log_abs": c.log_abs, "vanishes": c.vanishes}))
            } else {
                None
            };
            print_json(&json!({"g": point.genus(), "theta_constants": constants, "chi18_tilde": chi}));
            Ok(())
        }
        ThetaCommand::NormChi18 { omega, tol } => {
            let point = load_omega(&omega)?;
            let norm = hodge_norm_chi18_prime(&point, &eval_params(tol)?).map_err(siegel_failure)?;
            print_json(&norm);
            Ok(())
        }
    }
}

fn periods(args: PeriodsArgs) -> Outcome {
    let params = PeriodParams {
        tol: args.tol,
        ..Default::default()
    };
    let c = &args.curve;
    let (label, point) = if c.hyperelliptic_ref {
        ("y^2 = x^8 - 1".to_string(), hyperelliptic_reference(&params).map_err(period_failure)?)
    } else {
        let curve = match (&c.kappa, &c.n) {
            (Some(k), _) => curve_from_kappa(Complex64::new(parse_real(k)?, 0.0)),
            (_, Some(n)) => curve_from_n(Complex64::new(parse_real(n)?, 0.0)),
            _ => unreachable!("clap enforces one curve choice"),
        }
        .map_err(period_failure)?;
        let kappa = curve.roots()[2];
        (
            format!("y^4 = x(x-1)(x-kappa), kappa = {}", kappa.re),
            small_period_matrix(&curve, &params).map_err(period_failure)?,
        )
    };
    let file = OmegaFile::from_point(&point);
    let text = serde_json::to_string_pretty(&file).expect("omega serializes") + "\n";
    write_or_print(args.out.as_deref(), &text)?;
    if args.out.is_some() {
        eprintln!("{label}: det Im Omega = {:.12e}", point.det_im());
    }
    Ok(())
}

fn load_places(path: &Path) -> Result<PlaceTable, Failure> {
    let table = PlaceTable::from_json(&read(path)?).map_err(height_failure)?;
    graph_autofill(&table, &EvalParams::default()).map_err(height_failure)
}

fn height(cmd: HeightCommand) -> Outcome {
    match cmd {
        HeightCommand::Assemble { places } => {
            let table = load_places(&places)?;
            let report = assemble(&table).map_err(height_failure)?;
            print_json(&report);
            if !report.consistent {
                return Err(Failure::Inconsistent("place table violates an identity".into()));
            }
            Ok(())
        }
        HeightCommand::Sweep { n, out } => {
            let outcome = kappa_sweep(&n, &EvalParams::default(), &PeriodParams::default());
            write_or_print(out.as_deref(), &outcome.to_csv())?;
            if out.is_some() {
                print_json(&json!({
                    "rows": outcome.rows.len(),
                    "failures": outcome.failures,
                    "f_strictly_increasing": outcome.f_strictly_increasing(),
                    "f_fit": outcome.f_fit,
                    "f_fit_full": outcome.f_fit_full,
                    "det_fit": outcome.det_fit,
                    "fitted_order": outcome.fitted_order,
                    "note": "lambda(C_n) is not computed; F(n) is the computable part only",
                }));
            }
            for f in &outcome.failures {
                eprintln!("n = {}: {}", f.n, f.error);
            }
            if outcome.rows.is_empty() {
                return Err(Failure::Numeric(anyhow!("every sweep row failed")));
            }
            Ok(())
        }
        HeightCommand::Report { places } => {
            let table = load_places(&places)?;
            print_json(&conjecture_report(&table).map_err(height_failure)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => e.exit(),
    };
    let result = match cli.command {
        Command::Graph(c) => graph(c),
        Command::Theta(c) => theta(c),
        Command::Periods(a) => periods(a),
        Command::Height(c) => height(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Inconsistent(msg)) => {
            eprintln!("inconsistent: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("numeric failure: {e:#}");
            ExitCode::from(3)
        }
    }
}
