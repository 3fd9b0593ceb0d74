//! `ss`: spectral sequences, Lefschetz structures and degeneration certificates from the command line.
//!
//! Exit codes: 0 success, 2 certificate not issued, 3 parse or usage error,
//! 4 invariant or precondition violation, 5 internal oracle mismatch.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use ss_core::fuzz::{self, FuzzConfig, Suite};
use ss_core::geometry::{self, build_model, d2_from_alpha, ext_dimensions, ModelKind};
use ss_core::io;
use ss_core::lefschetz::{degeneration_certify, CertifyOptions};
use ss_core::spectral::{abutment_report, decalage_compare, oracle_compare, SpectralSequence};
use ss_core::{Error, ErrorKind, FilteredComplex};

const EXIT_NOT_CERTIFIED: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_INVARIANT: u8 = 4;
const EXIT_INTERNAL: u8 = 5;

#[derive(Parser, Debug)]
#[command(name = "ss", version, about = "Exact spectral sequences, Lefschetz structures and degeneration certificates")]
struct Cli {
    /// Emit JSON (the only supported format; accepted for explicitness).
    #[arg(long, global = true)]
    json: bool,

    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Bound on worker threads.
    #[arg(long, env = "SS_THREADS", global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pages E_1..E_R of a filtered complex and the E_∞ comparison with H^*.
    Compute {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 4)]
        pages: usize,
        /// Include the differentials d_r in the output.
        #[arg(long)]
        with_maps: bool,
    },
    /// Iterated pages against the direct cycle/boundary formula.
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 6)]
        pages: usize,
    },
    /// E_r(Dec F) against E_{r+1}(F) after renumbering.
    Decalage {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 3)]
        pages: usize,
    },
    /// Step-by-step degeneration certificate for a derivation on a polarized algebra.
    Certify {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        derivation: PathBuf,
        /// Add a step checking d ∘ d = 0.
        #[arg(long)]
        require_square_zero: bool,
    },
    /// Build a model E_2 algebra.
    Model {
        #[command(subcommand)]
        kind: ModelCommand,
    },
    /// Ext dimensions from a model, assuming degeneration at E_2.
    ExtDims {
        #[arg(long)]
        model: PathBuf,
        /// Request the non-degenerate case (not supported).
        #[arg(long)]
        non_degenerate: bool,
    },
    /// The d_2 derivation induced by an obstruction datum.
    D2 {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        alpha: PathBuf,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        scale: String,
    },
    /// Seeded randomized invariant suites.
    Fuzz(FuzzArgs),
}

#[derive(Subcommand, Debug)]
enum ModelCommand {
    Torus {
        #[arg(long)]
        n: usize,
    },
    Pn {
        #[arg(long)]
        n: usize,
    },
    Product {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
}

#[derive(Args, Debug)]
struct FuzzArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    cases: u64,
    /// complexes, derivations or all.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 6)]
    max_page: usize,
    #[arg(long, default_value_t = 8)]
    max_dim: usize,
    #[arg(long, default_value_t = 4)]
    max_width: usize,
    #[arg(long, default_value_t = -4, allow_hyphen_values = true)]
    min_degree: i64,
    #[arg(long, default_value_t = 4)]
    max_degree: i64,
}

/// Successful result plus the exit code it carries.
struct Output {
    value: Value,
    code: u8,
}

impl Output {
    fn ok(value: Value) -> Self {
        Output { value, code: 0 }
    }
}

fn read_json(path: &Path) -> Result<Value, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse {
        location: path.display().to_string(),
        message: format!("cannot read file: {e}"),
    })?;
    io::parse_json(&text).map_err(|e| match e {
        Error::Parse { location, message } => Error::Parse {
            location: format!("{}: {location}", path.display()),
            message,
        },
        other => other,
    })
}

/// Prefixes the file name to JSON-path parse errors.
fn in_file<T>(path: &Path, r: Result<T, Error>) -> Result<T, Error> {
    r.map_err(|e| match e {
        Error::Parse { location, message } => Error::Parse {
            location: format!("{}: {location}", path.display()),
            message,
        },
        other => other,
    })
}

fn read_complex(path: &Path) -> Result<FilteredComplex, Error> {
    let v = read_json(path)?;
    in_file(path, io::filtered_complex_from_json(&v))
}

fn compute(input: &Path, pages: usize, with_maps: bool) -> Result<Output, Error> {
    let fk = read_complex(input)?;
    let mut ss = SpectralSequence::new(fk)?;
    let mut dims = Map::new();
    let mut maps = Map::new();
    for r in 1..=pages.max(1) {
        let page = ss.page(r)?;
        dims.insert(r.to_string(), io::page_dims_json(page));
        if with_maps {
            maps.insert(r.to_string(), io::page_maps_json(page));
        }
    }
    let report = abutment_report(&mut ss)?;
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|r| json!({"degree": r.degree, "e_infinity": r.e_infinity, "cohomology": r.cohomology}))
        .collect();
    let e_inf: Map<String, Value> = report
        .e_infinity
        .iter()
        .map(|(&c, &d)| (io::cell_key(c), json!(d)))
        .collect();
    let mut out = json!({
        "pages": dims,
        "abutment": {
            "stable_page": report.stable_page,
            "e_infinity": e_inf,
            "degrees": rows,
            "pass": true,
        },
    });
    if with_maps {
        out["maps"] = Value::Object(maps);
    }
    Ok(Output::ok(out))
}

fn oracle(input: &Path, pages: usize) -> Result<Output, Error> {
    let fk = read_complex(input)?;
    let rows = oracle_compare(&fk, pages.max(1))?;
    let mismatches: Vec<Value> = rows
        .iter()
        .filter(|r| r.iterated != r.direct)
        .map(|r| json!({"r": r.r, "cell": io::cell_key(r.cell), "iterated": r.iterated, "direct": r.direct}))
        .collect();
    let table: Vec<Value> = rows
        .iter()
        .map(|r| json!({"r": r.r, "cell": io::cell_key(r.cell), "iterated": r.iterated, "direct": r.direct}))
        .collect();
    let code = if mismatches.is_empty() { 0 } else { EXIT_INTERNAL };
    Ok(Output {
        value: json!({"pages": pages, "rows": table, "mismatches": mismatches, "pass": code == 0}),
        code,
    })
}

fn decalage(input: &Path, pages: usize) -> Result<Output, Error> {
    let fk = read_complex(input)?;
    let rows = decalage_compare(&fk, pages.max(1))?;
    let table: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "r": r.r,
                "decalage_cell": io::cell_key(r.cell),
                "decalage_dim": r.decalage_dim,
                "original_page": r.r + 1,
                "original_cell": io::cell_key(r.original_cell),
                "original_dim": r.original_dim,
                "agrees": r.agrees(),
            })
        })
        .collect();
    let pass = rows.iter().all(|r| r.agrees());
    Ok(Output {
        value: json!({"pages": pages, "rows": table, "pass": pass}),
        code: if pass { 0 } else { EXIT_INTERNAL },
    })
}

fn certify(algebra: &Path, derivation: &Path, require_square_zero: bool) -> Result<Output, Error> {
    let file = in_file(algebra, io::algebra_from_json(&read_json(algebra)?))?;
    let pa = in_file(algebra, file.polarized())?;
    let d = in_file(derivation, io::derivation_from_json(&file, &read_json(derivation)?))?;
    let cert = degeneration_certify(&pa, &d, CertifyOptions { require_square_zero })?;
    let code = if cert.is_certified() { 0 } else { EXIT_NOT_CERTIFIED };
    let value = serde_json::to_value(&cert).map_err(|e| Error::Internal(e.to_string()))?;
    Ok(Output { value, code })
}

fn read_model(path: &Path) -> Result<geometry::VarietyModel, Error> {
    in_file(path, io::model_from_json(&read_json(path)?))
}

fn model(kind: &ModelCommand) -> Result<Output, Error> {
    let m = match kind {
        ModelCommand::Torus { n } => build_model(&ModelKind::Torus(*n))?,
        ModelCommand::Pn { n } => build_model(&ModelKind::ProjectiveSpace(*n))?,
        ModelCommand::Product { a, b } => geometry::product(&read_model(a)?, &read_model(b)?)?,
    };
    Ok(Output::ok(io::model_to_json(&m)))
}

fn ext_dims(path: &Path, non_degenerate: bool) -> Result<Output, Error> {
    let m = read_model(path)?;
    let dims = ext_dimensions(&m, !non_degenerate)?;
    let total: usize = dims.iter().sum();
    Ok(Output::ok(json!({"model": m.name(), "ext_dimensions": dims, "total": total})))
}

fn d2(model_path: &Path, alpha: &Path, scale: &str) -> Result<Output, Error> {
    let m = read_model(model_path)?;
    let s = io::scalar_from_json(&Value::String(scale.to_string()), "--scale")?;
    let datum = in_file(alpha, io::alpha_from_json(&m, &read_json(alpha)?, s))?;
    let d = d2_from_alpha(&m, &datum)?;
    Ok(Output::ok(io::derivation_to_json(m.algebra().algebra(), &d)))
}

fn run_fuzz(args: &FuzzArgs) -> Result<Output, Error> {
    let suite = match args.suite.as_str() {
        "complexes" => Suite::Complexes,
        "derivations" => Suite::Derivations,
        "all" => Suite::All,
        other => {
            return Err(Error::Parse {
                location: "--suite".into(),
                message: format!("\"{other}\" is not one of complexes, derivations, all"),
            })
        }
    };
    if args.max_dim == 0 || args.max_width == 0 || args.max_page == 0 || args.min_degree > args.max_degree {
        return Err(Error::Precondition(
            "fuzz bounds must be positive and min_degree ≤ max_degree".into(),
        ));
    }
    let mut config = FuzzConfig::new(args.seed, args.cases);
    config.suite = suite;
    config.max_page = args.max_page;
    config.bounds.max_dim = args.max_dim;
    config.bounds.max_width = args.max_width;
    config.bounds.min_degree = args.min_degree;
    config.bounds.max_degree = args.max_degree;
    let report = fuzz::run(&config);
    let checks: u64 = report.checks.values().map(|t| t.passed + t.failed).sum();
    let found = report.counterexamples.len();
    let mut value = serde_json::to_value(&report).map_err(|e| Error::Internal(e.to_string()))?;
    value["config"] = serde_json::to_value(&config).map_err(|e| Error::Internal(e.to_string()))?;
    value["summary"] = json!(format!("{found} counterexamples across {checks} checks"));
    Ok(Output {
        value,
        code: if found == 0 { 0 } else { EXIT_INTERNAL },
    })
}

fn dispatch(cli: &Cli) -> Result<Output, Error> {
    match &cli.command {
        Command::Compute { input, pages, with_maps } => compute(input, *pages, *with_maps),
        Command::Oracle { input, pages } => oracle(input, *pages),
        Command::Decalage { input, pages } => decalage(input, *pages),
        Command::Certify {
            algebra,
            derivation,
            require_square_zero,
        } => certify(algebra, derivation, *require_square_zero),
        Command::Model { kind } => model(kind),
        Command::ExtDims { model, non_degenerate } => ext_dims(model, *non_degenerate),
        Command::D2 { model, alpha, scale } => d2(model, alpha, scale),
        Command::Fuzz(args) => run_fuzz(args),
    }
}

fn error_json(e: &Error) -> Value {
    let kind = match e.kind() {
        ErrorKind::Parse => "parse",
        ErrorKind::Invariant => "invariant",
        ErrorKind::Unsupported => "unsupported",
        ErrorKind::Internal => "internal",
    };
    let mut body = json!({"kind": kind, "message": e.to_string()});
    if let Error::Parse { location, .. } = e {
        body["location"] = json!(location);
    }
    json!({ "error": body })
}

fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        ErrorKind::Parse => EXIT_PARSE,
        ErrorKind::Invariant | ErrorKind::Unsupported => EXIT_INVARIANT,
        ErrorKind::Internal => EXIT_INTERNAL,
    }
}

fn emit(value: &Value, out: Option<&Path>) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Internal(e.to_string()))? + "\n";
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Parse {
            location: path.display().to_string(),
            message: format!("cannot write file: {e}"),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("{}", error_json(&Error::Parse {
                location: "SS_THREADS".into(),
                message: "thread count must be positive".into(),
            }));
            return ExitCode::from(EXIT_PARSE);
        }
        // the global pool can only be configured once; a second attempt is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let result = dispatch(&cli).and_then(|o| emit(&o.value, cli.out.as_deref()).map(|_| o.code));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", serde_json::to_string_pretty(&error_json(&e)).unwrap_or_default());
            ExitCode::from(exit_code(&e))
        }
    }
}
