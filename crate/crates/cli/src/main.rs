//! `qlab` — property checks, α* estimation and lemma harnesses for
//! extended-real functions, from the command line.
//!
//! Exit codes: 0 all checks satisfied / all inequalities hold, 2 some
//! property violated (a witness is in the report), 3 inconclusive results
//! only, 1 usage or configuration error.

use clap::{Args, Parser, Subcommand};
use qlab_core::checks::AlphaMethod;
use qlab_core::geometry::{BoxDomain, SamplePlan};
use qlab_core::report::{
    run_suite, FunctionSource, OutcomeClass, PropertyCheck, Report, RobustCheckKind, RunConfig,
    Task,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qlab", version, about = "Quasiconvexity verification laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Function selection and sampling flags shared by every subcommand.
#[derive(Args, Debug)]
struct CommonArgs {
    /// Catalog function name (see `qlab catalog list`).
    #[arg(long = "fn", value_name = "NAME", conflicts_with = "expr")]
    function: Option<String>,

    /// Expression over x1..xN, e.g. "2*x1 + sin(x1)".
    #[arg(long, value_name = "TEXT", requires = "dim")]
    expr: Option<String>,

    /// Number of variables of --expr.
    #[arg(long, value_name = "N")]
    dim: Option<usize>,

    /// Scan box "lo..hi[,lo..hi...]", one interval per coordinate.
    #[arg(long, value_name = "BOX", allow_hyphen_values = true)]
    r#box: Option<String>,

    /// Sampling seed; defaults to $QLAB_SEED or 42.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,

    /// Scan points per box.
    #[arg(long, value_name = "N")]
    samples: Option<usize>,

    /// Write the JSON report here (plus a .tsv plot trace for 1-D runs).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run property checkers.
    Check {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated: quasiconvex, cond-b, quasimonotone, lsc,
        /// robust-primal, robust-cond-b, robust-pairs.
        #[arg(long, value_delimiter = ',', default_values_t = [
            String::from("quasiconvex"),
            String::from("cond-b"),
            String::from("quasimonotone"),
        ])]
        checks: Vec<String>,
        /// Robustness level for the robust-* checks.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
    },
    /// Bracket the robustness modulus α*.
    AlphaStar {
        #[command(flatten)]
        common: CommonArgs,
        /// primal | dual-b | pairs (comma-separated for several).
        #[arg(long, value_delimiter = ',', default_values_t = [String::from("primal")])]
        method: Vec<String>,
        #[arg(long, default_value_t = 8.0)]
        cap: f64,
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
    },
    /// Mean value theorem harness on the segment [a, b].
    Mvt {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_name = "POINT", allow_hyphen_values = true)]
        a: String,
        #[arg(long, value_name = "POINT", allow_hyphen_values = true)]
        b: String,
    },
    /// Constructive lemma harnesses.
    Lemma {
        #[command(subcommand)]
        which: LemmaCommand,
    },
    /// Catalog inspection.
    Catalog {
        #[command(subcommand)]
        which: CatalogCommand,
    },
}

#[derive(Subcommand)]
enum LemmaCommand {
    /// Find (x, x*) in B_lambda([u,v]) with positive product toward w.
    ThreePoints {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        #[arg(long, default_value_t = 0.1)]
        lambda: f64,
    },
    /// Peak-point construction for a non-quasiconvex perturbation.
    Tuacuctri {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, allow_hyphen_values = true)]
        vstar: String,
    },
    /// Four-term value chain under a perturbation peak.
    Bode2 {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, allow_hyphen_values = true)]
        vstar: String,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Radial limit of φ along v + t(u−v) as t ↓ 0.
    RadialLimit {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
    },
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// One line per registered function: name, dim, labels, provenance.
    List,
}

fn usage_error(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(1)
}

fn parse_point(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad coordinate {part:?}: {e}"))
        })
        .collect()
}

fn parse_box(text: &str) -> Result<BoxDomain, String> {
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for part in text.split(',') {
        let (l, h) = part
            .split_once("..")
            .ok_or_else(|| format!("bad interval {part:?}, expected lo..hi"))?;
        lo.push(l.trim().parse::<f64>().map_err(|e| format!("{part:?}: {e}"))?);
        hi.push(h.trim().parse::<f64>().map_err(|e| format!("{part:?}: {e}"))?);
    }
    BoxDomain::new(lo, hi).map_err(|e| e.to_string())
}

fn build_config(common: &CommonArgs, tasks: Vec<Task>) -> Result<RunConfig, String> {
    let source = match (&common.function, &common.expr) {
        (Some(name), None) => FunctionSource::Catalog { name: name.clone() },
        (None, Some(text)) => FunctionSource::Expression {
            text: text.clone(),
            dim: common.dim.ok_or("--expr requires --dim")?,
        },
        (None, None) => return Err("choose a function: --fn NAME or --expr TEXT --dim N".into()),
        (Some(_), Some(_)) => return Err("--fn and --expr are mutually exclusive".into()),
    };
    let scan_box = common.r#box.as_deref().map(parse_box).transpose()?;
    let seed = common
        .seed
        .or_else(|| std::env::var("QLAB_SEED").ok()?.parse().ok())
        .unwrap_or(42);
    let mut plan = SamplePlan::with_seed(seed);
    if let Some(samples) = common.samples {
        plan.points_per_box = samples;
    }
    Ok(RunConfig {
        source,
        scan_box,
        plan,
        tasks,
    })
}

fn parse_checks(names: &[String], alpha: Option<f64>) -> Result<Vec<Task>, String> {
    names
        .iter()
        .map(|name| {
            let robust = |kind: RobustCheckKind| -> Result<Task, String> {
                Ok(Task::RobustCheck {
                    which: kind,
                    alpha: alpha.ok_or_else(|| format!("check {name:?} requires --alpha"))?,
                })
            };
            match name.as_str() {
                "quasiconvex" => Ok(Task::Check {
                    which: PropertyCheck::Quasiconvex,
                }),
                "cond-b" => Ok(Task::Check {
                    which: PropertyCheck::CondB,
                }),
                "quasimonotone" => Ok(Task::Check {
                    which: PropertyCheck::Quasimonotone,
                }),
                "lsc" => Ok(Task::Check {
                    which: PropertyCheck::Lsc,
                }),
                "robust-primal" => robust(RobustCheckKind::RobustPrimal),
                "robust-cond-b" => robust(RobustCheckKind::RobustCondB),
                "robust-pairs" => robust(RobustCheckKind::RobustPairs),
                other => Err(format!("unknown check {other:?}")),
            }
        })
        .collect()
}

fn parse_methods(names: &[String]) -> Result<Vec<AlphaMethod>, String> {
    names
        .iter()
        .map(|name| match name.as_str() {
            "primal" => Ok(AlphaMethod::Primal),
            "dual-b" | "dualb" => Ok(AlphaMethod::DualB),
            "pairs" => Ok(AlphaMethod::Pairs),
            other => Err(format!("unknown method {other:?}")),
        })
        .collect()
}

fn emit(report: &Report, out: &Option<PathBuf>) -> Result<(), String> {
    for (result, ms) in report.results.iter().zip(&report.timings_ms) {
        let status = match result.class {
            OutcomeClass::Pass => "ok",
            OutcomeClass::Violation => "VIOLATED",
            OutcomeClass::Inconclusive => "inconclusive",
        };
        eprintln!("{:<28} {:<13} ({ms:.1} ms)", result.label, status);
    }
    match out {
        Some(path) => {
            std::fs::write(path, report.to_json()).map_err(|e| format!("{}: {e}", path.display()))?;
            if let Some(tsv) = report.plot_tsv() {
                let tsv_path = path.with_extension("tsv");
                std::fs::write(&tsv_path, tsv)
                    .map_err(|e| format!("{}: {e}", tsv_path.display()))?;
            }
            eprintln!("report written to {}", path.display());
        }
        None => println!("{}", report.to_json()),
    }
    Ok(())
}

fn execute(common: &CommonArgs, tasks: Vec<Task>) -> ExitCode {
    let config = match build_config(common, tasks) {
        Ok(c) => c,
        Err(m) => return usage_error(m),
    };
    match run_suite(&config) {
        Ok(report) => {
            if let Err(m) = emit(&report, &common.out) {
                return usage_error(m);
            }
            ExitCode::from(report.exit_code as u8)
        }
        Err(e) => usage_error(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check {
            common,
            checks,
            alpha,
        } => match parse_checks(&checks, alpha) {
            Ok(tasks) => execute(&common, tasks),
            Err(m) => usage_error(m),
        },
        Command::AlphaStar {
            common,
            method,
            cap,
            tol,
        } => match parse_methods(&method) {
            Ok(methods) => execute(
                &common,
                methods
                    .into_iter()
                    .map(|m| Task::AlphaStar {
                        method: m,
                        cap,
                        tol,
                    })
                    .collect(),
            ),
            Err(m) => usage_error(m),
        },
        Command::Mvt { common, a, b } => {
            let task = match (parse_point(&a), parse_point(&b)) {
                (Ok(a), Ok(b)) => Task::Mvt { a, b },
                (Err(m), _) | (_, Err(m)) => return usage_error(m),
            };
            execute(&common, vec![task])
        }
        Command::Lemma { which } => {
            let (common, task) = match which {
                LemmaCommand::ThreePoints {
                    common,
                    u,
                    v,
                    w,
                    lambda,
                } => {
                    match (parse_point(&u), parse_point(&v), parse_point(&w)) {
                        (Ok(u), Ok(v), Ok(w)) => (common, Task::ThreePoints { u, v, w, lambda }),
                        (Err(m), ..) | (_, Err(m), _) | (.., Err(m)) => return usage_error(m),
                    }
                }
                LemmaCommand::Tuacuctri { common, vstar } => match parse_point(&vstar) {
                    Ok(v_star) => (common, Task::Tuacuctri { v_star }),
                    Err(m) => return usage_error(m),
                },
                LemmaCommand::Bode2 {
                    common,
                    vstar,
                    u,
                    v,
                    w,
                    z,
                } => {
                    let parsed = (
                        parse_point(&vstar),
                        parse_point(&u),
                        parse_point(&v),
                        parse_point(&w),
                        parse_point(&z),
                    );
                    match parsed {
                        (Ok(v_star), Ok(u), Ok(v), Ok(w), Ok(z)) => {
                            (common, Task::Bode2 { v_star, u, v, w, z })
                        }
                        (Err(m), ..)
                        | (_, Err(m), ..)
                        | (_, _, Err(m), _, _)
                        | (_, _, _, Err(m), _)
                        | (.., Err(m)) => return usage_error(m),
                    }
                }
                LemmaCommand::RadialLimit { common, u, v } => {
                    match (parse_point(&u), parse_point(&v)) {
                        (Ok(u), Ok(v)) => (common, Task::RadialLimit { u, v }),
                        (Err(m), _) | (_, Err(m)) => return usage_error(m),
                    }
                }
            };
            execute(&common, vec![task])
        }
        Command::Catalog { which } => match which {
            CatalogCommand::List => {
                print!("{}", qlab_core::catalog::listing());
                ExitCode::from(0)
            }
        },
    }
}
