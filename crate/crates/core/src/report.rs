//! Run configuration, suite orchestration, and serializable reports.
//!
//! A report echoes its full configuration (seed included), so re-running the
//! embedded config reproduces every numeric field byte for byte; only the
//! timestamp and timing fields differ between runs. Use
//! [`Report::normalized_json`] to compare runs.

use crate::catalog::{self, FunctionHandle};
use crate::checks::{
    check_condition_b, check_lsc_sampled, check_quasiconvex_primal, check_quasimonotone,
    check_robust_condition_b, check_robust_pairs, check_robust_primal, estimate_alpha_star,
    AlphaEstimate, AlphaMethod, CheckStatus, CheckVerdict, RobustParams,
};
use crate::exprlang::{parse, ExtReal};
use crate::geometry::{BoxDomain, SamplePlan};
use crate::lemmas::{
    bode2_chain_check, mvt_verify, radial_limit_check, three_points_witness, tuacuctri_construct,
    Bode2Outcome, IneqVerdict, LemmaError, MvtTrace, RadialTrace, RadialVerdict,
    ThreePointsOutcome, TuacuctriTrace,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("config error in `{field}`: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

fn config_error(field: &str, message: impl std::fmt::Display) -> ConfigError {
    ConfigError {
        field: field.to_string(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum FunctionSource {
    Catalog { name: String },
    Expression { text: String, dim: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropertyCheck {
    Quasiconvex,
    CondB,
    Quasimonotone,
    Lsc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RobustCheckKind {
    RobustPrimal,
    RobustCondB,
    RobustPairs,
}

/// One unit of work; a run executes its tasks in declared order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task")]
pub enum Task {
    Check {
        which: PropertyCheck,
    },
    RobustCheck {
        which: RobustCheckKind,
        alpha: f64,
    },
    AlphaStar {
        method: AlphaMethod,
        cap: f64,
        tol: f64,
    },
    Mvt {
        a: Vec<f64>,
        b: Vec<f64>,
    },
    ThreePoints {
        u: Vec<f64>,
        v: Vec<f64>,
        w: Vec<f64>,
        lambda: f64,
    },
    RadialLimit {
        u: Vec<f64>,
        v: Vec<f64>,
    },
    Bode2 {
        v_star: Vec<f64>,
        u: Vec<f64>,
        v: Vec<f64>,
        w: Vec<f64>,
        z: Vec<f64>,
    },
    Tuacuctri {
        v_star: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub source: FunctionSource,
    /// Scan box; defaults to the catalog box (or `[-2,2]^n` for expressions).
    pub scan_box: Option<BoxDomain>,
    pub plan: SamplePlan,
    pub tasks: Vec<Task>,
}

impl RunConfig {
    pub fn for_catalog(name: &str) -> RunConfig {
        RunConfig {
            source: FunctionSource::Catalog {
                name: name.to_string(),
            },
            scan_box: None,
            plan: SamplePlan::default(),
            tasks: Vec::new(),
        }
    }

    pub fn with_task(mut self, task: Task) -> Self {
        self.tasks.push(task);
        self
    }
}

/// How a task outcome counts toward the exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutcomeClass {
    Pass,
    Violation,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum TaskOutcome {
    Check { verdict: CheckVerdict },
    Alpha { estimate: AlphaEstimate },
    Mvt { trace: MvtTrace },
    ThreePoints { outcome: ThreePointsOutcome },
    RadialLimit { trace: RadialTrace },
    Bode2 { outcome: Bode2Outcome },
    Tuacuctri { trace: TuacuctriTrace },
    /// A lemma harness refused to run (violated hypothesis etc.).
    NotRun { message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskResult {
    pub label: String,
    pub class: OutcomeClass,
    pub outcome: TaskOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    /// Seconds since the Unix epoch at run start. Volatile field.
    pub timestamp: u64,
    pub config: RunConfig,
    pub function: String,
    pub dim: usize,
    pub scan_box: BoxDomain,
    pub results: Vec<TaskResult>,
    /// Wall-clock milliseconds per task. Volatile field.
    pub timings_ms: Vec<f64>,
    pub total_ms: f64,
    /// NaN intermediates collapsed to `+inf` during expression evaluation.
    pub nan_conversions: u64,
    /// Grid of `(x, φ(x), φ_{v*}(x))` rows for 1-D functions; `v*` is the
    /// tilt used by the plot column (see `plot_tilt`).
    pub plot_trace: Option<Vec<(f64, ExtReal, ExtReal)>>,
    pub plot_tilt: Option<Vec<f64>>,
    pub exit_code: i32,
}

impl Report {
    /// JSON with the volatile fields (timestamp, timings) fixed to zero, for
    /// byte-level comparison of runs.
    pub fn normalized_json(&self) -> String {
        let mut copy = self.clone();
        copy.timestamp = 0;
        copy.timings_ms = copy.timings_ms.iter().map(|_| 0.0).collect();
        copy.total_ms = 0.0;
        serde_json::to_string_pretty(&copy).expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Tab-separated plot trace (columns: x, phi, phi_perturbed).
    pub fn plot_tsv(&self) -> Option<String> {
        let rows = self.plot_trace.as_ref()?;
        let mut out = String::from("x\tphi\tphi_perturbed\n");
        for (x, phi, pert) in rows {
            out.push_str(&format!("{x}\t{phi}\t{pert}\n"));
        }
        Some(out)
    }
}

fn resolve_function(config: &RunConfig) -> Result<(FunctionHandle, BoxDomain), ConfigError> {
    let handle = match &config.source {
        FunctionSource::Catalog { name } => {
            catalog::lookup(name).map_err(|e| config_error("source.name", e))?
        }
        FunctionSource::Expression { text, dim } => {
            if *dim == 0 {
                return Err(config_error("source.dim", "dimension must be >= 1"));
            }
            if let Some(b) = &config.scan_box {
                if b.dim() != *dim {
                    return Err(config_error(
                        "scan_box",
                        format!("box dimension {} does not match --dim {}", b.dim(), dim),
                    ));
                }
            }
            let expr = parse(text, *dim).map_err(|e| config_error("source.text", e))?;
            let default_box = config
                .scan_box
                .clone()
                .unwrap_or_else(|| BoxDomain::cube(-2.0, 2.0, *dim).expect("static box"));
            FunctionHandle::from_expr(text.clone(), expr, default_box)
        }
    };
    let scan_box = config
        .scan_box
        .clone()
        .unwrap_or_else(|| handle.default_box().clone());
    if scan_box.dim() != handle.dim() {
        return Err(config_error(
            "scan_box",
            format!(
                "box dimension {} does not match function dimension {}",
                scan_box.dim(),
                handle.dim()
            ),
        ));
    }
    Ok((handle, scan_box))
}

fn validate_point(field: &str, p: &[f64], dim: usize) -> Result<(), ConfigError> {
    if p.len() != dim {
        return Err(config_error(
            field,
            format!("expected dimension {dim}, got {}", p.len()),
        ));
    }
    if let Some(bad) = p.iter().find(|v| !v.is_finite()) {
        return Err(config_error(field, format!("non-finite coordinate {bad}")));
    }
    Ok(())
}

fn classify_check(verdict: &CheckVerdict) -> OutcomeClass {
    match verdict.status {
        CheckStatus::Satisfied => OutcomeClass::Pass,
        CheckStatus::Violated(_) => OutcomeClass::Violation,
        CheckStatus::Inconclusive => OutcomeClass::Inconclusive,
    }
}

fn classify_mvt(trace: &MvtTrace) -> OutcomeClass {
    let mut verdicts = vec![trace.mean1, trace.mean2];
    if let Some(v) = trace.mean3 {
        verdicts.push(v);
    }
    if verdicts.contains(&IneqVerdict::FailsAtScale) {
        OutcomeClass::Violation
    } else if verdicts.contains(&IneqVerdict::Inconclusive) {
        OutcomeClass::Inconclusive
    } else {
        OutcomeClass::Pass
    }
}

fn run_task(
    f: &FunctionHandle,
    scan_box: &BoxDomain,
    plan: &SamplePlan,
    task: &Task,
    dim: usize,
) -> Result<(String, OutcomeClass, TaskOutcome), ConfigError> {
    let lemma_outcome = |label: String, result: Result<(OutcomeClass, TaskOutcome), LemmaError>| {
        let (class, outcome) = match result {
            Ok(pair) => pair,
            Err(e) => (
                OutcomeClass::Inconclusive,
                TaskOutcome::NotRun {
                    message: e.to_string(),
                },
            ),
        };
        Ok((label, class, outcome))
    };
    match task {
        Task::Check { which } => {
            let (label, verdict) = match which {
                PropertyCheck::Quasiconvex => (
                    "check:quasiconvex",
                    check_quasiconvex_primal(f, scan_box, plan),
                ),
                PropertyCheck::CondB => ("check:cond-b", check_condition_b(f, scan_box, plan)),
                PropertyCheck::Quasimonotone => (
                    "check:quasimonotone",
                    check_quasimonotone(f, scan_box, plan),
                ),
                PropertyCheck::Lsc => ("check:lsc", check_lsc_sampled(f, scan_box, plan)),
            };
            Ok((
                label.to_string(),
                classify_check(&verdict),
                TaskOutcome::Check { verdict },
            ))
        }
        Task::RobustCheck { which, alpha } => {
            if !(alpha.is_finite() && *alpha > 0.0) {
                return Err(config_error("alpha", "must be positive and finite"));
            }
            let (label, verdict) = match which {
                RobustCheckKind::RobustPrimal => {
                    let params = RobustParams {
                        alpha: *alpha,
                        direction_count: plan.directions_per_sphere,
                        magnitude_count: 24,
                    };
                    (
                        format!("check:robust-primal@{alpha}"),
                        check_robust_primal(f, scan_box, &params, plan),
                    )
                }
                RobustCheckKind::RobustCondB => (
                    format!("check:robust-cond-b@{alpha}"),
                    check_robust_condition_b(f, scan_box, *alpha, plan),
                ),
                RobustCheckKind::RobustPairs => (
                    format!("check:robust-pairs@{alpha}"),
                    check_robust_pairs(f, scan_box, *alpha, plan),
                ),
            };
            Ok((label, classify_check(&verdict), TaskOutcome::Check { verdict }))
        }
        Task::AlphaStar { method, cap, tol } => {
            if !(cap.is_finite() && *cap > 0.0 && tol.is_finite() && *tol > 0.0) {
                return Err(config_error("alpha-star", "cap and tol must be positive and finite"));
            }
            let estimate = estimate_alpha_star(f, scan_box, *method, *cap, *tol, plan);
            Ok((
                format!("alpha-star:{method:?}").to_lowercase(),
                OutcomeClass::Pass,
                TaskOutcome::Alpha { estimate },
            ))
        }
        Task::Mvt { a, b } => {
            validate_point("mvt.a", a, dim)?;
            validate_point("mvt.b", b, dim)?;
            lemma_outcome(
                "mvt".to_string(),
                mvt_verify(f, a, b, plan)
                    .map(|trace| (classify_mvt(&trace), TaskOutcome::Mvt { trace })),
            )
        }
        Task::ThreePoints { u, v, w, lambda } => {
            for (name, p) in [("u", u), ("v", v), ("w", w)] {
                validate_point(&format!("three-points.{name}"), p, dim)?;
            }
            lemma_outcome(
                "lemma:three-points".to_string(),
                three_points_witness(f, u, v, w, *lambda, plan).map(|outcome| {
                    let class = match outcome {
                        ThreePointsOutcome::Found { .. } => OutcomeClass::Pass,
                        ThreePointsOutcome::NotFoundAtScale { .. } => OutcomeClass::Inconclusive,
                    };
                    (class, TaskOutcome::ThreePoints { outcome })
                }),
            )
        }
        Task::RadialLimit { u, v } => {
            validate_point("radial-limit.u", u, dim)?;
            validate_point("radial-limit.v", v, dim)?;
            lemma_outcome(
                "lemma:radial-limit".to_string(),
                radial_limit_check(f, u, v).map(|trace| {
                    let class = match trace.verdict {
                        RadialVerdict::Holds => OutcomeClass::Pass,
                        RadialVerdict::FailsAtScale => OutcomeClass::Violation,
                        RadialVerdict::Inconclusive => OutcomeClass::Inconclusive,
                    };
                    (class, TaskOutcome::RadialLimit { trace })
                }),
            )
        }
        Task::Bode2 { v_star, u, v, w, z } => {
            for (name, p) in [("v_star", v_star), ("u", u), ("v", v), ("w", w), ("z", z)] {
                validate_point(&format!("bode2.{name}"), p, dim)?;
            }
            let outcome = bode2_chain_check(f, v_star, u, v, w, z);
            let class = match &outcome {
                Bode2Outcome::Holds { .. } => OutcomeClass::Pass,
                Bode2Outcome::FailsAtScale { .. } => OutcomeClass::Violation,
                Bode2Outcome::PremiseUnmet { .. } => OutcomeClass::Inconclusive,
            };
            Ok((
                "lemma:bode2".to_string(),
                class,
                TaskOutcome::Bode2 { outcome },
            ))
        }
        Task::Tuacuctri { v_star } => {
            validate_point("tuacuctri.v_star", v_star, dim)?;
            lemma_outcome(
                "lemma:tuacuctri".to_string(),
                tuacuctri_construct(f, v_star, scan_box, plan).map(|trace| {
                    let ok = trace.peak_ok && trace.ordering_ok && trace.gamma_probes.iter().all(|p| p.pass);
                    let class = if ok {
                        OutcomeClass::Pass
                    } else {
                        OutcomeClass::Violation
                    };
                    (class, TaskOutcome::Tuacuctri { trace })
                }),
            )
        }
    }
}

/// Executes the configured tasks in order. Exit code semantics: 0 all
/// satisfied/holds, 2 some violation, 3 inconclusive results only; config
/// errors surface as `Err` (exit 1 at the CLI).
pub fn run_suite(config: &RunConfig) -> Result<Report, ConfigError> {
    config
        .plan
        .validate()
        .map_err(|m| config_error("plan", m))?;
    if config.tasks.is_empty() {
        return Err(config_error("tasks", "no tasks selected"));
    }
    let (handle, scan_box) = resolve_function(config)?;
    let start = std::time::Instant::now();
    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);

    let mut results = Vec::new();
    let mut timings_ms = Vec::new();
    for task in &config.tasks {
        let t0 = std::time::Instant::now();
        let (label, class, outcome) = run_task(&handle, &scan_box, &config.plan, task, handle.dim())?;
        timings_ms.push(t0.elapsed().as_secs_f64() * 1e3);
        results.push(TaskResult {
            label,
            class,
            outcome,
        });
    }

    let exit_code = if results.iter().any(|r| r.class == OutcomeClass::Violation) {
        2
    } else if results.iter().any(|r| r.class == OutcomeClass::Inconclusive) {
        3
    } else {
        0
    };

    // Plot-ready trace for 1-D functions: φ and one tilted companion.
    let (plot_trace, plot_tilt) = if handle.dim() == 1 {
        let tilt = config
            .tasks
            .iter()
            .find_map(|t| match t {
                Task::RobustCheck { alpha, .. } => Some(vec![-0.5 * alpha]),
                Task::Tuacuctri { v_star } | Task::Bode2 { v_star, .. } => Some(v_star.clone()),
                _ => None,
            })
            .unwrap_or_else(|| vec![0.0]);
        let perturbed = handle.perturbed(&tilt).expect("1-D tilt");
        let (lo, hi) = (scan_box.lo()[0], scan_box.hi()[0]);
        let rows: Vec<(f64, ExtReal, ExtReal)> = (0..=256)
            .map(|i| {
                let x = lo + (hi - lo) * i as f64 / 256.0;
                (x, handle.eval(&[x]), perturbed.eval(&[x]))
            })
            .collect();
        (Some(rows), Some(tilt))
    } else {
        (None, None)
    };

    Ok(Report {
        tool: "qlab".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp,
        config: config.clone(),
        function: handle.name().to_string(),
        dim: handle.dim(),
        scan_box,
        results,
        timings_ms,
        total_ms: start.elapsed().as_secs_f64() * 1e3,
        nan_conversions: handle.nan_conversions(),
        plot_trace,
        plot_tilt,
        exit_code,
    })
}
