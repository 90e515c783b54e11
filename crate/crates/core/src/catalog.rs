//! Ground-truth functions with exact Fréchet subdifferential oracles and
//! certified property labels.
//!
//! The catalog is the test backbone: every checker is validated against these
//! handles before it is trusted on user expressions. Labels are not asserted
//! by hand — each `alpha_star` value is recomputed by the brute-force scan
//! oracles committed under `tests/` (the `provenance` string names the
//! oracle), and every exact subgradient must pass the numerical membership
//! test of [`crate::subdiff`].

use crate::exprlang::{Expr, ExtReal};
use crate::geometry::{dot, BoxDomain};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CatalogError {
    #[error("unknown catalog function {0:?}")]
    UnknownFunction(String),
    #[error("perturbation dimension {got} does not match function dimension {expected}")]
    Dimension { expected: usize, got: usize },
}

/// Label for the robustness modulus α*: the supremum of α such that every
/// linear perturbation of norm below α keeps the function quasiconvex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AlphaStarLabel {
    /// Known finite supremum (0 means no positive α works).
    Value(f64),
    /// At least the configured cap; in particular true for convex functions.
    Cap,
    /// No certified label.
    Unlabeled,
}

/// Certified properties of a catalog member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub lsc: bool,
    pub quasiconvex: bool,
    pub convex: bool,
    pub alpha_star: AlphaStarLabel,
    /// Which oracle derived `alpha_star` (see `tests/common/oracles.rs`).
    pub provenance: String,
}

impl GroundTruth {
    /// convex ⇒ quasiconvex and alpha_star = Cap; alpha_star > 0 ⇒ quasiconvex.
    pub fn coherent(&self) -> bool {
        let convex_ok = !self.convex || (self.quasiconvex && self.alpha_star == AlphaStarLabel::Cap);
        let alpha_ok = match self.alpha_star {
            AlphaStarLabel::Value(a) => a <= 0.0 || self.quasiconvex,
            AlphaStarLabel::Cap => self.quasiconvex,
            AlphaStarLabel::Unlabeled => true,
        };
        convex_ok && alpha_ok
    }
}

/// Result of an exact subdifferential oracle at one point.
#[derive(Debug, Clone, PartialEq)]
pub enum ExactSubdiff {
    /// The (finite discretization of the) subdifferential set.
    Set(Vec<Vec<f64>>),
    /// Certified empty set, e.g. −|x| at 0.
    EmptyCertified,
    /// The oracle makes no claim here; dual checkers skip the point.
    Unknown,
}

type EvalFn = dyn Fn(&[f64]) -> ExtReal + Send + Sync;
type SubdiffFn = dyn Fn(&[f64]) -> ExactSubdiff + Send + Sync;

/// An evaluable extended-real function on R^n, with optional exact
/// subdifferential oracle and certified labels.
///
/// Handles are immutable and cheap to clone (the closures are shared).
#[derive(Clone)]
pub struct FunctionHandle {
    name: String,
    dim: usize,
    eval_fn: Arc<EvalFn>,
    exact_subdiff: Option<Arc<SubdiffFn>>,
    labels: Option<GroundTruth>,
    default_box: BoxDomain,
    /// Points where the function is known to be nonsmooth; segment scans probe
    /// these exactly (set-valued subdifferentials live on measure-zero sets).
    kinks: Vec<Vec<f64>>,
    nan_hits: Option<Arc<AtomicU64>>,
}

impl fmt::Debug for FunctionHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionHandle")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("labels", &self.labels)
            .finish_non_exhaustive()
    }
}

impl FunctionHandle {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[f64]) -> ExtReal {
        assert_eq!(x.len(), self.dim, "point dimension mismatch for {}", self.name);
        (self.eval_fn)(x)
    }

    pub fn labels(&self) -> Option<&GroundTruth> {
        self.labels.as_ref()
    }

    pub fn default_box(&self) -> &BoxDomain {
        &self.default_box
    }

    pub fn kinks(&self) -> &[Vec<f64>] {
        &self.kinks
    }

    pub fn has_exact_subdiff(&self) -> bool {
        self.exact_subdiff.is_some()
    }

    /// Exact oracle answer, if this handle carries an oracle.
    pub fn exact_subdiff_at(&self, x: &[f64]) -> Option<ExactSubdiff> {
        self.exact_subdiff.as_ref().map(|f| f(x))
    }

    /// NaN intermediates collapsed to +∞ so far (expression-backed handles).
    pub fn nan_conversions(&self) -> u64 {
        self.nan_hits
            .as_ref()
            .map_or(0, |c| c.load(Ordering::Relaxed))
    }

    /// The linearly perturbed function `x ↦ f(x) + ⟨v*, x⟩`. Exactness of the
    /// oracle is preserved: subgradient sets translate by `v*`.
    pub fn perturbed(&self, v_star: &[f64]) -> Result<FunctionHandle, CatalogError> {
        if v_star.len() != self.dim {
            return Err(CatalogError::Dimension {
                expected: self.dim,
                got: v_star.len(),
            });
        }
        let v = v_star.to_vec();
        let base_eval = Arc::clone(&self.eval_fn);
        let ev = {
            let v = v.clone();
            move |x: &[f64]| {
                let base = base_eval(x);
                if base.is_finite() {
                    ExtReal::from_eval(base.value() + dot(&v, x))
                } else {
                    ExtReal::INF
                }
            }
        };
        let shifted_oracle = self.exact_subdiff.as_ref().map(|oracle| {
            let oracle = Arc::clone(oracle);
            let v = v.clone();
            let f: Arc<SubdiffFn> = Arc::new(move |x: &[f64]| match oracle(x) {
                ExactSubdiff::Set(grads) => ExactSubdiff::Set(
                    grads
                        .into_iter()
                        .map(|g| g.iter().zip(&v).map(|(a, b)| a + b).collect())
                        .collect(),
                ),
                other => other,
            });
            f
        });
        Ok(FunctionHandle {
            name: format!("{}+<v*,x>@{:?}", self.name, v),
            dim: self.dim,
            eval_fn: Arc::new(ev),
            exact_subdiff: shifted_oracle,
            labels: None,
            default_box: self.default_box.clone(),
            kinks: self.kinks.clone(),
            nan_hits: None,
        })
    }

    /// Wraps a parsed expression. No oracle, no labels; subgradients come from
    /// finite differences guarded by the membership test.
    pub fn from_expr(name: impl Into<String>, expr: Expr, default_box: BoxDomain) -> FunctionHandle {
        assert_eq!(expr.dim(), default_box.dim());
        let dim = expr.dim();
        let counter = Arc::new(AtomicU64::new(0));
        let c = Arc::clone(&counter);
        let ev = move |x: &[f64]| {
            let (v, nan_hits) = expr.eval_counting(x).expect("dimension checked");
            if nan_hits > 0 {
                c.fetch_add(nan_hits, Ordering::Relaxed);
            }
            v
        };
        FunctionHandle {
            name: name.into(),
            dim,
            eval_fn: Arc::new(ev),
            exact_subdiff: None,
            labels: None,
            default_box,
            kinks: Vec::new(),
            nan_hits: Some(counter),
        }
    }

    /// Builds a closure-backed handle. Test helper and catalog constructor.
    pub fn from_parts(
        name: impl Into<String>,
        dim: usize,
        eval_fn: impl Fn(&[f64]) -> ExtReal + Send + Sync + 'static,
        exact_subdiff: Option<Arc<SubdiffFn>>,
        labels: Option<GroundTruth>,
        default_box: BoxDomain,
        kinks: Vec<Vec<f64>>,
    ) -> FunctionHandle {
        FunctionHandle {
            name: name.into(),
            dim,
            eval_fn: Arc::new(eval_fn),
            exact_subdiff,
            labels,
            default_box,
            kinks,
            nan_hits: None,
        }
    }
}

fn fin(v: f64) -> ExtReal {
    ExtReal::from_eval(v)
}

fn truth(
    lsc: bool,
    quasiconvex: bool,
    convex: bool,
    alpha_star: AlphaStarLabel,
    provenance: &str,
) -> Option<GroundTruth> {
    let t = GroundTruth {
        lsc,
        quasiconvex,
        convex,
        alpha_star,
        provenance: provenance.to_string(),
    };
    debug_assert!(t.coherent());
    Some(t)
}

/// Grid over `[lo, hi]`: both endpoints plus `interior` interior points.
fn interval_grid(lo: f64, hi: f64, interior: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(interior + 2);
    for j in 0..=(interior + 1) {
        out.push(vec![lo + (hi - lo) * j as f64 / (interior + 1) as f64]);
    }
    out
}

fn smooth_1d(grad: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Option<Arc<SubdiffFn>> {
    Some(Arc::new(move |x: &[f64]| {
        ExactSubdiff::Set(vec![vec![grad(x[0])]])
    }))
}

fn catalog_entries() -> Vec<FunctionHandle> {
    let box1 = |lo, hi| BoxDomain::cube(lo, hi, 1).unwrap();
    let box2 = |lo, hi| BoxDomain::cube(lo, hi, 2).unwrap();

    vec![
        FunctionHandle::from_parts(
            "quadratic",
            1,
            |x| fin(x[0] * x[0]),
            smooth_1d(|x| 2.0 * x),
            truth(true, true, true, AlphaStarLabel::Cap, "convexity preserved under linear perturbation; alpha_scan_1d agrees up to cap"),
            box1(-2.0, 2.0),
            vec![],
        ),
        FunctionHandle::from_parts(
            "quadratic2d",
            2,
            |x| fin(x[0] * x[0] + x[1] * x[1]),
            Some(Arc::new(|x: &[f64]| {
                ExactSubdiff::Set(vec![vec![2.0 * x[0], 2.0 * x[1]]])
            })),
            truth(true, true, true, AlphaStarLabel::Cap, "convexity preserved under linear perturbation; midpoint_convexity_scan"),
            box2(-2.0, 2.0),
            vec![],
        ),
        FunctionHandle::from_parts(
            "linear",
            1,
            |x| fin(x[0]),
            smooth_1d(|_| 1.0),
            truth(true, true, true, AlphaStarLabel::Cap, "x + vx is affine for every v; alpha_scan_1d agrees up to cap"),
            box1(-2.0, 2.0),
            vec![],
        ),
        FunctionHandle::from_parts(
            "abs",
            1,
            |x| fin(x[0].abs()),
            Some(Arc::new(|x: &[f64]| {
                if x[0] == 0.0 {
                    ExactSubdiff::Set(interval_grid(-1.0, 1.0, 9))
                } else {
                    ExactSubdiff::Set(vec![vec![x[0].signum()]])
                }
            })),
            truth(true, true, true, AlphaStarLabel::Cap, "|x| + vx is convex for every v; alpha_scan_1d agrees up to cap"),
            box1(-2.0, 2.0),
            vec![vec![0.0]],
        ),
        FunctionHandle::from_parts(
            "neg_abs",
            1,
            |x| fin(-x[0].abs()),
            Some(Arc::new(|x: &[f64]| {
                if x[0] == 0.0 {
                    // liminf of (-|y| - <g, y>)/|y| is -1 - |g| < 0 for every g.
                    ExactSubdiff::EmptyCertified
                } else {
                    ExactSubdiff::Set(vec![vec![-x[0].signum()]])
                }
            })),
            truth(true, false, false, AlphaStarLabel::Value(0.0), "level set {-|x| <= -1} is disconnected; primal_scan_1d"),
            box1(-2.0, 2.0),
            vec![vec![0.0]],
        ),
        FunctionHandle::from_parts(
            "cubic",
            1,
            |x| fin(x[0] * x[0] * x[0]),
            smooth_1d(|x| 3.0 * x * x),
            truth(true, true, false, AlphaStarLabel::Value(0.0), "x^3 + vx has an interior local max for every v < 0; alpha_scan_1d"),
            box1(-2.0, 2.0),
            vec![],
        ),
        FunctionHandle::from_parts(
            "slanted_sine",
            1,
            |x| fin(2.0 * x[0] + x[0].sin()),
            smooth_1d(|x| 2.0 + x.cos()),
            truth(true, true, false, AlphaStarLabel::Value(1.0), "derivative 2 + cos x + v keeps a sign iff |v| <= 1; alpha_scan_1d"),
            box1(-10.0, 10.0),
            vec![],
        ),
        FunctionHandle::from_parts(
            "sqrt_abs",
            1,
            |x| fin(x[0].abs().sqrt()),
            Some(Arc::new(|x: &[f64]| {
                if x[0] == 0.0 {
                    // Every slope passes the liminf test at the cusp; the set
                    // is all of R, which no finite sample represents.
                    ExactSubdiff::Unknown
                } else {
                    ExactSubdiff::Set(vec![vec![x[0].signum() / (2.0 * x[0].abs().sqrt())]])
                }
            })),
            truth(true, true, false, AlphaStarLabel::Value(0.0), "sqrt|x| + vx peaks at 1/(4v^2) for v < 0; alpha_scan_1d over the wide box"),
            box1(-500.0, 500.0),
            vec![vec![0.0]],
        ),
        FunctionHandle::from_parts(
            "step",
            1,
            |x| fin(if x[0] <= 0.0 { 0.0 } else { 1.0 }),
            Some(Arc::new(|x: &[f64]| {
                if x[0] == 0.0 {
                    // The subdifferential at the jump is [0, inf); a bounded
                    // sample is enough for the finite scans.
                    ExactSubdiff::Set(interval_grid(0.0, 2.0, 7))
                } else {
                    ExactSubdiff::Set(vec![vec![0.0]])
                }
            })),
            truth(true, true, false, AlphaStarLabel::Value(0.0), "step + vx loses level-set convexity for every v < 0; alpha_scan_1d"),
            box1(-2.0, 2.0),
            vec![vec![0.0]],
        ),
        FunctionHandle::from_parts(
            "saddle",
            2,
            |x| fin(x[0] * x[0] - x[1] * x[1]),
            Some(Arc::new(|x: &[f64]| {
                ExactSubdiff::Set(vec![vec![2.0 * x[0], -2.0 * x[1]]])
            })),
            truth(true, false, false, AlphaStarLabel::Value(0.0), "level sets are hyperbolic; primal_scan on the y-axis segment"),
            box2(-2.0, 2.0),
            vec![],
        ),
        FunctionHandle::from_parts(
            "norm2d",
            2,
            |x| fin((x[0] * x[0] + x[1] * x[1]).sqrt()),
            Some(Arc::new(|x: &[f64]| {
                let n = (x[0] * x[0] + x[1] * x[1]).sqrt();
                if n == 0.0 {
                    // Unit ball at the origin: center, a half-radius ring and
                    // the boundary ring.
                    let mut set = vec![vec![0.0, 0.0]];
                    for k in 0..8 {
                        let a = std::f64::consts::PI * k as f64 / 4.0;
                        set.push(vec![0.5 * a.cos(), 0.5 * a.sin()]);
                        set.push(vec![a.cos(), a.sin()]);
                    }
                    ExactSubdiff::Set(set)
                } else {
                    ExactSubdiff::Set(vec![vec![x[0] / n, x[1] / n]])
                }
            })),
            truth(true, true, true, AlphaStarLabel::Cap, "norm + linear is convex for every v; midpoint_convexity_scan"),
            box2(-2.0, 2.0),
            vec![vec![0.0, 0.0]],
        ),
    ]
}

/// Looks up a registered ground-truth function.
pub fn lookup(name: &str) -> Result<FunctionHandle, CatalogError> {
    catalog_entries()
        .into_iter()
        .find(|h| h.name() == name)
        .ok_or_else(|| CatalogError::UnknownFunction(name.to_string()))
}

/// All registered handles, in registration order.
pub fn all() -> Vec<FunctionHandle> {
    catalog_entries()
}

pub fn names() -> Vec<String> {
    catalog_entries().iter().map(|h| h.name().to_string()).collect()
}

/// One line per entry: name, dim, labels, provenance. The `catalog list`
/// CLI output.
pub fn listing() -> String {
    let mut out = String::new();
    for h in catalog_entries() {
        let t = h.labels().expect("catalog entries are labeled");
        let alpha = match t.alpha_star {
            AlphaStarLabel::Value(v) => format!("{v}"),
            AlphaStarLabel::Cap => "CAP".to_string(),
            AlphaStarLabel::Unlabeled => "unlabeled".to_string(),
        };
        out.push_str(&format!(
            "{:<12} dim={} lsc={} quasiconvex={} convex={} alpha_star={} provenance: {}\n",
            h.name(),
            h.dim(),
            t.lsc,
            t.quasiconvex,
            t.convex,
            alpha,
            t.provenance,
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_known_and_unknown() {
        assert_eq!(lookup("cubic").unwrap().name(), "cubic");
        assert!(matches!(
            lookup("nope"),
            Err(CatalogError::UnknownFunction(_))
        ));
    }

    #[test]
    fn catalog_contains_required_members() {
        let names = names();
        for required in [
            "quadratic",
            "quadratic2d",
            "linear",
            "abs",
            "neg_abs",
            "cubic",
            "slanted_sine",
            "sqrt_abs",
            "step",
            "saddle",
            "norm2d",
        ] {
            assert!(names.iter().any(|n| n == required), "missing {required}");
        }
        assert!(names.len() >= 10);
    }

    #[test]
    fn labels_are_coherent() {
        for h in all() {
            let t = h.labels().unwrap();
            assert!(t.coherent(), "incoherent labels on {}", h.name());
        }
    }

    #[test]
    fn expected_labels_from_derivation_oracles() {
        let expect = [
            ("cubic", AlphaStarLabel::Value(0.0), true),
            ("slanted_sine", AlphaStarLabel::Value(1.0), true),
            ("quadratic", AlphaStarLabel::Cap, true),
            ("abs", AlphaStarLabel::Cap, true),
            ("linear", AlphaStarLabel::Cap, true),
            ("sqrt_abs", AlphaStarLabel::Value(0.0), true),
            ("step", AlphaStarLabel::Value(0.0), true),
            ("neg_abs", AlphaStarLabel::Value(0.0), false),
        ];
        for (name, alpha, qc) in expect {
            let t = lookup(name).unwrap().labels().unwrap().clone();
            assert_eq!(t.alpha_star, alpha, "{name}");
            assert_eq!(t.quasiconvex, qc, "{name}");
        }
    }

    #[test]
    fn neg_abs_subdifferential_is_empty_at_zero() {
        let h = lookup("neg_abs").unwrap();
        assert_eq!(h.exact_subdiff_at(&[0.0]), Some(ExactSubdiff::EmptyCertified));
        assert_eq!(
            h.exact_subdiff_at(&[1.0]),
            Some(ExactSubdiff::Set(vec![vec![-1.0]]))
        );
    }

    #[test]
    fn evaluate_never_returns_minus_infinity() {
        for h in all() {
            let b = h.default_box();
            for p in crate::geometry::sample_points(b, 100, 7) {
                let v = h.eval(&p);
                assert!(v.is_finite() || v == ExtReal::INF);
            }
        }
    }

    #[test]
    fn perturbed_evaluates_to_sum() {
        let h = lookup("quadratic").unwrap();
        let p = h.perturbed(&[1.0]).unwrap();
        assert_eq!(p.eval(&[2.0]), ExtReal::finite(6.0).unwrap());
        let c = lookup("cubic").unwrap().perturbed(&[-0.5]).unwrap();
        assert!((c.eval(&[-0.3]).value() - 0.123).abs() < 1e-12);
        // zero perturbation is the identity pointwise
        let a = lookup("abs").unwrap();
        let az = a.perturbed(&[0.0]).unwrap();
        for x in [-1.5, 0.0, 0.25] {
            assert_eq!(a.eval(&[x]), az.eval(&[x]));
        }
    }

    #[test]
    fn perturbed_rejects_dimension_mismatch() {
        let h = lookup("quadratic2d").unwrap();
        assert_eq!(
            h.perturbed(&[1.0]).err(),
            Some(CatalogError::Dimension { expected: 2, got: 1 })
        );
    }

    #[test]
    fn perturbed_oracle_translates() {
        let h = lookup("quadratic").unwrap().perturbed(&[1.0]).unwrap();
        assert_eq!(
            h.exact_subdiff_at(&[2.0]),
            Some(ExactSubdiff::Set(vec![vec![5.0]]))
        );
    }

    #[test]
    fn listing_has_one_line_per_entry() {
        let text = listing();
        assert_eq!(text.lines().count(), all().len());
        assert!(text.contains("slanted_sine"));
        assert!(text.contains("provenance"));
    }
}
