//! Property checkers and α* estimators.
//!
//! Primal route: scan segment triples straight from the quasiconvexity
//! definition. Dual route: scan pairs of points with their sampled Fréchet
//! subgradients through the first-order criteria (zero/first-order condition,
//! quasimonotonicity, and their α-robust sharpenings). A sampled scan can
//! only ever certify "no violation found at this plan", so `Satisfied` is
//! scoped by the plan echoed in the report; a `Violated` verdict, in
//! contrast, carries a witness that re-verifies by direct evaluation.
//!
//! Strict inequalities are tolerance-gated: a violation must clear
//! `strict_tol = 1e-9 · (1 + scale)` so float noise never counts as a
//! counterexample.
//!
//! Scans are deterministic: points come from the seeded sampler, pairs are
//! visited in index order, perturbations in direction-major order with
//! magnitudes descending, and the first violation in that order is reported.

use crate::catalog::FunctionHandle;
use crate::exprlang::ExtReal;
use crate::geometry::{
    convex_combination, dot, lambda_grid, norm, sample_points, sub, unit_directions,
    BoxDomain, SamplePlan,
};
use crate::subdiff::{subgradients_at, SubgradientSample};
use serde::{Deserialize, Serialize};

/// Tolerance splitting "strict" from noise at the scale of the compared
/// quantities.
pub fn strict_tol(a: f64, b: f64) -> f64 {
    1e-9 * (1.0 + a.abs().max(b.abs()))
}

/// Serializes possibly infinite floats as the strings "inf" / "-inf"
/// (JSON has no Infinity literal).
pub mod float_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Raw::Str(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad float: {s:?}"))),
        }
    }
}

/// Typed counterexample payloads. Every payload re-checks: plugging it back
/// into the defining inequality reproduces the violation (see [`reverify`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Witness {
    /// `f(λx + (1−λ)y) > max{f(x), f(y)}`.
    SegmentViolation {
        x: Vec<f64>,
        y: Vec<f64>,
        lambda: f64,
        #[serde(with = "float_serde")]
        lhs: f64,
        rhs: f64,
    },
    /// `⟨x*, y−x⟩ > bound` although `φ(y) ≤ φ(x)`; `bound` is 0 for the plain
    /// criterion and `−min{α‖y−x‖, φ(x)−φ(y)}` for the robust one.
    ConditionBViolation {
        x: Vec<f64>,
        y: Vec<f64>,
        x_star: Vec<f64>,
        inner: f64,
        bound: f64,
        alpha: Option<f64>,
    },
    /// `min{⟨x*, y−x⟩, ⟨y*, x−y⟩} > 0`.
    QuasimonotoneViolation {
        x: Vec<f64>,
        y: Vec<f64>,
        x_star: Vec<f64>,
        y_star: Vec<f64>,
        m: f64,
    },
    /// Some perturbation `v*` of norm below α breaks quasiconvexity.
    RobustPrimalViolation {
        v_star: Vec<f64>,
        inner: Box<Witness>,
    },
    /// Premise `min{⟨x*, y−x⟩, ⟨y*, x−y⟩} > −α‖y−x‖` holds but the operator
    /// monotonicity conclusion `⟨x*−y*, x−y⟩ ≥ 0` fails.
    PairsViolation {
        x: Vec<f64>,
        y: Vec<f64>,
        x_star: Vec<f64>,
        y_star: Vec<f64>,
        alpha: f64,
        premise_margin: f64,
        monotone_gap: f64,
    },
    /// Values stay below `φ(x)` on shrinking spheres around `x`.
    LscViolation {
        x: Vec<f64>,
        y: Vec<f64>,
        phi_x: f64,
        phi_y: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CheckStatus {
    Satisfied,
    Violated(Witness),
    Inconclusive,
}

/// Outcome of a property scan plus its statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckVerdict {
    pub status: CheckStatus,
    pub pairs_scanned: u64,
    pub points_skipped: u64,
    /// Most negative slack observed (`+inf` when nothing was comparable).
    #[serde(with = "float_serde")]
    pub worst_margin: f64,
}

impl CheckVerdict {
    pub fn is_violated(&self) -> bool {
        matches!(self.status, CheckStatus::Violated(_))
    }

    pub fn is_satisfied(&self) -> bool {
        matches!(self.status, CheckStatus::Satisfied)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.status {
            CheckStatus::Violated(w) => Some(w),
            _ => None,
        }
    }
}

/// Perturbation sweep parameters for the primal robustness check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustParams {
    pub alpha: f64,
    pub direction_count: usize,
    pub magnitude_count: usize,
}

impl RobustParams {
    pub fn new(alpha: f64) -> Self {
        assert!(alpha > 0.0, "alpha must be positive");
        RobustParams {
            alpha,
            direction_count: 8,
            magnitude_count: 8,
        }
    }

    /// Equispaced grid of `]0, α[`; never equal to α, matching "for every
    /// v* with ‖v*‖ < α".
    pub fn magnitudes(&self) -> Vec<f64> {
        let k = self.magnitude_count;
        (1..=k)
            .map(|j| self.alpha * j as f64 / (k + 1) as f64)
            .collect()
    }
}

struct PointSet {
    points: Vec<Vec<f64>>,
    values: Vec<ExtReal>,
}

fn scan_points(f: &FunctionHandle, domain: &BoxDomain, plan: &SamplePlan) -> PointSet {
    assert_eq!(
        domain.dim(),
        f.dim(),
        "box dimension must match the function"
    );
    let points = sample_points(domain, plan.points_per_box, plan.seed);
    let values = points.iter().map(|p| f.eval(p)).collect();
    PointSet { points, values }
}

/// Best λ on a segment by hill-climbing around `lambda` with halving steps.
/// Returns the refined `(lambda, value)` maximizing `f(λx + (1−λ)y)`.
fn refine_lambda(
    f: &FunctionHandle,
    x: &[f64],
    y: &[f64],
    mut lambda: f64,
    base_step: f64,
    rounds: usize,
) -> (f64, ExtReal) {
    let mut value = f.eval(&convex_combination(x, y, lambda));
    let mut step = base_step * 0.5;
    for _ in 0..rounds {
        for cand in [lambda - step, lambda + step] {
            if cand > 0.0 && cand < 1.0 {
                let v = f.eval(&convex_combination(x, y, cand));
                if v > value {
                    value = v;
                    lambda = cand;
                }
            }
        }
        step *= 0.5;
    }
    (lambda, value)
}

/// Definition-based quasiconvexity scan: seeded point pairs, an open λ-grid
/// per segment, and refinement around the best excess.
pub fn check_quasiconvex_primal(
    f: &FunctionHandle,
    domain: &BoxDomain,
    plan: &SamplePlan,
) -> CheckVerdict {
    let set = scan_points(f, domain, plan);
    let lambdas = lambda_grid(plan.lambdas_per_segment, true);
    let base_step = 1.0 / (plan.lambdas_per_segment + 1) as f64;

    let mut pairs_scanned = 0u64;
    let mut points_skipped = 0u64;
    let mut worst_margin = f64::INFINITY;
    // Best sub-tolerance candidate, refined once at the end.
    let mut best_candidate: Option<(usize, usize, f64, f64)> = None;

    let n = set.points.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let (vx, vy) = (set.values[i], set.values[j]);
            if !(vx.is_finite() && vy.is_finite()) {
                points_skipped += 1; // vacuous pair: the inequality holds trivially
                continue;
            }
            let (x, y) = (&set.points[i], &set.points[j]);
            if x == y {
                continue;
            }
            pairs_scanned += 1;
            let rhs = vx.max(vy).value();
            let mut pair_best: Option<(f64, f64)> = None; // (excess, lambda)
            for &lambda in &lambdas {
                let lhs = f.eval(&convex_combination(x, y, lambda));
                let excess = if lhs.is_finite() {
                    lhs.value() - rhs
                } else {
                    f64::INFINITY
                };
                worst_margin = worst_margin.min(-excess);
                if pair_best.is_none_or(|(e, _)| excess > e) {
                    pair_best = Some((excess, lambda));
                }
            }
            let (excess, lambda) = pair_best.expect("lambda grid is nonempty");
            let tol = strict_tol(if excess.is_finite() { excess + rhs } else { rhs }, rhs);
            if excess > tol {
                // Confirmed violation: sharpen it before reporting.
                let (lambda, lhs) =
                    refine_lambda(f, x, y, lambda, base_step, plan.refinement_rounds);
                let excess = if lhs.is_finite() {
                    lhs.value() - rhs
                } else {
                    f64::INFINITY
                };
                worst_margin = worst_margin.min(-excess);
                return CheckVerdict {
                    status: CheckStatus::Violated(Witness::SegmentViolation {
                        x: x.clone(),
                        y: y.clone(),
                        lambda,
                        lhs: lhs.value(),
                        rhs,
                    }),
                    pairs_scanned,
                    points_skipped,
                    worst_margin,
                };
            }
            if best_candidate.is_none_or(|(_, _, _, e)| excess > e) {
                best_candidate = Some((i, j, lambda, excess));
            }
        }
    }

    // A near-miss may sit between grid points; refine the global best.
    if let Some((i, j, lambda, _)) = best_candidate {
        let (x, y) = (&set.points[i], &set.points[j]);
        let rhs = set.values[i].max(set.values[j]).value();
        let (lambda, lhs) = refine_lambda(f, x, y, lambda, base_step, plan.refinement_rounds);
        let excess = if lhs.is_finite() {
            lhs.value() - rhs
        } else {
            f64::INFINITY
        };
        worst_margin = worst_margin.min(-excess);
        if excess > strict_tol(if excess.is_finite() { excess + rhs } else { rhs }, rhs) {
            return CheckVerdict {
                status: CheckStatus::Violated(Witness::SegmentViolation {
                    x: x.clone(),
                    y: y.clone(),
                    lambda,
                    lhs: lhs.value(),
                    rhs,
                }),
                pairs_scanned,
                points_skipped,
                worst_margin,
            };
        }
    }

    CheckVerdict {
        status: if pairs_scanned == 0 {
            CheckStatus::Inconclusive
        } else {
            CheckStatus::Satisfied
        },
        pairs_scanned,
        points_skipped,
        worst_margin,
    }
}

/// Sweeps perturbations `v* = m·d` with `‖v*‖ < α` and re-runs the primal
/// quasiconvexity scan on each `φ_{v*}`. Directions in sampler order,
/// magnitudes descending (larger tilts expose violations first).
pub fn check_robust_primal(
    f: &FunctionHandle,
    domain: &BoxDomain,
    params: &RobustParams,
    plan: &SamplePlan,
) -> CheckVerdict {
    assert!(params.alpha > 0.0);
    let dirs = unit_directions(f.dim(), params.direction_count, plan.seed);
    let mut mags = params.magnitudes();
    mags.reverse();

    let mut pairs_scanned = 0u64;
    let mut points_skipped = 0u64;
    let mut worst_margin = f64::INFINITY;
    let mut inconclusive = false;
    for d in &dirs {
        for &m in &mags {
            let v_star: Vec<f64> = d.iter().map(|c| m * c).collect();
            let perturbed = f.perturbed(&v_star).expect("direction has f's dimension");
            let verdict = check_quasiconvex_primal(&perturbed, domain, plan);
            pairs_scanned += verdict.pairs_scanned;
            points_skipped += verdict.points_skipped;
            worst_margin = worst_margin.min(verdict.worst_margin);
            match verdict.status {
                CheckStatus::Violated(inner) => {
                    return CheckVerdict {
                        status: CheckStatus::Violated(Witness::RobustPrimalViolation {
                            v_star,
                            inner: Box::new(inner),
                        }),
                        pairs_scanned,
                        points_skipped,
                        worst_margin,
                    };
                }
                CheckStatus::Inconclusive => inconclusive = true,
                CheckStatus::Satisfied => {}
            }
        }
    }
    CheckVerdict {
        status: if inconclusive {
            CheckStatus::Inconclusive
        } else {
            CheckStatus::Satisfied
        },
        pairs_scanned,
        points_skipped,
        worst_margin,
    }
}

/// Cached subgradient samples for the dual scans. `None` marks points
/// outside the domain.
fn collect_samples(f: &FunctionHandle, set: &PointSet) -> Vec<Option<SubgradientSample>> {
    set.points
        .iter()
        .zip(&set.values)
        .map(|(p, v)| {
            if v.is_finite() {
                subgradients_at(f, p).ok()
            } else {
                None
            }
        })
        .collect()
}

fn dual_skip_count(set: &PointSet, samples: &[Option<SubgradientSample>]) -> u64 {
    samples
        .iter()
        .zip(&set.values)
        .filter(|(s, v)| !v.is_finite() || s.as_ref().is_none_or(|s| s.is_skip()))
        .count() as u64
}

#[allow(clippy::needless_range_loop)] // index spans parallel arrays
fn condition_b_scan(
    f: &FunctionHandle,
    domain: &BoxDomain,
    alpha: Option<f64>,
    plan: &SamplePlan,
) -> CheckVerdict {
    let set = scan_points(f, domain, plan);
    let samples = collect_samples(f, &set);
    let points_skipped = dual_skip_count(&set, &samples);

    let mut pairs_scanned = 0u64;
    let mut worst_margin = f64::INFINITY;
    let n = set.points.len();
    for i in 0..n {
        let Some(sample_x) = samples[i].as_ref().filter(|s| !s.is_skip()) else {
            continue;
        };
        let vx = set.values[i];
        for j in 0..n {
            if i == j || !set.values[j].is_finite() || set.values[j] > vx {
                continue;
            }
            let (x, y) = (&set.points[i], &set.points[j]);
            if x == y {
                continue;
            }
            pairs_scanned += 1;
            let gap = sub(y, x);
            let bound = match alpha {
                None => 0.0,
                Some(a) => -f64::min(a * norm(&gap), vx.value() - set.values[j].value()),
            };
            for x_star in &sample_x.subgradients {
                let inner = dot(x_star, &gap);
                worst_margin = worst_margin.min(bound - inner);
                if inner > bound + strict_tol(inner, bound) {
                    return CheckVerdict {
                        status: CheckStatus::Violated(Witness::ConditionBViolation {
                            x: x.clone(),
                            y: y.clone(),
                            x_star: x_star.clone(),
                            inner,
                            bound,
                            alpha,
                        }),
                        pairs_scanned,
                        points_skipped,
                        worst_margin,
                    };
                }
            }
        }
    }
    CheckVerdict {
        status: if pairs_scanned == 0 {
            CheckStatus::Inconclusive
        } else {
            CheckStatus::Satisfied
        },
        pairs_scanned,
        points_skipped,
        worst_margin,
    }
}

/// Zero/first-order quasiconvexity criterion: whenever `φ(y) ≤ φ(x)`, every
/// sampled subgradient at `x` must satisfy `⟨x*, y−x⟩ ≤ 0`.
pub fn check_condition_b(f: &FunctionHandle, domain: &BoxDomain, plan: &SamplePlan) -> CheckVerdict {
    condition_b_scan(f, domain, None, plan)
}

/// Robust sharpening: `⟨x*, y−x⟩ ≤ −min{α‖y−x‖, φ(x) − φ(y)}`.
pub fn check_robust_condition_b(
    f: &FunctionHandle,
    domain: &BoxDomain,
    alpha: f64,
    plan: &SamplePlan,
) -> CheckVerdict {
    assert!(alpha > 0.0);
    condition_b_scan(f, domain, Some(alpha), plan)
}

/// Quasimonotonicity of the sampled subdifferential:
/// `min{⟨x*, y−x⟩, ⟨y*, x−y⟩} ≤ 0` over sampled pairs and selections.
#[allow(clippy::needless_range_loop)] // index spans parallel arrays
pub fn check_quasimonotone(
    f: &FunctionHandle,
    domain: &BoxDomain,
    plan: &SamplePlan,
) -> CheckVerdict {
    let set = scan_points(f, domain, plan);
    let samples = collect_samples(f, &set);
    let points_skipped = dual_skip_count(&set, &samples);

    let mut pairs_scanned = 0u64;
    let mut worst_margin = f64::INFINITY;
    let n = set.points.len();
    for i in 0..n {
        let Some(sx) = samples[i].as_ref().filter(|s| !s.is_skip()) else {
            continue;
        };
        for j in (i + 1)..n {
            let Some(sy) = samples[j].as_ref().filter(|s| !s.is_skip()) else {
                continue;
            };
            let (x, y) = (&set.points[i], &set.points[j]);
            if x == y {
                continue;
            }
            pairs_scanned += 1;
            let forward = sub(y, x);
            let backward = sub(x, y);
            for x_star in &sx.subgradients {
                let a = dot(x_star, &forward);
                for y_star in &sy.subgradients {
                    let m = a.min(dot(y_star, &backward));
                    worst_margin = worst_margin.min(-m);
                    if m > strict_tol(m, 0.0) {
                        return CheckVerdict {
                            status: CheckStatus::Violated(Witness::QuasimonotoneViolation {
                                x: x.clone(),
                                y: y.clone(),
                                x_star: x_star.clone(),
                                y_star: y_star.clone(),
                                m,
                            }),
                            pairs_scanned,
                            points_skipped,
                            worst_margin,
                        };
                    }
                }
            }
        }
    }
    CheckVerdict {
        status: if pairs_scanned == 0 {
            CheckStatus::Inconclusive
        } else {
            CheckStatus::Satisfied
        },
        pairs_scanned,
        points_skipped,
        worst_margin,
    }
}

/// α-robust pairs criterion: when both products stay above `−α‖y−x‖`, the
/// subdifferential must behave monotonically on that pair.
#[allow(clippy::needless_range_loop)] // index spans parallel arrays
pub fn check_robust_pairs(
    f: &FunctionHandle,
    domain: &BoxDomain,
    alpha: f64,
    plan: &SamplePlan,
) -> CheckVerdict {
    assert!(alpha > 0.0);
    let set = scan_points(f, domain, plan);
    let samples = collect_samples(f, &set);
    let points_skipped = dual_skip_count(&set, &samples);

    let mut pairs_scanned = 0u64;
    let mut worst_margin = f64::INFINITY;
    let n = set.points.len();
    for i in 0..n {
        let Some(sx) = samples[i].as_ref().filter(|s| !s.is_skip()) else {
            continue;
        };
        for j in (i + 1)..n {
            let Some(sy) = samples[j].as_ref().filter(|s| !s.is_skip()) else {
                continue;
            };
            let (x, y) = (&set.points[i], &set.points[j]);
            if x == y {
                continue;
            }
            pairs_scanned += 1;
            let forward = sub(y, x);
            let backward = sub(x, y);
            let threshold = alpha * norm(&forward);
            for x_star in &sx.subgradients {
                let a = dot(x_star, &forward);
                for y_star in &sy.subgradients {
                    let m = a.min(dot(y_star, &backward));
                    let premise_margin = m + threshold;
                    if premise_margin <= strict_tol(m, threshold) {
                        continue;
                    }
                    let monotone_gap = dot(&sub(x_star, y_star), &backward);
                    worst_margin = worst_margin.min(monotone_gap);
                    if monotone_gap < -strict_tol(monotone_gap, 0.0) {
                        return CheckVerdict {
                            status: CheckStatus::Violated(Witness::PairsViolation {
                                x: x.clone(),
                                y: y.clone(),
                                x_star: x_star.clone(),
                                y_star: y_star.clone(),
                                alpha,
                                premise_margin,
                                monotone_gap,
                            }),
                            pairs_scanned,
                            points_skipped,
                            worst_margin,
                        };
                    }
                }
            }
        }
    }
    CheckVerdict {
        status: if pairs_scanned == 0 {
            CheckStatus::Inconclusive
        } else {
            CheckStatus::Satisfied
        },
        pairs_scanned,
        points_skipped,
        worst_margin,
    }
}

/// Sampled lower-semicontinuity spot check: at every scan point the minimum
/// of φ over shrinking spheres must come back up to `φ(x)`.
///
/// The threshold carries a first-order allowance `slack·r`: any smooth
/// function dips `|∇φ|·r` below `φ(x)` on a radius-r sphere, while a genuine
/// jump down persists at a level independent of r.
pub fn check_lsc_sampled(f: &FunctionHandle, domain: &BoxDomain, plan: &SamplePlan) -> CheckVerdict {
    let set = scan_points(f, domain, plan);
    let dirs = unit_directions(f.dim(), plan.directions_per_sphere, plan.seed);
    let levels = 12;
    let r0 = 0.1;
    let slope_slack = 256.0;

    let mut pairs_scanned = 0u64;
    let mut points_skipped = 0u64;
    let mut worst_margin = f64::INFINITY;
    for (x, vx) in set.points.iter().zip(&set.values) {
        if !vx.is_finite() {
            points_skipped += 1;
            continue;
        }
        pairs_scanned += 1;
        let phi_x = vx.value();
        // Minimum of φ per shrinking sphere, with radius and attaining point.
        let mut sphere_mins: Vec<(f64, f64, Vec<f64>)> = Vec::new();
        for j in 0..=levels {
            let r = r0 * 0.5f64.powi(j);
            let mut best: Option<(f64, Vec<f64>)> = None;
            for d in &dirs {
                let y = crate::geometry::add_scaled(x, r, d);
                let fy = f.eval(&y);
                if fy.is_finite() && best.as_ref().is_none_or(|(b, _)| fy.value() < *b) {
                    best = Some((fy.value(), y));
                }
            }
            if let Some((v, y)) = best {
                sphere_mins.push((r, v, y));
            }
        }
        if sphere_mins.len() < 3 {
            continue;
        }
        let tail = &sphere_mins[sphere_mins.len() - 3..];
        let gap = tail
            .iter()
            .map(|(_, v, _)| phi_x - v)
            .fold(f64::INFINITY, f64::min);
        worst_margin = worst_margin.min(-gap);
        let persists = tail
            .iter()
            .all(|(r, v, _)| *v < phi_x - strict_tol(phi_x, *v) - slope_slack * r);
        if persists {
            let (_, phi_y, y) = tail.last().expect("three tail radii").clone();
            return CheckVerdict {
                status: CheckStatus::Violated(Witness::LscViolation {
                    x: x.clone(),
                    y,
                    phi_x,
                    phi_y,
                }),
                pairs_scanned,
                points_skipped,
                worst_margin,
            };
        }
    }
    CheckVerdict {
        status: if pairs_scanned == 0 {
            CheckStatus::Inconclusive
        } else {
            CheckStatus::Satisfied
        },
        pairs_scanned,
        points_skipped,
        worst_margin,
    }
}

/// Which checker backs the α* bisection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlphaMethod {
    Primal,
    DualB,
    Pairs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaProbe {
    pub alpha: f64,
    pub violated: bool,
    /// Norm of the violating perturbation, when the method exposes one.
    pub violation_norm: Option<f64>,
}

/// Bracketing estimate of the robustness modulus α*.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaEstimate {
    pub method: AlphaMethod,
    pub lower: f64,
    pub upper: f64,
    pub cap: f64,
    pub tol: f64,
    pub trace: Vec<AlphaProbe>,
}

impl AlphaEstimate {
    /// No Satisfied probe above a Violated probe.
    pub fn trace_is_monotone(&self) -> bool {
        let max_clean = self
            .trace
            .iter()
            .filter(|p| !p.violated)
            .map(|p| p.alpha)
            .fold(0.0, f64::max);
        self.trace
            .iter()
            .filter(|p| p.violated)
            .all(|p| p.alpha > max_clean - 1e-12)
    }
}

/// Bisects α on `[0, cap]` using the selected robust checker as predicate.
///
/// Probes are interpreted in perturbation-norm space: a Violated probe pins
/// `upper` to the violating norm (a genuine counterexample at norm m rules
/// out robustness for every α > m), a clean probe raises `lower` to the
/// largest norm actually exercised. For the primal method the probe at m
/// tests the perturbation sweep of `RobustParams` with α chosen so its top
/// grid magnitude equals m; the dual methods use α = m directly.
pub fn estimate_alpha_star(
    f: &FunctionHandle,
    domain: &BoxDomain,
    method: AlphaMethod,
    cap: f64,
    tol: f64,
    plan: &SamplePlan,
) -> AlphaEstimate {
    assert!(cap > 0.0 && tol > 0.0);
    let magnitude_count = 8;
    let probe = |m: f64| -> AlphaProbe {
        match method {
            AlphaMethod::Primal => {
                let params = RobustParams {
                    // Top magnitude of the open grid lands exactly on m.
                    alpha: m * (magnitude_count + 1) as f64 / magnitude_count as f64,
                    direction_count: plan.directions_per_sphere,
                    magnitude_count,
                };
                let verdict = check_robust_primal(f, domain, &params, plan);
                let violation_norm = verdict.witness().map(|w| match w {
                    Witness::RobustPrimalViolation { v_star, .. } => norm(v_star),
                    _ => unreachable!("primal sweep yields robust-primal witnesses"),
                });
                AlphaProbe {
                    alpha: m,
                    violated: verdict.is_violated(),
                    violation_norm,
                }
            }
            AlphaMethod::DualB => AlphaProbe {
                alpha: m,
                violated: check_robust_condition_b(f, domain, m, plan).is_violated(),
                violation_norm: None,
            },
            AlphaMethod::Pairs => AlphaProbe {
                alpha: m,
                violated: check_robust_pairs(f, domain, m, plan).is_violated(),
                violation_norm: None,
            },
        }
    };

    let mut trace = Vec::new();
    let first = probe(cap);
    trace.push(first.clone());
    if !first.violated {
        return AlphaEstimate {
            method,
            lower: cap,
            upper: cap,
            cap,
            tol,
            trace,
        };
    }
    let mut lower = 0.0f64;
    let mut upper = first.violation_norm.unwrap_or(cap).min(cap);
    let mut iterations = 0;
    while upper - lower > tol && iterations < 200 {
        iterations += 1;
        let mid = 0.5 * (lower + upper);
        let p = probe(mid);
        let violated = p.violated;
        let vnorm = p.violation_norm;
        trace.push(p);
        if violated {
            upper = vnorm.unwrap_or(mid).min(upper).max(lower);
        } else {
            lower = mid;
        }
    }
    AlphaEstimate {
        method,
        lower,
        upper,
        cap,
        tol,
        trace,
    }
}

/// Re-verifies every violated verdict in a batch. Returns the number of
/// violated verdicts and how many of their witnesses reproduced.
pub fn reverify_all(verdicts: &[(FunctionHandle, CheckVerdict)]) -> (u64, u64) {
    let mut violated = 0;
    let mut ok = 0;
    for (f, v) in verdicts {
        if let Some(w) = v.witness() {
            violated += 1;
            match reverify(f, w) {
                Ok(()) => ok += 1,
                Err(e) => eprintln!("witness for {} failed re-verification: {e}", f.name()),
            }
        }
    }
    (violated, ok)
}

/// Re-checks a witness against the defining inequality by direct evaluation.
/// Returns `Err` with the failing quantity when the violation does not
/// reproduce.
pub fn reverify(f: &FunctionHandle, witness: &Witness) -> Result<(), String> {
    let close = |stored: f64, recomputed: f64, what: &str| -> Result<(), String> {
        let ok = if stored.is_finite() {
            (stored - recomputed).abs() <= 1e-9 * (1.0 + stored.abs())
        } else {
            stored == recomputed
        };
        if ok {
            Ok(())
        } else {
            Err(format!("{what}: stored {stored}, recomputed {recomputed}"))
        }
    };
    match witness {
        Witness::SegmentViolation {
            x,
            y,
            lambda,
            lhs,
            rhs,
        } => {
            let z = convex_combination(x, y, *lambda);
            let lhs2 = f.eval(&z).value();
            let rhs2 = f.eval(x).max(f.eval(y));
            if !rhs2.is_finite() {
                return Err("segment endpoints are not both finite".into());
            }
            close(*lhs, lhs2, "lhs")?;
            close(*rhs, rhs2.value(), "rhs")?;
            if lhs2 > rhs2.value() + strict_tol(if lhs2.is_finite() { lhs2 } else { rhs2.value() }, rhs2.value()) {
                Ok(())
            } else {
                Err(format!("no violation: f(z) = {lhs2} vs max = {}", rhs2.value()))
            }
        }
        Witness::ConditionBViolation {
            x,
            y,
            x_star,
            inner,
            bound,
            alpha,
        } => {
            let (vx, vy) = (f.eval(x), f.eval(y));
            if !(vx.is_finite() && vy.is_finite() && vy <= vx) {
                return Err("premise phi(y) <= phi(x) fails".into());
            }
            let gap = sub(y, x);
            let inner2 = dot(x_star, &gap);
            let bound2 = match alpha {
                None => 0.0,
                Some(a) => -f64::min(a * norm(&gap), vx.value() - vy.value()),
            };
            close(*inner, inner2, "inner")?;
            close(*bound, bound2, "bound")?;
            if inner2 > bound2 + strict_tol(inner2, bound2) {
                Ok(())
            } else {
                Err(format!("no violation: inner {inner2} vs bound {bound2}"))
            }
        }
        Witness::QuasimonotoneViolation {
            x,
            y,
            x_star,
            y_star,
            m,
        } => {
            let m2 = dot(x_star, &sub(y, x)).min(dot(y_star, &sub(x, y)));
            close(*m, m2, "m")?;
            if m2 > strict_tol(m2, 0.0) {
                Ok(())
            } else {
                Err(format!("no violation: min product {m2}"))
            }
        }
        Witness::RobustPrimalViolation { v_star, inner } => {
            let perturbed = f
                .perturbed(v_star)
                .map_err(|e| format!("perturbation: {e}"))?;
            reverify(&perturbed, inner)
        }
        Witness::PairsViolation {
            x,
            y,
            x_star,
            y_star,
            alpha,
            premise_margin,
            monotone_gap,
        } => {
            let forward = sub(y, x);
            let m = dot(x_star, &forward).min(dot(y_star, &sub(x, y)));
            let premise2 = m + alpha * norm(&forward);
            let gap2 = dot(&sub(x_star, y_star), &sub(x, y));
            close(*premise_margin, premise2, "premise_margin")?;
            close(*monotone_gap, gap2, "monotone_gap")?;
            if premise2 > strict_tol(m, alpha * norm(&forward))
                && gap2 < -strict_tol(gap2, 0.0)
            {
                Ok(())
            } else {
                Err(format!(
                    "no violation: premise {premise2}, monotone gap {gap2}"
                ))
            }
        }
        Witness::LscViolation { x, y, phi_x, phi_y } => {
            close(*phi_x, f.eval(x).value(), "phi_x")?;
            close(*phi_y, f.eval(y).value(), "phi_y")?;
            if f.eval(y).value() < phi_x - strict_tol(*phi_x, *phi_y) {
                Ok(())
            } else {
                Err("no violation: nearby value not below phi(x)".into())
            }
        }
    }
}
