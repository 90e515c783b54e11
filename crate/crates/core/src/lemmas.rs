//! Verification harnesses for the approximate mean value theorem and the
//! constructive segment lemmas behind the robustness criteria.
//!
//! These are not checkers: each harness instantiates a statement whose truth
//! is guaranteed under its hypotheses, so a `FailsAtScale` outcome signals a
//! bug (or a violated hypothesis, which the harness reports separately).
//! Limits and liminfs are realized at finite scales: sequences `x_k → c`
//! become points in shrinking balls, a liminf becomes the minimum over the
//! last three scales, and every trace records exactly what was sampled.

use crate::catalog::FunctionHandle;
use crate::checks::{check_quasiconvex_primal, strict_tol, CheckStatus, Witness};
use crate::exprlang::ExtReal;
use crate::geometry::{
    add_scaled, convex_combination, dist, dot, norm, sub, unit_directions, BoxDomain, SamplePlan,
    SegmentNeighborhood,
};
use crate::subdiff::subgradients_at;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LemmaError {
    #[error("segment endpoints coincide")]
    DegenerateEndpoints,
    #[error("precondition violated ({which}): {detail}")]
    PreconditionViolated { which: String, detail: String },
    #[error("perturbed function shows no quasiconvexity violation at this plan")]
    PerturbationStillQuasiconvexAtScale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IneqVerdict {
    Holds,
    FailsAtScale,
    /// No usable subgradients near the probe point.
    Inconclusive,
}

/// One approximating point `x_k` with its chosen subgradient and the two
/// inner products entering the mean value inequalities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MvtSample {
    pub radius: f64,
    pub x: Vec<f64>,
    pub x_star: Vec<f64>,
    /// `⟨x*, b − x_k⟩`, maximized over the subgradient sample.
    pub inner_to_b: f64,
    /// `⟨x*, b − a⟩`, maximized over the sample.
    pub inner_span: f64,
    /// `⟨x*, b − a⟩` closest to `φ(b) − φ(a)` within the sample.
    pub inner_span_nearest: f64,
    pub phi_x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MvtTrace {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub slope: f64,
    /// Argmin of `ψ(x) = φ(x) − slope·‖x−a‖` on `[a, b]`, kept inside `[a, b)`.
    pub c: Vec<f64>,
    pub psi_c: f64,
    pub samples: Vec<MvtSample>,
    pub mean1: IneqVerdict,
    pub mean1_margin: f64,
    pub mean2: IneqVerdict,
    pub mean2_margin: f64,
    /// Only evaluated when `‖c − a‖ > grid_tol`.
    pub mean3: Option<IneqVerdict>,
    pub mean3_error: Option<f64>,
    /// Did `φ(x_k) → φ(c)` hold over the tail scales?
    pub phi_attentive: bool,
}

const MVT_TOL: f64 = 1e-6;
const MVT_GRID_TOL: f64 = 1e-3;

/// Locates the minimizer of a 1-D function on a grid and sharpens it by
/// pattern search with halving steps. The incumbent only moves on strict
/// improvement, so exact grid minimizers stay exact.
fn grid_argmin(value: impl Fn(f64) -> f64, grid_points: usize, rounds: usize) -> (f64, f64) {
    let mut best_t = 0.0;
    let mut best_v = value(0.0);
    for i in 1..grid_points {
        let t = i as f64 / (grid_points - 1) as f64;
        let v = value(t);
        if v < best_v {
            best_v = v;
            best_t = t;
        }
    }
    let mut step = 0.5 / (grid_points - 1) as f64;
    for _ in 0..rounds {
        for cand in [best_t - step, best_t + step] {
            if (0.0..=1.0).contains(&cand) {
                let v = value(cand);
                if v < best_v {
                    best_v = v;
                    best_t = cand;
                }
            }
        }
        step *= 0.5;
    }
    (best_t, best_v)
}

/// Mean value theorem harness: locates the minimizer `c` of
/// `ψ(x) = φ(x) − slope·‖x−a‖` on `[a, b]` and tests the three slope
/// inequalities on subgradients sampled in shrinking balls around `c`.
pub fn mvt_verify(
    f: &FunctionHandle,
    a: &[f64],
    b: &[f64],
    plan: &SamplePlan,
) -> Result<MvtTrace, LemmaError> {
    if a == b {
        return Err(LemmaError::DegenerateEndpoints);
    }
    let (fa, fb) = (f.eval(a), f.eval(b));
    if !(fa.is_finite() && fb.is_finite()) {
        return Err(LemmaError::PreconditionViolated {
            which: "phi finite at a and b".into(),
            detail: format!("phi(a) = {fa}, phi(b) = {fb}"),
        });
    }
    let span = sub(b, a);
    let length = norm(&span);
    let slope = (fb.value() - fa.value()) / length;
    let psi = |t: f64| {
        let x = add_scaled(a, t, &span);
        let v = f.eval(&x);
        if v.is_finite() {
            v.value() - slope * t * length
        } else {
            f64::INFINITY
        }
    };
    let (mut t_c, mut psi_c) = grid_argmin(psi, 1025, 60);
    if t_c >= 1.0 - 1e-12 {
        // ψ(b) = ψ(a) identically, so a is also a minimizer; keep c in [a, b).
        t_c = 0.0;
        psi_c = psi(0.0);
    }
    let c = add_scaled(a, t_c, &span);
    let phi_c = f.eval(&c).value();

    // Shrinking-ball search for points with usable subgradient samples.
    let dirs = unit_directions(f.dim(), plan.directions_per_sphere, plan.seed);
    let target = fb.value() - fa.value();
    let mut samples = Vec::new();
    for k in 3..=12u32 {
        let radius = 0.5f64.powi(k as i32);
        let mut candidates = vec![c.clone()];
        for d in &dirs {
            candidates.push(add_scaled(&c, radius, d));
        }
        for x in candidates {
            if !f.eval(&x).is_finite() {
                continue;
            }
            let Ok(sample) = subgradients_at(f, &x) else {
                continue;
            };
            if sample.subgradients.is_empty() {
                continue;
            }
            let to_b = sub(b, &x);
            let mut best: Option<(f64, &Vec<f64>)> = None;
            let mut span_max = f64::NEG_INFINITY;
            let mut span_nearest = f64::INFINITY;
            for g in &sample.subgradients {
                let inner = dot(g, &to_b);
                if best.as_ref().is_none_or(|(v, _)| inner > *v) {
                    best = Some((inner, g));
                }
                let s = dot(g, &span);
                span_max = span_max.max(s);
                if (s - target).abs() < (span_nearest - target).abs() {
                    span_nearest = s;
                }
            }
            let (inner_to_b, x_star) = best.expect("nonempty sample");
            samples.push(MvtSample {
                radius,
                x: x.clone(),
                x_star: x_star.clone(),
                inner_to_b,
                inner_span: span_max,
                inner_span_nearest: span_nearest,
                phi_x: f.eval(&x).value(),
            });
            break;
        }
    }

    let (mean1, mean1_margin, mean2, mean2_margin, mean3, mean3_error, phi_attentive);
    if samples.len() < 3 {
        mean1 = IneqVerdict::Inconclusive;
        mean2 = IneqVerdict::Inconclusive;
        mean3 = (t_c * length > MVT_GRID_TOL).then_some(IneqVerdict::Inconclusive);
        mean1_margin = 0.0; // no data
        mean2_margin = 0.0;
        mean3_error = None;
        phi_attentive = false;
    } else {
        let tail = &samples[samples.len() - 3..];
        // liminf over the realized sequence: min over the last three scales.
        let liminf_to_b = tail.iter().map(|s| s.inner_to_b).fold(f64::INFINITY, f64::min);
        let liminf_span = tail.iter().map(|s| s.inner_span).fold(f64::INFINITY, f64::min);
        let rhs1 = slope * dist(b, &c);
        mean1_margin = liminf_to_b - rhs1;
        mean1 = if mean1_margin >= -MVT_TOL {
            IneqVerdict::Holds
        } else {
            IneqVerdict::FailsAtScale
        };
        mean2_margin = liminf_span - target;
        mean2 = if mean2_margin >= -MVT_TOL {
            IneqVerdict::Holds
        } else {
            IneqVerdict::FailsAtScale
        };
        if t_c * length > MVT_GRID_TOL {
            let limit = tail.last().expect("tail of three").inner_span_nearest;
            let err = (limit - target).abs();
            mean3_error = Some(err);
            mean3 = Some(if err <= MVT_TOL * (1.0 + target.abs()) {
                IneqVerdict::Holds
            } else {
                IneqVerdict::FailsAtScale
            });
        } else {
            mean3 = None;
            mean3_error = None;
        }
        phi_attentive = tail
            .iter()
            .all(|s| (s.phi_x - phi_c).abs() <= 1e-6 * (1.0 + phi_c.abs()) + s.radius * 16.0);
    }

    Ok(MvtTrace {
        a: a.to_vec(),
        b: b.to_vec(),
        slope,
        c,
        psi_c,
        samples,
        mean1,
        mean1_margin,
        mean2,
        mean2_margin,
        mean3,
        mean3_error,
        phi_attentive,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ThreePointsOutcome {
    /// A point of `B_λ([u,v])` whose subgradient makes positive product with
    /// `w − x̄`.
    Found {
        x: Vec<f64>,
        x_star: Vec<f64>,
        inner: f64,
    },
    NotFoundAtScale {
        scanned: u64,
        skipped: u64,
    },
}

/// Checks that `v` lies on `[u, w]` within numerical tolerance.
fn on_segment(v: &[f64], u: &[f64], w: &[f64], open: bool) -> bool {
    let d = sub(w, u);
    let len2 = dot(&d, &d);
    if len2 == 0.0 {
        return false;
    }
    let t = dot(&sub(v, u), &d) / len2;
    let off = dist(v, &add_scaled(u, t, &d));
    let scale = 1e-9 * (1.0 + norm(u).max(norm(w)));
    let range_ok = if open {
        t > 1e-9 && t < 1.0 - 1e-9
    } else {
        (-1e-9..=1.0 + 1e-9).contains(&t)
    };
    off <= scale && range_ok
}

/// Searches `B_λ([u,v])` for `(x̄, x̄*)` with `⟨x̄*, w−x̄⟩ > 0`.
///
/// Scan order: the segment grid from `u` to `v`, then the handle's known
/// kinks inside the neighborhood (set-valued subdifferentials live on
/// measure-zero sets the grid misses), then rings around the grid points.
pub fn three_points_witness(
    f: &FunctionHandle,
    u: &[f64],
    v: &[f64],
    w: &[f64],
    lambda: f64,
    plan: &SamplePlan,
) -> Result<ThreePointsOutcome, LemmaError> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(LemmaError::PreconditionViolated {
            which: "lambda > 0".into(),
            detail: format!("lambda = {lambda}"),
        });
    }
    if !on_segment(v, u, w, false) {
        return Err(LemmaError::PreconditionViolated {
            which: "v in [u, w]".into(),
            detail: format!("v = {v:?} is not on the segment"),
        });
    }
    let (fu, fv) = (f.eval(u), f.eval(v));
    if !fu.is_finite() || fv <= fu {
        return Err(LemmaError::PreconditionViolated {
            which: "phi(v) > phi(u)".into(),
            detail: format!("phi(u) = {fu}, phi(v) = {fv}"),
        });
    }

    let neighborhood = SegmentNeighborhood::new(u.to_vec(), v.to_vec(), lambda)
        .expect("lambda checked positive");
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    let seg = sub(v, u);
    let k = plan.lambdas_per_segment.max(2);
    for i in 0..k {
        candidates.push(add_scaled(u, i as f64 / (k - 1) as f64, &seg));
    }
    for kink in f.kinks() {
        if neighborhood.contains(kink) {
            candidates.push(kink.clone());
        }
    }
    let dirs = unit_directions(f.dim(), plan.directions_per_sphere, plan.seed);
    for i in 0..k {
        let base = add_scaled(u, i as f64 / (k - 1) as f64, &seg);
        for r in [0.25 * lambda, 0.5 * lambda, 0.75 * lambda] {
            for d in &dirs {
                let y = add_scaled(&base, r, d);
                if neighborhood.contains(&y) {
                    candidates.push(y);
                }
            }
        }
    }

    let mut scanned = 0u64;
    let mut skipped = 0u64;
    for x in candidates {
        if !f.eval(&x).is_finite() {
            skipped += 1;
            continue;
        }
        let Ok(sample) = subgradients_at(f, &x) else {
            skipped += 1;
            continue;
        };
        if sample.subgradients.is_empty() {
            skipped += 1;
            continue;
        }
        scanned += 1;
        let to_w = sub(w, &x);
        for g in &sample.subgradients {
            let inner = dot(g, &to_w);
            if inner > strict_tol(inner, 0.0) {
                return Ok(ThreePointsOutcome::Found {
                    x,
                    x_star: g.clone(),
                    inner,
                });
            }
        }
    }
    Ok(ThreePointsOutcome::NotFoundAtScale { scanned, skipped })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RadialVerdict {
    Holds,
    FailsAtScale,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialTrace {
    pub verdict: RadialVerdict,
    pub phi_v: f64,
    /// `(t, φ(v + t(u−v)))` for `t = 2^{-j}`, `j = 4..=20`.
    pub values: Vec<(f64, ExtReal)>,
    pub observed_tail: Option<f64>,
}

/// Radial limit check: `φ(v + t(u−v)) → φ(v)` as `t ↓ 0`, valid for
/// quasiconvex lsc φ with `φ(v) ≥ φ(u)`.
///
/// The tolerance includes a first-order allowance `t · slope_est` measured
/// from the larger scales; a fixed tolerance would misclassify any function
/// with `|φ'| ≳ 1` along the ray.
pub fn radial_limit_check(
    f: &FunctionHandle,
    u: &[f64],
    v: &[f64],
) -> Result<RadialTrace, LemmaError> {
    if u == v {
        return Err(LemmaError::DegenerateEndpoints);
    }
    let (fu, fv) = (f.eval(u), f.eval(v));
    if !(fu.is_finite() && fv.is_finite()) {
        return Err(LemmaError::PreconditionViolated {
            which: "phi finite at u and v".into(),
            detail: format!("phi(u) = {fu}, phi(v) = {fv}"),
        });
    }
    let dir = sub(u, v);
    let values: Vec<(f64, ExtReal)> = (4..=20)
        .map(|j| {
            let t = 0.5f64.powi(j);
            (t, f.eval(&add_scaled(v, t, &dir)))
        })
        .collect();
    let observed_tail = values
        .iter()
        .rev()
        .find(|(_, val)| val.is_finite())
        .map(|(_, val)| val.value());
    if fv < fu {
        return Err(LemmaError::PreconditionViolated {
            which: "phi(v) >= phi(u)".into(),
            detail: format!(
                "phi(v) = {} < phi(u) = {}; observed radial tail = {:?}",
                fv.value(),
                fu.value(),
                observed_tail
            ),
        });
    }

    let slope_est = values
        .iter()
        .take(9) // j = 4..=12
        .filter(|(_, val)| val.is_finite())
        .map(|(t, val)| (val.value() - fv.value()).abs() / t)
        .fold(0.0, f64::max);
    let lim_tol = 1e-6 * (1.0 + fv.value().abs());
    let tail = &values[values.len() - 3..];
    let finite_tail: Vec<&(f64, ExtReal)> = tail.iter().filter(|(_, v)| v.is_finite()).collect();
    let verdict = if finite_tail.is_empty() {
        RadialVerdict::Inconclusive
    } else if finite_tail
        .iter()
        .all(|(t, val)| (val.value() - fv.value()).abs() <= lim_tol + t * slope_est)
    {
        RadialVerdict::Holds
    } else {
        RadialVerdict::FailsAtScale
    };
    Ok(RadialTrace {
        verdict,
        phi_v: fv.value(),
        values,
        observed_tail,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Bode2Outcome {
    /// The chain `φ(u) < φ(z) ≤ φ(v) ≤ φ(w)` holds (first link strict).
    Holds { margins: [f64; 3] },
    FailsAtScale { margins: [f64; 3] },
    /// Some hypothesis failed numerically; the chain is not asserted.
    PremiseUnmet { reason: String },
}

/// Checks the four-term value chain forced by a perturbation peak between
/// `u` and `v` on a quasiconvex function.
pub fn bode2_chain_check(
    f: &FunctionHandle,
    v_star: &[f64],
    u: &[f64],
    v: &[f64],
    w: &[f64],
    z: &[f64],
) -> Bode2Outcome {
    let premise = |reason: String| Bode2Outcome::PremiseUnmet { reason };
    if !on_segment(v, u, w, true) {
        return premise(format!("v = {v:?} is not in ]u, w["));
    }
    if !on_segment(z, u, v, true) {
        return premise(format!("z = {z:?} is not in ]u, v["));
    }
    let vals: Vec<ExtReal> = [u, z, v, w].iter().map(|p| f.eval(p)).collect();
    if vals.iter().any(|val| !val.is_finite()) {
        return premise("phi must be finite at u, z, v, w".into());
    }
    let (phi_u, phi_z, phi_v, phi_w) =
        (vals[0].value(), vals[1].value(), vals[2].value(), vals[3].value());
    if phi_u > phi_w {
        return premise(format!("phi(u) = {phi_u} > phi(w) = {phi_w}"));
    }
    let pert = |p: &[f64], val: f64| val + dot(v_star, p);
    let pz = pert(z, phi_z);
    let peak_over = pz - pert(u, phi_u).max(pert(w, phi_w));
    if peak_over <= strict_tol(pz, peak_over) {
        return premise(format!(
            "perturbed value at z exceeds neither endpoint (margin {peak_over})"
        ));
    }

    let margins = [phi_z - phi_u, phi_v - phi_z, phi_w - phi_v];
    let strict_ok = margins[0] > strict_tol(phi_z, phi_u);
    let weak_ok = margins[1] >= -strict_tol(phi_v, phi_z) && margins[2] >= -strict_tol(phi_w, phi_v);
    if strict_ok && weak_ok {
        Bode2Outcome::Holds { margins }
    } else {
        Bode2Outcome::FailsAtScale { margins }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaProbe {
    pub gamma: f64,
    pub r_gamma: f64,
    pub v_gamma: Vec<f64>,
    pub pass: bool,
}

/// Trace of the peak-point construction for a non-quasiconvex perturbation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuacuctriTrace {
    pub v_star: Vec<f64>,
    pub u: Vec<f64>,
    pub w: Vec<f64>,
    pub v0: Vec<f64>,
    pub v: Vec<f64>,
    /// Segment parameters t (of `u + t(w−u)`) in the grid approximation of
    /// the superlevel set L, downsampled for the trace.
    pub l_grid_params: Vec<f64>,
    pub l_count: usize,
    pub grid_tol: f64,
    pub r: f64,
    pub ordering_margins: (f64, f64),
    pub ordering_ok: bool,
    pub peak_margin: f64,
    pub peak_ok: bool,
    pub gamma_probes: Vec<GammaProbe>,
}

/// Runs the construction from a supplied non-quasiconvexity witness
/// `(u, w, v0)` of the perturbed function: builds the superlevel set
/// `L = {z ∈ ]u,w[ : φ_{v*}(z) ≥ φ_{v*}(v0)}` on a grid, takes `r` as the
/// least distance from `L` to `w`, places `v = w + r(u−w)/‖u−w‖`, and probes
/// the three properties.
pub fn tuacuctri_from_witness(
    f: &FunctionHandle,
    v_star: &[f64],
    u: &[f64],
    w: &[f64],
    v0: &[f64],
    plan: &SamplePlan,
) -> Result<TuacuctriTrace, LemmaError> {
    let perturbed = f.perturbed(v_star).map_err(|e| LemmaError::PreconditionViolated {
        which: "perturbation dimension".into(),
        detail: e.to_string(),
    })?;
    let pv0 = perturbed.eval(v0);
    if !pv0.is_finite() {
        return Err(LemmaError::PreconditionViolated {
            which: "phi_{v*}(v0) finite".into(),
            detail: format!("value = {pv0}"),
        });
    }
    let threshold = pv0.value();
    let grid_tol = 1e-6 * (1.0 + threshold.abs());
    let span = sub(w, u);
    let length = norm(&span);

    // Open grid of ]u, w[; membership carries the tolerance band so a
    // single-point L (v0 at an exact peak) is never lost.
    let grid_n = 4097usize;
    let in_l = |t: f64| -> bool {
        let val = perturbed.eval(&add_scaled(u, t, &span));
        !val.is_finite() || val.value() >= threshold - grid_tol
    };
    let mut l_params: Vec<f64> = Vec::new();
    for i in 1..=grid_n {
        let t = i as f64 / (grid_n + 1) as f64;
        if in_l(t) {
            l_params.push(t);
        }
    }
    if l_params.is_empty() {
        // v0 itself belongs to L by definition.
        let t0 = dot(&sub(v0, u), &span) / (length * length);
        l_params.push(t0.clamp(1e-9, 1.0 - 1e-9));
    }
    let l_count = l_params.len();

    // r = inf ‖z − w‖ over L  ⇔  the largest parameter in L; refine the
    // boundary bracket three rounds.
    let mut t_in = *l_params.last().expect("nonempty L");
    let grid_step = 1.0 / (grid_n + 1) as f64;
    let mut t_out = (t_in + grid_step).min(1.0);
    for _ in 0..plan.refinement_rounds {
        let mut next_in = t_in;
        let mut next_out = t_out;
        for s in 1..=8 {
            let t = t_in + (t_out - t_in) * s as f64 / 8.0;
            if t >= 1.0 {
                break;
            }
            if in_l(t) {
                next_in = t;
            } else {
                next_out = t;
                break;
            }
        }
        t_in = next_in;
        t_out = next_out;
    }
    let r = (1.0 - t_in) * length;
    let to_u: Vec<f64> = sub(u, w);
    let v: Vec<f64> = add_scaled(w, r / length, &to_u);

    let (phi_u, phi_v, phi_w) = (f.eval(u), f.eval(&v), f.eval(w));
    let ordering_margins = (
        phi_w.value() - phi_v.value(),
        phi_v.value() - phi_u.value(),
    );
    let ordering_ok = phi_u.is_finite()
        && phi_v.is_finite()
        && ordering_margins.0 >= -strict_tol(phi_w.value(), phi_v.value())
        && ordering_margins.1 > strict_tol(phi_v.value(), phi_u.value());

    let p_at = |p: &[f64]| perturbed.eval(p).value();
    let peak_margin = p_at(&v) - p_at(u).max(p_at(w));
    let peak_ok = peak_margin > strict_tol(p_at(&v), p_at(u).max(p_at(w)));

    let mut gamma_probes = Vec::new();
    for gamma in [0.1, 0.01, 0.001] {
        let r_gamma = (0.5 * r).min(0.5 * gamma);
        let v_gamma = add_scaled(w, (r - r_gamma) / length, &to_u);
        let drop = p_at(&v) - p_at(&v_gamma);
        gamma_probes.push(GammaProbe {
            gamma,
            r_gamma,
            v_gamma: v_gamma.clone(),
            pass: dist(&v_gamma, &v) < gamma && drop > strict_tol(p_at(&v), p_at(&v_gamma)),
        });
    }

    // Downsample the stored grid subset; the count is kept exact.
    let stride = l_params.len().div_ceil(513).max(1);
    let mut l_grid_params: Vec<f64> = l_params.iter().copied().step_by(stride).collect();
    if let Some(&last) = l_params.last() {
        if l_grid_params.last() != Some(&last) {
            l_grid_params.push(last);
        }
    }

    Ok(TuacuctriTrace {
        v_star: v_star.to_vec(),
        u: u.to_vec(),
        w: w.to_vec(),
        v0: v0.to_vec(),
        v,
        l_grid_params,
        l_count,
        grid_tol,
        r,
        ordering_margins,
        ordering_ok,
        peak_margin,
        peak_ok,
        gamma_probes,
    })
}

/// Full construction: finds a quasiconvexity violation of `φ_{v*}` by the
/// primal scan, relabels its endpoints so `φ(u) ≤ φ(w)`, and delegates to
/// [`tuacuctri_from_witness`].
pub fn tuacuctri_construct(
    f: &FunctionHandle,
    v_star: &[f64],
    domain: &BoxDomain,
    plan: &SamplePlan,
) -> Result<TuacuctriTrace, LemmaError> {
    let perturbed = f.perturbed(v_star).map_err(|e| LemmaError::PreconditionViolated {
        which: "perturbation dimension".into(),
        detail: e.to_string(),
    })?;
    let verdict = check_quasiconvex_primal(&perturbed, domain, plan);
    let CheckStatus::Violated(Witness::SegmentViolation { x, y, lambda, .. }) = verdict.status
    else {
        return Err(LemmaError::PerturbationStillQuasiconvexAtScale);
    };
    let v0 = convex_combination(&x, &y, lambda);
    let (u, w) = if f.eval(&x) <= f.eval(&y) {
        (x, y)
    } else {
        (y, x)
    };
    tuacuctri_from_witness(f, v_star, &u, &w, &v0, plan)
}
