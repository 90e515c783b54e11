//! Points, boxes, segments and seeded deterministic sampling.
//!
//! Everything downstream (checkers, lemma harnesses, reports) relies on two
//! guarantees from this module: all coordinates stay finite, and sampling is
//! a pure function of the seed. The generator is SplitMix64 (Steele, Lea,
//! Flood 2014), implemented inline so results do not depend on an external
//! crate's stream: `state += 0x9E3779B97F4A7C15`, then xor-shift-multiply
//! with 0xBF58476D1CE4E5B9 / 0x94D049BB133111EB as written in `SplitMix64`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("point coordinate {index} is not finite: {value}")]
    NonFiniteCoordinate { index: usize, value: f64 },
    #[error("box interval {index} is empty or inverted: [{lo}, {hi}]")]
    EmptyInterval { index: usize, lo: f64, hi: f64 },
    #[error("segment endpoints coincide")]
    DegenerateSegment,
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),
}

/// A point of R^n. All coordinates are finite by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self, GeometryError> {
        for (index, &value) in coords.iter().enumerate() {
            if !value.is_finite() {
                return Err(GeometryError::NonFiniteCoordinate { index, value });
            }
        }
        Ok(Point(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Vec<f64> {
        p.0
    }
}

// Small vector helpers over raw slices. The checker loops work on &[f64]
// directly; `Point` is the validated boundary type.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add_scaled(a: &[f64], t: f64, d: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), d.len());
    a.iter().zip(d).map(|(x, y)| x + t * y).collect()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    norm(&sub(a, b))
}

/// The affine combination `λ·x + (1−λ)·y`.
pub fn convex_combination(x: &[f64], y: &[f64], lambda: f64) -> Vec<f64> {
    x.iter()
        .zip(y)
        .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
        .collect()
}

/// Axis-aligned closed box, the scan domain of every checker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self, GeometryError> {
        assert_eq!(lo.len(), hi.len(), "box bounds must have equal dimension");
        for (index, (&l, &h)) in lo.iter().zip(&hi).enumerate() {
            if !(l.is_finite() && h.is_finite() && l < h) {
                return Err(GeometryError::EmptyInterval { index, lo: l, hi: h });
            }
        }
        Ok(BoxDomain { lo, hi })
    }

    /// `[lo, hi]^n`, the common symmetric case.
    pub fn cube(lo: f64, hi: f64, dim: usize) -> Result<Self, GeometryError> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| 0.5 * (l + h))
            .collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(&v, (&l, &h))| l <= v && v <= h)
    }

    pub fn diameter(&self) -> f64 {
        dist(&self.hi, &self.lo)
    }
}

/// Open neighborhood of a segment: points within distance `radius` of `[u, v]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SegmentNeighborhood {
    u: Vec<f64>,
    v: Vec<f64>,
    radius: f64,
}

impl SegmentNeighborhood {
    pub fn new(u: Vec<f64>, v: Vec<f64>, radius: f64) -> Result<Self, GeometryError> {
        if radius <= 0.0 {
            return Err(GeometryError::NonPositiveRadius(radius));
        }
        assert_eq!(u.len(), v.len(), "segment endpoints must share a dimension");
        Ok(SegmentNeighborhood { u, v, radius })
    }

    pub fn endpoints(&self) -> (&[f64], &[f64]) {
        (&self.u, &self.v)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Distance from `x` to the segment `[u, v]` (projection clamped to [0,1]).
    pub fn distance_to_segment(&self, x: &[f64]) -> f64 {
        let d = sub(&self.v, &self.u);
        let len2 = dot(&d, &d);
        let t = if len2 == 0.0 {
            0.0
        } else {
            (dot(&sub(x, &self.u), &d) / len2).clamp(0.0, 1.0)
        };
        dist(x, &add_scaled(&self.u, t, &d))
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.distance_to_segment(x) < self.radius
    }
}

/// Deterministic sampling counts shared by every scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub seed: u64,
    pub points_per_box: usize,
    pub lambdas_per_segment: usize,
    pub directions_per_sphere: usize,
    pub refinement_rounds: usize,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan {
            seed: 42,
            points_per_box: 256,
            lambdas_per_segment: 33,
            directions_per_sphere: 8,
            refinement_rounds: 3,
        }
    }
}

impl SamplePlan {
    pub fn with_seed(seed: u64) -> Self {
        SamplePlan {
            seed,
            ..SamplePlan::default()
        }
    }

    /// A cheaper plan for inner loops (robust scans repeat the base scan per
    /// perturbation).
    pub fn with_points(mut self, points: usize) -> Self {
        assert!(points >= 1);
        self.points_per_box = points;
        self
    }

    pub fn validate(&self) -> Result<(), String> {
        let counts = [
            ("points_per_box", self.points_per_box),
            ("lambdas_per_segment", self.lambdas_per_segment),
            ("directions_per_sphere", self.directions_per_sphere),
            ("refinement_rounds", self.refinement_rounds),
        ];
        for (name, c) in counts {
            if c < 1 {
                return Err(format!("{name} must be >= 1, got {c}"));
            }
        }
        Ok(())
    }
}

/// SplitMix64. Fixed algorithm, fixed stream: the same seed yields the same
/// samples on every platform and build.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1), 53 mantissa bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Standard normal via Box–Muller; consumes two uniforms per call.
    pub fn gaussian(&mut self) -> f64 {
        loop {
            let u = self.next_f64();
            let v = self.next_f64();
            if u > 0.0 {
                return (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos();
            }
        }
    }
}

/// Points `u + λ_j (v − u)` for an equispaced λ-grid: of `]0,1[` when `open`
/// (λ_j = j/(k+1)), of `[0,1]` otherwise. Ordered by λ.
pub fn segment_points(
    u: &[f64],
    v: &[f64],
    k: usize,
    open: bool,
) -> Result<Vec<Vec<f64>>, GeometryError> {
    assert!(k >= 1);
    if u == v {
        return Err(GeometryError::DegenerateSegment);
    }
    let d = sub(v, u);
    let lambdas = lambda_grid(k, open);
    Ok(lambdas.iter().map(|&t| add_scaled(u, t, &d)).collect())
}

/// The λ-grid underlying [`segment_points`].
pub fn lambda_grid(k: usize, open: bool) -> Vec<f64> {
    if open {
        (1..=k).map(|j| j as f64 / (k + 1) as f64).collect()
    } else if k == 1 {
        vec![0.0]
    } else {
        (0..k).map(|j| j as f64 / (k - 1) as f64).collect()
    }
}

/// Unit direction vectors. For n = 1 this is exactly `{+1, −1}`; for n ≥ 2 it
/// is ± every coordinate axis followed by `k` seeded quasi-uniform directions
/// (normalized Gaussians). Every vector has Euclidean norm 1 up to 1e−12.
pub fn unit_directions(n: usize, k: usize, seed: u64) -> Vec<Vec<f64>> {
    assert!(n >= 1);
    if n == 1 {
        return vec![vec![1.0], vec![-1.0]];
    }
    let mut dirs = Vec::with_capacity(2 * n + k);
    for axis in 0..n {
        for sign in [1.0, -1.0] {
            let mut d = vec![0.0; n];
            d[axis] = sign;
            dirs.push(d);
        }
    }
    let mut rng = SplitMix64::new(seed ^ 0xD1FF_D1FF_0000_0001);
    while dirs.len() < 2 * n + k {
        let g: Vec<f64> = (0..n).map(|_| rng.gaussian()).collect();
        let len = norm(&g);
        if len > 1e-8 {
            dirs.push(g.iter().map(|c| c / len).collect());
        }
    }
    dirs
}

/// Deterministic scan points for a box: the center first, then a coarse odd
/// lattice (so kinks at the center of symmetric boxes are always probed),
/// then seeded uniform fill up to `count`.
pub fn sample_points(domain: &BoxDomain, count: usize, seed: u64) -> Vec<Vec<f64>> {
    assert!(count >= 1);
    let n = domain.dim();
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(count);
    points.push(domain.center());

    // Odd per-axis lattice: includes box edges and the center.
    let per_axis = match n {
        1 => 9,
        2 => 5,
        _ => 3,
    };
    let mut lattice = vec![vec![]];
    for axis in 0..n {
        let mut next = Vec::new();
        for prefix in &lattice {
            for j in 0..per_axis {
                let t = j as f64 / (per_axis - 1) as f64;
                let mut p: Vec<f64> = prefix.clone();
                p.push(domain.lo()[axis] + t * (domain.hi()[axis] - domain.lo()[axis]));
                next.push(p);
            }
        }
        lattice = next;
    }
    for p in lattice {
        if points.len() >= count {
            return points;
        }
        if p != points[0] {
            points.push(p);
        }
    }

    let mut rng = SplitMix64::new(seed);
    while points.len() < count {
        let p: Vec<f64> = (0..n)
            .map(|axis| rng.uniform(domain.lo()[axis], domain.hi()[axis]))
            .collect();
        points.push(p);
    }
    points
}
