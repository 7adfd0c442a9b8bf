//! Power and Laurent series: coefficient extraction from generating
//! functions, composition, and lattice inversion of characteristic functions.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default starting grid for coefficient extraction.
pub const DEFAULT_GRID: usize = 4096;
/// Largest grid the doubling loop will try.
pub const MAX_GRID: usize = 1 << 24;
/// Doubling stops once no coefficient moves by more than this.
pub const STABLE_TOL: f64 = 1e-8;
/// Coefficients smaller than this in magnitude are set to zero.
pub const CLAMP: f64 = 1e-14;
/// Most negative coefficient tolerated in a probability vector.
pub const NEG_TOL: f64 = 1e-12;

const PARALLEL_MIN: usize = 1 << 14;
// aliasing weight of the wrapped coefficients for one-sided extraction
const ONE_SIDED_DAMPING: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportKind {
    NonNegative,
    NonPositive,
    TwoSided,
}

/// Coefficients `c_k` for `k` in `k_min..=k_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentSeries {
    k_min: i64,
    coeffs: Vec<f64>,
    lattice: u32,
}

impl LaurentSeries {
    pub fn new(k_min: i64, coeffs: Vec<f64>, lattice: u32) -> Self {
        LaurentSeries {
            k_min,
            coeffs,
            lattice: lattice.max(1),
        }
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.coeffs.len() as i64 - 1
    }

    pub fn lattice(&self) -> u32 {
        self.lattice
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient at `k`, zero outside the stored range.
    pub fn get(&self, k: i64) -> f64 {
        if k < self.k_min || k > self.k_max() {
            return 0.0;
        }
        self.coeffs[(k - self.k_min) as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.k_min + i as i64, c))
    }

    pub fn total(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    /// Relabel `k ↦ m·k`, the PMF of `m·X`.
    pub fn dilate(&self, m: u32) -> Self {
        if m <= 1 {
            return self.clone();
        }
        let k_min = self.k_min * m as i64;
        let mut coeffs = vec![0.0; (self.coeffs.len() - 1) * m as usize + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i * m as usize] = c;
        }
        LaurentSeries::new(k_min, coeffs, self.lattice * m)
    }

    /// Restrict (or zero-pad) to `lo..=hi`.
    pub fn window(&self, lo: i64, hi: i64) -> Self {
        let coeffs = (lo..=hi).map(|k| self.get(k)).collect();
        LaurentSeries::new(lo, coeffs, self.lattice)
    }

    /// Zero out roundoff-sized coefficients.
    pub fn clamp_small(&mut self) {
        for c in &mut self.coeffs {
            if c.abs() < CLAMP {
                *c = 0.0;
            }
        }
    }

    /// Clip small negatives to zero, failing on anything below `-NEG_TOL`.
    pub fn clip_probabilities(&mut self, context: &str) -> Result<()> {
        let k_min = self.k_min;
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            if *c < -NEG_TOL {
                return Err(Error::NegativeMass {
                    k: k_min + i as i64,
                    value: *c,
                    context: context.to_string(),
                });
            }
            if *c < 0.0 {
                *c = 0.0;
            }
        }
        Ok(())
    }
}

type Evaluator = dyn Fn(Complex64) -> Result<Complex64> + Send + Sync;

/// A probability generating function `z ↦ E z^X` given as an evaluator.
#[derive(Clone)]
pub struct AnalyticPgf {
    eval: Arc<Evaluator>,
    support: SupportKind,
    lattice: u32,
    radius_at_one: Option<f64>,
}

impl std::fmt::Debug for AnalyticPgf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AnalyticPgf")
            .field("support", &self.support)
            .field("lattice", &self.lattice)
            .field("radius_at_one", &self.radius_at_one)
            .finish()
    }
}

impl AnalyticPgf {
    pub fn new<F>(support: SupportKind, lattice: u32, f: F) -> Self
    where
        F: Fn(Complex64) -> Result<Complex64> + Send + Sync + 'static,
    {
        AnalyticPgf {
            eval: Arc::new(f),
            support,
            lattice: lattice.max(1),
            radius_at_one: None,
        }
    }

    /// Record that the function is analytic on the disc `|z - 1| < r`.
    pub fn with_radius_at_one(mut self, r: f64) -> Self {
        self.radius_at_one = Some(r);
        self
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        (self.eval)(z)
    }

    pub fn support(&self) -> SupportKind {
        self.support
    }

    pub fn lattice(&self) -> u32 {
        self.lattice
    }

    pub fn radius_at_one(&self) -> Option<f64> {
        self.radius_at_one
    }

    pub fn identity() -> Self {
        AnalyticPgf::new(SupportKind::NonNegative, 1, Ok).with_radius_at_one(f64::INFINITY)
    }

    /// Poisson(λ) generating function `exp(λ(z-1))`.
    pub fn poisson(lambda: f64) -> Self {
        AnalyticPgf::new(SupportKind::NonNegative, 1, move |z| {
            Ok(((z - 1.0) * lambda).exp())
        })
        .with_radius_at_one(f64::INFINITY)
    }

    /// Generating function of a finitely supported sequence.
    pub fn from_series(s: &LaurentSeries) -> Self {
        let support = if s.k_min() >= 0 {
            SupportKind::NonNegative
        } else if s.k_max() <= 0 {
            SupportKind::NonPositive
        } else {
            SupportKind::TwoSided
        };
        let k_min = s.k_min();
        let coeffs = s.coeffs().to_vec();
        AnalyticPgf::new(support, s.lattice(), move |z| {
            // Horner in z, then shift by z^{k_min}
            let mut acc = Complex64::new(0.0, 0.0);
            for &c in coeffs.iter().rev() {
                acc = acc * z + c;
            }
            Ok(acc * z.powi(k_min as i32))
        })
    }
}

/// Result of a coefficient extraction together with its doubling diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extraction {
    pub series: LaurentSeries,
    /// Final number of sample points.
    pub grid: usize,
    /// Largest coefficient change in the last doubling step.
    pub max_change: f64,
}

fn next_pow2(n: usize) -> usize {
    n.max(1).next_power_of_two()
}

/// Extract `c_k = (1/n) Σ_j f(θ_j) ρ^{-k} e^{-ikθ_j}` on a circle of radius ρ,
/// doubling the grid until the window is stable.
fn circle_coefficients<F>(
    sample: F,
    rho: f64,
    k_lo: i64,
    k_hi: i64,
    n_start: usize,
    lattice: u32,
) -> Result<Extraction>
where
    F: Fn(f64) -> Result<Complex64> + Send + Sync,
{
    let mut n = n_start;
    let mut values = eval_points(&sample, n, 0, 1)?;
    let mut prev = coefficients(&values, rho, k_lo, k_hi)?;
    loop {
        if n * 2 > MAX_GRID {
            return Err(Error::NonConvergence(format!(
                "coefficient extraction on [{k_lo}, {k_hi}] still moving at grid {n}"
            )));
        }
        let odd = eval_points(&sample, 2 * n, 1, 2)?;
        let mut merged = Vec::with_capacity(2 * n);
        for (e, o) in values.iter().zip(odd.iter()) {
            merged.push(*e);
            merged.push(*o);
        }
        values = merged;
        n *= 2;
        let cur = coefficients(&values, rho, k_lo, k_hi)?;
        let change = cur
            .iter()
            .zip(prev.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if change <= STABLE_TOL {
            let mut series = LaurentSeries::new(k_lo, cur, lattice);
            series.clamp_small();
            return Ok(Extraction {
                series,
                grid: n,
                max_change: change,
            });
        }
        prev = cur;
    }
}

fn eval_points<F>(sample: &F, n: usize, start: usize, step: usize) -> Result<Vec<Complex64>>
where
    F: Fn(f64) -> Result<Complex64> + Send + Sync,
{
    let count = n / step;
    let theta = |i: usize| 2.0 * PI * ((start + i * step) as f64) / n as f64;
    if count >= PARALLEL_MIN {
        (0..count).into_par_iter().map(|i| sample(theta(i))).collect()
    } else {
        (0..count).map(|i| sample(theta(i))).collect()
    }
}

fn coefficients(values: &[Complex64], rho: f64, k_lo: i64, k_hi: i64) -> Result<Vec<f64>> {
    let n = values.len();
    let mut buf = values.to_vec();
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let inv_n = 1.0 / n as f64;
    let ln_rho = rho.ln();
    (k_lo..=k_hi)
        .map(|k| {
            let idx = k.rem_euclid(n as i64) as usize;
            let c = buf[idx].re * inv_n * (-(k as f64) * ln_rho).exp();
            if c.is_finite() {
                Ok(c)
            } else {
                Err(Error::Overflow(format!("coefficient {k}")))
            }
        })
        .collect()
}

fn initial_grid(support: SupportKind, k_lo: i64, k_hi: i64, n_grid: usize) -> usize {
    let span = match support {
        SupportKind::TwoSided => (k_hi - k_lo + 1).max(1),
        SupportKind::NonNegative => k_hi.max(0) + 1,
        SupportKind::NonPositive => (-k_lo).max(0) + 1,
    } as usize;
    next_pow2(n_grid.max(4 * span))
}

/// Coefficients of `pgf` on `k_lo..=k_hi`.
///
/// Two-sided functions are sampled on the unit circle. One-sided functions
/// are sampled on a circle inside (or, for nonpositive support, outside) the
/// unit disc, which damps the wrapped tail.
pub fn extract_pmf(pgf: &AnalyticPgf, k_lo: i64, k_hi: i64, n_grid: usize) -> Result<Extraction> {
    if k_hi < k_lo {
        return Err(Error::domain("k_hi", "[k_lo, inf)", "extract_pmf"));
    }
    let n = initial_grid(pgf.support(), k_lo, k_hi, n_grid);
    let rho = match pgf.support() {
        SupportKind::TwoSided => 1.0,
        SupportKind::NonNegative => ONE_SIDED_DAMPING.powf(1.0 / n as f64),
        SupportKind::NonPositive => ONE_SIDED_DAMPING.powf(-1.0 / n as f64),
    };
    let f = pgf.clone();
    circle_coefficients(
        move |t| f.eval(Complex64::from_polar(rho, t)),
        rho,
        k_lo,
        k_hi,
        n,
        pgf.lattice(),
    )
}

/// Pointwise composition `outer ∘ inner`.
pub fn compose(outer: &AnalyticPgf, inner: &AnalyticPgf) -> Result<AnalyticPgf> {
    // the inner function must keep the check grid inside the closed disc
    let mut probes: Vec<Complex64> = (0..64)
        .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / 64.0))
        .collect();
    if inner.support() == SupportKind::NonNegative {
        probes.extend((0..16).map(|j| Complex64::new(j as f64 / 16.0, 0.0)));
        probes.extend((1..8).map(|j| Complex64::from_polar(0.5, 2.0 * PI * j as f64 / 8.0)));
    }
    for z in probes {
        let w = inner.eval(z)?;
        if w.norm() > 1.0 + 1e-12 {
            return Err(Error::domain(
                "inner",
                "maps into the closed unit disc",
                format!("compose: |inner({z})| = {}", w.norm()),
            ));
        }
    }
    let support = match (outer.support(), inner.support()) {
        (SupportKind::NonNegative, s) => s,
        (SupportKind::NonPositive, SupportKind::NonNegative) => SupportKind::NonPositive,
        _ => SupportKind::TwoSided,
    };
    let radius = match (outer.radius_at_one(), inner.radius_at_one()) {
        (Some(_), Some(r)) if outer.radius_at_one() == Some(f64::INFINITY) => Some(r),
        _ => None,
    };
    let (o, i) = (outer.clone(), inner.clone());
    let mut out = AnalyticPgf::new(support, inner.lattice(), move |z| o.eval(i.eval(z)?));
    out.radius_at_one = radius;
    Ok(out)
}

/// Characteristic function `t ↦ P(e^{it})`.
pub fn cf_eval(pgf: &AnalyticPgf, t: f64) -> Result<Complex64> {
    pgf.eval(Complex64::from_polar(1.0, t))
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `n`-th derivative at `z = 1` by the Cauchy integral on circles centred at 1.
pub fn numeric_factorial_moment(pgf: &AnalyticPgf, n: u32) -> Result<f64> {
    if n == 0 {
        return Ok(1.0);
    }
    const POINTS: usize = 256;
    let r0 = match pgf.radius_at_one() {
        Some(r) if r.is_finite() => 0.5 * r,
        Some(_) => 1.0,
        None => 0.25,
    };
    let mut rho = r0;
    let mut last: Option<(f64, f64)> = None;
    for _ in 0..8 {
        let est = cauchy_derivative(pgf, n, rho, POINTS);
        if let Ok((value, floor)) = est {
            if let Some((prev, prev_floor)) = last {
                let diff = (value - prev).abs();
                if diff <= 1e-10 * value.abs() + 100.0 * floor.max(prev_floor) {
                    return Ok(value);
                }
            }
            last = Some((value, floor));
        }
        rho *= 0.5;
    }
    Err(Error::NonConvergence(format!(
        "derivative of order {n} at z = 1 did not stabilise"
    )))
}

/// Returns the estimate and its rounding floor.
fn cauchy_derivative(pgf: &AnalyticPgf, n: u32, rho: f64, points: usize) -> Result<(f64, f64)> {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut max_abs: f64 = 0.0;
    for j in 0..points {
        let theta = 2.0 * PI * j as f64 / points as f64;
        let w = Complex64::from_polar(1.0, theta);
        let f = pgf.eval(Complex64::new(1.0, 0.0) + w * rho)?;
        if !f.is_finite() {
            return Err(Error::Overflow("pgf near z = 1".into()));
        }
        max_abs = max_abs.max(f.norm());
        acc += f * Complex64::from_polar(1.0, -(n as f64) * theta);
    }
    let scale = factorial(n) / rho.powi(n as i32);
    let value = scale * acc.re / points as f64;
    Ok((value, scale * max_abs * f64::EPSILON))
}

/// Invert a lattice characteristic function: `p_k = (1/2π)∫ f(t) e^{-ikt} dt`.
pub fn pmf_from_cf<F>(cf: F, k_lo: i64, k_hi: i64) -> Result<Extraction>
where
    F: Fn(f64) -> Result<Complex64> + Send + Sync,
{
    if k_hi < k_lo {
        return Err(Error::domain("k_hi", "[k_lo, inf)", "pmf_from_cf"));
    }
    let n = initial_grid(SupportKind::TwoSided, k_lo, k_hi, DEFAULT_GRID);
    circle_coefficients(cf, 1.0, k_lo, k_hi, n, 1)
}

/// [`pmf_from_cf`] starting from a caller-chosen grid.
pub fn pmf_from_cf_grid<F>(cf: F, k_lo: i64, k_hi: i64, n_grid: usize) -> Result<Extraction>
where
    F: Fn(f64) -> Result<Complex64> + Send + Sync,
{
    let n = initial_grid(SupportKind::TwoSided, k_lo, k_hi, n_grid);
    circle_coefficients(cf, 1.0, k_lo, k_hi, n, 1)
}
