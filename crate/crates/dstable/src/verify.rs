//! Numerical checks of stability identities, semigroup laws, limit
//! theorems and tail constants. Every check returns a serializable report.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::distributions::{DiscreteStableDist, Family, Pds, Sds};
use crate::pmf::sds_tail_probability;
use crate::sampler::{sample_positive_stable, RandomStream};
use crate::special_fn::gamma as gamma_fn;
use crate::stats::{normal_quantile, normal_two_sided_p};
use crate::thinning::ThinningOp;
use crate::{Error, Result};

/// Tolerance for the algebraic identities.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Final residual allowed for limit and attraction schedules.
pub const LIMIT_TOL: f64 = 0.02;
/// Relative error allowed for the tail constant at the largest `x`.
pub const TAIL_TOL: f64 = 0.1;
/// False-alarm budget of each statistical check.
pub const ALPHA: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub identity: String,
    pub params: Value,
    pub grid: String,
    pub max_abs_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Residual at each step of a schedule (scale `a`, sample count `n`, or `x`).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub schedule: Vec<(f64, f64)>,
    /// Whether the schedule decreases; schedule checks pass only if it does.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monotone: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl VerificationReport {
    fn new(identity: &str, params: Value, grid: String, residual: f64, tolerance: f64) -> Self {
        VerificationReport {
            identity: identity.to_string(),
            params,
            grid,
            max_abs_residual: residual,
            tolerance,
            passed: residual < tolerance,
            schedule: Vec::new(),
            monotone: None,
            p_value: None,
            note: None,
        }
    }

    fn with_schedule(mut self, schedule: Vec<(f64, f64)>) -> Self {
        let mono = schedule.windows(2).all(|w| w[1].1 < w[0].1);
        self.passed = self.passed && mono;
        self.monotone = Some(mono);
        self.schedule = schedule;
        self
    }

    fn with_note(mut self, note: &str) -> Self {
        self.note = Some(note.to_string());
        self
    }
}

/// Grid of points where an identity is checked.
#[derive(Debug, Clone, PartialEq)]
pub struct ZGrid {
    pub points: Vec<Complex64>,
    pub description: String,
}

impl ZGrid {
    /// `count` Chebyshev-Lobatto points on `[lo, hi]`, both ends included.
    pub fn real_chebyshev(lo: f64, hi: f64, count: usize) -> Self {
        let n = count.max(2) - 1;
        let points = (0..=n)
            .map(|j| {
                let c = (PI * j as f64 / n as f64).cos();
                Complex64::new(0.5 * (lo + hi) + 0.5 * (hi - lo) * c, 0.0)
            })
            .collect();
        ZGrid {
            points,
            description: format!("{count} Chebyshev points on [{lo}, {hi}]"),
        }
    }

    /// `count` equally spaced points on the unit circle.
    pub fn unit_circle(count: usize) -> Self {
        let points = (0..count)
            .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / count as f64))
            .collect();
        ZGrid {
            points,
            description: format!("{count} points on |z| = 1"),
        }
    }

    /// 64 Chebyshev points on `[0.01, 1]` for laws on the nonnegative
    /// integers, 64 points on the unit circle otherwise.
    pub fn default_for(dist: &DiscreteStableDist) -> Self {
        match dist.family() {
            Family::Pds | Family::Tpds | Family::FirstPassage => Self::one_sided(),
            _ => Self::unit_circle(64),
        }
    }

    pub fn one_sided() -> Self {
        Self::real_chebyshev(0.01, 1.0, 64)
    }
}

/// Real grid of `t` values for characteristic functions.
#[derive(Debug, Clone, PartialEq)]
pub struct TGrid {
    pub points: Vec<f64>,
    pub description: String,
}

impl TGrid {
    pub fn uniform(lo: f64, hi: f64, count: usize) -> Self {
        let n = count.max(2) - 1;
        TGrid {
            points: (0..=n).map(|j| lo + (hi - lo) * j as f64 / n as f64).collect(),
            description: format!("{count} points on [{lo}, {hi}]"),
        }
    }
}

impl Default for TGrid {
    fn default() -> Self {
        Self::uniform(-5.0, 5.0, 101)
    }
}

fn params_of(dist: &DiscreteStableDist) -> Value {
    serde_json::to_value(dist).unwrap_or(Value::Null)
}

/// The thinning operator that normalizes `dist` in the first sense.
fn first_sense_op(dist: &DiscreteStableDist, p: f64) -> Result<ThinningOp> {
    match *dist {
        DiscreteStableDist::Pds(d) if d.m() == 1 && d.kappa() == 0.0 => ThinningOp::bernoulli(p),
        DiscreteStableDist::Pds(d) => ThinningOp::mod_geometric(p, d.kappa(), d.m()),
        DiscreteStableDist::Tpds(d) => ThinningOp::chebyshev_thin(p, d.b(), d.m()),
        _ => Err(Error::FamilyMismatch(format!(
            "first-sense stability is checked for PDS and TPDS, not {}",
            dist.family()
        ))),
    }
}

/// `max |P(z) - P(Q_{n^{-1/γ}}(z))^n|` over `n` and the grid.
pub fn verify_first_sense(
    dist: &DiscreteStableDist,
    n_set: &[u32],
    grid: &ZGrid,
) -> Result<VerificationReport> {
    if !matches!(dist, DiscreteStableDist::Pds(_) | DiscreteStableDist::Tpds(_)) {
        first_sense_op(dist, 0.5)?;
    }
    let g = dist.gamma();
    let mut worst: f64 = 0.0;
    let mut schedule = Vec::new();
    for &n in n_set {
        let mut r_n: f64 = 0.0;
        if n > 1 {
            let op = first_sense_op(dist, (n as f64).powf(-1.0 / g))?;
            for &z in &grid.points {
                let gap = Complex64::new(1.0, 0.0) - z;
                let lhs = dist.pgf_gap(z, gap)?;
                let (q, gq) = op.pgf_eval_gap(z, gap)?;
                let rhs = dist.pgf_gap(q, gq)?.powu(n);
                r_n = r_n.max((lhs - rhs).norm());
            }
        }
        schedule.push((n as f64, r_n));
        worst = worst.max(r_n);
    }
    let mut rep = VerificationReport::new(
        "first_sense",
        json!({"dist": params_of(dist), "n": n_set}),
        grid.description.clone(),
        worst,
        IDENTITY_TOL,
    );
    rep.schedule = schedule;
    Ok(rep)
}

/// Target of a second-sense check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SecondSenseTarget {
    Dist(DiscreteStableDist),
    /// `P(z) = z`.
    Degenerate,
}

fn second_sense_op(target: &SecondSenseTarget, n: u32) -> Result<ThinningOp> {
    match *target {
        SecondSenseTarget::Degenerate => ThinningOp::degenerate_portly(n),
        SecondSenseTarget::Dist(DiscreteStableDist::FirstPassage(d)) => {
            ThinningOp::chebyshev_portly(n, d.m())
        }
        SecondSenseTarget::Dist(DiscreteStableDist::GeomPortlyStable(d)) => {
            ThinningOp::geometric_portly((n as f64).powf(-1.0 / d.gamma()))
        }
        SecondSenseTarget::Dist(d) => Err(Error::FamilyMismatch(format!(
            "no portlying operator pairs with {}",
            d.family()
        ))),
    }
}

fn target_pgf(target: &SecondSenseTarget, z: Complex64) -> Result<Complex64> {
    match target {
        SecondSenseTarget::Degenerate => Ok(z),
        SecondSenseTarget::Dist(d) => d.pgf(z),
    }
}

/// `max |P(Q_n(z)) - P(z)^n|` with the paired portlying operator.
pub fn verify_second_sense(
    target: &SecondSenseTarget,
    n_set: &[u32],
    grid: &ZGrid,
) -> Result<VerificationReport> {
    let mut worst: f64 = 0.0;
    for &n in n_set {
        let op = second_sense_op(target, n)?;
        for &z in &grid.points {
            let lhs = target_pgf(target, op.pgf_eval(z)?)?;
            let rhs = target_pgf(target, z)?.powu(n);
            worst = worst.max((lhs - rhs).norm());
        }
    }
    let params = match target {
        SecondSenseTarget::Degenerate => json!({"dist": "degenerate at 1", "n": n_set}),
        SecondSenseTarget::Dist(d) => json!({"dist": params_of(d), "n": n_set}),
    };
    Ok(VerificationReport::new(
        "second_sense",
        params,
        grid.description.clone(),
        worst,
        IDENTITY_TOL,
    ))
}

/// Split used in the third-sense identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Split {
    /// `p^γ = p1^γ + p2^γ`.
    Thinning { p1: f64, p2: f64 },
    /// `n = n1 + n2`.
    Portly { n1: u32, n2: u32 },
}

/// `max |P(Q_p(z)) - P(Q_{p1}(z)) P(Q_{p2}(z))|`.
pub fn verify_third_sense(
    dist: &DiscreteStableDist,
    split: Split,
    grid: &ZGrid,
) -> Result<VerificationReport> {
    let params = json!({"dist": params_of(dist), "split": split});
    let ops = match split {
        Split::Thinning { p1, p2 } => {
            let g = dist.gamma();
            let p = (p1.powf(g) + p2.powf(g)).powf(1.0 / g);
            if p > 1.0 {
                return Ok(VerificationReport::new(
                    "third_sense",
                    params,
                    grid.description.clone(),
                    f64::INFINITY,
                    IDENTITY_TOL,
                )
                .with_note(&format!("infeasible split: p = {p} exceeds 1")));
            }
            // p = 1 is the identity map
            let whole = |q: f64| -> Result<Option<ThinningOp>> {
                if q >= 1.0 {
                    Ok(None)
                } else {
                    first_sense_op(dist, q).map(Some)
                }
            };
            (whole(p)?, whole(p1)?, whole(p2)?)
        }
        Split::Portly { n1, n2 } => {
            let t = SecondSenseTarget::Dist(*dist);
            (
                Some(second_sense_op(&t, n1 + n2)?),
                Some(second_sense_op(&t, n1)?),
                Some(second_sense_op(&t, n2)?),
            )
        }
    };
    let at = |op: &Option<ThinningOp>, z: Complex64| -> Result<Complex64> {
        let gap = Complex64::new(1.0, 0.0) - z;
        let (q, gq) = match op {
            Some(o) => o.pgf_eval_gap(z, gap)?,
            None => (z, gap),
        };
        dist.pgf_gap(q, gq)
    };
    let mut worst: f64 = 0.0;
    for &z in &grid.points {
        let lhs = at(&ops.0, z)?;
        let rhs = at(&ops.1, z)? * at(&ops.2, z)?;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(VerificationReport::new(
        "third_sense",
        params,
        grid.description.clone(),
        worst,
        IDENTITY_TOL,
    ))
}

/// `max |Q1(Q2(z)) - Q2(Q1(z))|` over pairs from one family.
pub fn verify_commutativity(
    pairs: &[(ThinningOp, ThinningOp)],
    grid: &ZGrid,
) -> Result<VerificationReport> {
    let mut worst: f64 = 0.0;
    for (a, b) in pairs {
        if a.family() != b.family() {
            return Err(Error::FamilyMismatch(format!(
                "{:?} and {:?} differ",
                a.family(),
                b.family()
            )));
        }
        a.validate()?;
        b.validate()?;
        for &z in &grid.points {
            let ab = a.pgf_eval(b.pgf_eval(z)?)?;
            let ba = b.pgf_eval(a.pgf_eval(z)?)?;
            worst = worst.max((ab - ba).norm());
        }
    }
    Ok(VerificationReport::new(
        "commutativity",
        serde_json::to_value(pairs).unwrap_or(Value::Null),
        grid.description.clone(),
        worst,
        IDENTITY_TOL,
    ))
}

/// `max |P_λ(z) - P_{λ/n}(z)^n|` for the families with a rate parameter.
pub fn verify_infinite_divisibility(
    dist: &DiscreteStableDist,
    n_set: &[u32],
    grid: &ZGrid,
) -> Result<VerificationReport> {
    let lambda = dist.lambda().ok_or_else(|| {
        Error::FamilyMismatch(format!("{} has no rate parameter", dist.family()))
    })?;
    let mut worst: f64 = 0.0;
    for &n in n_set {
        let part = dist.with_lambda(lambda / n as f64)?;
        for &z in &grid.points {
            let lhs = dist.pgf(z)?;
            let rhs = part.pgf(z)?.powu(n);
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(VerificationReport::new(
        "infinite_divisibility",
        json!({"dist": params_of(dist), "n": n_set}),
        grid.description.clone(),
        worst,
        1e-13,
    ))
}

/// Coupling of parameters with the scale `a` in `X^a = aX`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum LimitRule {
    /// PDS with `κ = 1 - ac`.
    PdsKappa { gamma: f64, lambda: f64, c: f64 },
    /// PDS with `λ = b/a^γ`, `γ < 1`.
    PdsLambda { gamma: f64, kappa: f64, b: f64 },
    /// DS with `2q - 1 = a`.
    DsSkew { gamma: f64, beta: f64, lambda: f64, kappa: f64 },
    /// SDS with `κ = 1 - ac`.
    SdsKappa { gamma: f64, lambda: f64, c: f64 },
    /// SDS with `λ = b/a^{2γ}`.
    SdsLambda { gamma: f64, kappa: f64, b: f64 },
    /// TPDS with `λ = σ/a^{γ/2}`.
    TpdsLambda { gamma: f64, b: f64, sigma: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitSpec {
    pub rule: LimitRule,
    pub scales: Vec<f64>,
}

/// Scales used by default: 0.1, 0.05, 0.025, 0.0125.
pub const DEFAULT_SCALES: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

impl LimitSpec {
    pub fn new(rule: LimitRule, scales: Vec<f64>) -> Result<Self> {
        let ok = !scales.is_empty()
            && scales.iter().all(|&a| a > 0.0 && a.is_finite())
            && scales.windows(2).all(|w| w[1] < w[0]);
        if !ok {
            return Err(Error::domain(
                "scales",
                "a positive strictly decreasing sequence",
                "LimitSpec",
            ));
        }
        Ok(LimitSpec { rule, scales })
    }

    pub fn with_default_scales(rule: LimitRule) -> Result<Self> {
        Self::new(rule, DEFAULT_SCALES.to_vec())
    }

    /// The law of `X` at scale `a`.
    pub fn dist_at(&self, a: f64) -> Result<DiscreteStableDist> {
        match self.rule {
            LimitRule::PdsKappa { gamma, lambda, c } => {
                DiscreteStableDist::pds(gamma, lambda, 1.0 - a * c, 1)
            }
            LimitRule::PdsLambda { gamma, kappa, b } => {
                DiscreteStableDist::pds(gamma, b / a.powf(gamma), kappa, 1)
            }
            LimitRule::DsSkew {
                gamma,
                beta,
                lambda,
                kappa,
            } => DiscreteStableDist::ds(gamma, beta, lambda, (1.0 + a) / 2.0, kappa, 1),
            LimitRule::SdsKappa { gamma, lambda, c } => {
                DiscreteStableDist::sds(gamma, lambda, 1.0 - a * c, 1)
            }
            LimitRule::SdsLambda { gamma, kappa, b } => {
                DiscreteStableDist::sds(gamma, b / a.powf(2.0 * gamma), kappa, 1)
            }
            LimitRule::TpdsLambda { gamma, b, sigma } => {
                DiscreteStableDist::tpds(gamma, sigma / a.powf(gamma / 2.0), b, 1)
            }
        }
    }

    /// Limit characteristic function as stated for each rule.
    pub fn limit_cf(&self, t: f64) -> Result<Complex64> {
        let it = Complex64::new(0.0, t);
        let sgn = t.signum();
        let skewed = |scale: f64, alpha: f64, beta: f64| -> Complex64 {
            if t == 0.0 {
                return Complex64::new(1.0, 0.0);
            }
            let x = t.abs().powf(alpha)
                * scale
                * Complex64::new(1.0, -beta * sgn * (PI * alpha / 2.0).tan());
            (-x).exp()
        };
        Ok(match self.rule {
            LimitRule::PdsKappa { gamma, lambda, c } => {
                if t == 0.0 {
                    return Ok(Complex64::new(1.0, 0.0));
                }
                (-(-it / (c - it)).powf(gamma) * lambda).exp()
            }
            LimitRule::PdsLambda { gamma, kappa, b } => {
                if gamma >= 1.0 {
                    return Err(Error::domain("gamma", "(0,1)", "PDS limit with lambda = b/a^gamma"));
                }
                let sigma = b / (1.0 - kappa).powf(gamma) * (PI * gamma / 2.0).cos();
                skewed(sigma, gamma, 1.0)
            }
            LimitRule::DsSkew {
                gamma,
                beta,
                lambda,
                ..
            } => {
                if gamma >= 1.0 {
                    return Err(Error::domain("gamma", "(0,1)", "DS limit with 2q - 1 = a"));
                }
                skewed(lambda * (PI * gamma / 2.0).cos(), gamma, beta)
            }
            LimitRule::SdsKappa { gamma, lambda, c } => {
                let r = t * t / (t * t + c * c);
                Complex64::new((-lambda * r.powf(gamma)).exp(), 0.0)
            }
            LimitRule::SdsLambda { gamma, kappa, b } => {
                let sigma =
                    b / 2f64.powf(gamma) * (1.0 + kappa).powf(gamma) / (1.0 - kappa).powf(2.0 * gamma);
                Complex64::new((-sigma * t.abs().powf(2.0 * gamma)).exp(), 0.0)
            }
            LimitRule::TpdsLambda { gamma, b, sigma } => {
                if gamma >= 2.0 {
                    return Err(Error::domain("gamma", "(0,2)", "TPDS limit"));
                }
                let s = sigma
                    * 2f64.powf(gamma)
                    * (PI * gamma / 4.0).cos()
                    * ((1.0 + b) / (1.0 - b)).powf(gamma / 2.0);
                skewed(s, gamma / 2.0, 1.0)
            }
        })
    }
}

/// Sup over the `t` grid of `|f^a(t) - φ(t)|` along the scale schedule; the
/// residual must decrease and end below [`LIMIT_TOL`].
pub fn verify_limit(spec: &LimitSpec, grid: &TGrid) -> Result<VerificationReport> {
    let mut schedule = Vec::new();
    for &a in &spec.scales {
        let d = spec.dist_at(a)?;
        let mut sup: f64 = 0.0;
        for &t in &grid.points {
            let fa = d.char_fn(a * t)?;
            sup = sup.max((fa - spec.limit_cf(t)?).norm());
        }
        schedule.push((a, sup));
    }
    let last = schedule.last().map_or(f64::INFINITY, |s| s.1);
    let mut rep = VerificationReport::new(
        "limit",
        serde_json::to_value(spec).unwrap_or(Value::Null),
        grid.description.clone(),
        last,
        LIMIT_TOL,
    )
    .with_schedule(schedule);
    if let LimitRule::DsSkew { kappa, .. } = spec.rule {
        if kappa > 0.0 {
            rep = rep.with_note("remark-level: kappa > 0 is asserted without proof");
        }
    }
    Ok(rep)
}

/// Stable law a normalized sum converges to.
#[derive(Clone, Copy)]
struct Attraction {
    /// Sums of `n` terms are divided by `n^{1/alpha}`.
    alpha: f64,
    limit: fn(&DiscreteStableDist, f64) -> Complex64,
}

fn attraction_of(dist: &DiscreteStableDist) -> Result<Attraction> {
    match *dist {
        DiscreteStableDist::Pds(d) if d.gamma() < 1.0 => Ok(Attraction {
            alpha: d.gamma(),
            limit: |d, t| {
                let DiscreteStableDist::Pds(p) = d else { unreachable!() };
                pds_attraction_limit(p, t)
            },
        }),
        DiscreteStableDist::Sds(d) if d.gamma() < 1.0 => Ok(Attraction {
            alpha: 2.0 * d.gamma(),
            limit: |d, t| {
                let DiscreteStableDist::Sds(s) = d else { unreachable!() };
                sds_attraction_limit(s, t)
            },
        }),
        DiscreteStableDist::FirstPassage(d) if d.big_m() == 1 && d.m() == 1 => Ok(Attraction {
            alpha: 0.5,
            limit: |_, t| (-Complex64::new(0.0, -t).sqrt() * 2f64.sqrt()).exp(),
        }),
        _ => Err(Error::FamilyMismatch(format!(
            "attraction is checked for PDS and SDS with gamma < 1 and FirstPassage(1, 1), not {dist}"
        ))),
    }
}

/// `exp{-λ/(1-κ)^γ cos(πγ/2) |t|^γ (1 - i sign(t) tan(πγ/2))}`.
fn pds_attraction_limit(d: &Pds, t: f64) -> Complex64 {
    if t == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let g = d.gamma();
    let c = d.lambda() / (1.0 - d.kappa()).powf(g) * (PI * g / 2.0).cos();
    let x = c * t.abs().powf(g) * Complex64::new(1.0, -t.signum() * (PI * g / 2.0).tan());
    (-x).exp()
}

/// `exp{-λ/2^γ (1+κ)^γ/(1-κ)^{2γ} |t|^{2γ}}`.
fn sds_attraction_limit(d: &Sds, t: f64) -> Complex64 {
    let g = d.gamma();
    let k = d.kappa();
    let c = d.lambda() / 2f64.powf(g) * (1.0 + k).powf(g) / (1.0 - k).powf(2.0 * g);
    Complex64::new((-c * t.abs().powf(2.0 * g)).exp(), 0.0)
}

/// Sup over `t` of `|f(t/n^{1/α})^n - g(t)|` along the `n` schedule.
pub fn verify_attraction(
    dist: &DiscreteStableDist,
    n_set: &[u64],
    grid: &TGrid,
) -> Result<VerificationReport> {
    let att = attraction_of(dist)?;
    let mut schedule = Vec::new();
    for &n in n_set {
        let nf = n as f64;
        let scale = nf.powf(1.0 / att.alpha);
        let mut sup: f64 = 0.0;
        for &t in &grid.points {
            let z = Complex64::from_polar(1.0, t / scale);
            let fnt = if z == Complex64::new(1.0, 0.0) {
                Complex64::new(1.0, 0.0)
            } else {
                (dist.log_pgf(z)? * nf).exp()
            };
            sup = sup.max((fnt - (att.limit)(dist, t)).norm());
        }
        schedule.push((nf, sup));
    }
    let last = schedule.last().map_or(f64::INFINITY, |s| s.1);
    Ok(VerificationReport::new(
        "attraction",
        json!({"dist": params_of(dist), "n": n_set}),
        grid.description.clone(),
        last,
        LIMIT_TOL,
    )
    .with_schedule(schedule))
}

/// `lim x^{2γ} P(|X| > x)` for `SDS(γ, λ, κ)`:
/// `c/(Γ(1-2γ) cos(πγ))` with `c = λ/2^γ (1+κ)^γ/(1-κ)^{2γ}`, and `2c/π` at `γ = 1/2`.
pub fn tail_constant(gamma: f64, lambda: f64, kappa: f64) -> Result<f64> {
    let c = lambda / 2f64.powf(gamma) * (1.0 + kappa).powf(gamma) / (1.0 - kappa).powf(2.0 * gamma);
    if gamma == 0.5 {
        return Ok(c * 2.0 / PI);
    }
    Ok(c / (gamma_fn(1.0 - 2.0 * gamma)? * (PI * gamma).cos()))
}

/// `|x^{2γ} P(|X| > x)/C - 1|` along `x_set`; must decrease and end below [`TAIL_TOL`].
pub fn verify_tail_constant(
    gamma: f64,
    lambda: f64,
    kappa: f64,
    x_set: &[i64],
) -> Result<VerificationReport> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::domain("gamma", "(0,1)", "verify_tail_constant"));
    }
    let d = Sds::new(gamma, lambda, kappa, 1)?;
    let c = tail_constant(gamma, lambda, kappa)?;
    let mut schedule = Vec::new();
    for &x in x_set {
        let tail = sds_tail_probability(&d, x)?;
        let fitted = (x as f64).powf(2.0 * gamma) * tail;
        schedule.push((x as f64, (fitted / c - 1.0).abs()));
    }
    let last = schedule.last().map_or(f64::INFINITY, |s| s.1);
    Ok(VerificationReport::new(
        "tail_constant",
        json!({"gamma": gamma, "lambda": lambda, "kappa": kappa, "constant": c, "x": x_set}),
        format!("x in {x_set:?}"),
        last,
        TAIL_TOL,
    )
    .with_schedule(schedule))
}

/// Both routes of `E_S[P_{γ'/γ, λ^{1/γ} S}(z)] = P_{γ', λ}(z)`: the Laplace
/// transform of `S` in closed form, and a Monte Carlo average over `S`.
pub fn verify_mixture_characterization(
    gamma_prime: f64,
    gamma: f64,
    lambda: f64,
    kappa: f64,
    grid: &ZGrid,
    draws: usize,
    rng: &mut RandomStream,
) -> Result<(VerificationReport, VerificationReport)> {
    if !(gamma_prime > 0.0 && gamma_prime <= gamma && gamma <= 1.0) {
        return Err(Error::domain(
            "gamma_prime",
            "(0, gamma] with gamma <= 1",
            "verify_mixture_characterization",
        ));
    }
    let target = Pds::new(gamma_prime, lambda, kappa, 1)?;
    // exponent u(z) of the inner law per unit rate
    let inner = Pds::new(gamma_prime / gamma, 1.0, kappa, 1)?;
    let params = json!({"gamma_prime": gamma_prime, "gamma": gamma, "lambda": lambda, "kappa": kappa});
    let mut analytic: f64 = 0.0;
    let mut us = Vec::with_capacity(grid.points.len());
    for &z in &grid.points {
        let u = -inner.log_pgf(z)?;
        us.push(u);
        // E exp(-λ^{1/γ} S u) = exp(-λ u^γ)
        let lhs = (-u.powf(gamma) * lambda).exp();
        analytic = analytic.max((lhs - target.log_pgf(z)?.exp()).norm());
    }
    let exact = VerificationReport::new(
        "mixture_characterization_analytic",
        params.clone(),
        grid.description.clone(),
        analytic,
        1e-13,
    );
    let scale = lambda.powf(1.0 / gamma);
    let mut sums = vec![(Complex64::new(0.0, 0.0), 0.0f64, 0.0f64); us.len()];
    for _ in 0..draws {
        let s = scale * sample_positive_stable(gamma, rng);
        for (acc, &u) in sums.iter_mut().zip(&us) {
            let v = (-u * s).exp();
            acc.0 += v;
            acc.1 += v.re * v.re;
            acc.2 += v.im * v.im;
        }
    }
    let nf = draws as f64;
    let mut max_z: f64 = 0.0;
    let mut tests = 0usize;
    for (acc, &z) in sums.iter().zip(&grid.points) {
        let mean = acc.0 / nf;
        let want = target.log_pgf(z)?.exp();
        for (m, sq, w) in [(mean.re, acc.1, want.re), (mean.im, acc.2, want.im)] {
            let var = (sq / nf - m * m).max(0.0) * nf / (nf - 1.0);
            let se = (var / nf).sqrt();
            if se > 0.0 {
                max_z = max_z.max((m - w).abs() / se);
                tests += 1;
            }
        }
    }
    let tests = tests.max(1);
    // Bonferroni over the grid and both components
    let p_value = (normal_two_sided_p(max_z) * tests as f64).min(1.0);
    let mut mc = VerificationReport::new(
        "mixture_characterization_monte_carlo",
        json!({"params": params, "draws": draws, "seed": rng.seed(), "stream_id": rng.stream_id()}),
        grid.description.clone(),
        max_z,
        normal_quantile(1.0 - ALPHA / (2.0 * tests as f64)),
    );
    mc.p_value = Some(p_value);
    Ok((exact, mc))
}

/// `P(z) = Σ_k P(Y=k) P(Q_{k^{-1/γ}}(z))^k` for `PDS(γ, λ)` with binomial
/// thinning and `Y` on `{1, ..., K}` given by `y_probs[k-1]`.
pub fn verify_random_sum_characterization(
    gamma: f64,
    lambda: f64,
    y_probs: &[f64],
    grid: &ZGrid,
) -> Result<VerificationReport> {
    let total: f64 = y_probs.iter().sum();
    if y_probs.is_empty() || y_probs.iter().any(|&p| p < 0.0) || (total - 1.0).abs() > 1e-12 {
        return Err(Error::domain(
            "y_probs",
            "a probability vector on {1, ..., K}",
            "verify_random_sum_characterization",
        ));
    }
    let d = DiscreteStableDist::pds(gamma, lambda, 0.0, 1)?;
    let mut worst: f64 = 0.0;
    for &z in &grid.points {
        let mut rhs = Complex64::new(0.0, 0.0);
        for (i, &p) in y_probs.iter().enumerate() {
            let k = i as u32 + 1;
            let q = if k == 1 {
                z
            } else {
                ThinningOp::bernoulli((k as f64).powf(-1.0 / gamma))?.pgf_eval(z)?
            };
            rhs += d.pgf(q)?.powu(k) * p;
        }
        worst = worst.max((d.pgf(z)? - rhs).norm());
    }
    Ok(VerificationReport::new(
        "random_sum_characterization",
        json!({"gamma": gamma, "lambda": lambda, "y_probs": y_probs}),
        grid.description.clone(),
        worst,
        IDENTITY_TOL,
    ))
}
