//! Point probabilities: closed forms, convergent series, asymptotic
//! expansions, and numerical inversion as the general fallback.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::distributions::{DiscreteStableDist, Sds};
use crate::series::{self, LaurentSeries, SupportKind};
use crate::special_fn::{
    bell_complete, bessel_i_scaled, kummer_1f1, laguerre_gen, log_gamma, log_gamma_signed,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PmfMethod {
    ClosedForm,
    SeriesSum,
    CfInversion,
    Asymptotic,
    TemperedMoments,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PmfResult {
    pub values: LaurentSeries,
    pub method: PmfMethod,
    /// Grid size used by numerical inversion.
    pub grid: Option<usize>,
    /// Bound or estimate of the absolute error per coefficient.
    pub error_estimate: f64,
}

fn check_lambda(lambda: f64, context: &str) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("lambda", "(0,inf)", context))
    }
}

fn log_sum_exp(logs: &[f64]) -> f64 {
    let mx = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if mx == f64::NEG_INFINITY {
        return mx;
    }
    mx + logs.iter().map(|l| (l - mx).exp()).sum::<f64>().ln()
}

/// `P(X = k)` for `PDS(1, λ, κ)`:
/// `e^{-λ} Σ_{s<k} λ^{s+1}/(s+1)! C(k-1, s) κ^{k-s-1} (1-κ)^{s+1}`.
fn pds_gamma1_term(lambda: f64, kappa: f64, k: u64, ln_int: &[f64]) -> f64 {
    if k == 0 {
        return (-lambda).exp();
    }
    let ln_l = lambda.ln();
    if kappa == 0.0 {
        let ln_fact: f64 = ln_int[1..=k as usize].iter().sum();
        return (-lambda + k as f64 * ln_l - ln_fact).exp();
    }
    let ln_ratio = (1.0 - kappa).ln() - kappa.ln();
    let mut logs = Vec::with_capacity(k as usize);
    let mut lt = ln_l + (k - 1) as f64 * kappa.ln() + (1.0 - kappa).ln();
    logs.push(lt);
    for s in 0..(k - 1) as usize {
        // t_{s+1}/t_s = λ/(s+2) · (k-1-s)/(s+1) · (1-κ)/κ
        lt += ln_l - ln_int[s + 2] + ln_int[k as usize - 1 - s] - ln_int[s + 1] + ln_ratio;
        logs.push(lt);
    }
    (-lambda + log_sum_exp(&logs)).exp()
}

fn ln_integers(n: u64) -> Vec<f64> {
    (0..=n.max(2)).map(|i| (i as f64).ln()).collect()
}

/// PMF of `PDS(1, λ, κ)` on `0..=k_hi`; `κ = 0` is the Poisson law.
pub fn pmf_pds_gamma1(lambda: f64, kappa: f64, k_hi: u64) -> Result<PmfResult> {
    check_lambda(lambda, "pmf_pds_gamma1")?;
    if !(0.0..1.0).contains(&kappa) {
        return Err(Error::domain("kappa", "[0,1)", "pmf_pds_gamma1"));
    }
    let ln_int = ln_integers(k_hi + 1);
    let coeffs = (0..=k_hi)
        .map(|k| pds_gamma1_term(lambda, kappa, k, &ln_int))
        .collect();
    Ok(PmfResult {
        values: LaurentSeries::new(0, coeffs, 1),
        method: PmfMethod::ClosedForm,
        grid: None,
        error_estimate: 1e-15,
    })
}

/// Same as [`pmf_pds_gamma1`] on the lattice `m·N0`, up to `k_hi`.
pub fn pmf_pds_gamma1_lattice(lambda: f64, kappa: f64, m: u32, k_hi: u64) -> Result<PmfResult> {
    let mut r = pmf_pds_gamma1(lambda, kappa, k_hi / m.max(1) as u64)?;
    r.values = r.values.dilate(m);
    Ok(r)
}

fn check_kummer(lambda: f64, kappa: f64, k: u64, ctx: &str) -> Result<()> {
    check_lambda(lambda, ctx)?;
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::domain("kappa", "(0,1)", ctx));
    }
    if k < 1 {
        return Err(Error::domain("k", "{1, 2, ...}", ctx));
    }
    Ok(())
}

/// `e^{-λ} λ(1-κ) κ^{k-1} 1F1(1-k; 2; λ(κ-1)/κ)`.
pub fn pmf_pds_gamma1_kummer(lambda: f64, kappa: f64, k: u64) -> Result<f64> {
    check_kummer(lambda, kappa, k, "pmf_pds_gamma1_kummer")?;
    let x = lambda * (kappa - 1.0) / kappa;
    let f = kummer_1f1(1.0 - k as f64, 2.0, x)?;
    Ok((-lambda).exp() * lambda * (1.0 - kappa) * kappa.powi(k as i32 - 1) * f)
}

/// `e^{-λ} λ(1-κ) κ^{k-1} L_{k-1}^{(1)}(λ(κ-1)/κ) / k`.
pub fn pmf_pds_gamma1_laguerre(lambda: f64, kappa: f64, k: u64) -> Result<f64> {
    check_kummer(lambda, kappa, k, "pmf_pds_gamma1_laguerre")?;
    let x = lambda * (kappa - 1.0) / kappa;
    let l = laguerre_gen(k - 1, 1.0, x);
    Ok((-lambda).exp() * lambda * (1.0 - kappa) * kappa.powi(k as i32 - 1) * l / k as f64)
}

/// `e^{-λ} I_k(λ)`, the symmetric law with `γ = 1`, `κ = 0`.
pub fn pmf_sds_gamma1(lambda: f64, k: i64) -> Result<f64> {
    check_lambda(lambda, "pmf_sds_gamma1")?;
    bessel_i_scaled(k, lambda)
}

const SERIES_MAX_LAMBDA: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub terms: usize,
    /// Largest summand; its rounding error bounds the achievable accuracy.
    pub max_term: f64,
    pub unstable: bool,
}

/// Coefficient of `z^k` in `((1-z)(1-1/z)/2)^a`:
/// `(-1)^k Γ(2a+1) / (2^a Γ(a+k+1) Γ(a-k+1))`.
pub fn central_coefficient(a: f64, k: i64) -> Result<f64> {
    let k = k.unsigned_abs() as f64;
    if a == 0.0 {
        return Ok(if k == 0.0 { 1.0 } else { 0.0 });
    }
    let r = a - k + 1.0;
    if r <= 0.0 && r.fract() == 0.0 {
        return Ok(0.0);
    }
    let (lg_r, sign_r) = log_gamma_signed(r)?;
    let sign = if k as u64 % 2 == 0 { 1.0 } else { -1.0 } * sign_r;
    let ln = log_gamma(2.0 * a + 1.0)? - log_gamma(a + k + 1.0)? - lg_r - a * LN_2;
    Ok(sign * ln.exp())
}

/// `P(X = k)` for `SDS(γ, λ)` from the double series
/// `Σ_j Σ_i (-1)^{i+j} C(γj, i) λ^j/j! 2^{-i} C(i, (i+k)/2)`,
/// with the inner sum over `i` taken in closed form.
pub fn pmf_sds_series(gamma: f64, lambda: f64, k: i64, tol: f64) -> Result<SeriesValue> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::domain("gamma", "(0,1]", "pmf_sds_series"));
    }
    check_lambda(lambda, "pmf_sds_series")?;
    if lambda > SERIES_MAX_LAMBDA {
        return Err(Error::Instability(format!(
            "lambda = {lambda} exceeds {SERIES_MAX_LAMBDA}; use characteristic-function inversion"
        )));
    }
    let peak = lambda * 2f64.powf(gamma);
    let mut sum = 0.0;
    let mut max_term: f64 = 0.0;
    let mut log_w = 0.0; // ln(λ^j / j!)
    for j in 0..10_000usize {
        if j > 0 {
            log_w += lambda.ln() - (j as f64).ln();
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let c = central_coefficient(gamma * j as f64, k)?;
        let term = sign * log_w.exp() * c;
        sum += term;
        max_term = max_term.max(term.abs());
        let bound = log_w.exp() * 2f64.powf(gamma * j as f64);
        if j as f64 > peak + 1.0 && bound < tol * 1e-3 {
            return Ok(SeriesValue {
                value: sum,
                terms: j + 1,
                max_term,
                unstable: max_term * f64::EPSILON > tol,
            });
        }
    }
    Err(Error::NonConvergence(format!(
        "SDS series at gamma = {gamma}, lambda = {lambda}, k = {k}"
    )))
}

/// Single-passage probabilities `(-1)^{j-1} C(1/2, j)` at `2j-1`, on `0..=n_hi`.
fn first_passage_unit(n_hi: usize) -> Vec<f64> {
    let mut v = vec![0.0; n_hi + 1];
    let mut a = 0.5;
    let mut j = 1usize;
    while 2 * j - 1 <= n_hi {
        v[2 * j - 1] = a;
        a *= (j as f64 - 0.5) / (j as f64 + 1.0);
        j += 1;
    }
    v
}

fn convolve(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// PMF of `FirstPassage(M, m)` on `0..=k_hi`.
pub fn pmf_first_passage_vec(big_m: u32, m: u32, k_hi: u64) -> Result<LaurentSeries> {
    if big_m < 1 {
        return Err(Error::domain("M", "{1, 2, ...}", "pmf_first_passage"));
    }
    if m < 1 {
        return Err(Error::domain("m", "{1, 2, ...}", "pmf_first_passage"));
    }
    let n_hi = (k_hi / m as u64) as usize;
    let unit = first_passage_unit(n_hi);
    let mut acc = unit.clone();
    for _ in 1..big_m {
        acc = convolve(&acc, &unit, n_hi + 1);
    }
    let mut s = LaurentSeries::new(0, acc, 1).dilate(m);
    s = s.window(0, k_hi as i64);
    Ok(s)
}

/// `P(X = k)` for `FirstPassage(M, m)`.
pub fn pmf_first_passage(big_m: u32, m: u32, k: i64) -> Result<f64> {
    if k < 0 {
        return Ok(0.0);
    }
    Ok(pmf_first_passage_vec(big_m, m, k as u64)?.get(k))
}

const TEMPERED_MAX_K: u64 = 20;

/// Cumulants `κ_n = (-1)^{n+1} γ(γ-1)...(γ-n+1) θ^{γ-n}`, `n = 1..=count`,
/// of the tempered stable law with cumulant function `θ^γ - (θ-u)^γ`.
pub fn tempered_cumulants(gamma: f64, theta: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    let mut falling = 1.0;
    for n in 1..=count {
        falling *= gamma - (n - 1) as f64;
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        out.push(sign * falling * theta.powf(gamma - n as f64));
    }
    out
}

/// `P(X = k) = e^{-λ} λ^{k/γ} E[Y^k] / k!` for `PDS(γ, λ, 0)`, with the
/// moments of the tempered stable `Y` from its cumulants.
pub fn pmf_pds_tempered(gamma: f64, lambda: f64, k: u64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::domain("gamma", "(0,1)", "pmf_pds_tempered"));
    }
    check_lambda(lambda, "pmf_pds_tempered")?;
    if k > TEMPERED_MAX_K {
        return Err(Error::domain("k", "[0, 20]", "pmf_pds_tempered"));
    }
    let theta = lambda.powf(1.0 / gamma);
    let moment = bell_complete(&tempered_cumulants(gamma, theta, k as usize))?;
    let ln_fact: f64 = (1..=k).map(|i| (i as f64).ln()).sum();
    let ln_pref = -lambda + k as f64 / gamma * lambda.ln() - ln_fact;
    Ok(ln_pref.exp() * moment)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticValue {
    pub value: f64,
    /// The remainder is `O(n^{-order})`.
    pub order: f64,
    /// Size of the first omitted term.
    pub next_term: f64,
}

fn check_asymptotic(gamma: f64, lambda: f64, n: i64, terms: usize) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::domain("gamma", "(0,1)", "pmf_sds_asymptotic"));
    }
    check_lambda(lambda, "pmf_sds_asymptotic")?;
    if n < 10 {
        return Err(Error::domain("n", "[10, inf)", "pmf_sds_asymptotic"));
    }
    if terms < 1 {
        return Err(Error::domain("terms", "{1, 2, ...}", "pmf_sds_asymptotic"));
    }
    if n as f64 - gamma * terms as f64 <= 0.0 {
        return Err(Error::domain(
            "terms",
            "values with n - gamma*terms > 0",
            "pmf_sds_asymptotic",
        ));
    }
    Ok(())
}

fn weight(gamma: f64, lambda: f64, j: usize) -> Result<f64> {
    let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
    let ln_fact: f64 = (1..=j).map(|i| (i as f64).ln()).sum();
    Ok(sign * (j as f64 * lambda.ln() - ln_fact).exp() * (gamma * j as f64 * PI).sin())
}

/// `(2^{-n}/π) Σ_{j=1}^{terms} (-1)^{j+1}/j! λ^j sin(γjπ) B(γj+1, n-γj)`.
pub fn pmf_sds_asymptotic(gamma: f64, lambda: f64, n: i64, terms: usize) -> Result<AsymptoticValue> {
    check_asymptotic(gamma, lambda, n, terms)?;
    let nf = n as f64;
    let term = |j: usize| -> Result<f64> {
        let a = gamma * j as f64;
        if nf - a <= 0.0 {
            return Ok(f64::NAN);
        }
        let ln_b = log_gamma(a + 1.0)? + log_gamma(nf - a)? - log_gamma(nf + 1.0)?;
        Ok(weight(gamma, lambda, j)? * (ln_b - nf * LN_2).exp() / PI)
    };
    let mut value = 0.0;
    for j in 1..=terms {
        value += term(j)?;
    }
    Ok(AsymptoticValue {
        value,
        order: gamma * (terms + 1) as f64 + 1.0,
        next_term: term(terms + 1)?.abs(),
    })
}

/// `(2^{-n}/π) Σ_{j=1}^{[(γ+1)/γ]} (-1)^{j+1}/j! λ^j Γ(γj+1) sin(γjπ) n^{-γj-1}`.
pub fn pmf_sds_asymptotic_simple(gamma: f64, lambda: f64, n: i64) -> Result<AsymptoticValue> {
    let terms = ((gamma + 1.0) / gamma).floor() as usize;
    check_asymptotic(gamma, lambda, n, terms)?;
    let nf = n as f64;
    let term = |j: usize| -> Result<f64> {
        let a = gamma * j as f64;
        let ln = log_gamma(a + 1.0)? - (a + 1.0) * nf.ln() - nf * LN_2;
        Ok(weight(gamma, lambda, j)? * ln.exp() / PI)
    };
    let mut value = 0.0;
    for j in 1..=terms {
        value += term(j)?;
    }
    Ok(AsymptoticValue {
        value,
        order: gamma + 2.0,
        next_term: term(terms + 1)?.abs(),
    })
}

/// Expansion built from the exact Bessel integral
/// `∫ e^{-s} I_n(s) s^{-a-1} ds = 2^a Γ(a+1/2) Γ(n-a) / (√π Γ(n+a+1))`:
/// `(1/π) Σ_j (-1)^{j+1}/j! λ^j Γ(γj+1) sin(γjπ) 2^{γj} Γ(γj+1/2) Γ(n-γj) / (√π Γ(n+γj+1))`.
pub fn pmf_sds_asymptotic_bessel(
    gamma: f64,
    lambda: f64,
    n: i64,
    terms: usize,
) -> Result<AsymptoticValue> {
    check_asymptotic(gamma, lambda, n, terms)?;
    let nf = n as f64;
    let term = |j: usize| -> Result<f64> {
        let a = gamma * j as f64;
        if nf - a <= 0.0 {
            return Ok(f64::NAN);
        }
        let ln = log_gamma(a + 1.0)? + a * LN_2 + log_gamma(a + 0.5)? + log_gamma(nf - a)?
            - log_gamma(nf + a + 1.0)?
            - 0.5 * PI.ln();
        Ok(weight(gamma, lambda, j)? * ln.exp() / PI)
    };
    let mut value = 0.0;
    for j in 1..=terms {
        value += term(j)?;
    }
    Ok(AsymptoticValue {
        value,
        order: gamma * (terms + 1) as f64 + 1.0 + gamma,
        next_term: term(terms + 1)?.abs(),
    })
}

/// PMF on `k_lo..=k_hi` by numerical inversion: two-sided laws through the
/// characteristic function on the unit circle, one-sided laws through the
/// generating function on a damped circle.
pub fn pmf_numeric(dist: &DiscreteStableDist, k_lo: i64, k_hi: i64) -> Result<PmfResult> {
    pmf_numeric_grid(dist, k_lo, k_hi, series::DEFAULT_GRID)
}

/// [`pmf_numeric`] with a caller-chosen starting grid.
pub fn pmf_numeric_grid(
    dist: &DiscreteStableDist,
    k_lo: i64,
    k_hi: i64,
    n_grid: usize,
) -> Result<PmfResult> {
    let ex = match dist.support().kind {
        SupportKind::TwoSided => {
            let d = *dist;
            series::pmf_from_cf_grid(move |t| d.char_fn(t), k_lo, k_hi, n_grid)?
        }
        _ => series::extract_pmf(&dist.to_pgf(), k_lo, k_hi, n_grid)?,
    };
    let mut values = ex.series;
    values.clip_probabilities(&dist.to_string())?;
    Ok(PmfResult {
        values: LaurentSeries::new(values.k_min(), values.coeffs().to_vec(), dist.lattice()),
        method: PmfMethod::CfInversion,
        grid: Some(ex.grid),
        error_estimate: ex.max_change.max(1e-13),
    })
}

/// Best available PMF on `k_lo..=k_hi`: closed forms where they exist,
/// otherwise numerical inversion.
pub fn pmf(dist: &DiscreteStableDist, k_lo: i64, k_hi: i64) -> Result<PmfResult> {
    if k_hi < k_lo {
        return Err(Error::domain("k_hi", "[k_lo, inf)", "pmf"));
    }
    let closed = |s: LaurentSeries| PmfResult {
        values: s,
        method: PmfMethod::ClosedForm,
        grid: None,
        error_estimate: 1e-15,
    };
    match *dist {
        DiscreteStableDist::Pds(p) if p.gamma() == 1.0 => {
            let hi = k_hi.max(0) as u64;
            let r = pmf_pds_gamma1_lattice(p.lambda(), p.kappa(), p.m(), hi)?;
            Ok(closed(r.values.window(k_lo, k_hi)))
        }
        DiscreteStableDist::Sds(s) if s.gamma() == 1.0 && s.kappa() == 0.0 => {
            let m = s.m() as i64;
            let coeffs = (k_lo..=k_hi)
                .map(|k| {
                    if k % m == 0 {
                        pmf_sds_gamma1(s.lambda(), k / m)
                    } else {
                        Ok(0.0)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(closed(LaurentSeries::new(k_lo, coeffs, s.m())))
        }
        DiscreteStableDist::FirstPassage(f) => {
            let s = pmf_first_passage_vec(f.big_m(), f.m(), k_hi.max(0) as u64)?;
            Ok(closed(s.window(k_lo, k_hi)))
        }
        _ => pmf_numeric(dist, k_lo, k_hi),
    }
}

/// `P(|X| > x)` for a symmetric law from its characteristic function,
/// as `1 - Σ_{|k| <= x} p_k` with the window grown until the tail is resolved.
pub fn sds_tail_probability(d: &Sds, x: i64) -> Result<f64> {
    let dd = *d;
    let ex = series::pmf_from_cf_grid(
        move |t| Ok(Complex64::new(dd.char_fn(t), 0.0)),
        -x,
        x,
        1 << 16,
    )?;
    Ok(1.0 - ex.series.total())
}
