//! Exact samplers built on compound Poisson representations with random
//! stable intensities.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution, Exp1, Gamma, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{
    acos_from_gap, one_minus_r, DiscreteStableDist, Ds, FirstPassage, Pds, Sds, Tpds,
};
use crate::pmf::pmf_first_passage_vec;
use crate::series::{self, AnalyticPgf, LaurentSeries, SupportKind};
use crate::{Error, Result};

/// A seeded ChaCha stream; `(seed, stream_id)` fixes the sequence.
#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha20Rng,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RandomStream {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

// Poisson means above this use a normal approximation.
const POISSON_NORMAL: f64 = 1e18;

/// Uniform on the open interval (0, 1).
pub(crate) fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

pub(crate) fn poisson<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    if !(mean > 0.0) {
        return 0;
    }
    if mean < POISSON_NORMAL {
        let d = Poisson::new(mean).expect("finite positive mean");
        return d.sample(rng) as u64;
    }
    let z: f64 = rng.sample(StandardNormal);
    let v = (mean + mean.sqrt() * z).round();
    if v >= u64::MAX as f64 {
        u64::MAX
    } else {
        v.max(0.0) as u64
    }
}

pub(crate) fn binomial<R: Rng + ?Sized>(rng: &mut R, n: u64, p: f64) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p).expect("valid binomial").sample(rng)
}

/// Failures before the `r`-th success, success probability `p`.
pub(crate) fn neg_binomial<R: Rng + ?Sized>(rng: &mut R, r: u64, p: f64) -> u64 {
    if r == 0 || p >= 1.0 {
        return 0;
    }
    let g = Gamma::new(r as f64, (1.0 - p) / p).expect("valid gamma");
    let mean = g.sample(rng);
    poisson(rng, mean)
}

/// Sum of `r` geometric variables on {1, 2, ...} with success probability `p`.
pub(crate) fn geometric_sum<R: Rng + ?Sized>(rng: &mut R, r: u64, p: f64) -> u64 {
    r.saturating_add(neg_binomial(rng, r, p))
}

pub(crate) fn saturating_i64(v: u64) -> i64 {
    v.min(i64::MAX as u64) as i64
}

/// Inverse-CDF sampler over a probability table, with an optional
/// power-law continuation beyond the table.
#[derive(Debug, Clone)]
pub struct DiscreteTable {
    values: Vec<i64>,
    cdf: Vec<f64>,
    tail: Option<PowerTail>,
}

/// `P(X = k) ∝ k^{-1-index}` beyond the table, on the table's lattice.
#[derive(Debug, Clone, Copy)]
struct PowerTail {
    start: f64,
    index: f64,
    mass: f64,
    step: i64,
}

impl DiscreteTable {
    /// Table over the support of `s`; mass beyond it is dropped and the rest renormalised.
    pub fn new(s: &LaurentSeries) -> Result<Self> {
        Self::build(s, None)
    }

    /// Table over `s` with the missing mass placed on a power-law tail
    /// `P(X = k) ~ C k^{-1-index}` continuing to the right of `s`.
    pub fn with_power_tail(s: &LaurentSeries, index: f64) -> Result<Self> {
        Self::build(s, Some(index))
    }

    fn build(s: &LaurentSeries, tail_index: Option<f64>) -> Result<Self> {
        let step = s.lattice() as i64;
        let mut values = Vec::new();
        let mut cdf = Vec::new();
        let mut acc = 0.0;
        for (k, p) in s.iter() {
            if p < -crate::series::NEG_TOL {
                return Err(Error::NegativeMass {
                    k,
                    value: p,
                    context: "sampling table".into(),
                });
            }
            if p > 0.0 {
                acc += p;
                values.push(k);
                cdf.push(acc);
            }
        }
        if values.is_empty() || !(acc > 0.0) {
            return Err(Error::domain("table", "a vector with positive mass", "DiscreteTable"));
        }
        let tail = match tail_index {
            Some(index) if acc < 1.0 => Some(PowerTail {
                start: (s.k_max() as f64 + 0.5 * step as f64) / step as f64,
                index,
                mass: 1.0 - acc,
                step,
            }),
            _ => None,
        };
        let total = if tail.is_some() { 1.0 } else { acc };
        for c in &mut cdf {
            *c /= total;
        }
        Ok(DiscreteTable { values, cdf, tail })
    }

    /// Mass assigned to the power-law tail.
    pub fn tail_mass(&self) -> f64 {
        self.tail.map_or(0.0, |t| t.mass)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let u: f64 = rng.random();
        let last = *self.cdf.last().expect("nonempty table");
        if u < last || self.tail.is_none() {
            let i = self.cdf.partition_point(|&c| c <= u).min(self.values.len() - 1);
            return self.values[i];
        }
        self.sample_tail(rng)
    }

    /// Draw from the power-law tail alone; falls back to the table without one.
    pub(crate) fn sample_tail<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let Some(t) = self.tail else {
            return *self.values.last().expect("nonempty table");
        };
        // continuous Pareto on (start, inf), rounded to the lattice
        let v = open01(rng);
        let x = t.start * v.powf(-1.0 / t.index);
        let k = (x + 0.5).floor();
        if k * t.step as f64 >= i64::MAX as f64 {
            i64::MAX
        } else {
            k as i64 * t.step
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    CompoundPoisson,
    TwoComponentDifference,
    WalkSimulation,
    InverseCdf,
    NestedMixture,
}

/// One draw of the positive stable `S_γ` with `E e^{-uS} = e^{-u^γ}`
/// (Kanter's representation). `γ = 1` gives the constant 1.
pub fn sample_positive_stable<R: Rng + ?Sized>(gamma: f64, rng: &mut R) -> f64 {
    if gamma >= 1.0 {
        return 1.0;
    }
    let u = open01(rng);
    let e: f64 = rng.sample(Exp1);
    // ln a(u) = [γ ln sin(γπu) + (1-γ) ln sin((1-γ)πu) - ln sin(πu)] / (1-γ)
    let ln_a = (gamma * (gamma * PI * u).sin().ln()
        + (1.0 - gamma) * ((1.0 - gamma) * PI * u).sin().ln()
        - (PI * u).sin().ln())
        / (1.0 - gamma);
    ((1.0 - gamma) / gamma * (ln_a - e.ln())).exp()
}

/// `λ^{1/γ} S_γ`, the random Poisson intensity.
fn stable_intensity<R: Rng + ?Sized>(gamma: f64, lambda: f64, rng: &mut R) -> f64 {
    if gamma >= 1.0 {
        lambda
    } else {
        lambda.powf(1.0 / gamma) * sample_positive_stable(gamma, rng)
    }
}

/// Sum of `n` jumps on {1, 2, ...} with `P(Y = k) = (1-κ)κ^{k-1}`.
fn jump_sum<R: Rng + ?Sized>(rng: &mut R, n: u64, kappa: f64) -> u64 {
    if kappa == 0.0 {
        n
    } else {
        geometric_sum(rng, n, 1.0 - kappa)
    }
}

fn scaled(v: i128, m: u32) -> i64 {
    (v * m as i128).clamp(i64::MIN as i128, i64::MAX as i128) as i64
}

/// Compound Poisson with intensity `λ^{1/γ} S_γ` and geometric jumps.
pub fn sample_pds<R: Rng + ?Sized>(d: &Pds, rng: &mut R) -> i64 {
    let mean = stable_intensity(d.gamma(), d.lambda(), rng);
    let n = poisson(rng, mean);
    scaled(jump_sum(rng, n, d.kappa()) as i128, d.m())
}

/// Compound Poisson with symmetric two-sided geometric jumps.
pub fn sample_sds<R: Rng + ?Sized>(d: &Sds, rng: &mut R) -> i64 {
    let mean = stable_intensity(d.gamma(), d.lambda(), rng);
    let n = poisson(rng, mean);
    let up = binomial(rng, n, 0.5);
    let a = jump_sum(rng, up, d.kappa()) as i128;
    let b = jump_sum(rng, n - up, d.kappa()) as i128;
    scaled(a - b, d.m())
}

/// One compound Poisson component with jumps `+Y` w.p. `q`, `-Y` otherwise.
fn ds_component<R: Rng + ?Sized>(gamma: f64, lambda: f64, q: f64, kappa: f64, rng: &mut R) -> i128 {
    if lambda == 0.0 {
        return 0;
    }
    let mean = stable_intensity(gamma, lambda, rng);
    let n = poisson(rng, mean);
    let up = binomial(rng, n, q);
    jump_sum(rng, up, kappa) as i128 - jump_sum(rng, n - up, kappa) as i128
}

/// `C1 - C2` with independent components of intensities `λ(1±β)/2`.
pub fn sample_ds<R: Rng + ?Sized>(d: &Ds, rng: &mut R) -> i64 {
    let l1 = d.lambda() * (1.0 + d.beta()) / 2.0;
    let l2 = d.lambda() * (1.0 - d.beta()) / 2.0;
    let c1 = ds_component(d.gamma(), l1, d.q(), d.kappa(), rng);
    let c2 = ds_component(d.gamma(), l2, d.q(), d.kappa(), rng);
    scaled(c1 - c2, d.m())
}

/// Exact draw of the sum of `M` first-passage times through +1, times `m`.
///
/// From distance `D` the walk cannot reach the target within `D - 1` steps,
/// so those steps are taken at once as a binomial displacement.
pub fn sample_first_passage<R: Rng + ?Sized>(d: &FirstPassage, rng: &mut R) -> Result<i64> {
    let t = first_passage_time(d.big_m() as u64, rng)?;
    Ok(scaled(t as i128, d.m()))
}

/// Largest time the walk is followed to.
pub const FIRST_PASSAGE_CAP: u64 = 1 << 60;

fn first_passage_time<R: Rng + ?Sized>(distance: u64, rng: &mut R) -> Result<u64> {
    let mut dist = distance as i128;
    let mut time: u64 = 0;
    let mut bits = 0u64;
    let mut left = 0u32;
    while dist > 0 {
        if time > FIRST_PASSAGE_CAP {
            return Err(Error::StepCap(FIRST_PASSAGE_CAP));
        }
        if dist == 1 {
            if left == 0 {
                bits = rng.next_u64();
                left = 64;
            }
            dist += if bits & 1 == 1 { -1 } else { 1 };
            bits >>= 1;
            left -= 1;
            time += 1;
            continue;
        }
        let len = (dist - 1) as u64;
        let ups = if len <= 64 {
            let w = rng.next_u64();
            let w = if len == 64 { w } else { w & ((1u64 << len) - 1) };
            w.count_ones() as u64
        } else {
            binomial(rng, len, 0.5)
        };
        dist -= 2 * ups as i128 - len as i128;
        time += len;
    }
    Ok(time)
}

/// Inverse-CDF sampler for the first-passage law: a table of exact
/// probabilities, with draws beyond it taken from walks conditioned by
/// rejection on exceeding the table.
#[derive(Debug, Clone)]
pub struct FirstPassageTable {
    dist: FirstPassage,
    table: DiscreteTable,
    mass: f64,
    k_hi: u64,
}

impl FirstPassageTable {
    pub fn new(d: &FirstPassage, k_hi: u64) -> Result<Self> {
        let unit_hi = k_hi / d.m() as u64;
        let s = pmf_first_passage_vec(d.big_m(), 1, unit_hi)?;
        let mass = s.total();
        Ok(FirstPassageTable {
            dist: *d,
            table: DiscreteTable::new(&s)?,
            mass,
            k_hi: unit_hi,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<i64> {
        let t = if rng.random::<f64>() < self.mass {
            self.table.sample(rng) as u64
        } else {
            loop {
                let t = first_passage_time(self.dist.big_m() as u64, rng)?;
                if t > self.k_hi {
                    break t;
                }
            }
        };
        Ok(scaled(t as i128, self.dist.m()))
    }
}

/// Nested draw: `S_γ`, then `PDS(γ'/γ, λ^{1/γ} S_γ, κ)`.
pub fn sample_pds_mixture_identity<R: Rng + ?Sized>(
    gamma_prime: f64,
    gamma: f64,
    lambda: f64,
    kappa: f64,
    rng: &mut R,
) -> Result<i64> {
    if !(gamma_prime > 0.0 && gamma_prime <= gamma && gamma <= 1.0) {
        return Err(Error::domain(
            "gamma_prime",
            "(0, gamma] with gamma <= 1",
            "sample_pds_mixture_identity",
        ));
    }
    let inner = stable_intensity(gamma, lambda, rng);
    if !(inner > 0.0 && inner.is_finite()) {
        return Ok(if inner > 0.0 { i64::MAX } else { 0 });
    }
    let d = Pds::new(gamma_prime / gamma, inner, kappa, 1)?;
    Ok(sample_pds(&d, rng))
}

/// Jump table length for the Chebyshev jump law.
const TPDS_TABLE: u64 = 1 << 18;
// Compound sums with more jumps than this are drawn cell by cell.
const TPDS_LOOP_MAX: u64 = 4096;

/// `γ_base` used when none is given: `γ` up to 1, `γ/2` above.
pub fn default_gamma_base(gamma: f64) -> f64 {
    if gamma > 1.0 {
        gamma / 2.0
    } else {
        gamma
    }
}

/// Compound Poisson sampler for TPDS: intensity `λ^{1/γ_b} π^δ S_{γ_b}`
/// with jumps of generating function `1 - (arccos(R_b(z))/π)^δ`, `δ = γ/γ_b`.
#[derive(Debug, Clone)]
pub struct TpdsSampler {
    dist: Tpds,
    gamma_base: f64,
    delta: f64,
    jumps: DiscreteTable,
    probs: Vec<f64>,
    cdf: Vec<f64>,
    // band edges 0, 1, 2, 4, ..., table length
    bands: Vec<usize>,
}

impl TpdsSampler {
    pub fn new(d: &Tpds) -> Result<Self> {
        Self::with_gamma_base(d, default_gamma_base(d.gamma()))
    }

    pub fn with_gamma_base(d: &Tpds, gamma_base: f64) -> Result<Self> {
        if !(gamma_base > 0.0 && gamma_base <= 1.0 && d.gamma() <= 2.0 * gamma_base) {
            return Err(Error::domain(
                "gamma_base",
                "(0,1] with gamma <= 2 gamma_base",
                "TPDS sampler",
            ));
        }
        let delta = d.gamma() / gamma_base;
        let b = d.b();
        let jump = AnalyticPgf::new(SupportKind::NonNegative, 1, move |z: Complex64| {
            let a = acos_from_gap(one_minus_r(z, b)) / PI;
            Ok(Complex64::new(1.0, 0.0) - a.powf(delta))
        });
        let mut s = series::extract_pmf(&jump, 0, TPDS_TABLE as i64, 4 * TPDS_TABLE as usize)?
            .series;
        let ctx = format!("TPDS jump law, gamma = {}, b = {b}, gamma_base = {gamma_base}", d.gamma());
        s.clip_probabilities(&ctx)?;
        let probs = s.coeffs().to_vec();
        let jumps = DiscreteTable::with_power_tail(&s, delta / 2.0)?;
        let cdf: Vec<f64> = probs
            .iter()
            .scan(0.0, |acc, &p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        let mut bands = vec![0usize, 1];
        while *bands.last().expect("nonempty") < probs.len() {
            let next = (2 * bands.last().expect("nonempty")).min(probs.len());
            bands.push(next);
        }
        Ok(TpdsSampler {
            dist: *d,
            gamma_base,
            delta,
            jumps,
            probs,
            cdf,
            bands,
        })
    }

    pub fn gamma_base(&self) -> f64 {
        self.gamma_base
    }

    /// Jump probabilities on `0..=TPDS_TABLE`.
    pub fn jump_pmf(&self) -> &[f64] {
        &self.probs
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let d = &self.dist;
        let intensity =
            PI.powf(self.delta) * stable_intensity(self.gamma_base, d.lambda(), rng);
        let n = poisson(rng, intensity);
        let total: i128 = if n <= TPDS_LOOP_MAX {
            (0..n).map(|_| self.jumps.sample(rng) as i128).sum()
        } else {
            self.multinomial_sum(n, rng)
        };
        scaled(total, d.m())
    }

    /// Sum of `n` jumps: counts per dyadic band by sequential binomials, then
    /// within a band either single draws or cell counts, whichever is fewer.
    fn multinomial_sum<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> i128 {
        let mut left = n;
        let mut rest = 1.0;
        let mut total: i128 = 0;
        for w in self.bands.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if left == 0 {
                return total;
            }
            let c_lo = if lo == 0 { 0.0 } else { self.cdf[lo - 1] };
            let p = self.cdf[hi - 1] - c_lo;
            if p <= 0.0 {
                continue;
            }
            let c = binomial(rng, left, (p / rest).min(1.0));
            left -= c;
            rest = (rest - p).max(0.0);
            if c == 0 {
                continue;
            }
            if c <= (hi - lo) as u64 {
                for _ in 0..c {
                    let u = c_lo + rng.random::<f64>() * p;
                    let k = self.cdf.partition_point(|&x| x <= u).clamp(lo, hi - 1);
                    total += k as i128;
                }
            } else {
                let (mut cl, mut cr) = (c, p);
                for k in lo..hi {
                    let q = self.probs[k];
                    if cl == 0 {
                        break;
                    }
                    if q <= 0.0 {
                        continue;
                    }
                    let x = binomial(rng, cl, (q / cr).min(1.0));
                    total += x as i128 * k as i128;
                    cl -= x;
                    cr = (cr - q).max(0.0);
                }
            }
        }
        // what is left falls beyond the table
        for _ in 0..left {
            total += self.jumps.sample_tail(rng) as i128;
        }
        total
    }
}

/// Representation-aware sampler for any family.
#[derive(Debug, Clone)]
pub enum Sampler {
    Pds(Pds),
    Sds(Sds),
    Ds(Ds),
    Tpds(Box<TpdsSampler>),
    GeomPortlyStable(Pds),
    FirstPassage(FirstPassage),
}

impl Sampler {
    pub fn new(dist: &DiscreteStableDist) -> Result<Self> {
        Ok(match *dist {
            DiscreteStableDist::Pds(d) => Sampler::Pds(d),
            DiscreteStableDist::Sds(d) => Sampler::Sds(d),
            DiscreteStableDist::Ds(d) => Sampler::Ds(d),
            DiscreteStableDist::Tpds(d) => Sampler::Tpds(Box::new(TpdsSampler::new(&d)?)),
            // exp{-λ(1 - 1/z)^γ} is the law of -PDS(γ, λ, 0)
            DiscreteStableDist::GeomPortlyStable(d) => {
                Sampler::GeomPortlyStable(Pds::new(d.gamma(), d.lambda(), 0.0, 1)?)
            }
            DiscreteStableDist::FirstPassage(d) => Sampler::FirstPassage(d),
        })
    }

    pub fn representation(&self) -> Representation {
        match self {
            Sampler::Ds(_) => Representation::TwoComponentDifference,
            Sampler::FirstPassage(_) => Representation::WalkSimulation,
            _ => Representation::CompoundPoisson,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<i64> {
        Ok(match self {
            Sampler::Pds(d) => sample_pds(d, rng),
            Sampler::Sds(d) => sample_sds(d, rng),
            Sampler::Ds(d) => sample_ds(d, rng),
            Sampler::Tpds(t) => t.sample(rng),
            Sampler::GeomPortlyStable(d) => -sample_pds(d, rng),
            Sampler::FirstPassage(d) => sample_first_passage(d, rng)?,
        })
    }
}

/// Draws for one distribution with the streams that produced them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleBatch {
    pub values: Vec<i64>,
    pub dist: DiscreteStableDist,
    pub representation: Representation,
    pub seed: u64,
    /// Chunk `i` used stream `stream_base + i`.
    pub stream_base: u64,
    pub chunk_size: usize,
}

/// Draws per independent stream in a batch.
pub const CHUNK_SIZE: usize = 1 << 16;

/// `n` draws split into chunks with their own streams; the result does not
/// depend on how rayon schedules the chunks.
pub fn sample_batch(
    dist: &DiscreteStableDist,
    n: usize,
    seed: u64,
    stream_base: u64,
) -> Result<SampleBatch> {
    let sampler = Sampler::new(dist)?;
    let chunks = n.div_ceil(CHUNK_SIZE);
    let parts: Vec<Vec<i64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = RandomStream::new(seed, stream_base.wrapping_add(c as u64));
            let len = CHUNK_SIZE.min(n - c * CHUNK_SIZE);
            (0..len).map(|_| sampler.sample(&mut rng)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(SampleBatch {
        values: parts.concat(),
        dist: *dist,
        representation: sampler.representation(),
        seed,
        stream_base,
        chunk_size: CHUNK_SIZE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmf::{pmf, pmf_numeric};
    use crate::stats::{chi_square_gof, chi_square_two_sample, mean_and_se, tv_distance};
    use proptest::prelude::*;
    use rand::RngCore;

    fn draws<F: FnMut(&mut RandomStream) -> i64>(n: usize, stream: u64, mut f: F) -> Vec<i64> {
        let mut rng = RandomStream::new(7, stream);
        (0..n).map(|_| f(&mut rng)).collect()
    }

    #[test]
    fn streams_reproduce() {
        let a: Vec<u64> = (0..8).map({
            let mut r = RandomStream::new(1, 2);
            move |_| r.next_u64()
        }).collect();
        let b: Vec<u64> = (0..8).map({
            let mut r = RandomStream::new(1, 2);
            move |_| r.next_u64()
        }).collect();
        let c: Vec<u64> = (0..8).map({
            let mut r = RandomStream::new(1, 3);
            move |_| r.next_u64()
        }).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn positive_stable_laplace() {
        let n = 200_000;
        for &g in &[0.3, 0.5, 0.9] {
            let mut rng = RandomStream::new(11, 0);
            let s: Vec<f64> = (0..n).map(|_| sample_positive_stable(g, &mut rng)).collect();
            for &u in &[0.5f64, 1.0, 2.0] {
                let e: Vec<f64> = s.iter().map(|x| (-u * x).exp()).collect();
                let (m, se) = mean_and_se(&e);
                let want = (-u.powf(g)).exp();
                assert!((m - want).abs() < 4.0 * se, "g={g} u={u}: {m} vs {want}");
            }
        }
        let mut rng = RandomStream::new(3, 0);
        let mut s: Vec<f64> = (0..10_001).map(|_| sample_positive_stable(0.999, &mut rng)).collect();
        s.sort_by(f64::total_cmp);
        assert!((s[5000] - 1.0).abs() < 0.05);
    }

    #[test]
    fn pds_poisson_reduction() {
        let d = Pds::new(1.0, 2.0, 0.0, 1).unwrap();
        let x = draws(100_000, 1, |r| sample_pds(&d, r));
        let mut counts = vec![0u64; 31];
        for &v in &x {
            counts[v.min(30) as usize] += 1;
        }
        counts.pop();
        let probs = crate::pmf::pmf_pds_gamma1(2.0, 0.0, 29).unwrap().values.coeffs().to_vec();
        assert!(chi_square_gof(&counts[..30], &probs).unwrap() > 1e-3);
        let tiny = Pds::new(0.7, 1e-12, 0.3, 1).unwrap();
        assert!(draws(1000, 2, |r| sample_pds(&tiny, r)).iter().all(|&v| v == 0));
    }

    #[test]
    fn samplers_match_oracles() {
        let n = 200_000;
        let cases = [
            DiscreteStableDist::pds(0.7, 1.0, 0.3, 1).unwrap(),
            DiscreteStableDist::pds(1.0, 1.5, 0.4, 2).unwrap(),
            DiscreteStableDist::sds(1.0, 1.0, 0.0, 1).unwrap(),
            DiscreteStableDist::sds(0.6, 1.0, 0.2, 1).unwrap(),
            DiscreteStableDist::ds(0.8, 0.5, 1.0, 0.7, 0.2, 1).unwrap(),
            DiscreteStableDist::geom_portly_stable(0.8, 1.0).unwrap(),
        ];
        for (i, d) in cases.iter().enumerate() {
            let b = sample_batch(d, n, 5, 100 * i as u64).unwrap();
            assert!(b.values.iter().all(|&v| d.support().contains(v)));
            let (lo, hi) = match d.support().kind {
                SupportKind::NonNegative => (0, 400),
                SupportKind::NonPositive => (-400, 0),
                SupportKind::TwoSided => (-400, 400),
            };
            let p = pmf(d, lo, hi).unwrap().values;
            let tv = tv_distance(&b.values, &p);
            assert!(tv < 0.015, "{d}: tv = {tv}");
        }
    }

    #[test]
    fn tpds_sampler_matches_oracle() {
        for &(g, b) in &[(1.0, 0.0), (1.5, 0.0), (0.6, 0.3)] {
            let d = DiscreteStableDist::tpds(g, 1.0, b, 1).unwrap();
            let x = sample_batch(&d, 100_000, 9, 0).unwrap().values;
            let p = pmf_numeric(&d, 0, 2000).unwrap().values;
            let tv = tv_distance(&x, &p);
            assert!(tv < 0.03, "g={g} b={b}: tv = {tv}");
        }
        let t = Tpds::new(1.0, 1e-12, 0.0, 1).unwrap();
        let s = TpdsSampler::new(&t).unwrap();
        assert!(draws(1000, 1, |r| s.sample(r)).iter().all(|&v| v == 0));
        assert!(TpdsSampler::with_gamma_base(&Tpds::new(1.5, 1.0, 0.0, 1).unwrap(), 0.7).is_err());
    }

    #[test]
    fn tpds_jump_law_is_a_distribution() {
        let t = Tpds::new(2.0, 1.0, 0.2, 1).unwrap();
        let s = TpdsSampler::new(&t).unwrap();
        let j = s.jump_pmf();
        assert!(j.iter().all(|&p| p >= 0.0));
        // J(0) = 1 - (arccos(-b)/π)^δ
        let want = 1.0 - ((-0.2f64).acos() / PI).powi(2);
        assert!((j[0] - want).abs() < 1e-12);
    }

    #[test]
    fn tpds_multinomial_path_agrees() {
        let t = Tpds::new(1.0, 1.0, 0.0, 1).unwrap();
        let s = TpdsSampler::new(&t).unwrap();
        let n = 20_000;
        let direct = draws(n, 1, |r| (0..5000).map(|_| s.jumps.sample(r)).sum::<i64>().min(1 << 40));
        let cells = draws(n, 2, |r| (s.multinomial_sum(5000, r) as i64).min(1 << 40));
        assert!(chi_square_two_sample(&direct, &cells).unwrap() > 1e-4);
    }

    #[test]
    fn ds_reductions_and_symmetry() {
        let n = 100_000;
        let ds = Ds::new(0.7, 1.0, 1.0, 1.0, 0.3, 1).unwrap();
        let pds = Pds::new(0.7, 1.0, 0.3, 1).unwrap();
        let a = draws(n, 1, |r| sample_ds(&ds, r));
        let b = draws(n, 2, |r| sample_pds(&pds, r));
        assert!(chi_square_two_sample(&a, &b).unwrap() > 1e-3);
        let d = Ds::new(0.8, 0.4, 1.0, 0.7, 0.2, 1).unwrap();
        let neg: Vec<i64> = draws(n, 3, |r| -sample_ds(&d, r));
        let flipped = draws(n, 4, |r| sample_ds(&d.negate(), r));
        assert!(chi_square_two_sample(&neg, &flipped).unwrap() > 1e-3);
        // q = 1/2 gives a symmetric law; compare X with -X
        let sym = Ds::new(1.0, 0.3, 1.0, 0.5, 0.2, 1).unwrap();
        let x = draws(n, 5, |r| sample_ds(&sym, r));
        let cubes: Vec<f64> = x.iter().map(|&v| (v as f64).powi(3)).collect();
        let (m, se) = mean_and_se(&cubes);
        assert!(m.abs() < 4.0 * se);
    }

    #[test]
    fn sds_is_centered() {
        let d = Sds::new(1.0, 2.0, 0.4, 1).unwrap();
        let x: Vec<f64> = draws(100_000, 1, |r| sample_sds(&d, r)).iter().map(|&v| v as f64).collect();
        let (m, se) = mean_and_se(&x);
        assert!(m.abs() < 4.0 * se);
    }

    #[test]
    fn first_passage_draws() {
        let d = FirstPassage::new(1, 1).unwrap();
        let n = 100_000;
        let mut rng = RandomStream::new(1, 0);
        let x: Vec<i64> = (0..n).map(|_| sample_first_passage(&d, &mut rng).unwrap()).collect();
        for &(k, p) in &[(1i64, 0.5), (3, 0.125)] {
            let hits = x.iter().filter(|&&v| v == k).count() as f64 / n as f64;
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((hits - p).abs() < 4.0 * se, "k={k}: {hits}");
        }
        let d3 = FirstPassage::new(3, 2).unwrap();
        let mut rng = RandomStream::new(2, 0);
        let y: Vec<i64> = (0..n).map(|_| sample_first_passage(&d3, &mut rng).unwrap()).collect();
        assert_eq!(*y.iter().min().unwrap(), 6);
        assert!(y.iter().all(|&v| v % 2 == 0 && (v / 2) % 2 == 1));
        let table = FirstPassageTable::new(&d3, 1 << 12).unwrap();
        let mut rng = RandomStream::new(3, 0);
        let z: Vec<i64> = (0..n).map(|_| table.sample(&mut rng).unwrap()).collect();
        assert!(chi_square_two_sample(&y, &z).unwrap() > 1e-3);
        let p = pmf_first_passage_vec(3, 2, 400).unwrap();
        let tv = tv_distance(&z, &p);
        assert!(tv < 0.015, "tv = {tv}");
    }

    #[test]
    fn mixture_identity() {
        let n = 100_000;
        let a = draws(n, 1, |r| sample_pds_mixture_identity(0.4, 0.8, 1.0, 0.0, r).unwrap());
        let pds = Pds::new(0.4, 1.0, 0.0, 1).unwrap();
        let b = draws(n, 2, |r| sample_pds(&pds, r));
        assert!(chi_square_two_sample(&a, &b).unwrap() > 1e-3);
        assert!(sample_pds_mixture_identity(0.9, 0.8, 1.0, 0.0, &mut RandomStream::new(0, 0)).is_err());
    }

    #[test]
    fn batches_are_deterministic() {
        let d = DiscreteStableDist::pds(0.7, 1.0, 0.3, 1).unwrap();
        let a = sample_batch(&d, 150_000, 42, 0).unwrap();
        let b = sample_batch(&d, 150_000, 42, 0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.values.len(), 150_000);
        let c = sample_batch(&d, 1000, 43, 0).unwrap();
        assert_ne!(a.values[..1000], c.values[..]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn draws_stay_in_support(g in 0.2f64..1.0, l in 0.1f64..5.0, k in 0.0f64..0.9, m in 1u32..4, seed: u64) {
            let mut rng = RandomStream::new(seed, 0);
            let p = Pds::new(g, l, k, m).unwrap();
            let s = Sds::new(g, l, k, m).unwrap();
            for _ in 0..50 {
                let x = sample_pds(&p, &mut rng);
                prop_assert!(x >= 0 && x % m as i64 == 0);
                let y = sample_sds(&s, &mut rng);
                prop_assert!(y % m as i64 == 0);
            }
        }
    }
}
