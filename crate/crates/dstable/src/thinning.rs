//! Thinning and portlying operators.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::acos_from_gap;
use crate::sampler::{self, DiscreteTable};
use crate::series::{self, AnalyticPgf, LaurentSeries, SupportKind};
use crate::special_fn::{binom_real, chebyshev_reversed, chebyshev_t_complex, gauss_2f1};
use crate::{Error, Result};

/// Tolerance on the real part when a value must stay in the right half plane.
const HALF_PLANE_TOL: f64 = 1e-12;
/// Tables for inverse-CDF sampling stop once this much mass is covered.
const TABLE_MASS: f64 = 1.0 - 1e-12;
const TABLE_MAX: i64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ThinningFamily {
    Bernoulli,
    ModGeometric,
    TwoSidedModGeometric,
    ChebyshevThin,
    DegeneratePortly,
    GeometricPortly,
    ChebyshevPortly,
}

/// A thinning (`p ⊙ X`) or portlying operator, identified with the PGF of
/// its summands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", deny_unknown_fields)]
pub enum ThinningOp {
    Bernoulli { p: f64 },
    ModGeometric { p: f64, kappa: f64, m: u32 },
    TwoSidedModGeometric { p: f64, kappa: f64, q: f64, m: u32 },
    ChebyshevThin { p: f64, b: f64, m: u32 },
    DegeneratePortly { n: u32 },
    GeometricPortly { p: f64 },
    ChebyshevPortly { n: u32, m: u32 },
}

fn open_unit(name: &'static str, v: f64, ctx: &str) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(name, "(0,1)", ctx))
    }
}

fn positive_int(name: &'static str, v: u32, ctx: &str) -> Result<()> {
    if v >= 1 {
        Ok(())
    } else {
        Err(Error::domain(name, "{1, 2, ...}", ctx))
    }
}

fn check_mod_geometric(p: f64, kappa: f64, m: u32, ctx: &str) -> Result<()> {
    positive_int("m", m, ctx)?;
    if m == 1 {
        open_unit("p", p, ctx)?;
        if !(0.0..1.0).contains(&kappa) {
            return Err(Error::domain("kappa", "[0,1)", ctx));
        }
    } else if !(p > 0.0 && p < kappa && kappa < 1.0) {
        return Err(Error::domain("p, kappa", "0 < p < kappa < 1 when m > 1", ctx));
    }
    Ok(())
}

/// Principal `m`-th root of a value required to lie in the right half plane.
pub(crate) fn half_plane_root(v: Complex64, m: u32, ctx: &str) -> Result<Complex64> {
    if m == 1 {
        return Ok(v);
    }
    if v.re < -HALF_PLANE_TOL * v.norm().max(1.0) {
        return Err(Error::Branch(format!("{ctx}: {v} left the right half plane")));
    }
    Ok(v.powf(1.0 / m as f64))
}

fn c1() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// `S(z) = (1-κ) z^m / (1 - κ z^m)`.
fn s_map(z: Complex64, kappa: f64, m: u32) -> Complex64 {
    let w = z.powu(m);
    w * (1.0 - kappa) / (c1() - w * kappa)
}

/// `S^{-1}` followed by the principal `m`-th root.
fn s_inverse(y: Complex64, kappa: f64, m: u32, ctx: &str) -> Result<Complex64> {
    let v = y / (c1() * (1.0 - kappa) + y * kappa);
    half_plane_root(v, m, ctx)
}

/// `R_b(w) = ((1+b)w - 2b)/(2 - (1+b)w)`.
pub(crate) fn r_map(w: Complex64, b: f64) -> Complex64 {
    (w * (1.0 + b) - 2.0 * b) / (c1() * 2.0 - w * (1.0 + b))
}

fn r_inverse(y: Complex64, b: f64) -> Complex64 {
    (y + b) * 2.0 / ((y + 1.0) * (1.0 + b))
}

impl ThinningOp {
    pub fn bernoulli(p: f64) -> Result<Self> {
        let op = ThinningOp::Bernoulli { p };
        op.validate()?;
        Ok(op)
    }

    pub fn mod_geometric(p: f64, kappa: f64, m: u32) -> Result<Self> {
        let op = ThinningOp::ModGeometric { p, kappa, m };
        op.validate()?;
        Ok(op)
    }

    pub fn two_sided(p: f64, kappa: f64, q: f64, m: u32) -> Result<Self> {
        let op = ThinningOp::TwoSidedModGeometric { p, kappa, q, m };
        op.validate()?;
        Ok(op)
    }

    pub fn chebyshev_thin(p: f64, b: f64, m: u32) -> Result<Self> {
        let op = ThinningOp::ChebyshevThin { p, b, m };
        op.validate()?;
        Ok(op)
    }

    pub fn degenerate_portly(n: u32) -> Result<Self> {
        let op = ThinningOp::DegeneratePortly { n };
        op.validate()?;
        Ok(op)
    }

    pub fn geometric_portly(p: f64) -> Result<Self> {
        let op = ThinningOp::GeometricPortly { p };
        op.validate()?;
        Ok(op)
    }

    pub fn chebyshev_portly(n: u32, m: u32) -> Result<Self> {
        let op = ThinningOp::ChebyshevPortly { n, m };
        op.validate()?;
        Ok(op)
    }

    pub fn family(&self) -> ThinningFamily {
        match self {
            ThinningOp::Bernoulli { .. } => ThinningFamily::Bernoulli,
            ThinningOp::ModGeometric { .. } => ThinningFamily::ModGeometric,
            ThinningOp::TwoSidedModGeometric { .. } => ThinningFamily::TwoSidedModGeometric,
            ThinningOp::ChebyshevThin { .. } => ThinningFamily::ChebyshevThin,
            ThinningOp::DegeneratePortly { .. } => ThinningFamily::DegeneratePortly,
            ThinningOp::GeometricPortly { .. } => ThinningFamily::GeometricPortly,
            ThinningOp::ChebyshevPortly { .. } => ThinningFamily::ChebyshevPortly,
        }
    }

    /// Check the parameter ranges of the family.
    pub fn validate(&self) -> Result<()> {
        match *self {
            ThinningOp::Bernoulli { p } => open_unit("p", p, "family Bernoulli"),
            ThinningOp::ModGeometric { p, kappa, m } => {
                check_mod_geometric(p, kappa, m, "family ModGeometric")
            }
            ThinningOp::TwoSidedModGeometric { p, kappa, q, m } => {
                check_mod_geometric(p, kappa, m, "family TwoSidedModGeometric")?;
                if (0.0..=1.0).contains(&q) {
                    Ok(())
                } else {
                    Err(Error::domain("q", "[0,1]", "family TwoSidedModGeometric"))
                }
            }
            ThinningOp::ChebyshevThin { p, b, m } => {
                open_unit("p", p, "family ChebyshevThin")?;
                positive_int("m", m, "family ChebyshevThin")?;
                if b > -1.0 && b < 1.0 {
                    Ok(())
                } else {
                    Err(Error::domain("b", "(-1,1)", "family ChebyshevThin"))
                }
            }
            ThinningOp::DegeneratePortly { n } => positive_int("n", n, "family DegeneratePortly"),
            ThinningOp::GeometricPortly { p } => open_unit("p", p, "family GeometricPortly"),
            ThinningOp::ChebyshevPortly { n, m } => {
                positive_int("n", n, "family ChebyshevPortly")?;
                positive_int("m", m, "family ChebyshevPortly")
            }
        }
    }

    /// Whether the summand law is known to be a probability distribution:
    /// true except for Chebyshev thinning away from `p = 2^{-k}`, `b = 0`.
    pub fn proven(&self) -> bool {
        match *self {
            ThinningOp::ChebyshevThin { p, b, .. } => {
                let k = -p.log2();
                b == 0.0 && k.fract() == 0.0 && 2f64.powf(-k) == p
            }
            _ => true,
        }
    }

    pub fn support_kind(&self) -> SupportKind {
        match self {
            ThinningOp::TwoSidedModGeometric { .. } => SupportKind::TwoSided,
            _ => SupportKind::NonNegative,
        }
    }

    pub fn lattice(&self) -> u32 {
        match *self {
            ThinningOp::ModGeometric { m, .. }
            | ThinningOp::TwoSidedModGeometric { m, .. }
            | ThinningOp::ChebyshevThin { m, .. } => m,
            ThinningOp::DegeneratePortly { n } => n,
            _ => 1,
        }
    }

    /// The generating function `Q(z) = E z^ε`.
    pub fn pgf_eval(&self, z: Complex64) -> Result<Complex64> {
        match *self {
            ThinningOp::Bernoulli { p } => Ok(z * p + (1.0 - p)),
            ThinningOp::ModGeometric { p, kappa, m } => {
                let y = s_map(z, kappa, m) * p + (1.0 - p);
                s_inverse(y, kappa, m, "ModGeometric")
            }
            ThinningOp::TwoSidedModGeometric { p, kappa, q, m } => {
                if z == Complex64::new(0.0, 0.0) {
                    return Err(Error::domain("z", "the unit circle", "TwoSidedModGeometric"));
                }
                let s2 = s_map(z, kappa, m) * q + s_map(z.inv(), kappa, m) * (1.0 - q);
                s_inverse(s2 * p + (1.0 - p), kappa, m, "TwoSidedModGeometric")
            }
            ThinningOp::ChebyshevThin { p, b, m } => {
                let x = r_map(z.powu(m), b);
                let v = r_inverse(chebyshev_t_complex(p, x), b);
                half_plane_root(v, m, "ChebyshevThin")
            }
            ThinningOp::DegeneratePortly { n } => Ok(z.powu(n)),
            // written so that Q(1) = 1 exactly
            ThinningOp::GeometricPortly { p } => Ok(z * p / ((c1() - z) * (1.0 - p) + p)),
            ThinningOp::ChebyshevPortly { n, m } => {
                let h = chebyshev_reversed(n as u64, z.powu(m)).inv();
                Ok(z.powu(n) * half_plane_root(h, m, "ChebyshevPortly")?)
            }
        }
    }

    /// `(Q(z), 1 - Q(z))` given `gap = 1 - z`. For the one-lattice thinning
    /// families the complement is carried through the map without forming
    /// `1 - Q` by subtraction, which matters when `Q(z)` is within a few
    /// ulps of 1.
    pub fn pgf_eval_gap(&self, z: Complex64, gap: Complex64) -> Result<(Complex64, Complex64)> {
        match *self {
            ThinningOp::Bernoulli { p } => Ok((z * p + (1.0 - p), gap * p)),
            ThinningOp::ModGeometric { p, kappa, m: 1 } => {
                let gy = gap / (gap * kappa + (1.0 - kappa)) * p;
                let y = c1() - gy;
                let den = y * kappa + (1.0 - kappa);
                Ok((y / den, gy * (1.0 - kappa) / den))
            }
            ThinningOp::ChebyshevThin { p, b, m: 1 } => {
                let gx = gap * (2.0 * (1.0 + b)) / (gap * (1.0 + b) + (1.0 - b));
                let th = acos_from_gap(gx) * p;
                let half = (th * 0.5).sin();
                let gy = half * half * 2.0;
                let y = th.cos();
                Ok((r_inverse(y, b), gy * (1.0 - b) / ((y + 1.0) * (1.0 + b))))
            }
            _ => {
                let q = self.pgf_eval(z)?;
                Ok((q, c1() - q))
            }
        }
    }

    /// Radius of a disc about `z = 1` on which the PGF is analytic, when known.
    fn radius_at_one(&self) -> Option<f64> {
        match *self {
            ThinningOp::Bernoulli { .. } | ThinningOp::DegeneratePortly { .. } => {
                Some(f64::INFINITY)
            }
            ThinningOp::ModGeometric { p, kappa, m } => {
                if kappa == 0.0 {
                    return Some(f64::INFINITY);
                }
                let pole = (1.0 - p * kappa) / (kappa * (1.0 - p));
                let zero = if kappa > p {
                    (1.0 - p) / (kappa - p)
                } else {
                    f64::INFINITY
                };
                Some(pole.min(zero).powf(1.0 / m as f64) - 1.0)
            }
            ThinningOp::ChebyshevThin { b, m: 1, .. } => Some(2.0 / (1.0 + b) - 1.0),
            ThinningOp::GeometricPortly { p } => Some(p / (1.0 - p)),
            ThinningOp::ChebyshevPortly { n, m: 1 } => {
                Some(1.0 / (std::f64::consts::PI / (2.0 * n as f64)).cos() - 1.0)
            }
            _ => None,
        }
    }

    pub fn to_pgf(&self) -> Result<AnalyticPgf> {
        self.validate()?;
        let op = *self;
        let mut pgf = AnalyticPgf::new(self.support_kind(), self.lattice(), move |z| {
            op.pgf_eval(z)
        });
        if let Some(r) = self.radius_at_one() {
            pgf = pgf.with_radius_at_one(r);
        }
        Ok(pgf)
    }

    /// Mean of a summand, `Q'(1)`.
    pub fn mean(&self) -> f64 {
        match *self {
            ThinningOp::Bernoulli { p } | ThinningOp::ModGeometric { p, .. } => p,
            ThinningOp::TwoSidedModGeometric { p, q, .. } => p * (2.0 * q - 1.0),
            ThinningOp::ChebyshevThin { p, .. } => p * p,
            ThinningOp::DegeneratePortly { n } => n as f64,
            ThinningOp::GeometricPortly { p } => 1.0 / p,
            ThinningOp::ChebyshevPortly { n, .. } => (n as f64) * (n as f64),
        }
    }

    /// Probabilities of a summand on `0..=k_hi` (`-k_hi..=k_hi` when two-sided).
    pub fn pmf(&self, k_hi: i64) -> Result<LaurentSeries> {
        self.validate()?;
        if k_hi < 0 {
            return Err(Error::domain("k_hi", "[0, inf)", "thinning pmf"));
        }
        let len = k_hi as usize + 1;
        let mut out = match *self {
            ThinningOp::Bernoulli { p } => {
                let mut c = vec![0.0; len];
                c[0] = 1.0 - p;
                if len > 1 {
                    c[1] = p;
                }
                LaurentSeries::new(0, c, 1)
            }
            ThinningOp::ModGeometric { p, kappa, m: 1 } => {
                LaurentSeries::new(0, mod_geometric_pmf(p, kappa, len), 1)
            }
            ThinningOp::ModGeometric { p, kappa, m } => {
                let n_max = k_hi as usize / m as usize;
                let mut c = vec![0.0; len];
                for n in 0..=n_max {
                    c[n * m as usize] = mod_geometric_lattice_term(p, kappa, m, n as u64)?;
                }
                LaurentSeries::new(0, c, m)
            }
            ThinningOp::DegeneratePortly { n } => {
                let mut c = vec![0.0; len];
                if (n as usize) < len {
                    c[n as usize] = 1.0;
                }
                LaurentSeries::new(0, c, n)
            }
            ThinningOp::GeometricPortly { p } => {
                let mut c = vec![0.0; len];
                let mut v = p;
                for ck in c.iter_mut().skip(1) {
                    *ck = v;
                    v *= 1.0 - p;
                }
                LaurentSeries::new(0, c, 1)
            }
            ThinningOp::TwoSidedModGeometric { .. } => {
                series::extract_pmf(&self.to_pgf()?, -k_hi, k_hi, series::DEFAULT_GRID)?.series
            }
            ThinningOp::ChebyshevThin { .. } | ThinningOp::ChebyshevPortly { .. } => {
                series::extract_pmf(&self.to_pgf()?, 0, k_hi, series::DEFAULT_GRID)?.series
            }
        };
        out.clip_probabilities(&format!("{self:?}"))?;
        Ok(out)
    }
}

/// `q_0 = (1-p)/(1-pκ)`, `q_n = p κ^{n-1}(1-p)^{n-1}(1-κ)^2/(1-pκ)^{n+1}`.
fn mod_geometric_pmf(p: f64, kappa: f64, len: usize) -> Vec<f64> {
    let d = 1.0 - p * kappa;
    let mut c = vec![0.0; len];
    c[0] = (1.0 - p) / d;
    let ratio = kappa * (1.0 - p) / d;
    let mut v = p * (1.0 - kappa) * (1.0 - kappa) / (d * d);
    for ck in c.iter_mut().skip(1) {
        *ck = v;
        v *= ratio;
    }
    c
}

/// Mass at `m·n` for the lattice modified geometric law.
fn mod_geometric_lattice_term(p: f64, kappa: f64, m: u32, n: u64) -> Result<f64> {
    let inv_m = 1.0 / m as f64;
    let nf = n as f64;
    let a = (1.0 - p) / (1.0 - p * kappa);
    let x = (kappa - p) * (1.0 - p * kappa) / ((1.0 - p) * (1.0 - p) * kappa);
    let hyp = gauss_2f1(-inv_m, -nf, 1.0 - inv_m - nf, x)?;
    Ok(kappa.powf(nf) * a.powf(inv_m + nf) * binom_real(inv_m + nf - 1.0, n) * hyp)
}

/// The lattice modified geometric mass written as a finite double-binomial sum.
pub fn mod_geometric_lattice_sum(p: f64, kappa: f64, m: u32, n: u64) -> f64 {
    let inv_m = 1.0 / m as f64;
    let a = (1.0 - p) / (1.0 - p * kappa);
    let r = (p - kappa) / (1.0 - p);
    (0..=n)
        .map(|j| {
            let nj = (n - j) as f64;
            a.powf(inv_m + nj)
                * r.powi(j as i32)
                * kappa.powf(nj)
                * binom_real(inv_m + nj - 1.0, n - j)
                * binom_real(inv_m, j)
        })
        .sum()
}

/// Closed-form composite when the family is closed under composition.
#[derive(Debug, Clone)]
pub struct Composition {
    pub pgf: AnalyticPgf,
    pub closed_form: Option<ThinningOp>,
}

/// `a ∘ b`, i.e. `Q_a(Q_b(z))`.
pub fn compose_ops(a: &ThinningOp, b: &ThinningOp) -> Result<Composition> {
    a.validate()?;
    b.validate()?;
    let mismatch = || {
        Err(Error::FamilyMismatch(format!(
            "cannot compose {:?} with {:?}",
            a.family(),
            b.family()
        )))
    };
    use ThinningOp::*;
    let closed_form = match (*a, *b) {
        (Bernoulli { p: p1 }, Bernoulli { p: p2 }) => Some(ThinningOp::bernoulli(p1 * p2)?),
        (ModGeometric { p: p1, kappa: k1, m: m1 }, ModGeometric { p: p2, kappa: k2, m: m2 }) => {
            if k1 != k2 || m1 != m2 {
                return mismatch();
            }
            ThinningOp::mod_geometric(p1 * p2, k1, m1).ok()
        }
        (ChebyshevThin { p: p1, b: b1, m: m1 }, ChebyshevThin { p: p2, b: b2, m: m2 }) => {
            if b1 != b2 || m1 != m2 {
                return mismatch();
            }
            Some(ThinningOp::chebyshev_thin(p1 * p2, b1, m1)?)
        }
        (DegeneratePortly { n: n1 }, DegeneratePortly { n: n2 }) => {
            Some(ThinningOp::degenerate_portly(n1 * n2)?)
        }
        (GeometricPortly { p: p1 }, GeometricPortly { p: p2 }) => {
            Some(ThinningOp::geometric_portly(p1 * p2)?)
        }
        (ChebyshevPortly { n: n1, m: m1 }, ChebyshevPortly { n: n2, m: m2 }) => {
            if m1 != m2 {
                return mismatch();
            }
            Some(ThinningOp::chebyshev_portly(n1 * n2, m1)?)
        }
        _ => return mismatch(),
    };
    let (oa, ob) = (*a, *b);
    let pgf = AnalyticPgf::new(SupportKind::NonNegative, b.lattice(), move |z| {
        oa.pgf_eval(ob.pgf_eval(z)?)
    });
    Ok(Composition { pgf, closed_form })
}

/// Precomputed sampler for sums of i.i.d. summands of an operator.
#[derive(Debug, Clone)]
pub struct ThinningSampler {
    op: ThinningOp,
    table: Option<DiscreteTable>,
}

impl ThinningSampler {
    pub fn new(op: &ThinningOp) -> Result<Self> {
        op.validate()?;
        let table = match op {
            ThinningOp::ModGeometric { m, .. } if *m > 1 => Some(table_for(op)?),
            ThinningOp::ChebyshevThin { .. }
            | ThinningOp::ChebyshevPortly { .. }
            | ThinningOp::TwoSidedModGeometric { .. } => Some(table_for(op)?),
            _ => None,
        };
        Ok(ThinningSampler { op: *op, table })
    }

    /// Sum of `x` independent summands.
    pub fn sample_sum<R: Rng + ?Sized>(&self, x: u64, rng: &mut R) -> i64 {
        if x == 0 {
            return 0;
        }
        if let Some(t) = &self.table {
            return (0..x).fold(0i64, |acc, _| acc.saturating_add(t.sample(rng)));
        }
        match self.op {
            ThinningOp::Bernoulli { p } => sampler::binomial(rng, x, p) as i64,
            ThinningOp::ModGeometric { p, kappa, .. } => {
                let q0 = (1.0 - p) / (1.0 - p * kappa);
                let nonzero = sampler::binomial(rng, x, 1.0 - q0);
                let success = (1.0 - kappa) / (1.0 - p * kappa);
                sampler::saturating_i64(sampler::geometric_sum(rng, nonzero, success))
            }
            ThinningOp::GeometricPortly { p } => {
                sampler::saturating_i64(sampler::geometric_sum(rng, x, p))
            }
            ThinningOp::DegeneratePortly { n } => (x as i64).saturating_mul(n as i64),
            _ => unreachable!("table-backed families handled above"),
        }
    }
}

fn table_for(op: &ThinningOp) -> Result<DiscreteTable> {
    let mut k_hi = 64i64;
    loop {
        let s = op.pmf(k_hi)?;
        if s.total() >= TABLE_MASS || k_hi >= TABLE_MAX {
            return DiscreteTable::new(&s);
        }
        k_hi *= 4;
    }
}

/// `p ⊙ x`: the sum of `x` independent summands of `op`.
pub fn apply_thinning<R: Rng + ?Sized>(op: &ThinningOp, x: u64, rng: &mut R) -> Result<i64> {
    if x == 0 {
        return Ok(0);
    }
    Ok(ThinningSampler::new(op)?.sample_sum(x, rng))
}

/// Two-sided thinning of a signed count: thinned positive part minus
/// thinned negative part.
pub fn apply_two_sided<R: Rng + ?Sized>(op: &ThinningOp, x: i64, rng: &mut R) -> Result<i64> {
    if op.family() != ThinningFamily::TwoSidedModGeometric {
        return Err(Error::FamilyMismatch(format!(
            "apply_two_sided needs TwoSidedModGeometric, got {:?}",
            op.family()
        )));
    }
    if x == 0 {
        return Ok(0);
    }
    let s = ThinningSampler::new(op)?;
    let pos = s.sample_sum(x.max(0) as u64, rng);
    let neg = s.sample_sum((-x).max(0) as u64, rng);
    Ok(pos - neg)
}
