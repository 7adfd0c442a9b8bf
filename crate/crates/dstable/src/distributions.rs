//! The discrete stable families.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::series::{AnalyticPgf, SupportKind};
use crate::{Error, Result};

const HALF_PLANE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "PDS")]
    Pds,
    #[serde(rename = "DS")]
    Ds,
    #[serde(rename = "SDS")]
    Sds,
    #[serde(rename = "TPDS")]
    Tpds,
    GeomPortlyStable,
    FirstPassage,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Pds => "PDS",
            Family::Ds => "DS",
            Family::Sds => "SDS",
            Family::Tpds => "TPDS",
            Family::GeomPortlyStable => "GeomPortlyStable",
            Family::FirstPassage => "FirstPassage",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "PDS" => Ok(Family::Pds),
            "DS" => Ok(Family::Ds),
            "SDS" => Ok(Family::Sds),
            "TPDS" => Ok(Family::Tpds),
            "GeomPortlyStable" => Ok(Family::GeomPortlyStable),
            "FirstPassage" => Ok(Family::FirstPassage),
            other => Err(Error::InvalidSpec(format!("unknown family {other:?}"))),
        }
    }
}

fn ctx(f: Family) -> String {
    format!("family {f}")
}

fn check_gamma(gamma: f64, max: f64, f: Family) -> Result<()> {
    if gamma > 0.0 && gamma <= max {
        Ok(())
    } else {
        Err(Error::domain("gamma", if max == 1.0 { "(0,1]" } else { "(0,2]" }, ctx(f)))
    }
}

fn check_lambda(lambda: f64, f: Family) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("lambda", "(0,inf)", ctx(f)))
    }
}

fn check_kappa(kappa: f64, f: Family) -> Result<()> {
    if (0.0..1.0).contains(&kappa) {
        Ok(())
    } else {
        Err(Error::domain("kappa", "[0,1)", ctx(f)))
    }
}

fn check_m(m: u32, f: Family) -> Result<()> {
    if m >= 1 {
        Ok(())
    } else {
        Err(Error::domain("m", "{1, 2, ...}", ctx(f)))
    }
}

/// Principal power of a value that must sit in the closed right half plane.
fn half_plane_pow(u: Complex64, gamma: f64, what: &str) -> Result<Complex64> {
    // integer powers have no branch cut
    if gamma == 1.0 {
        return Ok(u);
    }
    if gamma == 2.0 {
        return Ok(u * u);
    }
    if u.re < -HALF_PLANE_TOL * u.norm().max(1.0) {
        return Err(Error::Branch(format!("{what}: {u} left the right half plane")));
    }
    if u == Complex64::new(0.0, 0.0) {
        Ok(u)
    } else {
        Ok(u.powf(gamma))
    }
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// `1 - S(z) = (1 - w)/(1 - κ w)` with `w = z^m`.
fn one_minus_s(w: Complex64, kappa: f64) -> Complex64 {
    (one() - w) / (one() - w * kappa)
}

/// `1 - S(1/z) = (w - 1)/(w - κ)`.
fn one_minus_s_inv(w: Complex64, kappa: f64) -> Complex64 {
    (w - 1.0) / (w - kappa)
}

/// Positive discrete stable law, `exp{-λ((1-z^m)/(1-κz^m))^γ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pds {
    gamma: f64,
    lambda: f64,
    kappa: f64,
    m: u32,
}

impl Pds {
    pub fn new(gamma: f64, lambda: f64, kappa: f64, m: u32) -> Result<Self> {
        let f = Family::Pds;
        check_gamma(gamma, 1.0, f)?;
        check_lambda(lambda, f)?;
        check_kappa(kappa, f)?;
        check_m(m, f)?;
        Ok(Pds {
            gamma,
            lambda,
            kappa,
            m,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn log_pgf(&self, z: Complex64) -> Result<Complex64> {
        let u = one_minus_s(z.powu(self.m), self.kappa);
        Ok(-half_plane_pow(u, self.gamma, "PDS")? * self.lambda)
    }

    /// `exp{-λ((1 - e^{itm})/(1 - κ e^{itm}))^γ}` written via half angles.
    pub fn char_fn(&self, t: f64) -> Complex64 {
        let th = t * self.m as f64;
        // 1 - e^{iθ} = -2i sin(θ/2) e^{iθ/2}
        let num = Complex64::new(0.0, -2.0 * (th / 2.0).sin()) * Complex64::from_polar(1.0, th / 2.0);
        let den = one() - Complex64::from_polar(self.kappa, th);
        let u = num / den;
        let p = if u.norm() == 0.0 { u } else { u.powf(self.gamma) };
        (-p * self.lambda).exp()
    }
}

/// Discrete stable law with two-sided modified geometric thinning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ds {
    gamma: f64,
    beta: f64,
    lambda: f64,
    q: f64,
    kappa: f64,
    m: u32,
}

impl Ds {
    pub fn new(gamma: f64, beta: f64, lambda: f64, q: f64, kappa: f64, m: u32) -> Result<Self> {
        let f = Family::Ds;
        check_gamma(gamma, 1.0, f)?;
        if !(-1.0..=1.0).contains(&beta) {
            return Err(Error::domain("beta", "[-1,1]", ctx(f)));
        }
        check_lambda(lambda, f)?;
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::domain("q", "[0,1]", ctx(f)));
        }
        check_kappa(kappa, f)?;
        check_m(m, f)?;
        Ok(Ds {
            gamma,
            beta,
            lambda,
            q,
            kappa,
            m,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn m(&self) -> u32 {
        self.m
    }

    /// `g(z) = (1 - q S(z) - (1-q) S(1/z))^γ`.
    pub fn g(&self, z: Complex64) -> Result<Complex64> {
        let w = z.powu(self.m);
        self.component(w, self.q)
    }

    /// `h(z) = (1 - q S(1/z) - (1-q) S(z))^γ`.
    pub fn h(&self, z: Complex64) -> Result<Complex64> {
        let w = z.powu(self.m);
        self.component(w, 1.0 - self.q)
    }

    fn component(&self, w: Complex64, weight_direct: f64) -> Result<Complex64> {
        let mut u = Complex64::new(0.0, 0.0);
        if weight_direct != 0.0 {
            u += one_minus_s(w, self.kappa) * weight_direct;
        }
        if weight_direct != 1.0 {
            u += one_minus_s_inv(w, self.kappa) * (1.0 - weight_direct);
        }
        half_plane_pow(u, self.gamma, "DS")
    }

    pub fn log_pgf(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() == 0.0 {
            return Err(Error::domain("z", "the unit circle or (0,1]", "family DS"));
        }
        let a = self.lambda * (1.0 + self.beta) / 2.0;
        let b = self.lambda * (1.0 - self.beta) / 2.0;
        let mut acc = Complex64::new(0.0, 0.0);
        if a != 0.0 {
            acc -= self.g(z)? * a;
        }
        if b != 0.0 {
            acc -= self.h(z)? * b;
        }
        Ok(acc)
    }

    /// Sum of independent variables sharing `γ`, `q`, `κ` and `m`.
    pub fn sum(&self, other: &Ds) -> Result<Ds> {
        if self.gamma != other.gamma || self.q != other.q || self.kappa != other.kappa || self.m != other.m {
            return Err(Error::FamilyMismatch(
                "DS sums need equal gamma, q, kappa and m".into(),
            ));
        }
        let lambda = self.lambda + other.lambda;
        let beta = (self.beta * self.lambda + other.beta * other.lambda) / lambda;
        Ds::new(self.gamma, beta.clamp(-1.0, 1.0), lambda, self.q, self.kappa, self.m)
    }

    /// Law of `-X`.
    pub fn negate(&self) -> Ds {
        Ds {
            beta: -self.beta,
            ..*self
        }
    }
}

/// `DS(γ1,β1,λ1,q,κ,m) + DS(γ1,β2,λ2,q,κ,m)`.
pub fn ds_sum(d1: &Ds, d2: &Ds) -> Result<Ds> {
    d1.sum(d2)
}

pub fn ds_negate(d: &Ds) -> Ds {
    d.negate()
}

/// Symmetric discrete stable law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sds {
    gamma: f64,
    lambda: f64,
    kappa: f64,
    m: u32,
}

impl Sds {
    pub fn new(gamma: f64, lambda: f64, kappa: f64, m: u32) -> Result<Self> {
        let f = Family::Sds;
        check_gamma(gamma, 1.0, f)?;
        check_lambda(lambda, f)?;
        check_kappa(kappa, f)?;
        check_m(m, f)?;
        Ok(Sds {
            gamma,
            lambda,
            kappa,
            m,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn log_pgf(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() == 0.0 {
            return Err(Error::domain("z", "the unit circle or (0,1]", "family SDS"));
        }
        let w = z.powu(self.m);
        let u = (one_minus_s(w, self.kappa) + one_minus_s_inv(w, self.kappa)) * 0.5;
        Ok(-half_plane_pow(u, self.gamma, "SDS")? * self.lambda)
    }

    /// `1 - Re S(e^{itm}) = (1+κ)(1 - cos tm)/(κ² - 2κ cos tm + 1)`.
    pub fn char_base(&self, t: f64) -> f64 {
        let c = (t * self.m as f64).cos();
        let k = self.kappa;
        // 1 - cos computed without cancellation
        let one_minus_c = 2.0 * (t * self.m as f64 / 2.0).sin().powi(2);
        (1.0 + k) * one_minus_c / (k * k - 2.0 * k * c + 1.0)
    }

    /// Real characteristic function `exp{-λ (char_base)^γ}`.
    pub fn char_fn(&self, t: f64) -> f64 {
        (-self.lambda * self.char_base(t).powf(self.gamma)).exp()
    }
}

/// Positive discrete stable law with Chebyshev thinning,
/// `exp{-λ arccos(R_b(z^m))^γ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tpds {
    gamma: f64,
    lambda: f64,
    b: f64,
    m: u32,
}

impl Tpds {
    pub fn new(gamma: f64, lambda: f64, b: f64, m: u32) -> Result<Self> {
        let f = Family::Tpds;
        check_gamma(gamma, 2.0, f)?;
        check_lambda(lambda, f)?;
        if !(b > -1.0 && b < 1.0) {
            return Err(Error::domain("b", "(-1,1)", ctx(f)));
        }
        check_m(m, f)?;
        Ok(Tpds { gamma, lambda, b, m })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn log_pgf(&self, z: Complex64) -> Result<Complex64> {
        let w = z.powu(self.m);
        let a = acos_from_gap(one_minus_r(w, self.b));
        Ok(-half_plane_pow(a, self.gamma, "TPDS")? * self.lambda)
    }
}

/// `1 - R_b(w) = 2(1+b)(1-w)/(2-(1+b)w)`, exact at `w = 1`.
pub(crate) fn one_minus_r(w: Complex64, b: f64) -> Complex64 {
    (one() - w) * (2.0 * (1.0 + b)) / (one() * 2.0 - w * (1.0 + b))
}

/// `arccos(1 - d) = 2 arcsin(sqrt(d/2))`, accurate for small `d`.
pub(crate) fn acos_from_gap(d: Complex64) -> Complex64 {
    (d * 0.5).sqrt().asin() * 2.0
}

/// Non-positive law stable under geometric portlying, `exp{-λ(1 - 1/z)^γ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeomPortlyStable {
    gamma: f64,
    lambda: f64,
}

impl GeomPortlyStable {
    pub fn new(gamma: f64, lambda: f64) -> Result<Self> {
        let f = Family::GeomPortlyStable;
        check_gamma(gamma, 1.0, f)?;
        check_lambda(lambda, f)?;
        Ok(GeomPortlyStable { gamma, lambda })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn log_pgf(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() == 0.0 {
            return Err(Error::domain("z", "a nonzero value", "family GeomPortlyStable"));
        }
        let u = one() - z.inv();
        Ok(-half_plane_pow(u, self.gamma, "GeomPortlyStable")? * self.lambda)
    }
}

/// Sum of `M` first-passage times of a symmetric walk through +1, on the
/// lattice `m`: `((1 - sqrt(1 - z^{2m}))/z^m)^M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstPassage {
    big_m: u32,
    m: u32,
}

impl FirstPassage {
    pub fn new(big_m: u32, m: u32) -> Result<Self> {
        let f = Family::FirstPassage;
        if big_m < 1 {
            return Err(Error::domain("M", "{1, 2, ...}", ctx(f)));
        }
        check_m(m, f)?;
        Ok(FirstPassage { big_m, m })
    }

    pub fn big_m(&self) -> u32 {
        self.big_m
    }
    pub fn m(&self) -> u32 {
        self.m
    }

    /// Generating function of a single passage on the unit lattice,
    /// in the cancellation-free form `w/(1 + sqrt(1 - w²))`.
    pub fn base(w: Complex64) -> Complex64 {
        w / (one() + (one() - w * w).sqrt())
    }

    pub fn pgf(&self, z: Complex64) -> Complex64 {
        Self::base(z.powu(self.m)).powu(self.big_m)
    }
}

/// A discrete stable distribution of any supported family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistSpec", into = "DistSpec")]
pub enum DiscreteStableDist {
    Pds(Pds),
    Ds(Ds),
    Sds(Sds),
    Tpds(Tpds),
    GeomPortlyStable(GeomPortlyStable),
    FirstPassage(FirstPassage),
}

/// Support `start + step·j`, `j ≥ 0` (or `j ≤ 0`, or any `j`, per `kind`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Support {
    pub kind: SupportKind,
    pub start: i64,
    pub step: u32,
}

impl Support {
    pub fn contains(&self, k: i64) -> bool {
        let d = k - self.start;
        if d.rem_euclid(self.step as i64) != 0 {
            return false;
        }
        match self.kind {
            SupportKind::NonNegative => d >= 0,
            SupportKind::NonPositive => d <= 0,
            SupportKind::TwoSided => true,
        }
    }
}

impl DiscreteStableDist {
    pub fn pds(gamma: f64, lambda: f64, kappa: f64, m: u32) -> Result<Self> {
        Pds::new(gamma, lambda, kappa, m).map(Self::Pds)
    }

    pub fn ds(gamma: f64, beta: f64, lambda: f64, q: f64, kappa: f64, m: u32) -> Result<Self> {
        Ds::new(gamma, beta, lambda, q, kappa, m).map(Self::Ds)
    }

    pub fn sds(gamma: f64, lambda: f64, kappa: f64, m: u32) -> Result<Self> {
        Sds::new(gamma, lambda, kappa, m).map(Self::Sds)
    }

    pub fn tpds(gamma: f64, lambda: f64, b: f64, m: u32) -> Result<Self> {
        Tpds::new(gamma, lambda, b, m).map(Self::Tpds)
    }

    pub fn geom_portly_stable(gamma: f64, lambda: f64) -> Result<Self> {
        GeomPortlyStable::new(gamma, lambda).map(Self::GeomPortlyStable)
    }

    pub fn first_passage(big_m: u32, m: u32) -> Result<Self> {
        FirstPassage::new(big_m, m).map(Self::FirstPassage)
    }

    pub fn family(&self) -> Family {
        match self {
            Self::Pds(_) => Family::Pds,
            Self::Ds(_) => Family::Ds,
            Self::Sds(_) => Family::Sds,
            Self::Tpds(_) => Family::Tpds,
            Self::GeomPortlyStable(_) => Family::GeomPortlyStable,
            Self::FirstPassage(_) => Family::FirstPassage,
        }
    }

    /// Stability index; the first-passage law has index 1/2.
    pub fn gamma(&self) -> f64 {
        match self {
            Self::Pds(d) => d.gamma,
            Self::Ds(d) => d.gamma,
            Self::Sds(d) => d.gamma,
            Self::Tpds(d) => d.gamma,
            Self::GeomPortlyStable(d) => d.gamma,
            Self::FirstPassage(_) => 0.5,
        }
    }

    pub fn lambda(&self) -> Option<f64> {
        match self {
            Self::Pds(d) => Some(d.lambda),
            Self::Ds(d) => Some(d.lambda),
            Self::Sds(d) => Some(d.lambda),
            Self::Tpds(d) => Some(d.lambda),
            Self::GeomPortlyStable(d) => Some(d.lambda),
            Self::FirstPassage(_) => None,
        }
    }

    pub fn lattice(&self) -> u32 {
        match self {
            Self::Pds(d) => d.m,
            Self::Ds(d) => d.m,
            Self::Sds(d) => d.m,
            Self::Tpds(d) => d.m,
            Self::GeomPortlyStable(_) => 1,
            Self::FirstPassage(d) => d.m,
        }
    }

    /// Same family and shape with a different `λ`.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        match *self {
            Self::Pds(d) => Self::pds(d.gamma, lambda, d.kappa, d.m),
            Self::Ds(d) => Self::ds(d.gamma, d.beta, lambda, d.q, d.kappa, d.m),
            Self::Sds(d) => Self::sds(d.gamma, lambda, d.kappa, d.m),
            Self::Tpds(d) => Self::tpds(d.gamma, lambda, d.b, d.m),
            Self::GeomPortlyStable(d) => Self::geom_portly_stable(d.gamma, lambda),
            Self::FirstPassage(_) => Err(Error::FamilyMismatch(
                "FirstPassage has no lambda parameter".into(),
            )),
        }
    }

    pub fn support(&self) -> Support {
        match *self {
            Self::Pds(d) => Support {
                kind: SupportKind::NonNegative,
                start: 0,
                step: d.m,
            },
            Self::Tpds(d) => Support {
                kind: SupportKind::NonNegative,
                start: 0,
                step: d.m,
            },
            Self::Ds(Ds { m, .. }) | Self::Sds(Sds { m, .. }) => Support {
                kind: SupportKind::TwoSided,
                start: 0,
                step: m,
            },
            Self::GeomPortlyStable(_) => Support {
                kind: SupportKind::NonPositive,
                start: 0,
                step: 1,
            },
            Self::FirstPassage(d) => Support {
                kind: SupportKind::NonNegative,
                start: (d.big_m * d.m) as i64,
                step: 2 * d.m,
            },
        }
    }

    /// `log P(z)` (the exponent of the exponential families).
    pub fn log_pgf(&self, z: Complex64) -> Result<Complex64> {
        match self {
            Self::Pds(d) => d.log_pgf(z),
            Self::Ds(d) => d.log_pgf(z),
            Self::Sds(d) => d.log_pgf(z),
            Self::Tpds(d) => d.log_pgf(z),
            Self::GeomPortlyStable(d) => d.log_pgf(z),
            Self::FirstPassage(d) => {
                let base = FirstPassage::base(z.powu(d.m));
                if base.norm() == 0.0 {
                    return Err(Error::domain("z", "a nonzero value", "log of FirstPassage pgf"));
                }
                Ok(base.ln() * d.big_m as f64)
            }
        }
    }

    pub fn pgf(&self, z: Complex64) -> Result<Complex64> {
        match self {
            Self::FirstPassage(d) => Ok(d.pgf(z)),
            _ => Ok(self.log_pgf(z)?.exp()),
        }
    }

    /// `P(z)` given `gap = 1 - z` as well. PDS and TPDS on the unit lattice
    /// use the gap directly; other cases ignore it.
    pub fn pgf_gap(&self, z: Complex64, gap: Complex64) -> Result<Complex64> {
        match self {
            Self::Pds(d) if d.m == 1 => {
                let u = gap / (gap * d.kappa + (1.0 - d.kappa));
                Ok((-half_plane_pow(u, d.gamma, "PDS")? * d.lambda).exp())
            }
            Self::Tpds(d) if d.m == 1 => {
                let b = d.b;
                let gr = gap * (2.0 * (1.0 + b)) / (gap * (1.0 + b) + (1.0 - b));
                let a = acos_from_gap(gr);
                Ok((-half_plane_pow(a, d.gamma, "TPDS")? * d.lambda).exp())
            }
            _ => self.pgf(z),
        }
    }

    /// `E e^{itX}`. PDS and SDS use their own trigonometric forms.
    pub fn char_fn(&self, t: f64) -> Result<Complex64> {
        match self {
            Self::Pds(d) => Ok(d.char_fn(t)),
            Self::Sds(d) => Ok(Complex64::new(d.char_fn(t), 0.0)),
            _ => self.pgf(Complex64::from_polar(1.0, t)),
        }
    }

    /// Radius of a disc around `z = 1` free of singularities, when the law has
    /// all moments.
    fn radius_at_one(&self) -> Option<f64> {
        let inv_m = |m: u32| 1.0 / m as f64;
        match *self {
            Self::Pds(d) if d.gamma == 1.0 => Some(if d.kappa == 0.0 {
                f64::INFINITY
            } else {
                d.kappa.powf(-inv_m(d.m)) - 1.0
            }),
            Self::Sds(Sds { gamma, kappa, m, .. }) | Self::Ds(Ds { gamma, kappa, m, .. })
                if gamma == 1.0 =>
            {
                let inner = 1.0 - kappa.powf(inv_m(m));
                let outer = if kappa == 0.0 {
                    f64::INFINITY
                } else {
                    kappa.powf(-inv_m(m)) - 1.0
                };
                Some(inner.min(outer))
            }
            _ => None,
        }
    }

    pub fn to_pgf(&self) -> AnalyticPgf {
        let d = *self;
        let mut pgf = AnalyticPgf::new(self.support().kind, self.lattice(), move |z| d.pgf(z));
        if let Some(r) = self.radius_at_one() {
            pgf = pgf.with_radius_at_one(r);
        }
        pgf
    }
}

impl fmt::Display for DiscreteStableDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let spec = DistSpec::from(*self);
        match serde_json::to_string(&spec) {
            Ok(s) => f.write_str(&s),
            Err(_) => write!(f, "{}", self.family()),
        }
    }
}

/// Flat JSON form `{family, gamma, lambda, kappa, beta, q, b, m, M}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistSpec {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub big_m: Option<u32>,
}

impl DistSpec {
    pub fn new(family: Family) -> Self {
        DistSpec {
            family,
            gamma: None,
            lambda: None,
            kappa: None,
            beta: None,
            q: None,
            b: None,
            m: None,
            big_m: None,
        }
    }

    fn reject_extra(&self, allowed: &[&str]) -> Result<()> {
        let present = [
            ("gamma", self.gamma.is_some()),
            ("lambda", self.lambda.is_some()),
            ("kappa", self.kappa.is_some()),
            ("beta", self.beta.is_some()),
            ("q", self.q.is_some()),
            ("b", self.b.is_some()),
            ("m", self.m.is_some()),
            ("M", self.big_m.is_some()),
        ];
        for (name, set) in present {
            if set && !allowed.contains(&name) {
                return Err(Error::InvalidSpec(format!(
                    "{name} is not a parameter of family {}",
                    self.family
                )));
            }
        }
        Ok(())
    }
}

fn required(v: Option<f64>, name: &'static str, range: &str, f: Family) -> Result<f64> {
    v.ok_or_else(|| Error::domain(name, range, ctx(f)))
}

impl TryFrom<DistSpec> for DiscreteStableDist {
    type Error = Error;

    fn try_from(s: DistSpec) -> Result<Self> {
        let f = s.family;
        let m = s.m.unwrap_or(1);
        let kappa = s.kappa.unwrap_or(0.0);
        match f {
            Family::Pds => {
                s.reject_extra(&["gamma", "lambda", "kappa", "m"])?;
                Self::pds(
                    required(s.gamma, "gamma", "(0,1]", f)?,
                    required(s.lambda, "lambda", "(0,inf)", f)?,
                    kappa,
                    m,
                )
            }
            Family::Ds => {
                s.reject_extra(&["gamma", "lambda", "kappa", "beta", "q", "m"])?;
                Self::ds(
                    required(s.gamma, "gamma", "(0,1]", f)?,
                    required(s.beta, "beta", "[-1,1]", f)?,
                    required(s.lambda, "lambda", "(0,inf)", f)?,
                    s.q.unwrap_or(1.0),
                    kappa,
                    m,
                )
            }
            Family::Sds => {
                s.reject_extra(&["gamma", "lambda", "kappa", "m"])?;
                Self::sds(
                    required(s.gamma, "gamma", "(0,1]", f)?,
                    required(s.lambda, "lambda", "(0,inf)", f)?,
                    kappa,
                    m,
                )
            }
            Family::Tpds => {
                s.reject_extra(&["gamma", "lambda", "b", "m"])?;
                Self::tpds(
                    required(s.gamma, "gamma", "(0,2]", f)?,
                    required(s.lambda, "lambda", "(0,inf)", f)?,
                    s.b.unwrap_or(0.0),
                    m,
                )
            }
            Family::GeomPortlyStable => {
                s.reject_extra(&["gamma", "lambda"])?;
                Self::geom_portly_stable(
                    required(s.gamma, "gamma", "(0,1]", f)?,
                    required(s.lambda, "lambda", "(0,inf)", f)?,
                )
            }
            Family::FirstPassage => {
                s.reject_extra(&["M", "m"])?;
                Self::first_passage(s.big_m.unwrap_or(1), m)
            }
        }
    }
}

impl From<DiscreteStableDist> for DistSpec {
    fn from(d: DiscreteStableDist) -> Self {
        let mut s = DistSpec::new(d.family());
        match d {
            DiscreteStableDist::Pds(p) => {
                s.gamma = Some(p.gamma);
                s.lambda = Some(p.lambda);
                s.kappa = Some(p.kappa);
                s.m = Some(p.m);
            }
            DiscreteStableDist::Ds(p) => {
                s.gamma = Some(p.gamma);
                s.beta = Some(p.beta);
                s.lambda = Some(p.lambda);
                s.q = Some(p.q);
                s.kappa = Some(p.kappa);
                s.m = Some(p.m);
            }
            DiscreteStableDist::Sds(p) => {
                s.gamma = Some(p.gamma);
                s.lambda = Some(p.lambda);
                s.kappa = Some(p.kappa);
                s.m = Some(p.m);
            }
            DiscreteStableDist::Tpds(p) => {
                s.gamma = Some(p.gamma);
                s.lambda = Some(p.lambda);
                s.b = Some(p.b);
                s.m = Some(p.m);
            }
            DiscreteStableDist::GeomPortlyStable(p) => {
                s.gamma = Some(p.gamma);
                s.lambda = Some(p.lambda);
            }
            DiscreteStableDist::FirstPassage(p) => {
                s.big_m = Some(p.big_m);
                s.m = Some(p.m);
            }
        }
        s
    }
}
