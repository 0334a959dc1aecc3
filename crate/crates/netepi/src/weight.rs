//! Laws of directed edge weights `W` in `[0,1]`.
//!
//! A weight is the probability that an infectious vertex transmits along a
//! given directed edge. Each undirected edge carries two independent
//! weights, one per direction; the law of a single weight is described
//! here. Continuous laws additionally expose their CDF and density, which
//! the order-statistic machinery integrates against.

use crate::degree::{DegreeDist, DegreeSampler};
use crate::error::{Error, Result};
use rand::Rng;
use statrs::distribution::{Continuous, ContinuousCDF};

/// Specification of a single directed weight's law.
///
/// `Uniform`, `Beta`, and `Tabulated` are continuous; the rest put mass on
/// finitely or countably many points. The distinction matters for the
/// weight-ranked vaccination strategy, which needs almost surely distinct
/// weights and therefore rejects discrete kinds.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightModel {
    /// `W ~ Uniform(0,1)`.
    Uniform,
    /// `W ~ Beta(alpha, beta)`.
    Beta { alpha: f64, beta: f64 },
    /// Continuous law with a piecewise-linear CDF on `[0,1]`.
    Tabulated(TabulatedCdf),
    /// `P(W = a) = pa`, `P(W = b) = 1 - pa`, with `a < b`.
    TwoPoint { a: f64, b: f64, pa: f64 },
    /// `W = 1 - (1-p)^N` for a random number of contacts `N`: the chance
    /// that at least one of `N` independent meetings transmits.
    ContactCount { contacts: DegreeDist, p: f64 },
    /// `W` determined by an integer connection strength `X` through a
    /// threshold or decay rule.
    ThresholdStrength { strength: DegreeDist, rule: ThresholdRule },
    /// `W_(u,v) = g(D_u)`: a deterministic function of the sending
    /// vertex's degree. Has no marginal law of its own, so the sampling
    /// and mean operations reject it; graph generation applies `g`
    /// directly.
    DegreeDependent(WeightFunctionG),
}

/// How a latent strength `X` maps to a weight.
#[derive(Debug, Clone, PartialEq)]
pub enum ThresholdRule {
    /// `W = 1` if `X >= theta`, else 0.
    IndicatorGe(u32),
    /// `W = 1 - alpha^X` with `alpha` in (0,1).
    Decay(f64),
}

impl WeightModel {
    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::parameter(format!(
                    "beta weight shape {name} must be positive, got {v}"
                )));
            }
        }
        Ok(Self::Beta { alpha, beta })
    }

    pub fn two_point(a: f64, b: f64, pa: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || !(a < b) {
            return Err(Error::parameter(format!(
                "two-point weights need 0 <= a < b <= 1, got a={a}, b={b}"
            )));
        }
        if !(0.0..=1.0).contains(&pa) {
            return Err(Error::parameter(format!(
                "two-point probability pa must lie in [0,1], got {pa}"
            )));
        }
        Ok(Self::TwoPoint { a, b, pa })
    }

    pub fn contact_count(contacts: DegreeDist, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::parameter(format!(
                "per-contact transmission probability must lie in [0,1], got {p}"
            )));
        }
        Ok(Self::ContactCount { contacts, p })
    }

    pub fn threshold_indicator(strength: DegreeDist, theta: i64) -> Result<Self> {
        if theta < 0 {
            return Err(Error::parameter(format!(
                "strength threshold must be non-negative, got {theta}"
            )));
        }
        Ok(Self::ThresholdStrength {
            strength,
            rule: ThresholdRule::IndicatorGe(theta as u32),
        })
    }

    pub fn threshold_decay(strength: DegreeDist, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::parameter(format!(
                "strength decay rate must lie strictly in (0,1), got {alpha}"
            )));
        }
        Ok(Self::ThresholdStrength {
            strength,
            rule: ThresholdRule::Decay(alpha),
        })
    }

    /// Short kind name for error messages.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Uniform => "uniform",
            Self::Beta { .. } => "beta",
            Self::Tabulated(_) => "tabulated",
            Self::TwoPoint { .. } => "two-point",
            Self::ContactCount { .. } => "contact-count",
            Self::ThresholdStrength { .. } => "threshold-strength",
            Self::DegreeDependent(_) => "degree-dependent",
        }
    }

    /// Canonical config string. Distinct models render distinctly, so the
    /// label doubles as a cache key for per-model memoization.
    pub fn label(&self) -> String {
        match self {
            Self::Uniform => "uniform".to_string(),
            Self::Beta { alpha, beta } => format!("beta({alpha},{beta})"),
            Self::Tabulated(t) => t.label(),
            Self::TwoPoint { a, b, pa } => format!("twopoint(a={a},b={b},pa={pa})"),
            Self::ContactCount { contacts, p } => {
                format!("contacts({},p={p})", contacts.label())
            }
            Self::ThresholdStrength { strength, rule } => match rule {
                ThresholdRule::IndicatorGe(theta) => {
                    format!("strength({},theta={theta})", strength.label())
                }
                ThresholdRule::Decay(alpha) => {
                    format!("strength({},alpha={alpha})", strength.label())
                }
            },
            Self::DegreeDependent(g) => format!("g={}", g.label()),
        }
    }

    /// Whether the law has a density (no atoms). Only continuous laws can
    /// back the weight-ranked vaccination strategy.
    pub fn is_continuous(&self) -> bool {
        matches!(self, Self::Uniform | Self::Beta { .. } | Self::Tabulated(_))
    }

    /// Mean transmission probability `E[W]`, in closed form.
    ///
    /// Rejects the degree-dependent kind: its weights have no marginal law
    /// until a degree distribution is attached.
    pub fn mean_weight(&self) -> Result<f64> {
        match self {
            Self::Uniform => Ok(0.5),
            Self::Beta { alpha, beta } => Ok(alpha / (alpha + beta)),
            Self::Tabulated(t) => Ok(t.mean()),
            Self::TwoPoint { a, b, pa } => Ok(a * pa + b * (1.0 - pa)),
            // E[1 - (1-p)^N] = 1 - G_N(1-p).
            Self::ContactCount { contacts, p } => Ok(1.0 - contacts.pgf(1.0 - p)),
            Self::ThresholdStrength { strength, rule } => match rule {
                ThresholdRule::IndicatorGe(theta) => Ok(strength.tail_prob(*theta as usize)),
                ThresholdRule::Decay(alpha) => Ok(1.0 - strength.pgf(*alpha)),
            },
            Self::DegreeDependent(_) => Err(Error::Unsupported {
                kind: self.kind_name(),
                what: "a marginal mean without a degree law",
            }),
        }
    }

    /// CDF of a continuous kind; rejects kinds with atoms.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        match self {
            Self::Uniform => Ok(x.clamp(0.0, 1.0)),
            Self::Beta { alpha, beta } => {
                let d = statrs::distribution::Beta::new(*alpha, *beta)
                    .expect("shape parameters validated at construction");
                Ok(d.cdf(x))
            }
            Self::Tabulated(t) => Ok(t.cdf(x)),
            _ => Err(Error::Unsupported {
                kind: self.kind_name(),
                what: "CDF evaluation (continuous kinds only)",
            }),
        }
    }

    /// Density of a continuous kind; rejects kinds with atoms.
    pub fn density(&self, x: f64) -> Result<f64> {
        match self {
            Self::Uniform => Ok(if (0.0..=1.0).contains(&x) { 1.0 } else { 0.0 }),
            Self::Beta { alpha, beta } => {
                let d = statrs::distribution::Beta::new(*alpha, *beta)
                    .expect("shape parameters validated at construction");
                Ok(d.pdf(x))
            }
            Self::Tabulated(t) => Ok(t.density(x)),
            _ => Err(Error::Unsupported {
                kind: self.kind_name(),
                what: "density evaluation (continuous kinds only)",
            }),
        }
    }

    /// Prepared sampler for the law. Rejects the degree-dependent kind,
    /// whose weights are produced during graph generation instead.
    pub fn sampler(&self) -> Result<WeightSampler> {
        Ok(match self {
            Self::Uniform => WeightSampler::Uniform,
            Self::Beta { alpha, beta } => WeightSampler::Beta(
                rand_distr::Beta::new(*alpha, *beta)
                    .expect("shape parameters validated at construction"),
            ),
            Self::Tabulated(t) => WeightSampler::Tabulated(t.clone()),
            Self::TwoPoint { a, b, pa } => WeightSampler::TwoPoint {
                a: *a,
                b: *b,
                pa: *pa,
            },
            Self::ContactCount { contacts, p } => WeightSampler::Transformed {
                count: contacts.sampler(),
                map: CountMap::Escape(1.0 - p),
            },
            Self::ThresholdStrength { strength, rule } => WeightSampler::Transformed {
                count: strength.sampler(),
                map: match rule {
                    ThresholdRule::IndicatorGe(theta) => CountMap::Indicator(*theta),
                    ThresholdRule::Decay(alpha) => CountMap::Escape(*alpha),
                },
            },
            Self::DegreeDependent(_) => {
                return Err(Error::Unsupported {
                    kind: self.kind_name(),
                    what: "direct sampling without a degree law",
                })
            }
        })
    }

    /// The degree function of a degree-dependent model, if that is the
    /// kind.
    pub fn weight_function(&self) -> Option<&WeightFunctionG> {
        match self {
            Self::DegreeDependent(g) => Some(g),
            _ => None,
        }
    }
}

/// Maps an integer draw to a weight.
#[derive(Debug, Clone)]
pub enum CountMap {
    /// `1 - base^n`: used both for contact counts (base = 1-p) and decay
    /// strengths (base = alpha).
    Escape(f64),
    /// `1{n >= theta}`.
    Indicator(u32),
}

/// Ready-to-use sampler for one weight law.
#[derive(Debug, Clone)]
pub enum WeightSampler {
    Uniform,
    Beta(rand_distr::Beta<f64>),
    Tabulated(TabulatedCdf),
    TwoPoint { a: f64, b: f64, pa: f64 },
    Transformed { count: DegreeSampler, map: CountMap },
}

impl WeightSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Uniform => rng.gen(),
            Self::Beta(d) => rand_distr::Distribution::sample(d, rng),
            Self::Tabulated(t) => t.quantile(rng.gen()),
            Self::TwoPoint { a, b, pa } => {
                if rng.gen::<f64>() < *pa {
                    *a
                } else {
                    *b
                }
            }
            Self::Transformed { count, map } => {
                let n = count.sample(rng);
                match map {
                    CountMap::Escape(base) => 1.0 - base.powi(n as i32),
                    CountMap::Indicator(theta) => {
                        if n >= *theta {
                            1.0
                        } else {
                            0.0
                        }
                    }
                }
            }
        }
    }
}

/// A continuous distribution on `[0,1]` given by linear interpolation of
/// CDF knots. Knot abscissas are strictly increasing in `[0,1]`; ordinates
/// rise from 0 to 1. Outside the knot range the CDF is flat at 0 or 1.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCdf {
    xs: Vec<f64>,
    fs: Vec<f64>,
}

impl TabulatedCdf {
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::parameter("tabulated CDF needs at least two knots"));
        }
        for &(x, f) in points {
            if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&f) {
                return Err(Error::parameter(format!(
                    "tabulated CDF knot ({x},{f}) falls outside the unit square"
                )));
            }
        }
        if points[0].1 != 0.0 || points[points.len() - 1].1 != 1.0 {
            return Err(Error::parameter(
                "tabulated CDF must start at probability 0 and end at 1",
            ));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) || w[1].1 < w[0].1 {
                return Err(Error::parameter(
                    "tabulated CDF knots must increase in x and be non-decreasing in probability",
                ));
            }
        }
        Ok(Self {
            xs: points.iter().map(|p| p.0).collect(),
            fs: points.iter().map(|p| p.1).collect(),
        })
    }

    fn label(&self) -> String {
        let knots: Vec<String> = self
            .xs
            .iter()
            .zip(&self.fs)
            .map(|(x, f)| format!("{x}:{f}"))
            .collect();
        format!("cdf({})", knots.join(";"))
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.xs[0] {
            return 0.0;
        }
        if x >= *self.xs.last().unwrap() {
            return 1.0;
        }
        let i = self.xs.partition_point(|&k| k <= x) - 1;
        let t = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.fs[i] + t * (self.fs[i + 1] - self.fs[i])
    }

    pub fn density(&self, x: f64) -> f64 {
        if x < self.xs[0] || x > *self.xs.last().unwrap() {
            return 0.0;
        }
        let i = (self.xs.partition_point(|&k| k <= x)).clamp(1, self.xs.len() - 1) - 1;
        (self.fs[i + 1] - self.fs[i]) / (self.xs[i + 1] - self.xs[i])
    }

    /// Inverse CDF. Flat stretches carry no mass, so ties resolve to the
    /// left knot.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let i = self.fs.partition_point(|&f| f < u).clamp(1, self.fs.len() - 1) - 1;
        let df = self.fs[i + 1] - self.fs[i];
        if df == 0.0 {
            return self.xs[i];
        }
        let t = (u - self.fs[i]) / df;
        self.xs[i] + t.clamp(0.0, 1.0) * (self.xs[i + 1] - self.xs[i])
    }

    /// `E[W] = integral of (1 - F)`, exact since F is piecewise linear.
    fn mean(&self) -> f64 {
        // Mass below the first knot contributes x0 (F = 0 there).
        let mut m = self.xs[0];
        for i in 0..self.xs.len() - 1 {
            m += (self.xs[i + 1] - self.xs[i]) * (1.0 - 0.5 * (self.fs[i] + self.fs[i + 1]));
        }
        m
    }
}

/// Deterministic degree-to-weight functions `g` with range `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightFunctionG {
    /// `g(k) = 1{k >= theta}`.
    IndicatorGe(u32),
    /// `g(k) = alpha^k` with `alpha` in (0,1).
    GeometricDecay(f64),
    /// `g(k) = k^-tau` with `tau` in [0,1]; `g(0) = 1` by convention,
    /// irrelevant in practice since isolated vertices send nothing.
    PowerDecay(f64),
    /// Explicit values per degree; degrees beyond the table reuse the last
    /// entry.
    Table(Vec<f64>),
}

impl WeightFunctionG {
    pub fn indicator_ge(theta: i64) -> Result<Self> {
        if theta < 0 {
            return Err(Error::parameter(format!(
                "indicator threshold must be non-negative, got {theta}"
            )));
        }
        Ok(Self::IndicatorGe(theta as u32))
    }

    pub fn geometric_decay(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::parameter(format!(
                "geometric decay rate must lie strictly in (0,1), got {alpha}"
            )));
        }
        Ok(Self::GeometricDecay(alpha))
    }

    pub fn power_decay(tau: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::parameter(format!(
                "power decay exponent must lie in [0,1], got {tau}"
            )));
        }
        Ok(Self::PowerDecay(tau))
    }

    pub fn table(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::parameter("weight function table is empty"));
        }
        for &v in &values {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::parameter(format!(
                    "weight function values must lie in [0,1], got {v}"
                )));
            }
        }
        Ok(Self::Table(values))
    }

    pub fn eval(&self, degree: u32) -> f64 {
        match self {
            Self::IndicatorGe(theta) => {
                if degree >= *theta {
                    1.0
                } else {
                    0.0
                }
            }
            Self::GeometricDecay(alpha) => alpha.powi(degree as i32),
            Self::PowerDecay(tau) => {
                if degree == 0 {
                    1.0
                } else {
                    (degree as f64).powf(-tau)
                }
            }
            Self::Table(values) => values[(degree as usize).min(values.len() - 1)],
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::IndicatorGe(theta) => format!("indicator({theta})"),
            Self::GeometricDecay(alpha) => format!("geom({alpha})"),
            Self::PowerDecay(tau) => format!("power({tau})"),
            Self::Table(values) => {
                let vals: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                format!("table({})", vals.join(";"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_reject_bad_parameters() {
        assert!(WeightModel::beta(0.0, 1.0).is_err());
        assert!(WeightModel::two_point(0.5, 0.5, 0.5).is_err());
        assert!(WeightModel::two_point(0.1, 1.2, 0.5).is_err());
        assert!(WeightFunctionG::power_decay(1.5).is_err());
        assert!(WeightFunctionG::geometric_decay(1.0).is_err());
        assert!(WeightFunctionG::indicator_ge(-1).is_err());
    }

    #[test]
    fn degree_dependent_has_no_marginal_law() {
        let g = WeightFunctionG::power_decay(0.5).unwrap();
        let m = WeightModel::DegreeDependent(g);
        assert!(m.mean_weight().is_err());
        assert!(m.sampler().is_err());
    }

    #[test]
    fn tabulated_uniform_roundtrip() {
        let t = TabulatedCdf::new(&[(0.0, 0.0), (1.0, 1.0)]).unwrap();
        assert_eq!(t.cdf(0.3), 0.3);
        assert_eq!(t.quantile(0.7), 0.7);
        assert_eq!(t.density(0.5), 1.0);
        assert!((WeightModel::Tabulated(t).mean_weight().unwrap() - 0.5).abs() < 1e-15);
    }
}
