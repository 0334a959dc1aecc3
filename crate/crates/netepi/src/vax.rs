//! Vaccination strategies: analytic coverage, post-vaccination
//! reproduction numbers, and concrete application to generated graphs.
//!
//! Four strategies are covered. Uniform vaccination hits each vertex with
//! the same probability. The acquaintance variants sample each vertex a
//! Po(beta) number of times and vaccinate neighbors of sampled vertices,
//! either uniformly at random (the classic scheme) or ranked by the
//! transmission weight on the connecting edge, most dangerous first. The
//! two-point variant samples each vertex once with probability s and
//! vaccinates every neighbor joined by a high-weight edge, which is the
//! natural analogue of weight ranking when the weight law has exactly two
//! atoms.
//!
//! The analytics follow a common pattern: a neighbor escapes vaccination
//! through an adjacent sampled vertex with some probability, the escape
//! probabilities aggregate into a single per-edge factor alpha, and both
//! the coverage and the reproduction number of the residual epidemic are
//! series in alpha over the degree law. Equal alpha means equal coverage
//! for every strategy, which is what makes equal-coverage comparisons
//! between strategies well defined.

use crate::degree::DegreeDist;
use crate::error::{Error, Result};
use crate::netgen::{self, WeightedGraph};
use crate::ordstat;
use crate::thresholds::r0_iid;
use crate::weight::WeightModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;

/// A strategy without its parameter, for root finding and sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyFamily {
    Uniform,
    AcqStandard,
    AcqWeightContinuous,
    WeightTwoPoint,
}

impl StrategyFamily {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Uniform => "uniform",
            Self::AcqStandard => "acq",
            Self::AcqWeightContinuous => "acq_weight",
            Self::WeightTwoPoint => "twopoint",
        }
    }

    /// Attaches a parameter value, validating its domain.
    pub fn with_parameter(self, p: f64) -> Result<StrategySpec> {
        let spec = match self {
            Self::Uniform => StrategySpec::Uniform { v: p },
            Self::AcqStandard => StrategySpec::AcqStandard { beta: p },
            Self::AcqWeightContinuous => StrategySpec::AcqWeightContinuous { beta: p },
            Self::WeightTwoPoint => StrategySpec::WeightTwoPoint { s: p },
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// A strategy with its parameter fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StrategySpec {
    /// Vaccinate each vertex independently with probability `v`.
    Uniform { v: f64 },
    /// Sample each vertex Po(beta) times; each sample vaccinates one
    /// uniformly chosen neighbor.
    AcqStandard { beta: f64 },
    /// Sample each vertex Po(beta) times; a vertex sampled `i` times has
    /// its `i` highest-outgoing-weight neighbors vaccinated (all of them
    /// if `i` reaches its degree).
    AcqWeightContinuous { beta: f64 },
    /// Sample each vertex with probability `s`; vaccinate every neighbor
    /// whose edge from the sampled vertex carries the high weight.
    WeightTwoPoint { s: f64 },
}

impl StrategySpec {
    pub fn family(&self) -> StrategyFamily {
        match self {
            Self::Uniform { .. } => StrategyFamily::Uniform,
            Self::AcqStandard { .. } => StrategyFamily::AcqStandard,
            Self::AcqWeightContinuous { .. } => StrategyFamily::AcqWeightContinuous,
            Self::WeightTwoPoint { .. } => StrategyFamily::WeightTwoPoint,
        }
    }

    pub fn parameter(&self) -> f64 {
        match *self {
            Self::Uniform { v } => v,
            Self::AcqStandard { beta } | Self::AcqWeightContinuous { beta } => beta,
            Self::WeightTwoPoint { s } => s,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Uniform { v } => {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::parameter(format!(
                        "uniform vaccination probability must lie in [0,1], got {v}"
                    )));
                }
            }
            Self::AcqStandard { beta } | Self::AcqWeightContinuous { beta } => {
                if !(beta >= 0.0) || !beta.is_finite() {
                    return Err(Error::parameter(format!(
                        "sampling intensity must be a finite value >= 0, got {beta}"
                    )));
                }
            }
            Self::WeightTwoPoint { s } => {
                if !(0.0..=1.0).contains(&s) {
                    return Err(Error::parameter(format!(
                        "sampling probability must lie in [0,1], got {s}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A strategy applied to a concrete graph: the vaccinated mask plus the
/// realized summary fractions.
#[derive(Debug, Clone)]
pub struct VaccinationPlan {
    pub strategy: StrategySpec,
    pub mask: Vec<bool>,
    /// Vaccinated count over n, exactly.
    pub realized_coverage: f64,
    /// Fraction of vertices sampled at least once.
    pub sampled_fraction: f64,
}

/// Options for the critical-coverage search.
#[derive(Debug, Clone, Copy)]
pub struct CriticalOpts {
    /// Accept the parameter once |R - 1| drops below this.
    pub tol: f64,
    /// Upper bracket for the Po(beta) strategies.
    pub beta_cap: f64,
}

impl Default for CriticalOpts {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            beta_cap: 50.0,
        }
    }
}

/// Outcome of the critical-coverage search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriticalCoverage {
    /// R was at most 1 before any vaccination.
    AlreadySubcritical,
    /// The threshold was crossed at this parameter and coverage.
    Reached { parameter: f64, coverage: f64 },
    /// R still exceeds 1 at the parameter's upper limit.
    Unreachable { at_parameter: f64, r: f64 },
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::parameter(format!(
            "sampling intensity must be a finite value >= 0, got {beta}"
        )));
    }
    Ok(())
}

/// Po(lambda) pmf for counts 0..len-1.
fn poisson_pmf(lambda: f64, len: usize) -> Vec<f64> {
    let mut pv = vec![0.0; len.max(1)];
    if lambda == 0.0 {
        pv[0] = 1.0;
        return pv;
    }
    pv[0] = (-lambda).exp();
    for i in 1..pv.len() {
        pv[i] = pv[i - 1] * lambda / i as f64;
    }
    pv
}

/// Per-degree escape probabilities for the weight-ranked strategy:
/// entry k is the chance that a fixed neighbor of a degree-k vertex
/// sampled Po(beta) times is not vaccinated through it, i.e.
/// sum_{i<k} P(V=i)(1 - i/k). Entry 0 is vacuously 1.
pub fn neighbor_escape_probs(beta: f64, kmax: usize) -> Result<Vec<f64>> {
    check_beta(beta)?;
    let pv = poisson_pmf(beta, kmax + 1);
    let mut out = vec![1.0; kmax + 1];
    let mut pcum = 0.0;
    let mut scum = 0.0;
    for k in 1..=kmax {
        pcum += pv[k - 1];
        scum += (k - 1) as f64 * pv[k - 1];
        out[k] = (pcum - scum / k as f64).max(0.0);
    }
    Ok(out)
}

/// The per-edge escape factor alpha of the weight-ranked strategy:
/// the chance that a fixed vertex is not vaccinated through one given
/// neighbor, averaged over that neighbor's size-biased degree.
pub fn escape_prob_weighted(d: &DegreeDist, beta: f64) -> Result<f64> {
    let sb = d.size_bias()?;
    let r = neighbor_escape_probs(beta, sb.cutoff())?;
    Ok(sb
        .pmf()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &p)| r[k] * p)
        .sum())
}

/// Escape factor of the classic acquaintance strategy: a Po(beta)-sampled
/// degree-k vertex spares a fixed neighbor with probability e^(-beta/k),
/// again averaged over the size-biased degree.
pub fn escape_prob_acq(d: &DegreeDist, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let sb = d.size_bias()?;
    Ok(sb
        .pmf()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &p)| (-beta / k as f64).exp() * p)
        .sum())
}

/// Coverage from an escape factor: a degree-j vertex stays unvaccinated
/// iff it escapes through every neighbor, so v = 1 - sum_j alpha^j p_j.
fn coverage_from_alpha(d: &DegreeDist, alpha: f64) -> f64 {
    1.0 - d.pgf(alpha)
}

/// Identity map with a domain check, for symmetry with the other
/// coverage functions.
pub fn coverage_uniform(v: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::parameter(format!(
            "uniform vaccination probability must lie in [0,1], got {v}"
        )));
    }
    Ok(v)
}

pub fn coverage_weighted(d: &DegreeDist, beta: f64) -> Result<f64> {
    Ok(coverage_from_alpha(d, escape_prob_weighted(d, beta)?))
}

pub fn coverage_acq(d: &DegreeDist, beta: f64) -> Result<f64> {
    Ok(coverage_from_alpha(d, escape_prob_acq(d, beta)?))
}

pub fn coverage_twopoint(d: &DegreeDist, m: &WeightModel, s: f64) -> Result<f64> {
    let (_, _, pa) = two_point_params(m)?;
    check_unit("sampling probability", s)?;
    Ok(coverage_from_alpha(d, 1.0 - s * (1.0 - pa)))
}

/// Residual reproduction number under uniform vaccination:
/// (1 - v) gamma E[D~ - 1].
pub fn r_uniform(d: &DegreeDist, gamma: f64, v: f64) -> Result<f64> {
    check_unit("uniform vaccination probability", v)?;
    Ok((1.0 - v) * r0_iid(d, gamma)?)
}

/// Residual reproduction number under the weight-ranked acquaintance
/// strategy with continuous weights.
///
/// An infective reached along an edge survived vaccination through its
/// infector, which tilts its degree law (an escape is likelier at high
/// degree, where each sample removes a smaller slice) and tells us its
/// surviving out-edges carry the lowest-ranked weights. The value is a
/// sum over the tilted degree k of alpha^(k-1) times the conditional mean
/// total transmission over the dangerous out-edges, the latter built from
/// partial sums of order-statistic means conditioned on the sample count
/// the infector survived.
pub fn r_weighted(d: &DegreeDist, m: &WeightModel, beta: f64) -> Result<f64> {
    if !m.is_continuous() {
        return Err(Error::StrategyMismatch {
            strategy: "weight-ranked acquaintance",
            requirement: "a continuous weight model (atoms make the weight ranking ambiguous)",
        });
    }
    check_beta(beta)?;
    let gamma = m.mean_weight()?;
    if beta == 0.0 {
        return r0_iid(d, gamma);
    }

    let sb = d.size_bias()?;
    let cutoff = sb.cutoff();
    let alpha = escape_prob_weighted(d, beta)?;
    let pv = poisson_pmf(beta, cutoff.max(1));
    let uniform = matches!(m, WeightModel::Uniform);

    let mut r = 0.0;
    // alpha^(k-1) p~_k / alpha, tracked incrementally.
    let mut apow = 1.0;
    for k in 2..=cutoff {
        // The escaped-neighbor factor decays geometrically; once it is
        // far below the target accuracy the remaining tail is bounded by
        // apow times the (finite) mean excess degree.
        if apow < 1e-13 {
            break;
        }
        let ptilde = sb.prob(k);
        if ptilde > 0.0 {
            let table = if uniform {
                None
            } else {
                Some(ordstat::prefix_table(m, k)?)
            };
            let partial = |upto: usize| -> f64 {
                match &table {
                    Some(t) => t[upto],
                    None => (upto * (upto + 1)) as f64 / (2 * (k + 1)) as f64,
                }
            };
            let mut inner = 0.0;
            for i in 0..=(k - 2) {
                let p_i = pv[i];
                if p_i == 0.0 {
                    if i as f64 > beta {
                        break;
                    }
                    continue;
                }
                let remaining = k - i;
                let h = (1.0 - 1.0 / remaining as f64) * partial(remaining);
                inner += (1.0 - i as f64 / k as f64) * p_i * h;
            }
            r += apow * ptilde * inner;
        }
        apow *= alpha;
    }
    Ok(r)
}

/// Residual reproduction number under classic acquaintance vaccination:
/// gamma sum_{k>=2} (k-1) alpha^(k-2) e^(-2 beta/k) p~_k, with alpha the
/// matching escape factor. The e^(-2 beta/k) factor is the infective
/// itself escaping vaccination through both endpoints of the incoming
/// edge's sampling.
pub fn r_acq_standard(d: &DegreeDist, gamma: f64, beta: f64) -> Result<f64> {
    check_unit("mean transmission weight", gamma)?;
    check_beta(beta)?;
    let sb = d.size_bias()?;
    let alpha = escape_prob_acq(d, beta)?;
    let mut r = 0.0;
    let mut apow = 1.0;
    for k in 2..=sb.cutoff() {
        if apow < 1e-13 {
            break;
        }
        r += (k - 1) as f64 * apow * (-2.0 * beta / k as f64).exp() * sb.prob(k);
        apow *= alpha;
    }
    Ok(gamma * r)
}

fn two_point_params(m: &WeightModel) -> Result<(f64, f64, f64)> {
    match m {
        WeightModel::TwoPoint { a, b, pa } => Ok((*a, *b, *pa)),
        _ => Err(Error::StrategyMismatch {
            strategy: "two-point weight",
            requirement: "a two-point weight model",
        }),
    }
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::parameter(format!("{name} must lie in [0,1], got {x}")));
    }
    Ok(())
}

/// Residual reproduction number under the two-point strategy. A neighbor
/// escapes a sampled vertex iff its edge carries the low weight, so
/// alpha = 1 - s p_b; conditioned on escaping, the incoming edge's weight
/// is low with probability nu = p_a s / alpha, which tilts the infective's
/// own transmission mean from gamma toward a.
pub fn r_twopoint(d: &DegreeDist, m: &WeightModel, s: f64) -> Result<f64> {
    let (a, b, pa) = two_point_params(m)?;
    check_unit("sampling probability", s)?;
    let pb = 1.0 - pa;
    let gamma = a * pa + b * pb;
    let alpha = 1.0 - s * pb;
    if alpha <= 0.0 {
        // Every edge into a sampled vertex is dangerous and every vertex
        // with a neighbor is sampled away.
        return Ok(0.0);
    }
    let nu = pa * s / alpha;
    let front = nu * a * pa + (1.0 - nu) * gamma;

    let sb = d.size_bias()?;
    let mut series = 0.0;
    let mut apow = alpha; // alpha^(k-1) at k = 2
    for k in 2..=sb.cutoff() {
        if apow < 1e-13 {
            break;
        }
        series += sb.prob(k) * apow * (k - 1) as f64;
        apow *= alpha;
    }
    Ok(front * series)
}

/// Analytic residual reproduction number for any strategy.
pub fn analytic_r(spec: &StrategySpec, d: &DegreeDist, m: &WeightModel) -> Result<f64> {
    spec.validate()?;
    match *spec {
        StrategySpec::Uniform { v } => r_uniform(d, m.mean_weight()?, v),
        StrategySpec::AcqStandard { beta } => r_acq_standard(d, m.mean_weight()?, beta),
        StrategySpec::AcqWeightContinuous { beta } => r_weighted(d, m, beta),
        StrategySpec::WeightTwoPoint { s } => r_twopoint(d, m, s),
    }
}

/// Analytic coverage for any strategy.
pub fn analytic_coverage(spec: &StrategySpec, d: &DegreeDist, m: &WeightModel) -> Result<f64> {
    spec.validate()?;
    match *spec {
        StrategySpec::Uniform { v } => coverage_uniform(v),
        StrategySpec::AcqStandard { beta } => coverage_acq(d, beta),
        StrategySpec::AcqWeightContinuous { beta } => coverage_weighted(d, beta),
        StrategySpec::WeightTwoPoint { s } => coverage_twopoint(d, m, s),
    }
}

/// Finds the coverage at which a strategy pushes R to 1.
///
/// Uniform vaccination inverts in closed form. The others bisect on the
/// strategy parameter, relying on R decreasing in it; a bracket value
/// that breaks monotonicity aborts with a diagnostic rather than
/// returning a wrong root.
pub fn critical_coverage(
    family: StrategyFamily,
    d: &DegreeDist,
    m: &WeightModel,
    opts: &CriticalOpts,
) -> Result<CriticalCoverage> {
    let r_at = |p: f64| analytic_r(&family.with_parameter(p)?, d, m);
    let r0 = r_at(0.0)?;
    if r0 <= 1.0 {
        return Ok(CriticalCoverage::AlreadySubcritical);
    }

    if family == StrategyFamily::Uniform {
        let v = 1.0 - 1.0 / r0;
        return Ok(CriticalCoverage::Reached {
            parameter: v,
            coverage: v,
        });
    }

    let hi = match family {
        StrategyFamily::WeightTwoPoint => 1.0,
        _ => opts.beta_cap,
    };
    let r_hi = r_at(hi)?;
    if r_hi > 1.0 {
        return Ok(CriticalCoverage::Unreachable {
            at_parameter: hi,
            r: r_hi,
        });
    }

    let (mut lo, mut r_lo) = (0.0, r0);
    let (mut hi, mut r_hi) = (hi, r_hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let r_mid = r_at(mid)?;
        if r_mid > r_lo + 1e-9 || r_mid < r_hi - 1e-9 {
            return Err(Error::NonMonotone(format!(
                "{} strategy: R({lo}) = {r_lo}, R({mid}) = {r_mid}, R({hi}) = {r_hi}",
                family.as_str()
            )));
        }
        if (r_mid - 1.0).abs() < opts.tol {
            let coverage = analytic_coverage(&family.with_parameter(mid)?, d, m)?;
            return Ok(CriticalCoverage::Reached {
                parameter: mid,
                coverage,
            });
        }
        if r_mid > 1.0 {
            lo = mid;
            r_lo = r_mid;
        } else {
            hi = mid;
            r_hi = r_mid;
        }
    }
    Err(Error::parameter(format!(
        "critical-coverage bisection for {} did not converge to |R-1| < {} within 200 steps",
        family.as_str(),
        opts.tol
    )))
}

/// Inverts analytic coverage: the parameter at which a strategy reaches
/// `target` coverage, searched on [0, cap]. Coverage increases in the
/// parameter for every family, so plain bisection suffices. Errors when
/// even the cap falls short.
pub fn parameter_for_coverage(
    family: StrategyFamily,
    d: &DegreeDist,
    m: &WeightModel,
    target: f64,
    cap: f64,
) -> Result<f64> {
    if !(0.0..1.0).contains(&target) {
        return Err(Error::parameter(format!(
            "target coverage must lie in [0, 1), got {target}"
        )));
    }
    if family == StrategyFamily::Uniform {
        return Ok(target);
    }
    let hi = match family {
        StrategyFamily::WeightTwoPoint => cap.min(1.0),
        _ => cap,
    };
    let cov_at = |p: f64| analytic_coverage(&family.with_parameter(p)?, d, m);
    if cov_at(hi)? < target {
        return Err(Error::parameter(format!(
            "{} coverage never reaches {target} for parameters up to {hi}",
            family.as_str()
        )));
    }
    let (mut lo, mut hi) = (0.0, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cov_at(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Inverts analytic R: the parameter at which a strategy's residual
/// reproduction number falls to `target`, searched on [0, cap]. R
/// decreases in the parameter, mirroring [`parameter_for_coverage`].
pub fn parameter_for_r(
    family: StrategyFamily,
    d: &DegreeDist,
    m: &WeightModel,
    target: f64,
    cap: f64,
) -> Result<f64> {
    if !(target > 0.0) || !target.is_finite() {
        return Err(Error::parameter(format!(
            "target reproduction number must be positive, got {target}"
        )));
    }
    let r_at = |p: f64| analytic_r(&family.with_parameter(p)?, d, m);
    if r_at(0.0)? < target {
        return Err(Error::parameter(format!(
            "unvaccinated R is already below the target {target}"
        )));
    }
    let hi = match family {
        StrategyFamily::Uniform | StrategyFamily::WeightTwoPoint => cap.min(1.0),
        _ => cap,
    };
    if r_at(hi)? > target {
        return Err(Error::parameter(format!(
            "{} R never falls to {target} for parameters up to {hi}",
            family.as_str()
        )));
    }
    let (mut lo, mut hi) = (0.0, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if r_at(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Applies a strategy to a concrete graph, producing the vaccinated mask.
///
/// `m` must be the weight model the graph was generated with; the ranked
/// and two-point strategies read edge weights, and a mismatched model
/// would silently corrupt the semantics. Sampling visits vertices in
/// index order under one seeded stream, so plans replay exactly.
pub fn apply_plan(
    g: &WeightedGraph,
    spec: &StrategySpec,
    m: &WeightModel,
    seed: u64,
) -> Result<VaccinationPlan> {
    spec.validate()?;
    if m.label() != g.weight_spec() {
        return Err(Error::parameter(format!(
            "weight model {} does not match the graph's {}",
            m.label(),
            g.weight_spec()
        )));
    }
    match spec {
        StrategySpec::AcqWeightContinuous { .. } if !m.is_continuous() => {
            return Err(Error::StrategyMismatch {
                strategy: "weight-ranked acquaintance",
                requirement: "a continuous weight model (atoms make the weight ranking ambiguous)",
            });
        }
        StrategySpec::WeightTwoPoint { .. } => {
            two_point_params(m)?;
        }
        _ => {}
    }

    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mask = vec![false; n];
    let mut sampled = 0usize;

    match *spec {
        StrategySpec::Uniform { v } => {
            for slot in mask.iter_mut() {
                if rng.gen::<f64>() < v {
                    *slot = true;
                    sampled += 1;
                }
            }
        }
        StrategySpec::AcqStandard { beta } => {
            let po = make_poisson(beta)?;
            for u in 0..n {
                let c = draw_count(&po, &mut rng);
                if c == 0 {
                    continue;
                }
                sampled += 1;
                let nbrs = g.neighbors(u);
                if nbrs.is_empty() {
                    continue;
                }
                for _ in 0..c {
                    let pick = rng.gen_range(0..nbrs.len());
                    mask[nbrs[pick] as usize] = true;
                }
            }
        }
        StrategySpec::AcqWeightContinuous { beta } => {
            let po = make_poisson(beta)?;
            let mut order: Vec<usize> = Vec::new();
            for u in 0..n {
                let c = draw_count(&po, &mut rng);
                if c == 0 {
                    continue;
                }
                sampled += 1;
                let nbrs = g.neighbors(u);
                if nbrs.is_empty() {
                    continue;
                }
                let weights = g.out_weights(u);
                order.clear();
                order.extend(0..nbrs.len());
                // Stable sort by descending weight; rows are id-sorted, so
                // ties (a measure-zero event) fall back to ascending id.
                order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]));
                for &idx in order.iter().take(c.min(nbrs.len())) {
                    mask[nbrs[idx] as usize] = true;
                }
            }
        }
        StrategySpec::WeightTwoPoint { s } => {
            let (_, b, _) = two_point_params(m)?;
            for u in 0..n {
                if rng.gen::<f64>() >= s {
                    continue;
                }
                sampled += 1;
                for (i, &v) in g.neighbors(u).iter().enumerate() {
                    if g.out_weights(u)[i] == b {
                        mask[v as usize] = true;
                    }
                }
            }
        }
    }

    let vaccinated = mask.iter().filter(|&&x| x).count();
    Ok(VaccinationPlan {
        strategy: *spec,
        mask,
        realized_coverage: vaccinated as f64 / n as f64,
        sampled_fraction: sampled as f64 / n as f64,
    })
}

fn make_poisson(beta: f64) -> Result<Option<rand_distr::Poisson<f64>>> {
    if beta == 0.0 {
        return Ok(None);
    }
    rand_distr::Poisson::new(beta)
        .map(Some)
        .map_err(|e| Error::parameter(format!("invalid sampling intensity {beta}: {e}")))
}

fn draw_count<R: Rng>(po: &Option<rand_distr::Poisson<f64>>, rng: &mut R) -> usize {
    match po {
        Some(p) => p.sample(rng) as usize,
        None => 0,
    }
}

/// One point of a sampled-fraction study.
#[derive(Debug, Clone, Copy)]
pub struct SampledFractionRow {
    pub parameter: f64,
    pub sampled_fraction: f64,
    pub coverage: f64,
}

/// Empirical cost-of-strategy curve: for each grid parameter, generate
/// `replicates` graphs, apply the strategy, and average the fraction of
/// vertices sampled and the coverage achieved.
#[allow(clippy::too_many_arguments)]
pub fn sampled_fraction_curve(
    d: &DegreeDist,
    m: &WeightModel,
    family: StrategyFamily,
    grid: &[f64],
    n: usize,
    replicates: usize,
    seed: u64,
) -> Result<Vec<SampledFractionRow>> {
    if replicates == 0 {
        return Err(Error::parameter("sampled-fraction curve needs replicates >= 1"));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for (gi, &p) in grid.iter().enumerate() {
        let spec = family.with_parameter(p)?;
        let mut sampled_sum = 0.0;
        let mut coverage_sum = 0.0;
        for rep in 0..replicates {
            let run_id = (gi * replicates + rep) as u64;
            let graph_seed = mix_seed(seed, 2 * run_id);
            let plan_seed = mix_seed(seed, 2 * run_id + 1);
            let g = netgen::generate(n, d, m, graph_seed)?;
            let plan = apply_plan(&g, &spec, m, plan_seed)?;
            sampled_sum += plan.sampled_fraction;
            coverage_sum += plan.realized_coverage;
        }
        rows.push(SampledFractionRow {
            parameter: p,
            sampled_fraction: sampled_sum / replicates as f64,
            coverage: coverage_sum / replicates as f64,
        });
    }
    Ok(rows)
}

/// SplitMix64-style derivation of auxiliary seeds, so one master seed can
/// drive several independent streams (graph, plan, per-run epidemics)
/// without coordination.
pub fn mix_seed(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
