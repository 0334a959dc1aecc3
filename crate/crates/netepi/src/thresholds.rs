//! Basic reproduction numbers for the weighted epidemic.
//!
//! With weights independent of everything else, one number suffices:
//! R0 = gamma E[D~ - 1] for the mean weight gamma, with D~ size-biased.
//! When a vertex's outgoing weights are a function g of its own degree,
//! infectivity and offspring count become dependent and three quantities
//! are worth comparing: the true R0 and two homogeneous stand-ins that an
//! unweighted analysis would produce. Their gaps quantify how much the
//! degree dependence matters; all three reduce to finite sums over the
//! truncated degree support.

use crate::degree::DegreeDist;
use crate::error::{Error, Result};
use crate::weight::WeightFunctionG;

/// Which reproduction number a report carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    IidWeights,
    DegreeDep,
    DegreeDepH1,
    DegreeDepH2,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::IidWeights => "iid_weights",
            Self::DegreeDep => "degree_dep",
            Self::DegreeDepH1 => "degree_dep_h1",
            Self::DegreeDepH2 => "degree_dep_h2",
        }
    }
}

/// One computed reproduction number with its inputs echoed.
#[derive(Debug, Clone)]
pub struct ThresholdReport {
    pub r0: f64,
    pub regime: Regime,
    pub degree_spec: String,
    pub weight_spec: String,
}

/// One row of a tau sweep: the three degree-dependent reproduction
/// numbers at g(k) = k^-tau.
#[derive(Debug, Clone, Copy)]
pub struct TauRow {
    pub tau: f64,
    pub r0_h2: f64,
    pub r0_h1: f64,
    pub r0_deg: f64,
}

/// R0 for weights drawn independently of degrees: gamma E[D~ - 1].
pub fn r0_iid(d: &DegreeDist, gamma: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::parameter(format!(
            "mean transmission weight must lie in [0,1], got {gamma}"
        )));
    }
    Ok(gamma * d.excess_mean()?)
}

/// The exact reproduction number under degree-dependent weights:
/// E[(D~ - 1) g(D~)], coupling offspring count and infectivity.
pub fn r0_degree_dep(d: &DegreeDist, g: &WeightFunctionG) -> Result<f64> {
    let sb = d.size_bias()?;
    Ok(sb
        .pmf()
        .iter()
        .enumerate()
        .map(|(k, &p)| (k as f64 - 1.0) * g.eval(k as u32) * p)
        .sum())
}

/// First homogeneous approximation: E[g(D~)] E[D~ - 1]. The infectivity
/// is averaged over an edge-end's degree but decoupled from its offspring
/// count.
pub fn r0_h1(d: &DegreeDist, g: &WeightFunctionG) -> Result<f64> {
    let sb = d.size_bias()?;
    let mean_g: f64 = sb
        .pmf()
        .iter()
        .enumerate()
        .map(|(k, &p)| g.eval(k as u32) * p)
        .sum();
    Ok(mean_g * d.excess_mean()?)
}

/// Second homogeneous approximation: E[D~ - 1] E[g(D)], with the
/// infectivity averaged over a vertex chosen uniformly rather than by
/// edge.
pub fn r0_h2(d: &DegreeDist, g: &WeightFunctionG) -> Result<f64> {
    let mean_g: f64 = d
        .pmf()
        .iter()
        .enumerate()
        .map(|(k, &p)| g.eval(k as u32) * p)
        .sum();
    Ok(mean_g * d.excess_mean()?)
}

/// The trio at g(k) = k^-tau for each grid point.
pub fn sweep_tau(d: &DegreeDist, taus: &[f64]) -> Result<Vec<TauRow>> {
    taus.iter()
        .map(|&tau| {
            let g = WeightFunctionG::power_decay(tau)?;
            Ok(TauRow {
                tau,
                r0_h2: r0_h2(d, &g)?,
                r0_h1: r0_h1(d, &g)?,
                r0_deg: r0_degree_dep(d, &g)?,
            })
        })
        .collect()
}
