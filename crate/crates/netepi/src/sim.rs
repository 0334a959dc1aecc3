//! Monte Carlo epidemics on weighted graphs.
//!
//! The dynamics are generation-synchronous: every infective attempts each
//! currently susceptible, unvaccinated neighbor independently with the
//! directed edge weight as success probability, the newly infected form
//! the next generation, and the current generation is removed. A run ends
//! when a generation comes up empty.
//!
//! Ensembles derive per-run seeds from a master seed by counter mixing,
//! so results are independent of thread count and completion order: run i
//! always sees the same RNG stream no matter where it executes.

use crate::error::{Error, Result};
use crate::netgen::WeightedGraph;
use crate::vax::{mix_seed, VaccinationPlan};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const Z95: f64 = 1.959963984540054;

/// One full epidemic with per-generation detail.
#[derive(Debug, Clone)]
pub struct EpidemicRun {
    pub seed: u64,
    pub initial_case: u32,
    /// Infected count per generation, starting with the initial case's
    /// generation of size 1.
    pub generations: Vec<usize>,
    pub final_size: usize,
    /// Offspring counts of the vertices infected by the initial case,
    /// the "typical early infectives" whose mean estimates R. A vertex
    /// infected by two members of that generation at once counts for
    /// whichever attempt landed first.
    pub gen2_offspring: Vec<u32>,
}

/// The per-run numbers ensembles aggregate.
#[derive(Debug, Clone, Copy)]
pub struct RunSummary {
    pub final_size: usize,
    /// Size of the generation infected by the initial case.
    pub gen1_count: usize,
    pub offspring_sum: u64,
    pub offspring_sumsq: u64,
}

/// Ensemble-level knobs.
#[derive(Debug, Clone, Copy)]
pub struct EnsembleOpts {
    /// A run counts as a large outbreak when final_size >= fraction * n.
    pub outbreak_fraction: f64,
}

impl Default for EnsembleOpts {
    fn default() -> Self {
        Self {
            outbreak_fraction: 0.01,
        }
    }
}

/// Aggregated ensemble results, 95% normal confidence intervals.
#[derive(Debug, Clone, Copy)]
pub struct EnsembleStats {
    pub runs: usize,
    pub outbreak_count: usize,
    pub outbreak_prob: f64,
    pub outbreak_ci: (f64, f64),
    /// Pooled mean offspring of the initial case's infectees.
    pub mean_gen2_offspring: f64,
    pub gen2_ci: (f64, f64),
    pub mean_final_fraction_given_outbreak: f64,
}

/// Pooled early-generation reproduction number estimate.
#[derive(Debug, Clone, Copy)]
pub struct EstimatedR {
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Individual offspring counts pooled into the mean.
    pub samples: usize,
    /// Runs whose initial case infected at least one vertex.
    pub runs_with_gen2: usize,
}

/// How many runs must reach a second generation before estimate_r
/// reports a value.
pub const MIN_GEN2_RUNS: usize = 200;

/// Reusable per-thread buffers: stamp-based visited marks avoid clearing
/// an n-sized array between runs.
struct Scratch {
    stamps: Vec<u32>,
    mark: u32,
    order: Vec<u32>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Self {
            stamps: vec![0; n],
            mark: 0,
            order: Vec::new(),
        }
    }

    fn next_mark(&mut self) -> u32 {
        if self.mark == u32::MAX {
            self.stamps.fill(0);
            self.mark = 0;
        }
        self.mark += 1;
        self.mark
    }
}

fn check_plan(g: &WeightedGraph, plan: &VaccinationPlan) -> Result<()> {
    if plan.mask.len() != g.n() {
        return Err(Error::parameter(format!(
            "plan covers {} vertices but the graph has {}",
            plan.mask.len(),
            g.n()
        )));
    }
    if plan.realized_coverage >= 1.0 {
        return Err(Error::AllVaccinated);
    }
    Ok(())
}

fn epidemic(g: &WeightedGraph, mask: &[bool], seed: u64, scratch: &mut Scratch) -> EpidemicRun {
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mark = scratch.next_mark();
    let stamps = &mut scratch.stamps;

    let initial = loop {
        let pick = rng.gen_range(0..n);
        if !mask[pick] {
            break pick;
        }
    };
    stamps[initial] = mark;

    let order = &mut scratch.order;
    order.clear();
    order.push(initial as u32);
    let mut generations = Vec::new();
    let mut gen2_offspring = Vec::new();
    let (mut gstart, mut gend) = (0usize, 1usize);
    let mut gen_index = 0usize;
    while gstart < gend {
        generations.push(gend - gstart);
        for idx in gstart..gend {
            let u = order[idx] as usize;
            let nbrs = g.neighbors(u);
            let ws = g.out_weights(u);
            let mut offspring = 0u32;
            for (j, &v) in nbrs.iter().enumerate() {
                let v = v as usize;
                if mask[v] || stamps[v] == mark {
                    continue;
                }
                if rng.gen::<f64>() < ws[j] {
                    stamps[v] = mark;
                    order.push(v as u32);
                    offspring += 1;
                }
            }
            if gen_index == 1 {
                gen2_offspring.push(offspring);
            }
        }
        gstart = gend;
        gend = order.len();
        gen_index += 1;
    }

    debug_assert!(order.iter().all(|&v| !mask[v as usize]));
    EpidemicRun {
        seed,
        initial_case: initial as u32,
        generations,
        final_size: order.len(),
        gen2_offspring,
    }
}

/// Runs a single epidemic. Fails only if the plan left nobody to infect.
pub fn run_epidemic(g: &WeightedGraph, plan: &VaccinationPlan, seed: u64) -> Result<EpidemicRun> {
    check_plan(g, plan)?;
    let mut scratch = Scratch::new(g.n());
    Ok(epidemic(g, &plan.mask, seed, &mut scratch))
}

fn summarize(run: &EpidemicRun) -> RunSummary {
    RunSummary {
        final_size: run.final_size,
        gen1_count: run.gen2_offspring.len(),
        offspring_sum: run.gen2_offspring.iter().map(|&x| x as u64).sum(),
        offspring_sumsq: run.gen2_offspring.iter().map(|&x| (x as u64) * (x as u64)).sum(),
    }
}

/// Executes `runs` independent epidemics in parallel, seeds derived from
/// `master_seed` by run index. The returned vector is in run order.
pub fn simulate_runs(
    g: &WeightedGraph,
    plan: &VaccinationPlan,
    runs: usize,
    master_seed: u64,
) -> Result<Vec<RunSummary>> {
    if runs == 0 {
        return Err(Error::parameter("ensemble needs at least one run"));
    }
    check_plan(g, plan)?;
    Ok((0..runs)
        .into_par_iter()
        .map_init(
            || Scratch::new(g.n()),
            |scratch, i| summarize(&epidemic(g, &plan.mask, mix_seed(master_seed, i as u64), scratch)),
        )
        .collect())
}

/// Aggregates run summaries into outbreak and offspring statistics.
pub fn ensemble_stats(summaries: &[RunSummary], n: usize, opts: &EnsembleOpts) -> EnsembleStats {
    let runs = summaries.len();
    let cutoff = opts.outbreak_fraction * n as f64;
    let mut outbreak_count = 0usize;
    let mut outbreak_final_sum = 0.0f64;
    let mut samples = 0u64;
    let mut off_sum = 0u64;
    let mut off_sumsq = 0u64;
    for s in summaries {
        if s.final_size as f64 >= cutoff {
            outbreak_count += 1;
            outbreak_final_sum += s.final_size as f64 / n as f64;
        }
        samples += s.gen1_count as u64;
        off_sum += s.offspring_sum;
        off_sumsq += s.offspring_sumsq;
    }

    let p = outbreak_count as f64 / runs as f64;
    let p_se = (p * (1.0 - p) / runs as f64).sqrt();
    let (mean, ci) = pooled_mean_ci(samples, off_sum, off_sumsq);
    EnsembleStats {
        runs,
        outbreak_count,
        outbreak_prob: p,
        outbreak_ci: ((p - Z95 * p_se).max(0.0), (p + Z95 * p_se).min(1.0)),
        mean_gen2_offspring: mean,
        gen2_ci: ci,
        mean_final_fraction_given_outbreak: if outbreak_count > 0 {
            outbreak_final_sum / outbreak_count as f64
        } else {
            0.0
        },
    }
}

fn pooled_mean_ci(samples: u64, sum: u64, sumsq: u64) -> (f64, (f64, f64)) {
    if samples == 0 {
        return (0.0, (0.0, 0.0));
    }
    let nf = samples as f64;
    let mean = sum as f64 / nf;
    let var = if samples > 1 {
        (sumsq as f64 - nf * mean * mean).max(0.0) / (nf - 1.0)
    } else {
        0.0
    };
    let se = (var / nf).sqrt();
    (mean, (mean - Z95 * se, mean + Z95 * se))
}

/// Extracts the pooled reproduction-number estimate, requiring at least
/// [`MIN_GEN2_RUNS`] runs that reached a second generation.
pub fn estimate_from(summaries: &[RunSummary]) -> Result<EstimatedR> {
    let runs_with_gen2 = summaries.iter().filter(|s| s.gen1_count > 0).count();
    if runs_with_gen2 < MIN_GEN2_RUNS {
        return Err(Error::InsufficientSamples {
            got: runs_with_gen2,
            need: MIN_GEN2_RUNS,
        });
    }
    let samples: u64 = summaries.iter().map(|s| s.gen1_count as u64).sum();
    let sum: u64 = summaries.iter().map(|s| s.offspring_sum).sum();
    let sumsq: u64 = summaries.iter().map(|s| s.offspring_sumsq).sum();
    let (mean, (lo, hi)) = pooled_mean_ci(samples, sum, sumsq);
    Ok(EstimatedR {
        mean,
        ci_low: lo,
        ci_high: hi,
        samples: samples as usize,
        runs_with_gen2,
    })
}

/// Full ensemble with default outbreak classification.
pub fn run_ensemble(
    g: &WeightedGraph,
    plan: &VaccinationPlan,
    runs: usize,
    master_seed: u64,
) -> Result<EnsembleStats> {
    let summaries = simulate_runs(g, plan, runs, master_seed)?;
    Ok(ensemble_stats(&summaries, g.n(), &EnsembleOpts::default()))
}

/// Early-generation reproduction number across an ensemble.
pub fn estimate_r(
    g: &WeightedGraph,
    plan: &VaccinationPlan,
    runs: usize,
    master_seed: u64,
) -> Result<EstimatedR> {
    estimate_from(&simulate_runs(g, plan, runs, master_seed)?)
}
