//! One function per subcommand. Human-readable summaries go to stdout
//! only when the CSV goes to a file; with no `--out` the CSV itself is
//! the stdout payload and stays uncontaminated.

use crate::csvout::Csv;
use netepi::config::{self, ConfigMap};
use netepi::degree::DegreeDist;
use netepi::error::{Error, Result};
use netepi::netgen::{self, WeightedGraph};
use netepi::sim;
use netepi::thresholds;
use netepi::vax::{self, CriticalCoverage, CriticalOpts, StrategyFamily};
use netepi::weight::WeightModel;
use netepi::mix_seed;
use std::path::Path;

fn missing(key: &str) -> Error {
    Error::Parse {
        line: 0,
        msg: format!("missing required setting `{key}`"),
    }
}

fn degree_of(cfg: &ConfigMap) -> Result<DegreeDist> {
    cfg.degree("degree")?.ok_or_else(|| missing("degree"))
}

fn weight_or_uniform(cfg: &ConfigMap) -> Result<WeightModel> {
    Ok(cfg.weight("weight")?.unwrap_or(WeightModel::Uniform))
}

fn seed_of(cfg: &ConfigMap) -> Result<u64> {
    Ok(cfg.u64("seed")?.unwrap_or(0))
}

fn n_of(cfg: &ConfigMap, default: usize) -> Result<usize> {
    Ok(cfg.usize("n")?.unwrap_or(default))
}

fn runs_of(cfg: &ConfigMap, default: usize) -> Result<usize> {
    Ok(cfg.usize("runs")?.unwrap_or(default))
}

/// Grid syntax: `start:stop:step` or a comma list; empty means an empty
/// grid (header-only CSV).
fn grid_of(cfg: &ConfigMap) -> Result<Vec<f64>> {
    let raw = cfg.get("grid").ok_or_else(|| missing("grid"))?.trim();
    let line = cfg.line("grid");
    let bad = |msg: String| Error::Parse { line, msg };
    if raw.is_empty() {
        return Ok(Vec::new());
    }
    if raw.contains(':') {
        let parts: Vec<&str> = raw.split(':').collect();
        if parts.len() != 3 {
            return Err(bad(format!("grid `{raw}` is not start:stop:step")));
        }
        let mut vals = [0.0f64; 3];
        for (slot, part) in vals.iter_mut().zip(&parts) {
            *slot = part
                .trim()
                .parse()
                .map_err(|_| bad(format!("grid component `{part}` is not a number")))?;
        }
        let [start, stop, step] = vals;
        if !(step > 0.0) || stop < start {
            return Err(bad(format!("grid `{raw}` needs stop >= start and step > 0")));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        if count > 100_000 {
            return Err(bad(format!("grid `{raw}` has {count} points; cap is 100000")));
        }
        return Ok((0..count).map(|i| start + i as f64 * step).collect());
    }
    raw.split(',')
        .map(|part| {
            part.trim()
                .parse()
                .map_err(|_| bad(format!("grid entry `{part}` is not a number")))
        })
        .collect()
}

fn strategies_of(cfg: &ConfigMap, default: &str) -> Result<Vec<StrategyFamily>> {
    let raw = cfg.get("strategies").unwrap_or(default);
    let line = cfg.line("strategies");
    let fams: Vec<StrategyFamily> = raw
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| config::parse_family(s).map_err(|e| config::relocate(e, line)))
        .collect::<Result<_>>()?;
    if fams.is_empty() {
        return Err(Error::Parse {
            line,
            msg: "strategy list is empty".into(),
        });
    }
    Ok(fams)
}

pub fn threshold(cfg: &ConfigMap, out: Option<&Path>) -> Result<()> {
    let d = degree_of(cfg)?;
    let gamma = cfg.f64("gamma")?;
    let g_str = cfg.get("g");
    let w_str = cfg.get("weight");
    let given = [gamma.is_some(), g_str.is_some(), w_str.is_some()]
        .iter()
        .filter(|&&x| x)
        .count();
    if given != 1 {
        return Err(Error::Parse {
            line: 0,
            msg: "threshold needs exactly one of gamma, g, weight".into(),
        });
    }

    let mut csv = Csv::new("threshold", cfg, "regime,r0");
    let trio = |csv: &mut Csv, g: &netepi::WeightFunctionG| -> Result<()> {
        let r_deg = thresholds::r0_degree_dep(&d, g)?;
        let r_h1 = thresholds::r0_h1(&d, g)?;
        let r_h2 = thresholds::r0_h2(&d, g)?;
        println!("r0_deg = {r_deg}");
        println!("r0_h1 = {r_h1}");
        println!("r0_h2 = {r_h2}");
        csv.row(&format!("degree_dep,{r_deg}"));
        csv.row(&format!("degree_dep_h1,{r_h1}"));
        csv.row(&format!("degree_dep_h2,{r_h2}"));
        Ok(())
    };
    let iid = |csv: &mut Csv, gamma: f64| -> Result<()> {
        let r = thresholds::r0_iid(&d, gamma)?;
        println!("R0 = {r}");
        csv.row(&format!("iid_weights,{r}"));
        Ok(())
    };

    if let Some(gamma) = gamma {
        iid(&mut csv, gamma)?;
    } else if let Some(s) = g_str {
        let g = config::parse_weight_function(s)
            .map_err(|e| config::relocate(e, cfg.line("g")))?;
        trio(&mut csv, &g)?;
    } else {
        let m = cfg.weight("weight")?.expect("checked above");
        match m.weight_function() {
            Some(g) => trio(&mut csv, g)?,
            None => iid(&mut csv, m.mean_weight()?)?,
        }
    }
    if out.is_some() {
        csv.finish(out)?;
    }
    Ok(())
}

pub fn sweep(cfg: &ConfigMap, out: Option<&Path>) -> Result<()> {
    let kind = cfg.get("kind").ok_or_else(|| missing("kind"))?;
    let d = degree_of(cfg)?;
    let grid = grid_of(cfg)?;
    let seed = seed_of(cfg)?;
    let csv = match kind {
        "tau" => {
            let mut csv = Csv::new("sweep", cfg, "tau,r0_h2,r0_h1,r0_deg");
            for row in thresholds::sweep_tau(&d, &grid)? {
                csv.row(&format!(
                    "{},{},{},{}",
                    row.tau, row.r0_h2, row.r0_h1, row.r0_deg
                ));
            }
            csv
        }
        "coverage" => {
            let m = weight_or_uniform(cfg)?;
            let fams = strategies_of(cfg, "uniform,acq,acq_weight")?;
            let cap = cfg.f64("beta_cap")?.unwrap_or(50.0);
            let header: Vec<String> = std::iter::once("coverage".to_string())
                .chain(fams.iter().map(|f| format!("r_{}", f.as_str())))
                .collect();
            let mut csv = Csv::new("sweep", cfg, &header.join(","));
            for &cov in &grid {
                let mut fields = cov.to_string();
                for &fam in &fams {
                    let p = vax::parameter_for_coverage(fam, &d, &m, cov, cap)?;
                    let r = vax::analytic_r(&fam.with_parameter(p)?, &d, &m)?;
                    fields.push(',');
                    fields.push_str(&r.to_string());
                }
                csv.row(&fields);
            }
            csv
        }
        "sampled" => {
            let m = weight_or_uniform(cfg)?;
            let fams = strategies_of(cfg, "acq,twopoint")?;
            let n = n_of(cfg, 200_000)?;
            let replicates = cfg.usize("replicates")?.unwrap_or(1);
            let mut csv = Csv::new("sweep", cfg, "strategy,parameter,sampled_fraction,coverage");
            for (i, &fam) in fams.iter().enumerate() {
                let rows = vax::sampled_fraction_curve(
                    &d,
                    &m,
                    fam,
                    &grid,
                    n,
                    replicates,
                    mix_seed(seed, 1000 + i as u64),
                )?;
                for row in rows {
                    csv.row(&format!(
                        "{},{},{},{}",
                        fam.as_str(),
                        row.parameter,
                        row.sampled_fraction,
                        row.coverage
                    ));
                }
            }
            csv
        }
        other => {
            return Err(Error::Parse {
                line: cfg.line("kind"),
                msg: format!("unknown sweep kind `{other}`; expected tau, coverage, or sampled"),
            });
        }
    };
    csv.finish(out)?;
    Ok(())
}

pub fn coverage(cfg: &ConfigMap, out: Option<&Path>) -> Result<()> {
    let d = degree_of(cfg)?;
    let m = weight_or_uniform(cfg)?;
    let default_fams = if matches!(m, WeightModel::TwoPoint { .. }) {
        "uniform,acq,twopoint"
    } else {
        "uniform,acq,acq_weight"
    };
    let fams = strategies_of(cfg, default_fams)?;
    let opts = CriticalOpts {
        tol: cfg.f64("tol")?.unwrap_or(1e-6),
        beta_cap: cfg.f64("beta_cap")?.unwrap_or(50.0),
    };
    let mut csv = Csv::new("coverage", cfg, "strategy,status,parameter,coverage,r");
    for &fam in &fams {
        let name = fam.as_str();
        match vax::critical_coverage(fam, &d, &m, &opts)? {
            CriticalCoverage::AlreadySubcritical => {
                let r0 = vax::analytic_r(&fam.with_parameter(0.0)?, &d, &m)?;
                csv.row(&format!("{name},already_subcritical,0,0,{r0}"));
                if out.is_some() {
                    println!("{name}: already subcritical (R0 = {r0})");
                }
            }
            CriticalCoverage::Reached {
                parameter,
                coverage,
            } => {
                let r = vax::analytic_r(&fam.with_parameter(parameter)?, &d, &m)?;
                csv.row(&format!("{name},reached,{parameter},{coverage},{r}"));
                if out.is_some() {
                    println!("{name}: critical coverage {coverage} at parameter {parameter}");
                }
            }
            CriticalCoverage::Unreachable { at_parameter, r } => {
                let cov = vax::analytic_coverage(&fam.with_parameter(at_parameter)?, &d, &m)?;
                csv.row(&format!("{name},unreachable,{at_parameter},{cov},{r}"));
                if out.is_some() {
                    println!("{name}: R still {r} at the parameter cap {at_parameter}");
                }
            }
        }
    }
    csv.finish(out)?;
    Ok(())
}

pub fn generate(cfg: &ConfigMap, out: Option<&Path>, edges_csv: Option<&Path>) -> Result<()> {
    let d = degree_of(cfg)?;
    let m = weight_or_uniform(cfg)?;
    let n = n_of(cfg, 200_000)?;
    let seed = seed_of(cfg)?;
    let Some(path) = out else {
        return Err(missing("out"));
    };
    let (g, stats) = netgen::generate_with_stats(n, &d, &m, seed)?;
    g.save(path)?;
    if let Some(ecsv) = edges_csv {
        let file = std::fs::File::create(ecsv)?;
        g.export_edge_csv(std::io::BufWriter::new(file))?;
        println!("edge list -> {}", ecsv.display());
    }
    println!(
        "generated n={} edges={} self_loops_erased={} multi_edges_merged={} -> {}",
        g.n(),
        g.edge_count(),
        stats.self_loops,
        stats.merged_edges,
        path.display()
    );
    Ok(())
}

/// Which criterion a validation row asserts.
enum Check {
    RAndCoverage,
    OutbreakBelow(f64),
    OutbreakAbove(f64),
}

impl Check {
    fn label(&self) -> String {
        match self {
            Check::RAndCoverage => "r_and_coverage".to_string(),
            Check::OutbreakBelow(x) => format!("outbreak_lt_{x}"),
            Check::OutbreakAbove(x) => format!("outbreak_gt_{x}"),
        }
    }
}

struct ValidateRow {
    id: String,
    fam: StrategyFamily,
    param: f64,
    on_extra_model: bool,
    check: Check,
}

pub fn validate(cfg: &ConfigMap, out: Option<&Path>) -> Result<bool> {
    let d = cfg
        .degree("degree")?
        .map_or_else(|| DegreeDist::poisson(6.0), Ok)?;
    let m = weight_or_uniform(cfg)?;
    let n = n_of(cfg, 200_000)?;
    let runs = runs_of(cfg, 2000)?;
    let seed = seed_of(cfg)?;
    if n < 1000 {
        return Err(Error::Parameter(format!(
            "validation needs n >= 1000, got {n}"
        )));
    }
    let gamma_sim = m.mean_weight()?;
    let gamma_an = cfg.f64("assume_gamma")?.unwrap_or(gamma_sim);

    let mut rows = vec![
        ValidateRow {
            id: "no_vax".into(),
            fam: StrategyFamily::Uniform,
            param: 0.0,
            on_extra_model: false,
            check: Check::RAndCoverage,
        },
        ValidateRow {
            id: "uniform_v0.3".into(),
            fam: StrategyFamily::Uniform,
            param: 0.3,
            on_extra_model: false,
            check: Check::RAndCoverage,
        },
        ValidateRow {
            id: "acq_b1".into(),
            fam: StrategyFamily::AcqStandard,
            param: 1.0,
            on_extra_model: false,
            check: Check::RAndCoverage,
        },
    ];
    if m.is_continuous() {
        rows.push(ValidateRow {
            id: "acq_weight_b1".into(),
            fam: StrategyFamily::AcqWeightContinuous,
            param: 1.0,
            on_extra_model: false,
            check: Check::RAndCoverage,
        });
    }
    let two_point_main = matches!(m, WeightModel::TwoPoint { .. });
    let extra_model = if two_point_main {
        None
    } else {
        Some(WeightModel::two_point(0.1, 1.0, 0.9)?)
    };
    rows.push(ValidateRow {
        id: "twopoint_s0.5".into(),
        fam: StrategyFamily::WeightTwoPoint,
        param: 0.5,
        on_extra_model: !two_point_main,
        check: Check::RAndCoverage,
    });
    // Outbreak-probability checks at analytic R below and above 1, via
    // uniform vaccination tuned to the target. Skipped when the
    // unvaccinated R is already below the target.
    for (tag, target, check) in [
        ("uniform_r0.8", 0.8, Check::OutbreakBelow(0.02)),
        ("uniform_r1.3", 1.3, Check::OutbreakAbove(0.2)),
    ] {
        if let Ok(param) = vax::parameter_for_r(StrategyFamily::Uniform, &d, &m, target, 1.0) {
            rows.push(ValidateRow {
                id: tag.into(),
                fam: StrategyFamily::Uniform,
                param,
                on_extra_model: false,
                check,
            });
        }
    }

    let g_main = netgen::generate(n, &d, &m, mix_seed(seed, 11))?;
    let g_extra = match &extra_model {
        Some(em) if rows.iter().any(|r| r.on_extra_model) => {
            Some(netgen::generate(n, &d, em, mix_seed(seed, 12))?)
        }
        _ => None,
    };

    let header = "config_id,analytic_r,estimated_r,ci_low,ci_high,analytic_coverage,realized_coverage,outbreak_prob,check,pass";
    let mut csv = Csv::new("validate", cfg, header);
    let mut all_pass = true;
    let mut passed = 0usize;
    for (i, row) in rows.iter().enumerate() {
        let (graph, model): (&WeightedGraph, &WeightModel) = if row.on_extra_model {
            (g_extra.as_ref().expect("generated above"), extra_model.as_ref().unwrap())
        } else {
            (&g_main, &m)
        };
        let spec = row.fam.with_parameter(row.param)?;
        let plan = vax::apply_plan(graph, &spec, model, mix_seed(seed, 100 + i as u64))?;
        let summaries = sim::simulate_runs(graph, &plan, runs, mix_seed(seed, 200 + i as u64))?;
        let stats = sim::ensemble_stats(&summaries, n, &sim::EnsembleOpts::default());

        let r_an = match row.fam {
            StrategyFamily::Uniform => vax::r_uniform(&d, gamma_an, row.param)?,
            StrategyFamily::AcqStandard => vax::r_acq_standard(&d, gamma_an, row.param)?,
            StrategyFamily::AcqWeightContinuous => vax::r_weighted(&d, model, row.param)?,
            StrategyFamily::WeightTwoPoint => vax::r_twopoint(&d, model, row.param)?,
        };
        let cov_an = vax::analytic_coverage(&spec, &d, model)?;
        let cov_se = (cov_an * (1.0 - cov_an) / n as f64).sqrt();
        let est = stats.mean_gen2_offspring;
        let est_se = (est - stats.gen2_ci.0) / 1.96;

        let pass = match row.check {
            Check::RAndCoverage => {
                (plan.realized_coverage - cov_an).abs() <= 4.0 * cov_se + 1e-12
                    && (est - r_an).abs() <= 4.0 * est_se + 1e-12
            }
            Check::OutbreakBelow(x) => stats.outbreak_prob < x,
            Check::OutbreakAbove(x) => stats.outbreak_prob > x,
        };
        all_pass &= pass;
        passed += pass as usize;
        csv.row(&format!(
            "{},{},{},{},{},{},{},{},{},{}",
            row.id,
            r_an,
            est,
            stats.gen2_ci.0,
            stats.gen2_ci.1,
            cov_an,
            plan.realized_coverage,
            stats.outbreak_prob,
            row.check.label(),
            pass
        ));
        if out.is_some() {
            println!(
                "{}: analytic R {r_an}, estimated {est}, coverage {} vs {cov_an}, outbreak {} -> {}",
                row.id,
                plan.realized_coverage,
                stats.outbreak_prob,
                if pass { "pass" } else { "FAIL" }
            );
        }
    }
    let total = rows.len();
    csv.finish(out)?;
    if out.is_some() {
        println!("validation: {passed}/{total} rows passed");
    }
    Ok(all_pass)
}

pub fn simulate(cfg: &ConfigMap, out: Option<&Path>) -> Result<()> {
    let seed = seed_of(cfg)?;
    let runs = runs_of(cfg, 2000)?;

    let (g, d, m) = match cfg.get("graph") {
        Some(gpath) => {
            let g = WeightedGraph::load(Path::new(gpath))?;
            let m = match cfg.weight("weight")? {
                Some(m) => m,
                None => config::parse_weight(g.weight_spec()).map_err(|_| {
                    Error::Parameter(format!(
                        "graph weight spec `{}` has no config form; pass --weight",
                        g.weight_spec()
                    ))
                })?,
            };
            let d = match cfg.degree("degree")? {
                Some(d) => d,
                None => config::parse_degree(g.degree_spec())
                    .or_else(|_| netgen::empirical_degree_dist(&g))?,
            };
            (g, d, m)
        }
        None => {
            let d = degree_of(cfg)?;
            let m = weight_or_uniform(cfg)?;
            let n = n_of(cfg, 200_000)?;
            let g = netgen::generate(n, &d, &m, mix_seed(seed, 1))?;
            (g, d, m)
        }
    };

    let family = config::parse_family(cfg.get("strategy").unwrap_or("uniform"))
        .map_err(|e| config::relocate(e, cfg.line("strategy")))?;
    let param = cfg.f64("parameter")?.unwrap_or(0.0);
    let spec = family.with_parameter(param)?;
    let plan = vax::apply_plan(&g, &spec, &m, mix_seed(seed, 2))?;
    let summaries = sim::simulate_runs(&g, &plan, runs, mix_seed(seed, 3))?;
    let stats = sim::ensemble_stats(&summaries, g.n(), &sim::EnsembleOpts::default());
    let est = sim::estimate_from(&summaries)?;
    let r_an = vax::analytic_r(&spec, &d, &m)?;

    let id = cfg.get("id").map(str::to_string).unwrap_or_else(|| {
        format!("{}|{}|{}({})", d.label(), m.label(), family.as_str(), param).replace(',', ";")
    });
    let mut csv = Csv::new(
        "simulate",
        cfg,
        "config_id,analytic_r,estimated_r,ci_low,ci_high,outbreak_prob,coverage",
    );
    csv.row(&format!(
        "{id},{r_an},{},{},{},{},{}",
        est.mean, est.ci_low, est.ci_high, stats.outbreak_prob, plan.realized_coverage
    ));
    csv.finish(out)?;
    if out.is_some() {
        println!(
            "R analytic {r_an}, estimated {} [{}, {}] from {} offspring counts in {} runs",
            est.mean, est.ci_low, est.ci_high, est.samples, est.runs_with_gen2
        );
        println!(
            "outbreak probability {} ({} of {} runs), coverage {}",
            stats.outbreak_prob, stats.outbreak_count, stats.runs, plan.realized_coverage
        );
    }
    Ok(())
}
