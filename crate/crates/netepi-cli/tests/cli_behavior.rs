//! End-to-end behavior of the netepi binary: argument handling, config
//! merging, CSV shape, exit codes, and the generate/simulate round trip.

use std::path::PathBuf;
use std::process::Command;

fn netepi(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_netepi"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("utf8 stdout"),
        String::from_utf8(out.stderr).expect("utf8 stderr"),
    )
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("netepi-cli-{}-{name}", std::process::id()))
}

/// Splits a CSV dump into (comment, header, data rows).
fn parse_csv(text: &str) -> (String, String, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let comment = lines.next().expect("comment line").to_string();
    assert!(comment.starts_with("# netepi "), "bad comment: {comment}");
    let header = lines.next().expect("header line").to_string();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (comment, header, rows)
}

fn cell(rows: &[Vec<String>], key: &str, col: usize) -> f64 {
    rows.iter()
        .find(|r| r[0] == key)
        .unwrap_or_else(|| panic!("no row {key}"))[col]
        .parse()
        .unwrap()
}

#[test]
fn threshold_reports_iid_r0() {
    // without --out the command prints the plain summary only
    let (code, out, _) = netepi(&["threshold", "--degree", "poisson(6)", "--gamma", "0.5"]);
    assert_eq!(code, 0);
    let r: f64 = out.trim().strip_prefix("R0 = ").expect("summary line").parse().unwrap();
    assert!((r - 3.0).abs() < 1e-9);

    let csv = tmp("threshold-iid.csv");
    let (code, _, _) = netepi(&[
        "threshold",
        "--degree",
        "poisson(6)",
        "--gamma",
        "0.5",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    std::fs::remove_file(&csv).ok();
    let (comment, header, rows) = parse_csv(&text);
    assert!(comment.starts_with("# netepi threshold "));
    assert!(comment.contains("seed=0"));
    assert!(comment.contains("degree=poisson(6)"));
    assert_eq!(header, "regime,r0");
    assert_eq!(rows.len(), 1);
    assert!((cell(&rows, "iid_weights", 1) - 3.0).abs() < 1e-9);
}

#[test]
fn threshold_reports_the_degree_dependent_trio() {
    let csv = tmp("threshold-trio.csv");
    let (code, out, _) = netepi(&[
        "threshold",
        "--degree",
        "poisson(6)",
        "--g",
        "indicator(0)",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("r0_deg"), "{out}");
    let text = std::fs::read_to_string(&csv).unwrap();
    std::fs::remove_file(&csv).ok();
    let (_, header, rows) = parse_csv(&text);
    assert_eq!(header, "regime,r0");
    assert_eq!(rows.len(), 3);
    for key in ["degree_dep", "degree_dep_h1", "degree_dep_h2"] {
        assert!((cell(&rows, key, 1) - 6.0).abs() < 1e-9, "{key}");
    }
}

#[test]
fn flags_override_config_files() {
    let cfg = tmp("override.conf");
    let csv = tmp("override.csv");
    std::fs::write(&cfg, "degree = poisson(6)\ngamma = 0.2\nseed = 4\n").unwrap();
    let (code, _, _) = netepi(&[
        "threshold",
        "--config",
        cfg.to_str().unwrap(),
        "--gamma",
        "0.5",
        "--out",
        csv.to_str().unwrap(),
    ]);
    std::fs::remove_file(&cfg).ok();
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    std::fs::remove_file(&csv).ok();
    let (comment, _, rows) = parse_csv(&text);
    assert!(comment.contains("gamma=0.5"), "{comment}");
    assert!(comment.contains("seed=4"), "{comment}");
    assert!((cell(&rows, "iid_weights", 1) - 3.0).abs() < 1e-9);
}

#[test]
fn empirical_degrees_load_from_csv() {
    let path = tmp("degrees.csv");
    std::fs::write(&path, "degree,prob\n# half and half\n1,0.5\n3,0.5\n").unwrap();
    let spec = format!("empirical({})", path.display());
    let (code, out, _) = netepi(&["threshold", "--degree", &spec, "--gamma", "1.0"]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 0);
    let r: f64 = out.trim().strip_prefix("R0 = ").expect("summary line").parse().unwrap();
    assert!((r - 1.5).abs() < 1e-9);
}

#[test]
fn exit_codes_separate_failure_kinds() {
    // unknown spec name: parse error
    let (code, _, err) = netepi(&["threshold", "--degree", "nope(1)", "--gamma", "0.5"]);
    assert_eq!(code, 2);
    assert!(err.contains("netepi:"), "{err}");
    // syntactically fine, semantically out of domain
    let (code, _, err) = netepi(&["threshold", "--degree", "poisson(-2)", "--gamma", "0.5"]);
    assert_eq!(code, 3);
    assert!(err.contains("invalid parameter"), "{err}");
    // missing required choice
    let (code, _, _) = netepi(&["threshold", "--degree", "poisson(6)"]);
    assert_eq!(code, 2);
    // unsupported output format
    let (code, _, _) = netepi(&[
        "threshold",
        "--degree",
        "poisson(6)",
        "--gamma",
        "0.5",
        "--format",
        "json",
    ]);
    assert_eq!(code, 2);
    // missing config file is an io error
    let (code, _, _) = netepi(&["threshold", "--config", "/nonexistent/x.conf"]);
    assert_eq!(code, 1);
}

#[test]
fn tau_sweep_emits_the_grid() {
    let (code, out, _) = netepi(&[
        "sweep",
        "--kind",
        "tau",
        "--degree",
        "powerlaw(3.5,mean=4)",
        "--grid",
        "0:1:0.5",
    ]);
    assert_eq!(code, 0);
    let (_, header, rows) = parse_csv(&out);
    assert_eq!(header, "tau,r0_h2,r0_h1,r0_deg");
    assert_eq!(rows.len(), 3);
    let taus: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(taus, vec![0.0, 0.5, 1.0]);
    // tau = 1 row straddles the threshold
    let last = &rows[2];
    let r_deg: f64 = last[3].parse().unwrap();
    let r_h1: f64 = last[2].parse().unwrap();
    assert!(r_deg < 1.0 && r_h1 > 1.0);
}

#[test]
fn empty_grids_give_header_only_output() {
    let (code, out, _) = netepi(&[
        "sweep",
        "--kind",
        "tau",
        "--degree",
        "poisson(6)",
        "--grid",
        "",
    ]);
    assert_eq!(code, 0);
    let (_, header, rows) = parse_csv(&out);
    assert_eq!(header, "tau,r0_h2,r0_h1,r0_deg");
    assert!(rows.is_empty());
}

#[test]
fn coverage_reports_critical_points() {
    let (code, out, _) = netepi(&["coverage", "--degree", "poisson(6)", "--weight", "uniform"]);
    assert_eq!(code, 0);
    let (_, header, rows) = parse_csv(&out);
    assert_eq!(header, "strategy,status,parameter,coverage,r");
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert_eq!(r[1], "reached");
    }
    assert!((cell(&rows, "uniform", 3) - 2.0 / 3.0).abs() < 1e-3);
    assert!((cell(&rows, "acq", 3) - 0.5606).abs() < 1e-3);
    assert!((cell(&rows, "acq_weight", 3) - 0.5415).abs() < 1e-3);
}

#[test]
fn generate_and_simulate_round_trip() {
    let bin = tmp("roundtrip.bin");
    let edges = tmp("roundtrip-edges.csv");
    let (code, out, _) = netepi(&[
        "generate",
        "--n",
        "5000",
        "--degree",
        "poisson(6)",
        "--weight",
        "uniform",
        "--seed",
        "5",
        "--out",
        bin.to_str().unwrap(),
        "--edges-csv",
        edges.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("generated n=5000"), "{out}");
    let edge_text = std::fs::read_to_string(&edges).unwrap();
    assert!(edge_text.starts_with("# graph n=5000 seed=5"));
    assert_eq!(edge_text.lines().nth(1).unwrap(), "u,v,w_uv,w_vu");

    let (code, out, _) = netepi(&[
        "simulate",
        "--graph",
        bin.to_str().unwrap(),
        "--runs",
        "300",
        "--seed",
        "9",
    ]);
    assert_eq!(code, 0);
    let (_, header, rows) = parse_csv(&out);
    assert_eq!(
        header,
        "config_id,analytic_r,estimated_r,ci_low,ci_high,outbreak_prob,coverage"
    );
    assert_eq!(rows.len(), 1);
    let analytic: f64 = rows[0][1].parse().unwrap();
    let estimated: f64 = rows[0][2].parse().unwrap();
    assert!((analytic - 3.0).abs() < 1e-9);
    assert!((estimated - 3.0).abs() < 0.5, "estimated {estimated}");

    // simulating a stored graph under a different weight model is refused
    let (code, _, err) = netepi(&[
        "simulate",
        "--graph",
        bin.to_str().unwrap(),
        "--weight",
        "beta(2,2)",
        "--runs",
        "300",
    ]);
    assert_eq!(code, 3);
    assert!(err.contains("does not match"), "{err}");
    std::fs::remove_file(&bin).ok();
    std::fs::remove_file(&edges).ok();
}

#[test]
fn validate_flags_a_deliberate_mismatch() {
    // n large enough that the subcritical outbreak row cannot trip on
    // small-cluster noise; only the rows using the assumed rate fail
    let out_csv = tmp("validate-mismatch.csv");
    let (code, _, _) = netepi(&[
        "validate",
        "--n",
        "20000",
        "--runs",
        "250",
        "--seed",
        "3",
        "--assume-gamma",
        "0.9",
        "--out",
        out_csv.to_str().unwrap(),
    ]);
    assert_eq!(code, 4, "a wrong transmission assumption must fail");
    let text = std::fs::read_to_string(&out_csv).unwrap();
    std::fs::remove_file(&out_csv).ok();
    let (_, header, rows) = parse_csv(&text);
    assert_eq!(
        header,
        "config_id,analytic_r,estimated_r,ci_low,ci_high,analytic_coverage,realized_coverage,outbreak_prob,check,pass"
    );
    let failed: Vec<&str> = rows
        .iter()
        .filter(|r| r[9] == "false")
        .map(|r| r[0].as_str())
        .collect();
    // exactly the rows whose analytic R leans on the assumed rate
    assert_eq!(failed, vec!["no_vax", "uniform_v0.3", "acq_b1"]);
}

#[test]
fn validate_passes_when_nothing_can_spread() {
    // all weights zero: both the estimator and the analytics must land
    // exactly on R = 0
    let (code, out, _) = netepi(&[
        "validate",
        "--n",
        "20000",
        "--runs",
        "250",
        "--seed",
        "8",
        "--weight",
        "twopoint(a=0,b=0.5,pa=1)",
    ]);
    assert_eq!(code, 0, "{out}");
    let (_, _, rows) = parse_csv(&out);
    assert!(rows.len() >= 4);
    for r in &rows {
        assert_eq!(r[9], "true", "row {} failed", r[0]);
        let est: f64 = r[2].parse().unwrap();
        assert_eq!(est, 0.0);
        let outbreak: f64 = r[7].parse().unwrap();
        assert_eq!(outbreak, 0.0);
    }
}

#[test]
fn sampling_cost_curves_order_the_two_point_strategy() {
    let (code, out, _) = netepi(&[
        "sweep",
        "--kind",
        "sampled",
        "--degree",
        "powerlaw(3.5,mean=14)",
        "--weight",
        "twopoint(a=0.1,b=1,pa=0.5)",
        "--grid",
        "0.2,0.5,0.8",
        "--n",
        "20000",
        "--seed",
        "2",
    ]);
    assert_eq!(code, 0);
    let (_, header, rows) = parse_csv(&out);
    assert_eq!(header, "strategy,parameter,sampled_fraction,coverage");
    let take = |fam: &str| -> Vec<(f64, f64)> {
        rows.iter()
            .filter(|r| r[0] == fam)
            .map(|r| (r[3].parse().unwrap(), r[2].parse().unwrap()))
            .collect()
    };
    let acq = take("acq");
    let tp = take("twopoint");
    assert_eq!(acq.len(), 3);
    assert_eq!(tp.len(), 3);
    for w in acq.windows(2) {
        assert!(w[1].0 > w[0].0 && w[1].1 > w[0].1, "acq not monotone");
    }
    for w in tp.windows(2) {
        assert!(w[1].0 > w[0].0 && w[1].1 > w[0].1, "twopoint not monotone");
    }
    // at matched coverage the two-point strategy samples far fewer
    // vertices; compare against the acq curve by linear interpolation
    for &(cov, sampled) in &tp {
        if cov < acq[0].0 || cov > acq[2].0 {
            continue;
        }
        let seg = if cov <= acq[1].0 { (acq[0], acq[1]) } else { (acq[1], acq[2]) };
        let t = (cov - seg.0 .0) / (seg.1 .0 - seg.0 .0);
        let acq_sampled = seg.0 .1 + t * (seg.1 .1 - seg.0 .1);
        assert!(
            sampled < acq_sampled,
            "two-point sampled {sampled} not below acq {acq_sampled} at coverage {cov}"
        );
    }
}

#[test]
fn output_bytes_are_reproducible() {
    let args = [
        "coverage",
        "--degree",
        "poisson(6)",
        "--weight",
        "uniform",
        "--seed",
        "11",
    ];
    let (c1, out1, _) = netepi(&args);
    let (c2, out2, _) = netepi(&args);
    assert_eq!(c1, 0);
    assert_eq!(c2, 0);
    assert_eq!(out1, out2);
    // the thread flag controls execution, never the output
    let mut with_threads = vec!["--threads", "8"];
    with_threads.extend_from_slice(&args);
    let (c3, out3, _) = netepi(&with_threads);
    assert_eq!(c3, 0);
    assert_eq!(out1, out3);
}
