use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;

use boostfw::pursuit::RoundKind;
use boostfw::solvers::Algorithm;
use boostfw::solvers::{RoundRecord, StepType, TraceRow};
use boostfw_cli::config::{ExperimentConfig, RuleName, SolverSpec};
use boostfw_cli::csvio::{read_rounds, read_trace, write_rounds, write_trace};
use boostfw_cli::experiment::{
    run_experiment, write_report, ComparisonReport, Execution, SolverResult, REPORT_FILE,
    THETAS_FILE,
};
use boostfw_cli::{is_validation, verify, ValidationError};
use tempfile::TempDir;

fn config(text: &str, out: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::parse(text).unwrap();
    cfg.experiment.out = Some(out.to_path_buf());
    cfg
}

const LIFTED: &str = r#"
[experiment]
name = "lifted"
seed = 11

[problem]
family = "sparse_recovery"
m = 20
n = 50
lifted = true

[[solver]]
algorithm = "fw"
step_rule = "ls"
budget_iters = 200

[[solver]]
algorithm = "boostfw"
step_rule = "ls"
budget_iters = 200
"#;

const MIXED: &str = r#"
[experiment]
name = "mixed"
seed = 3

[problem]
family = "path_quadratic"
layers = 4
width = 3

[[solver]]
algorithm = "fw"
step_rule = "short"
budget_iters = 60

[[solver]]
algorithm = "boostfw"
step_rule = "golden"
budget_iters = 60

[[solver]]
algorithm = "afw"
step_rule = "ls"
budget_iters = 60

[[solver]]
algorithm = "dicg"
step_rule = "agnostic"
budget_iters = 60

[[solver]]
algorithm = "boostdicg"
step_rule = "ls"
delta = 1e-15
budget_iters = 60
"#;

#[test]
fn malformed_configs_are_validation_errors() {
    let cases = [
        ("missing experiment", "[problem]\nfamily = \"lower_bound\"\n"),
        (
            "unknown family",
            "[experiment]\nname = \"x\"\n[problem]\nfamily = \"sudoku\"\n[[solver]]\nalgorithm = \"fw\"\nstep_rule = \"ls\"\n",
        ),
        (
            "unknown field",
            "[experiment]\nname = \"x\"\ncolour = 1\n[problem]\nfamily = \"lower_bound\"\n[[solver]]\nalgorithm = \"fw\"\nstep_rule = \"ls\"\n",
        ),
        (
            "unknown algorithm",
            "[experiment]\nname = \"x\"\n[problem]\nfamily = \"lower_bound\"\n[[solver]]\nalgorithm = \"pgd\"\nstep_rule = \"ls\"\n",
        ),
        (
            "empty solver list",
            "[experiment]\nname = \"x\"\n[problem]\nfamily = \"lower_bound\"\n",
        ),
        (
            "duplicate labels",
            "[experiment]\nname = \"x\"\n[problem]\nfamily = \"lower_bound\"\n[[solver]]\nalgorithm = \"fw\"\nstep_rule = \"ls\"\n[[solver]]\nalgorithm = \"fw\"\nstep_rule = \"ls\"\n",
        ),
        (
            "bad radius",
            "[experiment]\nname = \"x\"\n[problem]\nfamily = \"simplex_quadratic\"\n[region]\ntau = -1.0\n[[solver]]\nalgorithm = \"fw\"\nstep_rule = \"ls\"\n",
        ),
    ];
    for (what, text) in cases {
        let err: ValidationError = ExperimentConfig::parse(text).expect_err(what);
        assert!(!err.0.is_empty(), "{what}");
    }
}

#[test]
fn empty_solver_list_is_rejected() {
    let err = ExperimentConfig::parse(
        "[experiment]\nname = \"x\"\n[problem]\nfamily = \"lower_bound\"\nn = 10\n",
    )
    .unwrap_err();
    assert!(err.0.contains("no solvers"));
}

#[test]
fn incompatible_solver_fails_before_any_run() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("run");
    let cfg = config(
        r#"
[experiment]
name = "nuclear"
[problem]
family = "completion"
rows = 6
cols = 7
[[solver]]
algorithm = "fw"
step_rule = "ls"
[[solver]]
algorithm = "dicg"
step_rule = "ls"
"#,
        &out,
    );
    let err = run_experiment(&cfg, Execution::Sequential).err().unwrap();
    assert!(is_validation(&err), "{err:#}");
    assert!(!out.exists(), "no output may be written");
}

#[test]
fn lifted_comparison_shares_the_start() {
    let dir = TempDir::new().unwrap();
    let cfg = config(LIFTED, dir.path());
    let report = run_experiment(&cfg, Execution::Parallel).unwrap();
    assert_eq!(report.failures().count(), 0);
    let fw = read_trace(&dir.path().join("fw-ls.csv")).unwrap();
    let boost = read_trace(&dir.path().join("boostfw-ls.csv")).unwrap();
    assert_eq!(fw.len(), 201);
    assert_eq!(fw[0].f_value.to_bits(), boost[0].f_value.to_bits());
    assert_eq!(fw[0].duality_gap.to_bits(), boost[0].duality_gap.to_bits());
    assert_eq!(fw[0].step_type, StepType::Start);
    assert!(dir.path().join("boostfw-ls.rounds.csv").exists());
    assert!(!dir.path().join("fw-ls.rounds.csv").exists());
    assert!(dir.path().join(REPORT_FILE).exists());
    assert!(dir.path().join(THETAS_FILE).exists());
}

#[test]
fn csv_round_trip_is_bit_exact() {
    let dir = TempDir::new().unwrap();
    let cfg = config(MIXED, dir.path());
    let report = run_experiment(&cfg, Execution::Sequential).unwrap();
    for r in &report.results {
        let trace = r.outcome.as_ref().unwrap();
        let path = dir.path().join(format!("{}.csv", r.label));
        let back = read_trace(&path).unwrap();
        assert_eq!(back.len(), trace.rows.len());
        for (a, b) in trace.rows.iter().zip(&back) {
            assert_eq!(a.iter, b.iter);
            assert_eq!(a.oracle_calls, b.oracle_calls);
            assert_eq!(a.k_t, b.k_t);
            assert_eq!(a.step_type, b.step_type);
            for (x, y) in [
                (a.elapsed_s, b.elapsed_s),
                (a.f_value, b.f_value),
                (a.duality_gap, b.duality_gap),
                (a.gamma, b.gamma),
                (a.eta, b.eta),
            ] {
                assert_eq!(x.to_bits(), y.to_bits(), "{}: {x} vs {y}", r.label);
            }
        }
        if r.spec.algorithm.is_boosted() {
            let rounds = read_rounds(&dir.path().join(format!("{}.rounds.csv", r.label))).unwrap();
            assert_eq!(rounds, trace.rounds);
        }
    }
}

#[test]
fn awkward_floats_survive_the_round_trip() {
    let dir = TempDir::new().unwrap();
    let values = [
        0.1,
        -0.0,
        f64::MIN_POSITIVE,
        5e-324,
        f64::MAX,
        1.0 / 3.0,
        std::f64::consts::PI * 1e200,
    ];
    let rows: Vec<TraceRow> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| TraceRow {
            iter: i,
            oracle_calls: i + 1,
            elapsed_s: v.abs(),
            f_value: v,
            duality_gap: v.abs(),
            gamma: v,
            k_t: i,
            step_type: StepType::AdjustedFw,
            eta: -v,
        })
        .collect();
    let path = dir.path().join("t.csv");
    write_trace(&rows, &path).unwrap();
    let back = read_trace(&path).unwrap();
    for (a, b) in rows.iter().zip(&back) {
        assert_eq!(a.f_value.to_bits(), b.f_value.to_bits());
        assert_eq!(a.eta.to_bits(), b.eta.to_bits());
    }
    let rounds = vec![RoundRecord {
        iter: 3,
        round: 1,
        lambda: 1.0 / 7.0,
        kind: RoundKind::Backward,
        alignment: 0.3141592653589793e-1,
    }];
    let path = dir.path().join("r.csv");
    write_rounds(&rounds, &path).unwrap();
    assert_eq!(read_rounds(&path).unwrap(), rounds);
}

#[test]
fn one_row_trace_is_two_lines_and_empty_trace_is_refused() {
    let dir = TempDir::new().unwrap();
    let row = TraceRow {
        iter: 0,
        oracle_calls: 1,
        elapsed_s: 0.0,
        f_value: 1.5,
        duality_gap: 0.25,
        gamma: 0.0,
        k_t: 0,
        step_type: StepType::Start,
        eta: 0.0,
    };
    let path = dir.path().join("one.csv");
    write_trace(&[row], &path).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.ends_with('\n') && !text.contains('\r'));
    assert!(text
        .starts_with("iter,oracle_calls,elapsed_s,f_value,duality_gap,gamma,K_t,step_type,eta\n"));
    assert!(write_trace(&[], &dir.path().join("none.csv")).is_err());
}

#[test]
fn write_errors_name_the_path() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("missing").join("t.csv");
    let err = write_trace(&[], &path).unwrap_err();
    assert!(format!("{err:#}").contains("t.csv"));
    let err = read_trace(&path).unwrap_err();
    assert!(format!("{err:#}").contains("missing"));
}

#[test]
fn duality_gaps_are_nonnegative_in_every_file() {
    for text in [LIFTED, MIXED] {
        let dir = TempDir::new().unwrap();
        let cfg = config(text, dir.path());
        run_experiment(&cfg, Execution::Parallel).unwrap();
        let mut files = 0;
        for entry in fs::read_dir(dir.path()).unwrap() {
            let path = entry.unwrap().path();
            let name = path.file_name().unwrap().to_str().unwrap().to_string();
            if name.ends_with(".rounds.csv") || name == REPORT_FILE || name == THETAS_FILE {
                continue;
            }
            for row in read_trace(&path).unwrap() {
                assert!(
                    row.duality_gap >= 0.0,
                    "{name}: gap {} at {}",
                    row.duality_gap,
                    row.iter
                );
            }
            files += 1;
        }
        assert_eq!(files, cfg.solvers.len());
    }
}

/// File contents with the `elapsed_s` column blanked.
fn without_elapsed(path: &Path) -> String {
    let mut r = csv::Reader::from_path(path).unwrap();
    let headers = r.headers().unwrap().clone();
    let skip = headers.iter().position(|h| h == "elapsed_s");
    let mut out = headers.iter().collect::<Vec<_>>().join(",");
    for rec in r.records() {
        let rec = rec.unwrap();
        let fields: Vec<&str> = rec
            .iter()
            .enumerate()
            .map(|(i, f)| if Some(i) == skip { "" } else { f })
            .collect();
        out.push('\n');
        out.push_str(&fields.join(","));
    }
    out
}

#[test]
fn runs_are_deterministic_up_to_wall_time() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    run_experiment(&config(MIXED, a.path()), Execution::Sequential).unwrap();
    run_experiment(&config(MIXED, b.path()), Execution::Parallel).unwrap();
    let mut names: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 5 + 2 + 2);
    for name in names {
        let (pa, pb) = (a.path().join(&name), b.path().join(&name));
        assert_eq!(without_elapsed(&pa), without_elapsed(&pb), "{name:?}");
    }
}

#[test]
fn theta_table_matches_an_independent_recomputation() {
    let dir = TempDir::new().unwrap();
    let report = run_experiment(&config(LIFTED, dir.path()), Execution::Sequential).unwrap();

    // Group raw alignments by solver iteration straight from the CSV text.
    let mut seqs: BTreeMap<usize, Vec<(usize, f64)>> = BTreeMap::new();
    let mut r = csv::Reader::from_path(dir.path().join("boostfw-ls.rounds.csv")).unwrap();
    for rec in r.records() {
        let rec = rec.unwrap();
        let iter: usize = rec[0].parse().unwrap();
        let round: usize = rec[1].parse().unwrap();
        let a: f64 = rec[4].parse().unwrap();
        seqs.entry(iter).or_default().push((round, a));
    }
    let mut by_k: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for seq in seqs.values_mut() {
        seq.sort_by_key(|(round, _)| *round);
        for w in seq.windows(2) {
            let (prev, next) = (w[0].1, w[1].1);
            if prev > 0.0 {
                by_k.entry(w[1].0 + 1)
                    .or_default()
                    .push((next - prev) / prev);
            }
        }
    }

    let mut r = csv::Reader::from_path(dir.path().join(THETAS_FILE)).unwrap();
    let rows: Vec<_> = r.records().map(|rec| rec.unwrap()).collect();
    assert_eq!(rows.len(), by_k.len());
    assert!(!rows.is_empty());
    for rec in &rows {
        assert_eq!(&rec[0], "boostfw-ls");
        let k: usize = rec[1].parse().unwrap();
        let samples = &by_k[&k];
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let std = (samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n).sqrt();
        let got_mean: f64 = rec[2].parse().unwrap();
        let got_std: f64 = rec[3].parse().unwrap();
        assert!(
            (got_mean - mean).abs() <= 1e-12 * mean.abs().max(1.0),
            "k = {k}"
        );
        assert!((got_std - std).abs() <= 1e-12 * std.max(1.0), "k = {k}");
        assert_eq!(rec[4].parse::<usize>().unwrap(), samples.len());
    }
    assert_eq!(report.thetas.len(), 1);

    let recomputed = boostfw_cli::thetas::thetas_from_dir(dir.path()).unwrap();
    assert_eq!(recomputed, report.thetas);
}

#[test]
fn failed_solvers_are_marked_in_the_report() {
    let dir = TempDir::new().unwrap();
    let report = ComparisonReport {
        name: "x".into(),
        description: String::new(),
        seed: 0,
        out_dir: dir.path().to_path_buf(),
        results: vec![SolverResult {
            label: "boostfw-ls".into(),
            spec: SolverSpec::new(Algorithm::BoostFw, RuleName::Ls),
            lipschitz: None,
            outcome: Err("oracle failed".into()),
        }],
        thetas: Vec::new(),
    };
    let path = dir.path().join(REPORT_FILE);
    write_report(&report, &path).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("boostfw-ls,boostfw,ls,failed,"));
    assert!(row.ends_with("oracle failed"));
}

#[test]
fn named_suites_pass_and_unknown_names_fail() {
    let outcomes =
        verify::verify_suite(&["lower_bound".to_string(), "fact2_roundtrip".to_string()]).unwrap();
    assert_eq!(outcomes.len(), 2);
    for o in &outcomes {
        assert!(o.passed, "{}: {}", o.name, o.detail);
    }
    assert!(verify::verify_suite(&["no_such_suite".to_string()]).is_err());
    assert!(verify::verify_suite(&[]).is_err());
    assert_eq!(
        verify::resolve(&["all".to_string()]).unwrap(),
        verify::SUITES.to_vec()
    );
}

#[test]
fn every_suite_passes() {
    for o in verify::verify_suite(&["all".to_string()]).unwrap() {
        assert!(o.passed, "{}: {}", o.name, o.detail);
    }
}

fn boostfw(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_boostfw"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn binary_exit_codes() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("lifted.toml");
    fs::write(&cfg, LIFTED).unwrap();
    let cfg = cfg.to_str().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();

    let (code, stdout, _) = boostfw(&["run", cfg, "--out", out, "--budget-iters", "7"]);
    assert_eq!(code, 0, "{stdout}");
    assert_eq!(
        read_trace(&Path::new(out).join("fw-ls.csv")).unwrap().len(),
        8
    );

    let (code, _, _) = boostfw(&[
        "compare",
        cfg,
        "--out",
        out,
        "--step-rule",
        "short",
        "--seed",
        "5",
    ]);
    assert_eq!(code, 0);
    assert!(Path::new(out).join("fw-ls.csv").exists());

    let (code, stdout, _) = boostfw(&["thetas", out]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("label,k,mean,std,count,excluded\n"));

    let (code, stdout, _) = boostfw(&["verify", "lower_bound"]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.starts_with("PASS lower_bound"));

    // Validation failures.
    for args in [
        vec!["verify", "bogus"],
        vec!["run", "/nonexistent/config.toml"],
        vec!["run", cfg, "--step-rule", "newton"],
        vec!["run", cfg, "--budget-iters", "0", "--out", out],
        vec!["thetas", dir.path().to_str().unwrap()],
        vec!["frobnicate"],
    ] {
        let (code, _, stderr) = boostfw(&args);
        assert_eq!(code, 1, "{args:?}: {stderr}");
    }
}

#[test]
fn shipped_configs_load_and_build() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{path:?}: {e:#}"));
            boostfw_cli::instance::build(&cfg.problem, &cfg.region, cfg.experiment.seed)
                .unwrap_or_else(|e| panic!("{path:?}: {e:#}"));
            count += 1;
        }
    }
    assert!(count >= 5);
}
