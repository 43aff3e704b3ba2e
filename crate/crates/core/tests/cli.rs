//! Golden runs of the binary: exit codes, determinism, file contracts.

use std::path::Path;
use std::process::{Command, Output};
use std::str::FromStr;

use sparse_ot::measures::Rational;
use sparse_ot::plan::TransportPlan;
use sparse_ot::solver::CostSpec;
use sparse_ot::Instance;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sparse-ot"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn assert_exit(output: &Output, expected: i32) {
    assert_eq!(
        output.status.code(),
        Some(expected),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

fn path_str(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (file, seed) in [(&a, "7"), (&b, "7")] {
        let out = run(&[
            "gen", "--m", "20", "--n", "30", "--dim", "2", "--seed", seed,
            "--output", path_str(file),
        ]);
        assert_exit(&out, 0);
    }
    let bytes_a = std::fs::read(&a).unwrap();
    assert_eq!(bytes_a, std::fs::read(&b).unwrap());

    let other = run(&["gen", "--m", "20", "--n", "30", "--seed", "8"]);
    assert_exit(&other, 0);
    assert_ne!(bytes_a, other.stdout);
}

#[test]
fn gen_uniform_weights_are_reciprocals() {
    let out = run(&["gen", "--m", "5", "--n", "5", "--seed", "0"]);
    assert_exit(&out, 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let instance = Instance::from_json(&text).unwrap();
    let fifth = Rational::from_str("1/5").unwrap();
    assert!(instance.mu.weights().iter().all(|w| *w == fifth));
    assert!(text.contains("\"1/5\""));
}

#[test]
fn gen_rational_weights_respect_the_cap() {
    for seed in ["0", "1", "2"] {
        let out = run(&[
            "gen", "--m", "4", "--n", "3", "--weights", "rational",
            "--max-denominator", "6", "--seed", seed,
        ]);
        assert_exit(&out, 0);
        let instance = Instance::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
        for measure in [&instance.mu, &instance.nu] {
            assert!(measure.validate().is_ok());
            let six = num::BigUint::from(6u32);
            for w in measure.weights() {
                assert!(w.denom_unsigned() <= six, "weight {w}");
            }
        }
    }
}

#[test]
fn gen_rejects_impossible_cap() {
    let out = run(&[
        "gen", "--m", "9", "--n", "2", "--weights", "rational", "--max-denominator", "5",
    ]);
    assert_exit(&out, 2);
}

#[test]
fn solve_writes_plan_and_stats() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("instance.json");
    let plan = dir.path().join("plan.json");
    assert_exit(
        &run(&["gen", "--m", "20", "--n", "30", "--seed", "3", "--output", path_str(&instance)]),
        0,
    );
    let out = run(&[
        "solve", "--input", path_str(&instance), "--output", path_str(&plan),
    ]);
    assert_exit(&out, 0);
    let summary = String::from_utf8(out.stdout).unwrap();
    assert!(summary.contains("max_out="), "{summary}");
    assert!(summary.contains("<=3"), "{summary}");
    assert!(summary.contains("<=2"), "{summary}");

    let parsed: TransportPlan =
        serde_json::from_str(&std::fs::read_to_string(&plan).unwrap()).unwrap();
    assert_eq!((parsed.m, parsed.n), (20, 30));
}

#[test]
fn solve_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("instance.json");
    assert_exit(
        &run(&["gen", "--m", "6", "--n", "9", "--seed", "11", "--output", path_str(&instance)]),
        0,
    );
    let a = run(&["solve", "--input", path_str(&instance)]);
    let b = run(&["solve", "--input", path_str(&instance)]);
    assert_exit(&a, 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn solve_rejects_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_exit(&run(&["solve", "--input", path_str(&bad)]), 2);

    let missing = dir.path().join("nope.json");
    assert_exit(&run(&["solve", "--input", path_str(&missing)]), 2);

    let unbalanced = dir.path().join("unbalanced.json");
    std::fs::write(
        &unbalanced,
        r#"{ "mu": {"points": [[0.0],[1.0]], "weights": ["1/2","1/3"]}, "nu": {"points": [[0.0]]} }"#,
    )
    .unwrap();
    let out = run(&["solve", "--input", path_str(&unbalanced)]);
    assert_exit(&out, 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("5/6"));
}

#[test]
fn solve_reports_exact_lcm_when_over_budget() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("huge.json");
    std::fs::write(
        &instance,
        r#"{
            "mu": { "points": [[0.0],[1.0],[2.0],[3.0]],
                    "weights": ["1/97","1/89","1/101","844514/871933"] },
            "nu": { "points": [[0.0],[1.0]] },
            "cost": "euclidean"
        }"#,
    )
    .unwrap();
    let out = run(&["solve", "--input", path_str(&instance)]);
    assert_exit(&out, 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("1743866"));
}

#[test]
fn solve_path_override_agrees_with_auto() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("instance.json");
    assert_exit(
        &run(&["gen", "--m", "8", "--n", "12", "--seed", "2", "--output", path_str(&instance)]),
        0,
    );
    let auto = run(&["solve", "--input", path_str(&instance)]);
    let compressed = run(&["solve", "--input", path_str(&instance), "--path", "compressed"]);
    assert_exit(&auto, 0);
    assert_exit(&compressed, 0);
    let cost = |out: &Output| {
        let plan: TransportPlan =
            serde_json::from_slice(&out.stdout).expect("plan JSON on stdout");
        plan.cost
    };
    let (a, c) = (cost(&auto), cost(&compressed));
    assert!((a - c).abs() <= 1e-9 * a.abs().max(1.0));
}

#[test]
fn verify_passes_artifact_plan_and_rejects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("instance.json");
    let plan = dir.path().join("plan.json");
    assert_exit(
        &run(&["gen", "--m", "6", "--n", "4", "--seed", "9", "--output", path_str(&instance)]),
        0,
    );
    assert_exit(
        &run(&["solve", "--input", path_str(&instance), "--output", path_str(&plan)]),
        0,
    );
    let ok = run(&["verify", "--plan", path_str(&plan), "--instance", path_str(&instance)]);
    assert_exit(&ok, 0);
    assert!(String::from_utf8_lossy(&ok.stdout).contains("overall: PASS"));

    // Halve the first entry's mass; the report must name the damaged row.
    let mut doc: TransportPlan =
        serde_json::from_str(&std::fs::read_to_string(&plan).unwrap()).unwrap();
    let half = Rational::from_str("1/2").unwrap();
    let damaged_row = doc.entries[0].0;
    doc.entries[0].2 = &doc.entries[0].2 * &half;
    std::fs::write(&plan, serde_json::to_string(&doc).unwrap()).unwrap();

    let bad = run(&[
        "verify", "--plan", path_str(&plan), "--instance", path_str(&instance),
        "--format", "json",
    ]);
    assert_exit(&bad, 4);
    let report: serde_json::Value = serde_json::from_slice(&bad.stdout).unwrap();
    assert_eq!(report["passed"], serde_json::Value::Bool(false));
    let marginals = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "marginals")
        .unwrap();
    assert_eq!(marginals["passed"], serde_json::Value::Bool(false));
    assert!(
        marginals["detail"]
            .as_str()
            .unwrap()
            .contains(&format!("row {damaged_row}")),
        "{marginals}"
    );
}

#[test]
fn verify_rejects_product_coupling_on_degree_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let instance_path = dir.path().join("instance.json");
    assert_exit(
        &run(&["gen", "--m", "20", "--n", "30", "--seed", "4", "--output", path_str(&instance_path)]),
        0,
    );
    let instance = Instance::from_json(&std::fs::read_to_string(&instance_path).unwrap()).unwrap();
    let ground = CostSpec::Euclidean
        .ground_matrix(&instance.mu, &instance.nu)
        .unwrap();
    let mass = Rational::from_str("1/600").unwrap();
    let mut entries = Vec::new();
    let mut cost = 0.0;
    for i in 0..20 {
        for j in 0..30 {
            entries.push((i, j, mass.clone()));
            cost += mass.to_f64() * ground.get(i, j);
        }
    }
    let product = TransportPlan { m: 20, n: 30, entries, cost };
    let plan_path = dir.path().join("product.json");
    std::fs::write(&plan_path, serde_json::to_string(&product).unwrap()).unwrap();

    let out = run(&[
        "verify", "--plan", path_str(&plan_path), "--instance", path_str(&instance_path),
    ]);
    assert_exit(&out, 4);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("[PASS] marginals"), "{text}");
    assert!(text.contains("[FAIL] degree_bounds"), "{text}");
    assert!(text.contains("out-degree 30 > 3"), "{text}");
}

#[test]
fn verify_rejects_unparseable_plan() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("instance.json");
    assert_exit(
        &run(&["gen", "--m", "2", "--n", "2", "--output", path_str(&instance)]),
        0,
    );
    let plan = dir.path().join("plan.json");
    std::fs::write(&plan, "[]").unwrap();
    assert_exit(
        &run(&["verify", "--plan", path_str(&plan), "--instance", path_str(&instance)]),
        2,
    );
}

#[test]
fn figure_draws_one_segment_per_entry() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("instance.json");
    let plan = dir.path().join("plan.json");
    let svg_path = dir.path().join("figure.svg");
    // m = n uniform: the plan is a bijection with exactly n segments.
    assert_exit(
        &run(&["gen", "--m", "7", "--n", "7", "--seed", "5", "--output", path_str(&instance)]),
        0,
    );
    assert_exit(
        &run(&["solve", "--input", path_str(&instance), "--output", path_str(&plan)]),
        0,
    );
    assert_exit(
        &run(&[
            "figure", "--plan", path_str(&plan), "--instance", path_str(&instance),
            "--output", path_str(&svg_path),
        ]),
        0,
    );
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert_eq!(svg.matches("<line ").count(), 7);
    assert_eq!(svg.matches("<circle ").count(), 14);

    // Identical command, identical bytes.
    let again = dir.path().join("figure2.svg");
    assert_exit(
        &run(&[
            "figure", "--plan", path_str(&plan), "--instance", path_str(&instance),
            "--output", path_str(&again),
        ]),
        0,
    );
    assert_eq!(svg, std::fs::read_to_string(&again).unwrap());
}

#[test]
fn figure_rejects_non_planar_instances() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("instance.json");
    let plan = dir.path().join("plan.json");
    assert_exit(
        &run(&[
            "gen", "--m", "3", "--n", "3", "--dim", "3", "--seed", "1",
            "--output", path_str(&instance),
        ]),
        0,
    );
    assert_exit(
        &run(&["solve", "--input", path_str(&instance), "--output", path_str(&plan)]),
        0,
    );
    let out = run(&[
        "figure", "--plan", path_str(&plan), "--instance", path_str(&instance),
        "--output", path_str(&dir.path().join("nope.svg")),
    ]);
    assert_exit(&out, 2);
}

#[test]
fn oracle_matches_solve_and_enforces_its_budget() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("tiny.json");
    assert_exit(
        &run(&["gen", "--m", "2", "--n", "3", "--seed", "6", "--output", path_str(&instance)]),
        0,
    );
    let oracle = run(&["oracle", "--input", path_str(&instance)]);
    assert_exit(&oracle, 0);
    let solve = run(&["solve", "--input", path_str(&instance)]);
    assert_exit(&solve, 0);
    let oracle_plan: TransportPlan = serde_json::from_slice(&oracle.stdout).unwrap();
    let solve_plan: TransportPlan = serde_json::from_slice(&solve.stdout).unwrap();
    let tol = 1e-9 * oracle_plan.cost.abs().max(1.0);
    assert!((oracle_plan.cost - solve_plan.cost).abs() <= tol);

    // 4x5 expands to 20 atoms, over the 9-atom exhaustive budget.
    let big = dir.path().join("big.json");
    assert_exit(
        &run(&["gen", "--m", "4", "--n", "5", "--seed", "6", "--output", path_str(&big)]),
        0,
    );
    assert_exit(&run(&["oracle", "--input", path_str(&big)]), 3);
}

#[test]
fn bench_emits_csv_with_agreeing_costs() {
    let out = run(&["bench", "--sizes", "4,20x30,8", "--seed", "2"]);
    assert_exit(&out, 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "m,n,atoms,expanded_ms,compressed_ms,expanded_cost,compressed_cost"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1][0], "20");
    assert_eq!(rows[1][1], "30");
    assert_eq!(rows[1][2], "60");
    for row in &rows {
        let expanded: f64 = row[5].parse().unwrap();
        let compressed: f64 = row[6].parse().unwrap();
        assert!((expanded - compressed).abs() <= 1e-9 * expanded.abs().max(1.0));
    }
}

#[test]
fn bench_rejects_bad_sizes_and_oversized_sweeps() {
    assert_exit(&run(&["bench", "--sizes", "0"]), 2);
    assert_exit(&run(&["bench", "--sizes", "abc"]), 2);
    // 2047 and 2048 are coprime, so the sweep needs ~4M atoms.
    assert_exit(&run(&["bench", "--sizes", "2047x2048"]), 3);
}

#[test]
fn usage_errors_exit_2() {
    assert_exit(&run(&["solve"]), 2);
    assert_exit(&run(&["frobnicate"]), 2);
    assert_exit(&run(&["gen", "--m", "2", "--n", "2", "--weights", "bogus"]), 2);
}
