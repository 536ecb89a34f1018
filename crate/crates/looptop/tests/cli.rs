use std::process::{Command, Output};

use looptop::report::{HilbertJson, LieBasisJson, MooreOutput, ReportJson, VerifyJson};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

fn looptop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_looptop")).args(args).env_remove("LOOPTOP_MAX_CELLS").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_of(args: &[&str]) -> (String, Value) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let o = looptop(&full);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let v: Value = serde_json::from_str(&text).unwrap();
    (text, v)
}

/// Emitted JSON parses into the typed schema and re-emits byte for byte,
/// and the same holds through an untyped value.
fn assert_round_trip<T: Serialize + DeserializeOwned>(text: &str) {
    let typed: T = serde_json::from_str(text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&typed).unwrap() + "\n", text);
    let untyped: Value = serde_json::from_str(text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&untyped).unwrap() + "\n", text);
}

fn summands(v: &Value) -> Vec<(u64, u64)> {
    v["summands"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| (s["sphere_dim"].as_u64().unwrap(), s["multiplicity"].as_u64().unwrap()))
        .collect()
}

#[test]
fn manifold_json_counts_and_schema() {
    let (text, v) = json_of(&["manifold", "--n", "2", "--betti", "3", "--max-dim", "4"]);
    assert_eq!(summands(&v), [(2, 3), (3, 2), (4, 5)]);
    assert_eq!(v["classification"], "hyperbolic");
    assert_eq!(v["growth_rate"]["surd"], serde_json::json!([3, 1, 5]));
    assert_eq!(v["growth_rate"]["decimal"], "2.618033");
    assert_eq!(v["inverted_primes"], serde_json::json!([]));
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(
        keys,
        [
            "space",
            "max_dimension",
            "inverted_primes",
            "summands",
            "classification",
            "growth_rate",
            "loop_decomposition",
            "moore",
            "notes"
        ]
    );
    assert_round_trip::<ReportJson>(&text);
}

#[test]
fn every_json_output_round_trips() {
    let reports: [&[&str]; 6] = [
        &["manifold", "--n", "3", "--betti", "4", "--max-dim", "9"],
        &["manifold", "--n", "4", "--betti", "2", "--matrix", "1,0;0,-1"],
        &["connected-sum", "--factors", "2x3,2x3", "--signs", "+,-"],
        &["cw", "--n", "2", "--matrix", "0,7;7,0", "--max-dim", "4"],
        &["cw", "--n", "2", "--matrix", "2,1,0;1,2,1;0,1,2"],
        &["betti-one", "--n", "8", "--m", "5"],
    ];
    for args in reports {
        assert_round_trip::<ReportJson>(&json_of(args).0);
    }
    assert_round_trip::<MooreOutput>(&json_of(&["moore", "--space", "manifold:2:2"]).0);
    assert_round_trip::<VerifyJson>(&json_of(&["verify", "cobar", "--space", "cw:2:\"0,5;5,0\"", "--max-degree", "4"]).0);
    assert_round_trip::<HilbertJson>(&json_of(&["hilbert", "--space", "betti1:4:0"]).0);
    assert_round_trip::<LieBasisJson>(&json_of(&["lie-basis", "--space", "csum:2x3,2x3", "--max-degree", "3"]).0);
}

#[test]
fn large_primes_survive_json() {
    let (text, v) = json_of(&["cw", "--n", "2", "--matrix", "0,998244359987710471;998244359987710471,0", "--max-dim", "3"]);
    assert_eq!(v["inverted_primes"].to_string(), "[998244353,1000000007]");
    assert_round_trip::<ReportJson>(&text);
}

#[test]
fn verify_cobar_torsion_free_manifold() {
    let o = looptop(&["verify", "cobar", "--space", "manifold:2:2", "--max-degree", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("result                 passed"), "{out}");
    assert!(out.contains("torsion-free expected"));
    let (_, v) = json_of(&["verify", "cobar", "--space", "manifold:2:2", "--max-degree", "8"]);
    let ranks: Vec<u64> = v["rows"].as_array().unwrap().iter().map(|r| r["rank"].as_u64().unwrap()).collect();
    assert_eq!(ranks, (1..=9).collect::<Vec<_>>());
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r["torsion"].as_array().unwrap().is_empty()));
}

#[test]
fn verify_cobar_reports_bad_prime_torsion() {
    let (_, v) = json_of(&["verify", "cobar", "--space", "cw:2:\"0,9;9,0\"", "--max-degree", "3"]);
    assert_eq!(v["passed"], true);
    assert_eq!(v["allowed_torsion_primes"], serde_json::json!([3]));
    assert_eq!(v["rows"][2]["torsion"], serde_json::json!([9]));
    let (_, v) = json_of(&["verify", "cobar", "--space", "cw:2:\"9,0;0,1\"", "--max-degree", "3"]);
    assert_eq!(v["rows"][2]["torsion"], serde_json::json!([]));
}

#[test]
fn betti_one_flags_missing_integral_splitting() {
    let o = looptop(&["betti-one", "--n", "4", "--m", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("π₁₀ = 0"), "{out}");
    assert!(out.contains("inverted primes     3"), "{out}");
    let (_, v) = json_of(&["betti-one", "--n", "4", "--m", "3"]);
    assert_eq!(v["inverted_primes"], serde_json::json!([]));
    assert_eq!(v["loop_decomposition"], "ΩV ≃ S³ × ΩS¹¹");
}

#[test]
fn orientation_signs_do_not_change_reports() {
    let mut bodies = Vec::new();
    for signs in ["+,+", "+,-", "-,+", "-,-"] {
        let (_, mut v) = json_of(&["connected-sum", "--factors", "2x3,2x3", "--signs", signs]);
        v.as_object_mut().unwrap().remove("space");
        bodies.push(v);
    }
    assert!(bodies.windows(2).all(|w| w[0] == w[1]));
    assert_eq!(summands(&bodies[0])[..3], [(2, 2), (3, 3), (4, 5)]);
}

#[test]
fn hilbert_pipelines_agree() {
    let (_, v) = json_of(&["hilbert", "--space", "manifold:2:3", "--max-degree", "6"]);
    assert_eq!(v["agree"], true);
    let series: Vec<u64> = v["rows"].as_array().unwrap().iter().map(|r| r["series"].as_u64().unwrap()).collect();
    assert_eq!(series, [1, 3, 8, 21, 55, 144, 377]);
    let (_, v) = json_of(&["hilbert", "--space", "betti1:4:0", "--max-degree", "14"]);
    assert_eq!(v["source"], "cobar-prediction");
    let support: Vec<u64> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["series"].as_u64().unwrap() > 0)
        .map(|r| r["degree"].as_u64().unwrap())
        .collect();
    assert_eq!(support, [0, 3, 10, 13]);
}

#[test]
fn lie_basis_lists_lyndon_brackets() {
    let (_, v) = json_of(&["lie-basis", "--space", "manifold:2:3", "--max-degree", "3"]);
    let deg3: Vec<&str> = v["degrees"][2]["elements"].as_array().unwrap().iter().map(|e| e["lyndon"].as_str().unwrap()).collect();
    assert_eq!(deg3, ["002", "021", "022", "112", "122"]);
}

#[test]
fn usage_errors_exit_two() {
    let cases: [&[&str]; 7] = [
        &["manifold", "--n", "3", "--betti", "3"],
        &["manifold", "--n", "2", "--betti", "2", "--matrix", "0,2;2,0"],
        &["cw", "--n", "2", "--matrix", "0,1;1"],
        &["verify", "cobar", "--space", "torus:2"],
        &["verify", "cobar", "--space", "manifold:2:2", "--max-degree", "17"],
        &["lie-basis", "--space", "manifold:2:6", "--max-degree", "12"],
        &["no-such-command"],
    ];
    for args in cases {
        let o = looptop(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn cell_cap_comes_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_looptop"))
        .args(["verify", "cobar", "--space", "manifold:2:3"])
        .env("LOOPTOP_MAX_CELLS", "100")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("limit 100"));
}

#[test]
fn defaults_finish_quickly() {
    let start = std::time::Instant::now();
    for args in [
        &["manifold", "--n", "2", "--betti", "6"][..],
        &["connected-sum", "--factors", "2x5,3x4,2x5"],
        &["verify", "cobar", "--space", "manifold:2:3"],
        &["hilbert", "--space", "manifold:2:6"],
        &["lie-basis", "--space", "manifold:2:3"],
    ] {
        assert_eq!(looptop(args).status.code(), Some(0), "{args:?}");
    }
    assert!(start.elapsed().as_secs() < 10);
}
