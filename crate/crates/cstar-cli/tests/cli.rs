use std::path::PathBuf;
use std::process::{Command, Output};

use cstar_cli::report::{BmyWithQuote, ResolveReport};
use cstar_core::eliminator::RegistryReport;
use cstar_core::identities::IdentityReport;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn cstar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cstar"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn resolve_hyperbola() {
    let input = data("hyperbola.json");
    let o = cstar(&["resolve", "--format", "json", "--input", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: ResolveReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.e_squared, 4);
    assert_eq!(r.e_dot_d, 2);
    assert_eq!(r.h_phi, 0);
    assert_eq!(r.gamma_prime, -4);
    assert!(r.relations.iter().all(|x| x.holds && !x.quote.is_empty()));
    let text = cstar(&["resolve", "--input", input.to_str().unwrap()]);
    assert!(stdout(&text).contains("E′²             4"));
}

#[test]
fn reports_are_byte_identical() {
    let input = data("hyperbola.json");
    for args in [
        vec!["resolve", "--input", input.to_str().unwrap()],
        vec!["--format", "json", "verify", "--filter", "4.14"],
        vec!["check-identities", "--seed", "99"],
    ] {
        let a = cstar(&args);
        let b = cstar(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn verify_filter_runs_and_roundtrips() {
    let o = cstar(&["verify", "--format", "json", "--filter", "3.4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: RegistryReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r.all_pass);
    assert_eq!(r.outcomes.len(), 10);
    assert!(r.outcomes.iter().all(|o| o.name.starts_with("3.4") && !o.quote.is_empty()));
}

#[test]
fn verify_no_match_is_usage_error() {
    let o = cstar(&["verify", "--filter", "no-such"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no scenarios matched"));
}

#[test]
fn budget_exhaustion_names_the_scenario() {
    let f = data("budget.json");
    let o = cstar(&["verify", "--input", f.to_str().unwrap(), "--budget", "1000"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("tiny-budget"), "{}", stderr(&o));
    let ok = cstar(&["verify", "--input", f.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
}

#[test]
fn malformed_json_reports_location() {
    let dir = std::env::temp_dir().join(format!("cstar-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\"branches\": [\n  {\"pairs\": [[1,1]]},\n  oops\n]}").unwrap();
    for cmd in ["resolve", "bmy", "graph", "verify"] {
        let o = cstar(&[cmd, "--input", bad.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{cmd}");
        assert!(stderr(&o).contains("line 3 column"), "{cmd}: {}", stderr(&o));
    }
}

#[test]
fn invalid_branch_data_is_usage_error() {
    let dir = std::env::temp_dir().join(format!("cstar-cli-hn-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let f = dir.join("gcd.json");
    std::fs::write(&f, r#"{"branches":[{"pairs":[[4,2],[3,1]]},{"pairs":[[1,1]]}],"samePoint":false}"#)
        .unwrap();
    let o = cstar(&["resolve", "--input", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("gcd"), "{}", stderr(&o));
}

#[test]
fn bmy_contradiction_exits_one() {
    let f = data("bmy_2_4_3.json");
    let o = cstar(&["bmy", "--format", "json", "--input", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let r: BmyWithQuote = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.report.group_orders, ["2", "5", "27", "9"]);
    assert_eq!(r.report.sum_inverse_orders, "229/270");
    assert!(!r.report.holds);
    assert!(r.quote.contains("|G_i|"));
}

#[test]
fn bmy_trivial_instance_holds() {
    let dir = std::env::temp_dir().join(format!("cstar-cli-bmy-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let f = dir.join("zero.json");
    std::fs::write(&f, r#"{"chiOpen":0,"components":[],"pSquared":0}"#).unwrap();
    let o = cstar(&["bmy", "--input", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn graph_dumps_dot() {
    let f = data("hyperbola.json");
    let o = cstar(&["graph", "--input", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("graph divisor {"));
    assert_eq!(s.matches("v0 -- v1;").count(), 2);
}

#[test]
fn check_identities_passes_and_roundtrips() {
    let o = cstar(&["check-identities", "--format", "json", "--seed", "5", "--max-vertices", "12"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let r: IdentityReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.seed, 5);
    assert!(r.all_pass);
    assert_eq!(r.checks.len(), 4);
}

#[test]
fn missing_subcommand_is_usage_error() {
    assert_eq!(cstar(&[]).status.code(), Some(2));
    assert_eq!(cstar(&["verify", "--bounds-scale", "0"]).status.code(), Some(2));
}
