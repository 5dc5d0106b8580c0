use std::process::{Command, Output};

fn quadrics(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadrics")).args(args).env_remove("QS_WORKERS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn body(o: &Output) -> Vec<String> {
    stdout(o).lines().filter(|l| !l.starts_with('#')).map(str::to_string).collect()
}

const CONIC: &str = "3 7 1 0 0 1 0 -1";
const CONIC2: &str = "3 7 1 0 0 2 0 -1";

#[test]
fn classify_worked_example() {
    let o = quadrics(&["classify", "--p", "7", "--form", CONIC, "--point", "0,0,1", "--point", "3,4,5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(body(&o), ["[0:0:1] int int int", "[1:6:4] on on on"]);
    assert!(stdout(&o).starts_with("# quadrics classify p=7"));
}

#[test]
fn classify_all_points_census() {
    let o = quadrics(&["classify", "--form", CONIC, "--all", "--output", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = body(&o);
    assert_eq!(rows.len(), 1 + 57);
    let count = |c: &str| rows.iter().filter(|r| r.ends_with(&format!(",{c},{c},{c},false"))).count();
    assert_eq!((count("on"), count("ext"), count("int")), (8, 28, 21));
}

#[test]
fn classify_even_dimension_is_input_error() {
    let o = quadrics(&["classify", "--p", "7", "--form", "4 7 1 0 0 0 1 0 0 1 0 1", "--point", "0,0,0,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("undefined"));
}

#[test]
fn classify_rejects_bad_input() {
    assert_eq!(quadrics(&["classify", "--form", "3 7 1 0", "--all"]).status.code(), Some(2));
    assert_eq!(quadrics(&["classify", "--form", "3 7 1 0 0 1 0 0", "--all"]).status.code(), Some(2));
    assert_eq!(quadrics(&["classify", "--form", CONIC, "--point", "0,0,0"]).status.code(), Some(2));
    assert_eq!(quadrics(&["classify", "--form", CONIC, "--point", "1,2"]).status.code(), Some(2));
    assert_eq!(quadrics(&["classify", "--p", "5", "--form", CONIC, "--all"]).status.code(), Some(2));
    assert_eq!(quadrics(&["classify", "--p", "4", "--form", "3 4 1 0 0 1 0 1", "--all"]).status.code(), Some(2));
}

#[test]
fn classify_reads_form_file() {
    let path = std::env::temp_dir().join(format!("quadrics-form-{}.txt", std::process::id()));
    std::fs::write(&path, format!("# conic\n{CONIC}\n")).unwrap();
    let arg = format!("@{}", path.display());
    let o = quadrics(&["classify", "--form", &arg, "--point", "0,0,1"]);
    std::fs::remove_file(&path).ok();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(body(&o), ["[0:0:1] int int int"]);
}

#[test]
fn count_pair_row() {
    let o = quadrics(&["count", "--p", "7", "--form", CONIC, "--form2", CONIC2]);
    assert_eq!(o.status.code(), Some(0));
    let rows = body(&o);
    assert_eq!(rows.len(), 2);
    let header: Vec<&str> = rows[0].split(',').collect();
    let values: Vec<&str> = rows[1].split(',').collect();
    assert_eq!(header.len(), 25);
    assert_eq!(values.len(), 25);
    let total: u64 = values[4..13].iter().map(|v| v.parse::<u64>().unwrap()).sum();
    assert_eq!(total, 57);
    let get = |name: &str| values[header.iter().position(|h| *h == name).unwrap()];
    assert_eq!(get("ext_int"), "12");
    assert_eq!(get("identity_holds"), "true");
    assert_eq!((get("T11"), get("T12"), get("T21"), get("T22")), ("7", "13", "1", "43"));
}

#[test]
fn count_proportional_pair_is_input_error() {
    let o = quadrics(&["count", "--p", "7", "--form", CONIC, "--form2", "3 7 3 0 0 3 0 -3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn count_random_pair_json() {
    let o = quadrics(&["count", "--p", "3", "--k", "2", "--n", "5", "--seed", "9", "--output", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("\"seed\": 9"));
    assert!(text.contains("\"identity_holds\": true"));
}

#[test]
fn charsum_reports_sums_and_bound_status() {
    let o = quadrics(&["charsum", "--form", CONIC, "--form2", CONIC2]);
    let text = stdout(&o);
    assert!(text.contains("\nT11 7\n"));
    assert!(text.contains("\nzeros_fg 14\n"));
    assert!(text.contains("\nsum_chi_f 7\n"));
    // The single-form sum is 7 while q^(3/2)/(q-1) is about 3.09.
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sweep_is_deterministic_across_runs_and_workers() {
    let args = ["sweep", "--q-list", "7,9,11", "--trials", "3", "--seed", "5"];
    let a = quadrics(&args);
    let b = quadrics(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let mut parallel = args.to_vec();
    parallel.extend(["--workers", "3"]);
    let c = quadrics(&parallel);
    assert_eq!(body(&a), body(&c));
    assert_eq!(body(&a).len(), 1 + 9);
    assert!(stdout(&a).contains("# headline max_normalized_deviation="));
}

#[test]
fn sweep_workers_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_quadrics"))
        .args(["sweep", "--q-list", "7", "--trials", "1"])
        .env("QS_WORKERS", "2")
        .output()
        .unwrap();
    assert!(stdout(&o).contains("workers=2"));
}

#[test]
fn sweep_without_trials_has_header_only() {
    let o = quadrics(&["sweep", "--q-list", "7,9", "--trials", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(body(&o).len(), 1);
    assert!(stdout(&o).contains("# headline none"));
}

#[test]
fn selftest_quick_fails_only_the_single_form_bound() {
    let o = quadrics(&["selftest", "--quick"]);
    assert_eq!(o.status.code(), Some(1));
    let failing: Vec<String> = stdout(&o).lines().filter(|l| l.starts_with("FAIL")).map(str::to_string).collect();
    assert_eq!(failing.len(), 1, "{failing:?}");
    assert!(failing[0].contains("counting.katz"));
}

#[test]
fn selftest_fault_injection_trips_identity() {
    let o = quadrics(&["selftest", "--quick", "--inject-fault"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().any(|l| l.starts_with("FAIL") && l.contains("counting.identity")));
}
