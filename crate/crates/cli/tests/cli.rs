use std::process::{Command, Output};

use padic_zeta::euler::EulerTable;
use padic_zeta::padic::{PadicContext, PadicNumber};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padic-zeta")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_value(o: &Output) -> serde_json::Value {
    serde_json::from_str(stdout(o).trim()).unwrap()
}

#[test]
fn zeta_at_one_is_one() {
    let o = run(&["--p", "5", "--format", "json", "compute", "zeta-czp", "--s", "1", "--x", "2/5"]);
    assert!(o.status.success());
    let v = json_value(&o);
    let digits: Vec<u64> = v["value"]["digits"].as_array().unwrap().iter().map(|d| d.as_u64().unwrap()).collect();
    assert_eq!(digits[0], 1);
    assert!(digits[1..].iter().all(|&d| d == 0));
    assert_eq!(v["value"]["relprec"], 16);
}

#[test]
fn emitted_values_round_trip() {
    let o = run(&["--p", "7", "--prec", "10", "--format", "json", "compute", "zeta-czp", "--s", "-3/2", "--x", "3/7"]);
    assert!(o.status.success());
    let v = json_value(&o);
    let ctx = PadicContext::new(7, 10, 4).unwrap();
    let text = v["value"].to_string();
    let x = PadicNumber::parse_json(&text, &ctx).unwrap();
    assert_eq!(serde_json::to_value(x.to_json()).unwrap(), v["value"]);
}

#[test]
fn euler_number() {
    let o = run(&["compute", "euler-number", "--m", "4"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "5");
}

#[test]
fn ell_reports_oracle_agreement() {
    let o = run(&["--p", "5", "--oracle-depth", "5", "compute", "ell", "--char", "1:1", "--s", "2"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("oracle(N=5)"));
    assert!(out.contains("agreement depth: 5"), "{out}");
}

#[test]
fn domain_error_is_json_on_stderr_with_exit_2() {
    let o = run(&["--p", "5", "compute", "zeta-czp", "--s", "1", "--x", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "ArgumentInZp");
    assert!(o.stdout.is_empty());
}

#[test]
fn unknown_identity_exits_2() {
    let o = run(&["--p", "3", "verify", "--identity", "no-such-family"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn io_error_exits_3() {
    let o = run(&["table", "euler", "--max", "3", "-o", "/nonexistent/dir/table.json"]);
    assert_eq!(o.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "Io");
}

#[test]
fn verify_single_family_passes() {
    let o = run(&["--p", "3", "verify", "--identity", "functional-czp"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let summary = out.lines().last().unwrap();
    assert!(summary.starts_with("summary:") && summary.contains("fail=0"), "{summary}");
}

#[test]
fn verify_euler_exact() {
    let o = run(&["verify", "--identity", "euler-exact"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l.starts_with("PASS euler-conversion")));
}

#[test]
fn raabe_both_forms_reports_printed_form_as_info() {
    let o = run(&["--p", "3", "verify", "--identity", "raabe-czp", "--report-both-forms"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("INFO raabe-czp") && l.contains("form=printed-vs-integral")));
    assert!(!out.lines().any(|l| l.starts_with("FAIL")));
}

#[test]
fn euler_table_file_matches_cache_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("table.json");
    let o = run(&["table", "euler", "--max", "12", "-o", out.to_str().unwrap()]);
    assert!(o.status.success());
    let written = std::fs::read(&out).unwrap();
    let table = EulerTable::build(12);
    assert_eq!(written, table.to_cache_json().into_bytes());
    let saved = std::fs::read(table.save(dir.path()).unwrap()).unwrap();
    assert_eq!(written, saved);
}

#[test]
fn euler_table_csv() {
    let o = run(&["--format", "csv", "table", "euler", "--max", "3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "m,E_m(0),E_m\n0,1,1\n1,-1/2,0\n2,0,-1\n3,1/4,0\n");
}

#[test]
fn zeta_values_csv() {
    let o = run(&["--p", "3", "table", "zeta-values", "--s-list", "1,2", "--x-list", "1/3,2/3"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("p,s,x,valuation,digits,relprec,value"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    let at_one: Vec<&&str> = rows.iter().filter(|r| r.starts_with("3,1,")).collect();
    assert_eq!(at_one.len(), 2);
    assert!(at_one.iter().all(|r| r.contains(",0,1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0,16,")));
}

#[test]
fn ell_values_vanish_for_even_characters() {
    let o = run(&["--p", "5", "table", "ell-values", "--chars", "0..3", "--s-list", "0,1,2", "--v", "1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let rows: Vec<Vec<&str>> = out.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 12);
    for r in rows {
        let k: u32 = r[1].split(':').nth(1).unwrap().parse().unwrap();
        if k % 2 == 0 {
            assert_eq!(r[3], "", "even character must give exact zero: {r:?}");
            assert_eq!(r[6], "O(5^16)");
        } else {
            assert_eq!(r[5], "16");
        }
    }
}

#[test]
fn output_is_independent_of_thread_count() {
    let args = |t: &'static str| {
        vec!["--threads", t, "--p", "5", "--format", "json", "verify", "--identity", "oracle-czp", "--identity", "distribution-char"]
    };
    let one = run(&args("1"));
    let two = run(&args("2"));
    assert!(one.status.success());
    assert_eq!(one.stdout, two.stdout);
}
