use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use wamc::{parse_records, Record};
use wamc_core::{parse_automaton, Semiring, Weight};

fn fixture(name: &str) -> String {
    format!("{}/../core/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("wamc-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn wamc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wamc")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn boolean_reachability_lists_start_state() {
    let o = wamc(&["check", "--model", &fixture("drive_bool_agg.wa"), "--formula", "true U{>0, inf} ok"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "L'"));
}

#[test]
fn probabilistic_all_until_fails_at_start() {
    let o = wamc(&["check", "--model", &fixture("drive_prob_agg.wa"), "--formula", "true AU{>=1, inf} ok"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!stdout(&o).lines().any(|l| l == "L'"));
}

#[test]
fn malformed_formula_is_an_error() {
    let o = wamc(&["check", "--model", &fixture("drive_bool.wa"), "--formula", "true U{>0, inf ok"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("formula syntax error"));
}

#[test]
fn missing_model_is_an_error() {
    let o = wamc(&["check", "--model", "/nonexistent/model.wa", "--formula", "true"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn formula_is_required() {
    let o = wamc(&["check", "--model", &fixture("drive_bool.wa")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn formula_file_is_read() {
    let f = scratch("reach.ctl", "true U{>0, 2} ok\n");
    let o = wamc(&["check", "--model", &fixture("drive_bool.wa"), "--formula-file", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "L"));
}

#[test]
fn plain_output_follows_state_order() {
    let path = fixture("drive_bool.wa");
    let a = parse_automaton(&fs::read_to_string(&path).unwrap()).unwrap();
    let o = wamc(&["check", "--model", &path, "--formula", "learn"]);
    let listed: Vec<usize> = stdout(&o).lines().map(|l| a.require_state(l).unwrap()).collect();
    assert_eq!(listed.len(), a.n() - 1);
    assert!(listed.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn records_round_trip() {
    let o = wamc(&[
        "check",
        "--model",
        &fixture("drive_maxplus_agg.wa"),
        "--formula",
        "true U{>=21, 9} ok",
        "--output",
        "records",
    ]);
    let text = stdout(&o);
    let records = parse_records(&text).unwrap();
    assert_eq!(records.len(), 5);
    let mut again = Vec::new();
    wamc::write_records(&mut again, &records).unwrap();
    assert_eq!(String::from_utf8(again).unwrap(), text);
    let start = records.iter().find(|r| r.state == "L'").unwrap();
    assert!(start.verdict);
    let w = start.weight_in(Semiring::MaxPlus).unwrap().unwrap();
    assert!(matches!(w, Weight::Real(v) if v >= 21.0));
}

#[test]
fn records_without_weights() {
    let o = wamc(&["check", "--model", &fixture("drive_bool.wa"), "--formula", "ok", "--output", "records"]);
    let records = parse_records(&stdout(&o)).unwrap();
    assert!(records.iter().all(|r| r.weight.is_none()));
    assert_eq!(records.iter().filter(|r| r.verdict).count(), 1);
}

#[test]
fn records_parser_rejects_garbage() {
    assert!(parse_records("L\tmaybe\t1\n").is_err());
    assert!(parse_records("L\ttrue\n").is_err());
    assert_eq!(
        parse_records("# c\n\nA\tfalse\t-\n").unwrap(),
        vec![Record {
            state: "A".into(),
            verdict: false,
            weight: None
        }]
    );
}

#[test]
fn show_weights_prints_margins() {
    let o = wamc(&[
        "check",
        "--model",
        &fixture("drive_prob_agg.wa"),
        "--formula",
        "true U{>=0.5, inf} ok",
        "--show-weights",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o).lines().find(|l| l.starts_with("L'\t")).unwrap().to_string();
    let w: f64 = line.split('\t').nth(1).unwrap().parse().unwrap();
    assert!((w - 1.0).abs() < 1e-9);
}

#[test]
fn ctl_compat_mode() {
    let args = ["check", "--model", &fixture("drive_bool.wa"), "--formula", "EF ok", "--ctl-compat"];
    assert_eq!(wamc(&args).status.code(), Some(0));
    let o = wamc(&["check", "--model", &fixture("drive_bool.wa"), "--formula", "EF ok"]);
    assert_eq!(o.status.code(), Some(2));
    let o = wamc(&["check", "--model", &fixture("drive_prob.wa"), "--formula", "EF ok", "--ctl-compat"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn minimize_produces_five_states_and_class_lines() {
    let o = wamc(&["minimize", "--model", &fixture("drive_prob.wa"), "--report-classes"]);
    assert_eq!(o.status.code(), Some(0));
    let q = parse_automaton(&stdout(&o)).unwrap();
    assert_eq!(q.n(), 5);
    let classes: Vec<String> = stderr(&o).lines().map(String::from).collect();
    assert_eq!(classes.len(), 5);
    assert!(classes.iter().all(|l| l.starts_with("class: ")));
    assert!(classes.contains(&"class: C1 = A B C".to_string()));
}

#[test]
fn minimize_to_file_keeps_minimal_models() {
    let out = std::env::temp_dir().join(format!("wamc-cli-min-{}.wa", std::process::id()));
    let o = wamc(&[
        "minimize",
        "--model",
        &fixture("drive_prob_agg.wa"),
        "--out",
        out.to_str().unwrap(),
        "--report-classes",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 5);
    let q = parse_automaton(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(q.n(), 5);
    fs::remove_file(out).unwrap();
}

#[test]
fn equivalence_exit_codes() {
    let (fig1, fig2) = (fixture("drive_prob.wa"), fixture("drive_prob_agg.wa"));
    assert_eq!(wamc(&["equiv", "--model", &fig1, "--model", &fig2]).status.code(), Some(0));
    assert_eq!(wamc(&["equiv", "--model", &fig1, "--model", &fig1]).status.code(), Some(0));

    let moved = fs::read_to_string(&fig2).unwrap().replace("final: H'=1", "final: G'=1");
    let perturbed = scratch("perturbed.wa", &moved);
    let o = wamc(&["equiv", "--model", &fig1, "--model", perturbed.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "not equivalent");

    let o = wamc(&["equiv", "--model", &fig1, "--model", &fixture("drive_bool.wa")]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(wamc(&["equiv", "--model", &fig1]).status.code(), Some(2));
}

#[test]
fn weights_of_paths_and_sequences() {
    let o = wamc(&["weight", "--model", &fixture("drive_maxplus.wa"), "--path", "L,l,A,e,E,f,G,l,L,l,A,d,B,f,H"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "21");

    let o = wamc(&["weight", "--model", &fixture("drive_prob_agg.wa"), "--seq", "l,f"]);
    let w: f64 = stdout(&o).trim().parse().unwrap();
    assert!((w - 1.0 / 6.0).abs() < 1e-12);

    let path = fixture("drive_prob_agg.wa");
    let a = parse_automaton(&fs::read_to_string(&path).unwrap()).unwrap();
    let ab = a.initial().dot(a.final_weights()).unwrap();
    let o = wamc(&["weight", "--model", &path, "--seq", ""]);
    assert_eq!(stdout(&o).trim(), ab.to_string());

    let o = wamc(&["weight", "--model", &path, "--seq", "l", "--reach"]);
    assert_eq!(stdout(&o).lines().count(), a.n());

    let o = wamc(&["weight", "--model", &fixture("drive_maxplus.wa"), "--path", "L,l,H"]);
    assert_eq!(o.status.code(), Some(2));
    let o = wamc(&["weight", "--model", &path, "--seq", "l,zz"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn expectation_scope_errors() {
    let model = scratch(
        "expect.wa",
        "semiring: expectation\nstates: a b\nalphabet: x\ninit: a=(1,0)\nfinal: b=(1,0)\nap: b g\ntrans: a x b (0.5,2)\n",
    );
    let m = model.to_str().unwrap();
    let o = wamc(&["check", "--model", m, "--formula", "true U{>=(0.5,3), inf} g"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("finite step bounds"));
    let o = wamc(&["check", "--model", m, "--formula", "true AU{>(0,0), 2} g"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("all-until"));
    let o = wamc(&["check", "--model", m, "--formula", "true U{>=(0.5,3), 3} g"]);
    assert_eq!(o.status.code(), Some(0));
}
