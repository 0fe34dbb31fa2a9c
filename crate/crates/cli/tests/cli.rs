use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stvaudit"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn example() -> String {
    data("example.blt").display().to_string()
}

fn write_blt(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn tabulate_table() {
    let o = run(&["tabulate", &example()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("quota 168"));
    assert!(out.contains("162.500") && out.contains("163.375"));
    assert!(out.contains("winners: A, D"));
}

#[test]
fn tabulate_seat_override() {
    let o = run(&["tabulate", "--seats", "1", &example()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("quota 251"));
    assert!(out.contains("301.000*"));
    assert!(out.contains("winners: B"));
}

#[test]
fn tabulate_json_and_csv() {
    let o = run(&["tabulate", "--format", "json", &example()]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["record"]["quota"], "168.00000");
    assert_eq!(v[0]["record"]["rounds"].as_array().unwrap().len(), 4);
    let o = run(&["tabulate", "--format", "csv", &example()]);
    let out = stdout(&o);
    assert!(out.starts_with("election,round,candidate,name,value,status,action\n"));
    assert!(out.contains(",3,2,B,162.50000,continuing,exclude B\n"));
}

#[test]
fn missing_path_exits_2() {
    let o = run(&["tabulate", "/no/such/file.blt"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/no/such/file.blt"));
}

#[test]
fn parse_error_exits_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_blt(dir.path(), "bad.blt", "2 1\n3 1 3 0\n0\n\"A\"\n\"B\"\n\"T\"\n");
    let o = run(&["stats", &p]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn tie_policy_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_blt(
        dir.path(),
        "tie.blt",
        "3 1\n4 1 0\n2 2 0\n2 3 0\n0\n\"A\"\n\"B\"\n\"C\"\n\"Tie\"\n",
    );
    let o = run(&["tabulate", &p]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("tie"));
    let o = run(&["tabulate", "--tie-policy", "index", &p]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("tie in round 1 between B, C broken for B"));
}

#[test]
fn anomalies_example_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let o = run(&["anomalies", "--format", "csv", "--out", &out, &example()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = stdout(&o);
    let row = csv.lines().nth(1).unwrap();
    assert!(row.contains(",2,4,501,yes,yes,strong,yes,"), "{row}");
    assert_eq!(std::fs::read_to_string(dir.path().join("summary.csv")).unwrap(), csv);

    let mut certs: Vec<String> = std::fs::read_dir(dir.path().join("certificates"))
        .unwrap()
        .map(|e| e.unwrap().path().display().to_string())
        .collect();
    certs.sort();
    assert!(certs.len() >= 4);
    let mut args = vec!["verify".to_string(), example()];
    args.extend(certs.iter().cloned());
    let o = bin().args(&args).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    // Fewer ballots than the anomaly needs.
    let upward = certs.iter().find(|c| c.ends_with(".upward.json")).unwrap();
    let text = std::fs::read_to_string(upward).unwrap();
    let mut cert: serde_json::Value = serde_json::from_str(&text).unwrap();
    cert["modifications"][0]["count"] = serde_json::json!(1);
    std::fs::write(upward, serde_json::to_string(&cert).unwrap()).unwrap();
    let o = run(&["verify", &example(), upward]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("rejected"));
}

#[test]
fn verify_against_wrong_election() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    run(&["anomalies", "--kinds", "committee", "--out", &out, &example()]);
    let cert = dir.path().join("certificates/example.00.committee_size.json");
    let perth = data("perth-kinross.blt").display().to_string();
    let o = run(&["verify", &perth, &cert.display().to_string()]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn first_round_election_is_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_blt(
        dir.path(),
        "easy.blt",
        "3 1\n60 1 2 0\n25 2 3 0\n15 3 0\n0\n\"A\"\n\"B\"\n\"C\"\n\"Easy\"\n",
    );
    let o = run(&["anomalies", "--format", "json", &p]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let s = &v[0]["summary"];
    assert_eq!(s["skipped_first_round"], true);
    assert_eq!(s["probes"], 0);
    for k in ["upward", "no_show", "downward"] {
        assert_eq!(s[k], "no");
    }
    assert_eq!(v[0]["certificates"].as_array().unwrap().len(), 0);
}

#[test]
fn probe_budget_truncates() {
    let o = run(&[
        "anomalies",
        "--kinds",
        "upward",
        "--budget-probes",
        "1",
        "--format",
        "csv",
        &example(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let row = stdout(&o).lines().nth(1).unwrap().to_string();
    assert!(row.ends_with(",1,true,false"), "{row}");
    assert!(run(&["anomalies", "--budget-probes", "0", &example()]).status.code() == Some(2));
}

#[test]
fn outputs_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let corpus = data("").display().to_string();
    for d in [&a, &b] {
        let o = run(&["anomalies", "--out", &d.path().display().to_string(), &corpus]);
        assert_eq!(o.status.code(), Some(0));
        let o = run(&["closeness", "--out", &d.path().display().to_string(), &corpus]);
        assert_eq!(o.status.code(), Some(0));
    }
    let files = |d: &Path| {
        let mut v: Vec<PathBuf> = walk(d);
        v.sort();
        v.into_iter()
            .map(|p| (p.strip_prefix(d).unwrap().to_path_buf(), std::fs::read(&p).unwrap()))
            .collect::<Vec<_>>()
    };
    let fa = files(a.path());
    assert!(fa.len() > 5);
    assert_eq!(fa, files(b.path()));
}

fn walk(d: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(d).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

#[test]
fn closeness_single_election() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["closeness", "--out", &dir.path().display().to_string(), &example()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let three = std::fs::read_to_string(dir.path().join("series_three_any.csv")).unwrap();
    let lines: Vec<&str> = three.lines().collect();
    assert_eq!(lines[0], "p,close_count,anomalous_close_count,ratio");
    assert_eq!(lines.len(), 47);
    assert_eq!(lines[1], "50,1,1,1.000000");
    // No election is close at 95%: the ratio is left empty.
    assert_eq!(*lines.last().unwrap(), "95,0,0,");
    let rows = std::fs::read_to_string(dir.path().join("closeness.csv")).unwrap();
    assert!(rows.lines().nth(1).unwrap().contains(",none,\"A, B\","));
}

#[test]
fn stats_formats() {
    let o = run(&["stats", "--format", "json", &example()]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["elections"][0]["voters"], 501);
    let o = run(&["stats", &data("").display().to_string()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("perth-kinross.blt"));
}

#[test]
fn bad_file_does_not_hide_good_ones() {
    let dir = tempfile::tempdir().unwrap();
    write_blt(dir.path(), "a.blt", "2 1\n3 1 0\n2 2 0\n0\n\"A\"\n\"B\"\n\"Good\"\n");
    write_blt(dir.path(), "b.blt", "2 1\n3 1 1 0\n0\n\"A\"\n\"B\"\n\"Bad\"\n");
    let o = run(&["tabulate", &dir.path().display().to_string()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("a.blt"));
    assert!(stderr(&o).contains("b.blt"));
}
