use std::fs;

use seqteach::robot::MERGER_RULES;
use seqteach::session::{drive_participant, Group, SessionService};
use seqteach::zoo::{AlgorithmId, BankSizes, QuestionBank};

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut argv = vec!["seqteach"];
    argv.extend_from_slice(args);
    let code = seqteach_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn cogcost_reproduces_bounded_merger_table() {
    let dir = tempfile::tempdir().unwrap();
    let rules = dir.path().join("merger.pl");
    fs::write(&rules, MERGER_RULES).unwrap();
    let (code, out, err) = run(&[
        "cogcost",
        "--rules",
        rules.to_str().unwrap(),
        "--query",
        "merger(s1,V1)",
        "--state",
        "s1=1, 0 | 0 | | |",
        "--limit",
        "4",
    ]);
    assert_eq!(code, 0, "{err}");
    let costs: Vec<u64> = out
        .lines()
        .skip(1)
        .take_while(|l| !l.starts_with("total"))
        .map(|l| l.split_whitespace().next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(costs, vec![15, 15, 29, 1]);
    assert!(out.contains("total 60"));
    assert!(out.contains("outcome bound-reached"));
}

#[test]
fn learn_merger_prints_three_clauses() {
    let (code, out, err) = run(&["learn", "--target", "merger", "--max-clauses", "3"]);
    assert_eq!(code, 0, "{err}");
    let clauses: Vec<&str> = out.lines().filter(|l| !l.starts_with('%')).collect();
    assert_eq!(clauses.len(), 3, "{out}");
    assert!(clauses.iter().all(|c| c.starts_with("merger")));
}

#[test]
fn learn_from_problem_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("merge.problem");
    fs::write(
        &p,
        "target: merger\nmax_clauses: 3\nbackground: parse_exprs, compare_nums, drop_bag_remaining\n\
         pos: 2, 1 | 0 | | | -> | 1 | | | 1 < 2\n\
         pos: 4 < 6, 2 < 5 | 0 | | | -> | 3 | | | 2 < 4 < 5 < 6\n",
    )
    .unwrap();
    let (code, out, err) = run(&["learn", "--problem", p.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(out.lines().any(|l| l.starts_with("merger(")));
}

#[test]
fn gen_questions_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let (code, _, err) = run(&[
            "gen-questions",
            "--kind",
            "sort",
            "--count",
            "8",
            "--seed",
            "7",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{err}");
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let qs: Vec<serde_json::Value> = serde_json::from_slice(&fs::read(&a).unwrap()).unwrap();
    assert_eq!(qs.len(), 8);
    let (code, out, _) = run(&["gen-questions", "--kind", "bank", "--seed", "7"]);
    assert_eq!(code, 0);
    let bank: QuestionBank = serde_json::from_str(&out).unwrap();
    assert_eq!(bank.sort_test.len(), 8);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["gen-questions", "--kind", "sort"]).0, 2);
    assert_eq!(run(&["cogcost", "--rules", "/no/such/file", "--query", "p(a)"]).0, 1);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("cogcost"));
}

#[test]
fn classify_and_report_on_exported_bundle() {
    let store = tempfile::tempdir().unwrap();
    let svc = SessionService::open(store.path()).unwrap();
    svc.load_bank(QuestionBank::generate(5, BankSizes::default()).unwrap())
        .unwrap();
    for (g, alg) in [
        (Group::MsWex, AlgorithmId::MsBuCascade),
        (Group::SmWoex, AlgorithmId::IsLinearBwd),
    ] {
        let s = svc.create_session(Some(g)).unwrap();
        drive_participant(&svc, &s.id, alg, 0.0, 1).unwrap();
    }
    let dir = tempfile::tempdir().unwrap();
    let bundle = dir.path().join("bundle");
    svc.export(None).unwrap().write_dir(&bundle).unwrap();

    let export = svc.export(None).unwrap();
    let json_file = dir.path().join("bundle.json");
    fs::write(&json_file, serde_json::to_string(&export).unwrap()).unwrap();
    let nd_file = dir.path().join("bundle.ndjson");
    fs::write(&nd_file, export.to_ndjson()).unwrap();
    let (_, from_json, _) = run(&["classify", "--bundle", json_file.to_str().unwrap()]);
    let (_, from_nd, _) = run(&["classify", "--bundle", nd_file.to_str().unwrap()]);

    let (code, csv, err) = run(&["classify", "--bundle", bundle.to_str().unwrap()]);
    assert_eq!(from_json, csv);
    assert_eq!(from_nd, csv);
    assert_eq!(code, 0, "{err}");
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "participant,question,category,algorithm,chi2,chi2_p,rho,rho_p");
    assert_eq!(rows.len(), 1 + 2 * (4 + 8));
    assert!(rows
        .iter()
        .filter(|r| r.starts_with("p00001"))
        .all(|r| r.contains(",MS,")));
    assert!(rows
        .iter()
        .filter(|r| r.starts_with("p00002"))
        .all(|r| r.contains(",IS,")));

    let (code, text, err) = run(&["report", "--bundle", bundle.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(text.contains("MS/WEX") && text.contains("tau_sorter"));
    assert!(text.contains("1073741824"));
    let (code, json, _) = run(&["report", "--bundle", bundle.to_str().unwrap(), "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["groups"].as_array().unwrap().len(), 4);
}
