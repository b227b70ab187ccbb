use std::path::{Path, PathBuf};
use std::process::Command;

use clap::CommandFactory;
use manasik_cli::args::Cli;
use manasik_cli::{run, EXIT_DATA, EXIT_IO, EXIT_OK, EXIT_USAGE};

fn demo(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures/demo")
        .join(name)
        .display()
        .to_string()
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compares with a stored golden; `MANASIK_BLESS=1` rewrites it.
fn check_golden(name: &str, actual: &str) {
    let path = golden(name);
    if std::env::var_os("MANASIK_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap();
    assert_eq!(actual, expected, "golden {name} differs");
}

fn invoke(args: &[&str], input: &str) -> (i32, String, String) {
    let mut argv = vec!["manasik"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut input.as_bytes(), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// `sub` followed by the demo corpus flags and `extra`.
fn demo_cmd(sub: &str, extra: &[&str]) -> Vec<String> {
    let mut v: Vec<String> = vec![
        sub.into(),
        "--corpus".into(),
        demo("concepts.xml"),
        "--contexts".into(),
        demo("contexts.xml"),
        "--ontology".into(),
        demo("ontology.xml"),
        "--synonyms".into(),
        demo("synonyms.tsv"),
    ];
    v.extend(extra.iter().map(|s| s.to_string()));
    v
}

fn invoke_demo(sub: &str, extra: &[&str], input: &str) -> (i32, String, String) {
    let argv = demo_cmd(sub, extra);
    let argv: Vec<&str> = argv.iter().map(String::as_str).collect();
    invoke(&argv, input)
}

#[test]
fn every_flag_is_documented() {
    let mut cmd = Cli::command();
    cmd.build();
    for sub in cmd.get_subcommands() {
        assert!(sub.get_about().is_some(), "{} has no description", sub.get_name());
        for arg in sub.get_arguments() {
            let id = arg.get_id().as_str();
            if id == "help" || id == "version" {
                continue;
            }
            assert!(arg.get_help().is_some(), "{} --{id} has no help", sub.get_name());
        }
        let help = sub.clone().render_help().to_string();
        for arg in sub.get_arguments().filter(|a| a.get_long().is_some()) {
            assert!(help.contains(&format!("--{}", arg.get_long().unwrap())), "{}", sub.get_name());
        }
    }
}

#[test]
fn search_golden() {
    let (code, out, err) = invoke_demo("search", &["طواف"], "");
    assert_eq!(code, EXIT_OK, "{err}");
    check_golden("search_tawaf.tsv", &out);
    let (code, out, _) = invoke_demo("search", &["--pretty", "--lang", "en", "Tawaf arafat"], "");
    assert_eq!(code, EXIT_OK);
    check_golden("search_pretty.txt", &out);
}

#[test]
fn index_then_search_equals_in_memory() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("demo.idx").display().to_string();
    let (code, out, err) = invoke_demo("index", &["--out", &cache], "");
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.contains("videos\t8"));
    assert!(Path::new(&cache).is_file());
    for query in ["طواف", "hajj", "kaaba stoning"] {
        let direct = invoke_demo("search", &[query], "");
        let cached = invoke_demo("search", &["--index", &cache, query], "");
        assert_eq!(direct, cached, "{query}");
    }
}

#[test]
fn session_loop_iterates() {
    let (code, out, _) = invoke_demo("session", &["--k", "3"], "طواف\n5\n+00003 -00008\nbad\n\nq\n");
    assert_eq!(code, EXIT_OK);
    for q in ["Q0:", "Q1:", "Q2:"] {
        assert!(out.contains(q), "{out}");
    }
    assert!(out.contains("mark videos as +VIDEO or -VIDEO"));
    let (_, out, _) = invoke_demo("session", &["--k", "3", "طواف"], "\n+00002\nq\n");
    assert!(out.contains("not presented"), "{out}");
}

#[test]
fn gen_and_eval_write_three_curves() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data").display().to_string();
    let args = ["gen", "--out", &data, "--videos", "100", "--concepts", "12", "--contexts", "3", "--queries", "2", "--seed", "5"];
    let (code, _, err) = invoke(&args, "");
    assert_eq!(code, EXIT_OK, "{err}");
    let again = dir.path().join("again").display().to_string();
    let mut args2 = args;
    args2[2] = &again;
    invoke(&args2, "");
    for f in manasik_core::eval::CORPUS_FILES {
        let a = std::fs::read(Path::new(&data).join(f)).unwrap();
        assert_eq!(a, std::fs::read(Path::new(&again).join(f)).unwrap(), "{f} not deterministic");
    }
    check_golden("gen_seed5_queries.tsv", &std::fs::read_to_string(Path::new(&data).join("queries.tsv")).unwrap());
    check_golden("gen_seed5_qrels.tsv", &std::fs::read_to_string(Path::new(&data).join("qrels.tsv")).unwrap());

    let curves = dir.path().join("curves");
    let file = |f: &str| Path::new(&data).join(f).display().to_string();
    let (code, out, err) = invoke(
        &[
            "eval", "--corpus", &file("concepts.xml"), "--contexts", &file("contexts.xml"),
            "--ontology", &file("ontology.xml"), "--qrels", &file("qrels.tsv"),
            "--queries", &file("queries.tsv"), "--out", &curves.display().to_string(),
        ],
        "",
    );
    assert_eq!(code, EXIT_OK, "{err}");
    assert_eq!(out.lines().count(), 1 + 2 * 3);
    for i in 0..3 {
        let csv = std::fs::read_to_string(curves.join(format!("q1_Q{i}.csv"))).unwrap();
        assert!(csv.starts_with("rank,recall,precision\n"));
        assert_eq!(csv.lines().count(), 31);
    }
    check_golden("eval_seed5_q1_Q0.csv", &std::fs::read_to_string(curves.join("q1_Q0.csv")).unwrap());
}

#[test]
fn exit_codes_are_distinct() {
    assert_eq!(invoke_demo("search", &["  "], "").0, EXIT_USAGE);
    assert_eq!(invoke(&["frobnicate"], "").0, EXIT_USAGE);
    assert_eq!(invoke_demo("search", &["--k", "0", "x"], "").0, EXIT_USAGE);
    assert_eq!(invoke(&["gen", "--out", "/tmp/x", "--videos", "0"], "").0, EXIT_USAGE);
    assert_eq!(invoke(&["--help"], "").0, EXIT_OK);
    assert_eq!(invoke_demo("search", &["--concepts", "999", "x"], "").0, EXIT_DATA);

    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.xml");
    std::fs::write(&broken, "<concepts><concept num=\"1\"></concepts>").unwrap();
    let (code, _, err) = invoke(&["search", "--corpus", broken.to_str().unwrap(), "x"], "");
    assert_eq!(code, EXIT_DATA);
    assert!(err.contains("line 1"), "{err}");
    let (code, _, _) = invoke(&["search", "--corpus", "/does/not/exist.xml", "x"], "");
    assert_eq!(code, EXIT_IO);
    let (code, _, _) = invoke_demo("search", &["--weights", "recompute", "x"], "");
    assert_eq!(code, EXIT_DATA);
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_manasik");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code().unwrap();
    assert_eq!(status(&["search", "--corpus", &demo("concepts.xml"), ""]), EXIT_USAGE);
    assert_eq!(status(&["search", "--corpus", &demo("concepts.xml"), "طواف"]), EXIT_OK);
    assert_eq!(status(&["search", "--corpus", "/missing.xml", "x"]), EXIT_IO);
    let out = Command::new(bin)
        .args(["search", "x"])
        .env("MANASIK_CORPUS", demo("concepts.xml"))
        .env("MANASIK_K", "2")
        .arg("hajj")
        .output();
    // two positional queries is a usage error
    assert_eq!(out.unwrap().status.code(), Some(EXIT_USAGE));
    let out = Command::new(bin)
        .args(["search", "hajj"])
        .env("MANASIK_CORPUS", demo("concepts.xml"))
        .env("MANASIK_K", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 3);
}
