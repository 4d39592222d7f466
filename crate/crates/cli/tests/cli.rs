use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn tw() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_tw"));
    c.env_remove("TW_SEED");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    tw().current_dir(dir).args(args).output().unwrap()
}

fn run_with_stdin(dir: &Path, args: &[&str], stdin: &str) -> Output {
    let mut child = tw()
        .current_dir(dir)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/golden")
        .join(name)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn mini_world(dir: &Path) -> PathBuf {
    let o = run(dir, &["make", "--mini-world", "-o", "kitchen.twg.json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    dir.join("kitchen.twg.json")
}

#[test]
fn make_writes_the_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    for theme in ["house", "basic"] {
        let args = [
            "make",
            "--rooms",
            "5",
            "--quest-length",
            "5",
            "--theme",
            theme,
            "--seed",
            "1",
        ];
        let o = run(dir.path(), &args);
        assert!(o.status.success(), "{}", stderr(&o));
        let name = format!("make-r5-q5-s1-{theme}.twg.json");
        assert!(stdout(&o).starts_with(&format!("wrote {name}")));
        assert_eq!(
            std::fs::read(dir.path().join(&name)).unwrap(),
            std::fs::read(golden(&name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn themes_share_logic() {
    let dir = tempfile::tempdir().unwrap();
    for theme in ["house", "basic"] {
        let out = format!("{theme}.twg.json");
        let o = run(
            dir.path(),
            &[
                "make", "--seed", "9", "--doors", "--theme", theme, "-o", &out,
            ],
        );
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let house = read_json(&dir.path().join("house.twg.json"));
    let basic = read_json(&dir.path().join("basic.twg.json"));
    assert_eq!(house["atoms"], basic["atoms"]);
    assert_eq!(house["quest"], basic["quest"]);
    assert_ne!(house["text"]["objective"], basic["text"]["objective"]);
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = tw()
        .current_dir(dir.path())
        .env("TW_SEED", "1")
        .args(["make", "-o", "env.twg.json"])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("seed 1"));
    assert_eq!(
        std::fs::read(dir.path().join("env.twg.json")).unwrap(),
        std::fs::read(golden("make-r5-q5-s1-house.twg.json")).unwrap()
    );
    let o = tw()
        .current_dir(dir.path())
        .env("TW_SEED", "1")
        .args(["make", "--seed", "2", "-o", "flag.twg.json"])
        .output()
        .unwrap();
    assert!(stdout(&o).contains("seed 2"));
    let meta = &read_json(&dir.path().join("flag.twg.json"))["metadata"];
    assert_eq!(meta["seeds"]["seed"], 2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["make", "--rooms", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nb_rooms"));
    assert_eq!(
        run(dir.path(), &["make", "--quest-length", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(dir.path(), &["make", "--level", "31"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(dir.path(), &["make", "--colour", "red"]).status.code(),
        Some(1)
    );
    assert_eq!(run(dir.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        run(dir.path(), &["make", "--level", "3", "--rooms", "4"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(dir.path(), &["--help"]).status.code(), Some(0));
    assert_eq!(
        run(dir.path(), &["play", "missing.twg.json"]).status.code(),
        Some(2)
    );
    let o = run(
        dir.path(),
        &["make", "--mini-world", "-o", "no/such/dir/k.twg.json"],
    );
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn play_to_a_win() {
    let dir = tempfile::tempdir().unwrap();
    let game = mini_world(dir.path());
    let o = run_with_stdin(
        dir.path(),
        &["play", game.to_str().unwrap()],
        "open fridge\ntake apple from fridge\neat apple\n",
    );
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("-= Kitchen =-"));
    assert!(out.contains("*** You won! ***"), "{out}");
}

#[test]
fn play_ends_cleanly_on_eof() {
    let dir = tempfile::tempdir().unwrap();
    let game = mini_world(dir.path());
    let o = run_with_stdin(dir.path(), &["play", game.to_str().unwrap()], "look\n");
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).trim_end().ends_with("Bye."));
    assert!(stderr(&o).is_empty());
}

#[test]
fn play_runs_out_of_moves() {
    let dir = tempfile::tempdir().unwrap();
    let game = mini_world(dir.path());
    let o = run_with_stdin(
        dir.path(),
        &["play", game.to_str().unwrap(), "--max-steps", "3"],
        "look\ninventory\nopen fridge\ntake apple from fridge\n",
    );
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("*** Out of moves ***"), "{out}");
    assert!(out.contains("Final score 0 in 3 moves."));
}

#[test]
fn play_by_number() {
    let dir = tempfile::tempdir().unwrap();
    let game = mini_world(dir.path());
    let o = run_with_stdin(
        dir.path(),
        &["play", game.to_str().unwrap(), "--choices"],
        "1\ntake apple from fridge\neat apple\n",
    );
    let out = stdout(&o);
    assert!(out.contains("  1. open fridge"));
    assert!(out.contains("*** You won! ***"), "{out}");
}

#[test]
fn play_rejects_story_files() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("zork1.z5"), b"\x05\x00").unwrap();
    let o = run(dir.path(), &["play", "zork1.z5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unsupported"));
}

#[test]
fn inspect_reports() {
    let dir = tempfile::tempdir().unwrap();
    let game = mini_world(dir.path());
    let o = run(dir.path(), &["inspect", game.to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("reachable states: 8\n"), "{out}");
    assert!(out.contains("in(apple,fridge)"));
    assert!(out.contains("winning policy: open fridge, take apple from fridge, eat apple"));

    let mut v = read_json(&game);
    v["quest"] = Value::Null;
    let questless = dir.path().join("questless.twg.json");
    std::fs::write(&questless, v.to_string()).unwrap();
    let o = run(dir.path(), &["inspect", questless.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("no quest"));

    let text = std::fs::read_to_string(&game).unwrap();
    let truncated = dir.path().join("truncated.twg.json");
    std::fs::write(&truncated, &text[..text.len() / 2]).unwrap();
    let o = run(dir.path(), &["inspect", truncated.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("corrupt game file"));
}

#[test]
fn bench_report_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str, extra: &'static [&'static str]| {
        let mut a = vec![
            "bench",
            "th",
            "--level",
            "2",
            "--games",
            "12",
            "--agent",
            "simple",
            "--seed",
            "5",
            "--max-steps",
            "200",
            "--out",
            out,
        ];
        a.extend_from_slice(extra);
        a
    };
    let o = run(dir.path(), &args("a.json", &[]));
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("treasure_hunter level 2: 12 games, agent simple, seed 5"));
    run(dir.path(), &args("b.json", &["--sequential"]));
    let a = read_json(&dir.path().join("a.json"));
    assert_eq!(a, read_json(&dir.path().join("b.json")));
    assert_eq!(a["schema_version"], 1);
    assert_eq!(a["seed"], 5);
    assert_eq!(a["level"], 2);
    let games = a["games"].as_array().unwrap();
    assert_eq!(games.len(), 12);
    for g in games {
        assert!(g["seed"].is_u64());
        assert!(g["outcome"].is_string());
        assert!(g["steps"].is_u64());
        assert!(g["score"].is_i64());
    }
}

#[test]
fn eval_game_files() {
    let dir = tempfile::tempdir().unwrap();
    let game = mini_world(dir.path());
    let o = run(
        dir.path(),
        &["make", "--level", "7", "--seed", "3", "-o", "th.twg.json"],
    );
    assert!(o.status.success());
    let o = run(
        dir.path(),
        &[
            "eval",
            game.to_str().unwrap(),
            "th.twg.json",
            "--agent",
            "oracle",
            "-o",
            "r.json",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let r = read_json(&dir.path().join("r.json"));
    assert_eq!(r["avg_score"], 1.0);
    assert_eq!(r["files"].as_array().unwrap().len(), 2);
    assert_eq!(r["games"][1]["seed"], 3);
}

#[test]
fn serve_answers_http() {
    let mut child = tw()
        .args(["serve", "--addr", "127.0.0.1:0"])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.take().unwrap())
        .read_line(&mut line)
        .unwrap();
    let addr = line
        .trim()
        .strip_prefix("listening on http://")
        .and_then(|s| s.split_whitespace().next())
        .unwrap()
        .to_string();
    let body = r#"{"level": 1, "seed": 0}"#;
    let mut stream = TcpStream::connect(&addr).unwrap();
    write!(
        stream,
        "POST /sessions HTTP/1.1\r\nHost: {addr}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    )
    .unwrap();
    let mut response = String::new();
    stream.read_to_string(&mut response).unwrap();
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(response.starts_with("HTTP/1.1 201"), "{response}");
    assert!(response.contains("\"session_id\""));
}
