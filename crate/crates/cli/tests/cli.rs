use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_lectometer");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("LECTOMETER_CONFIG")
        .output()
        .unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(BIN)
        .args(args)
        .env_remove("LECTOMETER_CONFIG")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    // Feed stdin from another thread so a full stdout pipe cannot deadlock.
    let mut stdin = child.stdin.take().unwrap();
    let input = input.to_string();
    let writer = std::thread::spawn(move || stdin.write_all(input.as_bytes()));
    let out = child.wait_with_output().unwrap();
    writer.join().unwrap().unwrap();
    out
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn frame(idx: u64, good: bool) -> String {
    let (e, a) = if good {
        ("happy", "writing")
    } else {
        ("sad", "absent")
    };
    format!(
        r#"{{"frame_idx":{idx},"t_ms":{},"expression":"{e}","activity":"{a}"}}"#,
        idx * 100
    )
}

fn frames_file(dir: &Path, lines: &[String]) -> String {
    let p = dir.join("frames.jsonl");
    fs::write(&p, lines.join("\n") + "\n").unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn score_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let lines: Vec<String> = (0..12).map(|i| frame(i, i % 3 != 0)).collect();
    let frames = frames_file(dir.path(), &lines);
    let out = dir.path().join("out");
    let o = run(&[
        "score",
        "--frames",
        &frames,
        "--fps",
        "10",
        "--out",
        out.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["frame_count"], 12);
    assert_eq!(report["config"]["fps"], 10.0);
    assert_eq!(report["config"]["window_ms"], 180000);
    let all_silent = report["frames"]
        .as_array()
        .unwrap()
        .iter()
        .all(|f| f["parts"]["speech"] == 0);
    assert!(all_silent);
    let csv = fs::read_to_string(out.join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 13);
}

#[test]
fn score_input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "score",
        "--frames",
        "/definitely/missing.jsonl",
        "--fps",
        "30",
    ]);
    assert_eq!(o.status.code(), Some(2));

    let empty = frames_file(dir.path(), &[]);
    let o = run(&[
        "score",
        "--frames",
        &empty,
        "--fps",
        "30",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no frames"));

    let bad = frames_file(dir.path(), &[frame(0, true), frame(0, true)]);
    let o = run(&[
        "score",
        "--frames",
        &bad,
        "--fps",
        "30",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let o = run(&["score", "--frames", &bad, "--fps", "30", "--format", "xml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn stream_emits_one_line_per_frame() {
    let input: String = (0..10).map(|i| frame(i, true) + "\n").collect();
    let o = run_stdin(&["stream", "--fps", "10"], &input);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 10);
    assert!(out.lines().all(|l| l.starts_with("SCORE ")));
    assert!(out.lines().next().unwrap().ends_with("total=2"));
}

#[test]
fn stream_skips_malformed_lines() {
    let mut lines: Vec<String> = (0..5).map(|i| frame(i, true)).collect();
    lines[2] = r#"{"frame_idx":2,"t_ms":"#.into();
    let o = run_stdin(&["stream", "--fps", "10"], &(lines.join("\n") + "\n"));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 4);
    assert_eq!(stderr(&o).lines().count(), 1);
    assert!(stderr(&o).contains("line 3"));
}

#[test]
fn stream_alerts_once_per_episode() {
    // 3 s of frames totalling 0, 2 s totalling 2, then 3 s at 0 again.
    let lines: Vec<String> = (0..80).map(|i| frame(i, (30..50).contains(&i))).collect();
    let o = run_stdin(
        &[
            "stream",
            "--fps",
            "10",
            "--alert-threshold",
            "1",
            "--alert-sustain-ms",
            "1000",
        ],
        &(lines.join("\n") + "\n"),
    );
    let out = stdout(&o);
    let alerts: Vec<&str> = out.lines().filter(|l| l.starts_with("ALERT")).collect();
    assert_eq!(
        alerts,
        vec![
            "ALERT t_ms=900 frame=9 total=0",
            "ALERT t_ms=5900 frame=59 total=0"
        ]
    );
}

#[test]
fn stream_and_score_agree() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s");
    assert!(run(&[
        "synth",
        "--quality",
        "0.5",
        "--seed",
        "5",
        "--duration-ms",
        "200000",
        "--fps",
        "10",
        "--out",
        s.to_str().unwrap()
    ])
    .status
    .success());
    let frames = s.join("frames.jsonl");
    let audio = s.join("audio.wav");
    let words = s.join("words.jsonl");
    let r = dir.path().join("r");
    let o = run(&[
        "score",
        "--frames",
        frames.to_str().unwrap(),
        "--audio",
        audio.to_str().unwrap(),
        "--words",
        words.to_str().unwrap(),
        "--fps",
        "10",
        "--out",
        r.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: Value =
        serde_json::from_str(&fs::read_to_string(r.join("report.json")).unwrap()).unwrap();
    let batch: Vec<u64> = report["frames"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["total"].as_u64().unwrap())
        .collect();

    let o = run_stdin(
        &[
            "stream",
            "--fps",
            "10",
            "--audio",
            audio.to_str().unwrap(),
            "--words",
            words.to_str().unwrap(),
        ],
        &fs::read_to_string(&frames).unwrap(),
    );
    let streamed: Vec<u64> = stdout(&o)
        .lines()
        .filter(|l| l.starts_with("SCORE"))
        .map(|l| l.rsplit("total=").next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(batch, streamed);
}

fn eval_fixture(dir: &Path) -> (String, String) {
    let lines: Vec<String> = (0..20).map(|i| frame(i, i % 2 == 0)).collect();
    let frames = frames_file(dir, &lines);
    let out = dir.join("r");
    assert!(run(&[
        "score",
        "--frames",
        &frames,
        "--fps",
        "10",
        "--out",
        out.to_str().unwrap()
    ])
    .status
    .success());
    // Ratings agree with the machine: good frames score 2 and map to level 2.
    let mut csv = String::from(
        "annotator_id,item_id,item_type,expression,activity,hand,head,overall,speech\n",
    );
    for i in 0..20 {
        let r = if i % 2 == 0 { 4 } else { 1 };
        let overall = if i % 2 == 0 { 2 } else { 1 };
        for a in ["a", "b", "c"] {
            csv.push_str(&format!("{a},{i},frame,{r},{r},1,1,{overall},\n"));
        }
    }
    let ann = dir.join("annotations.csv");
    fs::write(&ann, csv).unwrap();
    (
        out.join("report.json").to_str().unwrap().to_string(),
        ann.to_str().unwrap().to_string(),
    )
}

#[test]
fn eval_perfect_machine() {
    let dir = tempfile::tempdir().unwrap();
    let (report, ann) = eval_fixture(dir.path());
    let out = dir.path().join("e");
    let o = run(&[
        "eval",
        "--report",
        &report,
        "--annotations",
        &ann,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let e: Value =
        serde_json::from_str(&fs::read_to_string(out.join("evaluation.json")).unwrap()).unwrap();
    for f in e["fields"].as_array().unwrap() {
        assert_eq!(f["metrics"]["accuracy"], 1.0, "{}", f["field"]);
    }
    assert_eq!(e["alpha"], 0.05);
    assert!(fs::read_to_string(out.join("evaluation.txt"))
        .unwrap()
        .contains("Human vs machine"));
}

#[test]
fn eval_reads_csv_reports_and_alignments() {
    let dir = tempfile::tempdir().unwrap();
    let lines: Vec<String> = (0..4).map(|i| frame(i, true)).collect();
    let frames = frames_file(dir.path(), &lines);
    let r = dir.path().join("r");
    assert!(run(&[
        "score",
        "--frames",
        &frames,
        "--fps",
        "10",
        "--out",
        r.to_str().unwrap(),
        "--format",
        "csv"
    ])
    .status
    .success());
    let ann = dir.path().join("a.csv");
    fs::write(&ann, "annotator_id,item_id,item_type,expression,activity,hand,head,overall,speech\nx,clip-a,frame,4,4,1,1,2,\n").unwrap();
    let items = dir.path().join("items.csv");
    fs::write(&items, "item_id,frame_idx\nclip-a,3\n").unwrap();
    let o = run(&[
        "eval",
        "--report",
        r.join("report.csv").to_str().unwrap(),
        "--annotations",
        ann.to_str().unwrap(),
        "--items",
        items.to_str().unwrap(),
        "--out",
        dir.path().join("e").to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn eval_unmatched_items_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let (report, ann) = eval_fixture(dir.path());
    let mut text = fs::read_to_string(&ann).unwrap();
    text.push_str("a,999,frame,4,4,4,4,4,\n");
    fs::write(&ann, text).unwrap();
    let o = run(&[
        "eval",
        "--report",
        &report,
        "--annotations",
        &ann,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("999"), "{}", stderr(&o));
}

#[test]
fn synth_is_deterministic_and_validated() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let o = run(&[
            "synth",
            "--quality",
            "0.3",
            "--seed",
            "42",
            "--duration-ms",
            "60000",
            "--out",
            d.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    for f in ["frames.jsonl", "words.jsonl", "audio.wav", "truth.json"] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    let o = run(&[
        "synth",
        "--quality",
        "1.2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&[
        "synth",
        "--p-hand",
        "-1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("lectometer.toml");
    fs::write(&cfg, "fps = 10\nalert_threshold = 1\nwindow_ms = 60000\n").unwrap();
    let frames = frames_file(dir.path(), &[frame(0, true)]);
    let out = dir.path().join("r");
    let o = Command::new(BIN)
        .args([
            "score",
            "--frames",
            &frames,
            "--alert-threshold",
            "3",
            "--out",
            out.to_str().unwrap(),
        ])
        .env("LECTOMETER_CONFIG", &cfg)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let report: Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["fps"], 10.0);
    assert_eq!(report["config"]["window_ms"], 60000);
    assert_eq!(report["config"]["alert_threshold"], 3);

    fs::write(&cfg, "fsp = 10\n").unwrap();
    let o = Command::new(BIN)
        .args(["score", "--frames", &frames, "--fps", "10"])
        .env("LECTOMETER_CONFIG", &cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("fsp"));
}
