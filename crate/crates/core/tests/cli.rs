use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn flexq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flexq"))
        .args(args)
        .env_remove("FLEXQ_BUDGET")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gen(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    let text = stdout(&flexq(&full));
    write(dir, name, &text)
}

#[test]
fn solve_output_passes_check() {
    let dir = TempDir::new().unwrap();
    let files = [
        gen(&dir, "fig1.smfq", &["fig1"]),
        gen(&dir, "ex2.smfq", &["ex2"]),
        gen(
            &dir,
            "rand.smfq",
            &["random", "--agents", "6", "--programs", "4", "--seed", "3"],
        ),
        gen(
            &dir,
            "ml.smfq",
            &[
                "masterlist",
                "--agents",
                "5",
                "--programs",
                "3",
                "--seed",
                "8",
            ],
        ),
    ];
    let solves: [&[&str]; 5] = [
        &["solve", "minmax"],
        &["solve", "minsum", "--method=exact"],
        &["solve", "minsum", "--method=promote"],
        &["solve", "minsum", "--method=restrict"],
        &["solve", "minsum", "--method=minmax"],
    ];
    for file in &files {
        for args in solves {
            let mut full = args.to_vec();
            full.push(s(file));
            let m = write(&dir, "m.txt", &stdout(&flexq(&full)));
            let report = stdout(&flexq(&["check", s(file), "--matching", s(&m)]));
            assert!(report.contains("a_perfect=true\n"), "{args:?}: {report}");
            assert!(report.contains("envy_free=true\n"), "{args:?}: {report}");
        }
    }
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let file = gen(
        &dir,
        "r.smfq",
        &[
            "random",
            "--agents",
            "6",
            "--programs",
            "5",
            "--list-len",
            "4",
            "--seed",
            "11",
        ],
    );
    let again = gen(
        &dir,
        "r2.smfq",
        &[
            "random",
            "--agents",
            "6",
            "--programs",
            "5",
            "--list-len",
            "4",
            "--seed",
            "11",
        ],
    );
    assert_eq!(
        std::fs::read(&file).unwrap(),
        std::fs::read(&again).unwrap()
    );
    for args in [
        vec!["solve", "minsum", "--method=exact", s(&file)],
        vec!["solve", "minsum", "--method=exact", "--jobs", "4", s(&file)],
        vec!["solve", "minmax", s(&file)],
        vec!["oracle", "minsum", s(&file)],
        vec!["bench", "--suite", "small", "--seeds", "5"],
    ] {
        assert_eq!(flexq(&args).stdout, flexq(&args).stdout, "{args:?}");
    }
    let seq = stdout(&flexq(&["solve", "minsum", "--method=exact", s(&file)]));
    let par = stdout(&flexq(&[
        "solve",
        "minsum",
        "--method=exact",
        "--jobs",
        "3",
        s(&file),
    ]));
    assert_eq!(seq, par);
}

#[test]
fn fig1_objectives_and_extension() {
    let dir = TempDir::new().unwrap();
    let h = gen(&dir, "h.smfq", &["fig1"]);
    let g = gen(&dir, "g.hr", &["fig1", "--hr"]);
    assert!(
        stdout(&flexq(&["solve", "minsum", "--method=exact", s(&h)])).contains("# objective=7\n")
    );
    assert!(stdout(&flexq(&["oracle", "minmax", s(&h)])).contains("# objective=4\n"));

    let ext = stdout(&flexq(&["extend", s(&g), "--objective=deviation"]));
    assert!(
        ext.starts_with("a1 -> p1\na2 -> p2\na3 -> p1\na4 -> p1\na5 -> p2\n"),
        "{ext}"
    );
    assert!(ext.contains("# objective=1\n"));
    let costs = write(&dir, "c.txt", "p1 1\np2 2\n");
    let ext = stdout(&flexq(&[
        "extend",
        s(&g),
        "--objective=cost",
        "--costs",
        s(&costs),
    ]));
    assert!(ext.contains("# objective=3\n"));

    let report = stdout(&flexq(&[
        "check",
        s(&g),
        "--matching",
        s(&write(
            &dir,
            "n.txt",
            "a1 -> p1\na2 -> p2\na3 -> -\na4 -> p1\na5 -> -\n",
        )),
    ]));
    assert!(report.contains("a_perfect=false\n"));
    assert!(report.contains("hr_stable=true\n"));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.smfq", "smfq 1\n[agents]\na1 p1\n");
    let out = flexq(&["solve", "minmax", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    assert_eq!(
        flexq(&["solve", "minmax", "/nonexistent/file"])
            .status
            .code(),
        Some(2)
    );

    let h = gen(&dir, "h.smfq", &["fig1"]);
    assert_eq!(
        flexq(&["oracle", "minsum", s(&h), "--budget", "3"])
            .status
            .code(),
        Some(3)
    );
    assert!(
        flexq(&["oracle", "minsum", s(&h), "--budget", "3", "--force"])
            .status
            .success()
    );
    let env = Command::new(env!("CARGO_BIN_EXE_flexq"))
        .args(["solve", "minsum", "--method=exact", s(&h)])
        .env("FLEXQ_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(3));
    assert!(flexq(&[
        "solve",
        "minsum",
        "--method=exact",
        s(&h),
        "--budget",
        "100"
    ])
    .status
    .success());
}

#[test]
fn reduction_generators() {
    let dir = TempDir::new().unwrap();
    let sc = write(
        &dir,
        "sc.txt",
        "elements 3\nset s1: 1 2\nset s2: 2 3\nset s3: 1 3\n",
    );
    let inst = gen(&dir, "sc.smfq", &["setcover", s(&sc)]);
    // three elements plus a minimum cover of two sets
    assert!(stdout(&flexq(&["oracle", "minsum", s(&inst)])).contains("# objective=5\n"));
    let graph = write(&dir, "g.txt", "edge 1 2\nedge 2 3\nedge 1 3\n");
    let inst = gen(&dir, "vc.smfq", &["vertexcover", s(&graph)]);
    assert!(
        stdout(&flexq(&["solve", "minsum", "--method=exact", s(&inst)]))
            .contains("# objective=36\n")
    );
}

#[test]
fn generated_files_round_trip() {
    let dir = TempDir::new().unwrap();
    for args in [
        vec!["fig1"],
        vec!["fig1", "--hr"],
        vec!["fig2", "--n", "6"],
        vec!["ex1", "--n", "4", "--alpha", "7"],
        vec!["random", "--seed", "5"],
    ] {
        let file = gen(&dir, "x.txt", &args);
        let text = std::fs::read_to_string(&file).unwrap();
        let parsed = flexq::format::parse_instance(&text).unwrap();
        assert_eq!(flexq::format::serialize_instance(&parsed), text);
    }
}
