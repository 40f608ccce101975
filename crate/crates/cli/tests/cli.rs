use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cmpdp::graph::{parse_solution, read_graph_file};

fn cmpdp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmpdp"))
        .args(args)
        .env_remove("CMPDP_LR")
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "status {:?}\nstdout: {}\nstderr: {}",
        out.status,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn gen(dir: &Path, model: &str, count: &str, extra: &[&str]) {
    let mut args = vec!["gen", "--model", model, "--count", count, "--out", p(dir)];
    args.extend_from_slice(extra);
    ok(&cmpdp(&args));
}

#[test]
fn solve_writes_a_valid_solution() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    gen(&data, "er", "2", &["--n", "12", "--p", "0.3"]);
    let graph = data.join("g0000.col");
    let g = read_graph_file(&graph).unwrap();
    for (method, problem) in [
        ("greedy", "mis"),
        ("exact", "mvc"),
        ("random", "mis"),
        ("local-search", "mvc"),
    ] {
        let sol = dir.path().join(format!("{method}-{problem}.sol"));
        let out = cmpdp(&[
            "solve",
            "--graph",
            p(&graph),
            "--method",
            method,
            "--problem",
            problem,
            "--out",
            p(&sol),
        ]);
        ok(&out);
        let ids = parse_solution(&fs::read_to_string(&sol).unwrap()).unwrap();
        let stdout = String::from_utf8(out.stdout).unwrap();
        assert!(stdout.contains(&format!("size {}", ids.len())), "{stdout}");
        if problem == "mis" {
            assert!(g.is_independent_set(&ids));
        } else {
            assert!(g.is_vertex_cover(&ids));
        }
    }
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let rows = dir.path().join("rows.csv");
    let out = cmpdp(&["eval", "--data", p(&empty), "--out", p(&rows)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(cmpdp(&["frobnicate"]).status.code(), Some(1));
    let graph = dir.path().join("g.col");
    fs::write(&graph, "p edge 2 1\ne 1 2\n").unwrap();
    let bad_method = cmpdp(&["solve", "--graph", p(&graph), "--method", "magic"]);
    assert_eq!(bad_method.status.code(), Some(1));
    let bad_key = cmpdp(&["solve", "--graph", p(&graph), "--set", "batch_size=-1"]);
    assert_eq!(bad_key.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad_key.stderr).contains("batch_size"));
    assert_eq!(cmpdp(&["--help"]).status.code(), Some(0));
}

#[test]
fn runtime_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("bad.col");
    fs::write(&graph, "p edge 3 1\ne 1 5\n").unwrap();
    let out = cmpdp(&["solve", "--graph", p(&graph)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn emit_lp_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("edge.col");
    fs::write(&graph, "c one edge\np edge 2 1\ne 1 2\n").unwrap();
    let out = cmpdp(&["emit-lp", "--graph", p(&graph), "--problem", "mvc"]);
    ok(&out);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Minimize") && text.contains("x1 + x2 >= 1"));
}

#[test]
fn train_then_eval_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("train");
    let test = dir.path().join("test");
    gen(
        &data,
        "er",
        "6",
        &[
            "--n-min", "10", "--n-max", "14", "--p", "0.2", "--seed", "1",
        ],
    );
    gen(
        &test,
        "er",
        "4",
        &[
            "--n-min", "10", "--n-max", "14", "--p", "0.2", "--seed", "2",
        ],
    );
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# tiny run\nK=1\nD=4\nL=2\nepochs_per_refresh=2\ngraphs_per_refresh=4\npairs_per_graph=2\nm=1\n").unwrap();
    let weights = dir.path().join("w.bin");
    let metrics = dir.path().join("metrics.csv");
    ok(&cmpdp(&[
        "train",
        "--data",
        p(&data),
        "--config",
        p(&cfg),
        "--epochs",
        "3",
        "--mixed",
        "--out",
        p(&weights),
        "--metrics",
        p(&metrics),
    ]));
    let csv = fs::read_to_string(&metrics).unwrap();
    assert!(csv.starts_with(
        "epoch,refresh_index,train_loss,val_loss,val_pair_accuracy,consistency,wall_seconds\n"
    ));
    assert_eq!(csv.lines().count(), 5);

    let run_eval = |name: &str| {
        let rows = dir.path().join(format!("{name}.csv"));
        let summary = dir.path().join(format!("{name}-summary.csv"));
        ok(&cmpdp(&[
            "eval",
            "--data",
            p(&test),
            "--methods",
            "cmp,cmp-mixed,greedy,random,exact",
            "--weights",
            p(&weights),
            "--config",
            p(&cfg),
            "--out",
            p(&rows),
            "--summary",
            p(&summary),
        ]));
        let strip_time = |t: String| -> Vec<String> {
            t.lines()
                .map(|l| l.rsplit_once(',').map_or(l, |(a, _)| a).to_string())
                .collect()
        };
        (
            strip_time(fs::read_to_string(rows).unwrap()),
            fs::read_to_string(summary).unwrap(),
        )
    };
    let (a, sa) = run_eval("a");
    let (b, sb) = run_eval("b");
    assert_eq!(a, b);
    assert_eq!(sa, sb);
    assert_eq!(a.len(), 1 + 4 * 5);
    assert!(
        sa.lines()
            .any(|l| l.starts_with("exact,mis,1.000000,0.000000,4,0")),
        "{sa}"
    );
}

#[test]
fn consistency_and_ablate_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d");
    gen(
        &data,
        "special",
        "3",
        &["--n-min", "4", "--n-max", "6", "--a", "1"],
    );
    let tiny = [
        "--set",
        "D=4",
        "--set",
        "epochs_per_refresh=2",
        "--set",
        "graphs_per_refresh=2",
        "--set",
        "m=1",
    ];

    let curve = dir.path().join("curve.csv");
    let mut args = vec![
        "consistency",
        "--data",
        p(&data),
        "--epochs",
        "4",
        "--out",
        p(&curve),
    ];
    args.extend_from_slice(&tiny);
    ok(&cmpdp(&args));
    let text = fs::read_to_string(&curve).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "iteration,epoch,consistency");
    assert_eq!(rows.len(), 1 + 3);
    assert!(rows[1].starts_with("0,0,"));

    let out_dir = dir.path().join("ablate");
    let mut args = vec![
        "ablate",
        "--data",
        p(&data),
        "--param",
        "K",
        "--values",
        "1,2,3",
        "--epochs",
        "2",
        "--test",
        p(&data),
        "--out-dir",
        p(&out_dir),
    ];
    args.extend_from_slice(&tiny);
    ok(&cmpdp(&args));
    for k in 1..=3 {
        assert!(out_dir.join(format!("metrics_K{k}.csv")).exists());
        assert!(out_dir.join(format!("weights_K{k}.bin")).exists());
    }
    let table = fs::read_to_string(out_dir.join("ablation.csv")).unwrap();
    assert_eq!(table.lines().count(), 4);
}
