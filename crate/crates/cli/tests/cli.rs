use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lisco::io::{format_config, write_frame};
use lisco::{Config, Frame};

fn lisco(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lisco"))
        .args(args)
        .current_dir(dir)
        .env_remove("LISCO_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field<'a>(line: &'a str, key: &str) -> &'a str {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
        .unwrap_or_else(|| panic!("no {key} in {line}"))
}

/// Writes a frame and its sidecar config.
fn save(dir: &Path, name: &str, frame: &Frame) {
    write_frame(dir.join(name), frame).unwrap();
    fs::write(
        dir.join(format!("{name}.sensor")),
        format_config(frame.config()),
    )
    .unwrap();
}

fn two_blobs() -> Frame {
    let cfg = Config::evenly_spaced(8, -0.1, 0.1, 360).unwrap();
    let mut f = Frame::zeros(cfg);
    for l in 2..5 {
        for s in 10..14 {
            f.set(l, s, 4.0).unwrap();
        }
        for s in 100..103 {
            f.set(l, s, 6.0).unwrap();
        }
    }
    f
}

const BOX_SCENE: &str = "\
lasers=4
steps=90
rotation_rate=10
azimuth_step_rad=0.06981317007977318
elevations_rad=-0.2,-0.1,0,0.1
seed=5
box 5 0 0 1 2 2
";

#[test]
fn gen_empty_spec_gives_zero_frame() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("empty.scene"),
        "lasers=2\nsteps=10\nrotation_rate=10\nazimuth_step_rad=0.1\nelevations_rad=0,0.1\n",
    )
    .unwrap();
    let o = lisco(&["gen", "empty.scene", "-o", "e.csv"], dir.path());
    assert!(o.status.success(), "{o:?}");
    let o = lisco(&["cluster", "e.csv"], dir.path());
    assert!(o.status.success());
    let line = stdout(&o);
    assert_eq!(field(&line, "clusters"), "0");
    assert_eq!(field(&line, "noise"), "0");
    assert_eq!(field(&line, "n_points"), "0");
}

#[test]
fn gen_box_matches_library_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("box.scene"), BOX_SCENE).unwrap();
    for out in ["a.bin", "b.bin", "a.csv"] {
        assert!(lisco(&["gen", "box.scene", "-o", out], dir.path())
            .status
            .success());
    }
    let read = |p: &str| fs::read(dir.path().join(p)).unwrap();
    assert_eq!(read("a.bin"), read("b.bin"));
    let want = lisco::Scene::parse(BOX_SCENE).unwrap().generate().unwrap();
    let cfg = lisco::io::read_config::<f64>(dir.path().join("a.csv.sensor")).unwrap();
    let got = lisco::io::read_frame(dir.path().join("a.csv"), cfg).unwrap();
    assert_eq!(got.nonzero_count(), want.nonzero_count());
    assert!(want.nonzero_count() > 0);
}

#[test]
fn seed_env_overrides_scenario_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: &str, out: &str| {
        Command::new(env!("CARGO_BIN_EXE_lisco"))
            .args(["gen", "--scenario", "sparse-far", "--seed", "1", "-o", out])
            .current_dir(dir.path())
            .env("LISCO_SEED", seed)
            .output()
            .unwrap()
    };
    assert!(run("7", "x.bin").status.success());
    assert!(run("7", "y.bin").status.success());
    assert!(lisco(
        &[
            "gen",
            "--scenario",
            "sparse-far",
            "--seed",
            "1",
            "-o",
            "z.bin"
        ],
        dir.path()
    )
    .status
    .success());
    let read = |p: &str| fs::read(dir.path().join(p)).unwrap();
    assert_eq!(read("x.bin"), read("y.bin"));
    assert_ne!(read("x.bin"), read("z.bin"));
}

#[test]
fn two_blobs_make_two_clusters_under_every_algorithm() {
    let dir = tempfile::tempdir().unwrap();
    save(dir.path(), "blobs.csv", &two_blobs());
    let mut files = Vec::new();
    for algo in ["lisco", "baseline", "brute"] {
        let out = format!("{algo}.labels");
        let o = lisco(
            &[
                "cluster",
                "blobs.csv",
                "--algo",
                algo,
                "--epsilon",
                "0.3",
                "--min-pts",
                "2",
                "-o",
                &out,
            ],
            dir.path(),
        );
        assert!(o.status.success(), "{o:?}");
        assert_eq!(field(&stdout(&o), "clusters"), "2");
        files.push(fs::read_to_string(dir.path().join(out)).unwrap());
    }
    assert!(files.windows(2).all(|w| w[0] == w[1]));
    assert!(files[0].starts_with("laser,step,label\n"));
    let o = lisco(
        &["compare", "blobs.csv", "--epsilon", "0.3", "--min-pts", "2"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("MATCH clusters=2"));
}

#[test]
fn compare_on_exact_epsilon_chain_and_wrap() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = Config::uniform(vec![0.0], 8).unwrap();
    let mut f = Frame::zeros(cfg);
    // chord between neighbors: 2 * 2 * sin(π/8)
    for s in [7, 0, 1] {
        f.set(0, s, 2.0).unwrap();
    }
    save(dir.path(), "chain.csv", &f);
    let eps = format!("{}", 4.0 * (std::f64::consts::PI / 8.0).sin() + 1e-12);
    let o = lisco(
        &["compare", "chain.csv", "--epsilon", &eps, "--min-pts", "1"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    assert!(stdout(&o).starts_with("MATCH clusters=1 noise=0 points=3"));
}

#[test]
fn brute_refuses_huge_frames() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = Config::evenly_spaced(100, -0.4, 0.1, 1100).unwrap();
    let f = Frame::new(cfg, vec![5.0; 110_000]).unwrap();
    save(dir.path(), "big.bin", &f);
    let o = lisco(&["cluster", "big.bin", "--algo", "brute"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("110000"), "{err}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        lisco(&["cluster", "missing.bin"], dir.path()).status.code(),
        Some(1)
    );
    fs::write(dir.path().join("junk.csv"), "not a frame").unwrap();
    assert_eq!(
        lisco(&["cluster", "junk.csv"], dir.path()).status.code(),
        Some(1)
    );
    assert_eq!(
        lisco(&["cluster", "x.bin", "--epsilon", "wide"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        lisco(&["cluster", "x.bin", "--algo", "dbscan"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(lisco(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(
        lisco(&["gen", "-o", "x.bin"], dir.path()).status.code(),
        Some(2)
    );
}

#[test]
fn bench_rows_and_comparison_monotonicity() {
    let dir = tempfile::tempdir().unwrap();
    save(dir.path(), "blobs.bin", &two_blobs());
    let o = lisco(
        &[
            "bench",
            "blobs.bin",
            "--repeats",
            "1",
            "--epsilons",
            "0.2,0.5,1.0",
            "-o",
            "b.csv",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{o:?}");
    let csv = fs::read_to_string(dir.path().join("b.csv")).unwrap();
    let rows: Vec<Vec<&str>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 6);
    assert_eq!(
        csv.lines().next().unwrap(),
        "algo,n_points,epsilon,min_pts,repeat,millis,comparisons,merges"
    );
    let lisco_cmp: Vec<u64> = rows
        .iter()
        .filter(|r| r[0] == "lisco")
        .map(|r| r[6].parse().unwrap())
        .collect();
    assert_eq!(lisco_cmp.len(), 3);
    assert!(lisco_cmp.windows(2).all(|w| w[0] <= w[1]), "{lisco_cmp:?}");

    let o = lisco(&["bench", "blobs.bin", "--repeats", "1"], dir.path());
    assert_eq!(stdout(&o).lines().count(), 3);
}
