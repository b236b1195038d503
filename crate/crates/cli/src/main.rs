//! `lisco`: generate scans, cluster them, check the clusterers against each
//! other and time them.
//!
//! Exit codes: 0 success, 1 unreadable input or failed run, 2 usage error,
//! 3 `compare` found a mismatch.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use lisco::bench::{self, Algo, RunReport, CSV_HEADER};
use lisco::io::{format_config, read_config, read_frame, write_frame};
use lisco::scene::{pillar_ring, worst_case_snake, Scenario};
use lisco::{Config, Frame, Labeling, Params, Scene};

const EXIT_MISMATCH: u8 = 3;

#[derive(Parser)]
#[command(
    name = "lisco",
    version,
    about = "Streaming Euclidean clustering for rotating LiDAR scans"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct ClusterOpts {
    /// Neighborhood radius in meters.
    #[arg(long, default_value_t = 0.4)]
    epsilon: f64,
    /// Smallest component size reported as a cluster.
    #[arg(long = "min-pts", default_value_t = 10)]
    min_pts: usize,
    /// Drop readings whose height is below this value (meters).
    #[arg(long = "ground-z", allow_hyphen_values = true)]
    ground_z: Option<f64>,
}

#[derive(clap::Args, Clone)]
struct FrameInput {
    /// Frame file: binary (LSC1) or CSV.
    frame: PathBuf,
    /// Sensor config. Defaults to `<frame>.sensor` if present, else the
    /// built-in 64-laser sensor.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Ray-cast a scene into a frame file.
    Gen {
        /// Scene spec file.
        #[arg(conflicts_with_all = ["scenario", "snake", "pillars"], required_unless_present_any = ["scenario", "snake", "pillars"])]
        spec: Option<PathBuf>,
        /// Built-in scene: sparse-near, sparse-far, dense-near, dense-far, room.
        #[arg(long)]
        scenario: Option<String>,
        /// Worst-case merge frame with this many points (uses --epsilon).
        #[arg(long)]
        snake: Option<usize>,
        /// Ring of this many pillars around the sensor (1..=24).
        #[arg(long)]
        pillars: Option<usize>,
        #[arg(long, default_value_t = 0.4)]
        epsilon: f64,
        /// Seed for randomized placements; LISCO_SEED overrides it.
        #[arg(long)]
        seed: Option<u64>,
        /// Output frame; `.bin`/`.lsc` is binary, anything else CSV. The
        /// sensor config is written next to it as `<out>.sensor`.
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Cluster one frame and write a label file.
    Cluster {
        #[command(flatten)]
        input: FrameInput,
        #[arg(long, default_value = "lisco", value_parser = ["lisco", "baseline", "brute"])]
        algo: String,
        #[command(flatten)]
        opts: ClusterOpts,
        /// Label file (`laser,step,label`).
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Run all three clusterers and check that they agree.
    Compare {
        #[command(flatten)]
        input: FrameInput,
        #[command(flatten)]
        opts: ClusterOpts,
    },
    /// Time lisco against the kd-tree baseline and write CSV.
    Bench {
        /// Frame files, scene specs (`.scene`) or `scenario:<name>`.
        #[arg(required = true)]
        inputs: Vec<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "0.4")]
        epsilons: Vec<f64>,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(long = "min-pts", default_value_t = 10)]
        min_pts: usize,
        #[arg(long = "ground-z", allow_hyphen_values = true)]
        ground_z: Option<f64>,
        /// Also time the brute-force oracle.
        #[arg(long)]
        brute: bool,
        /// CSV destination; standard output if absent.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cmd: Command) -> anyhow::Result<ExitCode> {
    match cmd {
        Command::Gen {
            spec,
            scenario,
            snake,
            pillars,
            epsilon,
            seed,
            out,
        } => gen(spec, scenario, snake, pillars, epsilon, seed, &out),
        Command::Cluster {
            input,
            algo,
            opts,
            out,
        } => cluster(&input, &algo, &opts, out.as_deref()),
        Command::Compare { input, opts } => compare(&input, &opts),
        Command::Bench {
            inputs,
            config,
            epsilons,
            repeats,
            min_pts,
            ground_z,
            brute,
            out,
        } => bench_cmd(
            &inputs,
            config.as_deref(),
            &epsilons,
            repeats,
            min_pts,
            ground_z,
            brute,
            out.as_deref(),
        ),
    }
}

fn env_seed() -> anyhow::Result<Option<u64>> {
    match std::env::var("LISCO_SEED") {
        Ok(v) => {
            Ok(Some(v.trim().parse().with_context(|| {
                format!("LISCO_SEED='{v}' is not an integer")
            })?))
        }
        Err(_) => Ok(None),
    }
}

fn sidecar(frame: &Path) -> PathBuf {
    let mut s = frame.as_os_str().to_owned();
    s.push(".sensor");
    PathBuf::from(s)
}

#[allow(clippy::too_many_arguments)]
fn gen(
    spec: Option<PathBuf>,
    scenario: Option<String>,
    snake: Option<usize>,
    pillars: Option<usize>,
    epsilon: f64,
    seed: Option<u64>,
    out: &Path,
) -> anyhow::Result<ExitCode> {
    let seed = env_seed()?.or(seed);
    let frame: Frame = if let Some(path) = spec {
        let text =
            fs::read_to_string(&path).with_context(|| format!("cannot read {}", path.display()))?;
        let mut scene =
            Scene::parse(&text).with_context(|| format!("bad scene spec {}", path.display()))?;
        if let Some(s) = seed {
            scene = scene.with_seed(s);
        }
        scene.generate()?
    } else if let Some(name) = scenario {
        let sc: Scenario = name.parse()?;
        sc.spec(seed.unwrap_or(0)).generate()?
    } else if let Some(n) = snake {
        worst_case_snake(n, epsilon)?
    } else if let Some(k) = pillars {
        pillar_ring(k, seed.unwrap_or(0))?
    } else {
        unreachable!("clap requires one scene source")
    };
    write_frame(out, &frame).with_context(|| format!("cannot write {}", out.display()))?;
    fs::write(sidecar(out), format_config(frame.config()))?;
    eprintln!(
        "wrote {} ({} lasers x {} steps, {} returns)",
        out.display(),
        frame.lasers(),
        frame.steps(),
        frame.nonzero_count()
    );
    Ok(ExitCode::SUCCESS)
}

fn load_config(explicit: Option<&Path>, frame: Option<&Path>) -> anyhow::Result<Config> {
    if let Some(p) = explicit {
        return read_config(p).with_context(|| format!("cannot read config {}", p.display()));
    }
    if let Some(f) = frame {
        let side = sidecar(f);
        if side.is_file() {
            return read_config(&side)
                .with_context(|| format!("cannot read config {}", side.display()));
        }
    }
    Ok(Config::hdl64())
}

fn load_frame(input: &FrameInput, ground_z: Option<f64>) -> anyhow::Result<Frame> {
    let config = load_config(input.config.as_deref(), Some(&input.frame))?;
    let config = match ground_z {
        Some(g) => config.with_ground_z(Some(g)),
        None => config,
    };
    read_frame(&input.frame, config)
        .with_context(|| format!("cannot read frame {}", input.frame.display()))
}

fn params(opts: &ClusterOpts) -> anyhow::Result<Params> {
    Ok(Params::new(opts.epsilon, opts.min_pts)?)
}

fn cluster(
    input: &FrameInput,
    algo: &str,
    opts: &ClusterOpts,
    out: Option<&Path>,
) -> anyhow::Result<ExitCode> {
    let frame = load_frame(input, opts.ground_z)?;
    let algo: Algo = algo.parse()?;
    let (result, report) = bench::run_once(algo, &frame, params(opts)?, 0)?;
    if let Some(path) = out {
        let labels = Labeling::from_partition(&result.canonical());
        fs::write(path, labels.emit())
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    println!("{}", report.report_line());
    eprintln!(
        "{}: {} clusters, {} noise of {} points in {:.2} ms",
        algo, report.clusters, report.noise, report.n_points, report.millis
    );
    Ok(ExitCode::SUCCESS)
}

fn compare(input: &FrameInput, opts: &ClusterOpts) -> anyhow::Result<ExitCode> {
    let frame = load_frame(input, opts.ground_z)?;
    let p = params(opts)?;
    let oracle = bench::cluster_with(Algo::Brute, &frame, p)?.canonical();
    let mut verdict = true;
    for algo in [Algo::Lisco, Algo::Baseline] {
        let got = bench::cluster_with(algo, &frame, p)?.canonical();
        if let Some(diff) = got.first_difference(&oracle) {
            println!("MISMATCH {algo} vs brute: {diff}");
            verdict = false;
        }
    }
    if verdict {
        println!(
            "MATCH clusters={} noise={} points={}",
            oracle.clusters.len(),
            oracle.noise.len(),
            oracle.clusters.iter().map(Vec::len).sum::<usize>() + oracle.noise.len()
        );
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(EXIT_MISMATCH))
    }
}

fn bench_input(input: &str, config: Option<&Path>, ground_z: Option<f64>) -> anyhow::Result<Frame> {
    let frame = if let Some(name) = input.strip_prefix("scenario:") {
        let sc: Scenario = name.parse()?;
        sc.spec(env_seed()?.unwrap_or(0)).generate()?
    } else if input.ends_with(".scene") {
        let text = fs::read_to_string(input).with_context(|| format!("cannot read {input}"))?;
        let mut scene = Scene::parse(&text).with_context(|| format!("bad scene spec {input}"))?;
        if let Some(s) = env_seed()? {
            scene = scene.with_seed(s);
        }
        scene.generate()?
    } else {
        let path = Path::new(input);
        let cfg = load_config(config, Some(path))?;
        read_frame(path, cfg).with_context(|| format!("cannot read frame {input}"))?
    };
    Ok(match ground_z {
        Some(g) => {
            let cfg = frame.config().clone().with_ground_z(Some(g));
            frame.with_config(cfg)?
        }
        None => frame,
    })
}

#[allow(clippy::too_many_arguments)]
fn bench_cmd(
    inputs: &[String],
    config: Option<&Path>,
    epsilons: &[f64],
    repeats: usize,
    min_pts: usize,
    ground_z: Option<f64>,
    brute: bool,
    out: Option<&Path>,
) -> anyhow::Result<ExitCode> {
    let frames = inputs
        .iter()
        .map(|i| bench_input(i, config, ground_z))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut algos = vec![Algo::Lisco, Algo::Baseline];
    if brute {
        algos.push(Algo::Brute);
    }
    let mut rows: Vec<RunReport> = Vec::new();
    for frame in &frames {
        for &eps in epsilons {
            let p = Params::new(eps, min_pts)?;
            let reports = bench::compare(&algos, frame, p, repeats)?;
            for a in &algos {
                if let Some(s) = bench::Summary::new(&bench::millis_of(&reports, *a), 0.99) {
                    eprintln!("n={} eps={eps} {a}: {s} ms", frame.nonzero_count());
                }
            }
            rows.extend(reports);
        }
    }
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for r in &rows {
        csv.push_str(&r.csv_row());
        csv.push('\n');
    }
    match out {
        Some(path) => {
            fs::write(path, csv).with_context(|| format!("cannot write {}", path.display()))?
        }
        None => std::io::stdout().write_all(csv.as_bytes())?,
    }
    Ok(ExitCode::SUCCESS)
}
