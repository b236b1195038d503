//! Wall-clock comparison of the streaming clusterer against the batch
//! baselines.
//!
//! Lisco is timed from engine allocation to `finalize`, with the per-step
//! columns extracted beforehand (a sensor driver would hand them over
//! directly). The kd-tree baseline is timed from building its point list to
//! the finished extraction, tree construction included.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::baseline::{brute_force_cluster, pcl_style_cluster, PointSet};
use crate::engine::LiscoEngine;
use crate::error::{Error, Result};
use crate::mask::ClusterParams;
use crate::result::ClusterResult;
use crate::scalar::Scalar;
use crate::sensor::RotationFrame;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algo {
    Lisco,
    Baseline,
    Brute,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Lisco => "lisco",
            Algo::Baseline => "baseline",
            Algo::Brute => "brute",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lisco" => Ok(Algo::Lisco),
            "baseline" | "pcl" => Ok(Algo::Baseline),
            "brute" => Ok(Algo::Brute),
            _ => Err(Error::Config(format!("unknown algorithm '{s}'"))),
        }
    }
}

/// Runs one clusterer on a whole frame without timing it.
pub fn cluster_with<T: Scalar>(
    algo: Algo,
    frame: &RotationFrame<T>,
    params: ClusterParams<T>,
) -> Result<ClusterResult> {
    Ok(timed(algo, frame, params, &columns(frame))?.0)
}

fn columns<T: Scalar>(frame: &RotationFrame<T>) -> Vec<Vec<T>> {
    (0..frame.steps()).map(|s| frame.column(s)).collect()
}

fn timed<T: Scalar>(
    algo: Algo,
    frame: &RotationFrame<T>,
    params: ClusterParams<T>,
    columns: &[Vec<T>],
) -> Result<(ClusterResult, Duration)> {
    let start = Instant::now();
    let result = match algo {
        Algo::Lisco => {
            let mut engine = LiscoEngine::new(frame.config().clone(), params);
            for (s, col) in columns.iter().enumerate() {
                engine.on_step(s, col)?;
            }
            engine.finalize()?
        }
        Algo::Baseline => pcl_style_cluster(
            &PointSet::from_frame(frame),
            params.epsilon(),
            params.min_pts(),
        ),
        Algo::Brute => brute_force_cluster(
            &PointSet::from_frame(frame),
            params.epsilon(),
            params.min_pts(),
        )?,
    };
    Ok((result, start.elapsed()))
}

/// One timed run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub algo: Algo,
    pub n_points: usize,
    pub epsilon: f64,
    pub min_pts: usize,
    pub repeat: usize,
    pub millis: f64,
    /// Candidate pairs examined: occupied mask cells for lisco, radius
    /// query hits for the baselines.
    pub comparisons: u64,
    /// Exact Euclidean distance evaluations.
    pub distance_tests: u64,
    pub merges: usize,
    pub head_rewrites: u64,
    pub clusters: usize,
    pub noise: usize,
}

pub const CSV_HEADER: &str = "algo,n_points,epsilon,min_pts,repeat,millis,comparisons,merges";

impl RunReport {
    pub fn from_result(
        algo: Algo,
        params_eps: f64,
        min_pts: usize,
        repeat: usize,
        r: &ClusterResult,
        t: Duration,
    ) -> Self {
        RunReport {
            algo,
            n_points: r.total_points(),
            epsilon: params_eps,
            min_pts,
            repeat,
            millis: t.as_secs_f64() * 1e3,
            comparisons: r.stats.candidates,
            distance_tests: r.stats.comparisons,
            merges: r.stats.merges,
            head_rewrites: r.stats.head_rewrites,
            clusters: r.clusters.len(),
            noise: r.noise.len(),
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.4},{},{}",
            self.algo,
            self.n_points,
            self.epsilon,
            self.min_pts,
            self.repeat,
            self.millis,
            self.comparisons,
            self.merges
        )
    }

    /// `key=value` summary line, as printed by `lisco cluster`.
    pub fn report_line(&self) -> String {
        format!(
            "algo={} n_points={} clusters={} noise={} epsilon={} min_pts={} millis={:.3} comparisons={} distance_tests={} merges={} head_rewrites={}",
            self.algo,
            self.n_points,
            self.clusters,
            self.noise,
            self.epsilon,
            self.min_pts,
            self.millis,
            self.comparisons,
            self.distance_tests,
            self.merges,
            self.head_rewrites
        )
    }
}

/// Clusters `frame` once with `algo` and reports the elapsed time.
pub fn run_once<T: Scalar>(
    algo: Algo,
    frame: &RotationFrame<T>,
    params: ClusterParams<T>,
    repeat: usize,
) -> Result<(ClusterResult, RunReport)> {
    let cols = columns(frame);
    let (r, t) = timed(algo, frame, params, &cols)?;
    let report = RunReport::from_result(
        algo,
        params.epsilon().to_f64_lossy(),
        params.min_pts(),
        repeat,
        &r,
        t,
    );
    Ok((r, report))
}

/// Alternates the algorithms for `repeats` rounds so that drift in machine
/// load affects them alike. One untimed warm-up round runs first.
pub fn compare<T: Scalar>(
    algos: &[Algo],
    frame: &RotationFrame<T>,
    params: ClusterParams<T>,
    repeats: usize,
) -> Result<Vec<RunReport>> {
    let cols = columns(frame);
    for &a in algos {
        timed(a, frame, params, &cols)?;
    }
    let mut out = Vec::with_capacity(algos.len() * repeats);
    for rep in 0..repeats {
        for &a in algos {
            let (r, t) = timed(a, frame, params, &cols)?;
            out.push(RunReport::from_result(
                a,
                params.epsilon().to_f64_lossy(),
                params.min_pts(),
                rep,
                &r,
                t,
            ));
        }
    }
    Ok(out)
}

/// Mean of a sample with a two-sided Student-t confidence interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub half_width: f64,
    pub confidence: f64,
}

impl Summary {
    /// `None` for fewer than two samples.
    pub fn new(samples: &[f64], confidence: f64) -> Option<Summary> {
        let n = samples.len();
        if n < 2 || !(0.0..1.0).contains(&confidence) {
            return None;
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let std_dev = var.sqrt();
        let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
            .ok()?
            .inverse_cdf(0.5 + confidence / 2.0);
        Some(Summary {
            n,
            mean,
            std_dev,
            half_width: t * std_dev / (n as f64).sqrt(),
            confidence,
        })
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.half_width
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:.4} ± {:.4} ({:.0}% CI, n={})",
            self.mean,
            self.half_width,
            self.confidence * 100.0,
            self.n
        )
    }
}

/// Timings of one algorithm from a [`compare`] run, in milliseconds.
pub fn millis_of(reports: &[RunReport], algo: Algo) -> Vec<f64> {
    reports
        .iter()
        .filter(|r| r.algo == algo)
        .map(|r| r.millis)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensor::SensorConfig;

    #[test]
    fn t_interval_matches_table() {
        // t_{0.995, 19} = 2.860935
        let xs: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let s = Summary::new(&xs, 0.99).unwrap();
        assert!((s.mean - 9.5).abs() < 1e-12);
        let sd = (35.0f64).sqrt();
        assert!((s.std_dev - sd).abs() < 1e-12);
        assert!((s.half_width - 2.860935 * sd / 20f64.sqrt()).abs() < 1e-5);
        assert!(Summary::new(&[1.0], 0.99).is_none());
    }

    #[test]
    fn csv_and_report_lines() {
        let r = RunReport {
            algo: Algo::Lisco,
            n_points: 10,
            epsilon: 0.4,
            min_pts: 2,
            repeat: 3,
            millis: 1.5,
            comparisons: 7,
            distance_tests: 5,
            merges: 1,
            head_rewrites: 0,
            clusters: 2,
            noise: 1,
        };
        assert_eq!(r.csv_row(), "lisco,10,0.4,2,3,1.5000,7,1");
        assert_eq!(
            CSV_HEADER.split(',').count(),
            r.csv_row().split(',').count()
        );
        assert!(r
            .report_line()
            .starts_with("algo=lisco n_points=10 clusters=2 noise=1"));
        assert_eq!("pcl".parse::<Algo>().unwrap(), Algo::Baseline);
        assert!("dbscan".parse::<Algo>().is_err());
    }

    #[test]
    fn all_algorithms_agree_on_a_small_frame() {
        let cfg = SensorConfig::<f64>::evenly_spaced(4, -0.1, 0.1, 60).unwrap();
        let mut f = RotationFrame::zeros(cfg);
        for s in 0..5 {
            f.set(1, s, 5.0).unwrap();
        }
        f.set(3, 30, 5.0).unwrap();
        let p = ClusterParams::new(0.5, 2).unwrap();
        let reports = compare(&[Algo::Lisco, Algo::Baseline, Algo::Brute], &f, p, 2).unwrap();
        assert_eq!(reports.len(), 6);
        let first = cluster_with(Algo::Lisco, &f, p).unwrap().canonical();
        for a in [Algo::Baseline, Algo::Brute] {
            assert_eq!(cluster_with(a, &f, p).unwrap().canonical(), first);
        }
        assert_eq!(millis_of(&reports, Algo::Brute).len(), 2);
    }
}
