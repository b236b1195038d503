//! Per-point label files: `laser,step,label`, one row per return in
//! delivery order, label `>= 0` for the cluster index and `-1` for noise.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::result::{ClusterResult, Partition};
use crate::sensor::PointRef;

pub const HEADER: &str = "laser,step,label";

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Labeling {
    rows: Vec<(PointRef, i64)>,
}

impl Labeling {
    /// Labels clusters by their position in `result.clusters`.
    pub fn from_result(result: &ClusterResult) -> Self {
        let mut rows: Vec<(PointRef, i64)> = Vec::with_capacity(result.total_points());
        for (i, c) in result.clusters.iter().enumerate() {
            rows.extend(c.iter().map(|&p| (p, i as i64)));
        }
        rows.extend(result.noise.iter().map(|&p| (p, -1)));
        rows.sort_unstable();
        Labeling { rows }
    }

    /// Labels clusters in canonical order, so that every algorithm producing
    /// the same partition writes the same file.
    pub fn from_partition(partition: &Partition) -> Self {
        let mut rows: Vec<(PointRef, i64)> = Vec::new();
        for (i, c) in partition.clusters.iter().enumerate() {
            rows.extend(c.iter().map(|&p| (p, i as i64)));
        }
        rows.extend(partition.noise.iter().map(|&p| (p, -1)));
        rows.sort_unstable();
        Labeling { rows }
    }

    pub fn rows(&self) -> &[(PointRef, i64)] {
        &self.rows
    }

    pub fn label(&self, p: PointRef) -> Option<i64> {
        self.rows
            .binary_search_by(|(q, _)| q.cmp(&p))
            .ok()
            .map(|i| self.rows[i].1)
    }

    /// Clusters and noise recovered from the labels.
    pub fn partition(&self) -> Partition {
        let mut clusters: Vec<Vec<PointRef>> = Vec::new();
        let mut noise = Vec::new();
        for &(p, l) in &self.rows {
            if l < 0 {
                noise.push(p);
            } else {
                let l = l as usize;
                if clusters.len() <= l {
                    clusters.resize_with(l + 1, Vec::new);
                }
                clusters[l].push(p);
            }
        }
        Partition::new(clusters, noise)
    }

    pub fn emit(&self) -> String {
        let mut out = String::with_capacity(16 * self.rows.len() + HEADER.len() + 1);
        out.push_str(HEADER);
        out.push('\n');
        for (p, l) in &self.rows {
            let _ = writeln!(out, "{},{},{}", p.laser, p.step, l);
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == HEADER => {}
            _ => return Err(Error::parse(1, format!("expected header '{HEADER}'"))),
        }
        let mut rows = Vec::new();
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 3 {
                return Err(Error::parse(i + 1, "expected laser,step,label"));
            }
            let bad = |what: &str| Error::parse(i + 1, format!("bad {what}"));
            let l: u32 = f[0].parse().map_err(|_| bad("laser"))?;
            let s: u32 = f[1].parse().map_err(|_| bad("step"))?;
            let lab: i64 = f[2].parse().map_err(|_| bad("label"))?;
            if lab < -1 {
                return Err(bad("label"));
            }
            rows.push((PointRef { step: s, laser: l }, lab));
        }
        rows.sort_unstable();
        if rows.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Format("a point is labelled twice".into()));
        }
        Ok(Labeling { rows })
    }
}
