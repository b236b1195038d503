//! Clustering output shared by every algorithm, and the canonical partition
//! used to compare them.

use std::fmt;

use crate::sensor::PointRef;

/// Work counters collected while clustering.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// Readings admitted to clustering.
    pub points: usize,
    /// Grid cells or index entries examined as candidates.
    pub candidates: u64,
    /// Exact Euclidean distance evaluations.
    pub comparisons: u64,
    pub heads_created: usize,
    pub merges: usize,
    /// Points whose head was rewritten by a merge.
    pub head_rewrites: u64,
}

/// Final partition of one rotation: clusters of at least `min_pts` points
/// and everything else as noise.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClusterResult {
    pub clusters: Vec<Vec<PointRef>>,
    pub noise: Vec<PointRef>,
    pub stats: Stats,
}

impl ClusterResult {
    pub fn clustered_points(&self) -> usize {
        self.clusters.iter().map(Vec::len).sum()
    }

    pub fn total_points(&self) -> usize {
        self.clustered_points() + self.noise.len()
    }

    pub fn canonical(&self) -> Partition {
        Partition::new(self.clusters.clone(), self.noise.clone())
    }
}

/// Order-free form of a clustering: members sorted, clusters sorted by their
/// first member, noise sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Partition {
    pub clusters: Vec<Vec<PointRef>>,
    pub noise: Vec<PointRef>,
}

impl Partition {
    pub fn new(mut clusters: Vec<Vec<PointRef>>, mut noise: Vec<PointRef>) -> Self {
        for c in &mut clusters {
            c.sort_unstable();
        }
        clusters.retain(|c| !c.is_empty());
        clusters.sort_unstable_by(|a, b| a[0].cmp(&b[0]));
        noise.sort_unstable();
        Partition { clusters, noise }
    }

    /// Describes the first difference between two partitions, if any.
    pub fn first_difference(&self, other: &Partition) -> Option<PartitionDiff> {
        for (i, (a, b)) in self.clusters.iter().zip(&other.clusters).enumerate() {
            if a != b {
                return Some(PartitionDiff::Cluster {
                    index: i,
                    left: a.clone(),
                    right: b.clone(),
                });
            }
        }
        if self.clusters.len() != other.clusters.len() {
            let n = self.clusters.len().min(other.clusters.len());
            return Some(PartitionDiff::Cluster {
                index: n,
                left: self.clusters.get(n).cloned().unwrap_or_default(),
                right: other.clusters.get(n).cloned().unwrap_or_default(),
            });
        }
        if self.noise != other.noise {
            return Some(PartitionDiff::Noise {
                left: self.noise.len(),
                right: other.noise.len(),
            });
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartitionDiff {
    Cluster {
        index: usize,
        left: Vec<PointRef>,
        right: Vec<PointRef>,
    },
    Noise {
        left: usize,
        right: usize,
    },
}

impl fmt::Display for PartitionDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn preview(c: &[PointRef]) -> String {
            let head: Vec<String> = c.iter().take(6).map(|p| p.to_string()).collect();
            let more = if c.len() > 6 { ", ..." } else { "" };
            format!("{} points [{}{}]", c.len(), head.join(", "), more)
        }
        match self {
            PartitionDiff::Cluster { index, left, right } => {
                write!(
                    f,
                    "cluster #{index}: {} vs {}",
                    preview(left),
                    preview(right)
                )
            }
            PartitionDiff::Noise { left, right } => {
                write!(f, "noise sets differ: {left} vs {right} points")
            }
        }
    }
}
